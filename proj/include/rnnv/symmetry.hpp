#pragma once
// average-Hamiltonian theory layer: selection rules, rf Euler trajectories,
// scaling factors (numeric integral and delta-pulse closed form), and the
// effective singlet-triplet nutation parameters.

#include <complex>
#include <vector>

#include "rnnv/sequence.hpp"
#include "rnnv/spinops.hpp"

namespace rnnv {

struct TermQuantumNumbers {
  int ell = 1;     // pseudo-space rank (always 1 here)
  int m = 0;       // pseudo-space component
  int lambda = 1;  // spin rank (always 1 here)
  int mu = 0;      // spin component

  void validate() const;  // |m| <= ell, |mu| <= lambda, ranks == 1
  std::string name() const;  // e.g. "(1,+1,1,-1)"
};

struct ScalingFactor {
  Complex kappa{0.0, 0.0};
  Complex K{0.0, 0.0};
  SymmetryNumbers symmetry;
  TermQuantumNumbers term;
};

struct EulerTrajectory {
  std::vector<double> times_s;
  std::vector<EulerAngles> angles;
};

// the published selection of symmetries suitable for singlet-triplet
// conversion (the reference scaling-factor table, 21 entries)
std::vector<SymmetryNumbers> reference_symmetries();

// selection rule: allowed iff m n - mu nu = (N/2) Z with Z of the parity of lambda
bool is_allowed(const SymmetryNumbers& sym, const TermQuantumNumbers& term);

// all (m, mu) pairs with ell = lambda = 1 passing the selection rule
std::vector<TermQuantumNumbers> allowed_terms(const SymmetryNumbers& sym);

// interaction-frame lookup: spin operator Q_{1m1mu} and amplitude omega_{1m1mu}
Operator term_operator(const TermQuantumNumbers& term);
double term_amplitude(const TermQuantumNumbers& term, const SpinSystem& system);

// --- rf propagator bookkeeping ----------------------------------------------
// the rf frame is generated by H_rf alone; it is a simultaneous SU(2)
// rotation of both spins, tracked analytically segment by segment.

struct RfSegment {
  double t0_s = 0.0;
  double t1_s = 0.0;
  Matrix2 u0 = Matrix2::Identity();  // rf propagator at t0 (after any delta jump)
  bool pulsing = false;              // finite pulse active over [t0, t1]
  double omega_eff = 0.0;            // rad/s nutation during the pulse
  double phase_rad = 0.0;
};

std::vector<RfSegment> build_rf_segments(const PulseSequence& seq,
                                         const ExecutionContext& ctx);

// rf propagator within a segment / at an absolute time (post-jump convention)
Matrix2 rf_in_segment(const RfSegment& seg, double t_s);
Matrix2 rf_propagator_at(const std::vector<RfSegment>& segments, double t_s);
Matrix2 rf_end_propagator(const std::vector<RfSegment>& segments);

// branch-free Euler-angle invariants of an SU(2) element:
// cos(beta) and zeta = sin(beta) exp(i gamma)
double euler_cos_beta(const Matrix2& u);
Complex euler_zeta(const Matrix2& u);

// sampled, unwrapped Euler-angle trajectory of the rf propagator
EulerTrajectory euler_trajectory(const PulseSequence& element, const ExecutionContext& ctx,
                                 double grid_step_s = 1e-6);

// --- scaling factors -----------------------------------------------------------

// K = tau_R^{-1} Int_0^{tau_R} d^1_{mu 0}(-beta(t)) exp{i(mu gamma(t) + m wJ t)} dt
// over the unshifted basic element; kappa = exp(-i mu pi nu / N) K.
// delays integrate analytically; finite pulses use Simpson quadrature with
// pulse_points intervals (>= 1000).
ScalingFactor scaling_factor_numeric(const SymmetryNumbers& sym, const PulseSequence& element,
                                     const TermQuantumNumbers& term, const Rational& J_hz,
                                     const ExecutionContext& ctx, int pulse_points = 1000);

// delta-pulse closed form for the (1,+/-1,1,+/-1) terms:
// 2^{1/2} (N / n pi) (-1)^{(N +/- (n - nu))/(2N)} sin^2(n pi / 2N),
// with (-1)^x read as the principal exp(i pi x); the magnitude is the
// validated quantity (numeric kappa is authoritative for the phase)
Complex scaling_factor_delta(const SymmetryNumbers& sym, Branch term_sign);

// shared integration core: mean of d^1_{mu 0}(-beta) e^{i(mu gamma + m w t)}
// over the full sequence duration (used by the engine for H-bar)
Complex interaction_frame_average(const std::vector<RfSegment>& segments, int m, int mu,
                                  double omega_J, int pulse_points);

// --- effective singlet-triplet dynamics ----------------------------------------

struct STEffective {
  double omega_ST = 0.0;  // rad/s
  double phi_ST = 0.0;    // rad
  int branch_mu = 0;      // +1: |S0>-|T+1> transition, -1: |S0>-|T-1>
  Complex kappa_plus{0.0, 0.0};  // scaling factor of the (m=+1) term
};

STEffective st_effective(const SymmetryNumbers& sym, const PulseSequence& element,
                         const SpinSystem& system, const ExecutionContext& ctx);

} // namespace rnnv
