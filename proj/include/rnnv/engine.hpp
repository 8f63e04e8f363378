#pragma once
// exact unitary propagation over the two-spin Hilbert space, interaction-frame
// transformation, and the numerically integrated first-order average Hamiltonian.

#include <optional>
#include <vector>

#include "rnnv/context.hpp"
#include "rnnv/sequence.hpp"
#include "rnnv/spinops.hpp"
#include "rnnv/symmetry.hpp"

namespace rnnv {

// density operators share the 4x4 complex representation; helpers below
// validate the physical-state invariants where they matter
using DensityMatrix = Operator;

struct RfField {
  double amplitude = 0.0;  // rad/s
  double phase = 0.0;      // rad
};

// chemical-shift parameters after folding in the context resonance offset
// (offset is added to omega_sigma/2 on each spin, so omega_sigma gains 2x)
SpinSystem effective_system(const SpinSystem& system, const ExecutionContext& ctx);

// H = H_CS + H_J (+ H_rf), Hermitian, rad/s
Operator hamiltonian(const SpinSystem& system, const ExecutionContext& ctx,
                     const std::optional<RfField>& rf = std::nullopt);

// exp(-i h t) for Hermitian h, via eigendecomposition (exact per segment)
Operator unitary_exp(const Operator& h, double t_s);

// exact piecewise propagator of a compiled sequence.  Delta pulses act as
// instantaneous rotations (no J/CS evolution during them); finite pulses
// evolve under the full Hamiltonian.  FilterMarkers are rejected here -- the
// experiments layer owns their semantics.
Operator propagate(const PulseSequence& seq, const SpinSystem& system,
                   const ExecutionContext& ctx);

struct Checkpoint {
  double t_s = 0.0;
  DensityMatrix rho;
};

// density-matrix evolution with a checkpoint after every event
// (checkpoint 0 is the initial state at t = 0)
std::vector<Checkpoint> propagate_density(const PulseSequence& seq, const SpinSystem& system,
                                          const ExecutionContext& ctx,
                                          const DensityMatrix& rho0);

bool is_physical_density(const DensityMatrix& rho, double tol = 1e-10);

// single (m, mu) component of the interaction-frame chemical-shift Hamiltonian
// at wall time t.  The overload taking precomputed rf segments is the hot path.
Operator interaction_frame_term(double t_s, const std::vector<RfSegment>& segments,
                                const SpinSystem& system, const ExecutionContext& ctx,
                                const TermQuantumNumbers& term);
Operator interaction_frame_term(double t_s, const PulseSequence& element,
                                const SpinSystem& system, const ExecutionContext& ctx,
                                const TermQuantumNumbers& term);

struct TermAverage {
  TermQuantumNumbers term;
  Complex coefficient;  // rad/s, multiplies term_operator(term)
};

struct AverageHamiltonian {
  Operator matrix = Operator::Zero();  // sum of coefficient * Q over all terms
  std::vector<TermAverage> terms;      // the nine (m, mu) components
  double duration_s = 0.0;
};

// first-order average Hamiltonian over a complete cycle (duration must be a
// whole number of J periods within 2%); Simpson quadrature over finite pulses
// with a grid-doubling convergence check, analytic integrals over delays
AverageHamiltonian average_hamiltonian_1(const PulseSequence& seq, const SpinSystem& system,
                                         const ExecutionContext& ctx, int pulse_points = 2000);

// Frobenius distance minimized over a global phase
double global_phase_distance(const Operator& u, const Operator& v);

// || U_exact(T) - U_J(T) U_rf(T) exp(-i Hbar T) ||, global-phase-aligned
double effective_vs_exact_error(const PulseSequence& seq, const SpinSystem& system,
                                const ExecutionContext& ctx);

} // namespace rnnv
