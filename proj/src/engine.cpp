#include "rnnv/engine.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <variant>

namespace rnnv {

namespace {

Operator dot_coupling() {
  Operator sum = Operator::Zero();
  for (Axis ax : {Axis::x, Axis::y, Axis::z})
    sum += angular_momentum(1, ax) * angular_momentum(2, ax);
  return sum;
}

// spectral decomposition of a Hermitian generator, reused across many exp(-iHt)
class HermitianExp {
 public:
  explicit HermitianExp(const Operator& h) : solver_(h) {
    if (solver_.info() != Eigen::Success)
      throw numeric_error("engine: eigendecomposition of a Hamiltonian failed");
  }

  Operator at(double t_s) const {
    Eigen::Vector4cd phases;
    for (int i = 0; i < 4; ++i)
      phases[i] = std::exp(Complex(0.0, -solver_.eigenvalues()[i] * t_s));
    return solver_.eigenvectors() * phases.asDiagonal() * solver_.eigenvectors().adjoint();
  }

 private:
  Eigen::SelfAdjointEigenSolver<Operator> solver_;
};

// walks a sequence event by event, producing each event's exact propagator;
// free-evolution and finite-pulse exponentials are cached within one walk
class EventWalker {
 public:
  EventWalker(const SpinSystem& system, const ExecutionContext& ctx)
      : system_(system), ctx_(ctx), free_(hamiltonian(system, ctx)) {}

  // (event propagator, wall-clock duration in seconds)
  std::pair<Operator, double> step(const Event& event) {
    if (const auto* delay = std::get_if<DelayEvent>(&event)) {
      const double dt = delay->duration_ns.to_double() * 1e-9 * ctx_.delay_scale;
      return {free_.at(dt), dt};
    }
    if (const auto* pulse = std::get_if<PulseEvent>(&event)) {
      const double phase = pulse->phase.rad();
      if (pulse->mode == PulseMode::delta) {
        const double flip =
            pulse->flip_deg.to_double() * (pi / 180.0) * ctx_.amplitude_scale;
        return {two_spin_rotation(su2_rotation(flip, phase)), 0.0};
      }
      const double dt = pulse->duration_ns.to_double() * 1e-9;
      const auto key = std::make_pair(phase, dt);
      auto it = pulse_cache_.find(key);
      if (it == pulse_cache_.end()) {
        const RfField rf{ctx_.omega_nut_nominal() * ctx_.amplitude_scale, phase};
        it = pulse_cache_.emplace(key, unitary_exp(hamiltonian(system_, ctx_, rf), dt)).first;
      }
      return {it->second, dt};
    }
    throw std::invalid_argument(
        "propagate: FilterMarker events are handled by the experiments layer");
  }

 private:
  SpinSystem system_;
  ExecutionContext ctx_;
  HermitianExp free_;
  std::map<std::pair<double, double>, Operator> pulse_cache_;
};

} // namespace

SpinSystem effective_system(const SpinSystem& system, const ExecutionContext& ctx) {
  SpinSystem eff = system;
  eff.omega_sigma += 2.0 * ctx.offset;
  return eff;
}

Operator hamiltonian(const SpinSystem& system, const ExecutionContext& ctx,
                     const std::optional<RfField>& rf) {
  const SpinSystem eff = effective_system(system, ctx);
  Operator h = 0.5 * eff.omega_sigma * total_angular_momentum(Axis::z) +
               0.5 * eff.omega_delta *
                   (angular_momentum(1, Axis::z) - angular_momentum(2, Axis::z)) +
               eff.omega_J() * dot_coupling();
  if (rf)
    h += rf->amplitude * (std::cos(rf->phase) * total_angular_momentum(Axis::x) +
                          std::sin(rf->phase) * total_angular_momentum(Axis::y));
  return h;
}

Operator unitary_exp(const Operator& h, double t_s) { return HermitianExp(h).at(t_s); }

Operator propagate(const PulseSequence& seq, const SpinSystem& system,
                   const ExecutionContext& ctx) {
  EventWalker walker(system, ctx);
  Operator u = Operator::Identity();
  for (const Event& event : seq.events) u = walker.step(event).first * u;
  return u;
}

std::vector<Checkpoint> propagate_density(const PulseSequence& seq, const SpinSystem& system,
                                          const ExecutionContext& ctx,
                                          const DensityMatrix& rho0) {
  EventWalker walker(system, ctx);
  std::vector<Checkpoint> out;
  out.reserve(seq.events.size() + 1);
  out.push_back({0.0, rho0});
  DensityMatrix rho = rho0;
  double t = 0.0;
  for (const Event& event : seq.events) {
    const auto [u, dt] = walker.step(event);
    rho = u * rho * u.adjoint();
    t += dt;
    out.push_back({t, rho});
  }
  return out;
}

bool is_physical_density(const DensityMatrix& rho, double tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho);
  return solver.info() == Eigen::Success && solver.eigenvalues().minCoeff() >= -tol;
}

Operator interaction_frame_term(double t_s, const std::vector<RfSegment>& segments,
                                const SpinSystem& system, const ExecutionContext& ctx,
                                const TermQuantumNumbers& term) {
  term.validate();
  const SpinSystem eff = effective_system(system, ctx);
  const Matrix2 u = rf_propagator_at(segments, t_s);
  Complex g;
  if (term.mu == 1)
    g = euler_zeta(u) / std::sqrt(2.0);
  else if (term.mu == -1)
    g = -std::conj(euler_zeta(u)) / std::sqrt(2.0);
  else
    g = euler_cos_beta(u);
  const Complex modulation = std::exp(Complex(0.0, term.m * system.omega_J() * t_s));
  return term_amplitude(term, eff) * g * modulation * term_operator(term);
}

Operator interaction_frame_term(double t_s, const PulseSequence& element,
                                const SpinSystem& system, const ExecutionContext& ctx,
                                const TermQuantumNumbers& term) {
  return interaction_frame_term(t_s, build_rf_segments(element, ctx), system, ctx, term);
}

AverageHamiltonian average_hamiltonian_1(const PulseSequence& seq, const SpinSystem& system,
                                         const ExecutionContext& ctx, int pulse_points) {
  const auto segments = build_rf_segments(seq, ctx);
  const double duration = segments.back().t1_s;
  const double periods = duration * system.J_hz;
  const long long whole = std::llround(periods);
  if (whole < 1 || std::abs(periods - static_cast<double>(whole)) > 0.02 * whole)
    throw infeasible_error(
        "average_hamiltonian_1: sequence duration is not a whole number of J periods");

  const SpinSystem eff = effective_system(system, ctx);
  AverageHamiltonian out;
  out.duration_s = duration;
  for (int m : {-1, 0, 1})
    for (int mu : {-1, 0, 1}) {
      const TermQuantumNumbers term{1, m, 1, mu};
      const Complex coarse =
          interaction_frame_average(segments, m, mu, system.omega_J(), pulse_points);
      const Complex fine =
          interaction_frame_average(segments, m, mu, system.omega_J(), 2 * pulse_points);
      if (std::abs(fine - coarse) > 1e-8)
        throw numeric_error("average_hamiltonian_1: quadrature did not converge");
      const Complex coefficient = term_amplitude(term, eff) * fine;
      out.terms.push_back({term, coefficient});
      out.matrix += coefficient * term_operator(term);
    }
  return out;
}

double global_phase_distance(const Operator& u, const Operator& v) {
  // the minimizing phase is arg tr(V^dag U); aligning before subtracting keeps
  // full precision near zero (unlike the sqrt(|u|^2+|v|^2-2|tr|) shortcut)
  const Complex overlap = (v.adjoint() * u).trace();
  if (std::abs(overlap) < 1e-300) return std::sqrt(u.squaredNorm() + v.squaredNorm());
  const Complex phase = overlap / std::abs(overlap);
  return (u - phase * v).norm();
}

double effective_vs_exact_error(const PulseSequence& seq, const SpinSystem& system,
                                const ExecutionContext& ctx) {
  const Operator u_exact = propagate(seq, system, ctx);
  const auto segments = build_rf_segments(seq, ctx);
  const double duration = segments.back().t1_s;
  const AverageHamiltonian hbar = average_hamiltonian_1(seq, system, ctx);
  const Operator symmetrized = 0.5 * (hbar.matrix + hbar.matrix.adjoint());
  const Operator u_eff = unitary_exp(system.omega_J() * dot_coupling(), duration) *
                         two_spin_rotation(rf_end_propagator(segments)) *
                         unitary_exp(symmetrized, duration);
  return global_phase_distance(u_exact, u_eff);
}

} // namespace rnnv
