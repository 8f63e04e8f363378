#include "rnnv/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace rnnv {

namespace {

const Complex I_unit(0.0, 1.0);
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

} // namespace

// --- terms and selection rules -------------------------------------------------

void TermQuantumNumbers::validate() const {
  if (ell != 1 || lambda != 1)
    throw infeasible_error("only rank-1 x rank-1 terms are modeled");
  if (m < -ell || m > ell || mu < -lambda || mu > lambda)
    throw infeasible_error("term quantum numbers out of range");
}

std::string TermQuantumNumbers::name() const {
  auto sgn = [](int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); };
  return "(" + std::to_string(ell) + "," + sgn(m) + "," + std::to_string(lambda) + "," +
         sgn(mu) + ")";
}

std::vector<SymmetryNumbers> reference_symmetries() {
  return {
      {4, 1, -1}, {4, 3, 1},   {4, 5, -1},  {4, 7, 1},   {4, 9, -1},
      {6, 1, -2}, {6, 5, 2},   {6, 7, -2},  {6, 8, -1},  {6, 10, 1},
      {8, 1, -3}, {8, 3, -1},  {8, 5, 1},   {8, 7, 3},   {8, 9, -3},
      {10, 1, -4}, {10, 2, -3}, {10, 3, -2}, {10, 4, -1}, {10, 6, 1},
      {10, 7, 2},
  };
}

bool is_allowed(const SymmetryNumbers& sym, const TermQuantumNumbers& term) {
  sym.validate();
  term.validate();
  const int q = term.m * sym.n - term.mu * sym.nu;
  const int half = sym.N / 2;
  if (q % half != 0) return false;
  const int z = q / half;
  // lambda = 1 throughout: Z must be odd
  return (z % 2) != 0;
}

std::vector<TermQuantumNumbers> allowed_terms(const SymmetryNumbers& sym) {
  std::vector<TermQuantumNumbers> out;
  for (int m = 1; m >= -1; --m)
    for (int mu = 1; mu >= -1; --mu) {
      TermQuantumNumbers t{1, m, 1, mu};
      if (is_allowed(sym, t)) out.push_back(t);
    }
  return out;
}

Operator term_operator(const TermQuantumNumbers& term) {
  term.validate();
  switch (term.m) {
    case 1:
      return tensor_ungerade(term.mu);
    case 0:
      return tensor_gerade(term.mu);
    default: {
      // Hermiticity partner of the m = +1 family:
      // Q_{1,-1,1,mu} = (-1)^mu (T^u_{1,-mu})^dag
      const double sign = (term.mu == 0) ? 1.0 : -1.0;
      return sign * tensor_ungerade(-term.mu).adjoint();
    }
  }
}

double term_amplitude(const TermQuantumNumbers& term, const SpinSystem& system) {
  term.validate();
  return (term.m == 0) ? 0.5 * system.omega_sigma : 0.5 * system.omega_delta;
}

// --- rf segments ---------------------------------------------------------------

std::vector<RfSegment> build_rf_segments(const PulseSequence& seq,
                                         const ExecutionContext& ctx) {
  std::vector<RfSegment> segments;
  Matrix2 u = Matrix2::Identity();
  Rational cursor_ns{0};
  const double deg2rad = pi / 180.0;
  for (const Event& e : seq.events) {
    if (std::holds_alternative<FilterMarker>(e))
      throw infeasible_error("rf trajectory is undefined across filter markers");
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      const double phase = p->phase.rad();
      if (p->mode == PulseMode::delta || p->duration_ns.is_zero()) {
        const double flip = p->flip_deg.to_double() * deg2rad * ctx.amplitude_scale;
        u = su2_rotation(flip, phase) * u;
        continue;
      }
      RfSegment seg;
      seg.t0_s = cursor_ns.to_double() * 1e-9;
      cursor_ns += p->duration_ns;
      seg.t1_s = cursor_ns.to_double() * 1e-9;
      seg.u0 = u;
      seg.pulsing = true;
      seg.omega_eff = ctx.omega_nut_nominal() * ctx.amplitude_scale;
      seg.phase_rad = phase;
      u = su2_rotation(seg.omega_eff * (seg.t1_s - seg.t0_s), phase) * u;
      segments.push_back(seg);
    } else {
      const auto& d = std::get<DelayEvent>(e);
      if (d.duration_ns.is_zero() && ctx.delay_scale == 1.0) continue;
      RfSegment seg;
      seg.t0_s = cursor_ns.to_double() * 1e-9;
      cursor_ns += d.duration_ns * Rational::from_decimal(ctx.delay_scale, 9);
      seg.t1_s = cursor_ns.to_double() * 1e-9;
      seg.u0 = u;
      segments.push_back(seg);
    }
  }
  // zero-width sentinel carrying the final propagator
  RfSegment end;
  end.t0_s = end.t1_s = cursor_ns.to_double() * 1e-9;
  end.u0 = u;
  segments.push_back(end);
  return segments;
}

Matrix2 rf_in_segment(const RfSegment& seg, double t_s) {
  if (!seg.pulsing) return seg.u0;
  return su2_rotation(seg.omega_eff * (t_s - seg.t0_s), seg.phase_rad) * seg.u0;
}

Matrix2 rf_propagator_at(const std::vector<RfSegment>& segments, double t_s) {
  if (segments.empty()) return Matrix2::Identity();
  // last segment whose start is <= t (post-jump convention at boundaries)
  std::size_t lo = 0;
  for (std::size_t i = 0; i < segments.size(); ++i)
    if (segments[i].t0_s <= t_s + 1e-15) lo = i;
  return rf_in_segment(segments[lo], std::min(t_s, segments[lo].t1_s));
}

Matrix2 rf_end_propagator(const std::vector<RfSegment>& segments) {
  if (segments.empty()) return Matrix2::Identity();
  return segments.back().u0;
}

double euler_cos_beta(const Matrix2& u) {
  const double na = std::norm(u(0, 0));
  const double nb = std::norm(u(0, 1));
  return (na - nb) / (na + nb);
}

Complex euler_zeta(const Matrix2& u) {
  const double n = std::norm(u(0, 0)) + std::norm(u(0, 1));
  return -2.0 * std::conj(u(0, 0)) * u(0, 1) / n;
}

EulerTrajectory euler_trajectory(const PulseSequence& element, const ExecutionContext& ctx,
                                 double grid_step_s) {
  if (grid_step_s <= 0.0) throw infeasible_error("trajectory grid step must be positive");
  const auto segments = build_rf_segments(element, ctx);
  EulerTrajectory traj;
  double prev_alpha = 0.0, prev_gamma = 0.0;
  auto push_sample = [&](double t, const Matrix2& u) {
    EulerAngles e = su2_euler_angles(u, prev_gamma);
    // unwrap to continuity with the previous sample
    e.gamma += 2.0 * pi * std::round((prev_gamma - e.gamma) / (2.0 * pi));
    e.alpha += 2.0 * pi * std::round((prev_alpha - e.alpha) / (2.0 * pi));
    prev_gamma = e.gamma;
    prev_alpha = e.alpha;
    traj.times_s.push_back(t);
    traj.angles.push_back(e);
  };
  for (const RfSegment& seg : segments) {
    if (seg.t1_s <= seg.t0_s) continue;
    push_sample(seg.t0_s, seg.u0);
    const double width = seg.t1_s - seg.t0_s;
    const int interior = static_cast<int>(std::floor(width / grid_step_s));
    for (int k = 1; k <= interior; ++k) {
      const double t = seg.t0_s + k * grid_step_s;
      if (t >= seg.t1_s - 1e-15) break;
      push_sample(t, rf_in_segment(seg, t));
    }
  }
  const RfSegment& last = segments.back();
  push_sample(last.t1_s, last.u0);
  return traj;
}

// --- scaling factors --------------------------------------------------------------

namespace {

// d^1_{mu 0}(-beta(t)) exp(i mu gamma(t)) expressed through SU(2) invariants
Complex frame_factor(const Matrix2& u, int mu) {
  if (mu == 1) return euler_zeta(u) * inv_sqrt2;
  if (mu == -1) return -std::conj(euler_zeta(u)) * inv_sqrt2;
  return Complex(euler_cos_beta(u), 0.0);
}

Complex phase_exp(double w, double t) { return std::exp(I_unit * (w * t)); }

} // namespace

Complex interaction_frame_average(const std::vector<RfSegment>& segments, int m, int mu,
                                  double omega_J, int pulse_points) {
  if (pulse_points < 2) throw infeasible_error("pulse quadrature needs at least 2 intervals");
  if (pulse_points % 2 != 0) ++pulse_points;  // Simpson needs an even interval count
  const double w = m * omega_J;
  Complex sum(0.0, 0.0);
  double total = 0.0;
  for (const RfSegment& seg : segments) {
    const double width = seg.t1_s - seg.t0_s;
    if (width <= 0.0) continue;
    total = seg.t1_s;
    if (!seg.pulsing) {
      const Complex g = frame_factor(seg.u0, mu);
      if (w == 0.0)
        sum += g * width;
      else
        sum += g * (phase_exp(w, seg.t1_s) - phase_exp(w, seg.t0_s)) / (I_unit * w);
      continue;
    }
    const int n = pulse_points;
    const double h = width / n;
    Complex acc(0.0, 0.0);
    for (int k = 0; k <= n; ++k) {
      const double t = seg.t0_s + k * h;
      const Complex f = frame_factor(rf_in_segment(seg, t), mu) * phase_exp(w, t);
      const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      acc += weight * f;
    }
    sum += acc * (h / 3.0);
  }
  if (total <= 0.0) throw infeasible_error("cannot average over a zero-duration sequence");
  return sum / total;
}

ScalingFactor scaling_factor_numeric(const SymmetryNumbers& sym, const PulseSequence& element,
                                     const TermQuantumNumbers& term, const Rational& J_hz,
                                     const ExecutionContext& ctx, int pulse_points) {
  sym.validate();
  term.validate();
  const double nominal = sym.tau_R_ns(J_hz).to_double();
  const double actual = element.total_duration_ns().to_double();
  if (std::abs(actual - nominal) > 0.02 * nominal)
    throw infeasible_error("element duration deviates from tau_R = (n/N)/J by more than 2%");
  const auto segments = build_rf_segments(element, ctx);
  const double omega_J = 2.0 * pi * J_hz.to_double();
  ScalingFactor sf;
  sf.symmetry = sym;
  sf.term = term;
  sf.K = interaction_frame_average(segments, term.m, term.mu, omega_J, pulse_points);
  sf.kappa = std::exp(-I_unit * (term.mu * pi * double(sym.nu) / double(sym.N))) * sf.K;
  return sf;
}

Complex scaling_factor_delta(const SymmetryNumbers& sym, Branch term_sign) {
  const int s = (term_sign == Branch::plus) ? 1 : -1;
  const TermQuantumNumbers term{1, s, 1, s};
  if (!is_allowed(sym, term))
    throw infeasible_error("term " + term.name() + " is symmetry-forbidden for " + sym.name());
  const double N = sym.N, n = sym.n, nu = sym.nu;
  const double mag = std::sqrt(2.0) * (N / (n * pi)) * std::pow(std::sin(n * pi / (2.0 * N)), 2);
  // (-1)^x at non-integer x read as principal exp(i pi x); magnitude is the
  // validated quantity
  const double expo = (N + s * (n - nu)) / (2.0 * N);
  return mag * std::exp(I_unit * (pi * expo));
}

// --- effective ST dynamics ---------------------------------------------------------

STEffective st_effective(const SymmetryNumbers& sym, const PulseSequence& element,
                         const SpinSystem& system, const ExecutionContext& ctx) {
  const auto terms = allowed_terms(sym);
  if (terms.size() != 2 || terms[0].m != 1 || terms[1].m != -1 ||
      terms[0].mu == 0 || terms[0].mu != -terms[1].mu)
    throw infeasible_error(sym.name() +
                           " does not select a single singlet-triplet transition");
  const TermQuantumNumbers plus = terms[0];
  const ScalingFactor sf = scaling_factor_numeric(
      sym, element, plus, Rational::from_decimal(system.J_hz), ctx);
  // <T_mu| H-bar |S0> = (omega_Delta / 2) kappa_+ = (omega_ST / 2) e^{-i phi}
  const Complex c = 0.5 * system.omega_delta * sf.kappa;
  STEffective out;
  out.kappa_plus = sf.kappa;
  out.branch_mu = plus.mu;
  out.omega_ST = 2.0 * std::abs(c);
  out.phi_ST = (out.omega_ST > 0.0) ? -std::arg(c) : 0.0;
  return out;
}

} // namespace rnnv
