#include "rnnv/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <variant>

namespace rnnv {

namespace {

Operator detection_operator() {
  return angular_momentum(1, Axis::minus) + angular_momentum(2, Axis::minus);
}

// singlet-order operator: |S0><S0| - (1/3) sum_m |Tm><Tm|, HS norm^2 = 4/3
Operator singlet_order_operator() {
  const STStates s = singlet_triplet_states();
  return s.S0 * s.S0.adjoint() -
         (s.Tp1 * s.Tp1.adjoint() + s.T0 * s.T0.adjoint() + s.Tm1 * s.Tm1.adjoint()) / 3.0;
}

// total magnetic quantum number of each Zeeman basis state
constexpr int zeeman_m[4] = {1, 0, 0, -1};

struct LabeledState {
  double energy = 0.0;
  StateVector state;
};

// eigenstates of H_CS + H_J: |aa> and |bb> are exact eigenstates (the
// difference term only couples the central block), so the block structure is
// resolved analytically instead of trusting a degenerate 4x4 solver
struct QuartetBasis {
  LabeledState aa, mid_low, mid_high, bb;
};

QuartetBasis quartet_basis(const SpinSystem& system, const ExecutionContext& ctx) {
  const Operator h0 = hamiltonian(system, ctx);
  QuartetBasis basis;
  basis.aa.energy = h0(0, 0).real();
  basis.aa.state = StateVector::Unit(0);
  basis.bb.energy = h0(3, 3).real();
  basis.bb.state = StateVector::Unit(3);

  Matrix2 block;
  block << h0(1, 1), h0(1, 2), h0(2, 1), h0(2, 2);
  Eigen::SelfAdjointEigenSolver<Matrix2> solver(block);
  for (int k = 0; k < 2; ++k) {
    LabeledState& slot = (k == 0) ? basis.mid_low : basis.mid_high;
    slot.energy = solver.eigenvalues()[k];
    slot.state = StateVector::Zero();
    slot.state[1] = solver.eigenvectors()(0, k);
    slot.state[2] = solver.eigenvectors()(1, k);
  }
  return basis;
}

std::vector<ABQuartetLine> quartet_lines(const DensityMatrix& rho, const SpinSystem& system,
                                         const ExecutionContext& ctx) {
  const QuartetBasis basis = quartet_basis(system, ctx);
  const Operator d = detection_operator();
  const LabeledState* upper[4] = {&basis.aa, &basis.aa, &basis.mid_low, &basis.mid_high};
  const LabeledState* lower[4] = {&basis.mid_low, &basis.mid_high, &basis.bb, &basis.bb};
  std::vector<ABQuartetLine> lines(4);
  for (int k = 0; k < 4; ++k) {
    const StateVector& i = upper[k]->state;
    const StateVector& j = lower[k]->state;
    lines[k].frequency = upper[k]->energy - lower[k]->energy;
    lines[k].amplitude = (i.adjoint() * rho * j)(0, 0) * (j.adjoint() * d * i)(0, 0);
  }
  std::sort(lines.begin(), lines.end(),
            [](const ABQuartetLine& a, const ABQuartetLine& b) {
              return a.frequency < b.frequency;
            });
  return lines;
}

PulseSequence readout_sequence(const ExecutionContext& ctx) {
  if (ctx.mode == PulseMode::delta) {
    PulseSequence seq;
    seq.events = {PulseEvent{90, Phase(Rational(90)), PulseMode::delta, 0}};
    seq.label = "readout-90";
    return seq;
  }
  PulseSequence seq = phase_shift(composite_bb1(Rational(90), ctx), Rational(90));
  seq.label = "readout-bb1-90";
  return seq;
}

} // namespace

DensityMatrix thermal_state() {
  return 0.25 * Operator::Identity() + total_angular_momentum(Axis::z);
}

double singlet_order(const DensityMatrix& rho) {
  return hs_inner(singlet_order_operator(), rho).real();
}

double population(const DensityMatrix& rho, const StateVector& state) {
  return (state.adjoint() * rho * state)(0, 0).real();
}

DensityMatrix t00_filter(const DensityMatrix& rho) {
  const Operator q = singlet_order_operator();
  return 0.25 * rho.trace() * Operator::Identity() +
         q * (hs_inner(q, rho) / hs_inner(q, q).real());
}

DensityMatrix dephase_gradient(const DensityMatrix& rho) {
  DensityMatrix out = rho;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (zeeman_m[i] != zeeman_m[j]) out(i, j) = Complex(0.0, 0.0);
  return out;
}

DensityMatrix apply_sequence(const DensityMatrix& rho0, const PulseSequence& seq,
                             const SpinSystem& system, const ExecutionContext& ctx) {
  DensityMatrix rho = rho0;
  PulseSequence chunk;
  auto flush = [&]() {
    if (chunk.events.empty()) return;
    const Operator u = propagate(chunk, system, ctx);
    rho = u * rho * u.adjoint();
    chunk.events.clear();
  };
  for (const Event& event : seq.events) {
    if (std::get_if<FilterMarker>(&event)) {
      // both marker kinds are idealized as the T00 projection: the SOD block
      // is a T00 filter followed by its echo train, and a bare z-gradient
      // (dephase_gradient) could not remove the zero-quantum S0-T0 coherence
      // the echoes create, stalling the destruction at the coherent level
      flush();
      rho = t00_filter(rho);
    } else {
      chunk.events.push_back(event);
    }
  }
  flush();
  return rho;
}

TrainBuilder plain_train_builder(const SymmetryNumbers& sym, Construction construction,
                                 const Rational& J_hz, const ExecutionContext& ctx) {
  const PulseSequence a = basic_element_A(sym, J_hz, ctx);
  const PulseSequence b =
      (construction == Construction::riffled) ? basic_element_B(sym, J_hz, ctx) : a;
  return [sym, a, b](int n_elements) { return build_train(sym, a, b, n_elements); };
}

TrainBuilder composite_train_builder(const SymmetryNumbers& sym, Construction construction,
                                     const Rational& J_hz, const ExecutionContext& ctx,
                                     CompositeKind kind, CompositeDelayPolicy policy) {
  const PulseSequence a = with_composite(basic_element_A(sym, J_hz, ctx), kind, ctx, policy);
  const PulseSequence b = (construction == Construction::riffled)
                              ? with_composite(basic_element_B(sym, J_hz, ctx), kind, ctx, policy)
                              : a;
  return [sym, a, b](int n_elements) { return build_train(sym, a, b, n_elements); };
}

std::vector<ABQuartetLine> st_excitation_protocol(const TrainBuilder& builder, int n_elements,
                                                  const SpinSystem& system,
                                                  const ExecutionContext& ctx) {
  if (n_elements < 1)
    throw std::invalid_argument("st_excitation_protocol: n_elements must be >= 1");
  const DensityMatrix rho =
      apply_sequence(thermal_state(), builder(n_elements), system, ctx);
  return quartet_lines(rho, system, ctx);
}

std::vector<ABQuartetLine> single_pulse_excitation(const SpinSystem& system,
                                                   const ExecutionContext& ctx) {
  const Operator u = rotation_axis(pi / 2, Axis::y);
  const DensityMatrix rho = u * thermal_state() * u.adjoint();
  return quartet_lines(rho, system, ctx);
}

Complex readout_90(const DensityMatrix& rho, const ExecutionContext& ctx) {
  // rf rotation plus context offset only: J and the delta frequency are
  // negligible over the tens of microseconds of the readout pulse
  const SpinSystem none{};
  const Operator u = propagate(readout_sequence(ctx), none, ctx);
  return ((u * rho * u.adjoint()) * detection_operator()).trace();
}

double singlet_filter_protocol(const PulseSequence& excitation,
                               const PulseSequence& reconversion, const SpinSystem& system,
                               const ExecutionContext& ctx) {
  DensityMatrix rho = thermal_state();
  rho = apply_sequence(rho, excitation, system, ctx);
  rho = t00_filter(rho);
  rho = apply_sequence(rho, reconversion, system, ctx);
  const Complex signal = readout_90(rho, ctx);

  ExecutionContext nominal = ctx;
  nominal.amplitude_scale = 1.0;
  nominal.offset = 0.0;
  nominal.delay_scale = 1.0;
  const Complex reference = readout_90(thermal_state(), nominal);
  return (signal / reference).real();
}

double singlet_filter_protocol(const TrainBuilder& excitation, const TrainBuilder& reconversion,
                               int n_exc, int n_rec, const SpinSystem& system,
                               const ExecutionContext& ctx) {
  PulseSequence empty;
  return singlet_filter_protocol(n_exc > 0 ? excitation(n_exc) : empty,
                                 n_rec > 0 ? reconversion(n_rec) : empty, system, ctx);
}

OptimalN optimal_n(const SymmetryNumbers& sym, const SpinSystem& system,
                   const ExecutionContext& ctx, OptimalObjective objective) {
  const Rational J = Rational::from_decimal(system.J_hz);
  const TrainBuilder builder = plain_train_builder(sym, Construction::riffled, J, ctx);
  const STStates s = singlet_triplet_states();

  std::vector<double> values(21, 0.0);
  double maximum = 0.0;
  for (int n = 1; n <= 20; ++n) {
    const DensityMatrix rho = apply_sequence(thermal_state(), builder(n), system, ctx);
    double value = 0.0;
    if (objective == OptimalObjective::coherence)
      value = std::abs((s.Tp1.adjoint() * rho * s.S0)(0, 0)) +
              std::abs((s.Tm1.adjoint() * rho * s.S0)(0, 0));
    else
      value = singlet_order(rho);
    values[static_cast<std::size_t>(n)] = value;
    maximum = std::max(maximum, value);
  }

  OptimalN result;
  result.objective_max = maximum;
  for (int n = 1; n <= 20; ++n) {
    if (values[static_cast<std::size_t>(n)] >= 0.99 * maximum) {
      result.n_best = n;
      result.objective = values[static_cast<std::size_t>(n)];
      break;
    }
  }

  const PulseSequence element = basic_element_A(sym, J, ctx);
  const STEffective st = st_effective(sym, element, system, ctx);
  const double tau_R = element.total_duration_ns().to_double() * 1e-9;
  result.n_closed_coherence =
      std::max(1, static_cast<int>(std::lround(pi / (4.0 * st.omega_ST * tau_R))));
  result.n_closed_singlet_order =
      std::max(1, static_cast<int>(std::lround(pi / (2.0 * st.omega_ST * tau_R))));
  return result;
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::n_elements: return "n_elements";
    case SweepAxis::amplitude_scale: return "amplitude_scale";
    case SweepAxis::offset: return "offset";
    case SweepAxis::delay_mismatch: return "delay_mismatch";
  }
  throw std::invalid_argument("axis_name: unknown axis");
}

SweepResult run_sweep(const std::string& axis, const std::vector<double>& values,
                      const std::function<double(double)>& evaluate,
                      const std::string& metadata, unsigned threads) {
  if (values.empty()) throw std::invalid_argument("run_sweep: empty axis range");
  SweepResult result;
  result.axis_name = axis;
  result.axis_values = values;
  result.observable.assign(values.size(), std::numeric_limits<double>::quiet_NaN());
  result.point_errors.assign(values.size(), std::string());
  result.metadata = metadata;

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));

  std::atomic<std::size_t> cursor{0};
  auto body = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= values.size()) return;
      try {
        result.observable[i] = evaluate(values[i]);
      } catch (const std::exception& e) {
        result.point_errors[i] = e.what();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

double halfwidth_at_fraction(const std::vector<double>& xs, const std::vector<double>& ys,
                             double fraction) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw std::invalid_argument("halfwidth_at_fraction: need matched xs/ys with >= 3 points");
  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
  const double threshold = fraction * ys[peak];

  double right = xs.back();
  for (std::size_t i = peak + 1; i < ys.size(); ++i) {
    if (ys[i] < threshold) {
      const double f = (ys[i - 1] - threshold) / (ys[i - 1] - ys[i]);
      right = xs[i - 1] + f * (xs[i] - xs[i - 1]);
      break;
    }
  }
  double left = xs.front();
  for (std::size_t i = peak; i-- > 0;) {
    if (ys[i] < threshold) {
      const double f = (ys[i + 1] - threshold) / (ys[i + 1] - ys[i]);
      left = xs[i + 1] - f * (xs[i + 1] - xs[i]);
      break;
    }
  }
  return 0.5 * (right - left);
}

std::vector<std::pair<std::string, Complex>> standard_observables(const DensityMatrix& rho) {
  const STStates s = singlet_triplet_states();
  return {
      {"transverse_signal", (rho * detection_operator()).trace()},
      {"singlet_order", Complex(singlet_order(rho), 0.0)},
      {"population_S0", Complex(population(rho, s.S0), 0.0)},
      {"population_T+1", Complex(population(rho, s.Tp1), 0.0)},
      {"population_T0", Complex(population(rho, s.T0), 0.0)},
      {"population_T-1", Complex(population(rho, s.Tm1), 0.0)},
      {"coherence_T+1_S0", (s.Tp1.adjoint() * rho * s.S0)(0, 0)},
      {"coherence_T-1_S0", (s.Tm1.adjoint() * rho * s.S0)(0, 0)},
  };
}

} // namespace rnnv
