#include "rnnv/sequence.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rnnv {

using json = nlohmann::ordered_json;

// --- Phase -------------------------------------------------------------------

double Phase::deg() const {
  double d = base_deg.to_double();
  if (!acos_coeff.is_zero())
    d += acos_coeff.to_double() * std::acos(acos_arg) * (180.0 / pi);
  return d;
}

double Phase::rad() const { return deg() * (pi / 180.0); }

double Phase::canonical_deg() const {
  double d = std::fmod(deg(), 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 360.0) d -= 360.0;  // guard against fmod rounding at the seam
  return d;
}

Phase Phase::shifted(const Rational& delta_deg) const {
  Phase p = *this;
  p.base_deg += delta_deg;
  return p;
}

Phase Phase::negated() const {
  Phase p = *this;
  p.base_deg = -p.base_deg;
  p.acos_coeff = -p.acos_coeff;
  return p;
}

bool same_phase(const Phase& a, const Phase& b, double tol_deg) {
  double d = std::fmod(std::abs(a.deg() - b.deg()), 360.0);
  d = std::min(d, 360.0 - d);
  return d <= tol_deg;
}

// --- PulseSequence -----------------------------------------------------------

Rational PulseSequence::total_duration_ns() const {
  Rational total{0};
  for (const Event& e : events) {
    if (const auto* p = std::get_if<PulseEvent>(&e))
      total += p->duration_ns;
    else if (const auto* d = std::get_if<DelayEvent>(&e))
      total += d->duration_ns;
    // filter markers are idealized (zero duration)
  }
  return total;
}

std::size_t PulseSequence::pulse_count() const {
  std::size_t n = 0;
  for (const Event& e : events)
    if (std::holds_alternative<PulseEvent>(e)) ++n;
  return n;
}

// --- SymmetryNumbers ---------------------------------------------------------

void SymmetryNumbers::validate() const {
  if (N <= 0 || N % 2 != 0)
    throw infeasible_error("N must be even and positive (got " + std::to_string(N) + ")");
  if (n <= 0)
    throw infeasible_error("n must be positive (got " + std::to_string(n) + ")");
}

Rational SymmetryNumbers::tau_R_ns(const Rational& J_hz) const {
  if (!(J_hz > Rational(0))) throw infeasible_error("J must be positive");
  return Rational(n, N) * Rational(1000000000) / J_hz;
}

std::string SymmetryNumbers::name() const {
  return "R" + std::to_string(N) + "(" + std::to_string(n) + "," + std::to_string(nu) + ")";
}

// --- elementary transformations ----------------------------------------------

PulseSequence phase_shift(const PulseSequence& seq, const Rational& phi_deg) {
  PulseSequence out = seq;
  for (Event& e : out.events)
    if (auto* p = std::get_if<PulseEvent>(&e)) p->phase = p->phase.shifted(phi_deg);
  return out;
}

PulseSequence phase_shift_rad(const PulseSequence& seq, double phi_rad) {
  return phase_shift(seq, Rational::from_decimal(phi_rad * (180.0 / pi)));
}

PulseSequence conjugate(const PulseSequence& seq) {
  PulseSequence out = seq;
  for (Event& e : out.events)
    if (auto* p = std::get_if<PulseEvent>(&e)) p->phase = p->phase.negated();
  return out;
}

PulseSequence time_reverse(const PulseSequence& seq) {
  PulseSequence out = seq;
  std::reverse(out.events.begin(), out.events.end());
  return out;
}

PulseSequence concatenate(const std::vector<PulseSequence>& parts, const std::string& label) {
  PulseSequence out;
  out.label = label;
  for (const PulseSequence& p : parts)
    out.events.insert(out.events.end(), p.events.begin(), p.events.end());
  return out;
}

// --- R-element construction ----------------------------------------------------

Rational pulse_duration_ns(const Rational& flip_deg, const ExecutionContext& ctx) {
  if (flip_deg < Rational(0)) throw infeasible_error("flip angle must be non-negative");
  if (ctx.mode == PulseMode::delta) return Rational(0);
  // duration = flip / omega_nut = flip_deg / (360 nu_nut)
  return flip_deg * Rational(1000000000) / (Rational(360) * ctx.omega_nut_hz);
}

namespace {

PulseEvent make_pulse(const Rational& flip_deg, Phase phase, const ExecutionContext& ctx) {
  PulseEvent p;
  p.flip_deg = flip_deg;
  p.phase = phase;
  p.mode = ctx.mode;
  p.duration_ns = pulse_duration_ns(flip_deg, ctx);
  return p;
}

// service value of tau_R in finite mode: nominal rounded to the nearest
// 200 us, matching the published timing tables
Rational service_tau_R(const Rational& nominal_ns) {
  return nominal_ns.round_to_grid(Rational(200000));
}

[[noreturn]] void throw_infeasible_delay(const Rational& tau_R_ns, const Rational& total_flip_deg) {
  const double min_nut_hz = total_flip_deg.to_double() / 360.0 / (tau_R_ns.to_double() * 1e-9);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "pulses do not fit into tau_R = %.3f us; requires nutation frequency >= %.1f Hz",
                tau_R_ns.to_double() * 1e-3, min_nut_hz);
  throw infeasible_error(buf);
}

} // namespace

PulseSequence basic_element(const SymmetryNumbers& sym, const Rational& J_hz,
                            const ExecutionContext& ctx, ElementKind kind,
                            std::optional<Rational> tau_R_override_ns) {
  sym.validate();
  const Rational nominal = sym.tau_R_ns(J_hz);
  Rational tau_R = tau_R_override_ns
                       ? *tau_R_override_ns
                       : (ctx.mode == PulseMode::finite ? service_tau_R(nominal) : nominal);
  const Rational d90 = pulse_duration_ns(Rational(90), ctx);
  const Rational d180 = pulse_duration_ns(Rational(180), ctx);
  Rational tau = (tau_R - d90 - d180 - d90) / Rational(2);
  if (ctx.mode == PulseMode::finite) tau = tau.floor_to_grid(ctx.time_grid_ns);
  if (tau < Rational(0)) throw_infeasible_delay(tau_R, Rational(360));

  const Rational central_phase = (kind == ElementKind::A) ? Rational(0) : Rational(180);
  PulseSequence seq;
  seq.label = sym.name() + (kind == ElementKind::A ? " element A" : " element B");
  seq.events = {
      make_pulse(90, Phase(Rational(90)), ctx),
      DelayEvent{tau},
      make_pulse(180, Phase(central_phase), ctx),
      DelayEvent{tau},
      make_pulse(90, Phase(Rational(90)), ctx),
  };
  return seq;
}

PulseSequence basic_element_A(const SymmetryNumbers& sym, const Rational& J_hz,
                              const ExecutionContext& ctx,
                              std::optional<Rational> tau_R_override_ns) {
  return basic_element(sym, J_hz, ctx, ElementKind::A, tau_R_override_ns);
}

PulseSequence basic_element_B(const SymmetryNumbers& sym, const Rational& J_hz,
                              const ExecutionContext& ctx,
                              std::optional<Rational> tau_R_override_ns) {
  return basic_element(sym, J_hz, ctx, ElementKind::B, tau_R_override_ns);
}

PulseSequence build_train(const SymmetryNumbers& sym, const PulseSequence& basicA,
                          const PulseSequence& basicB, int count,
                          const Rational& extra_shift_deg) {
  sym.validate();
  if (count < 0) throw infeasible_error("element count must be non-negative");
  if (basicA.total_duration_ns() != basicB.total_duration_ns())
    throw infeasible_error("basic elements have mismatched durations");
  const Rational shift = sym.shift_deg();
  const PulseSequence plus = phase_shift(basicA, shift + extra_shift_deg);
  const PulseSequence minus = phase_shift(conjugate(basicB), -shift + extra_shift_deg);
  PulseSequence out;
  out.label = sym.name() + " train";
  for (int k = 0; k < count; ++k) {
    const PulseSequence& el = (k % 2 == 0) ? plus : minus;
    out.events.insert(out.events.end(), el.events.begin(), el.events.end());
  }
  return out;
}

namespace {

void check_element_duration(const SymmetryNumbers& sym, const PulseSequence& basic,
                            const std::optional<Rational>& J_hz) {
  if (!J_hz) return;
  if (basic.total_duration_ns() != sym.tau_R_ns(*J_hz))
    throw infeasible_error("basic element duration is inconsistent with tau_R = (n/N)/J");
}

} // namespace

PulseSequence build_standard(const SymmetryNumbers& sym, const PulseSequence& basic,
                             std::optional<Rational> J_hz) {
  check_element_duration(sym, basic, J_hz);
  PulseSequence out = build_train(sym, basic, basic, sym.N);
  out.label = sym.name() + " standard";
  return out;
}

PulseSequence build_riffled(const SymmetryNumbers& sym, const PulseSequence& basicA,
                            const PulseSequence& basicB, std::optional<Rational> J_hz) {
  check_element_duration(sym, basicA, J_hz);
  PulseSequence out = build_train(sym, basicA, basicB, sym.N);
  out.label = sym.name() + " riffled";
  return out;
}

PulseSequence pulsepol(const Rational& J_hz, const ExecutionContext& ctx) {
  const SymmetryNumbers sym{4, 3, 1};
  const PulseSequence a = basic_element_A(sym, J_hz, ctx);
  const PulseSequence b = basic_element_B(sym, J_hz, ctx);
  PulseSequence out = phase_shift(build_riffled(sym, a, b), Rational(-45));
  out.label = "PulsePol";
  return out;
}

// --- composite pulses ----------------------------------------------------------

PulseSequence composite_bb1(const Rational& flip_deg, const ExecutionContext& ctx) {
  if (!(flip_deg > Rational(0)) || flip_deg > Rational(720))
    throw infeasible_error("BB1 flip angle out of range");
  // Wimperis angle arccos(-beta/(4 pi)) with beta = flip in radians
  const double arg = -(flip_deg.to_double() / 720.0);
  const Phase w(Rational(0), Rational(1), arg);
  const Phase w3(Rational(0), Rational(3), arg);
  PulseSequence seq;
  seq.label = "BB1(" + flip_deg.to_string() + ")";
  seq.events = {
      make_pulse(flip_deg / Rational(2), Phase(Rational(0)), ctx),
      make_pulse(180, w, ctx),
      make_pulse(360, w3, ctx),
      make_pulse(180, w, ctx),
      make_pulse(flip_deg / Rational(2), Phase(Rational(0)), ctx),
  };
  return seq;
}

PulseSequence composite_asbo11(const ExecutionContext& ctx) {
  // antisymmetric list [-p1..-p5, 0, +p5..+p1] with
  // p1 = (5/2)W, p2 = W, p3 = 240 - W/2, p4 = 120, p5 = 240 + W/2,
  // W = arccos(-1/4)
  const double arg = -0.25;
  struct Entry { Rational base; Rational coeff; };
  const Entry plus[5] = {
      {Rational(0), Rational(5, 2)},   // p1
      {Rational(0), Rational(1)},      // p2
      {Rational(240), Rational(-1, 2)},// p3
      {Rational(120), Rational(0)},    // p4
      {Rational(240), Rational(1, 2)}, // p5
  };
  PulseSequence seq;
  seq.label = "ASBO-11";
  for (int i = 0; i < 5; ++i)
    seq.events.push_back(
        make_pulse(180, Phase(-plus[i].base, -plus[i].coeff, arg), ctx));
  seq.events.push_back(make_pulse(180, Phase(Rational(0)), ctx));
  for (int i = 4; i >= 0; --i)
    seq.events.push_back(make_pulse(180, Phase(plus[i].base, plus[i].coeff, arg), ctx));
  return seq;
}

PulseSequence composite_sp7(const ExecutionContext& ctx) {
  PulseSequence seq;
  seq.label = "SP7";
  const int flips[7] = {60, 180, 240, 420, 240, 180, 60};
  const int phases[7] = {180, 0, 180, 0, 180, 0, 180};
  for (int i = 0; i < 7; ++i)
    seq.events.push_back(make_pulse(flips[i], Phase(Rational(phases[i])), ctx));
  return seq;
}

PulseSequence with_composite(const PulseSequence& element, CompositeKind kind,
                             const ExecutionContext& ctx, CompositeDelayPolicy policy) {
  if (kind == CompositeKind::none) return element;
  // expect the three-pulse R-element shape: pulse delay pulse delay pulse
  if (element.events.size() != 5 || !std::holds_alternative<PulseEvent>(element.events[0]) ||
      !std::holds_alternative<DelayEvent>(element.events[1]) ||
      !std::holds_alternative<PulseEvent>(element.events[2]) ||
      !std::holds_alternative<DelayEvent>(element.events[3]) ||
      !std::holds_alternative<PulseEvent>(element.events[4]))
    throw infeasible_error("composite substitution expects a three-pulse R-element");
  const PulseEvent& central = std::get<PulseEvent>(element.events[2]);
  if (central.flip_deg != Rational(180))
    throw infeasible_error("composite substitution replaces a central 180 only");
  if (!central.phase.acos_coeff.is_zero())
    throw infeasible_error("central pulse phase must be a plain angle");

  PulseSequence comp;
  std::string suffix;
  switch (kind) {
    case CompositeKind::bb1:
      comp = composite_bb1(180, ctx);
      suffix = "+BB1";
      break;
    case CompositeKind::asbo11:
      comp = composite_asbo11(ctx);
      suffix = "+ASBO-11";
      break;
    case CompositeKind::sp7:
      comp = composite_sp7(ctx);
      suffix = "+SP7";
      break;
    default:
      throw infeasible_error("unknown composite kind");
  }
  comp = phase_shift(comp, central.phase.base_deg);

  const Rational tau_old = std::get<DelayEvent>(element.events[1]).duration_ns;
  const Rational d90 = std::get<PulseEvent>(element.events[0]).duration_ns;
  const Rational d180 = central.duration_ns;
  const Rational d_comp = comp.total_duration_ns();
  Rational tau;
  if (policy == CompositeDelayPolicy::si_table) {
    tau = tau_old - (d_comp - d180);
  } else {
    const Rational tau_R = element.total_duration_ns();
    tau = (tau_R - d90 - d90 - d_comp) / Rational(2);
    if (ctx.mode == PulseMode::finite) tau = tau.floor_to_grid(ctx.time_grid_ns);
  }
  if (tau < Rational(0)) {
    Rational flip_sum(180);  // the two outer 90s
    for (const Event& e : comp.events) flip_sum += std::get<PulseEvent>(e).flip_deg;
    throw_infeasible_delay(element.total_duration_ns(), flip_sum);
  }

  PulseSequence out;
  out.label = element.label + suffix;
  out.events.push_back(element.events[0]);
  out.events.push_back(DelayEvent{tau});
  out.events.insert(out.events.end(), comp.events.begin(), comp.events.end());
  out.events.push_back(DelayEvent{tau});
  out.events.push_back(element.events[4]);
  return out;
}

// --- magnetization-to-singlet family -----------------------------------------

namespace {

int round_half_away(double x) {
  return static_cast<int>(x >= 0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

// 90_y 180_x 90_y composite refocusing pulse used inside echo trains,
// phase-cycled by the MLEV-4 step (0, 0, 180, 180)
std::vector<Event> echo_block(const Rational& tau1, int mlev_step,
                              const ExecutionContext& ctx) {
  const Rational add = (mlev_step % 4 < 2) ? Rational(0) : Rational(180);
  std::vector<Event> ev;
  ev.push_back(DelayEvent{tau1});
  ev.push_back(make_pulse(90, Phase(Rational(90) + add), ctx));
  ev.push_back(make_pulse(180, Phase(Rational(0) + add), ctx));
  ev.push_back(make_pulse(90, Phase(Rational(90) + add), ctx));
  ev.push_back(DelayEvent{tau1});
  return ev;
}

struct EchoTiming {
  Rational tau_e;
  Rational tau1;
};

EchoTiming echo_timing(const Rational& J_hz, const std::optional<Rational>& override_ns,
                       const ExecutionContext& ctx) {
  EchoTiming t;
  t.tau_e = override_ns ? *override_ns : Rational(1000000000) / (Rational(2) * J_hz);
  const Rational d_echo = pulse_duration_ns(90, ctx) * Rational(2) + pulse_duration_ns(180, ctx);
  t.tau1 = (t.tau_e - d_echo) / Rational(2);
  if (ctx.mode == PulseMode::finite) t.tau1 = t.tau1.floor_to_grid(ctx.time_grid_ns);
  if (t.tau1 < Rational(0))
    throw infeasible_error("echo composite does not fit into tau_e = 1/(2J)");
  return t;
}

} // namespace

int m2s_n1(double theta_ST) { return round_half_away(pi / (2.0 * theta_ST)); }
int m2s_n2(int n1) { return n1 / 2; }
int sod_m1(double theta_ST) { return round_half_away(pi / (3.0 * theta_ST)); }

PulseSequence build_m2s(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const M2SParams& params) {
  if (!(J_hz > Rational(0))) throw infeasible_error("J must be positive");
  if (!(theta_ST > 0.0) || theta_ST >= pi / 4)
    throw infeasible_error("theta_ST must lie in (0, pi/4)");
  const int n1 = params.n1 > 0 ? params.n1 : m2s_n1(theta_ST);
  const int n2 = params.n2 > 0 ? params.n2 : m2s_n2(n1);
  const EchoTiming et = echo_timing(J_hz, params.tau_e_ns, ctx);
  Rational tau2 = et.tau_e / Rational(2) - pulse_duration_ns(90, ctx);
  if (ctx.mode == PulseMode::finite) tau2 = tau2.floor_to_grid(ctx.time_grid_ns);
  if (tau2 < Rational(0)) throw infeasible_error("inter-train delay is negative");

  PulseSequence seq;
  seq.label = "M2S";
  seq.events.push_back(make_pulse(90, Phase(Rational(0)), ctx));
  for (int i = 0; i < n1; ++i) {
    auto block = echo_block(et.tau1, i, ctx);
    seq.events.insert(seq.events.end(), block.begin(), block.end());
  }
  seq.events.push_back(make_pulse(90, Phase(Rational(90)), ctx));
  seq.events.push_back(DelayEvent{tau2});
  for (int i = 0; i < n2; ++i) {
    auto block = echo_block(et.tau1, i, ctx);
    seq.events.insert(seq.events.end(), block.begin(), block.end());
  }
  return seq;
}

PulseSequence build_s2m(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const M2SParams& params) {
  PulseSequence seq = time_reverse(build_m2s(J_hz, theta_ST, ctx, params));
  seq.label = "S2M";
  return seq;
}

PulseSequence build_sod(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const SODParams& params) {
  if (!(theta_ST > 0.0) || theta_ST >= pi / 4)
    throw infeasible_error("theta_ST must lie in (0, pi/4)");
  const int m1 = params.m1 > 0 ? params.m1 : sod_m1(theta_ST);
  const int m2 = params.m2;
  if (m2 < 1) throw infeasible_error("SOD repetition count m2 must be >= 1");
  const EchoTiming et = echo_timing(J_hz, params.tau_e_ns, ctx);

  PulseSequence seq;
  seq.label = "SOD";
  for (int rep = 0; rep < m2; ++rep) {
    FilterMarker marker;
    marker.kind = FilterMarker::Kind::SOD;
    marker.m1 = m1;
    marker.m2 = m2;
    marker.echo_ns = et.tau_e;
    seq.events.push_back(marker);
    for (int i = 0; i < m1; ++i) {
      auto block = echo_block(et.tau1, i, ctx);
      seq.events.insert(seq.events.end(), block.begin(), block.end());
    }
  }
  return seq;
}

PulseSequence t00_filter_marker() {
  PulseSequence seq;
  seq.label = "T00 filter";
  seq.events.push_back(FilterMarker{FilterMarker::Kind::T00, 1, 1, Rational(0)});
  return seq;
}

// --- serialization -------------------------------------------------------------

namespace {

json duration_value(const Rational& ns) {
  if (ns.is_integer()) return json(ns.num());
  return json(ns.to_double());
}

} // namespace

std::string serialize_sequence(const PulseSequence& seq) {
  json root;
  root["label"] = seq.label;
  json events = json::array();
  for (const Event& e : seq.events) {
    json je;
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      je["kind"] = "pulse";
      je["flip_deg"] = p->flip_deg.is_integer() ? json(p->flip_deg.num())
                                                : json(p->flip_deg.to_double());
      je["phase_deg"] = p->phase.canonical_deg();
      je["duration_ns"] = duration_value(p->duration_ns);
    } else if (const auto* d = std::get_if<DelayEvent>(&e)) {
      je["kind"] = "delay";
      je["duration_ns"] = duration_value(d->duration_ns);
    } else {
      const auto& f = std::get<FilterMarker>(e);
      je["kind"] = "filter";
      je["filter"] = (f.kind == FilterMarker::Kind::T00) ? "T00" : "SOD";
      je["m1"] = f.m1;
      je["m2"] = f.m2;
      je["echo_ns"] = duration_value(f.echo_ns);
    }
    events.push_back(je);
  }
  root["events"] = events;
  return root.dump(2) + "\n";
}

namespace {

Rational rational_from_json(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  return Rational::from_decimal(v.get<double>());
}

} // namespace

PulseSequence deserialize_sequence(const std::string& json_text) {
  const json root = json::parse(json_text);
  PulseSequence seq;
  seq.label = root.value("label", "");
  for (const json& je : root.at("events")) {
    const std::string kind = je.at("kind").get<std::string>();
    if (kind == "pulse") {
      PulseEvent p;
      p.flip_deg = rational_from_json(je.at("flip_deg"));
      p.phase = Phase(Rational::from_decimal(je.at("phase_deg").get<double>()));
      p.duration_ns = rational_from_json(je.at("duration_ns"));
      p.mode = p.duration_ns.is_zero() ? PulseMode::delta : PulseMode::finite;
      seq.events.push_back(p);
    } else if (kind == "delay") {
      seq.events.push_back(DelayEvent{rational_from_json(je.at("duration_ns"))});
    } else if (kind == "filter") {
      FilterMarker f;
      f.kind = (je.at("filter").get<std::string>() == "T00") ? FilterMarker::Kind::T00
                                                             : FilterMarker::Kind::SOD;
      f.m1 = je.value("m1", 1);
      f.m2 = je.value("m2", 1);
      f.echo_ns = rational_from_json(je.value("echo_ns", json(0)));
      seq.events.push_back(f);
    } else {
      throw numeric_error("unknown event kind in sequence JSON: " + kind);
    }
  }
  return seq;
}

std::string describe(const PulseSequence& seq) {
  std::ostringstream os;
  bool first = true;
  char buf[96];
  for (const Event& e : seq.events) {
    if (!first) os << " ";
    first = false;
    if (const auto* p = std::get_if<PulseEvent>(&e)) {
      std::snprintf(buf, sizeof(buf), "%.2f_{%.2f}", p->flip_deg.to_double(),
                    p->phase.canonical_deg());
      os << buf;
    } else if (const auto* d = std::get_if<DelayEvent>(&e)) {
      std::snprintf(buf, sizeof(buf), "tau=%.2fus", d->duration_ns.to_double() * 1e-3);
      os << buf;
    } else {
      const auto& f = std::get<FilterMarker>(e);
      if (f.kind == FilterMarker::Kind::T00)
        os << "[T00]";
      else {
        std::snprintf(buf, sizeof(buf), "[SOD m1=%d m2=%d]", f.m1, f.m2);
        os << buf;
      }
    }
  }
  return os.str();
}

bool same_events(const PulseSequence& a, const PulseSequence& b, double tol_deg) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const Event& ea = a.events[i];
    const Event& eb = b.events[i];
    if (ea.index() != eb.index()) return false;
    if (const auto* pa = std::get_if<PulseEvent>(&ea)) {
      const auto& pb = std::get<PulseEvent>(eb);
      if (pa->flip_deg != pb.flip_deg || pa->mode != pb.mode ||
          pa->duration_ns != pb.duration_ns || !same_phase(pa->phase, pb.phase, tol_deg))
        return false;
    } else if (const auto* da = std::get_if<DelayEvent>(&ea)) {
      if (da->duration_ns != std::get<DelayEvent>(eb).duration_ns) return false;
    } else {
      const auto& fa = std::get<FilterMarker>(ea);
      const auto& fb = std::get<FilterMarker>(eb);
      if (fa.kind != fb.kind || fa.m1 != fb.m1 || fa.m2 != fb.m2 || fa.echo_ns != fb.echo_ns)
        return false;
    }
  }
  return true;
}

} // namespace rnnv
