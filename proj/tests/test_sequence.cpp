#include <doctest.h>

#include <cmath>

#include "rnnv/sequence.hpp"
#include "test_helpers.hpp"

using namespace rnnv;

namespace {

const Rational J_ref(5439, 100);  // 54.39 Hz

std::vector<double> pulse_phases(const PulseSequence& seq) {
  std::vector<double> out;
  for (const Event& e : seq.events)
    if (const auto* p = std::get_if<PulseEvent>(&e)) out.push_back(p->phase.canonical_deg());
  return out;
}

std::vector<double> pulse_flips(const PulseSequence& seq) {
  std::vector<double> out;
  for (const Event& e : seq.events)
    if (const auto* p = std::get_if<PulseEvent>(&e)) out.push_back(p->flip_deg.to_double());
  return out;
}

std::vector<Rational> delay_list(const PulseSequence& seq) {
  std::vector<Rational> out;
  for (const Event& e : seq.events)
    if (const auto* d = std::get_if<DelayEvent>(&e)) out.push_back(d->duration_ns);
  return out;
}

void check_phases(const PulseSequence& seq, const std::vector<double>& want, double tol = 1e-9) {
  const auto got = pulse_phases(seq);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    double d = std::fmod(std::abs(got[i] - want[i]), 360.0);
    d = std::min(d, 360.0 - d);
    INFO("pulse ", i, ": got ", got[i], " want ", want[i]);
    CHECK(d <= tol);
  }
}

} // namespace

TEST_SUITE("sequence") {

TEST_CASE("rational arithmetic: exactness, rounding, decimal recovery") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(3, 4) * Rational(1000000000) / Rational(5439, 100) ==
        Rational(25000000000LL, 1813));
  CHECK(Rational::from_decimal(54.39) == Rational(5439, 100));
  CHECK(Rational::from_decimal(-45.0) == Rational(-45));
  CHECK(Rational(13789370, 1).round_to_grid(Rational(200000)) == Rational(13800000));
  CHECK(Rational(16087516, 1).round_to_grid(Rational(200000)) == Rational(16000000));
  CHECK(Rational(6893333, 1).floor_to_grid(Rational(100)) == Rational(6893300));
  CHECK(Rational(-50, 1).floor_to_grid(Rational(100)) == Rational(-100));
  CHECK_THROWS_AS(Rational(1, 0), numeric_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), numeric_error);
}

TEST_CASE("phase_shift adds to every pulse phase and leaves delays untouched") {
  PulseSequence s;
  s.events = {PulseEvent{90, Phase(Rational(0)), PulseMode::delta, 0}, DelayEvent{1000}};
  const PulseSequence t = phase_shift(s, 90);
  check_phases(t, {90.0});
  CHECK(std::get<DelayEvent>(t.events[1]).duration_ns == Rational(1000));
  // inverse
  CHECK(same_events(phase_shift(t, -90), s));
  CHECK(same_events(phase_shift(phase_shift(s, 45), -45), s));
}

TEST_CASE("conjugate negates phases and is an involution") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
  const PulseSequence c = conjugate(a);
  check_phases(c, {270.0, 0.0, 270.0});  // -90, 0, -90
  CHECK(same_events(conjugate(c), a));
}

TEST_CASE("conjugate-then-shift of element B matches the published -45 element") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence b = basic_element_B({4, 3, 1}, J_ref, ctx);
  // (R0'_B)_{-45} = 90_{-135} tau 180_{-225} tau 90_{-135}
  const PulseSequence shifted = phase_shift(conjugate(b), -45);
  check_phases(shifted, {225.0, 135.0, 225.0});
}

TEST_CASE("delta basic element: tau_R = (n/N)/J exactly and tau = tau_R/2") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
  const Rational tau_R = SymmetryNumbers{4, 3, 1}.tau_R_ns(J_ref);
  CHECK(tau_R == Rational(25000000000LL, 1813));
  CHECK(tau_R.to_double() == doctest::Approx(13.789e6).epsilon(1e-4));
  CHECK(a.total_duration_ns() == tau_R);
  const auto delays = delay_list(a);
  REQUIRE(delays.size() == 2);
  CHECK(delays[0] == tau_R / Rational(2));
  CHECK(delays[1] == tau_R / Rational(2));
  check_phases(a, {90.0, 0.0, 90.0});
  const PulseSequence b = basic_element_B({4, 3, 1}, J_ref, ctx);
  check_phases(b, {90.0, 180.0, 90.0});
}

TEST_CASE("finite basic element reproduces the published timing table values") {
  const ExecutionContext ctx = ExecutionContext::finite_default();
  SUBCASE("R4(3,1): tau_R 13800 us, tau 6860 us") {
    const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
    CHECK(a.total_duration_ns() == Rational(13800000));
    const auto delays = delay_list(a);
    CHECK(delays[0] == Rational(6860000));
    const auto* p = std::get_if<PulseEvent>(&a.events[0]);
    REQUIRE(p != nullptr);
    CHECK(p->duration_ns == Rational(20000));  // 20 us 90-degree pulse
  }
  SUBCASE("R8(7,3): tau_R 16000 us, tau 7960 us") {
    const PulseSequence a = basic_element_A({8, 7, 3}, J_ref, ctx);
    CHECK(a.total_duration_ns() == Rational(16000000));
    CHECK(delay_list(a)[0] == Rational(7960000));
  }
  SUBCASE("explicit tau_R override wins") {
    const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx, Rational(13400000));
    CHECK(a.total_duration_ns() == Rational(13400000));
    CHECK(delay_list(a)[0] == Rational(6660000));
  }
}

TEST_CASE("finite-mode pulse durations follow flip/(360 nu_nut)") {
  ExecutionContext ctx = ExecutionContext::finite_default();
  CHECK(pulse_duration_ns(90, ctx) == Rational(20000));
  CHECK(pulse_duration_ns(180, ctx) == Rational(40000));
  ctx.omega_nut_hz = Rational(25000);
  CHECK(pulse_duration_ns(90, ctx) == Rational(10000));
  CHECK(pulse_duration_ns(0, ctx) == Rational(0));
  CHECK_THROWS_AS(pulse_duration_ns(Rational(-90), ctx), infeasible_error);
}

TEST_CASE("infeasible timing requests are rejected with the minimum rf level") {
  const ExecutionContext ctx = ExecutionContext::finite_default();
  // J so large that the R-element pulses cannot fit
  CHECK_THROWS_AS(basic_element_A({4, 3, 1}, Rational(10000), ctx), infeasible_error);
  try {
    basic_element_A({4, 3, 1}, Rational(10000), ctx);
  } catch (const infeasible_error& e) {
    CHECK(std::string(e.what()).find("nutation frequency") != std::string::npos);
  }
  CHECK_THROWS_AS(basic_element_A({3, 3, 1}, J_ref, ctx), infeasible_error);
  CHECK_THROWS_AS(basic_element_A({4, 0, 1}, J_ref, ctx), infeasible_error);
}

TEST_CASE("standard construction: N/2 pairs, exact total duration n/J") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const SymmetryNumbers sym{4, 3, 1};
  const PulseSequence basic = basic_element_A(sym, J_ref, ctx);
  const PulseSequence train = build_standard(sym, basic, J_ref);
  CHECK(train.pulse_count() == 12);  // 4 R-elements, 3 pulses each
  CHECK(train.total_duration_ns() == Rational(3) * Rational(1000000000) / J_ref);
  // phases: (A)_{+45} = 135/45/135, (A')_{-45} = -135/-45/-135
  check_phases(train, {135, 45, 135, 225, 315, 225, 135, 45, 135, 225, 315, 225});
}

TEST_CASE("standard R8(7,3) uses +/-67.5 degree shifts") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const SymmetryNumbers sym{8, 7, 3};
  const PulseSequence train = build_standard(sym, basic_element_A(sym, J_ref, ctx), J_ref);
  CHECK(train.pulse_count() == 24);  // 8 R-elements
  const auto ph = pulse_phases(train);
  CHECK(ph[0] == doctest::Approx(157.5));  // 90 + 67.5
  CHECK(ph[1] == doctest::Approx(67.5));   // 0 + 67.5
  CHECK(ph[3] == doctest::Approx(202.5));  // -90 - 67.5
  CHECK(ph[4] == doctest::Approx(292.5));  // -0 - 67.5
}

TEST_CASE("riffled construction alternates A and conjugated B elements") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const SymmetryNumbers sym{8, 7, 3};
  const PulseSequence train = build_riffled(sym, basic_element_A(sym, J_ref, ctx),
                                            basic_element_B(sym, J_ref, ctx), J_ref);
  // published phase list: 90_{157.5} tau 180_{67.5} ... and the B' slots
  // carry 202.5 / 112.5 / 202.5
  const auto ph = pulse_phases(train);
  CHECK(ph[0] == doctest::Approx(157.5));
  CHECK(ph[1] == doctest::Approx(67.5));
  CHECK(ph[2] == doctest::Approx(157.5));
  CHECK(ph[3] == doctest::Approx(202.5));
  CHECK(ph[4] == doctest::Approx(112.5));
  CHECK(ph[5] == doctest::Approx(202.5));
}

TEST_CASE("riffled construction rejects mismatched element durations") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const SymmetryNumbers sym{4, 3, 1};
  const PulseSequence a = basic_element_A(sym, J_ref, ctx);
  const PulseSequence b = basic_element_B(sym, J_ref, ctx, Rational(10000000));
  CHECK_THROWS_AS(build_riffled(sym, a, b), infeasible_error);
  // duration consistency check against J
  CHECK_THROWS_AS(build_standard(sym, b, J_ref), infeasible_error);
}

TEST_CASE("PulsePol is the riffled R4(3,1) train shifted by -45 degrees") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence pp = pulsepol(J_ref, ctx);
  const SymmetryNumbers sym{4, 3, 1};
  const PulseSequence riffled = build_riffled(sym, basic_element_A(sym, J_ref, ctx),
                                              basic_element_B(sym, J_ref, ctx), J_ref);
  CHECK(same_events(pp, phase_shift(riffled, -45)));
  // cycle reads 90_90 tau 180_0 tau 90_90 | 90_180 tau 180_90 tau 90_180, twice
  check_phases(pp, {90, 0, 90, 180, 90, 180, 90, 0, 90, 180, 90, 180});
  CHECK(delay_list(pp)[0] == Rational(12500000000LL, 1813));  // (3/8)/J / 2... = tau_R/2
  CHECK(pp.total_duration_ns() == Rational(3) * Rational(1000000000) / J_ref);
}

TEST_CASE("corrected phase-shift equivariance of the riffled builder") {
  // the conjugated slot receives the negated input shift: riffling
  // shift(A, phi) with shift(B, -phi) equals the globally shifted train
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const SymmetryNumbers sym{4, 3, 1};
  const PulseSequence a = basic_element_A(sym, J_ref, ctx);
  const PulseSequence b = basic_element_B(sym, J_ref, ctx);
  const Rational phi(-45);
  const PulseSequence lhs = build_riffled(sym, phase_shift(a, phi), phase_shift(b, -phi));
  const PulseSequence rhs = phase_shift(build_riffled(sym, a, b), phi);
  CHECK(same_events(lhs, rhs));
}

TEST_CASE("builders are deterministic: identical inputs, identical bytes") {
  const ExecutionContext ctx = ExecutionContext::finite_default();
  const PulseSequence s1 = pulsepol(J_ref, ctx);
  const PulseSequence s2 = pulsepol(J_ref, ctx);
  CHECK(serialize_sequence(s1) == serialize_sequence(s2));
  const SymmetryNumbers sym{8, 7, 3};
  CHECK(serialize_sequence(build_riffled(sym, basic_element_A(sym, J_ref, ctx),
                                         basic_element_B(sym, J_ref, ctx))) ==
        serialize_sequence(build_riffled(sym, basic_element_A(sym, J_ref, ctx),
                                         basic_element_B(sym, J_ref, ctx))));
}

TEST_CASE("BB1 composite: Wimperis angles and event list") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  SUBCASE("90-degree BB1: 45_0 180_97.18 360_291.54 180_97.18 45_0") {
    const PulseSequence s = composite_bb1(90, ctx);
    CHECK(pulse_flips(s) == std::vector<double>{45, 180, 360, 180, 45});
    check_phases(s, {0.0, 97.18, 291.54, 97.18, 0.0}, 0.01);
    // theta_W(pi/2) = arccos(-1/8)
    CHECK(std::get<PulseEvent>(s.events[1]).phase.deg() ==
          doctest::Approx(std::acos(-0.125) * 180.0 / pi).epsilon(1e-12));
  }
  SUBCASE("180-degree BB1 uses arccos(-1/4) = 104.48") {
    const PulseSequence s = composite_bb1(180, ctx);
    CHECK(std::get<PulseEvent>(s.events[1]).phase.canonical_deg() ==
          doctest::Approx(104.4775).epsilon(1e-4));
  }
  CHECK_THROWS_AS(composite_bb1(Rational(0), ctx), infeasible_error);
}

TEST_CASE("ASBO-11 composite: published phase list and antisymmetry") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence s = composite_asbo11(ctx);
  REQUIRE(s.events.size() == 11);
  for (const Event& e : s.events) CHECK(std::get<PulseEvent>(e).flip_deg == Rational(180));
  // the 0.05-degree tolerance covers the two-decimal rendering of
  // arccos-derived angles in the reference listing
  check_phases(s, {98.81, 255.52, 172.24, 240.0, 67.76, 0.0, 292.24, 120.0, 187.76, 104.45,
                   261.19},
               0.05);
  // time reverse inverts all phases (mod 360)
  const auto ph = pulse_phases(s);
  for (int i = 0; i < 11; ++i) {
    const double want = std::fmod(360.0 - ph[10 - i], 360.0);
    double d = std::fmod(std::abs(ph[i] - want), 360.0);
    d = std::min(d, 360.0 - d);
    CHECK(d < 1e-9);
  }
}

TEST_CASE("SP7 composite: event list and duration at 12.5 kHz") {
  ExecutionContext ctx = ExecutionContext::finite_default();
  const PulseSequence s = composite_sp7(ctx);
  CHECK(pulse_flips(s) == std::vector<double>{60, 180, 240, 420, 240, 180, 60});
  check_phases(s, {180, 0, 180, 0, 180, 0, 180});
  // 1380 degrees at 12.5 kHz: 306.67 us
  CHECK(s.total_duration_ns() == Rational(920000, 3));
}

TEST_CASE("composite substitution reproduces the published per-variant delays") {
  const ExecutionContext ctx = ExecutionContext::finite_default();
  SUBCASE("R4(3,1)") {
    const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
    const PulseSequence asbo = with_composite(a, CompositeKind::asbo11, ctx);
    CHECK(delay_list(asbo)[0] == Rational(6460000));  // 6460 us
    CHECK(asbo.pulse_count() == 13);
    const PulseSequence sp7 = with_composite(a, CompositeKind::sp7, ctx);
    CHECK(delay_list(sp7)[0] == Rational(19780000000LL, 3000));  // 6593.33 us
    CHECK(delay_list(sp7)[0].to_double() * 1e-3 == doctest::Approx(6593.33).epsilon(1e-5));
  }
  SUBCASE("R8(7,3)") {
    const PulseSequence a = basic_element_A({8, 7, 3}, J_ref, ctx);
    CHECK(delay_list(with_composite(a, CompositeKind::asbo11, ctx))[0] == Rational(7560000));
    CHECK(delay_list(with_composite(a, CompositeKind::sp7, ctx))[0].to_double() * 1e-3 ==
          doctest::Approx(7693.33).epsilon(1e-5));
  }
  SUBCASE("preserve_taur policy keeps the element wall time") {
    const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
    const PulseSequence asbo =
        with_composite(a, CompositeKind::asbo11, ctx, CompositeDelayPolicy::preserve_taur);
    CHECK(delay_list(asbo)[0] == Rational(6660000));
    CHECK(asbo.total_duration_ns() == a.total_duration_ns());
  }
  SUBCASE("substituted phases follow the central pulse phase") {
    const PulseSequence b = basic_element_B({4, 3, 1}, J_ref, ctx);  // central 180_180
    const PulseSequence sp7 = with_composite(b, CompositeKind::sp7, ctx);
    const auto ph = pulse_phases(sp7);
    CHECK(ph[1] == doctest::Approx(0.0));    // 180 + 180
    CHECK(ph[2] == doctest::Approx(180.0));  // 0 + 180
  }
  SUBCASE("delta mode substitution leaves delays unchanged") {
    const ExecutionContext dctx = ExecutionContext::delta_ideal();
    const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, dctx);
    const PulseSequence asbo = with_composite(a, CompositeKind::asbo11, dctx);
    CHECK(delay_list(asbo)[0] == delay_list(a)[0]);
    CHECK(asbo.total_duration_ns() == a.total_duration_ns());
  }
}

TEST_CASE("M2S: repetition counts, timing, MLEV-4 supercycle") {
  const double theta = std::atan(7.50 / 54.39);  // 7.85 degrees
  CHECK(theta * 180.0 / pi == doctest::Approx(7.85).epsilon(1e-3));
  CHECK(m2s_n1(theta) == 11);
  CHECK(m2s_n2(11) == 5);
  CHECK(sod_m1(theta) == 8);

  ExecutionContext ctx = ExecutionContext::finite_default();
  SUBCASE("nominal tau_e = 1/(2J) = 9.193 ms") {
    const PulseSequence m2s = build_m2s(J_ref, theta, ctx);
    bool found = false;
    for (const Event& e : m2s.events)
      if (const auto* d = std::get_if<DelayEvent>(&e)) {
        // first delay is tau1 = (tau_e - 80 us)/2 floored to the 0.1 us grid
        CHECK(d->duration_ns == Rational(4556400));  // (9192865.6 - 80000)/2 -> grid
        found = true;
        break;
      }
    CHECK(found);
  }
  SUBCASE("published override tau_e = 9240 us gives tau1 4580, tau2 4600") {
    M2SParams params;
    params.tau_e_ns = Rational(9240000);
    const PulseSequence m2s = build_m2s(J_ref, theta, ctx, params);
    const auto delays = delay_list(m2s);
    // delays: n1 echo blocks contribute pairs of tau1, then tau2, then n2 blocks
    REQUIRE(delays.size() == 2 * 11 + 1 + 2 * 5);
    CHECK(delays[0] == Rational(4580000));
    CHECK(delays[1] == Rational(4580000));
    CHECK(delays[22] == Rational(4600000));  // tau2 after the 22 train delays
    CHECK(delays[23] == Rational(4580000));
    // pulses: 1 + 3*n1 + 1 + 3*n2 = 50
    CHECK(m2s.pulse_count() == 50);
    // MLEV-4: echoes 0,1 at (90,0,90); echoes 2,3 at (270,180,270)
    const auto ph = pulse_phases(m2s);
    CHECK(ph[0] == doctest::Approx(0.0));  // initial 90_x
    CHECK(ph[1] == doctest::Approx(90.0));
    CHECK(ph[2] == doctest::Approx(0.0));
    CHECK(ph[3] == doctest::Approx(90.0));
    CHECK(ph[7] == doctest::Approx(270.0));   // third echo, +180 supercycle
    CHECK(ph[8] == doctest::Approx(180.0));
    CHECK(ph[13] == doctest::Approx(90.0));   // fifth echo restarts the cycle
  }
  SUBCASE("S2M is the reversed event list") {
    M2SParams params;
    params.tau_e_ns = Rational(9240000);
    const PulseSequence m2s = build_m2s(J_ref, theta, ctx, params);
    PulseSequence rev = m2s;
    std::reverse(rev.events.begin(), rev.events.end());
    const PulseSequence s2m = build_s2m(J_ref, theta, ctx, params);
    CHECK(same_events(s2m, rev));
    CHECK(s2m.total_duration_ns() == m2s.total_duration_ns());
  }
  CHECK_THROWS_AS(build_m2s(J_ref, 0.9, ctx), infeasible_error);
  CHECK_THROWS_AS(build_m2s(Rational(-1), theta, ctx), infeasible_error);
}

TEST_CASE("SOD: filter markers plus J-synchronized echo trains") {
  const double theta = std::atan(7.50 / 54.39);
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const PulseSequence sod = build_sod(J_ref, theta, ctx);
  int markers = 0;
  for (const Event& e : sod.events)
    if (const auto* f = std::get_if<FilterMarker>(&e)) {
      ++markers;
      CHECK(f->kind == FilterMarker::Kind::SOD);
      CHECK(f->m1 == 8);
      CHECK(f->m2 == 7);
      CHECK(f->echo_ns == Rational(1000000000) / (Rational(2) * J_ref));
    }
  CHECK(markers == 7);
  CHECK(sod.pulse_count() == 7 * 8 * 3);
  // echo delay: tau_e/2 in delta mode
  CHECK(delay_list(sod)[0] == Rational(1000000000) / (Rational(4) * J_ref));
}

TEST_CASE("serialization: schema, determinism, round trip") {
  const ExecutionContext ctx = ExecutionContext::finite_default();
  const PulseSequence a = basic_element_A({4, 3, 1}, J_ref, ctx);
  const std::string text = serialize_sequence(a);
  CHECK(text.find("\"kind\": \"pulse\"") != std::string::npos);
  CHECK(text.find("\"kind\": \"delay\"") != std::string::npos);
  CHECK(text.find("\"flip_deg\": 90") != std::string::npos);
  CHECK(text.find("\"phase_deg\": 90.0") != std::string::npos);
  CHECK(text.find("\"duration_ns\": 6860000") != std::string::npos);
  const PulseSequence back = deserialize_sequence(text);
  REQUIRE(back.events.size() == a.events.size());
  CHECK(back.label == a.label);
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    if (const auto* p = std::get_if<PulseEvent>(&a.events[i])) {
      const auto& q = std::get<PulseEvent>(back.events[i]);
      CHECK(p->flip_deg == q.flip_deg);
      CHECK(same_phase(p->phase, q.phase, 1e-6));
      CHECK(std::abs(p->duration_ns.to_double() - q.duration_ns.to_double()) < 1.0);
    }
  }
  // filter markers survive the round trip
  const PulseSequence sod = build_sod(J_ref, std::atan(7.50 / 54.39), ctx);
  const PulseSequence sod_back = deserialize_sequence(serialize_sequence(sod));
  const auto* f = std::get_if<FilterMarker>(&sod_back.events[0]);
  REQUIRE(f != nullptr);
  CHECK(f->m1 == 8);
  CHECK(f->m2 == 7);
}

TEST_CASE("describe renders flips and phases at display precision") {
  const ExecutionContext ctx = ExecutionContext::delta_ideal();
  const std::string text = describe(composite_bb1(90, ctx));
  CHECK(text.find("45.00_{0.00}") != std::string::npos);
  CHECK(text.find("180.00_{97.18}") != std::string::npos);
  CHECK(text.find("360.00_{291.54}") != std::string::npos);
}

} // TEST_SUITE
