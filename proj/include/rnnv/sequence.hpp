#pragma once
// pulse-sequence intermediate representation and compiler: basic R-elements,
// phase shifting, conjugation, standard/riffled RNnv construction, PulsePol,
// composite pulses, M2S/S2M, SOD and filter markers.
//
// timing is exact: durations are rational nanoseconds, phases are rational
// degrees plus an optional exact arccos term (composite-pulse angles such as
// arccos(-1/4) are stored symbolically and rendered at display time).

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rnnv/context.hpp"

namespace rnnv {

// phase in degrees: base + acos_coeff * arccos(acos_arg) (arccos in degrees)
struct Phase {
  Rational base_deg{0};
  Rational acos_coeff{0};
  double acos_arg = 0.0;

  Phase() = default;
  Phase(Rational base) : base_deg(base) {}
  Phase(Rational base, Rational coeff, double arg)
      : base_deg(base), acos_coeff(coeff), acos_arg(arg) {}

  double deg() const;            // full-precision value in degrees
  double rad() const;
  double canonical_deg() const;  // reduced into [0, 360)

  Phase shifted(const Rational& delta_deg) const;
  Phase negated() const;
};

bool same_phase(const Phase& a, const Phase& b, double tol_deg = 1e-9);

struct PulseEvent {
  Rational flip_deg{0};
  Phase phase;
  PulseMode mode = PulseMode::delta;
  Rational duration_ns{0};  // 0 for delta; flip/(360 nu_nut) seconds otherwise
};

struct DelayEvent {
  Rational duration_ns{0};
};

struct FilterMarker {
  enum class Kind { T00, SOD };
  Kind kind = Kind::T00;
  int m1 = 1;               // SOD: echoes per filter block
  int m2 = 1;               // SOD: filter-block repetitions
  Rational echo_ns{0};      // SOD: echo duration tau_e
};

using Event = std::variant<PulseEvent, DelayEvent, FilterMarker>;

struct PulseSequence {
  std::vector<Event> events;
  std::string label;

  Rational total_duration_ns() const;
  std::size_t pulse_count() const;
};

struct SymmetryNumbers {
  int N = 0;  // must be even and positive
  int n = 0;  // positive
  int nu = 0;

  void validate() const;  // throws infeasible_error on violation
  // nominal element duration tau_R = (n/N)/J in exact ns
  Rational tau_R_ns(const Rational& J_hz) const;
  // construction phase shift +pi nu / N, in exact degrees
  Rational shift_deg() const { return Rational(180) * Rational(nu, N); }
  std::string name() const;  // e.g. "R4(3,1)"
};

// --- elementary transformations --------------------------------------------

PulseSequence phase_shift(const PulseSequence& seq, const Rational& phi_deg);
PulseSequence phase_shift_rad(const PulseSequence& seq, double phi_rad);
PulseSequence conjugate(const PulseSequence& seq);
PulseSequence time_reverse(const PulseSequence& seq);
PulseSequence concatenate(const std::vector<PulseSequence>& parts,
                          const std::string& label);

// --- R-element and train construction --------------------------------------

enum class ElementKind { A, B };
enum class Construction { standard, riffled };

// duration of a rectangular pulse with the given flip angle under ctx
Rational pulse_duration_ns(const Rational& flip_deg, const ExecutionContext& ctx);

// 90_90 tau 180_0 tau 90_90 (A) or 90_90 tau 180_180 tau 90_90 (B);
// finite mode rounds tau_R to the 200 us service grid and floors the
// delays to ctx.time_grid_ns (see README: timing rules).
PulseSequence basic_element(const SymmetryNumbers& sym, const Rational& J_hz,
                            const ExecutionContext& ctx, ElementKind kind,
                            std::optional<Rational> tau_R_override_ns = std::nullopt);
PulseSequence basic_element_A(const SymmetryNumbers& sym, const Rational& J_hz,
                              const ExecutionContext& ctx,
                              std::optional<Rational> tau_R_override_ns = std::nullopt);
PulseSequence basic_element_B(const SymmetryNumbers& sym, const Rational& J_hz,
                              const ExecutionContext& ctx,
                              std::optional<Rational> tau_R_override_ns = std::nullopt);

// {R0_{+pi nu/N} R0'_{-pi nu/N}}^{N/2}; when J is given the element duration
// is checked against the exact nominal tau_R (delta-mode check)
PulseSequence build_standard(const SymmetryNumbers& sym, const PulseSequence& basic,
                             std::optional<Rational> J_hz = std::nullopt);

// {(R0_A)_{+pi nu/N} (R0'_B)_{-pi nu/N}}^{N/2}
PulseSequence build_riffled(const SymmetryNumbers& sym, const PulseSequence& basicA,
                            const PulseSequence& basicB,
                            std::optional<Rational> J_hz = std::nullopt);

// first `count` elements of the (optionally globally shifted) train;
// element k is the +shift A-slot for even k and the -shift conjugate slot
// for odd k, continuing the two-element period beyond one cycle
PulseSequence build_train(const SymmetryNumbers& sym, const PulseSequence& basicA,
                          const PulseSequence& basicB, int count,
                          const Rational& extra_shift_deg = Rational(0));

// riffled R4(3,1) shifted by -45 degrees (two-cycle event list)
PulseSequence pulsepol(const Rational& J_hz, const ExecutionContext& ctx);

// --- composite pulses -------------------------------------------------------

enum class CompositeKind { none, bb1, asbo11, sp7 };

// BB1: (b/2)_0 180_W 360_3W 180_W (b/2)_0, W = arccos(-flip_deg/720)
PulseSequence composite_bb1(const Rational& flip_deg, const ExecutionContext& ctx);
// ASBO-11: eleven 180s, antisymmetric phase list built from arccos(-1/4)
PulseSequence composite_asbo11(const ExecutionContext& ctx);
// SP7: 60_180 180_0 240_180 420_0 240_180 180_0 60_180
PulseSequence composite_sp7(const ExecutionContext& ctx);

// delay recomputation policy when a composite replaces the central 180
enum class CompositeDelayPolicy {
  si_table,        // tau -> tau - (d_composite - d_180): reproduces the
                   // published per-variant tau values
  preserve_taur,   // tau -> (tau_R - 2 d_90 - d_composite)/2: keeps the
                   // element wall-time equal to tau_R (exact J-synchrony)
};

// replace the central 180_phi of a three-pulse R-element by the composite
// phase-shifted to phi
PulseSequence with_composite(const PulseSequence& element, CompositeKind kind,
                             const ExecutionContext& ctx,
                             CompositeDelayPolicy policy = CompositeDelayPolicy::si_table);

// --- magnetization-to-singlet family ---------------------------------------

struct M2SParams {
  int n1 = 0;                       // 0 = derive from theta_ST
  int n2 = 0;                       // 0 = n1 / 2
  std::optional<Rational> tau_e_ns; // override for the echo duration
};

PulseSequence build_m2s(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const M2SParams& params = {});
PulseSequence build_s2m(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const M2SParams& params = {});

struct SODParams {
  int m1 = 0;                       // 0 = round(pi/(3 theta_ST))
  int m2 = 7;
  std::optional<Rational> tau_e_ns;
};

PulseSequence build_sod(const Rational& J_hz, double theta_ST,
                        const ExecutionContext& ctx, const SODParams& params = {});

// T00 spin-order filter as a standalone marker sequence
PulseSequence t00_filter_marker();

// SI-quoted repetition-count helpers (round half away from zero)
int m2s_n1(double theta_ST);
int m2s_n2(int n1);
int sod_m1(double theta_ST);

// --- serialization ----------------------------------------------------------

// JSON: {"label": ..., "events": [{kind, flip_deg, phase_deg, duration_ns}...]}
std::string serialize_sequence(const PulseSequence& seq);
PulseSequence deserialize_sequence(const std::string& json_text);

// single-line event rendering at 0.01 degree / 0.01 us display precision
std::string describe(const PulseSequence& seq);

bool same_events(const PulseSequence& a, const PulseSequence& b, double tol_deg = 1e-9);

} // namespace rnnv
