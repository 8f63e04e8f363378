#pragma once
// spin-system parameters and execution context shared by every module.

#include <cmath>
#include <stdexcept>

#include "rnnv/rational.hpp"

namespace rnnv {

inline constexpr double pi = 3.14159265358979323846;

struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PulseMode { delta, finite };

// two coupled spins-1/2: J coupling plus sum/difference chemical-shift
// frequencies (angular, rad/s).
struct SpinSystem {
  double J_hz = 0.0;
  double omega_sigma = 0.0;  // rad/s
  double omega_delta = 0.0;  // rad/s

  double omega_J() const { return 2.0 * pi * J_hz; }

  // singlet-triplet mixing angle of the near-equivalent pair
  double theta_ST() const { return std::atan(omega_delta / omega_J()); }

  // reference system used throughout the test corpus: J = 54.39 Hz,
  // delta frequency 7.50 Hz, vanishing sum frequency.
  static SpinSystem dand() {
    SpinSystem s;
    s.J_hz = 54.39;
    s.omega_sigma = 0.0;
    s.omega_delta = 2.0 * pi * 7.50;
    return s;
  }
};

struct ExecutionContext {
  PulseMode mode = PulseMode::delta;
  Rational omega_nut_hz = 12500;    // nominal rf nutation frequency nu_nut (Hz)
  double amplitude_scale = 1.0;     // omega_nut/omega_nut_nominal (also scales delta flips)
  double offset = 0.0;              // resonance offset (rad/s), added to omega_sigma/2 per spin
  Rational time_grid_ns = 100;      // timing grid for derived delays (ns)
  double delay_scale = 1.0;         // multiplies every delay duration at execution

  double omega_nut_nominal() const { return 2.0 * pi * omega_nut_hz.to_double(); }

  static ExecutionContext delta_ideal() {
    ExecutionContext c;
    c.mode = PulseMode::delta;
    return c;
  }
  static ExecutionContext finite_default() {
    ExecutionContext c;
    c.mode = PulseMode::finite;
    return c;
  }
};

} // namespace rnnv
