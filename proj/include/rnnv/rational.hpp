#pragma once
// exact rational arithmetic for sequence timing and phase bookkeeping.
// durations are carried as rational numbers of nanoseconds so that
// constructions like tau = (n/N)/(2J) stay exact for decimal J values.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <cmath>
#include <cstdlib>

namespace rnnv {

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Rational {
public:
  Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) {
    if (d == 0) throw numeric_error("rational with zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  // recover a decimal constant (e.g. "54.39" parsed into a double) as an
  // exact rational with the smallest power-of-ten denominator that
  // round-trips. falls back to 9 digits for non-decimal inputs.
  static Rational from_decimal(double x, int max_digits = 9) {
    if (!std::isfinite(x)) throw numeric_error("non-finite value for rational");
    long long p = 1;
    for (int k = 0; k <= max_digits; ++k) {
      double scaled = x * static_cast<double>(p);
      if (std::abs(scaled) < 9.0e18) {
        long long r = std::llround(scaled);
        double back = static_cast<double>(r) / static_cast<double>(p);
        if (std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)))
          return Rational(r, p);
      }
      p *= 10;
    }
    throw numeric_error("value not representable as a short decimal rational");
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const { return make_raw(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return from_i128(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw numeric_error("rational division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // largest multiple of grid that is <= *this (grid > 0)
  Rational floor_to_grid(const Rational& grid) const {
    if (grid.num_ <= 0) throw numeric_error("grid must be positive");
    __int128 q = i128(num_) * grid.den_;
    __int128 d = i128(den_) * grid.num_;
    __int128 k = q / d;
    if ((q % d) != 0 && ((q < 0) != (d < 0))) k -= 1;  // floor for negatives
    return from_i128(i128(grid.num_) * k, grid.den_);
  }

  // nearest multiple of grid, ties to even multiple
  Rational round_to_grid(const Rational& grid) const {
    Rational lo = floor_to_grid(grid);
    Rational hi = lo + grid;
    Rational dlo = *this - lo, dhi = hi - *this;
    if (dlo < dhi) return lo;
    if (dhi < dlo) return hi;
    __int128 klo = (i128(lo.num_) * grid.den_) / (i128(lo.den_) * grid.num_);
    return (klo % 2 == 0) ? lo : hi;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  long long num_{0};
  long long den_{1};

  static __int128 i128(long long v) { return static_cast<__int128>(v); }

  static Rational from_i128(__int128 n, __int128 d) {
    if (d == 0) throw numeric_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr __int128 lim = 0x7fffffffffffffffLL;
    if (n > lim || n < -lim || d > lim)
      throw numeric_error("rational overflow");
    return make_raw(static_cast<long long>(n), static_cast<long long>(d));
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  static Rational make_raw(long long n, long long d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
  }

  void normalize() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (den_ == 0) den_ = 1;
  }
};

} // namespace rnnv
