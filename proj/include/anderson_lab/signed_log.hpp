#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace anderson_lab {

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530942;

/// x = phase * exp(log_mag). Zero is phase 0 with log_mag = -inf; a zero is
/// only ever produced by an exact zero, never by underflow.
template <class T>
struct SignedLog {
  T phase{0};
  double log_mag = kNegInf;

  static SignedLog zero() { return {}; }

  static SignedLog from_value(T x) {
    const double m = std::abs(x);
    if (m == 0.0) return zero();
    return {x / m, std::log(m)};
  }

  /// Combines a scaled mantissa with a binary exponent: x = mant * 2^exp2.
  static SignedLog from_scaled(T mant, double exp2) {
    const double m = std::abs(mant);
    if (m == 0.0) return zero();
    return {mant / m, std::log(m) + exp2 * kLn2};
  }

  [[nodiscard]] bool is_zero() const noexcept { return log_mag == kNegInf; }

  /// -1, 0 or +1; for complex values the sign of the real part of the phase.
  [[nodiscard]] int sign() const noexcept {
    if (is_zero()) return 0;
    return std::real(phase) >= 0.0 ? 1 : -1;
  }

  [[nodiscard]] T value() const { return is_zero() ? T{0} : phase * std::exp(log_mag); }

  friend SignedLog operator*(const SignedLog& a, const SignedLog& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return {a.phase * b.phase, a.log_mag + b.log_mag};
  }

  friend SignedLog operator/(const SignedLog& a, const SignedLog& b) {
    if (b.is_zero()) throw std::domain_error("SignedLog: division by zero");
    if (a.is_zero()) return zero();
    return {a.phase / b.phase, a.log_mag - b.log_mag};
  }

  friend SignedLog operator-(const SignedLog& a) { return {-a.phase, a.log_mag}; }
};

using LogDet = SignedLog<double>;

}  // namespace anderson_lab
