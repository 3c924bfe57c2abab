#pragma once

// Transfer matrices [[E - v, -1], [1, 0]], their overflow-safe products and the
// truncated determinants P_[a,b] = det(H_[a,b] - E).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson_lab/measures.hpp"
#include "anderson_lab/signed_log.hpp"

namespace anderson_lab {

using cplx = std::complex<double>;

/// A spectral parameter; imaginary part zero on real-energy paths.
struct Energy {
  cplx z;

  Energy(double e) : z(e, 0.0) {}  // NOLINT(google-explicit-constructor)
  explicit Energy(cplx value) : z(value) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::invalid_argument("Energy: not finite");
  }

  [[nodiscard]] bool is_real() const noexcept { return z.imag() == 0.0; }
  [[nodiscard]] double real() const noexcept { return z.real(); }
};

namespace detail {

template <class T>
inline T energy_as(const Energy& e) {
  if constexpr (is_complex_v<T>) {
    return e.z;
  } else {
    if (!e.is_real()) throw std::invalid_argument("real-scalar path called with complex energy");
    return e.z.real();
  }
}

template <class T>
T scale2(T x, int e) {
  if constexpr (is_complex_v<T>) {
    return {std::ldexp(x.real(), e), std::ldexp(x.imag(), e)};
  } else {
    return std::ldexp(x, e);
  }
}

inline double sq_abs(double x) { return x * x; }
inline double sq_abs(cplx x) { return std::norm(x); }

/// mantissa * 2^exponent with the mantissa kept in [0.5, 1).
struct LogAccumulator {
  double mant = 1.0;
  std::int64_t exponent = 0;

  void mul(double x) {
    int e = 0;
    mant = std::frexp(mant * x, &e);
    exponent += e;
  }
  [[nodiscard]] double log() const { return std::log(mant) + static_cast<double>(exponent) * kLn2; }
};

}  // namespace detail

/// 2x2 matrix stored as e^{log_scale} * entries (row major) with the largest
/// entry modulus in [0.5, 1). log_abs_det is tracked separately because long
/// products leave the normalized entries numerically rank one.
template <class T>
struct ScaledMatrix {
  std::array<T, 4> entries{T{1}, T{0}, T{0}, T{1}};
  double log_scale = 0.0;
  double log_abs_det = 0.0;

  static ScaledMatrix from_entries(T a, T b, T c, T d) {
    ScaledMatrix m;
    m.entries = {a, b, c, d};
    m.log_scale = 0.0;
    const double det = std::abs(a * d - b * c);
    m.log_abs_det = std::log(det);
    m.normalize();
    return m;
  }

  void normalize() {
    double big = 0.0;
    for (const T& x : entries) big = std::max(big, std::abs(x));
    if (big == 0.0) throw std::domain_error("ScaledMatrix: zero matrix");
    int e = 0;
    std::frexp(big, &e);
    for (T& x : entries) x = detail::scale2(x, -e);
    log_scale += static_cast<double>(e) * kLn2;
  }

  [[nodiscard]] T entry(int i, int j) const { return entries[static_cast<std::size_t>(2 * i + j)]; }

  [[nodiscard]] SignedLog<T> entry_log(int i, int j) const {
    auto s = SignedLog<T>::from_value(entry(i, j));
    if (!s.is_zero()) s.log_mag += log_scale;
    return s;
  }

  /// Entries without scaling; may overflow for long products.
  [[nodiscard]] std::array<T, 4> true_entries() const {
    const double f = std::exp(log_scale);
    return {entries[0] * f, entries[1] * f, entries[2] * f, entries[3] * f};
  }

  /// log of the operator 2-norm.
  [[nodiscard]] double log_norm() const {
    double fro = 0.0;
    for (const T& x : entries) fro += detail::sq_abs(x);
    const double d = std::abs(entries[0] * entries[3] - entries[1] * entries[2]);
    const double disc = std::max(0.0, (fro - 2.0 * d) * (fro + 2.0 * d));
    return 0.5 * std::log(0.5 * (fro + std::sqrt(disc))) + log_scale;
  }

  /// this * rhs.
  [[nodiscard]] ScaledMatrix multiply(const ScaledMatrix& rhs) const {
    const auto& a = entries;
    const auto& b = rhs.entries;
    ScaledMatrix m;
    m.entries = {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                 a[2] * b[1] + a[3] * b[3]};
    m.log_scale = log_scale + rhs.log_scale;
    m.log_abs_det = log_abs_det + rhs.log_abs_det;
    m.normalize();
    return m;
  }

  /// Inverse of a transfer product. Such products have det exactly 1, so the
  /// inverse is the adjugate [[d, -b], [-c, a]].
  [[nodiscard]] ScaledMatrix inverse() const {
    ScaledMatrix m;
    m.entries = {entries[3], -entries[1], -entries[2], entries[0]};
    m.log_scale = log_scale;
    m.log_abs_det = -log_abs_det;
    return m;
  }
};

template <class T>
inline ScaledMatrix<T> one_step(T energy, double v) {
  ScaledMatrix<T> m;
  m.entries = {energy - v, T{-1}, T{1}, T{0}};
  m.log_scale = 0.0;
  m.log_abs_det = 0.0;
  m.normalize();
  return m;
}

inline ScaledMatrix<cplx> one_step(const Energy& e, double v) { return one_step<cplx>(e.z, v); }

/// Left-multiplies a running product by one-step matrices, keeping it in QR
/// form M = Q R with Q unitary and R upper triangular, R = R11 [[1, rho], [0, ratio]].
template <class T>
class TransferAccumulator {
 public:
  explicit TransferAccumulator(T energy) : energy_(energy) {}

  /// M <- [[E - v, -1], [1, 0]] * M.
  void push(double v) {
    const T x = energy_ - v;
    // A = T * Q.
    const T a00 = x * q_[0] - q_[2], a01 = x * q_[1] - q_[3];
    const T a10 = q_[0], a11 = q_[1];
    const double r11 = std::sqrt(detail::sq_abs(a00) + detail::sq_abs(a10));
    const T u0 = a00 / r11, u1 = a10 / r11;
    const T w0 = -conj_(u1), w1 = conj_(u0);
    const T r12 = conj_(u0) * a01 + conj_(u1) * a11;
    const T r22 = conj_(w0) * a01 + conj_(w1) * a11;
    q_ = {u0, w0, u1, w1};
    const double abs22 = std::abs(r22);
    // rho' = rho + (r12 / r11) * (R22 / R11), with R before this step. The
    // ratio may underflow to zero, which is harmless here.
    rho_ += (r12 / r11) * ratio_;
    ratio_ *= r22 / r11;
    r11_.mul(r11);
    r22_.mul(abs22);
    r22_phase_ *= r22 / abs22;
    ++length_;
  }

  [[nodiscard]] double log_r11() const { return r11_.log(); }
  [[nodiscard]] double log_abs_r22() const { return r22_.log(); }
  [[nodiscard]] std::size_t length() const noexcept { return length_; }

  [[nodiscard]] ScaledMatrix<T> matrix() const {
    const double lr11 = r11_.log();
    const double lr22 = r22_.log();
    const T ratio = r22_phase_ * std::exp(lr22 - lr11);
    ScaledMatrix<T> m;
    m.entries = {q_[0], q_[0] * rho_ + q_[1] * ratio, q_[2], q_[2] * rho_ + q_[3] * ratio};
    m.log_scale = lr11;
    m.log_abs_det = lr11 + lr22;
    m.normalize();
    return m;
  }

 private:
  static T conj_(T x) {
    if constexpr (is_complex_v<T>) {
      return std::conj(x);
    } else {
      return x;
    }
  }

  T energy_;
  std::array<T, 4> q_{T{1}, T{0}, T{0}, T{1}};
  T rho_{0};
  T ratio_{1};
  T r22_phase_{1};
  detail::LogAccumulator r11_, r22_;
  std::size_t length_ = 0;
};

enum class ProductOrder { left_of_b_to_a };

/// S_[a,b] = T_b ... T_a over the whole window.
template <class T>
inline ScaledMatrix<T> product(T energy, const PotentialWindow& window, ProductOrder = ProductOrder::left_of_b_to_a) {
  if (window.empty()) throw std::invalid_argument("product: empty window");
  TransferAccumulator<T> acc(energy);
  for (double v : window.values) acc.push(v);
  return acc.matrix();
}

inline ScaledMatrix<cplx> product(const Energy& e, const PotentialWindow& window) { return product<cplx>(e.z, window); }

namespace detail {

/// P_k = (V_k - E) P_{k-1} - P_{k-2} over `values` in the given order,
/// returning P_empty = 1 followed by every prefix.
template <class T, class It>
std::vector<SignedLog<T>> det_prefixes(T energy, It first, It last) {
  std::vector<SignedLog<T>> out;
  out.reserve(static_cast<std::size_t>(std::distance(first, last)) + 1);
  out.push_back({T{1}, 0.0});
  // prev = P_{k-2}, cur = P_{k-1}, both times 2^{-exp2}.
  T prev{0}, cur{1};
  std::int64_t exp2 = 0;
  for (It it = first; it != last; ++it) {
    const T d = T(*it) - energy;
    const T t1 = d * cur;
    T next = t1 - prev;
    if constexpr (!is_complex_v<T>) {
      const double big = std::max(std::abs(t1), std::abs(prev));
      if (big > 0.0 && std::abs(next) <= 1e-13 * big) {
        // Compensated step: the product error of d * cur is recovered by fma,
        // and t1 - prev is exact under cancellation (Sterbenz).
        const double err = std::fma(d, cur, -t1);
        next = (t1 - prev) + err;
      }
    }
    prev = cur;
    cur = next;
    const double big = std::max(std::abs(prev), std::abs(cur));
    if (big != 0.0) {
      int e = 0;
      std::frexp(big, &e);
      if (e != 0) {
        prev = scale2(prev, -e);
        cur = scale2(cur, -e);
        exp2 += e;
      }
    }
    out.push_back(SignedLog<T>::from_scaled(cur, static_cast<double>(exp2)));
  }
  return out;
}

}  // namespace detail

/// Prefix determinants P_[a,a], ..., P_[a,b] of the window.
template <class T>
inline std::vector<SignedLog<T>> det_recurrence(T energy, const PotentialWindow& window) {
  if (window.empty()) throw std::invalid_argument("det_recurrence: empty window");
  auto all = detail::det_prefixes(energy, window.values.begin(), window.values.end());
  all.erase(all.begin());
  return all;
}

/// All interval determinants needed for Green's functions on [a,b]:
/// prefix[k] = P_[a, a+k-1] and suffix[k] = P_[a+k, b], k = 0..L, with the
/// empty interval equal to 1.
template <class T>
struct BoxDeterminants {
  std::vector<SignedLog<T>> prefix;
  std::vector<SignedLog<T>> suffix;
};

template <class T>
inline BoxDeterminants<T> box_determinants(T energy, const PotentialWindow& window) {
  BoxDeterminants<T> d;
  d.prefix = detail::det_prefixes(energy, window.values.begin(), window.values.end());
  auto rev = detail::det_prefixes(energy, window.values.rbegin(), window.values.rend());
  // rev[k] = P_[b-k+1, b]; suffix[k] = P_[a+k, b] = rev[L-k].
  d.suffix.assign(rev.rbegin(), rev.rend());
  return d;
}

/// <u, S v> in signed-log form; u and v must be unit vectors.
template <class T>
inline SignedLog<T> matrix_element(const std::array<T, 2>& u, const ScaledMatrix<T>& s, const std::array<T, 2>& v) {
  for (const auto* w : {&u, &v}) {
    const double n2 = detail::sq_abs((*w)[0]) + detail::sq_abs((*w)[1]);
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw std::invalid_argument("matrix_element: vectors must have unit norm");
  }
  auto cj = [](T x) {
    if constexpr (is_complex_v<T>) {
      return std::conj(x);
    } else {
      return x;
    }
  };
  const T sv0 = s.entries[0] * v[0] + s.entries[1] * v[1];
  const T sv1 = s.entries[2] * v[0] + s.entries[3] * v[1];
  auto r = SignedLog<T>::from_value(cj(u[0]) * sv0 + cj(u[1]) * sv1);
  if (!r.is_zero()) r.log_mag += s.log_scale;
  return r;
}

struct BlockIdentityReport {
  double max_discrepancy = 0.0;  // max |dlog| / max(1, |log|P||) over the four entries
  int sign_mismatches = 0;
};

/// Compares T_b ... T_a with (-1)^L [[P_ab, P_{a+1,b}], [-P_{a,b-1}, -P_{a+1,b-1}]].
template <class T>
inline BlockIdentityReport block_identity_check(T energy, const PotentialWindow& window) {
  if (window.size() < 2) throw std::invalid_argument("block_identity_check: window length must be >= 2");
  const auto s = product(energy, window);
  const auto from_a = detail::det_prefixes(energy, window.values.begin(), window.values.end());
  const auto from_a1 = detail::det_prefixes(energy, window.values.begin() + 1, window.values.end());
  const std::size_t len = window.size();
  const double parity = (len % 2 == 0) ? 1.0 : -1.0;
  const std::array<SignedLog<T>, 4> expected = {from_a[len], from_a1[len - 1], -from_a[len - 1], -from_a1[len - 2]};
  BlockIdentityReport rep;
  for (int k = 0; k < 4; ++k) {
    const auto got = s.entry_log(k / 2, k % 2);
    auto want = expected[static_cast<std::size_t>(k)];
    want.phase *= parity;
    if (got.is_zero() != want.is_zero()) {
      rep.max_discrepancy = std::numeric_limits<double>::infinity();
      continue;
    }
    if (got.is_zero()) continue;
    const double rel = std::abs(got.log_mag - want.log_mag) / std::max(1.0, std::abs(want.log_mag));
    rep.max_discrepancy = std::max(rep.max_discrepancy, rel);
    if (std::abs(got.phase - want.phase) > 1e-6) ++rep.sign_mismatches;
  }
  return rep;
}

}  // namespace anderson_lab
