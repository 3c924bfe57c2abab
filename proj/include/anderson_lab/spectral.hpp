#pragma once

// Finite boxes H_[a,b]: Sturm bisection, inverse iteration, Green's functions
// and the quantities derived from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson_lab/measures.hpp"
#include "anderson_lab/rng.hpp"
#include "anderson_lab/stats.hpp"
#include "anderson_lab/transfer.hpp"

namespace anderson_lab {

class ResonantEnergy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Restriction of H to [lo, hi]: diagonal = potential, off-diagonals 1.
struct TridiagonalBox {
  PotentialWindow window;

  explicit TridiagonalBox(PotentialWindow w) : window(std::move(w)) {
    if (window.empty()) throw std::invalid_argument("TridiagonalBox: empty window");
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return window.size(); }
  [[nodiscard]] std::int64_t lo() const noexcept { return window.lo; }
  [[nodiscard]] std::int64_t hi() const noexcept { return window.hi; }
  [[nodiscard]] double scale() const { return 2.0 + window.max_abs(); }
  [[nodiscard]] double min_potential() const { return *std::min_element(window.values.begin(), window.values.end()); }
  [[nodiscard]] double max_potential() const { return *std::max_element(window.values.begin(), window.values.end()); }
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

/// Number of eigenvalues strictly below x (negative pivots of LDL^T of H - x).
inline std::size_t sturm_count(const TridiagonalBox& box, double x) {
  constexpr double pivmin = std::numeric_limits<double>::min() * 4.0;
  std::size_t count = 0;
  double d = 1.0;
  bool first = true;
  for (double v : box.window.values) {
    d = first ? v - x : (v - x) - 1.0 / d;
    first = false;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

namespace detail {

/// k-th smallest eigenvalue (0-based) bracketed in [lo, hi] to width `tol`.
/// A zero tolerance bisects until the midpoint is no longer representable.
inline double bisect_eigenvalue(const TridiagonalBox& box, std::size_t k, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(box, mid) <= k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::pair<double, double> gershgorin(const TridiagonalBox& box) {
  const double pad = 1e-12 * box.scale();
  return {box.min_potential() - 2.0 - pad, box.max_potential() + 2.0 + pad};
}

/// Pivoted LU of a tridiagonal matrix (row interchanges as in LAPACK dgttrf).
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<char> swapped;
  bool singular = false;

  TridiagonalLU(const std::vector<double>& diag, double shift) {
    const std::size_t n = diag.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    dl.assign(n > 0 ? n - 1 : 0, 1.0);
    du.assign(n > 0 ? n - 1 : 0, 1.0);
    du2.assign(n > 1 ? n - 2 : 0, 0.0);
    swapped.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) {
          singular = true;
          return;
        }
        const double f = dl[i] / d[i];
        dl[i] = f;
        d[i + 1] -= f * du[i];
      } else {
        const double f = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = f;
        const double tmp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = tmp - f * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -f * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && d[n - 1] == 0.0) singular = true;
  }

  /// Solves in place.
  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      if (ii + 1 < n) s -= du[ii] * b[ii + 1];
      if (ii + 2 < n) s -= du2[ii] * b[ii + 2];
      b[ii] = s / d[ii];
    }
  }
};

inline std::vector<double> apply_box(const TridiagonalBox& box, const std::vector<double>& x) {
  const auto& v = box.window.values;
  const std::size_t n = v.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[i] * x[i];
    if (i > 0) s += x[i - 1];
    if (i + 1 < n) s += x[i + 1];
    y[i] = s;
  }
  return y;
}

inline double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Inverse iteration at a (refined) eigenvalue, projecting out `cluster`.
inline EigenPair inverse_iteration(const TridiagonalBox& box, double lambda,
                                   const std::vector<const std::vector<double>*>& cluster) {
  const std::size_t n = box.dimension();
  const double scale = box.scale();
  EigenPair out;
  if (n == 1) {
    out.value = box.window.values[0];
    out.vector = {1.0};
    return out;
  }
  double shift = lambda;
  std::optional<TridiagonalLU> lu;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    lu.emplace(box.window.values, shift);
    if (!lu->singular) break;
    if (attempt == 5) throw std::runtime_error("eigenvector: shift remains exactly singular after 5 perturbations");
    shift += 1e-12 * scale;
  }
  // Deterministic, generic start vector (no RNG draws).
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.5 + static_cast<double>(splitmix64(i) >> 11) * 0x1.0p-53;
  auto project = [&](std::vector<double>& y) {
    for (const auto* q : cluster) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += (*q)[i] * y[i];
      for (std::size_t i = 0; i < n; ++i) y[i] -= dot * (*q)[i];
    }
  };
  project(x);
  double nx = norm2(x);
  for (double& v : x) v /= nx;
  for (int it = 0; it < 8; ++it) {
    lu->solve(x);
    project(x);
    nx = norm2(x);
    if (!(nx > 0.0) || !std::isfinite(nx)) throw std::runtime_error("eigenvector: inverse iteration broke down");
    for (double& v : x) v /= nx;
    const auto hx = apply_box(box, x);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += x[i] * hx[i];
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += (hx[i] - rq * x[i]) * (hx[i] - rq * x[i]);
    out.value = rq;
    out.residual = std::sqrt(r);
    if (it >= 1 && out.residual <= 1e-12 * scale) break;
  }
  std::size_t imax = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
  if (x[imax] < 0.0)
    for (double& v : x) v = -v;
  out.vector = std::move(x);
  return out;
}

}  // namespace detail

/// All eigenvalues in ascending order, each bracketed to 1e-10 * scale.
inline std::vector<double> eigenvalues(const TridiagonalBox& box) {
  const auto [lo, hi] = detail::gershgorin(box);
  const double tol = 1e-10 * box.scale();
  std::vector<double> out(box.dimension());
  double floor = lo;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = detail::bisect_eigenvalue(box, k, std::max(lo, floor - tol), hi, tol);
    floor = out[k];
  }
  return out;
}

/// Eigenvalues in [e_lo, e_hi] with their global indices.
inline std::vector<std::pair<std::size_t, double>> eigenvalues_in(const TridiagonalBox& box, double e_lo, double e_hi) {
  const auto [lo, hi] = detail::gershgorin(box);
  const double tol = 1e-10 * box.scale();
  const std::size_t first = sturm_count(box, e_lo);
  const std::size_t last = sturm_count(box, std::nextafter(e_hi, std::numeric_limits<double>::infinity()));
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t k = first; k < last; ++k) out.emplace_back(k, detail::bisect_eigenvalue(box, k, lo, hi, tol));
  return out;
}

/// Eigenpairs with indices [first, last), refined to full precision and
/// reorthogonalized within clusters closer than 1e-9 * scale.
inline std::vector<EigenPair> eigenpairs(const TridiagonalBox& box, std::size_t first, std::size_t last) {
  const auto [lo, hi] = detail::gershgorin(box);
  const double gap_tol = 1e-9 * box.scale();
  std::vector<EigenPair> out;
  std::vector<double> refined;
  for (std::size_t k = first; k < last; ++k) {
    const double lambda = detail::bisect_eigenvalue(box, k, lo, hi, 0.0);
    std::vector<const std::vector<double>*> cluster;
    for (std::size_t j = refined.size(); j-- > 0;) {
      if (lambda - refined[j] >= gap_tol) break;
      cluster.push_back(&out[j].vector);
    }
    out.push_back(detail::inverse_iteration(box, lambda, cluster));
    refined.push_back(lambda);
  }
  return out;
}

inline std::vector<EigenPair> eigenpairs(const TridiagonalBox& box) { return eigenpairs(box, 0, box.dimension()); }

/// Eigenpair for an approximate eigenvalue (within 1e-6 of a true one).
inline EigenPair eigenvector(const TridiagonalBox& box, double lambda) {
  const auto [lo, hi] = detail::gershgorin(box);
  const std::size_t below = sturm_count(box, lambda);
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  double best_value = lambda;
  for (std::size_t k : {below == 0 ? std::size_t{0} : below - 1, below}) {
    if (k >= box.dimension()) continue;
    const double v = detail::bisect_eigenvalue(box, k, lo, hi, 0.0);
    if (std::abs(v - lambda) < best_dist) {
      best = k;
      best_dist = std::abs(v - lambda);
      best_value = v;
    }
  }
  if (!best || best_dist > 1e-6) throw std::invalid_argument("eigenvector: lambda is not within 1e-6 of an eigenvalue");
  return detail::inverse_iteration(box, best_value, {});
}

// ---------------------------------------------------------------------------
// Green's functions
// ---------------------------------------------------------------------------

enum class GreenMethod { det_ratio, direct_solve };

/// Box determinants at one energy with the resonance decision made once.
class BoxResolvent {
 public:
  BoxResolvent(const TridiagonalBox& box, double energy)
      : lo_(box.lo()), energy_(energy), dets_(box_determinants(energy, box.window)) {
    const std::size_t n = box.dimension();
    const auto& full = dets_.prefix[n];
    // max_k |G(k,k)| >= 1 / (n * dist(E, spectrum)) and <= 1 / dist.
    double worst = kNegInf;
    if (!full.is_zero()) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto& l = dets_.prefix[k];
        const auto& r = dets_.suffix[k + 1];
        if (l.is_zero() || r.is_zero()) continue;
        worst = std::max(worst, l.log_mag + r.log_mag - full.log_mag);
      }
    }
    log_max_diagonal_ = worst;
    resonant_ = full.is_zero() || worst > -std::log(1e-12 * box.scale());
  }

  [[nodiscard]] bool resonant() const noexcept { return resonant_; }
  /// log max_k |G(k,k)|, an inverse-distance-to-spectrum proxy.
  [[nodiscard]] double log_max_diagonal() const noexcept { return log_max_diagonal_; }
  [[nodiscard]] const BoxDeterminants<double>& determinants() const noexcept { return dets_; }

  /// G(x, y) = (-1)^{x+y} P_[a,x-1] P_[y+1,b] / P_[a,b] for x <= y.
  [[nodiscard]] LogDet green(std::int64_t x, std::int64_t y) const {
    if (resonant_) throw ResonantEnergy("resonant energy: E = " + std::to_string(energy_) + " is too close to the box spectrum");
    if (x > y) std::swap(x, y);
    const auto n = static_cast<std::int64_t>(dets_.prefix.size()) - 1;
    if (x < lo_ || y >= lo_ + n) throw std::out_of_range("green: site outside box");
    const auto left = dets_.prefix[static_cast<std::size_t>(x - lo_)];
    const auto right = dets_.suffix[static_cast<std::size_t>(y + 1 - lo_)];
    auto g = left * right / dets_.prefix.back();
    if ((x + y) % 2 != 0) g = -g;
    return g;
  }

 private:
  std::int64_t lo_;
  double energy_;
  BoxDeterminants<double> dets_;
  double log_max_diagonal_ = kNegInf;
  bool resonant_ = false;
};

inline LogDet green(const TridiagonalBox& box, double energy, std::int64_t x, std::int64_t y,
                    GreenMethod method = GreenMethod::det_ratio) {
  if (method == GreenMethod::det_ratio) return BoxResolvent(box, energy).green(x, y);
  if (x < box.lo() || x > box.hi() || y < box.lo() || y > box.hi()) throw std::out_of_range("green: site outside box");
  if (BoxResolvent(box, energy).resonant())
    throw ResonantEnergy("resonant energy: E = " + std::to_string(energy) + " is too close to the box spectrum");
  detail::TridiagonalLU lu(box.window.values, energy);
  if (lu.singular) throw ResonantEnergy("resonant energy: singular box matrix");
  std::vector<double> rhs(box.dimension(), 0.0);
  rhs[static_cast<std::size_t>(y - box.lo())] = 1.0;
  lu.solve(rhs);
  return LogDet::from_value(rhs[static_cast<std::size_t>(x - box.lo())]);
}

enum class Regularity { regular, singular };

inline std::string_view regularity_name(Regularity r) { return r == Regularity::regular ? "regular" : "singular"; }

struct RegularityReport {
  std::int64_t site = 0;
  std::int64_t radius = 0;
  double rate = 0.0;
  double energy = 0.0;
  LogDet green_left;
  LogDet green_right;
  Regularity verdict = Regularity::singular;
};

/// x is regular iff both |G_[x-n,x+n](x, x -+ n)| <= e^{-C n}.
inline RegularityReport classify_regularity(const PotentialWindow& omega, std::int64_t x, std::int64_t n, double rate,
                                            double energy) {
  if (n < 1) throw std::invalid_argument("classify_regularity: radius must be >= 1");
  const TridiagonalBox box(omega.slice(x - n, x + n));
  const BoxResolvent res(box, energy);
  RegularityReport r{x, n, rate, energy, res.green(x, x - n), res.green(x, x + n), Regularity::singular};
  const double bound = -rate * static_cast<double>(n);
  r.verdict = (r.green_left.log_mag <= bound && r.green_right.log_mag <= bound) ? Regularity::regular : Regularity::singular;
  return r;
}

/// -G(x,a) psi(a-1) - G(x,b) psi(b+1).
inline double reconstruct_interior(const TridiagonalBox& box, double energy, double psi_left_outside,
                                   double psi_right_outside, std::int64_t x) {
  const BoxResolvent res(box, energy);
  return -res.green(x, box.lo()).value() * psi_left_outside - res.green(x, box.hi()).value() * psi_right_outside;
}

// ---------------------------------------------------------------------------
// Eigenfunction correlator
// ---------------------------------------------------------------------------

struct Correlator {
  std::size_t dimension = 0;
  std::vector<double> q;   // row major, Q(x,y) = sum_j |psi_j(x)| |psi_j(y)|
  double decay_rate = 0.0; // -slope of log mean_x Q(x, x+d) against d

  [[nodiscard]] double at(std::size_t x, std::size_t y) const { return q[x * dimension + y]; }
};

inline double correlator_decay_rate(const std::vector<double>& q, std::size_t n) {
  std::vector<double> d, lg;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double s = 0.0;
    for (std::size_t x = 0; x + k < n; ++x) s += q[x * n + x + k];
    s /= static_cast<double>(n - k);
    if (s <= 1e-12) break;
    d.push_back(static_cast<double>(k));
    lg.push_back(std::log(s));
  }
  if (d.size() < 2) return 0.0;
  return -stats::least_squares(d, lg).slope;
}

inline Correlator correlator(const TridiagonalBox& box) {
  const auto pairs = eigenpairs(box);
  const std::size_t n = box.dimension();
  Correlator c;
  c.dimension = n;
  c.q.assign(n * n, 0.0);
  for (const auto& p : pairs) {
    for (std::size_t x = 0; x < n; ++x) {
      const double ax = std::abs(p.vector[x]);
      for (std::size_t y = 0; y < n; ++y) c.q[x * n + y] += ax * std::abs(p.vector[y]);
    }
  }
  c.decay_rate = correlator_decay_rate(c.q, n);
  return c;
}

}  // namespace anderson_lab
