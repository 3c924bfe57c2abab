#pragma once

// Monte Carlo estimators: Lyapunov exponents, large-deviation tails and their
// decay rates, the two-law lifting comparison, deviation sets and the
// Craig-Simon envelope.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "anderson_lab/measures.hpp"
#include "anderson_lab/parallel.hpp"
#include "anderson_lab/rng.hpp"
#include "anderson_lab/stats.hpp"
#include "anderson_lab/transfer.hpp"

namespace anderson_lab {

// ---------------------------------------------------------------------------
// Lyapunov exponents
// ---------------------------------------------------------------------------

struct LyapunovOptions {
  unsigned workers = 1;
  std::size_t burn_in = 128;
  bool keep_samples = false;
};

struct LyapunovEstimate {
  Energy energy{0.0};
  std::int64_t n = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double se = 0.0;
  std::vector<double> per_sample;
};

namespace detail {

/// Growth rate of one window: sites [1 - burn, 0] align the QR frame, then
/// (log R11(n) - log R11(0)) / n over sites [1, n].
template <class T>
double growth_rate(const ProductLaw& law, T energy, std::int64_t n, std::size_t burn, Generator& gen) {
  TransferAccumulator<T> acc(energy);
  for (std::int64_t site = 1 - static_cast<std::int64_t>(burn); site <= 0; ++site) acc.push(law.sample_site(site, gen));
  const double start = acc.log_r11();
  for (std::int64_t site = 1; site <= n; ++site) acc.push(law.sample_site(site, gen));
  return (acc.log_r11() - start) / static_cast<double>(n);
}

}  // namespace detail

/// Mean growth rate of S_[1,n] over i.i.d. windows. Sample i always uses
/// stream.child(i), so the result does not depend on `workers`.
inline LyapunovEstimate lyapunov_mc(const ProductLaw& law, const Energy& energy, std::int64_t n, std::size_t samples,
                                    RngStream stream, const LyapunovOptions& opt = {}) {
  if (n < 1 || samples < 1) throw std::invalid_argument("lyapunov_mc: need n >= 1 and samples >= 1");
  std::vector<double> values(samples);
  parallel_for(samples, opt.workers, [&](std::size_t i) {
    auto gen = stream.child(i).generator();
    values[i] = energy.is_real() ? detail::growth_rate<double>(law, energy.real(), n, opt.burn_in, gen)
                                 : detail::growth_rate<cplx>(law, energy.z, n, opt.burn_in, gen);
  });
  const auto ms = stats::mean_stderr(values);
  LyapunovEstimate est{energy, n, samples, ms.mean, ms.se, {}};
  if (opt.keep_samples) est.per_sample = std::move(values);
  return est;
}

/// Exponent of the constant potential c: log of the larger eigenvalue modulus
/// of [[z - c, -1], [1, 0]]; zero inside the real band |E - c| <= 2.
inline double lyapunov_closed_form(double c, const Energy& energy) {
  const cplx w = energy.z - c;
  if (energy.is_real()) {
    const double a = std::abs(w.real());
    if (a <= 2.0) return 0.0;
    return std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
  }
  const cplx root = std::sqrt(w * w - 4.0);
  return std::log(std::max(std::abs((w + root) / 2.0), std::abs((w - root) / 2.0)));
}

/// gamma-hat on an energy grid; grid point k uses stream.child(k).
inline std::vector<LyapunovEstimate> lyapunov_grid(const ProductLaw& law, const std::vector<double>& energies,
                                                   std::int64_t n, std::size_t samples, RngStream stream,
                                                   const LyapunovOptions& opt = {}) {
  std::vector<LyapunovEstimate> out;
  out.reserve(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k)
    out.push_back(lyapunov_mc(law, energies[k], n, samples, stream.child(k), opt));
  return out;
}

// ---------------------------------------------------------------------------
// Large-deviation tails
// ---------------------------------------------------------------------------

enum class StatisticKind { log_norm, log_det, matrix_element };

/// Which log-statistic of S_[-n,n] is compared against gamma * (2n + 1).
/// log_det uses the (1,1) entry, which equals +-P_[-n,n].
struct Statistic {
  StatisticKind kind = StatisticKind::log_norm;
  std::array<double, 2> u{1.0, 0.0};
  std::array<double, 2> v{1.0, 0.0};

  static Statistic log_norm() { return {}; }
  static Statistic log_det() { return {StatisticKind::log_det, {1.0, 0.0}, {1.0, 0.0}}; }
  static Statistic element(std::array<double, 2> u, std::array<double, 2> v) {
    return {StatisticKind::matrix_element, u, v};
  }
};

inline std::string_view statistic_name(StatisticKind k) {
  switch (k) {
    case StatisticKind::log_norm: return "log_norm";
    case StatisticKind::log_det: return "log_det";
    case StatisticKind::matrix_element: return "matrix_element";
  }
  return "?";
}

struct RateFit {
  std::string status = "insufficient";  // fitted | lower_bound | insufficient
  double eta = std::numeric_limits<double>::quiet_NaN();
  double ci = std::numeric_limits<double>::quiet_NaN();  // 3 combined standard errors
  std::size_t points = 0;
};

struct LDECurve {
  Energy energy{0.0};
  LawTag law = LawTag::Exact;
  StatisticKind statistic = StatisticKind::log_norm;
  double epsilon = 0.0;
  double epsilon_eff = 0.0;
  double gamma = 0.0;
  double gamma_se = 0.0;
  std::vector<std::int64_t> n_grid;  // half-widths; windows are [-n, n]
  std::vector<std::size_t> counts;
  std::size_t samples = 0;
  std::vector<double> p;
  std::vector<double> p_se;
  RateFit fit;

  [[nodiscard]] static double length(std::int64_t n) { return static_cast<double>(2 * n + 1); }
};

struct TailOptions {
  unsigned workers = 1;
  Statistic statistic{};
  /// gamma-hat: supplied, or estimated under P1 at the largest window length.
  std::optional<LyapunovEstimate> gamma;
  std::size_t gamma_samples = 400;
  /// When set, epsilon is a multiple of gamma-hat rather than absolute.
  bool epsilon_relative = false;
};

namespace detail {

/// Running S_[-k,k] as normalized real or complex entries.
template <class T>
struct TwoSided {
  std::array<T, 4> m{};
  double log_scale = 0.0;

  void renormalize() {
    double big = 0.0;
    for (const T& x : m) big = std::max(big, std::abs(x));
    int e = 0;
    std::frexp(big, &e);
    const double f = std::ldexp(1.0, -e);
    for (T& x : m) x *= f;
    log_scale += static_cast<double>(e) * kLn2;
  }

  /// S <- T(x_right) S T(x_left).
  void grow(T x_right, T x_left) {
    // Left factor [[xr, -1], [1, 0]].
    const T r0 = x_right * m[0] - m[2], r1 = x_right * m[1] - m[3];
    m[2] = m[0];
    m[3] = m[1];
    m[0] = r0;
    m[1] = r1;
    // Right factor [[xl, -1], [1, 0]].
    const T c0 = m[0] * x_left + m[1], c2 = m[2] * x_left + m[3];
    m[1] = -m[0];
    m[3] = -m[2];
    m[0] = c0;
    m[2] = c2;
    renormalize();
  }

  [[nodiscard]] ScaledMatrix<T> matrix() const {
    ScaledMatrix<T> s;
    s.entries = m;
    s.log_scale = log_scale;
    s.log_abs_det = 0.0;
    return s;
  }
};

template <class T>
double evaluate(const TwoSided<T>& s, const Statistic& stat) {
  const auto mat = s.matrix();
  switch (stat.kind) {
    case StatisticKind::log_norm: return mat.log_norm();
    case StatisticKind::log_det: return mat.entry_log(0, 0).log_mag;
    case StatisticKind::matrix_element: {
      const std::array<T, 2> u{T(stat.u[0]), T(stat.u[1])}, v{T(stat.v[0]), T(stat.v[1])};
      return matrix_element(u, mat, v).log_mag;
    }
  }
  return 0.0;
}

/// Does |statistic(S_[-n,n]) / (2n+1) - gamma| > eps, for each n in the grid?
template <class T>
void tail_events(const ProductLaw& law, T energy, const std::vector<std::int64_t>& grid, const Statistic& stat,
                 double gamma, double eps, Generator& gen, std::vector<unsigned char>& hit) {
  TwoSided<T> s;
  s.m = {energy - law.sample_site(0, gen), T{-1}, T{1}, T{0}};
  s.renormalize();
  std::size_t g = 0;
  const std::int64_t n_max = grid.back();
  for (std::int64_t k = 0;; ++k) {
    while (g < grid.size() && grid[g] == k) {
      const double len = static_cast<double>(2 * k + 1);
      hit[g] = std::abs(evaluate(s, stat) / len - gamma) > eps ? 1 : 0;
      ++g;
    }
    if (k == n_max) break;
    const double right = law.sample_site(k + 1, gen);
    const double left = law.sample_site(-(k + 1), gen);
    s.grow(energy - right, energy - left);
  }
}

inline std::vector<std::size_t> tail_counts(const ProductLaw& law, const Energy& energy,
                                            const std::vector<std::int64_t>& grid, const Statistic& stat,
                                            double gamma, double eps, std::size_t samples, RngStream stream,
                                            unsigned workers) {
  std::vector<unsigned char> hits(samples * grid.size());
  parallel_for(samples, workers, [&](std::size_t i) {
    auto gen = stream.child(i).generator();
    std::vector<unsigned char> h(grid.size());
    if (energy.is_real()) {
      tail_events<double>(law, energy.real(), grid, stat, gamma, eps, gen, h);
    } else {
      tail_events<cplx>(law, energy.z, grid, stat, gamma, eps, gen, h);
    }
    std::copy(h.begin(), h.end(), hits.begin() + static_cast<std::ptrdiff_t>(i * grid.size()));
  });
  std::vector<std::size_t> counts(grid.size(), 0);
  for (std::size_t i = 0; i < samples; ++i)
    for (std::size_t g = 0; g < grid.size(); ++g) counts[g] += hits[i * grid.size() + g];
  return counts;
}

inline void validate_grid(const std::vector<std::int64_t>& grid) {
  if (grid.empty()) throw std::invalid_argument("n grid must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0 || (i > 0 && grid[i] <= grid[i - 1])) throw std::invalid_argument("n grid must be ascending and >= 0");
  }
}

}  // namespace detail

/// eta = -slope of log p-hat against window length, over points with at least
/// 5 events. CI = 3 * sqrt(propagated^2 + residual^2) slope errors.
inline RateFit fit_rate(const std::vector<std::int64_t>& grid, const std::vector<std::size_t>& counts,
                        std::size_t samples) {
  RateFit fit;
  std::vector<double> x, y, sigma;
  bool any = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    any = any || counts[g] > 0;
    if (counts[g] < 5) continue;
    const auto pr = stats::proportion(counts[g], samples);
    x.push_back(LDECurve::length(grid[g]));
    y.push_back(std::log(pr.p));
    sigma.push_back(pr.se / pr.p);
  }
  fit.points = x.size();
  if (!any) {
    fit.status = "lower_bound";
    fit.eta = std::log(static_cast<double>(samples)) / LDECurve::length(grid.back());
    fit.ci = 0.0;
    return fit;
  }
  if (x.size() < 2) return fit;
  const auto line = stats::least_squares(x, y);
  const double prop = stats::propagated_slope_se(x, sigma);
  fit.status = "fitted";
  fit.eta = -line.slope;
  fit.ci = stats::kSigmas * std::sqrt(prop * prop + line.slope_se * line.slope_se);
  return fit;
}

namespace detail {

inline LyapunovEstimate resolve_gamma(const ProductLaw& exact_law, const Energy& energy,
                                      const std::vector<std::int64_t>& grid, RngStream stream, const TailOptions& opt) {
  if (opt.gamma) return *opt.gamma;
  const auto len = static_cast<std::int64_t>(LDECurve::length(grid.back()));
  return lyapunov_mc(exact_law, energy, len, opt.gamma_samples, stream.child(stream_tag::kLyapunov),
                     {opt.workers, 128, false});
}

inline LDECurve make_curve(LawTag tag, const Energy& energy, double eps, const LyapunovEstimate& gamma,
                           const std::vector<std::int64_t>& grid, std::size_t samples, const TailOptions& opt,
                           std::vector<std::size_t> counts) {
  LDECurve c;
  c.energy = energy;
  c.law = tag;
  c.statistic = opt.statistic.kind;
  c.epsilon = eps;
  c.epsilon_eff = eps - 2.0 * gamma.se;
  c.gamma = gamma.mean;
  c.gamma_se = gamma.se;
  c.n_grid = grid;
  c.samples = samples;
  c.counts = std::move(counts);
  for (auto k : c.counts) {
    const auto pr = stats::proportion(k, samples);
    c.p.push_back(pr.p);
    c.p_se.push_back(pr.se);
  }
  c.fit = fit_rate(grid, c.counts, samples);
  return c;
}

}  // namespace detail

/// Empirical P[|stat(S_[-n,n]) / (2n+1) - gamma| > eps_eff] on the n grid,
/// with eps_eff = eps - 2 * stderr(gamma-hat).
inline LDECurve lde_curve(const ProductLaw& law, const Energy& energy, double epsilon,
                          const std::vector<std::int64_t>& n_grid, std::size_t samples, RngStream stream,
                          const TailOptions& opt = {}) {
  detail::validate_grid(n_grid);
  if (!(epsilon > 0.0)) throw std::invalid_argument("lde_curve: epsilon must be positive");
  const auto gamma = detail::resolve_gamma(law.exact_counterpart(), energy, n_grid, stream, opt);
  const double eps = opt.epsilon_relative ? epsilon * gamma.mean : epsilon;
  const auto tag = law.tag() == LawTag::Exact ? stream_tag::kTailsExact : stream_tag::kTailsApprox;
  auto counts = detail::tail_counts(law, energy, n_grid, opt.statistic, gamma.mean, eps - 2.0 * gamma.se, samples,
                                    stream.child(tag), opt.workers);
  return detail::make_curve(law.tag(), energy, eps, gamma, n_grid, samples, opt, std::move(counts));
}

struct LiftViolation {
  std::int64_t n = 0;
  double p0 = 0.0;
  double bound = 0.0;  // e^{log_bound} * p1 + 3 combined standard errors
};

struct LiftReport {
  LDECurve exact;   // P1
  LDECurve approx;  // P0
  std::vector<double> log_bound;  // sum_{|k| <= n} log ||g_k||
  std::vector<LiftViolation> violations;
  double eta0 = 0.0;              // log_bound(n_max) / (2 n_max + 1)
  std::string rate_check = "inconclusive";  // pass | fail | inconclusive
  double rate_margin = 0.0;       // eta(P0) - (eta(P1) - eta0 - CI)

  [[nodiscard]] bool bound_holds() const { return violations.empty(); }
};

/// Evaluates the same F_n-adapted tail events under P1 = mu^Z and
/// P0 = (x) g_n mu and checks P0 <= (prod ||g_k||) P1 within 3 standard errors.
inline LiftReport lift_check(const DensitySequence& seq, const Energy& energy, double epsilon,
                             const std::vector<std::int64_t>& n_grid, std::size_t samples, RngStream stream,
                             const TailOptions& opt = {}) {
  detail::validate_grid(n_grid);
  const auto p1 = ProductLaw::exact(seq.base());
  const auto p0 = ProductLaw::approximate(seq);
  const auto gamma = detail::resolve_gamma(p1, energy, n_grid, stream, opt);
  const double eps = opt.epsilon_relative ? epsilon * gamma.mean : epsilon;
  const double eps_eff = eps - 2.0 * gamma.se;
  auto c1 = detail::tail_counts(p1, energy, n_grid, opt.statistic, gamma.mean, eps_eff, samples,
                                stream.child(stream_tag::kTailsExact), opt.workers);
  auto c0 = detail::tail_counts(p0, energy, n_grid, opt.statistic, gamma.mean, eps_eff, samples,
                                stream.child(stream_tag::kTailsApprox), opt.workers);
  LiftReport rep;
  rep.exact = detail::make_curve(LawTag::Exact, energy, eps, gamma, n_grid, samples, opt, std::move(c1));
  rep.approx = detail::make_curve(LawTag::Approximate, energy, eps, gamma, n_grid, samples, opt, std::move(c0));
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    double lb = 0.0;
    for (std::int64_t k = -n_grid[g]; k <= n_grid[g]; ++k) lb += seq.log_sup_norm(k);
    rep.log_bound.push_back(lb);
    const double c = std::exp(lb);
    const double tol = stats::kSigmas * std::hypot(rep.approx.p_se[g], c * rep.exact.p_se[g]);
    const double bound = c * rep.exact.p[g] + tol;
    if (rep.approx.p[g] > bound) rep.violations.push_back({n_grid[g], rep.approx.p[g], bound});
  }
  rep.eta0 = rep.log_bound.back() / LDECurve::length(n_grid.back());
  if (rep.exact.fit.status == "fitted" && rep.approx.fit.status == "fitted") {
    const double ci = std::hypot(rep.exact.fit.ci, rep.approx.fit.ci);
    rep.rate_margin = rep.approx.fit.eta - (rep.exact.fit.eta - rep.eta0 - ci);
    rep.rate_check = rep.rate_margin >= 0.0 ? "pass" : "fail";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Deviation sets and the Craig-Simon envelope
// ---------------------------------------------------------------------------

enum class Deviation { B_plus, B_minus, neither };

inline std::string_view deviation_name(Deviation d) {
  switch (d) {
    case Deviation::B_plus: return "B_plus";
    case Deviation::B_minus: return "B_minus";
    case Deviation::neither: return "neither";
  }
  return "?";
}

/// B+ : |P_[a,b]| >= e^{(gamma + eps) L};  B- : |P_[a,b]| <= e^{(gamma - eps) L}.
inline Deviation deviation_classify(const PotentialWindow& omega, std::int64_t a, std::int64_t b, double energy,
                                    double epsilon, double gamma) {
  const auto p = det_recurrence(energy, omega.slice(a, b)).back();
  const double len = static_cast<double>(b - a + 1);
  if (p.log_mag <= (gamma - epsilon) * len) return Deviation::B_minus;
  if (p.log_mag >= (gamma + epsilon) * len) return Deviation::B_plus;
  return Deviation::neither;
}

struct CraigSimonRow {
  std::int64_t n = 0;
  double energy = 0.0;
  double gamma_hat = 0.0;
  std::array<double, 4> excess{};  // (1/n) log ||.|| - gamma_hat for each family
};

struct CraigSimonReport {
  static constexpr std::array<std::string_view, 4> kFamilies = {"S[1,n]", "S[-n,-1]^-1", "S[n+1,2n]", "S[2n+2,3n]^-1"};
  std::vector<CraigSimonRow> rows;
  std::array<double, 4> max_excess{kNegInf, kNegInf, kNegInf, kNegInf};

  [[nodiscard]] double worst() const { return *std::max_element(max_excess.begin(), max_excess.end()); }
};

/// Worst excess of the four normalized transfer norms over gamma-hat. The
/// window must cover [-n, 3n] for every n in the grid.
inline CraigSimonReport craig_simon_scan(const PotentialWindow& omega, const std::vector<double>& energies,
                                         const std::vector<double>& gamma_hat, const std::vector<std::int64_t>& n_grid) {
  if (energies.size() != gamma_hat.size()) throw std::invalid_argument("craig_simon_scan: one gamma-hat per energy");
  CraigSimonReport rep;
  for (auto n : n_grid) {
    if (n < 2) throw std::invalid_argument("craig_simon_scan: n must be >= 2");
    const std::array<std::pair<std::int64_t, std::int64_t>, 4> spans = {
        std::pair{1, n}, std::pair{-n, -1}, std::pair{n + 1, 2 * n}, std::pair{2 * n + 2, 3 * n}};
    for (std::size_t k = 0; k < energies.size(); ++k) {
      CraigSimonRow row{n, energies[k], gamma_hat[k], {}};
      for (std::size_t f = 0; f < 4; ++f) {
        auto s = product(energies[k], omega.slice(spans[f].first, spans[f].second));
        if (f % 2 == 1) s = s.inverse();
        row.excess[f] = s.log_norm() / static_cast<double>(n) - gamma_hat[k];
        rep.max_excess[f] = std::max(rep.max_excess[f], row.excess[f]);
      }
      rep.rows.push_back(row);
    }
  }
  return rep;
}

struct SubmeanReport {
  double center = 0.0;
  double circle_average = 0.0;
  double difference = 0.0;  // circle average minus center
  double difference_se = 0.0;
};

/// Mean of gamma over m circle points minus gamma at the centre. Each window
/// is shared by all m + 1 energies, so the difference has low variance.
inline SubmeanReport submean_check(const ProductLaw& law, cplx z0, double radius, std::size_t circle_points,
                                   std::int64_t n, std::size_t samples, RngStream stream, unsigned workers = 1,
                                   std::size_t burn_in = 128) {
  if (!(radius > 0.0) || circle_points < 8) throw std::invalid_argument("submean_check: need radius > 0 and m >= 8");
  std::vector<cplx> zs;
  for (std::size_t k = 0; k < circle_points; ++k)
    zs.push_back(z0 + std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(circle_points)));
  std::vector<double> centre(samples), diff(samples), avg(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    auto gen = stream.child(i).generator();
    std::vector<double> v;
    const auto lo = 1 - static_cast<std::int64_t>(burn_in);
    for (std::int64_t site = lo; site <= n; ++site) v.push_back(law.sample_site(site, gen));
    auto rate = [&](cplx z) {
      TransferAccumulator<cplx> acc(z);
      std::size_t j = 0;
      for (; j < burn_in; ++j) acc.push(v[j]);
      const double start = acc.log_r11();
      for (; j < v.size(); ++j) acc.push(v[j]);
      return (acc.log_r11() - start) / static_cast<double>(n);
    };
    centre[i] = rate(z0);
    double s = 0.0;
    for (const auto& z : zs) s += rate(z);
    avg[i] = s / static_cast<double>(zs.size());
    diff[i] = avg[i] - centre[i];
  });
  const auto d = stats::mean_stderr(diff);
  return {stats::mean_stderr(centre).mean, stats::mean_stderr(avg).mean, d.mean, d.se};
}

}  // namespace anderson_lab
