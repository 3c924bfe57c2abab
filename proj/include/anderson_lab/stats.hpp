#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace anderson_lab::stats {

/// Multiplier used for every statistical tolerance in the lab.
inline constexpr double kSigmas = 3.0;

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error (sample std / sqrt(count)), summed in order.
inline MeanStderr mean_stderr(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_stderr: empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

/// Binomial proportion with its standard error. Below 10 events the normal
/// approximation is replaced by the Wilson-adjusted centre and spread
/// (z = kSigmas), which never reports a zero error for a zero count.
struct Proportion {
  std::size_t count = 0;
  std::size_t trials = 0;
  double p = 0.0;
  double se = 0.0;
};

inline Proportion proportion(std::size_t count, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("proportion: zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(count) / n;
  double se;
  if (count < 10) {
    const double z2 = kSigmas * kSigmas;
    const double centre = (static_cast<double>(count) + z2 / 2.0) / (n + z2);
    se = std::sqrt(centre * (1.0 - centre) / (n + z2));
  } else {
    se = std::sqrt(p * (1.0 - p) / n);
  }
  return {count, trials, p, se};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // from residual scatter; 0 when fewer than 3 points
};

/// Unweighted least squares y = intercept + slope * x.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
  }
  return fit;
}

/// Standard error of the least-squares slope induced by independent errors
/// `sigma[i]` on each ordinate.
inline double propagated_slope_se(std::span<const double> x, std::span<const double> sigma) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= n;
  double sxx = 0.0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (x[i] - mx) / sxx;
    var += w * w * sigma[i] * sigma[i];
  }
  return std::sqrt(var);
}

}  // namespace anderson_lab::stats
