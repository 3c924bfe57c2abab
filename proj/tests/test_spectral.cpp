#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "anderson_lab/spectral.hpp"
#include "oracles.hpp"

using namespace anderson_lab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PotentialWindow uniform_window(std::int64_t lo, std::int64_t hi, std::uint64_t seed, double w = 2.0) {
  return sample_window(ProductLaw::exact(BaseMeasure(UniformInterval{-w, w}, 1.0)), lo, hi, {seed, 31});
}

PotentialWindow coin_window(std::int64_t lo, std::int64_t hi, std::uint64_t seed) {
  return sample_window(ProductLaw::exact(BaseMeasure::bernoulli()), lo, hi, {seed, 32});
}

TridiagonalBox free_box(std::size_t n) { return TridiagonalBox(PotentialWindow(1, std::vector<double>(n, 0.0))); }

}  // namespace

TEST_CASE("eigenvalues of small and free boxes", "[spectral]") {
  const auto one = eigenvalues(TridiagonalBox(PotentialWindow(0, {7.0})));
  REQUIRE(one.size() == 1);
  CHECK_THAT(one[0], WithinAbs(7.0, 1e-9));
  for (std::size_t n : {2, 5, 17, 60}) {
    const auto ev = eigenvalues(free_box(n));
    REQUIRE(ev.size() == n);
    for (std::size_t k = 1; k <= n; ++k) {
      const double want = 2.0 * std::cos(static_cast<double>(n + 1 - k) * std::numbers::pi / static_cast<double>(n + 1));
      CHECK_THAT(ev[k - 1], WithinAbs(want, 1e-10 * 2.0));
    }
  }
}

TEST_CASE("eigenvalues match determinant roots and the dense solver", "[spectral]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto len = static_cast<std::int64_t>(1 + seed % 8);
    const auto w = uniform_window(0, len - 1, seed);
    const TridiagonalBox box(w);
    const auto ev = eigenvalues(box);
    const auto dense = oracle::dense_eigen(w.values);
    // Independent roots: sign changes of the dense determinant on a fine scan.
    std::vector<double> roots;
    const double lo = box.min_potential() - 2.01, hi = box.max_potential() + 2.01;
    const int steps = 4000;
    double prev = oracle::lu_det(w.values, lo);
    for (int i = 1; i <= steps; ++i) {
      double a = lo + (hi - lo) * (i - 1) / steps, b = lo + (hi - lo) * i / steps;
      const double cur = oracle::lu_det(w.values, b);
      if ((prev < 0) != (cur < 0)) {
        double fa = prev;
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (a + b), fm = oracle::lu_det(w.values, m);
          if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        roots.push_back(0.5 * (a + b));
      }
      prev = cur;
    }
    REQUIRE(roots.size() == ev.size());
    for (std::size_t k = 0; k < ev.size(); ++k) {
      CHECK_THAT(ev[k], WithinAbs(roots[k], 1e-8));
      CHECK_THAT(ev[k], WithinAbs(dense.values(static_cast<Eigen::Index>(k)), 1e-8));
    }
  }
}

TEST_CASE("sturm counts, interlacing and gershgorin", "[spectral]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto w = coin_window(0, static_cast<std::int64_t>(20 + seed), seed);
    const TridiagonalBox box(w);
    const auto ev = eigenvalues(box);
    CHECK(sturm_count(box, box.max_potential() + 2.0 + 1e-9) == box.dimension());
    CHECK(ev.front() >= box.min_potential() - 2.0 - 1e-9);
    CHECK(ev.back() <= box.max_potential() + 2.0 + 1e-9);
    const auto sub = eigenvalues(TridiagonalBox(w.slice(w.lo + 1, w.hi)));
    for (std::size_t k = 0; k < sub.size(); ++k) {
      CHECK(ev[k] <= sub[k] + 1e-9);
      CHECK(sub[k] <= ev[k + 1] + 1e-9);
    }
  }
}

TEST_CASE("eigenvectors", "[spectral]") {
  const auto single = eigenvector(TridiagonalBox(PotentialWindow(0, {4.0})), 4.0);
  CHECK(single.vector == std::vector<double>{1.0});
  CHECK(single.residual == 0.0);

  const std::size_t n = 12;
  const auto free = free_box(n);
  const auto ev = eigenvalues(free);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = eigenvector(free, ev[k]);
    const double theta = static_cast<double>(n - k) * std::numbers::pi / static_cast<double>(n + 1);
    std::vector<double> want(n);
    double nrm = 0.0;
    for (std::size_t j = 0; j < n; ++j) nrm += std::pow(want[j] = std::sin(static_cast<double>(j + 1) * theta), 2);
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += want[j] / std::sqrt(nrm) * p.vector[j];
    CHECK_THAT(std::abs(dot), WithinAbs(1.0, 1e-10));
  }

  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto w = uniform_window(0, static_cast<std::int64_t>(seed % 8), seed + 100);
    const TridiagonalBox box(w);
    const auto dense = oracle::dense_eigen(w.values);
    const auto pairs = eigenpairs(box);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& p = pairs[k];
      CHECK(p.residual <= 1e-8 * box.scale());
      CHECK_THAT(oracle::Dense::Map(p.vector.data(), static_cast<Eigen::Index>(p.vector.size()), 1).norm(), WithinAbs(1.0, 1e-12));
      const Eigen::VectorXd col = dense.vectors.col(static_cast<Eigen::Index>(k));
      const Eigen::Map<const Eigen::VectorXd> got(p.vector.data(), static_cast<Eigen::Index>(p.vector.size()));
      CHECK(std::min((col - got).cwiseAbs().maxCoeff(), (col + got).cwiseAbs().maxCoeff()) <= 1e-6);
      Eigen::Index imax = 0;
      got.cwiseAbs().maxCoeff(&imax);
      CHECK(got(imax) > 0.0);
    }
  }
}

TEST_CASE("large boxes keep small residuals and orthogonality", "[spectral]") {
  const auto w = coin_window(-200, 199, 77);
  const TridiagonalBox box(w);
  const auto pairs = eigenpairs(box);
  double worst = 0.0;
  for (const auto& p : pairs) worst = std::max(worst, p.residual);
  CHECK(worst <= 1e-8 * box.scale());
  double overlap = 0.0;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < box.dimension(); ++j) dot += pairs[i].vector[j] * pairs[i + 1].vector[j];
    overlap = std::max(overlap, std::abs(dot));
  }
  CHECK(overlap <= 1e-6);
}

TEST_CASE("green's function by determinant ratio and direct solve", "[spectral]") {
  const TridiagonalBox single(PotentialWindow(0, {3.0}));
  const auto g = green(single, 0.0, 0, 0);
  CHECK_THAT(g.log_mag, WithinAbs(-std::log(3.0), 1e-15));

  const auto w = uniform_window(5, 14, 8);
  const TridiagonalBox box(w);
  const BoxResolvent res(box, 0.3);
  const auto dets = det_recurrence(0.3, w);
  const auto inner = det_recurrence(0.3, w.slice(6, 14));
  CHECK_THAT(res.green(5, 5).log_mag, WithinAbs(inner.back().log_mag - dets.back().log_mag, 1e-12));

  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto len = static_cast<std::int64_t>(1 + seed % 12);
    const auto ww = uniform_window(0, len - 1, seed + 500);
    const TridiagonalBox b(ww);
    const double e = -3.0 + 0.02 * static_cast<double>(seed);
    const BoxResolvent r(b, e);
    if (r.resonant()) continue;
    const auto inv = oracle::resolvent(ww.values, e);
    for (std::int64_t x = 0; x < len; ++x) {
      for (std::int64_t y = 0; y < len; ++y) {
        const auto dr = green(b, e, x, y, GreenMethod::det_ratio);
        const auto ds = green(b, e, x, y, GreenMethod::direct_solve);
        CHECK_THAT(dr.log_mag, WithinAbs(ds.log_mag, 1e-8 * std::max(1.0, std::abs(ds.log_mag))));
        CHECK(dr.sign() == ds.sign());
        CHECK_THAT(dr.value(), WithinAbs(inv(x, y), 1e-8 * std::max(1.0, std::abs(inv(x, y)))));
      }
    }
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("resonant energies are rejected", "[spectral]") {
  const auto w = uniform_window(0, 9, 4);
  const TridiagonalBox box(w);
  const double lambda = eigenpairs(box, 3, 4).front().value;
  CHECK_THROWS_AS(green(box, lambda, 0, 9), ResonantEnergy);
  CHECK_THROWS_WITH(green(box, lambda, 0, 9, GreenMethod::direct_solve), Catch::Matchers::ContainsSubstring("resonant energy"));
  CHECK_NOTHROW(green(box, lambda + 1e-6, 0, 9));
}

TEST_CASE("regularity classification", "[spectral]") {
  const PotentialWindow zero(-10, std::vector<double>(21, 0.0));
  CHECK(classify_regularity(zero, 0, 2, 1.0, 0.5).verdict == Regularity::singular);

  const double gamma = std::log((5.0 + std::sqrt(21.0)) / 2.0);
  const PotentialWindow five(-60, std::vector<double>(121, 5.0));
  const auto rep = classify_regularity(five, 0, 50, 0.5 * gamma, 0.0);
  CHECK(rep.verdict == Regularity::regular);
  CHECK_THAT(rep.green_left.log_mag / 51.0, WithinAbs(-gamma, 0.01));

  // 5x5 box with hand-checkable determinants: V = (1, 0, 2, 0, 1), E = 0.
  const PotentialWindow hand(-2, {1.0, 0.0, 2.0, 0.0, 1.0});
  const auto inv = oracle::resolvent(hand.values, 0.0);
  const auto r = classify_regularity(hand, 0, 2, 0.3, 0.0);
  CHECK_THAT(r.green_left.log_mag, WithinAbs(std::log(std::abs(inv(2, 0))), 1e-12));
  CHECK_THAT(r.green_right.log_mag, WithinAbs(std::log(std::abs(inv(2, 4))), 1e-12));
  const bool regular = std::abs(inv(2, 0)) <= std::exp(-0.6) && std::abs(inv(2, 4)) <= std::exp(-0.6);
  CHECK((r.verdict == Regularity::regular) == regular);
}

TEST_CASE("interior reconstruction from boundary data", "[spectral]") {
  const TridiagonalBox any(uniform_window(0, 5, 1));
  CHECK(reconstruct_interior(any, 0.1, 0.0, 0.0, 3) == 0.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto len = static_cast<std::int64_t>(1 + seed % 10);
    const auto w = uniform_window(1, len, seed + 900);
    const TridiagonalBox box(w);
    const double e = -2.0 + 0.02 * static_cast<double>(seed);
    const auto dets = det_recurrence(e, w);
    if (dets.back().log_mag <= -20.0) continue;
    const auto psi = oracle::transfer_solution(w.values, e, 0.7, -1.3 + 0.01 * static_cast<double>(seed));
    for (std::int64_t x = 1; x <= len; ++x) {
      const double want = psi[static_cast<std::size_t>(x)];
      const double got = reconstruct_interior(box, e, psi.front(), psi.back(), x);
      CHECK_THAT(got, WithinAbs(want, 1e-8 * std::max(1.0, std::abs(want))));
    }
  }
  // Free operator outside the band: psi(n) = r^n solves the equation.
  const double e = 3.0, r = (3.0 - std::sqrt(5.0)) / 2.0;
  const TridiagonalBox free(PotentialWindow(1, std::vector<double>(8, 0.0)));
  for (std::int64_t x = 1; x <= 8; ++x) {
    CHECK_THAT(reconstruct_interior(free, e, 1.0, std::pow(r, 9), x), WithinRel(std::pow(r, static_cast<double>(x)), 1e-10));
  }
}

TEST_CASE("eigenfunction correlator", "[spectral]") {
  const auto one = correlator(TridiagonalBox(PotentialWindow(0, {2.0})));
  CHECK(one.q == std::vector<double>{1.0});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = uniform_window(0, static_cast<std::int64_t>(3 + seed % 6), seed + 40);
    const auto c = correlator(TridiagonalBox(w));
    for (std::size_t x = 0; x < c.dimension; ++x) {
      CHECK(c.at(x, x) <= 1.0 + 1e-8);
      for (std::size_t y = 0; y < c.dimension; ++y) {
        CHECK(c.at(x, y) == c.at(y, x));
        for (double t : {0.3, 1.7, 5.0, 23.0}) {
          const double amp = std::abs(oracle::propagator(w.values, t, static_cast<int>(x), static_cast<int>(y)));
          CHECK(amp <= c.at(x, y) + 1e-10);
        }
      }
    }
  }
  CHECK(correlator(free_box(120)).decay_rate < 0.02);
  CHECK(correlator(TridiagonalBox(uniform_window(0, 119, 3, 4.0))).decay_rate > 0.1);
}
