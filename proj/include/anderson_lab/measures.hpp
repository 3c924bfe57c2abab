#pragma once

// Site laws, perturbed density sequences and the product laws they generate.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anderson_lab/rng.hpp"
#include "anderson_lab/stats.hpp"

namespace anderson_lab {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Base measure
// ---------------------------------------------------------------------------

struct FiniteAtoms {
  std::vector<double> locations;
  std::vector<double> weights;
};

struct UniformInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// |X| = scale * U^{-1/exponent}; with `symmetric` the sign is a fair coin,
/// otherwise X >= scale.
struct ParetoTail {
  double scale = 1.0;
  double exponent = 2.0;
  bool symmetric = true;
};

/// The law mu of a single site, plus the alpha of its moment condition.
class BaseMeasure {
 public:
  using Shape = std::variant<FiniteAtoms, UniformInterval, ParetoTail>;

  BaseMeasure(Shape shape, double alpha_moment, bool allow_trivial = false)
      : shape_(std::move(shape)), alpha_(alpha_moment) {
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw ValidationError("measure: alpha_moment must be positive");
    if (auto* a = std::get_if<FiniteAtoms>(&shape_)) {
      if (a->locations.size() != a->weights.size() || a->locations.empty())
        throw ValidationError("measure: atoms need one weight per location");
      if (a->locations.size() < 2 && !allow_trivial) throw ValidationError("measure: non-trivial support required");
      double sum = 0.0;
      for (std::size_t i = 0; i < a->weights.size(); ++i) {
        if (!(a->weights[i] > 0.0) || !std::isfinite(a->locations[i]))
          throw ValidationError("measure: atom weights must be positive and locations finite");
        sum += a->weights[i];
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("measure: atom weights must sum to 1");
      std::vector<double> sorted = a->locations;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("measure: atom locations must be distinct");
      cumulative_.resize(a->weights.size());
      double c = 0.0;
      for (std::size_t i = 0; i < a->weights.size(); ++i) cumulative_[i] = (c += a->weights[i]);
      cumulative_.back() = 1.0;
    } else if (auto* u = std::get_if<UniformInterval>(&shape_)) {
      if (!(u->lo < u->hi) || !std::isfinite(u->lo) || !std::isfinite(u->hi))
        throw ValidationError("measure: uniform interval needs lo < hi");
    } else {
      const auto& p = std::get<ParetoTail>(shape_);
      if (!(p.scale > 0.0) || !(p.exponent > 0.0)) throw ValidationError("measure: pareto scale and exponent must be positive");
      if (!(p.exponent > alpha_)) throw ValidationError("measure: moment condition unsatisfiable (exponent <= alpha_moment)");
    }
  }

  static BaseMeasure bernoulli(double a = -1.0, double b = 1.0, double p = 0.5, double alpha = 1.0) {
    return BaseMeasure(FiniteAtoms{{a, b}, {p, 1.0 - p}}, alpha);
  }

  /// Point mass at c. Only for closed-form oracles: mu is trivial.
  static BaseMeasure point_mass(double c, double alpha = 1.0) {
    return BaseMeasure(FiniteAtoms{{c}, {1.0}}, alpha, /*allow_trivial=*/true);
  }

  [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
  [[nodiscard]] double alpha_moment() const noexcept { return alpha_; }
  [[nodiscard]] const FiniteAtoms* atoms() const noexcept { return std::get_if<FiniteAtoms>(&shape_); }
  [[nodiscard]] bool is_atomic() const noexcept { return atoms() != nullptr; }
  [[nodiscard]] std::size_t atom_count() const noexcept { return is_atomic() ? atoms()->weights.size() : 0; }

  /// Categorical draw of an atom index from cumulative weights.
  static std::size_t pick(std::span<const double> cumulative, double u) {
    std::size_t i = 0;
    while (i + 1 < cumulative.size() && u >= cumulative[i]) ++i;
    return i;
  }

  double sample(Generator& gen) const {
    if (const auto* a = atoms()) return a->locations[pick(cumulative_, gen.uniform())];
    if (const auto* u = std::get_if<UniformInterval>(&shape_)) return u->lo + (u->hi - u->lo) * gen.uniform();
    const auto& p = std::get<ParetoTail>(shape_);
    const double mag = p.scale * std::pow(gen.uniform_open_left(), -1.0 / p.exponent);
    if (!p.symmetric) return mag;
    return gen.uniform() < 0.5 ? -mag : mag;
  }

  /// mu((-inf, x]).
  [[nodiscard]] double cdf(double x) const {
    if (const auto* a = atoms()) {
      double c = 0.0;
      for (std::size_t i = 0; i < a->weights.size(); ++i)
        if (a->locations[i] <= x) c += a->weights[i];
      return std::min(c, 1.0);
    }
    if (const auto* u = std::get_if<UniformInterval>(&shape_)) return std::clamp((x - u->lo) / (u->hi - u->lo), 0.0, 1.0);
    const auto& p = std::get<ParetoTail>(shape_);
    if (!p.symmetric) return x < p.scale ? 0.0 : 1.0 - std::pow(p.scale / x, p.exponent);
    if (x <= -p.scale) return 0.5 * std::pow(p.scale / -x, p.exponent);
    if (x < p.scale) return 0.5;
    return 1.0 - 0.5 * std::pow(p.scale / x, p.exponent);
  }

  /// Smallest q with cdf(q) >= u, for continuous shapes.
  [[nodiscard]] double quantile(double u) const {
    if (is_atomic()) throw std::logic_error("quantile: atomic measure");
    if (const auto* iv = std::get_if<UniformInterval>(&shape_)) return iv->lo + u * (iv->hi - iv->lo);
    const auto& p = std::get<ParetoTail>(shape_);
    if (!p.symmetric) return p.scale * std::pow(1.0 - u, -1.0 / p.exponent);
    if (u <= 0.5) return -p.scale * std::pow(2.0 * u, -1.0 / p.exponent);
    return p.scale * std::pow(2.0 * (1.0 - u), -1.0 / p.exponent);
  }

  [[nodiscard]] std::optional<std::size_t> atom_index(double x) const {
    if (const auto* a = atoms()) {
      for (std::size_t i = 0; i < a->locations.size(); ++i)
        if (a->locations[i] == x) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] bool in_support(double x) const {
    if (is_atomic()) return atom_index(x).has_value();
    if (const auto* u = std::get_if<UniformInterval>(&shape_)) return x >= u->lo && x <= u->hi;
    const auto& p = std::get<ParetoTail>(shape_);
    return p.symmetric ? std::abs(x) >= p.scale : x >= p.scale;
  }

  /// mu(|X| > t).
  [[nodiscard]] double tail(double t) const {
    if (const auto* a = atoms()) {
      double s = 0.0;
      for (std::size_t i = 0; i < a->weights.size(); ++i)
        if (std::abs(a->locations[i]) > t) s += a->weights[i];
      return s;
    }
    if (t < 0.0) return 1.0;
    return cdf(-t) + (1.0 - cdf(t));
  }

  /// Integral of |x|^alpha against mu; +inf when it diverges.
  [[nodiscard]] double moment(double alpha) const {
    if (const auto* a = atoms()) {
      double s = 0.0;
      for (std::size_t i = 0; i < a->weights.size(); ++i) s += a->weights[i] * std::pow(std::abs(a->locations[i]), alpha);
      return s;
    }
    if (const auto* u = std::get_if<UniformInterval>(&shape_)) {
      auto prim = [alpha](double x) { return std::copysign(std::pow(std::abs(x), alpha + 1.0) / (alpha + 1.0), x); };
      return (prim(u->hi) - prim(u->lo)) / (u->hi - u->lo);
    }
    const auto& p = std::get<ParetoTail>(shape_);
    if (alpha >= p.exponent) return std::numeric_limits<double>::infinity();
    return p.exponent * std::pow(p.scale, alpha) / (p.exponent - alpha);
  }

  [[nodiscard]] std::span<const double> cumulative() const noexcept { return cumulative_; }

 private:
  Shape shape_;
  double alpha_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Density sequences n -> g_n
// ---------------------------------------------------------------------------

/// A rule-defined subset of Z.
struct SiteSet {
  enum class Kind { Explicit, PowersOfTwo, Range, All };
  Kind kind = Kind::Explicit;
  std::vector<std::int64_t> sites;  // sorted, Explicit only
  std::int64_t lo = 0, hi = -1;     // Range only

  static SiteSet explicit_sites(std::vector<std::int64_t> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return {Kind::Explicit, std::move(s), 0, -1};
  }
  /// {+-2^k : k >= 0}.
  static SiteSet powers_of_two() { return {Kind::PowersOfTwo, {}, 0, -1}; }
  static SiteSet range(std::int64_t lo, std::int64_t hi) { return {Kind::Range, {}, lo, hi}; }
  static SiteSet all() { return {Kind::All, {}, 0, -1}; }

  [[nodiscard]] bool contains(std::int64_t n) const {
    switch (kind) {
      case Kind::Explicit: return std::binary_search(sites.begin(), sites.end(), n);
      case Kind::PowersOfTwo: return n != 0 && std::has_single_bit(static_cast<std::uint64_t>(n < 0 ? -n : n));
      case Kind::Range: return n >= lo && n <= hi;
      case Kind::All: return true;
    }
    return false;
  }
};

struct IdentityDensity {};

/// beta: per-atom weights of the perturbed site law on `sites`.
struct AtomRule {
  SiteSet sites;
  std::vector<double> beta;
};

/// Atom reweighting; the first rule whose site set contains n applies, and
/// sites matched by no rule keep mu (g_n = 1).
struct AtomReweight {
  std::vector<AtomRule> rules;
};

/// On `sites`, g_n = height on the lower region R = {x : F_mu(x) <= mass} and
/// the compensating constant (1 - height mu(R)) / (1 - mu(R)) elsewhere.
struct BumpSchedule {
  SiteSet sites;
  double height = 1.0;
  double mass = 0.5;
};

class DensitySequence {
 public:
  using Rule = std::variant<IdentityDensity, AtomReweight, BumpSchedule>;

  /// Identity densities; `base` is kept so samples and tails are available.
  explicit DensitySequence(BaseMeasure base) : DensitySequence(IdentityDensity{}, std::move(base)) {}

  DensitySequence(Rule rule, BaseMeasure base) : rule_(std::move(rule)), base_(std::move(base)) {
    if (auto* rw = std::get_if<AtomReweight>(&rule_)) {
      const auto* a = base_.atoms();
      if (a == nullptr) throw ValidationError("densities: atom_reweight requires an atomic base measure");
      for (const auto& r : rw->rules) {
        if (r.beta.size() != a->weights.size()) throw ValidationError("densities: beta needs one weight per atom");
        double sum = 0.0;
        for (double b : r.beta) {
          if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("densities: beta weights must be non-negative");
          sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("densities: beta weights must sum to 1");
        Piece piece;
        piece.g.resize(r.beta.size());
        piece.cumulative.resize(r.beta.size());
        double c = 0.0;
        for (std::size_t m = 0; m < r.beta.size(); ++m) {
          piece.g[m] = r.beta[m] / a->weights[m];
          piece.sup = std::max(piece.sup, piece.g[m]);
          piece.cumulative[m] = (c += r.beta[m]);
        }
        piece.cumulative.back() = 1.0;
        pieces_.push_back(std::move(piece));
      }
    } else if (auto* bump = std::get_if<BumpSchedule>(&rule_)) {
      if (!(bump->height >= 0.0) || !std::isfinite(bump->height)) throw ValidationError("densities: bump height must be finite and >= 0");
      if (!(bump->mass > 0.0 && bump->mass < 1.0)) throw ValidationError("densities: bump mass must lie in (0, 1)");
      if (const auto* a = base_.atoms()) {
        // Region = atoms whose cumulative weight in location order stays <= mass.
        std::vector<std::size_t> order(a->weights.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a->locations[i] < a->locations[j]; });
        double c = 0.0;
        region_threshold_ = -std::numeric_limits<double>::infinity();
        for (auto i : order) {
          if (c + a->weights[i] > bump->mass + 1e-12) break;
          c += a->weights[i];
          region_threshold_ = a->locations[i];
        }
        region_mass_ = c;
      } else {
        region_threshold_ = base_.quantile(bump->mass);
        region_mass_ = bump->mass;
      }
      if (!(region_mass_ > 0.0 && region_mass_ < 1.0)) throw ValidationError("densities: bump region has no mass under the base measure");
      off_value_ = (1.0 - bump->height * region_mass_) / (1.0 - region_mass_);
      if (off_value_ < -1e-14) throw ValidationError("densities: bump height * mass exceeds 1 (negative density)");
      off_value_ = std::max(off_value_, 0.0);
      bump_sup_ = std::max(bump->height, off_value_);
      if (const auto* a = base_.atoms()) {
        Piece piece;
        piece.g.resize(a->weights.size());
        piece.cumulative.resize(a->weights.size());
        double c = 0.0;
        for (std::size_t m = 0; m < a->weights.size(); ++m) {
          piece.g[m] = in_region(a->locations[m]) ? bump->height : off_value_;
          piece.sup = std::max(piece.sup, piece.g[m]);
          piece.cumulative[m] = (c += a->weights[m] * piece.g[m]);
        }
        for (auto& v : piece.cumulative) v /= c;
        piece.cumulative.back() = 1.0;
        pieces_.push_back(std::move(piece));
      }
    }
  }

  [[nodiscard]] const Rule& rule() const noexcept { return rule_; }
  [[nodiscard]] const BaseMeasure& base() const noexcept { return base_; }
  [[nodiscard]] bool is_identity() const noexcept { return std::holds_alternative<IdentityDensity>(rule_); }

  /// g_n(x); zero off the support of an atomic base.
  [[nodiscard]] double eval(std::int64_t n, double x) const {
    if (base_.is_atomic()) {
      const auto m = base_.atom_index(x);
      if (!m) return 0.0;
      const Piece* p = piece_for(n);
      return p ? p->g[*m] : 1.0;
    }
    if (const auto* bump = std::get_if<BumpSchedule>(&rule_); bump && bump->sites.contains(n))
      return in_region(x) ? bump->height : off_value_;
    return base_.in_support(x) ? 1.0 : 0.0;
  }

  [[nodiscard]] double sup_norm(std::int64_t n) const {
    if (const Piece* p = piece_for(n)) return p->sup;
    if (const auto* bump = std::get_if<BumpSchedule>(&rule_); bump && bump->sites.contains(n)) return bump_sup_;
    return 1.0;
  }

  [[nodiscard]] double log_sup_norm(std::int64_t n) const { return std::log(sup_norm(n)); }

  /// Integral of g_n against mu (1 up to rounding for every valid sequence).
  [[nodiscard]] double normalization(std::int64_t n) const {
    if (const auto* a = base_.atoms()) {
      double s = 0.0;
      for (std::size_t m = 0; m < a->weights.size(); ++m) s += a->weights[m] * eval(n, a->locations[m]);
      return s;
    }
    if (const auto* bump = std::get_if<BumpSchedule>(&rule_); bump && bump->sites.contains(n))
      return bump->height * region_mass_ + off_value_ * (1.0 - region_mass_);
    return 1.0;
  }

  /// P(|V_n| > t) under g_n mu.
  [[nodiscard]] double tail(std::int64_t n, double t) const {
    if (const auto* a = base_.atoms()) {
      double s = 0.0;
      for (std::size_t m = 0; m < a->weights.size(); ++m)
        if (std::abs(a->locations[m]) > t) s += a->weights[m] * eval(n, a->locations[m]);
      return s;
    }
    const double full = base_.tail(t);
    const auto* bump = std::get_if<BumpSchedule>(&rule_);
    if (!bump || !bump->sites.contains(n)) return full;
    // mu(R and |x| > t) with R = (-inf, q].
    const double q = region_threshold_;
    double in_r = base_.cdf(std::min(q, -std::abs(t)));
    if (q > std::abs(t)) in_r += base_.cdf(q) - base_.cdf(std::abs(t));
    return bump->height * in_r + off_value_ * (full - in_r);
  }

  /// One draw from g_n mu. Continuous bases use rejection against mu with
  /// acceptance g_n(x) / ||g_n||, capped at 100 * ceil(||g_n||) proposals.
  double sample(std::int64_t n, Generator& gen) const {
    if (const auto* a = base_.atoms()) {
      const Piece* p = piece_for(n);
      const auto cum = p ? std::span<const double>(p->cumulative) : base_.cumulative();
      return a->locations[BaseMeasure::pick(cum, gen.uniform())];
    }
    const auto* bump = std::get_if<BumpSchedule>(&rule_);
    if (!bump || !bump->sites.contains(n)) return base_.sample(gen);
    const double sup = bump_sup_;
    const auto cap = static_cast<long>(100.0 * std::ceil(sup));
    for (long it = 0; it < cap; ++it) {
      const double x = base_.sample(gen);
      const double g = in_region(x) ? bump->height : off_value_;
      if (gen.uniform() * sup < g) return x;
    }
    throw SamplingError("sample_window: rejection sampler exceeded " + std::to_string(cap) + " proposals at site " +
                        std::to_string(n));
  }

 private:
  struct Piece {
    std::vector<double> g;           // g_n at each atom
    std::vector<double> cumulative;  // cumulative perturbed weights
    double sup = 0.0;
  };

  [[nodiscard]] bool in_region(double x) const { return x <= region_threshold_; }

  [[nodiscard]] const Piece* piece_for(std::int64_t n) const {
    if (const auto* rw = std::get_if<AtomReweight>(&rule_)) {
      for (std::size_t i = 0; i < rw->rules.size(); ++i)
        if (rw->rules[i].sites.contains(n)) return &pieces_[i];
      return nullptr;
    }
    if (const auto* bump = std::get_if<BumpSchedule>(&rule_); bump && !pieces_.empty() && bump->sites.contains(n))
      return &pieces_.front();
    return nullptr;
  }

  Rule rule_;
  BaseMeasure base_;
  std::vector<Piece> pieces_;
  double region_threshold_ = 0.0;
  double region_mass_ = 0.0;
  double off_value_ = 1.0;
  double bump_sup_ = 1.0;
};

// ---------------------------------------------------------------------------
// Product laws and windows
// ---------------------------------------------------------------------------

enum class LawTag { Exact, Approximate };

inline std::string_view law_name(LawTag t) { return t == LawTag::Exact ? "P1" : "P0"; }

/// P1 = mu^Z (Exact) or P0 = (x)_n g_n mu (Approximate).
class ProductLaw {
 public:
  static ProductLaw exact(BaseMeasure base) { return ProductLaw(DensitySequence(std::move(base)), LawTag::Exact); }

  static ProductLaw approximate(DensitySequence densities) {
    return ProductLaw(std::move(densities), LawTag::Approximate);
  }

  ProductLaw(DensitySequence densities, LawTag tag) : densities_(std::move(densities)), tag_(tag) {
    if (tag_ == LawTag::Exact && !densities_.is_identity())
      throw ValidationError("law: the exact law P1 requires identity densities");
  }

  [[nodiscard]] const BaseMeasure& base() const noexcept { return densities_.base(); }
  [[nodiscard]] const DensitySequence& densities() const noexcept { return densities_; }
  [[nodiscard]] LawTag tag() const noexcept { return tag_; }

  /// The exact law with the same base measure.
  [[nodiscard]] ProductLaw exact_counterpart() const { return exact(base()); }

  double sample_site(std::int64_t n, Generator& gen) const { return densities_.sample(n, gen); }

 private:
  DensitySequence densities_;
  LawTag tag_;
};

/// Sampled potential values V_lo, ..., V_hi.
struct PotentialWindow {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::vector<double> values;
  RngStream provenance{};

  PotentialWindow() = default;
  PotentialWindow(std::int64_t lo_, std::vector<double> v, RngStream prov = {})
      : lo(lo_), hi(lo_ + static_cast<std::int64_t>(v.size()) - 1), values(std::move(v)), provenance(prov) {
    for (double x : values)
      if (!std::isfinite(x)) throw ValidationError("window: potential values must be finite");
  }

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] bool empty() const noexcept { return values.empty(); }
  [[nodiscard]] double at(std::int64_t n) const { return values.at(static_cast<std::size_t>(n - lo)); }
  [[nodiscard]] bool contains(std::int64_t n) const noexcept { return n >= lo && n <= hi; }

  /// Sub-window [a, b]; throws if it leaves this window.
  [[nodiscard]] PotentialWindow slice(std::int64_t a, std::int64_t b) const {
    if (a > b || !contains(a) || !contains(b)) throw std::out_of_range("window: slice outside sampled range");
    return PotentialWindow(a, std::vector<double>(values.begin() + (a - lo), values.begin() + (b - lo + 1)), provenance);
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Independent draws V_n ~ g_n mu for n = lo..hi, in site order from one stream.
inline PotentialWindow sample_window(const ProductLaw& law, std::int64_t lo, std::int64_t hi, RngStream stream) {
  if (lo > hi) throw std::invalid_argument("sample_window: lo > hi");
  auto gen = stream.generator();
  std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t n = lo; n <= hi; ++n) v[static_cast<std::size_t>(n - lo)] = law.sample_site(n, gen);
  PotentialWindow w;
  w.lo = lo;
  w.hi = hi;
  w.values = std::move(v);
  w.provenance = stream;
  return w;
}

/// log H = sum_n log g_n(V_n) over the window; -inf when some factor is zero.
inline double radon_nikodym_product(const ProductLaw& law, const PotentialWindow& window) {
  double s = 0.0;
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    const double x = window.at(n);
    if (!law.base().in_support(x)) throw std::invalid_argument("radon_nikodym_product: value outside supp mu at site " + std::to_string(n));
    const double g = law.densities().eval(n, x);
    if (g == 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log(g);
  }
  return s;
}

/// (1/N) * sum_{n = k-N}^{k+N} log ||g_n||.
inline double sup_norm_log_partials(const DensitySequence& seq, std::int64_t N, std::int64_t centered_at = 0) {
  if (N < 1) throw std::invalid_argument("sup_norm_log_partials: N must be >= 1");
  double s = 0.0;
  for (std::int64_t n = centered_at - N; n <= centered_at + N; ++n) s += seq.log_sup_norm(n);
  return s / static_cast<double>(N);
}

// ---------------------------------------------------------------------------
// Convergence-condition diagnostics
// ---------------------------------------------------------------------------

enum class Verdict { Holds, Violated, Inconclusive };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConditionTrajectory {
  std::string name;
  std::vector<std::int64_t> N;
  std::vector<double> values;
  double tested_value = 0.0;  // what is compared against the tolerance
  double slope = 0.0;         // least squares vs log N over the last decade
  Verdict raw = Verdict::Inconclusive;
  Verdict verdict = Verdict::Inconclusive;
};

struct ConditionReport {
  static constexpr double kTolerance = 0.05;
  ConditionTrajectory logmom;      // (1/N) sum_{|n|<=N} log||g_n||
  ConditionTrajectory logmomunif;  // (1/N) sup_{|k|<=K} sum_{|n-k|<=N} log||g_n||
  ConditionTrajectory logsum;      // sum_{|n|<=N} log||g_n||
};

namespace detail {

inline std::vector<std::int64_t> log_grid(std::int64_t n_max, int per_decade = 20) {
  std::vector<std::int64_t> g;
  for (int i = 0;; ++i) {
    const double v = std::pow(10.0, static_cast<double>(i) / per_decade);
    const auto n = static_cast<std::int64_t>(std::llround(v));
    if (n >= n_max) break;
    if (g.empty() || g.back() != n) g.push_back(n);
  }
  g.push_back(n_max);
  return g;
}

inline void judge(ConditionTrajectory& t, double tested, std::int64_t n_max) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.N.size(); ++i) {
    if (10 * t.N[i] >= n_max || t.N.size() < 4) {
      x.push_back(std::log(static_cast<double>(t.N[i])));
      y.push_back(t.values[i]);
    }
  }
  t.slope = x.size() >= 2 ? stats::least_squares(x, y).slope : 0.0;
  double scale = 1.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  const double flat = 1e-9 * scale;
  t.tested_value = tested;
  const double tol = ConditionReport::kTolerance;
  if (tested <= tol && t.slope <= flat) {
    t.raw = Verdict::Holds;
  } else if (tested > tol && tested + std::min(t.slope, 0.0) * std::log(10.0) > tol) {
    // Still above tolerance after one more decade at the current slope.
    t.raw = Verdict::Violated;
  } else {
    t.raw = Verdict::Inconclusive;
  }
  t.verdict = t.raw;
}

}  // namespace detail

/// Numeric trajectories of the three summability conditions plus finite-N
/// verdicts. The raw verdicts are reconciled with the logical order
/// logsum => logmomunif => logmom: a stronger condition that holds makes the
/// weaker ones hold, and a weaker one that fails makes the stronger ones fail.
inline ConditionReport condition_report(const DensitySequence& seq, std::int64_t N_max, std::int64_t K_max) {
  if (N_max < 1 || K_max < 0) throw std::invalid_argument("condition_report: need N_max >= 1 and K_max >= 0");
  const std::int64_t reach = N_max + K_max;
  // prefix[i] = sum of log||g_n|| for n in [-reach, -reach + i).
  std::vector<double> prefix(static_cast<std::size_t>(2 * reach + 2), 0.0);
  for (std::int64_t n = -reach; n <= reach; ++n) {
    const auto i = static_cast<std::size_t>(n + reach);
    prefix[i + 1] = prefix[i] + seq.log_sup_norm(n);
  }
  auto window_sum = [&](std::int64_t a, std::int64_t b) {
    return prefix[static_cast<std::size_t>(b + reach + 1)] - prefix[static_cast<std::size_t>(a + reach)];
  };

  ConditionReport r;
  r.logmom.name = "logmom";
  r.logmomunif.name = "logmomunif";
  r.logsum.name = "logsum";
  const auto grid = detail::log_grid(N_max);
  for (auto N : grid) {
    const double centred = window_sum(-N, N);
    double best = centred;
    for (std::int64_t k = -K_max; k <= K_max; ++k) best = std::max(best, window_sum(k - N, k + N));
    r.logmom.N.push_back(N);
    r.logmom.values.push_back(centred / static_cast<double>(N));
    r.logmomunif.N.push_back(N);
    r.logmomunif.values.push_back(best / static_cast<double>(N));
    r.logsum.N.push_back(N);
    r.logsum.values.push_back(centred);
  }
  detail::judge(r.logmom, r.logmom.values.back(), N_max);
  detail::judge(r.logmomunif, r.logmomunif.values.back(), N_max);
  // For the series, the tested quantity is the growth over the last decade.
  const double tail_growth = window_sum(-N_max, N_max) - window_sum(-(N_max / 10), N_max / 10);
  detail::judge(r.logsum, tail_growth, N_max);

  auto& a = r.logsum.verdict;
  auto& b = r.logmomunif.verdict;
  auto& c = r.logmom.verdict;
  if (a == Verdict::Holds) b = Verdict::Holds;
  if (b == Verdict::Holds) c = Verdict::Holds;
  if (c == Verdict::Violated) b = Verdict::Violated;
  if (b == Verdict::Violated) a = Verdict::Violated;
  return r;
}

}  // namespace anderson_lab
