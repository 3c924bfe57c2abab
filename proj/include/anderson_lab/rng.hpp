#pragma once

#include <atomic>
#include <cstdint>
#include <random>

namespace anderson_lab {

/// Number of random draws made by every Generator in the process so far.
/// Instrumentation only: tests use it to prove that a code path never touched
/// the RNG (e.g. config validation failures).
inline std::atomic<std::uint64_t> g_rng_draws{0};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Generator;

/// Identifies an independent random stream: a master seed plus a stream id.
/// Child streams are derived deterministically, so any sample index maps to
/// the same stream regardless of how work is split between threads.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t id = 0;

  [[nodiscard]] constexpr RngStream child(std::uint64_t index) const noexcept {
    return {seed, splitmix64(id ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
  }

  [[nodiscard]] Generator generator() const;
};

/// Owns the engine for one stream. Not shareable between threads.
class Generator {
 public:
  explicit Generator(RngStream s)
      : engine_(splitmix64(s.seed) ^ splitmix64(splitmix64(s.id) + s.seed)) {}

  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
  Generator(Generator&& o) noexcept : engine_(o.engine_), draws_(o.draws_) { o.draws_ = 0; }
  Generator& operator=(Generator&&) = delete;

  ~Generator() {
    if (draws_ != 0) g_rng_draws.fetch_add(draws_, std::memory_order_relaxed);
  }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_left() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

inline Generator RngStream::generator() const { return Generator(*this); }

/// Stream tags keep the independent sample families of one experiment apart.
namespace stream_tag {
inline constexpr std::uint64_t kLyapunov = 0x4c59415055ULL;
inline constexpr std::uint64_t kTailsExact = 0x5441494c31ULL;
inline constexpr std::uint64_t kTailsApprox = 0x5441494c30ULL;
inline constexpr std::uint64_t kWindow = 0x57494e444fULL;
inline constexpr std::uint64_t kEdge = 0x45444745ULL;
inline constexpr std::uint64_t kCylinder = 0x43594c49ULL;
}  // namespace stream_tag

}  // namespace anderson_lab
