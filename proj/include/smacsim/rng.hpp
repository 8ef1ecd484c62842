#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace smacsim {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent per-episode streams. Each consumer draws from its own stream so
// that, e.g., EPO draws never perturb engine or policy randomness.
enum class Stream : std::uint64_t {
  scenario = 1,
  engine = 2,
  epo = 3,
  policy = 4,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
}

// Seed of the i-th episode of a batch started from `base`.
constexpr std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) + index);
}

// mt19937_64 with hand-rolled conversions: the standard distributions are
// implementation-defined, and replays must be bit-exact across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Always consumes exactly one draw, including for p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace smacsim
