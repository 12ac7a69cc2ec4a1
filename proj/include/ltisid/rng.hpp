#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ltisid {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for worker `stream` under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xd1342543de82ef95ULL + 1));
}

// Deterministic scalar source. Uniforms and Gaussians are built from raw
// 64-bit draws so the stream does not depend on standard-library
// distribution internals, only on mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the spare draw is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Unbiased draw from [0, n) via rejection.
  std::uint64_t bounded(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// In-place Fisher-Yates; the permutation depends only on the Rng state.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

// FNV-1a (64 bit) over raw bytes; fingerprints systems, datasets, configs.
class Fingerprint {
 public:
  Fingerprint& bytes(const void* data, std::size_t n);
  Fingerprint& add(double v);
  Fingerprint& add(std::uint64_t v);
  Fingerprint& add(int v) { return add(static_cast<std::uint64_t>(v)); }
  Fingerprint& add(bool v) { return add(static_cast<std::uint64_t>(v)); }
  Fingerprint& add(const std::string& s);
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace ltisid
