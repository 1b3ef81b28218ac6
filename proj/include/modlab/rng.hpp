#ifndef MODLAB_RNG_HPP
#define MODLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace modlab {

// Deterministic splitmix64 stream. Everything random in the library draws
// from one of these so that a run is a pure function of its seed, independent
// of platform or standard-library distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // uniform integer in [0, n)
  std::int64_t next_index(std::int64_t n) {
    return static_cast<std::int64_t>(next_double() * static_cast<double>(n)) % n;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double(), u2 = next_double();
    while (u1 <= std::numeric_limits<double>::min()) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Independent child stream; fork(k) depends only on the original seed and k,
  // so parallel consumers stay reproducible no matter who draws first.
  Rng fork(std::uint64_t stream) const {
    Rng r(base_ ^ (0xA0761D6478BD642FULL * (stream + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t base_;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace modlab

#endif  // MODLAB_RNG_HPP
