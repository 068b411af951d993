#ifndef HIB_RANDOM_HPP
#define HIB_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace hib {

/// 64-bit Mersenne Twister with variate transforms written out here rather
/// than taken from <random>, whose distributions are implementation-defined.
/// Streams are therefore identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Integer uniform on [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Chi-square with integer degrees of freedom, as a sum of squares.
  double chi_square(int dof) {
    double sum = 0;
    for (int i = 0; i < dof; ++i) {
      const double g = normal();
      sum += g * g;
    }
    return sum;
  }

  /// Student t with integer degrees of freedom.
  double student_t(int dof) { return normal() / std::sqrt(chi_square(dof) / dof); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

/// Seed for stream `index` of a master seed (splitmix64 finalizer), so that
/// replicate i sees the same numbers however the work is scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hib

#endif  // HIB_RANDOM_HPP
