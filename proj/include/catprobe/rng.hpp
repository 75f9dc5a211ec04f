#ifndef CATPROBE_RNG_HPP
#define CATPROBE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace catprobe {

// Seeded Gaussian stream. Box-Muller on top of mt19937_64 so the produced
// sequence is fixed by the seed alone, independent of the standard library's
// distribution implementation. Trajectory k of a batch uses seed base+k, so
// batch size never affects an individual stream.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    // 53-bit mantissa, in [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Wiener increment over dt.
  double wiener(double dt) { return normal() * std::sqrt(dt); }

  // Draw an index from unnormalized nonnegative weights.
  std::size_t pick(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      x -= weights[i];
      if (x <= 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace catprobe

#endif
