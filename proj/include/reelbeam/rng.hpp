#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "reelbeam/types.hpp"

namespace reelbeam {

// Seeded generator with a fixed Gaussian recipe (Box-Muller on top of
// mt19937_64) so streams are reproducible independent of the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  // CN(0, 1): independent real and imaginary parts with variance 1/2.
  cscalar complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cscalar(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  ComplexMatrix complex_gaussian_vector(std::size_t n) {
    ComplexMatrix v(n, 1);
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = complex_gaussian();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace reelbeam
