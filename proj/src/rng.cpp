#include "typlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace typlab {

cplx RandomStream::complex_normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace typlab
