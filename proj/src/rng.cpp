#include "mincomp/rng.hpp"

#include <cmath>

namespace mincomp {

double Rng::normal() {
  const double u1 = uniform_open01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return radius * std::cos(2.0 * M_PI * u2);
}

}  // namespace mincomp
