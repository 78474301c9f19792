#include "tacgraph/rng.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace tacgraph {

double Rng::normal() {
  // Box-Muller; guard the log against an exact zero draw.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::Quaterniond Rng::random_rotation() {
  const double u1 = uniform();
  const double u2 = uniform();
  const double u3 = uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Eigen::Quaterniond(a * std::sin(2.0 * M_PI * u2),
                            a * std::cos(2.0 * M_PI * u2),
                            b * std::sin(2.0 * M_PI * u3),
                            b * std::cos(2.0 * M_PI * u3));
}

}  // namespace tacgraph
