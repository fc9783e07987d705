#ifndef GIBBS_TESTS_FIXTURES_HPP
#define GIBBS_TESTS_FIXTURES_HPP

#include <cmath>

#include "gibbs/schottky.hpp"

namespace gibbs::fixtures {

// Symmetric two-generator Schottky group: g1 translates along the real
// diameter of the disc by length t, g2 is its conjugate by a quarter turn
// (axis along the imaginary diameter). The four pairing discs sit at angles
// 0, pi, pi/2, 3pi/2 and are disjoint for t > 2 atanh(cos(pi/4)) ~ 1.7627.
inline SchottkyGroup two_generator(double t = 2.4) {
  double tau = 0.5 * t;
  Isometry g1 = Isometry::from_half_plane(std::exp(tau), 0.0, 0.0,
                                          std::exp(-tau));
  double c = std::cos(kPi / 4.0), s = std::sin(kPi / 4.0);
  Isometry r = Isometry::from_half_plane(c, s, -s, c);
  Isometry g2 = r * g1 * r.inverse();
  return SchottkyGroup({g1, g2});
}

// Cyclic group generated by one hyperbolic translation of length t.
inline SchottkyGroup cyclic(double t = 2.0 * std::log(2.0)) {
  double tau = 0.5 * t;
  Isometry g = Isometry::from_half_plane(std::exp(tau), 0.0, 0.0,
                                         std::exp(-tau));
  return SchottkyGroup({g});
}

}  // namespace gibbs::fixtures

#endif  // GIBBS_TESTS_FIXTURES_HPP
