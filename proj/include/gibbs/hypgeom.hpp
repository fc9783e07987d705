#ifndef GIBBS_HYPGEOM_HPP
#define GIBBS_HYPGEOM_HPP

#include <complex>
#include <utility>
#include <vector>

#include "gibbs/errors.hpp"

// Hyperbolic plane geometry in the Poincare disc model, curvature -1.
// User-facing isometries are given as determinant-1 real 2x2 matrices acting
// on the upper half-plane; they are conjugated to SU(1,1) by the Cayley
// transform on input. All closed-form expressions below are exact in the
// disc model; no ray truncation is involved at this layer.

namespace gibbs {

using cplx = std::complex<double>;

inline constexpr double kBoundaryGuard = 1e-14;  // |z| < 1 - kBoundaryGuard
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

struct Point {
  cplx z{0.0, 0.0};

  Point() = default;
  explicit Point(cplx zz) : z(zz) {}
  Point(double re, double im) : z(re, im) {}
};

// Throws GuardViolation if p is outside the guard disc.
void check_guard(const Point& p);

struct BoundaryPoint {
  double theta = 0.0;  // normalized to [0, 2pi)

  BoundaryPoint() = default;
  explicit BoundaryPoint(double th);
  cplx unit() const { return {std::cos(theta), std::sin(theta)}; }
  static BoundaryPoint from_unit(cplx u);
};

double angle_normalize(double theta);             // into [0, 2pi)
double angle_dist(double a, double b);            // circle distance, <= pi

// Unit tangent vector in Hopf coordinates (xi_minus, xi_plus, t) where t is
// the signed arclength from the closest point to the declared base point
// (the disc origin) along the oriented geodesic.
struct UnitTangent {
  BoundaryPoint xi_minus;
  BoundaryPoint xi_plus;
  double t = 0.0;
};

class Isometry {
 public:
  Isometry() : a_(1.0, 0.0), b_(0.0, 0.0) {}  // identity

  // Half-plane convention, row-major [[m00, m01], [m10, m11]], det must be 1
  // to within 1e-12.
  static Isometry from_half_plane(double m00, double m01, double m10,
                                  double m11);
  // Direct SU(1,1) data (|a|^2 - |b|^2 = 1); internal use and tests.
  static Isometry from_su11(cplx a, cplx b);

  Isometry inverse() const { return Isometry(std::conj(a_), -b_); }
  Isometry operator*(const Isometry& o) const;

  Point apply(const Point& p) const;
  BoundaryPoint apply(const BoundaryPoint& xi) const;
  UnitTangent apply(const UnitTangent& v) const;

  cplx su_a() const { return a_; }
  cplx su_b() const { return b_; }
  double trace() const { return 2.0 * a_.real(); }  // equals half-plane trace
  bool is_loxodromic() const { return std::abs(trace()) > 2.0; }
  // Frobenius distance to another isometry (as SU(1,1) matrices).
  double matrix_dist(const Isometry& o) const;

 private:
  Isometry(cplx a, cplx b) : a_(a), b_(b) {}
  // z -> (a z + b) / (conj(b) z + conj(a)), |a|^2 - |b|^2 = 1.
  cplx a_, b_;
};

// Finite union of half-open angular intervals [a, b) on the boundary circle.
struct ArcInterval {
  double a = 0.0;  // start angle in [0, 2pi)
  double len = 0.0;  // length in (0, 2pi]
};

class BoundaryArcSet {
 public:
  BoundaryArcSet() = default;
  static BoundaryArcSet full_circle();
  static BoundaryArcSet single(double start, double len);

  void add(double start, double len);
  void normalize();  // sort and merge; throws InvalidDiscs on measure > 2pi
  bool contains(const BoundaryPoint& xi) const;
  double measure() const;
  bool empty() const { return arcs_.empty(); }
  BoundaryArcSet complement() const;
  const std::vector<ArcInterval>& arcs() const { return arcs_; }

 private:
  std::vector<ArcInterval> arcs_;
};

// --- distances and cocycles (closed forms) ---

double dist(const Point& p, const Point& q);

// d(x, g y) computed from the group element's matrix entries; carries full
// relative precision even when g y is exponentially close to the boundary
// (point coordinates lose the radial information there).
double displacement(const Point& x, const Isometry& g, const Point& y);

// beta_xi(x, y) = lim_t d(x, xi_t) - d(y, xi_t).
double busemann(const BoundaryPoint& xi, const Point& x, const Point& y);

// Gromov-Bourdon visual distance seen from x.
double visual_dist(const Point& x, const BoundaryPoint& xi,
                   const BoundaryPoint& eta);

// Shadow of the closed ball B(center, r) seen from x; a single arc.
BoundaryArcSet shadow(const Point& x, const Point& center, double r);

// Arclength parametrization of the geodesic line (xi_minus -> xi_plus);
// s = 0 at the closest point to `base`.
Point geodesic_eval(const BoundaryPoint& xi_minus, const BoundaryPoint& xi_plus,
                    double s, const Point& base);

// Parameter of the projection of p... given p ON the line, returns its
// arclength parameter in the same normalization as geodesic_eval. For p off
// the line, returns the parameter of the closest point on the line.
double geodesic_param(const BoundaryPoint& xi_minus,
                      const BoundaryPoint& xi_plus, const Point& p,
                      const Point& base);

// Distance from p to the full geodesic line (xi_minus, xi_plus).
double dist_to_line(const Point& p, const BoundaryPoint& xi_minus,
                    const BoundaryPoint& xi_plus);

// Endpoint at infinity of the ray from `from` through `through`.
BoundaryPoint ray_endpoint(const Point& from, const Point& through);

// Ideal endpoints of the oriented line through x then y.
std::pair<BoundaryPoint, BoundaryPoint> line_through(const Point& x,
                                                     const Point& y);

// --- unit tangent bundle ---

UnitTangent flow(const UnitTangent& v, double s);   // geodesic flow
UnitTangent flip(const UnitTangent& v);             // v -> -v
Point base_point(const UnitTangent& v);             // pi(v)
// (foot point, direction angle of the tangent vector in disc coordinates)
std::pair<Point, double> to_base_form(const UnitTangent& v);
UnitTangent from_base_form(const Point& p, double direction_angle);
// Unit tangent at x pointing towards y (x != y).
UnitTangent tangent_towards(const Point& x, const Point& y);
// Unit tangent at x pointing towards the boundary point xi.
UnitTangent ray_toward(const Point& x, const BoundaryPoint& xi);

// d'(v, w) = max{ d(pi v, pi w), d(pi phi_-1 v, pi phi_-1 w) }.
double d_prime(const UnitTangent& v, const UnitTangent& w);

// Hamenstadt distance on the strong unstable leaf of w; v and v2 must share
// xi_minus with w and lie on the same horosphere (checked to `leaf_tol`).
double hamenstadt_dist(const UnitTangent& w, const UnitTangent& v,
                       const UnitTangent& v2, double leaf_tol = 1e-8);

// Point of the strong unstable leaf of v with forward endpoint xi
// (xi != v.xi_minus): same horosphere centred at v.xi_minus.
UnitTangent su_leaf_point(const UnitTangent& v, const BoundaryPoint& xi);

// Hyperbolic ball B(center, r) as a Euclidean disc in the model.
struct EuclideanDisc {
  cplx center;
  double radius = 0.0;
  bool contains(cplx z) const { return std::abs(z - center) <= radius; }
};
EuclideanDisc ball_to_euclidean(const Point& center, double r);

}  // namespace gibbs

#endif  // GIBBS_HYPGEOM_HPP
