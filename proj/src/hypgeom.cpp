#include "gibbs/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gibbs {

namespace {

// Complex Mobius map z -> (a z + b) / (c z + d), general coefficients.
struct Mobius22 {
  cplx a, b, c, d;

  cplx apply(cplx z) const { return (a * z + b) / (c * z + d); }
  Mobius22 inverse() const { return {d, -b, -c, a}; }
};

// Disc automorphism T_p(z) = (z - p) / (1 - conj(p) z), sends p to 0.
cplx disc_translate(cplx p, cplx z) { return (z - p) / (1.0 - std::conj(p) * z); }
cplx disc_translate_inv(cplx p, cplx w) { return (w + p) / (1.0 + std::conj(p) * w); }

// Mobius map sending the unit disc to the upper half-plane with u -> 0 and
// v -> infinity, so the geodesic (u, v) becomes the positive imaginary axis.
Mobius22 line_to_halfplane(cplx u, cplx v) {
  cplx w0 = -u;
  if (std::abs(w0 - v) < 1e-9) w0 = cplx(0.0, 1.0) * u;
  cplx kappa = (w0 - v) / (w0 - u);
  Mobius22 m{kappa, -kappa * u, cplx(1.0, 0.0), -v};
  if (m.apply(cplx(0.0, 0.0)).imag() <= 0.0) {
    m.a = -m.a;
    m.b = -m.b;
  }
  return m;
}

}  // namespace

void check_guard(const Point& p) {
  if (std::abs(p.z) >= 1.0 - kBoundaryGuard) {
    std::ostringstream os;
    os << "point (" << p.z.real() << ", " << p.z.imag()
       << ") violates the boundary guard";
    throw GuardViolation(os.str());
  }
}

double angle_normalize(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double angle_dist(double a, double b) {
  double d = std::fabs(angle_normalize(a) - angle_normalize(b));
  return std::min(d, kTwoPi - d);
}

BoundaryPoint::BoundaryPoint(double th) : theta(angle_normalize(th)) {}

BoundaryPoint BoundaryPoint::from_unit(cplx u) {
  return BoundaryPoint(std::atan2(u.imag(), u.real()));
}

// --- Isometry ---

Isometry Isometry::from_half_plane(double m00, double m01, double m10,
                                   double m11) {
  double det = m00 * m11 - m01 * m10;
  if (std::abs(det - 1.0) >= 1e-12) {
    std::ostringstream os;
    os << "matrix determinant " << det << " != 1";
    throw Error(os.str());
  }
  // Cayley conjugation of [[m00,m01],[m10,m11]] into SU(1,1).
  cplx a(0.5 * (m00 + m11), 0.5 * (m01 - m10));
  cplx b(0.5 * (m00 - m11), -0.5 * (m01 + m10));
  return Isometry(a, b);
}

Isometry Isometry::from_su11(cplx a, cplx b) {
  double det = std::norm(a) - std::norm(b);
  if (std::abs(det - 1.0) >= 1e-10) throw Error("not an SU(1,1) matrix");
  return Isometry(a, b);
}

Isometry Isometry::operator*(const Isometry& o) const {
  // [[a,b],[conj b, conj a]] * [[o.a, o.b],[conj o.b, conj o.a]]
  return Isometry(a_ * o.a_ + b_ * std::conj(o.b_),
                  a_ * o.b_ + b_ * std::conj(o.a_));
}

Point Isometry::apply(const Point& p) const {
  cplx num = a_ * p.z + b_;
  cplx den = std::conj(b_) * p.z + std::conj(a_);
  Point out(num / den);
  check_guard(out);
  return out;
}

BoundaryPoint Isometry::apply(const BoundaryPoint& xi) const {
  cplx u = xi.unit();
  cplx w = (a_ * u + b_) / (std::conj(b_) * u + std::conj(a_));
  return BoundaryPoint::from_unit(w / std::abs(w));
}

double Isometry::matrix_dist(const Isometry& o) const {
  double d2 = 2.0 * std::norm(a_ - o.a_) + 2.0 * std::norm(b_ - o.b_);
  return std::sqrt(d2);
}

// --- distances ---

double dist(const Point& p, const Point& q) {
  check_guard(p);
  check_guard(q);
  double num = std::abs(p.z - q.z);
  double den = std::abs(1.0 - std::conj(p.z) * q.z);
  double x = num / den;
  if (x < 0.5) return 2.0 * std::atanh(x);
  // log form, with the difference of squares expanded exactly
  double a2 = (1.0 - std::norm(p.z)) * (1.0 - std::norm(q.z));
  return 2.0 * std::log(num + den) - std::log(a2);
}

double displacement(const Point& x, const Isometry& g, const Point& y) {
  check_guard(x);
  check_guard(y);
  // M = T_x * g * T_y^{-1} maps 0 to T_x(g y); for det-1 SU(1,1) data,
  // d(0, M 0) = 2 ln(|a| + |b|) with no boundary cancellation
  double sx = std::sqrt(1.0 - std::norm(x.z));
  double sy = std::sqrt(1.0 - std::norm(y.z));
  cplx ta = 1.0 / sx, tb = -x.z / sx;          // T_x
  cplx ua = 1.0 / sy, ub = y.z / sy;           // T_y^{-1}
  cplx ga = g.su_a(), gb = g.su_b();
  // T_x * g
  cplx pa = ta * ga + tb * std::conj(gb);
  cplx pb = ta * gb + tb * std::conj(ga);
  // (T_x g) * T_y^{-1}
  cplx ma = pa * ua + pb * std::conj(ub);
  cplx mb = pa * ub + pb * std::conj(ua);
  return 2.0 * std::log(std::abs(ma) + std::abs(mb));
}

double busemann(const BoundaryPoint& xi, const Point& x, const Point& y) {
  check_guard(x);
  check_guard(y);
  cplx u = xi.unit();
  double bx = std::log(std::norm(u - x.z) / (1.0 - std::norm(x.z)));
  double by = std::log(std::norm(u - y.z) / (1.0 - std::norm(y.z)));
  return bx - by;
}

double visual_dist(const Point& x, const BoundaryPoint& xi,
                   const BoundaryPoint& eta) {
  check_guard(x);
  cplx u = xi.unit(), v = eta.unit();
  double num = std::abs(u - v) * (1.0 - std::norm(x.z));
  double den = 2.0 * std::abs(u - x.z) * std::abs(v - x.z);
  return num / den;
}

// --- balls, shadows, arcs ---

EuclideanDisc ball_to_euclidean(const Point& center, double r) {
  check_guard(center);
  double rho = std::tanh(0.5 * r);
  double c2 = std::norm(center.z);
  double den = 1.0 - rho * rho * c2;
  EuclideanDisc d;
  d.center = center.z * (1.0 - rho * rho) / den;
  d.radius = rho * (1.0 - c2) / den;
  return d;
}

BoundaryArcSet BoundaryArcSet::full_circle() {
  BoundaryArcSet s;
  s.arcs_.push_back({0.0, kTwoPi});
  return s;
}

BoundaryArcSet BoundaryArcSet::single(double start, double len) {
  BoundaryArcSet s;
  s.add(start, len);
  return s;
}

void BoundaryArcSet::add(double start, double len) {
  if (len <= 0.0) return;
  if (len >= kTwoPi) {
    arcs_.clear();
    arcs_.push_back({0.0, kTwoPi});
    return;
  }
  arcs_.push_back({angle_normalize(start), len});
  normalize();
}

void BoundaryArcSet::normalize() {
  if (arcs_.empty()) return;
  if (arcs_.size() == 1 && arcs_[0].len >= kTwoPi) {
    arcs_[0] = {0.0, kTwoPi};
    return;
  }
  // unroll arcs crossing 0
  std::vector<std::pair<double, double>> iv;  // [lo, hi) on the real line
  for (const auto& a : arcs_) {
    if (a.len >= kTwoPi) {
      arcs_.clear();
      arcs_.push_back({0.0, kTwoPi});
      return;
    }
    iv.emplace_back(a.a, a.a + a.len);
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (auto& p : iv) {
    if (!merged.empty() && p.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, p.second);
    else
      merged.push_back(p);
  }
  // wrap-around merge: an interval reaching past 2pi overlaps low intervals
  while (merged.size() > 1 && merged.back().second >= kTwoPi &&
         merged.front().first + kTwoPi <= merged.back().second) {
    merged.back().second =
        std::max(merged.back().second, merged.front().second + kTwoPi);
    merged.erase(merged.begin());
  }
  arcs_.clear();
  double total = 0.0;
  for (auto& p : merged) {
    double len = p.second - p.first;
    total += len;
    if (total >= kTwoPi - 1e-15) {
      arcs_.clear();
      arcs_.push_back({0.0, kTwoPi});
      return;
    }
    arcs_.push_back({angle_normalize(p.first), len});
  }
}

bool BoundaryArcSet::contains(const BoundaryPoint& xi) const {
  for (const auto& a : arcs_) {
    double off = angle_normalize(xi.theta - a.a);
    if (off < a.len) return true;
  }
  return false;
}

double BoundaryArcSet::measure() const {
  double m = 0.0;
  for (const auto& a : arcs_) m += a.len;
  return std::min(m, kTwoPi);
}

BoundaryArcSet BoundaryArcSet::complement() const {
  BoundaryArcSet out;
  if (arcs_.empty()) return full_circle();
  if (arcs_.size() == 1 && arcs_[0].len >= kTwoPi) return out;
  // arcs_ is sorted and disjoint after normalize(); walk the gaps
  std::vector<ArcInterval> sorted = arcs_;
  std::sort(sorted.begin(), sorted.end(),
            [](const ArcInterval& x, const ArcInterval& y) { return x.a < y.a; });
  for (size_t i = 0; i < sorted.size(); ++i) {
    double end_i = sorted[i].a + sorted[i].len;
    double next = (i + 1 < sorted.size()) ? sorted[i + 1].a : sorted[0].a + kTwoPi;
    double gap = next - end_i;
    if (gap > 0.0) out.arcs_.push_back({angle_normalize(end_i), gap});
  }
  return out;
}

BoundaryArcSet shadow(const Point& x, const Point& center, double r) {
  if (r <= 0.0) throw Error("shadow radius must be positive");
  if (dist(x, center) <= r) {
    throw XInsideBall("viewpoint inside the closed ball");
  }
  // translate x to the origin; rays become Euclidean radii
  cplx c_moved = disc_translate(x.z, center.z);
  EuclideanDisc d = ball_to_euclidean(Point(c_moved), r);
  double cc = std::abs(d.center);
  if (cc <= d.radius) throw XInsideBall("viewpoint inside the closed ball");
  double half = std::asin(std::min(1.0, d.radius / cc));
  double phi = std::atan2(d.center.imag(), d.center.real());
  // map the arc endpoints back (orientation preserving on the circle)
  cplx e1 = disc_translate_inv(x.z, std::polar(1.0, phi - half));
  cplx e2 = disc_translate_inv(x.z, std::polar(1.0, phi + half));
  double a1 = std::atan2(e1.imag(), e1.real());
  double a2 = std::atan2(e2.imag(), e2.real());
  double len = angle_normalize(a2 - a1);
  if (len == 0.0) len = kTwoPi;  // antipodal degenerate; not reachable for r>0
  return BoundaryArcSet::single(a1, len);
}

// --- geodesics ---

Point geodesic_eval(const BoundaryPoint& xi_minus, const BoundaryPoint& xi_plus,
                    double s, const Point& base) {
  if (angle_dist(xi_minus.theta, xi_plus.theta) < 1e-14)
    throw CoincidentEndpoints("geodesic endpoints coincide");
  check_guard(base);
  Mobius22 m = line_to_halfplane(xi_minus.unit(), xi_plus.unit());
  cplx w = m.apply(base.z);
  double r0 = std::abs(w);
  cplx p = cplx(0.0, 1.0) * (r0 * std::exp(s));
  Point out(m.inverse().apply(p));
  check_guard(out);
  return out;
}

double geodesic_param(const BoundaryPoint& xi_minus,
                      const BoundaryPoint& xi_plus, const Point& p,
                      const Point& base) {
  if (angle_dist(xi_minus.theta, xi_plus.theta) < 1e-14)
    throw CoincidentEndpoints("geodesic endpoints coincide");
  Mobius22 m = line_to_halfplane(xi_minus.unit(), xi_plus.unit());
  double r0 = std::abs(m.apply(base.z));
  double rp = std::abs(m.apply(p.z));
  return std::log(rp / r0);
}

double dist_to_line(const Point& p, const BoundaryPoint& xi_minus,
                    const BoundaryPoint& xi_plus) {
  Mobius22 m = line_to_halfplane(xi_minus.unit(), xi_plus.unit());
  cplx w = m.apply(p.z);
  double y = w.imag();
  if (y <= 0.0) throw GuardViolation("point mapped outside the half-plane");
  return std::acosh(std::max(1.0, std::abs(w) / y));
}

BoundaryPoint ray_endpoint(const Point& from, const Point& through) {
  check_guard(from);
  check_guard(through);
  cplx w = disc_translate(from.z, through.z);
  double aw = std::abs(w);
  if (aw < 1e-15) throw CoincidentPoints("ray through coincident points");
  cplx u = disc_translate_inv(from.z, w / aw);
  return BoundaryPoint::from_unit(u / std::abs(u));
}

std::pair<BoundaryPoint, BoundaryPoint> line_through(const Point& x,
                                                     const Point& y) {
  check_guard(x);
  check_guard(y);
  cplx w = disc_translate(x.z, y.z);
  double aw = std::abs(w);
  if (aw < 1e-15) throw CoincidentPoints("line through coincident points");
  cplx up = disc_translate_inv(x.z, w / aw);
  cplx um = disc_translate_inv(x.z, -w / aw);
  return {BoundaryPoint::from_unit(um / std::abs(um)),
          BoundaryPoint::from_unit(up / std::abs(up))};
}

// --- unit tangent bundle ---

UnitTangent flow(const UnitTangent& v, double s) {
  UnitTangent w = v;
  w.t += s;
  return w;
}

UnitTangent flip(const UnitTangent& v) {
  return {v.xi_plus, v.xi_minus, -v.t};
}

Point base_point(const UnitTangent& v) {
  return geodesic_eval(v.xi_minus, v.xi_plus, v.t, Point());
}

std::pair<Point, double> to_base_form(const UnitTangent& v) {
  Point p = base_point(v);
  cplx fwd = disc_translate(p.z, v.xi_plus.unit());
  return {p, std::atan2(fwd.imag(), fwd.real())};
}

UnitTangent from_base_form(const Point& p, double direction_angle) {
  check_guard(p);
  cplx u = std::polar(1.0, direction_angle);
  cplx plus = disc_translate_inv(p.z, u);
  cplx minus = disc_translate_inv(p.z, -u);
  UnitTangent v;
  v.xi_plus = BoundaryPoint::from_unit(plus / std::abs(plus));
  v.xi_minus = BoundaryPoint::from_unit(minus / std::abs(minus));
  v.t = geodesic_param(v.xi_minus, v.xi_plus, p, Point());
  return v;
}

UnitTangent tangent_towards(const Point& x, const Point& y) {
  auto [xm, xp] = line_through(x, y);
  UnitTangent v;
  v.xi_minus = xm;
  v.xi_plus = xp;
  v.t = geodesic_param(xm, xp, x, Point());
  return v;
}

UnitTangent ray_toward(const Point& x, const BoundaryPoint& xi) {
  check_guard(x);
  cplx u = xi.unit();
  cplx w = disc_translate(x.z, u);
  cplx minus_u = disc_translate_inv(x.z, -w / std::abs(w));
  UnitTangent v;
  v.xi_minus = BoundaryPoint::from_unit(minus_u / std::abs(minus_u));
  v.xi_plus = xi;
  v.t = geodesic_param(v.xi_minus, v.xi_plus, x, Point());
  return v;
}

UnitTangent Isometry::apply(const UnitTangent& v) const {
  Point p = base_point(v);
  UnitTangent w;
  w.xi_minus = apply(v.xi_minus);
  w.xi_plus = apply(v.xi_plus);
  w.t = geodesic_param(w.xi_minus, w.xi_plus, apply(p), Point());
  return w;
}

double d_prime(const UnitTangent& v, const UnitTangent& w) {
  double d0 = dist(base_point(v), base_point(w));
  double d1 = dist(base_point(flow(v, -1.0)), base_point(flow(w, -1.0)));
  return std::max(d0, d1);
}

UnitTangent su_leaf_point(const UnitTangent& v, const BoundaryPoint& xi) {
  if (angle_dist(xi.theta, v.xi_minus.theta) < 1e-12)
    throw NotSameLeaf("forward endpoint equals xi_minus");
  UnitTangent w;
  w.xi_minus = v.xi_minus;
  w.xi_plus = xi;
  w.t = 0.0;
  // Busemann along a line emanating from xi_minus grows at unit speed, so a
  // single evaluation pins the equal-horosphere parameter.
  Point p0 = base_point(w);
  w.t = -busemann(v.xi_minus, p0, base_point(v));
  return w;
}

double hamenstadt_dist(const UnitTangent& w, const UnitTangent& v,
                       const UnitTangent& v2, double leaf_tol) {
  if (angle_dist(v.xi_minus.theta, w.xi_minus.theta) > 1e-9 ||
      angle_dist(v2.xi_minus.theta, w.xi_minus.theta) > 1e-9)
    throw NotSameLeaf("vectors do not share the backward endpoint");
  Point pv = base_point(v);
  Point pv2 = base_point(v2);
  if (std::abs(busemann(w.xi_minus, pv, pv2)) > leaf_tol)
    throw NotSameLeaf("vectors not on one horosphere");
  if (angle_dist(v.xi_plus.theta, v2.xi_plus.theta) < 1e-15) return 0.0;
  Point x;  // origin
  double dv = visual_dist(x, v.xi_plus, v2.xi_plus);
  double b1 = busemann(v.xi_plus, x, pv);
  double b2 = busemann(v2.xi_plus, x, pv2);
  return dv * std::exp(0.5 * (b1 + b2));
}

}  // namespace gibbs
