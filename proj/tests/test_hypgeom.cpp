#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "gibbs/hypgeom.hpp"

using namespace gibbs;

namespace {

// Independent arclength oracle: locate the Euclidean circle (or diameter)
// through p and q orthogonal to the unit circle, then integrate the model
// metric 2|dz|/(1-|z|^2) along it with composite Simpson. Shares no code
// with gibbs::dist.
double arclength_oracle(cplx p, cplx q) {
  double det = p.real() * q.imag() - p.imag() * q.real();
  const int n = 20000;  // panels (even)
  if (std::abs(det) < 1e-13) {
    // collinear with the origin: straight segment
    double acc = 0.0;
    cplx step = (q - p) / static_cast<double>(n);
    for (int i = 0; i <= n; ++i) {
      cplx z = p + step * static_cast<double>(i);
      double f = 2.0 / (1.0 - std::norm(z));
      double w = (i == 0 || i == n) ? 1.0 : ((i % 2) ? 4.0 : 2.0);
      acc += w * f;
    }
    return acc * std::abs(step) / 3.0;
  }
  // solve Re(conj(c) p) = (1+|p|^2)/2, Re(conj(c) q) = (1+|q|^2)/2
  double rp = 0.5 * (1.0 + std::norm(p));
  double rq = 0.5 * (1.0 + std::norm(q));
  double c1 = (rp * q.imag() - rq * p.imag()) / det;
  double c2 = (rq * p.real() - rp * q.real()) / det;
  cplx c(c1, c2);
  double r = std::abs(p - c);
  double a0 = std::arg(p - c);
  double a1 = std::arg(q - c);
  double da = std::remainder(a1 - a0, 2.0 * kPi);
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double a = a0 + da * i / n;
    cplx z = c + std::polar(r, a);
    double f = 2.0 / (1.0 - std::norm(z));
    double w = (i == 0 || i == n) ? 1.0 : ((i % 2) ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * std::abs(da) * r / (3.0 * n);
}

std::mt19937 rng_for(uint32_t seed) { return std::mt19937(seed); }

Point random_point(std::mt19937& g, double rmax = 0.9) {
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  double r = rmax * std::sqrt(ur(g));
  double th = 2.0 * kPi * ur(g);
  return Point(std::polar(r, th));
}

BoundaryPoint random_boundary(std::mt19937& g) {
  std::uniform_real_distribution<double> ur(0.0, 2.0 * kPi);
  return BoundaryPoint(ur(g));
}

Isometry random_isometry(std::mt19937& g) {
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  double th = 2.0 * kPi * ur(g);
  Point p = random_point(g, 0.8);
  double s = 1.0 / std::sqrt(1.0 - std::norm(p.z));
  Isometry trans = Isometry::from_su11(cplx(s, 0.0), -p.z * s);
  Isometry rot = Isometry::from_su11(std::polar(1.0, th / 2.0), cplx(0.0, 0.0));
  return trans * rot;
}

// Half-plane -> disc Cayley transform, for cross-checks against half-plane
// worked examples.
Point cayley(cplx z_halfplane) {
  return Point((z_halfplane - cplx(0.0, 1.0)) / (z_halfplane + cplx(0.0, 1.0)));
}

// Targets of distant ray points overflow disc coordinates, so the truncation
// oracles below work in a half-plane chart sending one boundary point to
// infinity: H(z) = i (u + z) / (u - z) maps the disc to the upper half-plane
// with u -> infinity and the circle to the real line.
cplx halfplane_at(cplx u, cplx z) {
  return cplx(0.0, 1.0) * (u + z) / (u - z);
}

double halfplane_dist(cplx z, cplx w) {
  double q = 1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag());
  return std::acosh(std::max(1.0, q));
}

}  // namespace

TEST_CASE("dist: half-plane vertical geodesic gives ln 2") {
  Point a = cayley({0.0, 1.0});
  Point b = cayley({0.0, 2.0});
  CHECK(dist(a, b) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(dist(a, a) == 0.0);
}

TEST_CASE("dist agrees with the arclength quadrature oracle") {
  auto g = rng_for(11);
  for (int i = 0; i < 40; ++i) {
    Point p = random_point(g);
    Point q = random_point(g);
    double d = dist(p, q);
    double oracle = arclength_oracle(p.z, q.z);
    CHECK(std::abs(d - oracle) < 1e-9);
  }
}

TEST_CASE("dist triangle inequality and symmetry") {
  auto g = rng_for(12);
  for (int i = 0; i < 200; ++i) {
    Point p = random_point(g), q = random_point(g), r = random_point(g);
    CHECK(dist(p, q) == doctest::Approx(dist(q, p)).epsilon(1e-13));
    CHECK(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-12);
  }
}

TEST_CASE("guard violation raised near the boundary") {
  CHECK_THROWS_AS(dist(Point(1.0 - 1e-16, 0.0), Point()), GuardViolation);
}

TEST_CASE("isometry from half-plane matrix: diag(2, 1/2) moves i to 4i") {
  Isometry g = Isometry::from_half_plane(2.0, 0.0, 0.0, 0.5);
  Point i_pt = cayley({0.0, 1.0});
  Point img = g.apply(i_pt);
  Point expect = cayley({0.0, 4.0});
  CHECK(std::abs(img.z - expect.z) < 1e-14);
  CHECK(dist(i_pt, img) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("half-plane matrix with wrong determinant rejected") {
  CHECK_THROWS_AS(Isometry::from_half_plane(1.0, 0.0, 0.0, 0.999),
                  gibbs::Error);
}

TEST_CASE("identity isometry fixes points") {
  Isometry id;
  Point p(0.3, -0.4);
  CHECK(std::abs(id.apply(p).z - p.z) == 0.0);
}

TEST_CASE("isometries preserve distance, composition matches") {
  auto g = rng_for(13);
  for (int i = 0; i < 100; ++i) {
    Isometry a = random_isometry(g), b = random_isometry(g);
    Point p = random_point(g), q = random_point(g);
    CHECK(dist(a.apply(p), a.apply(q)) ==
          doctest::Approx(dist(p, q)).epsilon(1e-12));
    Point lhs = (a * b).apply(p);
    Point rhs = a.apply(b.apply(p));
    CHECK(std::abs(lhs.z - rhs.z) < 1e-13);
    Point back = a.inverse().apply(a.apply(p));
    CHECK(std::abs(back.z - p.z) < 1e-13);
  }
}

TEST_CASE("busemann: half-plane horocycles at infinity") {
  // xi = infinity in the half-plane maps to the disc point 1
  BoundaryPoint xi = BoundaryPoint::from_unit({1.0, 0.0});
  Point x = cayley({0.0, 1.0});
  Point y = cayley({0.0, 2.0});
  CHECK(busemann(xi, x, y) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(busemann(xi, x, x) == 0.0);
}

TEST_CASE("busemann matches truncated-ray differences at t = 40") {
  auto g = rng_for(14);
  for (int i = 0; i < 30; ++i) {
    Point x = random_point(g), y = random_point(g);
    BoundaryPoint xi = random_boundary(g);
    // half-plane chart with xi at infinity; the ray from x is vertical
    cplx u = xi.unit();
    cplx X = halfplane_at(u, x.z), Y = halfplane_at(u, y.z);
    double t = 40.0;
    cplx xi_t(X.real(), X.imag() * std::exp(t));
    double truncated = halfplane_dist(X, xi_t) - halfplane_dist(Y, xi_t);
    CHECK(std::abs(busemann(xi, x, y) - truncated) < 1e-10);
  }
}

TEST_CASE("busemann cocycle additivity in the middle argument") {
  auto g = rng_for(15);
  for (int i = 0; i < 200; ++i) {
    Point x = random_point(g), y = random_point(g), z = random_point(g);
    BoundaryPoint xi = random_boundary(g);
    double lhs = busemann(xi, x, z);
    double rhs = busemann(xi, x, y) + busemann(xi, y, z);
    CHECK(std::abs(lhs - rhs) < 1e-9);
    CHECK(std::abs(busemann(xi, x, y)) <= dist(x, y) + 1e-12);
  }
}

TEST_CASE("visual distance: closed form basics") {
  Point c;  // origin
  BoundaryPoint xi(0.0), eta(kPi);
  CHECK(visual_dist(c, xi, eta) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(visual_dist(c, xi, xi) == 0.0);
}

TEST_CASE("visual distance: truncated-limit stability oracle") {
  auto g = rng_for(16);
  for (int i = 0; i < 20; ++i) {
    Point x = random_point(g, 0.6);
    BoundaryPoint xi = random_boundary(g);
    BoundaryPoint eta = random_boundary(g);
    if (angle_dist(xi.theta, eta.theta) < 0.1) continue;
    // Translate x to the origin; the two rays are then radial and the
    // truncated Gromov-product expression collapses to a stable closed
    // combination with d(x, xi_t) = d(x, eta_t) = t exactly.
    auto dir = [&](const BoundaryPoint& b) {
      cplx w = (b.unit() - x.z) / (1.0 - std::conj(x.z) * b.unit());
      return std::arg(w);
    };
    double al = dir(xi), be = dir(eta);
    auto truncated = [&](double T) {
      double em = std::exp(-T);
      double s = 4.0 * em / ((1.0 + em) * (1.0 + em));  // 1 - rho^2
      double rho2 = 1.0 - s;
      double delta = al - be;
      double a1 = s + rho2 * 2.0 * std::pow(std::sin(0.5 * delta), 2.0);
      double b1 = rho2 * std::sin(delta);
      double B = std::hypot(a1, b1);                    // |1 - conj(p) q|
      double C = std::sqrt(rho2) * 2.0 * std::abs(std::sin(0.5 * delta));
      return (B + C) * (1.0 + em) * (1.0 + em) / 4.0;
    };
    double v30 = truncated(30.0);
    double v45 = truncated(45.0);
    CHECK(std::abs(v30 - v45) < 1e-10);
    CHECK(std::abs(visual_dist(x, xi, eta) - v45) < 1e-9);
  }
}

TEST_CASE("visual distance sandwich under base change (1000 triples)") {
  auto g = rng_for(17);
  for (int i = 0; i < 1000; ++i) {
    Point x = random_point(g), y = random_point(g);
    BoundaryPoint xi = random_boundary(g), eta = random_boundary(g);
    if (angle_dist(xi.theta, eta.theta) < 1e-6) continue;
    double ratio = visual_dist(x, xi, eta) / visual_dist(y, xi, eta);
    double ed = std::exp(dist(x, y));
    CHECK(ratio <= ed * (1.0 + 1e-10));
    CHECK(ratio >= (1.0 + 1e-10) / ed);
  }
}

TEST_CASE("isometry invariance of busemann and visual distance") {
  auto g = rng_for(18);
  for (int i = 0; i < 100; ++i) {
    Isometry a = random_isometry(g);
    Point x = random_point(g), y = random_point(g);
    BoundaryPoint xi = random_boundary(g), eta = random_boundary(g);
    CHECK(std::abs(busemann(a.apply(xi), a.apply(x), a.apply(y)) -
                   busemann(xi, x, y)) < 1e-10);
    if (angle_dist(xi.theta, eta.theta) > 1e-6) {
      CHECK(std::abs(visual_dist(a.apply(x), a.apply(xi), a.apply(eta)) -
                     visual_dist(x, xi, eta)) < 1e-10);
    }
  }
}

TEST_CASE("geodesic_eval: vertical example and arclength parametrization") {
  // half-plane endpoints 0 -> disc -1, infinity -> disc 1; base i -> origin
  BoundaryPoint xm = BoundaryPoint::from_unit({-1.0, 0.0});
  BoundaryPoint xp = BoundaryPoint::from_unit({1.0, 0.0});
  Point base = cayley({0.0, 1.0});
  Point two_i = cayley({0.0, 2.0});
  Point got = geodesic_eval(xm, xp, std::log(2.0), base);
  CHECK(std::abs(got.z - two_i.z) < 1e-13);

  auto g = rng_for(19);
  for (int i = 0; i < 50; ++i) {
    BoundaryPoint a = random_boundary(g), b = random_boundary(g);
    if (angle_dist(a.theta, b.theta) < 0.05) continue;
    Point p = random_point(g);
    std::uniform_real_distribution<double> us(-8.0, 8.0);
    double s1 = us(g), s2 = us(g);
    Point p1 = geodesic_eval(a, b, s1, p);
    Point p2 = geodesic_eval(a, b, s2, p);
    CHECK(std::abs(dist(p1, p2) - std::abs(s1 - s2)) < 1e-10);
    Point p0 = geodesic_eval(a, b, 0.0, p);
    CHECK(dist(p, p0) <= dist(p, p1) + 1e-10);
    CHECK(dist(p, p0) <= dist(p, p2) + 1e-10);
    CHECK(std::abs(geodesic_param(a, b, p1, p) - s1) < 1e-10);
  }
}

TEST_CASE("geodesic_eval rejects coincident endpoints") {
  BoundaryPoint a(1.0);
  CHECK_THROWS_AS(geodesic_eval(a, a, 0.0, Point()), CoincidentEndpoints);
}

TEST_CASE("shadow: symmetry and monotonicity in r") {
  Point x;  // origin
  Point center(0.5, 0.0);
  BoundaryArcSet s = shadow(x, center, 0.3);
  REQUIRE(s.arcs().size() == 1);
  double mid = angle_normalize(s.arcs()[0].a + 0.5 * s.arcs()[0].len);
  CHECK(std::min(mid, kTwoPi - mid) < 1e-12);

  // dist(0, 0.5) = 2 atanh(0.5) ~ 1.0986; stay strictly below it
  double prev = 0.0;
  for (double r : {0.2, 0.5, 0.8, 1.05}) {
    double m = shadow(x, center, r).measure();
    CHECK(m > prev);
    prev = m;
  }
  CHECK_THROWS_AS(shadow(x, center, dist(x, center) + 0.1), XInsideBall);
}

TEST_CASE("shadow membership matches the ray-ball intersection oracle") {
  auto g = rng_for(20);
  for (int i = 0; i < 25; ++i) {
    Point vx = random_point(g, 0.7);
    Point c = random_point(g, 0.7);
    double r = 0.2 + 0.4 * std::uniform_real_distribution<double>(0, 1)(g);
    if (dist(vx, c) <= r + 0.05) continue;
    BoundaryArcSet sh = shadow(vx, c, r);
    for (int j = 0; j < 40; ++j) {
      BoundaryPoint xi = random_boundary(g);
      UnitTangent v = ray_toward(vx, xi);
      double dmin = 1e100;
      for (int k = 0; k <= 500; ++k) {
        double t = 25.0 * k / 500.0;
        dmin = std::min(dmin, dist(base_point(flow(v, t)), c));
        if (dmin <= r) break;
      }
      if (std::abs(dmin - r) > 1e-3) {  // skip razor-edge samples
        CHECK((dmin <= r) == sh.contains(xi));
      }
    }
  }
}

TEST_CASE("arc set algebra") {
  BoundaryArcSet s;
  s.add(0.1, 0.5);
  s.add(0.4, 0.5);  // overlapping
  CHECK(s.arcs().size() == 1);
  CHECK(s.measure() == doctest::Approx(0.8));
  BoundaryArcSet c = s.complement();
  CHECK(c.measure() == doctest::Approx(kTwoPi - 0.8));
  CHECK(BoundaryArcSet::full_circle().contains(BoundaryPoint(1.0)));
  BoundaryArcSet w;
  w.add(kTwoPi - 0.2, 0.5);  // wraps around zero
  CHECK(w.contains(BoundaryPoint(0.1)));
  CHECK(w.contains(BoundaryPoint(kTwoPi - 0.1)));
  CHECK(!w.contains(BoundaryPoint(1.0)));
}

TEST_CASE("Hopf roundtrip is the identity") {
  auto g = rng_for(21);
  for (int i = 0; i < 200; ++i) {
    Point p = random_point(g);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    double ang = ua(g);
    UnitTangent v = from_base_form(p, ang);
    auto [p2, ang2] = to_base_form(v);
    CHECK(std::abs(p2.z - p.z) < 1e-10);
    CHECK(angle_dist(ang, ang2) < 1e-10);
  }
}

TEST_CASE("isometries act equivariantly on unit tangents") {
  auto g = rng_for(22);
  for (int i = 0; i < 60; ++i) {
    Isometry a = random_isometry(g);
    Point p = random_point(g);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    UnitTangent v = from_base_form(p, ua(g));
    UnitTangent gv = a.apply(v);
    Point gp = a.apply(p);
    Point gfwd = a.apply(base_point(flow(v, 0.25)));
    UnitTangent gv2 = tangent_towards(gp, gfwd);
    CHECK(angle_dist(gv.xi_plus.theta, gv2.xi_plus.theta) < 1e-10);
    CHECK(angle_dist(gv.xi_minus.theta, gv2.xi_minus.theta) < 1e-10);
    CHECK(std::abs(gv.t - gv2.t) < 1e-10);
    CHECK(std::abs(base_point(gv).z - gp.z) < 1e-10);
  }
}

TEST_CASE("flow and flip behave") {
  auto g = rng_for(23);
  UnitTangent v = from_base_form(random_point(g), 1.2345);
  CHECK(std::abs(dist(base_point(v), base_point(flow(v, 1.5))) - 1.5) < 1e-10);
  UnitTangent fv = flip(v);
  CHECK(std::abs(base_point(fv).z - base_point(v).z) < 1e-12);
  CHECK(angle_dist(fv.xi_plus.theta, v.xi_minus.theta) == 0.0);
  CHECK(fv.t == -v.t);
}

TEST_CASE("d_prime: two-endpoint formula equals max over sampled s") {
  auto g = rng_for(24);
  for (int i = 0; i < 50; ++i) {
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    UnitTangent v = from_base_form(random_point(g, 0.5), ua(g));
    UnitTangent w = from_base_form(random_point(g, 0.5), ua(g));
    double dp = d_prime(v, w);
    CHECK(d_prime(v, v) == 0.0);
    double m = 0.0;
    for (int j = 0; j <= 64; ++j) {
      double s = -1.0 + j / 64.0;
      m = std::max(m, dist(base_point(flow(v, s)), base_point(flow(w, s))));
    }
    CHECK(dp >= m - 1e-10);
    CHECK(dp <= m + 1e-10);
    CHECK(std::abs(d_prime(w, v) - dp) < 1e-12);
  }
}

TEST_CASE("Hamenstadt distance: scaling law and truncation oracle") {
  auto g = rng_for(25);
  int done = 0;
  for (int i = 0; i < 60 && done < 25; ++i) {
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    UnitTangent w = from_base_form(random_point(g, 0.5), ua(g));
    BoundaryPoint xi1 = random_boundary(g), xi2 = random_boundary(g);
    if (angle_dist(xi1.theta, w.xi_minus.theta) < 0.2) continue;
    if (angle_dist(xi2.theta, w.xi_minus.theta) < 0.2) continue;
    if (angle_dist(xi1.theta, xi2.theta) < 1e-4) continue;
    ++done;
    UnitTangent v = su_leaf_point(w, xi1);
    UnitTangent v2 = su_leaf_point(w, xi2);
    CHECK(hamenstadt_dist(w, v, v) == 0.0);
    double d0 = hamenstadt_dist(w, v, v2);

    double s = 1.7;
    double ds = hamenstadt_dist(flow(w, s), flow(v, s), flow(v2, s));
    CHECK(std::abs(ds - std::exp(s) * d0) < 1e-9 * std::exp(s) * d0 + 1e-12);

    // half-plane chart at xi_minus: both flow lines are verticals moving
    // toward the real axis, heights scaling by e^{-t}
    cplx u = w.xi_minus.unit();
    cplx P = halfplane_at(u, base_point(v).z);
    cplx Q = halfplane_at(u, base_point(v2).z);
    auto truncated = [&](double t) {
      double dx = P.real() - Q.real();
      double dy = P.imag() - Q.imag();
      double X = 1.0 + (dx * dx * std::exp(2.0 * t) + dy * dy) /
                           (2.0 * P.imag() * Q.imag());
      double dt = std::log(X + std::sqrt(X * X - 1.0));
      return std::exp(0.5 * dt - t);
    };
    CHECK(std::abs(truncated(30.0) - truncated(45.0)) < 1e-9);
    CHECK(std::abs(truncated(45.0) - d0) < 1e-8);

    double dpi = dist(base_point(v), base_point(v2));
    CHECK(d0 >= dpi - 1e-10);
    CHECK(d0 <= std::exp(0.5 * dpi) + 1e-10);
  }
  CHECK(done >= 20);
}

TEST_CASE("hamenstadt_dist rejects different leaves") {
  UnitTangent w = from_base_form(Point(0.1, 0.0), 0.3);
  UnitTangent v = su_leaf_point(w, BoundaryPoint(2.0));
  UnitTangent bad = from_base_form(Point(-0.2, 0.1), 1.0);
  CHECK_THROWS_AS(hamenstadt_dist(w, v, bad), NotSameLeaf);
}

TEST_CASE("equal-length segments toward a common point contract as e^-t") {
  auto g = rng_for(26);
  for (int i = 0; i < 60; ++i) {
    Point z = random_point(g, 0.6);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    std::uniform_real_distribution<double> ul(1.0, 6.0);
    double L = ul(g);
    UnitTangent dir1 = from_base_form(z, ua(g));
    UnitTangent dir2 = from_base_form(z, ua(g));
    Point x = base_point(flow(dir1, L));
    Point y = base_point(flow(dir2, L));
    double dxy = dist(x, y);
    for (double t : {0.2 * L, 0.5 * L, 0.8 * L}) {
      Point xt = base_point(flow(dir1, L - t));  // distance t from x on [x,z]
      Point yt = base_point(flow(dir2, L - t));
      CHECK(dist(xt, yt) <= std::exp(-t) * std::sinh(dxy) + 1e-9);
    }
  }
}

TEST_CASE("su_leaf_point lands on the same horosphere") {
  auto g = rng_for(27);
  for (int i = 0; i < 50; ++i) {
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    UnitTangent v = from_base_form(random_point(g, 0.6), ua(g));
    BoundaryPoint xi = random_boundary(g);
    if (angle_dist(xi.theta, v.xi_minus.theta) < 0.1) continue;
    UnitTangent w = su_leaf_point(v, xi);
    CHECK(angle_dist(w.xi_minus.theta, v.xi_minus.theta) == 0.0);
    CHECK(std::abs(busemann(v.xi_minus, base_point(w), base_point(v))) < 1e-10);
  }
}
