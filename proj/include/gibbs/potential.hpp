#ifndef GIBBS_POTENTIAL_HPP
#define GIBBS_POTENTIAL_HPP

#include <memory>
#include <utility>
#include <vector>

#include "gibbs/schottky.hpp"

// Gamma-invariant Holder potentials on the unit tangent bundle and the
// quantities derived from them: line integrals, periods, Gibbs cocycles,
// gap maps, crossratios, strong-unstable cocycles.

namespace gibbs {

// C^2 bump profile (1 - u^2)^3 on [0, 1), zero outside.
double bump_profile(double u);

struct BumpSpec {
  UnitTangent center;
  double spatial_radius = 0.5;   // support radius in the base distance
  double angular_width = 1.0;    // radians
  double amplitude = 1.0;
  bool reversible = false;       // symmetrize the angular factor under flip
};

class Potential {
 public:
  Potential() : Potential(constant(0.0)) {}

  static Potential constant(double kappa);
  // Orbit sum of a compactly supported bump; the bump centre base point must
  // lie outside the open pairing discs.
  static Potential bump_sum(std::shared_ptr<const SchottkyGroup> group,
                            const BumpSpec& spec);
  static Potential combo(std::vector<std::pair<double, Potential>> parts);

  Potential flip() const;                 // F -> F o iota
  Potential operator+(double kappa) const;

  double eval(const UnitTangent& v) const;
  double constant_part() const;
  bool has_bumps() const;
  // true when every bump term carries the flip flag; such potentials are
  // evaluated through the exact change of variables gamma -> gamma^{-1}
  bool all_bumps_flipped() const;
  bool is_constant() const { return !has_bumps(); }
  bool reversible_hint() const;
  bool holder_only() const;               // force the fallback quadrature
  Potential with_holder_only(bool on) const;
  double sup_abs_bound() const;            // certified upper bound for |F|
  const SchottkyGroup* group() const;      // nullptr if constant

  struct Impl;
  const std::shared_ptr<const Impl>& impl() const { return impl_; }

 private:
  explicit Potential(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct QuadratureOptions {
  double tol = 1e-9;          // adaptive Simpson tolerance per segment
  int depth_cap = 30;         // adaptive recursion cap
  double holder_step = 0.01;  // fixed midpoint step for the Holder fallback
};

struct CocycleValue {
  double value = 0.0;
  double error_bound = 0.0;  // reported truncation bound (2x last increment)
  bool capped = false;       // truncation cap hit before the tolerance
};

struct TruncationOptions {
  double tol = 1e-10;
  double t_start = 4.0;
  double t_cap = 60.0;  // also limited by coordinate representability
};

// int_x^y F along the connecting geodesic; 0 when x == y.
double line_integral(const Potential& F, const Point& x, const Point& y,
                     const QuadratureOptions& opts = {});

// Per_F(gamma) for the conjugacy class cc, integrated along the axis.
double period(const Potential& F, const SchottkyGroup& G, const ConjClass& cc,
              const QuadratureOptions& opts = {});
double period(const Potential& F, const Isometry& g,
              const QuadratureOptions& opts = {});

// Gibbs cocycle C_{F - sigma, xi}(x, y).
CocycleValue gibbs_cocycle(const Potential& F, double sigma,
                           const BoundaryPoint& xi, const Point& x,
                           const Point& y, const TruncationOptions& topts = {},
                           const QuadratureOptions& qopts = {});

// Gap map D_{F - sigma, x}(xi, eta) and its logarithm.
double log_gap(const Potential& F, double sigma, const Point& x,
               const BoundaryPoint& xi, const BoundaryPoint& eta,
               const TruncationOptions& topts = {},
               const QuadratureOptions& qopts = {});
double gap(const Potential& F, double sigma, const Point& x,
           const BoundaryPoint& xi, const BoundaryPoint& eta,
           const TruncationOptions& topts = {},
           const QuadratureOptions& qopts = {});

// Crossratio [a, b, c, d]_F and its logarithm (evaluated through the gap
// map at the base point, which is base-point independent).
double log_crossratio(const Potential& F, const BoundaryPoint& a,
                      const BoundaryPoint& b, const BoundaryPoint& c,
                      const BoundaryPoint& d,
                      const TruncationOptions& topts = {},
                      const QuadratureOptions& qopts = {});
double crossratio(const Potential& F, const BoundaryPoint& a,
                  const BoundaryPoint& b, const BoundaryPoint& c,
                  const BoundaryPoint& d, const TruncationOptions& topts = {},
                  const QuadratureOptions& qopts = {});

struct CrossratioLimit {
  std::vector<double> sequence;  // (1/n) ln [g_-, g^n xi, xi, g_+]_F
  double aitken = 0.0;           // accelerated limit estimate
};

// Sequence of Lemma-type period limits with Aitken acceleration. Middle
// points are recentred by g^{-floor(n/2)} (an exact invariance of the
// crossratio) to keep all intermediate geodesics representable.
CrossratioLimit crossratio_period_limit(const Potential& F, const Isometry& g,
                                        const BoundaryPoint& xi, int n_max,
                                        const TruncationOptions& topts = {},
                                        const QuadratureOptions& qopts = {});

// Strong-unstable cocycle c_F(v, w) = -C_{F o iota - delta, v_-}(pi v, pi w)
// for v, w on one strong unstable leaf.
double su_cocycle(const Potential& F, double delta, const UnitTangent& v,
                  const UnitTangent& w, const TruncationOptions& topts = {},
                  const QuadratureOptions& qopts = {});

}  // namespace gibbs

#endif  // GIBBS_POTENTIAL_HPP
