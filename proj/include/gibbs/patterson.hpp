#ifndef GIBBS_PATTERSON_HPP
#define GIBBS_PATTERSON_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/potential.hpp"
#include "gibbs/pressure.hpp"

// Atomic approximations of (twisted) Patterson densities and the
// density-level diagnostics: equivariance, Radon-Nikodym, shadow lemma,
// doubling, quasi-product Gibbs integration, strong-unstable conditionals,
// dynamical-ball ratios.

namespace gibbs {

struct Atom {
  Word word;
  Point position;      // gamma * y0
  BoundaryPoint ray;   // endpoint of the ray from the viewpoint through it
  bool has_ray = false;  // false only for an atom sitting at the viewpoint
  double log_weight;   // ln of the normalized weight
  double displacement; // d(x, gamma y0)
};

struct DensityOptions {
  size_t max_wordlen = 8;
  uint64_t node_budget = 50'000'000;
  int workers = 1;
  QuadratureOptions quad;
  std::optional<double> delta_hint;  // warn when s < hint + 0.01
};

class AtomicDensity {
 public:
  static AtomicDensity build(std::shared_ptr<const SchottkyGroup> group,
                             const Potential& F,
                             const std::optional<Character>& chi, double s,
                             const Point& x, const Point& y0,
                             const DensityOptions& opts = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const;
  // Mass of the cone over the arcs: an atom counts iff the ray from the
  // viewpoint through it lands in the arc set. An atom at the viewpoint
  // itself has no ray and is counted only for the full circle.
  double arc_mass(const BoundaryArcSet& arcs) const;
  double ray_mass() const;  // total over the ray-bearing atoms
  double log_normalizer() const { return log_normalizer_; }
  double exponent() const { return s_; }
  const Point& viewpoint() const { return x_; }
  const Point& orbit_base() const { return y0_; }
  bool normalizer_warning() const { return normalizer_warning_; }
  size_t max_wordlen() const { return max_wordlen_; }
  const Potential& potential() const { return F_; }
  const std::optional<Character>& character() const { return chi_; }
  const std::shared_ptr<const SchottkyGroup>& group() const { return group_; }
  const DensityOptions& options() const { return opts_; }

 private:
  AtomicDensity() = default;
  std::vector<Atom> atoms_;
  std::shared_ptr<const SchottkyGroup> group_;
  Potential F_;
  std::optional<Character> chi_;
  double s_ = 0.0;
  Point x_, y0_;
  double log_normalizer_ = 0.0;
  bool normalizer_warning_ = false;
  size_t max_wordlen_ = 0;
  DensityOptions opts_;
};

// Relative total-variation defect between gamma_* d and the density rebuilt
// at the viewpoint gamma x, over the common words; the twisted transform
// carries the factor e^{-chi(gamma)} (omitted when include_char_factor is
// false, for sign tests).
double equivariance_defect(const AtomicDensity& d, const Word& gamma,
                           bool include_char_factor = true);

struct RNCheck {
  double empirical = 0.0;   // mass ratio on the arc
  double predicted = 0.0;   // e^{-C_{F-s, xi}(x, y)}
};
RNCheck radon_nikodym_check(const AtomicDensity& dx, const AtomicDensity& dy,
                            const BoundaryArcSet& arc,
                            const BoundaryPoint& xi);

struct ShadowRatios {
  double R = 0.0;
  std::vector<double> ratios;  // mu(O_x B(gy, R)) / e^{chi + int (F - s)}
  double empirical_C = 1.0;
  size_t sample_size = 0;
};
// R <= 0 requests auto-calibration (smallest R in 0.25-steps giving every
// sampled shadow positive mass).
ShadowRatios shadow_lemma_check(const AtomicDensity& d, double R,
                                size_t sample_maxlen);

struct DoublingReport {
  double R = 0.0;
  double C = 1.0;  // max mass(5R-shadow) / mass(R-shadow) over the sample
  size_t sample_size = 0;
};
DoublingReport doubling_check(const AtomicDensity& d, double R,
                              size_t sample_maxlen);

// Pair of densities entering the quasi-product Gibbs measure: minus for
// (Gamma, F o iota, -chi), plus for (Gamma, F, chi), equal exponents.
struct ProductGibbs {
  AtomicDensity minus;
  AtomicDensity plus;
  double exponent = 0.0;
};
ProductGibbs product_gibbs(std::shared_ptr<const SchottkyGroup> group,
                           const Potential& F,
                           const std::optional<Character>& chi, double s,
                           const Point& x, const Point& y0,
                           const DensityOptions& opts = {});

// Compact bump in Hopf coordinates (xi, eta, t) with the profile of
// bump_profile in each factor.
struct HopfBump {
  double xi0 = 0.0, eta0 = kPi;
  double width_xi = 0.5, width_eta = 0.5;
  double t0 = 0.0, width_t = 1.0;
  double amplitude = 1.0;
  double value(double xi, double eta, double t) const;
  HopfBump flipped() const;  // precompose with the flip (xi,eta,t)->(eta,xi,-t)
};

// Quasi-product integral: sum over atom pairs of w- w+ D^{-2} int h dt,
// the t-integral by 64-panel midpoint over the bump's t-support.
double gibbs_integral(const ProductGibbs& pg, const HopfBump& h,
                      const TruncationOptions& topts = {},
                      const QuadratureOptions& qopts = {});

// Strong-unstable conditional mass of the set of leaf points of v with
// forward endpoint in `arc`.
double su_conditional(const AtomicDensity& d, const UnitTangent& v,
                      const BoundaryArcSet& arc,
                      const TruncationOptions& topts = {},
                      const QuadratureOptions& qopts = {});

struct BallDiag {
  double inner_measure = 0.0;  // measure of the inner shadow-product set
  double outer_measure = 0.0;  // measure of the outer shadow-product set
  double prediction = 0.0;     // e^{int_{-T'}^{T} (F - s)}
  double ratio = 0.0;          // sqrt(inner * outer) / prediction
};
BallDiag dynamical_ball_diag(const ProductGibbs& pg, const UnitTangent& v,
                             double T, double Tp, double r,
                             const QuadratureOptions& qopts = {});

// Membership of w in the dynamical ball B(v; T, T', r); exact because the
// base-distance function along the flow is convex.
bool in_dynamical_ball(const UnitTangent& v, const UnitTangent& w, double T,
                       double Tp, double r);

}  // namespace gibbs

#endif  // GIBBS_PATTERSON_HPP
