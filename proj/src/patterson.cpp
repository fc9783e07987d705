#include "gibbs/patterson.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "gibbs/accum.hpp"

namespace gibbs {

namespace {

std::optional<Character> negate(const std::optional<Character>& chi) {
  if (!chi) return std::nullopt;
  Character out = *chi;
  for (double& v : out.values) v = -v;
  return out;
}

// log-weight of a single orbit word before normalization
double raw_log_weight(const Potential& F, const std::optional<Character>& chi,
                      double s, const Point& from, const Point& to, double d,
                      const Word& w, const QuadratureOptions& quad) {
  double v = F.is_constant() ? F.constant_part() * d
                             : line_integral(F, from, to, quad);
  v -= s * d;
  if (chi) v += (*chi)(w);
  return v;
}

}  // namespace

AtomicDensity AtomicDensity::build(std::shared_ptr<const SchottkyGroup> group,
                                   const Potential& F,
                                   const std::optional<Character>& chi,
                                   double s, const Point& x, const Point& y0,
                                   const DensityOptions& opts) {
  group->validate();
  AtomicDensity out;
  out.group_ = group;
  out.F_ = F;
  out.chi_ = chi;
  out.s_ = s;
  out.x_ = x;
  out.y0_ = y0;
  out.max_wordlen_ = opts.max_wordlen;
  out.opts_ = opts;
  if (opts.delta_hint && s < *opts.delta_hint + 0.01)
    out.normalizer_warning_ = true;

  // normalizer: same truncation, reference pair (y0, y0)
  std::vector<double> norm_terms;
  {
    EnumOptions eop;
    eop.max_wordlen = opts.max_wordlen;
    eop.node_budget = opts.node_budget;
    EnumStats st = group->enumerate(
        eop, y0, y0, [&](const Word& w, const Isometry& g, double d) {
          norm_terms.push_back(
              raw_log_weight(F, chi, s, y0, g.apply(y0), d, w, opts.quad));
        });
    if (st.budget_exceeded)
      throw BudgetExceeded("density normalizer enumeration over budget");
  }
  out.log_normalizer_ = canonical_log_sum_exp(std::move(norm_terms));

  // atoms at the requested viewpoint, in enumeration order
  std::vector<Letter> tasks = group->alphabet();
  std::vector<std::vector<Atom>> parts(tasks.size() + 1);
  {
    Atom id;
    id.word = Word();
    id.position = y0;
    id.displacement = dist(x, y0);
    id.log_weight =
        raw_log_weight(F, chi, s, x, y0, id.displacement, id.word, opts.quad) -
        out.log_normalizer_;
    if (id.displacement > 1e-12) {
      id.ray = ray_endpoint(x, y0);
      id.has_ray = true;
    }
    parts[0].push_back(id);
  }
  std::vector<EnumStats> stats(tasks.size());
  auto run_task = [&](size_t ti) {
    EnumOptions eop;
    eop.max_wordlen = opts.max_wordlen;
    eop.node_budget = opts.node_budget / std::max<size_t>(1, tasks.size());
    eop.include_identity = false;
    stats[ti] = group->enumerate_partition(
        tasks[ti], eop, x, y0,
        [&](const Word& w, const Isometry& g, double d) {
          Atom a;
          a.word = w;
          a.position = g.apply(y0);
          a.displacement = d;
          a.log_weight =
              raw_log_weight(F, chi, s, x, a.position, d, w, opts.quad) -
              out.log_normalizer_;
          if (d > 1e-12) {
            a.ray = ray_endpoint(x, a.position);
            a.has_ray = true;
          }
          parts[ti + 1].push_back(std::move(a));
        });
  };
  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    for (size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int wkr = 0; wkr < workers; ++wkr)
      pool.emplace_back([&] {
        for (size_t ti = next.fetch_add(1); ti < tasks.size();
             ti = next.fetch_add(1))
          run_task(ti);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& st : stats)
    if (st.budget_exceeded)
      throw BudgetExceeded("density enumeration over budget");
  for (auto& p : parts)
    out.atoms_.insert(out.atoms_.end(), p.begin(), p.end());
  return out;
}

double AtomicDensity::total_mass() const {
  std::vector<double> w;
  w.reserve(atoms_.size());
  for (const Atom& a : atoms_) w.push_back(std::exp(a.log_weight));
  return canonical_sum(std::move(w));
}

double AtomicDensity::arc_mass(const BoundaryArcSet& arcs) const {
  bool full = arcs.measure() >= kTwoPi - 1e-12;
  std::vector<double> w;
  for (const Atom& a : atoms_) {
    if (a.has_ray ? arcs.contains(a.ray) : full)
      w.push_back(std::exp(a.log_weight));
  }
  return canonical_sum(std::move(w));
}

double AtomicDensity::ray_mass() const {
  std::vector<double> w;
  for (const Atom& a : atoms_)
    if (a.has_ray) w.push_back(std::exp(a.log_weight));
  return canonical_sum(std::move(w));
}

// Compares the rebuilt density mu_{gamma x} against e^{chi(gamma)} gamma_* d
// (the twisted transform law gamma_* mu_x = e^{-chi} mu_{gamma x}).
double equivariance_defect(const AtomicDensity& d, const Word& gamma,
                           bool include_char_factor) {
  if (gamma.empty()) return 0.0;
  const SchottkyGroup& G = *d.group();
  Isometry g = G.evaluate(gamma);
  AtomicDensity moved = AtomicDensity::build(
      d.group(), d.potential(), d.character(), d.exponent(),
      g.apply(d.viewpoint()), d.orbit_base(), d.options());
  std::map<std::string, double> rebuilt;
  for (const Atom& a : moved.atoms()) rebuilt[a.word.str()] = a.log_weight;

  double chi_factor = 0.0;  // ln e^{-chi(gamma)}
  if (include_char_factor && d.character())
    chi_factor = (*d.character())(gamma);

  double num = 0.0, den = 0.0;
  size_t common = 0;
  for (const Atom& a : d.atoms()) {
    Word target = gamma * a.word;
    auto it = rebuilt.find(target.str());
    if (it == rebuilt.end()) continue;
    ++common;
    double transported = std::exp(a.log_weight + chi_factor);
    double direct = std::exp(it->second);
    num += std::abs(direct - transported);
    den += transported;
  }
  if (common == 0 || den == 0.0) return 0.0;
  return num / den;
}

RNCheck radon_nikodym_check(const AtomicDensity& dx, const AtomicDensity& dy,
                            const BoundaryArcSet& arc,
                            const BoundaryPoint& xi) {
  RNCheck out;
  double mx = dx.arc_mass(arc);
  double my = dy.arc_mass(arc);
  if (mx == 0.0 || my == 0.0) throw EmptyArc("arc carries no atoms");
  out.empirical = mx / my;
  CocycleValue c = gibbs_cocycle(dx.potential(), dx.exponent(), xi,
                                 dx.viewpoint(), dy.viewpoint());
  out.predicted = std::exp(-c.value);
  return out;
}

namespace {

// Pure powers a^m (m >= 2) are excluded from shadow samples: every on-axis
// prefix atom a^j shoots its ray onto the same fixed-point direction inside
// the shadow of a^m, and that truncation lump inflates the ratio like
// e^{(m-1)(chi(a) + s ell(a))} - an artifact of the finite atomic cloud.
bool is_pure_power(const Word& w) {
  if (w.size() < 2) return false;
  for (size_t i = 1; i < w.size(); ++i)
    if (w.letters[i] != w.letters[0]) return false;
  return true;
}

std::vector<Atom> shadow_sample(const AtomicDensity& d, size_t sample_maxlen) {
  std::vector<Atom> sample;
  for (const Atom& a : d.atoms())
    if (!a.word.empty() && a.has_ray && a.word.size() <= sample_maxlen &&
        !is_pure_power(a.word))
      sample.push_back(a);
  return sample;
}

double auto_shadow_radius(const AtomicDensity& d,
                          const std::vector<Atom>& sample) {
  for (double R = 0.5; R <= 12.0; R += 0.25) {
    bool all_positive = true;
    for (const Atom& a : sample) {
      if (dist(d.viewpoint(), a.position) <= R) continue;
      if (d.arc_mass(shadow(d.viewpoint(), a.position, R)) <= 0.0) {
        all_positive = false;
        break;
      }
    }
    if (all_positive) return R;
  }
  return 12.0;
}

}  // namespace

ShadowRatios shadow_lemma_check(const AtomicDensity& d, double R,
                                size_t sample_maxlen) {
  ShadowRatios out;
  std::vector<Atom> sample = shadow_sample(d, sample_maxlen);
  out.R = (R > 0.0) ? R : auto_shadow_radius(d, sample);
  for (const Atom& a : sample) {
    if (dist(d.viewpoint(), a.position) <= out.R) continue;
    double mass = d.arc_mass(shadow(d.viewpoint(), a.position, out.R));
    // a.log_weight + ln Qbar = chi(gamma) + int_x^{gamma y0} (F - s)
    double expected = a.log_weight + d.log_normalizer();
    out.ratios.push_back(mass / std::exp(expected));
  }
  out.sample_size = out.ratios.size();
  double hi = 1.0, lo = 1.0;
  for (double r : out.ratios) {
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  out.empirical_C = std::max(hi, lo > 0.0 ? 1.0 / lo : 1e300);
  return out;
}

DoublingReport doubling_check(const AtomicDensity& d, double R,
                              size_t sample_maxlen) {
  DoublingReport out;
  std::vector<Atom> sample = shadow_sample(d, sample_maxlen);
  out.R = (R > 0.0) ? R : auto_shadow_radius(d, sample);
  double C = 1.0;
  size_t n = 0;
  for (const Atom& a : sample) {
    if (dist(d.viewpoint(), a.position) <= 5.0 * out.R) continue;
    double small = d.arc_mass(shadow(d.viewpoint(), a.position, out.R));
    if (small <= 0.0) continue;
    double big = d.arc_mass(shadow(d.viewpoint(), a.position, 5.0 * out.R));
    C = std::max(C, big / small);
    ++n;
  }
  out.C = C;
  out.sample_size = n;
  return out;
}

ProductGibbs product_gibbs(std::shared_ptr<const SchottkyGroup> group,
                           const Potential& F,
                           const std::optional<Character>& chi, double s,
                           const Point& x, const Point& y0,
                           const DensityOptions& opts) {
  return ProductGibbs{
      AtomicDensity::build(group, F.flip(), negate(chi), s, x, y0, opts),
      AtomicDensity::build(group, F, chi, s, x, y0, opts), s};
}

double HopfBump::value(double xi, double eta, double t) const {
  double f1 = bump_profile(angle_dist(xi, xi0) / width_xi);
  if (f1 == 0.0) return 0.0;
  double f2 = bump_profile(angle_dist(eta, eta0) / width_eta);
  if (f2 == 0.0) return 0.0;
  double f3 = bump_profile((t - t0) / width_t);
  return amplitude * f1 * f2 * f3;
}

HopfBump HopfBump::flipped() const {
  HopfBump out = *this;
  std::swap(out.xi0, out.eta0);
  std::swap(out.width_xi, out.width_eta);
  out.t0 = -t0;
  return out;
}

double gibbs_integral(const ProductGibbs& pg, const HopfBump& h,
                      const TruncationOptions& topts,
                      const QuadratureOptions& qopts) {
  const Point& x0 = pg.plus.viewpoint();
  const Potential& F = pg.plus.potential();
  std::vector<double> contributions;
  const int panels = 64;
  for (const Atom& am : pg.minus.atoms()) {
    if (!am.has_ray ||
        bump_profile(angle_dist(am.ray.theta, h.xi0) / h.width_xi) == 0.0)
      continue;
    for (const Atom& ap : pg.plus.atoms()) {
      if (!ap.has_ray ||
          bump_profile(angle_dist(ap.ray.theta, h.eta0) / h.width_eta) == 0.0)
        continue;
      if (angle_dist(am.ray.theta, ap.ray.theta) < 1e-9) continue;
      double tint = 0.0;
      double lo = h.t0 - h.width_t, wid = 2.0 * h.width_t;
      for (int p = 0; p < panels; ++p)
        tint += h.value(am.ray.theta, ap.ray.theta,
                        lo + wid * (p + 0.5) / panels);
      tint *= wid / panels;
      if (tint == 0.0) continue;
      double lg = log_gap(F, pg.exponent, x0, am.ray, ap.ray, topts, qopts);
      contributions.push_back(
          std::exp(am.log_weight + ap.log_weight - 2.0 * lg) * tint);
    }
  }
  return canonical_sum(std::move(contributions));
}

double su_conditional(const AtomicDensity& d, const UnitTangent& v,
                      const BoundaryArcSet& arc,
                      const TruncationOptions& topts,
                      const QuadratureOptions& qopts) {
  if (arc.contains(v.xi_minus))
    throw ArcContainsVMinus("arc must avoid the backward endpoint");
  std::vector<double> w;
  for (const Atom& a : d.atoms()) {
    if (!a.has_ray || !arc.contains(a.ray)) continue;
    UnitTangent leaf = su_leaf_point(v, a.ray);
    CocycleValue c =
        gibbs_cocycle(d.potential(), d.exponent(), a.ray, d.viewpoint(),
                      base_point(leaf), topts, qopts);
    // d mu_su(w) = e^{C_{F-s, w+}(x0, pi w)} d mu_{x0}(w+)
    w.push_back(std::exp(c.value + a.log_weight));
  }
  return canonical_sum(std::move(w));
}

bool in_dynamical_ball(const UnitTangent& v, const UnitTangent& w, double T,
                       double Tp, double r) {
  double d_fwd = dist(base_point(flow(v, T)), base_point(flow(w, T)));
  if (d_fwd >= r) return false;
  double d_bwd = dist(base_point(flow(v, -Tp)), base_point(flow(w, -Tp)));
  return d_bwd < r;
}

BallDiag dynamical_ball_diag(const ProductGibbs& pg, const UnitTangent& v,
                             double T, double Tp, double r,
                             const QuadratureOptions& qopts) {
  BallDiag out;
  Point x = base_point(v);
  Point x_fwd = base_point(flow(v, T));
  Point x_bwd = base_point(flow(v, -Tp));

  // Hopf description of the ball: inner and outer shadow products; the
  // time-marginal windows follow the same inner/outer inclusion scheme.
  // A ball containing the viewpoint shadows the whole circle.
  auto safe_shadow = [&](const Point& c, double rad) {
    if (dist(x, c) <= rad + 1e-12) return BoundaryArcSet::full_circle();
    return shadow(x, c, rad);
  };
  BoundaryArcSet inner_minus = safe_shadow(x_bwd, 0.5 * r);
  BoundaryArcSet inner_plus = safe_shadow(x_fwd, 0.5 * r);
  BoundaryArcSet outer_minus = safe_shadow(x_bwd, 2.0 * r);
  BoundaryArcSet outer_plus = safe_shadow(x_fwd, 2.0 * r);

  auto product_measure = [&](const BoundaryArcSet& A, const BoundaryArcSet& B,
                             double time_window) {
    std::vector<double> contributions;
    const Potential& F = pg.plus.potential();
    for (const Atom& am : pg.minus.atoms()) {
      if (!am.has_ray || !A.contains(am.ray)) continue;
      for (const Atom& ap : pg.plus.atoms()) {
        if (!ap.has_ray || !B.contains(ap.ray)) continue;
        if (angle_dist(am.ray.theta, ap.ray.theta) < 1e-9) continue;
        double lg = log_gap(F, pg.exponent, pg.plus.viewpoint(), am.ray,
                            ap.ray, {}, qopts);
        contributions.push_back(
            std::exp(am.log_weight + ap.log_weight - 2.0 * lg) * time_window);
      }
    }
    return canonical_sum(std::move(contributions));
  };

  out.inner_measure = product_measure(inner_minus, inner_plus, 2.0);
  out.outer_measure = product_measure(outer_minus, outer_plus, 2.0 * r);

  const Potential& F = pg.plus.potential();
  double seg = F.is_constant() ? F.constant_part() * (T + Tp)
                               : line_integral(F, x_bwd, x_fwd, qopts);
  out.prediction = std::exp(seg - pg.exponent * (T + Tp));
  double mid = std::sqrt(std::max(out.inner_measure, 0.0) *
                         std::max(out.outer_measure, 0.0));
  out.ratio = (out.prediction > 0.0) ? mid / out.prediction : 0.0;
  return out;
}

}  // namespace gibbs
