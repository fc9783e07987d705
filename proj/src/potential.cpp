#include "gibbs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gibbs/estimate.hpp"

namespace gibbs {

double bump_profile(double u) {
  double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  double w = 1.0 - a * a;
  return w * w * w;
}

namespace {

double wrap_pi(double a) {
  double w = std::remainder(a, kTwoPi);
  return w;
}

struct CenterData {
  Point base;
  double theta;       // direction angle of the centre tangent at its base
};

// Angle between the tangent (at x, direction theta_x) and the centre tangent
// parallel-transported to x along the connecting geodesic. Exact in the
// disc model: transport along a geodesic preserves the angle with it.
double angle_gap(const Point& x, double theta_x, const CenterData& c) {
  double d = dist(x, c.base);
  if (d < 1e-9) return wrap_pi(theta_x - c.theta);
  UnitTangent v_cx = tangent_towards(c.base, x);
  double phi_c = to_base_form(v_cx).second;
  double phi_x = to_base_form(flow(v_cx, d)).second;
  double transported = phi_x + (c.theta - phi_c);
  return wrap_pi(theta_x - transported);
}

}  // namespace

struct Potential::Impl {
  double constant = 0.0;
  struct BumpTerm {
    std::shared_ptr<const SchottkyGroup> group;
    BumpSpec spec;
    bool flipped = false;
    double coeff = 1.0;
    std::vector<CenterData> centers;  // contributor centres gamma * v0
    int n_loc = 0;
  };
  std::vector<BumpTerm> bumps;
  bool holder_only = false;

  // Single-bump value at (base x, direction theta).
  static double term_value(const BumpTerm& t, const Point& x, double theta) {
    double acc = 0.0;
    const double rb = t.spec.spatial_radius;
    const double aw = t.spec.angular_width;
    for (const CenterData& c : t.centers) {
      double ds = dist(x, c.base);
      if (ds >= rb) continue;
      double psi = std::abs(angle_gap(x, theta, c));
      if (t.flipped) psi = kPi - psi;
      double ang;
      if (t.spec.reversible)
        ang = bump_profile(psi / aw) + bump_profile((kPi - psi) / aw);
      else
        ang = bump_profile(psi / aw);
      if (ang == 0.0) continue;
      acc += bump_profile(ds / rb) * ang;
    }
    return t.spec.amplitude * acc;
  }
};

Potential Potential::constant(double kappa) {
  auto impl = std::make_shared<Impl>();
  impl->constant = kappa;
  return Potential(impl);
}

Potential Potential::bump_sum(std::shared_ptr<const SchottkyGroup> group,
                              const BumpSpec& spec) {
  group->validate();
  Point p0 = base_point(spec.center);
  for (Letter l : group->alphabet()) {
    if (group->letter_disc(l).contains(p0.z))
      throw Error("bump centre base point must avoid the pairing discs");
  }
  if (spec.spatial_radius <= 0.0 || spec.angular_width <= 0.0)
    throw Error("bump radius and width must be positive");

  auto impl = std::make_shared<Impl>();
  Impl::BumpTerm term;
  term.group = group;
  term.spec = spec;
  // contributor centres: words gamma of length n place gamma * v0 at least
  // (n-1) * s0 away from the fundamental region, so the local search depth
  // below is complete for any evaluation point reduced into that region
  // (0.3 covers the reduction margin plus window half-chunks of one radius)
  double s0 = group->nesting_gap();
  term.n_loc = 1 + static_cast<int>(
                       std::ceil((2.0 * spec.spatial_radius + 0.3) / s0));
  EnumOptions opts;
  opts.max_wordlen = static_cast<size_t>(term.n_loc);
  group->enumerate(opts, group->base_point(), group->base_point(),
                   [&](const Word& w, const Isometry& g, double) {
                     UnitTangent c = w.empty() ? spec.center
                                               : g.apply(spec.center);
                     auto [b, th] = to_base_form(c);
                     term.centers.push_back({b, th});
                   });
  impl->bumps.push_back(std::move(term));
  return Potential(impl);
}

Potential Potential::combo(std::vector<std::pair<double, Potential>> parts) {
  auto impl = std::make_shared<Impl>();
  const SchottkyGroup* group = nullptr;
  for (auto& [coeff, p] : parts) {
    impl->constant += coeff * p.impl_->constant;
    impl->holder_only = impl->holder_only || p.impl_->holder_only;
    for (const auto& b : p.impl_->bumps) {
      if (group && b.group.get() != group)
        throw Error("combo terms must share one group");
      group = b.group.get();
      impl->bumps.push_back(b);
      impl->bumps.back().coeff *= coeff;
    }
  }
  return Potential(impl);
}

Potential Potential::flip() const {
  auto impl = std::make_shared<Impl>(*impl_);
  for (auto& b : impl->bumps) b.flipped = !b.flipped;
  return Potential(impl);
}

Potential Potential::operator+(double kappa) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->constant += kappa;
  return Potential(impl);
}

Potential Potential::with_holder_only(bool on) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->holder_only = on;
  return Potential(impl);
}

double Potential::constant_part() const { return impl_->constant; }

bool Potential::has_bumps() const { return !impl_->bumps.empty(); }

bool Potential::all_bumps_flipped() const {
  if (impl_->bumps.empty()) return false;
  for (const auto& b : impl_->bumps)
    if (!b.flipped) return false;
  return true;
}

bool Potential::holder_only() const { return impl_->holder_only; }

bool Potential::reversible_hint() const {
  for (const auto& b : impl_->bumps)
    if (!b.spec.reversible) return false;
  return true;
}

double Potential::sup_abs_bound() const {
  double s = std::abs(impl_->constant);
  for (const auto& b : impl_->bumps)
    s += std::abs(b.coeff) * std::abs(b.spec.amplitude) * 2.0 *
         static_cast<double>(b.centers.size());
  return s;
}

const SchottkyGroup* Potential::group() const {
  return impl_->bumps.empty() ? nullptr : impl_->bumps.front().group.get();
}

double Potential::eval(const UnitTangent& v) const {
  double val = impl_->constant;
  if (impl_->bumps.empty()) return val;
  const SchottkyGroup* G = group();
  auto [red, u] = G->reduce_point(base_point(v));
  UnitTangent vr = u.empty() ? v : G->evaluate(u).apply(v);
  auto [x, theta] = to_base_form(vr);
  for (const auto& b : impl_->bumps)
    val += b.coeff * Impl::term_value(b, x, theta);
  return val;
}

// --- segment integration ---

namespace {

struct Segment {
  UnitTangent start;  // tangent at x pointing toward y
  double length;
};

// Adaptive Simpson on [a, b] given endpoint/midpoint values.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double fa, double m, double fm, double b, double fb,
                        double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(err) > 15.0 * tol)
      throw QuadratureFailure("adaptive refinement exceeded the depth cap");
    return left + right + err / 15.0;
  }
  return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol,
                          depth - 1) +
         adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol,
                          depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int depth) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, depth);
}

// Integral of one bump term along the segment, via a Lipschitz support scan
// followed by per-window adaptive Simpson in a ping-pong-reduced frame.
double bump_term_segment_integral(const Potential::Impl::BumpTerm& term,
                                  const Segment& seg,
                                  const QuadratureOptions& opts) {
  const SchottkyGroup& G = *term.group;
  const double rb = term.spec.spatial_radius;
  const double L = seg.length;
  const double step = 0.5 * rb;

  // distance from the reduced segment point to the nearest contributor centre
  auto dmin_at = [&](double t) {
    Point p = base_point(flow(seg.start, t));
    Point red = G.reduce_point(p).first;
    double dm = 1e300;
    for (const CenterData& c : term.centers)
      dm = std::min(dm, dist(red, c.base));
    return dm;
  };

  // 1-Lipschitz scan marking cells that can touch the support
  std::vector<std::pair<double, double>> cells;
  double t = 0.0;
  while (t <= L) {
    double dm = dmin_at(t);
    if (dm < rb + step)
      cells.emplace_back(std::max(0.0, t - step), std::min(L, t + step));
    double advance = std::max(step, dm - rb);
    if (t >= L) break;
    t = std::min(L, t + advance);
    if (t == L) {
      double dl = dmin_at(L);
      if (dl < rb + step)
        cells.emplace_back(std::max(0.0, L - step), L);
      break;
    }
  }
  if (cells.empty()) return 0.0;
  std::vector<std::pair<double, double>> windows;
  std::sort(cells.begin(), cells.end());
  for (auto& c : cells) {
    if (!windows.empty() && c.first <= windows.back().second)
      windows.back().second = std::max(windows.back().second, c.second);
    else
      windows.push_back(c);
  }

  double total = 0.0;
  const double chunk_len = 2.0 * rb;
  for (auto& [wa, wb] : windows) {
    int chunks = std::max(1, static_cast<int>(std::ceil((wb - wa) / chunk_len)));
    for (int ci = 0; ci < chunks; ++ci) {
      double a = wa + (wb - wa) * ci / chunks;
      double b = wa + (wb - wa) * (ci + 1) / chunks;
      double mid = 0.5 * (a + b);
      // reduce the chunk midpoint once and move the whole frame
      Point pm = base_point(flow(seg.start, mid));
      Word u = G.reduce_point(pm).second;
      UnitTangent frame =
          u.empty() ? seg.start : G.evaluate(u).apply(seg.start);
      // candidate centres for the whole chunk
      Point red_mid = base_point(flow(frame, mid));
      double reach = rb + 0.5 * (b - a) + 1e-9;
      std::vector<const CenterData*> cand;
      for (const CenterData& c : term.centers)
        if (dist(red_mid, c.base) < reach) cand.push_back(&c);
      if (cand.empty()) continue;
      auto f = [&](double s) {
        auto [p, theta] = to_base_form(flow(frame, s));
        double acc = 0.0;
        for (const CenterData* c : cand) {
          double ds = dist(p, c->base);
          if (ds >= rb) continue;
          double psi = std::abs(angle_gap(p, theta, *c));
          if (term.flipped) psi = kPi - psi;
          double ang;
          if (term.spec.reversible)
            ang = bump_profile(psi / term.spec.angular_width) +
                  bump_profile((kPi - psi) / term.spec.angular_width);
          else
            ang = bump_profile(psi / term.spec.angular_width);
          acc += bump_profile(ds / rb) * ang;
        }
        return term.spec.amplitude * acc;
      };
      // seed the adaptive rule on sub-panels no wider than rb/6: a support
      // sliver between the first Simpson nodes would otherwise be accepted
      // as an exact zero
      int sub = std::max(1, static_cast<int>(std::ceil((b - a) / (rb / 6.0))));
      for (int si = 0; si < sub; ++si) {
        double sa = a + (b - a) * si / sub;
        double sb = a + (b - a) * (si + 1) / sub;
        total += integrate_adaptive(f, sa, sb, opts.tol / sub, opts.depth_cap);
      }
    }
  }
  return total;
}

}  // namespace

double line_integral(const Potential& F, const Point& x, const Point& y,
                     const QuadratureOptions& opts) {
  double L = dist(x, y);
  if (L < 1e-14) return 0.0;
  double total = F.constant_part() * L;
  const auto& impl = *F.impl();
  if (impl.bumps.empty()) return total;

  if (impl.holder_only) {
    // fixed midpoint grid for potentials with unknown smoothness
    Potential bumps_only = F + (-F.constant_part());
    int n = std::max(4, static_cast<int>(std::ceil(L / opts.holder_step)));
    double h = L / n;
    UnitTangent v = tangent_towards(x, y);
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += bumps_only.eval(flow(v, (i + 0.5) * h));
    return total + acc * h;
  }

  Segment seg{tangent_towards(x, y), L};
  for (const auto& term : impl.bumps) {
    if (term.flipped) {
      // int_x^y F o iota = int_y^x F, an exact change of variables
      Segment rev{tangent_towards(y, x), L};
      auto unflipped = term;
      unflipped.flipped = false;
      total += term.coeff * bump_term_segment_integral(unflipped, rev, opts);
    } else {
      total += term.coeff * bump_term_segment_integral(term, seg, opts);
    }
  }
  return total;
}

double period(const Potential& F, const Isometry& g,
              const QuadratureOptions& opts) {
  auto [plus, minus] = axis(g);
  Point on_axis = geodesic_eval(minus, plus, 0.0, Point());
  return line_integral(F, on_axis, g.apply(on_axis), opts);
}

double period(const Potential& F, const SchottkyGroup& G, const ConjClass& cc,
              const QuadratureOptions& opts) {
  return period(F, G.evaluate(cc.rep), opts);
}

CocycleValue gibbs_cocycle(const Potential& F, double sigma,
                           const BoundaryPoint& xi, const Point& x,
                           const Point& y, const TruncationOptions& topts,
                           const QuadratureOptions& qopts) {
  CocycleValue out;
  double beta = busemann(xi, x, y);
  // constant part in closed form: C_{kappa} = -kappa beta, plus sigma beta
  out.value = (sigma - F.constant_part()) * beta;
  if (!F.has_bumps()) return out;
  if (dist(x, y) < 1e-14) return out;

  Potential bumps_only = F + (-F.constant_part());
  // Keep the ray end well inside the precision range of disc coordinates:
  // past radius ~18 the boundary gap 1-|z| loses enough bits that the
  // integral noise outgrows the truncation tail.
  double cap = std::min(topts.t_cap, 18.0 - dist(Point(), x));
  cap = std::max(cap, topts.t_start);
  UnitTangent ray = ray_toward(x, xi);
  auto I = [&](double T) {
    Point xt = base_point(flow(ray, T));
    return line_integral(bumps_only, y, xt, qopts) -
           line_integral(bumps_only, x, xt, qopts);
  };
  double T = std::max(1.0, topts.t_start);
  double prev = I(T);
  double inc = 1e300, inc_before = 1e300;
  while (T < cap) {
    T = std::min(1.5 * T, cap);
    double cur = I(T);
    inc_before = inc;
    inc = std::abs(cur - prev);
    prev = cur;
    // increments of the two-ray difference can oscillate through zero, so
    // a single small step is not yet convergence
    if (inc < topts.tol && inc_before < topts.tol) break;
  }
  if (inc >= topts.tol && T >= cap - 1e-9) {
    // probe the tail amplitude with one fixed backward step; oscillating
    // tails can make the multiplicative increments deceptively small
    double probe = std::abs(I(cap - 1.0) - prev);
    inc = std::max(inc, probe);
    out.capped = true;
  }
  out.value += prev;
  double last = (inc_before < 1e299) ? std::max(inc, inc_before) : inc;
  out.error_bound = 4.0 * last + topts.tol;
  return out;
}

double log_gap(const Potential& F, double sigma, const Point& x,
               const BoundaryPoint& xi, const BoundaryPoint& eta,
               const TruncationOptions& topts, const QuadratureOptions& qopts) {
  if (angle_dist(xi.theta, eta.theta) < 1e-13)
    throw CoincidentPoints("gap endpoints coincide");
  Point u = geodesic_eval(xi, eta, 0.0, x);
  CocycleValue c1 = gibbs_cocycle(F, sigma, eta, x, u, topts, qopts);
  CocycleValue c2 = gibbs_cocycle(F.flip(), sigma, xi, x, u, topts, qopts);
  return -0.5 * (c1.value + c2.value);
}

double gap(const Potential& F, double sigma, const Point& x,
           const BoundaryPoint& xi, const BoundaryPoint& eta,
           const TruncationOptions& topts, const QuadratureOptions& qopts) {
  return std::exp(log_gap(F, sigma, x, xi, eta, topts, qopts));
}

double log_crossratio(const Potential& F, const BoundaryPoint& a,
                      const BoundaryPoint& b, const BoundaryPoint& c,
                      const BoundaryPoint& d, const TruncationOptions& topts,
                      const QuadratureOptions& qopts) {
  const BoundaryPoint* pts[4] = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (angle_dist(pts[i]->theta, pts[j]->theta) < 1e-13)
        throw CoincidentPoints("crossratio needs pairwise distinct points");
  Point x;  // origin; the combination is base-point independent
  return log_gap(F, 0.0, x, a, c, topts, qopts) +
         log_gap(F, 0.0, x, b, d, topts, qopts) -
         log_gap(F, 0.0, x, a, d, topts, qopts) -
         log_gap(F, 0.0, x, b, c, topts, qopts);
}

double crossratio(const Potential& F, const BoundaryPoint& a,
                  const BoundaryPoint& b, const BoundaryPoint& c,
                  const BoundaryPoint& d, const TruncationOptions& topts,
                  const QuadratureOptions& qopts) {
  return std::exp(log_crossratio(F, a, b, c, d, topts, qopts));
}

CrossratioLimit crossratio_period_limit(const Potential& F, const Isometry& g,
                                        const BoundaryPoint& xi, int n_max,
                                        const TruncationOptions& topts,
                                        const QuadratureOptions& qopts) {
  auto [gp, gm] = axis(g);
  if (angle_dist(xi.theta, gp.theta) < 1e-9 ||
      angle_dist(xi.theta, gm.theta) < 1e-9)
    throw CoincidentPoints("xi must avoid the fixed points");
  CrossratioLimit out;
  Isometry ginv = g.inverse();
  std::vector<double> raw_logs;
  for (int n = 1; n <= n_max; ++n) {
    // recentre by g^{-floor(n/2)}: an exact invariance of the crossratio
    int m = n / 2;
    Isometry fwd;  // g^{n-m}
    for (int i = 0; i < n - m; ++i) fwd = fwd * g;
    Isometry back;  // g^{-m}
    for (int i = 0; i < m; ++i) back = back * ginv;
    BoundaryPoint mid_fwd = fwd.apply(xi);
    BoundaryPoint mid_back = back.apply(xi);
    // past this angular resolution the gap values are pure rounding noise
    if (angle_dist(mid_fwd.theta, gp.theta) < 1e-7 ||
        angle_dist(mid_back.theta, gm.theta) < 1e-7)
      break;
    try {
      double lc = log_crossratio(F, gm, mid_fwd, mid_back, gp, topts, qopts);
      raw_logs.push_back(lc);
      out.sequence.push_back(lc / n);
    } catch (const Error&) {
      break;  // out of representable range; accelerate what exists
    }
  }
  if (out.sequence.empty())
    throw InsufficientData("no crossratio values computable");
  // ln L_n = n * target + c0(n) with c0 stabilising geometrically, so
  // stride-2 increments of ln L_n (stride 2 because the recentring index
  // floor(n/2) advances on alternate steps) reach the target geometrically
  // and accelerate well; the raw sequence carries a c0/n tail that Aitken
  // cannot remove.
  if (raw_logs.size() >= 6) {
    std::vector<double> incr;
    for (size_t i = 2; i < raw_logs.size(); ++i)
      incr.push_back(0.5 * (raw_logs[i] - raw_logs[i - 2]));
    out.aitken = aitken_limit(incr);
  } else {
    out.aitken = out.sequence.back();
  }
  return out;
}

double su_cocycle(const Potential& F, double delta, const UnitTangent& v,
                  const UnitTangent& w, const TruncationOptions& topts,
                  const QuadratureOptions& qopts) {
  if (angle_dist(v.xi_minus.theta, w.xi_minus.theta) > 1e-9)
    throw NotSameLeaf("vectors do not share the backward endpoint");
  Point pv = base_point(v), pw = base_point(w);
  if (std::abs(busemann(v.xi_minus, pv, pw)) > 1e-8)
    throw NotSameLeaf("vectors not on one horosphere");
  CocycleValue c = gibbs_cocycle(F.flip(), delta, v.xi_minus, pv, pw, topts,
                                 qopts);
  return -c.value;
}

}  // namespace gibbs
