#include "gibbs/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "gibbs/accum.hpp"

namespace gibbs {

namespace {

int bucket_of(double d, double c) {
  if (d <= 0.0) return 0;
  return static_cast<int>(std::ceil(d / c - 1e-12));
}

std::optional<Character> negate(const std::optional<Character>& chi) {
  if (!chi) return std::nullopt;
  Character out = *chi;
  for (double& v : out.values) v = -v;
  return out;
}

bool in_cone(const std::optional<BoundaryArcSet>& A, const Point& vertex,
             const Point& target) {
  if (!A) return true;
  if (dist(vertex, target) < 1e-12)
    return A->measure() >= kTwoPi - 1e-12;  // vertex atom: full circle only
  return A->contains(ray_endpoint(vertex, target));
}

}  // namespace

void CountTable::finalize_cumulative() {
  log_cumulative.clear();
  cum_counts.clear();
  double cum = -std::numeric_limits<double>::infinity();
  uint64_t n = 0;
  for (size_t j = 0; j < annular.log_sums.size(); ++j) {
    if (annular.counts[j] > 0) {
      double la = annular.log_sums[j];
      double m = std::max(cum, la);
      cum = m + std::log(std::exp(cum - m) + std::exp(la - m));
      n += annular.counts[j];
    }
    log_cumulative.push_back(cum);
    cum_counts.push_back(n);
  }
}

CountTable orbital_count(const SchottkyGroup& G, const Potential& F,
                         const std::optional<Character>& chi, const Point& x,
                         const Point& y,
                         const std::optional<BoundaryArcSet>& U,
                         const std::optional<BoundaryArcSet>& V, double t_max,
                         const CountOptions& opts) {
  if (F.all_bumps_flipped()) {
    // the change of variable gamma -> gamma^{-1} swaps (x, U) with (y, V)
    return orbital_count(G, F.flip(), negate(chi), y, x, V, U, t_max, opts);
  }
  G.validate();
  const double c = opts.grid_step;
  const int n_buckets = bucket_of(t_max, c) + 1;

  std::vector<Letter> tasks = G.alphabet();
  // per-task raw log-terms per bucket, merged canonically afterwards
  std::vector<std::vector<std::vector<double>>> terms(
      tasks.size() + 1,
      std::vector<std::vector<double>>(static_cast<size_t>(n_buckets)));
  std::vector<std::vector<double>> dmax(
      tasks.size() + 1, std::vector<double>(static_cast<size_t>(n_buckets)));

  auto consider = [&](size_t slot, const Word& w, const Isometry& g,
                      double d) {
    if (d > t_max) return;
    Point gy = g.apply(y);
    if (!in_cone(U, x, gy)) return;
    if (!in_cone(V, y, g.inverse().apply(x))) return;
    double log_term = F.is_constant() ? F.constant_part() * d
                                      : line_integral(F, x, gy, opts.quad);
    if (chi) log_term += (*chi)(w);
    int b = bucket_of(d, c);
    terms[slot][static_cast<size_t>(b)].push_back(log_term);
    dmax[slot][static_cast<size_t>(b)] =
        std::max(dmax[slot][static_cast<size_t>(b)], d);
  };

  consider(0, Word(), Isometry(), displacement(x, Isometry(), y));

  std::vector<EnumStats> stats(tasks.size());
  auto run_task = [&](size_t ti) {
    EnumOptions eop;
    eop.max_displacement = t_max;
    eop.node_budget = opts.node_budget / std::max<size_t>(1, tasks.size());
    eop.include_identity = false;
    stats[ti] = G.enumerate_partition(
        tasks[ti], eop, x, y,
        [&](const Word& w, const Isometry& g, double d) {
          consider(ti + 1, w, g, d);
        });
  };
  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    for (size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int wk = 0; wk < workers; ++wk)
      pool.emplace_back([&] {
        for (size_t ti = next.fetch_add(1); ti < tasks.size();
             ti = next.fetch_add(1))
          run_task(ti);
      });
    for (auto& th : pool) th.join();
  }

  CountTable out;
  out.grid_step = c;
  out.t_max = t_max;
  out.annular.bucket_width = c;
  out.annular.horizon = t_max;
  for (const auto& st : stats)
    out.annular.truncated = out.annular.truncated || st.budget_exceeded;
  out.annular.log_sums.assign(static_cast<size_t>(n_buckets),
                              -std::numeric_limits<double>::infinity());
  out.annular.counts.assign(static_cast<size_t>(n_buckets), 0);
  out.annular.max_disp.assign(static_cast<size_t>(n_buckets), 0.0);
  for (int b = 0; b < n_buckets; ++b) {
    std::vector<double> all;
    for (size_t slot = 0; slot < terms.size(); ++slot) {
      auto& v = terms[slot][static_cast<size_t>(b)];
      all.insert(all.end(), v.begin(), v.end());
      out.annular.max_disp[static_cast<size_t>(b)] =
          std::max(out.annular.max_disp[static_cast<size_t>(b)],
                   dmax[slot][static_cast<size_t>(b)]);
    }
    out.annular.counts[static_cast<size_t>(b)] = all.size();
    out.annular.terms += all.size();
    if (!all.empty())
      out.annular.log_sums[static_cast<size_t>(b)] =
          canonical_log_sum_exp(std::move(all));
  }
  out.finalize_cumulative();
  return out;
}

CountTable periodic_count(const SchottkyGroup& G, const Potential& F,
                          const std::optional<Character>& chi, double t_max,
                          bool primitive_only, const CountOptions& opts) {
  GurevichOptions gop;
  gop.bucket_width = opts.grid_step;
  gop.window_radius = 1e9;  // count every class
  gop.primitive_only = primitive_only;
  gop.node_budget = opts.node_budget;
  gop.quad = opts.quad;
  CountTable out;
  out.grid_step = opts.grid_step;
  out.t_max = t_max;
  out.annular = gurevich_table(G, F, chi, t_max, gop);
  out.finalize_cumulative();
  return out;
}

PressureEstimate loggrowth_fit(const CountTable& table) {
  // detect an eventually-constant count (cone missing the limit set)
  size_t nb = table.annular.log_sums.size();
  if (nb >= 6) {
    bool tail_empty = true;
    for (size_t j = nb - nb / 3; j < nb; ++j)
      if (table.annular.counts[j] > 0) tail_empty = false;
    if (tail_empty) {
      PressureEstimate flat;
      flat.value = 0.0;
      flat.stderr_ = 0.0;
      flat.method = "eventually-constant";
      flat.converged = true;
      return flat;
    }
  }
  return critical_exponent(table.annular);
}

SectorRatio sector_ratio_test(const SchottkyGroup& G, const Potential& F,
                              const Point& x, const Point& y,
                              const BoundaryArcSet& U, double t_max,
                              const AtomicDensity& density,
                              const CountOptions& opts) {
  SectorRatio out;
  CountTable sector =
      orbital_count(G, F, std::nullopt, x, y, U, std::nullopt, t_max, opts);
  CountTable plain = orbital_count(G, F, std::nullopt, x, y, std::nullopt,
                                   std::nullopt, t_max, opts);
  out.count_ratio = std::exp(sector.log_cumulative.back() -
                             plain.log_cumulative.back());
  // mass ratio over the limit-set-supported part of the cloud (word length
  // >= 2): the shallow atoms' weight is a finite-s artifact of the
  // normalizer and their ray directions skew proper arcs
  double mu_u = 0.0, mu_all = 0.0;
  for (const Atom& a : density.atoms()) {
    if (a.word.size() < 2 || !a.has_ray) continue;
    double w = std::exp(a.log_weight);
    mu_all += w;
    if (U.contains(a.ray)) mu_u += w;
  }
  out.mass_ratio = (mu_all > 0.0) ? mu_u / mu_all : 0.0;
  // warn when visible mass sits within 1e-3 of the arc endpoints
  double near = 0.0, total = density.total_mass();
  for (const Atom& a : density.atoms()) {
    if (!a.has_ray) continue;
    for (const ArcInterval& iv : U.arcs()) {
      double d1 = angle_dist(a.ray.theta, iv.a);
      double d2 = angle_dist(a.ray.theta, angle_normalize(iv.a + iv.len));
      if (std::min(d1, d2) < 1e-3) near += std::exp(a.log_weight);
    }
  }
  out.boundary_mass_warning = near > 0.01 * total;
  return out;
}

EquidistResult equidistribution_test(const SchottkyGroup& G,
                                     const Potential& F, double t_max,
                                     const HopfBump& h, const HopfBump& ref,
                                     const ProductGibbs& pg,
                                     const CountOptions& opts) {
  G.validate();
  // periodic-orbit side: straight lines gamma * Axe(g) meeting the bump's
  // Hopf support; translates enumerated to a fixed small depth
  const double int_q = 32.0 / 35.0;  // integral of (1-u^2)^3 over [-1, 1]
  std::vector<std::pair<Word, Isometry>> translates;
  translates.emplace_back(Word(), Isometry());
  EnumOptions eop;
  eop.max_wordlen = 6;
  eop.include_identity = false;
  G.enumerate(eop, G.base_point(), G.base_point(),
              [&](const Word& w, const Isometry& g, double) {
                translates.emplace_back(w, g);
              });

  auto orbit_integral = [&](const HopfBump& bump) {
    std::vector<double> acc;
    auto classes = G.conjugacy_classes(t_max, opts.node_budget);
    for (const auto& cls : classes) {
      if (!cls.primitive) continue;
      Isometry iso = G.evaluate(cls.rep);
      auto [plus, minus] = axis(iso);
      double weight = std::exp(
          F.is_constant()
              ? F.constant_part() * cls.translation_length
              : period(F, G, cls, opts.quad));
      for (const auto& [w, g] : translates) {
        BoundaryPoint xm = g.apply(minus), xp = g.apply(plus);
        double ang = bump_profile(angle_dist(xm.theta, bump.xi0) /
                                  bump.width_xi) *
                     bump_profile(angle_dist(xp.theta, bump.eta0) /
                                  bump.width_eta);
        if (ang == 0.0) continue;
        // the line integral of the t-factor over the whole translate
        acc.push_back(weight * bump.amplitude * ang * bump.width_t * int_q);
      }
    }
    return canonical_sum(std::move(acc));
  };

  EquidistResult out;
  out.orbit_h = orbit_integral(h);
  out.orbit_ref = orbit_integral(ref);
  out.gibbs_h = gibbs_integral(pg, h, {}, opts.quad);
  out.gibbs_ref = gibbs_integral(pg, ref, {}, opts.quad);
  return out;
}

}  // namespace gibbs
