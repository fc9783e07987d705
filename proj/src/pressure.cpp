#include "gibbs/pressure.hpp"

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

}  // namespace

SeriesTable SeriesTable::rebucket(int factor) const {
  SeriesTable out;
  out.bucket_width = bucket_width * factor;
  out.horizon = horizon;
  out.truncated = truncated;
  out.terms = terms;
  size_t nb = (log_sums.size() + factor - 1) / static_cast<size_t>(factor) + 1;
  out.log_sums.assign(nb, -std::numeric_limits<double>::infinity());
  out.counts.assign(nb, 0);
  for (size_t j = 0; j < log_sums.size(); ++j) {
    if (counts[j] == 0) continue;
    size_t J = (j + static_cast<size_t>(factor) - 1) /
               static_cast<size_t>(factor);
    double a = out.log_sums[J], b = log_sums[j];
    double m = std::max(a, b);
    out.log_sums[J] = std::isfinite(m)
                          ? m + std::log(std::exp(a - m) + std::exp(b - m))
                          : b;
    out.counts[J] += counts[j];
  }
  return out;
}

void SeriesTable::nonzero(std::vector<double>* n,
                          std::vector<double>* logs) const {
  n->clear();
  logs->clear();
  for (size_t j = 0; j < log_sums.size(); ++j) {
    if (counts[j] == 0) continue;
    n->push_back(static_cast<double>(j) * bucket_width);
    logs->push_back(log_sums[j]);
  }
}

bool SeriesTable::bitwise_equal(const SeriesTable& o) const {
  if (bucket_width != o.bucket_width || counts != o.counts ||
      log_sums.size() != o.log_sums.size())
    return false;
  for (size_t i = 0; i < log_sums.size(); ++i) {
    bool inf_a = !std::isfinite(log_sums[i]);
    bool inf_b = !std::isfinite(o.log_sums[i]);
    if (inf_a != inf_b) return false;
    if (!inf_a && log_sums[i] != o.log_sums[i]) return false;
  }
  return true;
}

namespace {

// Shared accumulation for weighted orbit tables: partitions run
// independently (possibly on threads), each stores raw log-terms per bucket,
// and the merge sorts every bucket before summation so results do not
// depend on the partitioning or worker count.
struct TableAccumulator {
  int n_buckets;
  std::vector<std::vector<std::vector<double>>> terms;  // [task][bucket]
  std::vector<std::vector<double>> dmax;                // [task][bucket]

  TableAccumulator(int tasks, int buckets) : n_buckets(buckets) {
    terms.assign(static_cast<size_t>(tasks),
                 std::vector<std::vector<double>>(
                     static_cast<size_t>(buckets)));
    dmax.assign(static_cast<size_t>(tasks),
                std::vector<double>(static_cast<size_t>(buckets), 0.0));
  }

  void add(int task, int bucket, double log_term, double d) {
    if (bucket < 0 || bucket >= n_buckets) return;
    terms[static_cast<size_t>(task)][static_cast<size_t>(bucket)].push_back(
        log_term);
    auto& dm = dmax[static_cast<size_t>(task)][static_cast<size_t>(bucket)];
    dm = std::max(dm, d);
  }

  SeriesTable finalize(double c, double horizon, bool truncated) {
    SeriesTable out;
    out.bucket_width = c;
    out.horizon = horizon;
    out.truncated = truncated;
    out.log_sums.assign(static_cast<size_t>(n_buckets),
                        -std::numeric_limits<double>::infinity());
    out.counts.assign(static_cast<size_t>(n_buckets), 0);
    out.max_disp.assign(static_cast<size_t>(n_buckets), 0.0);
    for (int b = 0; b < n_buckets; ++b) {
      std::vector<double> all;
      for (size_t ti = 0; ti < terms.size(); ++ti) {
        auto& v = terms[ti][static_cast<size_t>(b)];
        all.insert(all.end(), v.begin(), v.end());
        out.max_disp[static_cast<size_t>(b)] = std::max(
            out.max_disp[static_cast<size_t>(b)], dmax[ti][static_cast<size_t>(b)]);
      }
      out.counts[static_cast<size_t>(b)] = all.size();
      out.terms += all.size();
      if (!all.empty())
        out.log_sums[static_cast<size_t>(b)] =
            canonical_log_sum_exp(std::move(all));
    }
    return out;
  }
};

}  // namespace

SeriesTable annular_table(const SchottkyGroup& G, const Potential& F,
                          const std::optional<Character>& chi, const Point& x,
                          const Point& y, double n_max,
                          const TableOptions& opts) {
  if (F.all_bumps_flipped()) {
    // Q_{F o iota, chi, x, y} = Q_{F, -chi, y, x} term-for-term under the
    // change of variable gamma -> gamma^{-1}
    return annular_table(G, F.flip(), negate(chi), y, x, n_max, opts);
  }
  G.validate();
  const double c = opts.bucket_width;
  const int n_buckets = bucket_of(n_max, c) + 1;

  std::vector<Letter> tasks = opts.alphabet;
  if (tasks.empty()) tasks = G.alphabet();
  std::sort(tasks.begin(), tasks.end(), [](Letter a, Letter b) {
    return letter_index(a) < letter_index(b);
  });

  TableAccumulator acc(static_cast<int>(tasks.size()) + 1, n_buckets);
  bool include_identity = opts.alphabet.empty();
  if (include_identity) {
    double d0 = dist(x, y);
    if (d0 <= n_max) {
      bool keep = !opts.kernel_filter || !chi || (*chi)(Word()) == 0.0;
      if (keep) acc.add(0, bucket_of(d0, c), 0.0, d0);
    }
  }

  std::vector<EnumStats> stats(tasks.size());
  auto run_task = [&](size_t ti) {
    EnumOptions eop;
    eop.max_displacement = n_max;
    eop.node_budget = opts.node_budget / std::max<size_t>(1, tasks.size());
    eop.include_identity = false;
    eop.alphabet = opts.alphabet;
    stats[ti] = G.enumerate_partition(
        tasks[ti], eop, x, y, [&](const Word& w, const Isometry& g, double d) {
          if (opts.kernel_filter && chi && (*chi)(w) != 0.0) return;
          double log_term = line_integral(F, x, g.apply(y), opts.quad);
          if (chi) log_term += (*chi)(w);
          acc.add(static_cast<int>(ti) + 1, bucket_of(d, c), log_term, d);
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
  bool truncated = false;
  for (const auto& st : stats) truncated = truncated || st.budget_exceeded;
  return acc.finalize(c, n_max, truncated);
}

namespace {

// Growth-rate estimation with regime selection.
//
// Three data regimes call for different fits:
//  - dense tables with a healthy exponent: least squares on the cumulative
//    log-sums (annular sums oscillate with the length-spectrum lattice, the
//    cumulative series averages it out);
//  - small exponent over the window (delta * span < 3): the cumulative
//    series is dominated by its head and curves; fit the annular sums;
//  - lattice-dominated tables (many empty annuli, e.g. cyclic groups or
//    strongly twisted series): fit the nonzero annuli against the true
//    in-bucket displacement maxima, which aligns abscissas to the lattice.
// poly_degree adds degree * ln(t) to the series first: periodic-orbit
// counts of nonelementary groups carry a 1/t prefactor that would
// otherwise bias the slope by about -1/t over the window.
PressureEstimate estimate_from_table(const SeriesTable& table,
                                     double poly_degree = 0.0) {
  const SeriesTable& cur = table;
  int nb = static_cast<int>(cur.log_sums.size());
  int discard = std::max(4, static_cast<int>(std::floor(cur.horizon / 3.0)));
  int j_lo = bucket_of(static_cast<double>(discard), cur.bucket_width) + 1;

  auto boosted = [&](int j) {
    double t = std::max(1.0, cur.max_disp[static_cast<size_t>(j)]);
    return cur.log_sums[static_cast<size_t>(j)] - poly_degree * std::log(t);
  };

  // annular points over the window (nonzero only, lattice abscissas)
  std::vector<double> ax, ay;
  int window_buckets = 0, empties = 0;
  for (int j = j_lo; j < nb; ++j) {
    ++window_buckets;
    if (cur.counts[static_cast<size_t>(j)] == 0) {
      ++empties;
      continue;
    }
    ax.push_back(cur.max_disp[static_cast<size_t>(j)]);
    ay.push_back(boosted(j));
  }
  if (ax.size() < 6)
    throw InsufficientData(
        "fewer than 6 nonzero annuli past the transient window");
  SlopeFit ann = fit_slope(ax, ay);

  // cumulative points at bucket edges
  std::vector<double> cx, cy;
  double cum = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < nb; ++j) {
    if (cur.counts[static_cast<size_t>(j)] > 0) {
      double la = boosted(j);
      double m = std::max(cum, la);
      cum = m + std::log(std::exp(cum - m) + std::exp(la - m));
    }
    if (j > j_lo && std::isfinite(cum)) {
      cx.push_back(static_cast<double>(j) * cur.bucket_width);
      cy.push_back(cum);
    }
  }
  std::optional<SlopeFit> cum_fit;
  if (cx.size() >= 3) cum_fit = fit_slope(cx, cy);

  double span = cur.horizon - static_cast<double>(discard);
  bool lattice = empties > window_buckets / 3;
  bool small_exponent =
      cum_fit && cum_fit->slope * span < 3.0 && cum_fit->slope * span > -1e9;
  bool use_annular = lattice || small_exponent || !cum_fit;

  PressureEstimate est;
  est.method = "regression";
  est.window_lo = j_lo + 1;
  est.window_hi = nb - 1;
  const SlopeFit& primary = use_annular ? ann : *cum_fit;
  est.value = primary.slope;
  est.stderr_ = primary.stderr_;
  est.ls_slope = primary.slope;
  est.residuals = primary.residuals;
  if (cum_fit && !lattice)
    est.stderr_ = std::max(est.stderr_,
                           std::abs(ann.slope - cum_fit->slope) / 3.0);

  // Aitken on the cumulative increments as the secondary diagnostic
  if (cy.size() >= 6) {
    std::vector<double> incr;
    for (size_t i = 1; i < cy.size(); ++i) {
      double dn = cx[i] - cx[i - 1];
      if (dn > 0.0) incr.push_back((cy[i] - cy[i - 1]) / dn);
    }
    double spread = 0.0;
    est.aitken = aitken_limit(incr, &spread);
    est.aitken_ok = std::isfinite(est.aitken) &&
                    spread < std::max(est.stderr_, 1e-12) * 4.0;
  } else {
    est.aitken = est.value;
    est.aitken_ok = false;
  }
  est.converged = std::abs(est.aitken - est.value) <=
                  3.0 * std::max(est.stderr_, 1e-12);
  return est;
}

}  // namespace

PressureEstimate critical_exponent(const SeriesTable& table) {
  return estimate_from_table(table);
}

PressureEstimate critical_exponent(const SchottkyGroup& G, const Potential& F,
                                   const std::optional<Character>& chi,
                                   const Point& x, const Point& y,
                                   double n_max, const TableOptions& opts) {
  return critical_exponent(annular_table(G, F, chi, x, y, n_max, opts));
}

PartialSums poincare_partial(const SchottkyGroup& G, const Potential& F,
                             const std::optional<Character>& chi, double s,
                             const Point& x, const Point& y, double n_max,
                             const TableOptions& opts) {
  SeriesTable t = annular_table(G, F, chi, x, y, n_max, opts);
  PartialSums out;
  double acc = -std::numeric_limits<double>::infinity();
  std::vector<double> weighted;
  for (size_t j = 0; j < t.log_sums.size(); ++j) {
    if (t.counts[j] > 0) {
      double lw =
          t.log_sums[j] - s * static_cast<double>(j) * t.bucket_width;
      double m = std::max(acc, lw);
      acc = m + std::log(std::exp(acc - m) + std::exp(lw - m));
      weighted.push_back(lw);
    }
    out.log_partial.push_back(acc);
  }
  if (weighted.size() >= 6) {
    size_t lo = weighted.size() / 3;
    std::vector<double> xs, ys;
    for (size_t i = lo; i < weighted.size(); ++i) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(weighted[i]);
    }
    SlopeFit fit = fit_slope(xs, ys);
    if (fit.slope < -0.02)
      out.verdict = SeriesVerdict::converged;
    else if (fit.slope > 0.02)
      out.verdict = SeriesVerdict::divergent;
    else
      out.verdict = SeriesVerdict::indeterminate;
  }
  if (out.log_partial.size() >= 2) {
    double half = out.log_partial[out.log_partial.size() / 2];
    out.tail_ratio = 1.0 - std::exp(half - out.log_partial.back());
  }
  return out;
}

// --- Gurevich pressure over periodic orbits ---

SeriesTable gurevich_table(const SchottkyGroup& G, const Potential& F,
                           const std::optional<Character>& chi, double t_max,
                           const GurevichOptions& opts) {
  if (F.all_bumps_flipped()) {
    // Per_{F o iota}(g) = Per_F(g^{-1}); the class set is inverse-closed
    return gurevich_table(G, F.flip(), negate(chi), t_max, opts);
  }
  G.validate();
  double window = opts.window_radius;
  if (window < 0.0) {
    window = 0.0;
    for (Letter l : G.alphabet()) {
      auto [p, m] = axis(G.letter_isometry(l));
      window = std::max(window, dist_to_line(G.base_point(), m, p));
    }
    window += 2.5;
  }
  auto classes = G.conjugacy_classes(t_max, opts.node_budget);
  const double c = opts.bucket_width;
  TableAccumulator acc(1, bucket_of(t_max, c) + 1);
  for (const auto& cls : classes) {
    if (opts.primitive_only && !cls.primitive) continue;
    // the orbit meets B(base, window) iff some cyclic representative's
    // axis passes within the window of the base point
    double best = 1e300;
    Word rot = cls.rep;
    for (size_t r = 0; r < cls.rep.size() && best > window; ++r) {
      if (r > 0)
        std::rotate(rot.letters.begin(), rot.letters.begin() + 1,
                    rot.letters.end());
      auto [p, m] = axis(G.evaluate(rot));
      best = std::min(best, dist_to_line(G.base_point(), m, p));
    }
    if (best > window) continue;
    double log_term = period(F, G, cls, opts.quad);
    if (chi) log_term += (*chi)(cls.rep);
    acc.add(0, bucket_of(cls.translation_length, c), log_term,
            cls.translation_length);
  }
  return acc.finalize(c, t_max, false);
}

PressureEstimate gurevich_pressure(const SchottkyGroup& G, const Potential& F,
                                   const std::optional<Character>& chi,
                                   double t_max, const GurevichOptions& opts) {
  // periodic-orbit counts of nonelementary groups grow like e^{delta t}/t
  // (prime-geodesic asymptotics), cyclic ones have no polynomial factor
  double degree = (G.rank() >= 2) ? -1.0 : 0.0;
  SeriesTable table = gurevich_table(G, F, chi, t_max, opts);
  PressureEstimate est = estimate_from_table(table, degree);
  // at desk horizons the strength of the polynomial prefactor is the main
  // systematic; report the spread between the two models as uncertainty
  try {
    PressureEstimate alt = estimate_from_table(table, degree - 1.0);
    est.stderr_ = std::max(est.stderr_, std::abs(est.value - alt.value) / 2.0);
  } catch (const InsufficientData&) {
  }
  est.method = "gurevich-regression";
  return est;
}

// --- transfer operator ---

namespace {

struct PanelGrid {
  double lo = 0.0, hi = 0.0;    // lifted angular interval
  std::vector<double> nodes;    // Chebyshev-Lobatto points in [lo, hi]
};

}  // namespace

TransferOperator::TransferOperator(const SchottkyGroup& G, const Potential& F,
                                   const TransferOptions& opts)
    : max_iterations_(opts.max_iterations), eig_tol_(opts.eig_tol) {
  G.validate();
  if (opts.grid_size < 64) throw Error("transfer grid needs >= 64 nodes/arc");
  const int n_letters = 2 * G.rank();
  const int panels = std::max(1, opts.panels);
  const int m = std::max(8, opts.grid_size / panels);

  struct ArcInfo {
    double a = 0.0, len = 0.0;
    std::vector<PanelGrid> grids;
    int offset = 0;
  };
  std::vector<ArcInfo> arcs(static_cast<size_t>(n_letters));
  std::vector<double> u(static_cast<size_t>(m));
  std::vector<double> bary(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    u[static_cast<size_t>(k)] = -std::cos(kPi * k / (m - 1));
    bary[static_cast<size_t>(k)] = (k % 2 == 0) ? 1.0 : -1.0;
    if (k == 0 || k == m - 1) bary[static_cast<size_t>(k)] *= 0.5;
  }
  int offset = 0;
  for (int li = 0; li < n_letters; ++li) {
    auto [ba, bb] = disc_arc(G.letter_disc(index_letter(li)));
    ArcInfo& info = arcs[static_cast<size_t>(li)];
    info.a = ba.theta;
    info.len = angle_normalize(bb.theta - ba.theta);
    info.offset = offset;
    for (int p = 0; p < panels; ++p) {
      PanelGrid g;
      g.lo = info.a + info.len * p / panels;
      g.hi = info.a + info.len * (p + 1) / panels;
      g.nodes.resize(static_cast<size_t>(m));
      for (int k = 0; k < m; ++k)
        g.nodes[static_cast<size_t>(k)] =
            0.5 * (g.lo + g.hi) +
            0.5 * (g.hi - g.lo) * u[static_cast<size_t>(k)];
      info.grids.push_back(std::move(g));
      offset += m;
    }
  }

  const Point x0 = G.base_point();
  nodes_.resize(static_cast<size_t>(offset));
  for (int li = 0; li < n_letters; ++li) {
    const ArcInfo& info = arcs[static_cast<size_t>(li)];
    Letter j = index_letter(li);
    for (int p = 0; p < panels; ++p) {
      const PanelGrid& g = info.grids[static_cast<size_t>(p)];
      for (int k = 0; k < m; ++k) {
        int ni = info.offset + p * m + k;
        Node& node = nodes_[static_cast<size_t>(ni)];
        node.theta = angle_normalize(g.nodes[static_cast<size_t>(k)]);
        BoundaryPoint xi(node.theta);
        for (int bi = 0; bi < n_letters; ++bi) {
          Letter i = index_letter(bi);
          if (i == static_cast<Letter>(-j)) continue;
          const Isometry& h = G.letter_isometry(i);
          BoundaryPoint eta = h.apply(xi);
          Branch br;
          br.beta = busemann(eta, x0, h.apply(x0));
          br.cocycle_base =
              -gibbs_cocycle(F, 0.0, eta, x0, h.apply(x0), opts.trunc,
                             opts.quad)
                   .value;
          const ArcInfo& tgt = arcs[static_cast<size_t>(bi)];
          double rel = angle_normalize(eta.theta - tgt.a);
          if (rel > tgt.len) {
            // numerical spill just outside the arc; clamp to the near end
            rel = (angle_dist(eta.theta, tgt.a) <
                   angle_dist(eta.theta, tgt.a + tgt.len))
                      ? 0.0
                      : tgt.len;
          }
          int pi =
              std::min(panels - 1, static_cast<int>(rel / tgt.len * panels));
          const PanelGrid& tg = tgt.grids[static_cast<size_t>(pi)];
          double theta_l = tgt.a + rel;
          br.target_offset = tgt.offset + pi * m;
          br.target_len = m;
          br.interp.assign(static_cast<size_t>(m), 0.0);
          int exact = -1;
          for (int q = 0; q < m; ++q) {
            if (std::abs(theta_l - tg.nodes[static_cast<size_t>(q)]) < 1e-15) {
              exact = q;
              break;
            }
          }
          if (exact >= 0) {
            br.interp[static_cast<size_t>(exact)] = 1.0;
          } else {
            double denom = 0.0;
            for (int q = 0; q < m; ++q) {
              double t = bary[static_cast<size_t>(q)] /
                         (theta_l - tg.nodes[static_cast<size_t>(q)]);
              br.interp[static_cast<size_t>(q)] = t;
              denom += t;
            }
            for (double& t : br.interp) t /= denom;
          }
          node.branches.push_back(std::move(br));
        }
      }
    }
  }
}

double TransferOperator::log_eigenvalue(double s) const {
  const size_t n = nodes_.size();
  std::vector<double> psi(n, 1.0), next(n, 0.0);
  double lam_prev = 0.0;
  int stable = 0;
  for (int it = 0; it < max_iterations_; ++it) {
    double sum_new = 0.0, sum_old = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const Branch& br : nodes_[i].branches) {
        double interp = 0.0;
        for (int q = 0; q < br.target_len; ++q)
          interp += br.interp[static_cast<size_t>(q)] *
                    psi[static_cast<size_t>(br.target_offset + q)];
        acc += std::exp(br.cocycle_base - s * br.beta) * interp;
      }
      next[i] = std::max(acc, 1e-300);
      sum_new += next[i];
      sum_old += psi[i];
    }
    double lam = sum_new / sum_old;
    for (size_t i = 0; i < n; ++i) psi[i] = next[i] / lam;
    if (it > 4 && std::abs(lam - lam_prev) <= eig_tol_ * std::abs(lam)) {
      if (++stable >= 3) return std::log(lam);
    } else {
      stable = 0;
    }
    lam_prev = lam;
  }
  throw EigSolverStall("power iteration did not converge");
}

PressureEstimate critical_exponent_oracle(const SchottkyGroup& G,
                                          const Potential& F,
                                          const TransferOptions& opts) {
  TransferOperator L(G, F, opts);
  auto f = [&](double s) { return L.log_eigenvalue(s); };
  double lo = F.constant_part() - 0.5;
  double hi = F.constant_part() + 2.5;
  double flo = f(lo), fhi = f(hi);
  int guard = 0;
  while (flo <= 0.0 && guard++ < 12) {
    lo -= 2.0;
    flo = f(lo);
  }
  guard = 0;
  while (fhi >= 0.0 && guard++ < 12) {
    hi += 2.0;
    fhi = f(hi);
  }
  if (flo <= 0.0 || fhi >= 0.0)
    throw NoBracket("transfer pressure root not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
    double mid = 0.5 * (lo + hi);
    double sec = lo + flo * (hi - lo) / (flo - fhi);
    if (sec > lo + 0.1 * (hi - lo) && sec < hi - 0.1 * (hi - lo)) mid = sec;
    double fm = f(mid);
    if (fm > 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  PressureEstimate est;
  est.value = 0.5 * (lo + hi);
  est.stderr_ = 0.5 * (hi - lo);
  est.method = "transfer-root";
  est.ls_slope = est.value;
  est.aitken = est.value;
  est.aitken_ok = true;
  return est;
}

PressureEstimate semigroup_delta(const SchottkyGroup& G,
                                 const FreeSemigroup& S, const Potential& F,
                                 double n_max, const TableOptions& opts) {
  if (S.alphabet.empty()) throw Error("semigroup alphabet is empty");
  std::vector<Letter> seen;
  for (Letter l : S.alphabet) {
    if (l == 0 || std::abs(static_cast<int>(l)) > G.rank())
      throw Error("semigroup alphabet letter out of range");
    if (std::find(seen.begin(), seen.end(), l) != seen.end())
      throw Error("semigroup alphabet has duplicate letters");
    seen.push_back(l);
  }
  TableOptions topts = opts;
  topts.alphabet = S.alphabet;
  PressureEstimate est = critical_exponent(annular_table(
      G, F, std::nullopt, G.base_point(), G.base_point(), n_max, topts));
  est.method = "semigroup-regression";
  return est;
}

KernelGapResult kernel_delta_experiment(const SchottkyGroup& G,
                                        const Character& chi,
                                        const Potential& F, double n_max,
                                        const TableOptions& opts) {
  if (chi.is_zero())
    throw Error("kernel experiment needs a nonzero character");
  KernelGapResult out;
  out.full = critical_exponent(annular_table(
      G, F, std::nullopt, G.base_point(), G.base_point(), n_max, opts));
  TableOptions kopts = opts;
  kopts.kernel_filter = true;
  out.kernel = critical_exponent(
      annular_table(G, F, chi, G.base_point(), G.base_point(), n_max, kopts));
  out.gap = out.full.value - out.kernel.value;
  out.slow_convergence_caveat = true;
  return out;
}

}  // namespace gibbs
