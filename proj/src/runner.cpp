#include "gibbs/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gibbs/counting.hpp"

namespace gibbs {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> cmds = {
      "delta",     "delta-twisted", "gurevich",     "oracle",
      "semigroup-delta", "kernel-gap", "count",     "count-sector",
      "periodic",  "equidist",      "patterson",    "shadow-check",
      "doubling",  "gibbs-ball",    "crossratio",   "validate"};
  return cmds;
}

namespace {

uint64_t fnv1a_bytes(const std::string& s,
                     uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json estimate_json(const PressureEstimate& e) {
  json j;
  j["value"] = e.value;
  j["stderr"] = e.stderr_;
  j["method"] = e.method;
  j["ls_slope"] = e.ls_slope;
  j["aitken"] = e.aitken;
  j["aitken_ok"] = e.aitken_ok;
  j["converged"] = e.converged;
  j["window"] = {e.window_lo, e.window_hi};
  return j;
}

std::string table_csv(const SeriesTable& t, const std::string& kind,
                      uint64_t group_hash, const std::string& pot_desc) {
  std::ostringstream os;
  os << "# kind=" << kind << " group=" << std::hex << group_hash << std::dec
     << " potential=" << pot_desc << " horizon=" << fmt17(t.horizon)
     << " bucket=" << fmt17(t.bucket_width) << " terms=" << t.terms
     << (t.truncated ? " TRUNCATED" : "") << "\n";
  os << "n,log_sum,count,max_displacement\n";
  for (size_t j = 0; j < t.log_sums.size(); ++j) {
    os << fmt17(static_cast<double>(j) * t.bucket_width) << ","
       << (t.counts[j] ? fmt17(t.log_sums[j]) : std::string("-inf")) << ","
       << t.counts[j] << "," << fmt17(t.max_disp[j]) << "\n";
  }
  return os.str();
}

std::string count_csv(const CountTable& t, const std::string& kind,
                      uint64_t group_hash, const std::string& pot_desc) {
  std::ostringstream os;
  os << "# kind=" << kind << " group=" << std::hex << group_hash << std::dec
     << " potential=" << pot_desc << " t_max=" << fmt17(t.t_max)
     << " step=" << fmt17(t.grid_step)
     << (t.annular.truncated ? " TRUNCATED" : "") << "\n";
  os << "t,log_annular,log_cumulative,annular_count,cumulative_count\n";
  for (size_t j = 0; j < t.annular.log_sums.size(); ++j) {
    os << fmt17(static_cast<double>(j) * t.grid_step) << ","
       << (t.annular.counts[j] ? fmt17(t.annular.log_sums[j])
                               : std::string("-inf"))
       << ","
       << (t.cum_counts[j] ? fmt17(t.log_cumulative[j]) : std::string("-inf"))
       << "," << t.annular.counts[j] << "," << t.cum_counts[j] << "\n";
  }
  return os.str();
}

std::string pot_desc(const ExperimentConfig& cfg) {
  if (cfg.potential.kind == "constant")
    return "constant(" + fmt17(cfg.potential.kappa) + ")";
  std::ostringstream os;
  os << "bump(r=" << fmt17(cfg.potential.radius)
     << ",w=" << fmt17(cfg.potential.width)
     << ",A=" << fmt17(cfg.potential.amplitude)
     << (cfg.potential.reversible ? ",rev" : "")
     << (cfg.potential.kappa != 0.0 ? ",k=" + fmt17(cfg.potential.kappa) : "")
     << ")";
  return os.str();
}

Word parse_word(const std::string& s) {
  Word w;
  for (char c : s) {
    if (c == ' ') continue;
    if (c >= 'a' && c <= 'z')
      w.letters.push_back(static_cast<Letter>(c - 'a' + 1));
    else if (c >= 'A' && c <= 'Z')
      w.letters.push_back(static_cast<Letter>(-(c - 'A' + 1)));
    else
      throw ParseError(std::string("bad letter '") + c + "' in word");
  }
  if (!w.reduced()) throw ParseError("word is not reduced: " + s);
  return w;
}

struct Ctx {
  std::shared_ptr<const SchottkyGroup> G;
  Potential F;
  std::optional<Character> chi;
  int workers;
  uint64_t budget;
  const ExperimentConfig& cfg;

  double density_exponent(std::vector<std::string>* warnings,
                          bool twisted = false) const {
    if (cfg.exponent > 0.0) return cfg.exponent;
    double base;
    if (twisted && chi) {
      // the twisted dimension must sit above the twisted exponent
      TableOptions topt;
      topt.workers = workers;
      base = critical_exponent(*G, F, chi, G->base_point(), G->base_point(),
                               std::min(cfg.horizon + 4.0, 18.0), topt)
                 .value +
             0.01;
    } else {
      base = critical_exponent_oracle(*G, F).value;
    }
    if (warnings)
      warnings->push_back("density exponent auto-set to " +
                          fmt17(base + 0.02));
    return base + 0.02;
  }
  DensityOptions density_options() const {
    DensityOptions d;
    d.max_wordlen = cfg.depth;
    d.node_budget = budget;
    d.workers = workers;
    return d;
  }
  TableOptions table_options() const {
    TableOptions t;
    t.bucket_width = cfg.bucket;
    t.node_budget = budget;
    t.workers = workers;
    return t;
  }
};

void run_dispatch(const std::string& sub, Ctx& ctx, RunReport& rep) {
  // payload warnings: only what the computation itself produced, so that
  // identical config + cache state gives identical payload bytes
  std::vector<std::string> payload_warnings;
  const ExperimentConfig& cfg = ctx.cfg;
  const SchottkyGroup& G = *ctx.G;
  uint64_t gh = G.content_hash();
  json j;
  j["subcommand"] = sub;
  j["group_hash"] = gh;
  j["potential"] = pot_desc(cfg);

  if (sub == "validate") {
    const ValidationReport& vr = G.validate(false);
    j["ok"] = vr.ok;
    j["worst_margin"] = vr.worst_margin;
    j["nesting_gap"] = vr.s0;
    j["base_disc_distance"] = vr.D0;
    j["min_letter_displacement"] = vr.min_letter_displacement;
    j["failures"] = vr.failures;
    if (!vr.ok) rep.exit_category = kExitValidation;
    rep.csv = "# validate\nok\n" + std::to_string(vr.ok ? 1 : 0) + "\n";
  } else if (sub == "delta" || sub == "delta-twisted") {
    std::optional<Character> chi =
        (sub == "delta-twisted") ? ctx.chi : std::nullopt;
    if (sub == "delta-twisted" && !chi)
      throw ParseError("delta-twisted needs a [character] section");
    SeriesTable t = annular_table(G, ctx.F, chi, G.base_point(),
                                  G.base_point(), cfg.horizon,
                                  ctx.table_options());
    if (t.truncated) {
      payload_warnings.push_back(
          "enumeration budget exhausted; table truncated");
      rep.exit_category = kExitBudget;
    }
    try {
      j["estimate"] = estimate_json(critical_exponent(t));
    } catch (const InsufficientData& e) {
      j["estimate"] = nullptr;
      payload_warnings.push_back(std::string("growth fit: ") + e.what());
    }
    rep.csv = table_csv(t, sub, gh, pot_desc(cfg));
  } else if (sub == "gurevich") {
    GurevichOptions gop;
    gop.bucket_width = cfg.bucket;
    gop.node_budget = ctx.budget;
    SeriesTable t = gurevich_table(G, ctx.F, ctx.chi, cfg.horizon, gop);
    PressureEstimate est = gurevich_pressure(G, ctx.F, ctx.chi, cfg.horizon,
                                             gop);
    j["estimate"] = estimate_json(est);
    rep.csv = table_csv(t, sub, gh, pot_desc(cfg));
  } else if (sub == "oracle") {
    PressureEstimate root = critical_exponent_oracle(G, ctx.F);
    j["estimate"] = estimate_json(root);
    rep.csv = "# oracle\ndelta_root\n" + fmt17(root.value) + "\n";
  } else if (sub == "semigroup-delta") {
    if (cfg.semigroup_alphabet.empty())
      throw ParseError("semigroup-delta needs a [semigroup] alphabet");
    FreeSemigroup S{cfg.semigroup_alphabet};
    PressureEstimate est =
        semigroup_delta(G, S, ctx.F, cfg.horizon, ctx.table_options());
    j["estimate"] = estimate_json(est);
    rep.csv = "# semigroup-delta\nvalue\n" + fmt17(est.value) + "\n";
  } else if (sub == "kernel-gap") {
    if (!ctx.chi) throw ParseError("kernel-gap needs a [character] section");
    KernelGapResult kg = kernel_delta_experiment(G, *ctx.chi, ctx.F,
                                                 cfg.horizon,
                                                 ctx.table_options());
    j["full"] = estimate_json(kg.full);
    j["kernel"] = estimate_json(kg.kernel);
    j["gap"] = kg.gap;
    j["slow_convergence_caveat"] = kg.slow_convergence_caveat;
    payload_warnings.push_back("kernel-gap convergence is slow; gap is loose");
    rep.csv = "# kernel-gap\nfull,kernel,gap\n" + fmt17(kg.full.value) + "," +
              fmt17(kg.kernel.value) + "," + fmt17(kg.gap) + "\n";
  } else if (sub == "count" || sub == "count-sector") {
    std::optional<BoundaryArcSet> U;
    if (sub == "count-sector") {
      if (cfg.arc_len <= 0.0)
        throw ParseError("count-sector needs [run] arc = start length");
      U = BoundaryArcSet::single(cfg.arc_start, cfg.arc_len);
    }
    CountOptions copt;
    copt.grid_step = cfg.bucket;
    copt.node_budget = ctx.budget;
    copt.workers = ctx.workers;
    CountTable t = orbital_count(G, ctx.F, ctx.chi, G.base_point(),
                                 G.base_point(), U, std::nullopt, cfg.horizon,
                                 copt);
    if (t.annular.truncated) {
      payload_warnings.push_back(
          "enumeration budget exhausted; table truncated");
      rep.exit_category = kExitBudget;
    }
    try {
      j["loggrowth"] = estimate_json(loggrowth_fit(t));
    } catch (const InsufficientData& e) {
      j["loggrowth"] = nullptr;
      payload_warnings.push_back(std::string("growth fit: ") + e.what());
    }
    if (sub == "count-sector") {
      double s = ctx.density_exponent(&payload_warnings);
      AtomicDensity dens = AtomicDensity::build(
          ctx.G, ctx.F, std::nullopt, s, G.base_point(), G.base_point(),
          ctx.density_options());
      SectorRatio sr = sector_ratio_test(G, ctx.F, G.base_point(),
                                         G.base_point(), *U, cfg.horizon,
                                         dens, copt);
      j["count_ratio"] = sr.count_ratio;
      j["mass_ratio"] = sr.mass_ratio;
      if (sr.boundary_mass_warning)
        payload_warnings.push_back("atom mass near the arc endpoints");
    }
    rep.csv = count_csv(t, sub, gh, pot_desc(cfg));
  } else if (sub == "periodic") {
    CountOptions copt;
    copt.grid_step = cfg.bucket;
    copt.node_budget = ctx.budget;
    copt.workers = ctx.workers;
    CountTable t =
        periodic_count(G, ctx.F, ctx.chi, cfg.horizon, false, copt);
    CountTable tp =
        periodic_count(G, ctx.F, ctx.chi, cfg.horizon, true, copt);
    try {
      j["loggrowth_all"] = estimate_json(loggrowth_fit(t));
      j["loggrowth_primitive"] = estimate_json(loggrowth_fit(tp));
    } catch (const InsufficientData& e) {
      payload_warnings.push_back(std::string("growth fit: ") + e.what());
    }
    rep.csv = count_csv(t, "periodic-all", gh, pot_desc(cfg)) + "\n" +
              count_csv(tp, "periodic-primitive", gh, pot_desc(cfg));
  } else if (sub == "equidist") {
    // periodic-orbit equidistribution compares against the plain Gibbs
    // measure; the character plays no role here
    double s = ctx.density_exponent(&payload_warnings);
    ProductGibbs pg = product_gibbs(ctx.G, ctx.F, std::nullopt, s,
                                    G.base_point(), G.base_point(),
                                    ctx.density_options());
    auto [a1, b1] = disc_arc(G.letter_disc(1));
    auto [a2, b2] = disc_arc(G.letter_disc(-1));
    HopfBump h;
    h.xi0 = angle_normalize(a1.theta +
                            0.5 * angle_normalize(b1.theta - a1.theta));
    h.eta0 = angle_normalize(a2.theta +
                             0.5 * angle_normalize(b2.theta - a2.theta));
    h.width_xi = h.width_eta = 0.4;
    HopfBump ref = h.flipped();
    CountOptions copt;
    copt.node_budget = ctx.budget;
    copt.workers = ctx.workers;
    EquidistResult er =
        equidistribution_test(G, ctx.F, cfg.horizon, h, ref, pg, copt);
    j["orbit_h"] = er.orbit_h;
    j["orbit_ref"] = er.orbit_ref;
    j["gibbs_h"] = er.gibbs_h;
    j["gibbs_ref"] = er.gibbs_ref;
    if (er.orbit_ref > 0.0 && er.gibbs_ref > 0.0) {
      j["orbit_ratio"] = er.orbit_h / er.orbit_ref;
      j["gibbs_ratio"] = er.gibbs_h / er.gibbs_ref;
    }
    rep.csv = "# equidist\norbit_h,orbit_ref,gibbs_h,gibbs_ref\n" +
              fmt17(er.orbit_h) + "," + fmt17(er.orbit_ref) + "," +
              fmt17(er.gibbs_h) + "," + fmt17(er.gibbs_ref) + "\n";
  } else if (sub == "patterson") {
    double s = ctx.density_exponent(&payload_warnings,
                                    ctx.chi && !ctx.chi->is_zero());
    DensityOptions dop = ctx.density_options();
    dop.delta_hint = s - 0.02;
    AtomicDensity dens = AtomicDensity::build(ctx.G, ctx.F, ctx.chi, s,
                                              G.base_point(), G.base_point(),
                                              dop);
    if (dens.normalizer_warning())
      payload_warnings.push_back(
          "density exponent close to delta; normalizer may be unstable");
    j["exponent"] = s;
    j["atoms"] = dens.atoms().size();
    j["total_mass"] = dens.total_mass();
    j["log_normalizer"] = dens.log_normalizer();
    std::ostringstream os;
    os << "# patterson group=" << std::hex << gh << std::dec
       << " potential=" << pot_desc(cfg) << " s=" << fmt17(s)
       << " depth=" << cfg.depth << "\n";
    os << "word,ray_angle,weight\n";
    for (const Atom& a : dens.atoms())
      os << a.word.str() << ","
         << (a.has_ray ? fmt17(a.ray.theta) : std::string("nan")) << ","
         << fmt17(std::exp(a.log_weight)) << "\n";
    rep.csv = os.str();
  } else if (sub == "shadow-check") {
    double s = ctx.density_exponent(&payload_warnings,
                                    ctx.chi && !ctx.chi->is_zero());
    AtomicDensity dens = AtomicDensity::build(ctx.G, ctx.F, ctx.chi, s,
                                              G.base_point(), G.base_point(),
                                              ctx.density_options());
    ShadowRatios sr = shadow_lemma_check(dens, 0.0, 4);
    j["R"] = sr.R;
    j["empirical_C"] = sr.empirical_C;
    j["sample_size"] = sr.sample_size;
    std::ostringstream os;
    os << "# shadow-check R=" << fmt17(sr.R) << "\nratio\n";
    for (double r : sr.ratios) os << fmt17(r) << "\n";
    rep.csv = os.str();
  } else if (sub == "doubling") {
    double s = ctx.density_exponent(&payload_warnings,
                                    ctx.chi && !ctx.chi->is_zero());
    AtomicDensity dens = AtomicDensity::build(ctx.G, ctx.F, ctx.chi, s,
                                              G.base_point(), G.base_point(),
                                              ctx.density_options());
    DoublingReport dr = doubling_check(dens, 0.0, 4);
    j["R"] = dr.R;
    j["C"] = dr.C;
    j["sample_size"] = dr.sample_size;
    rep.csv = "# doubling\nR,C,sample\n" + fmt17(dr.R) + "," + fmt17(dr.C) +
              "," + std::to_string(dr.sample_size) + "\n";
  } else if (sub == "gibbs-ball") {
    double s = ctx.density_exponent(&payload_warnings);
    ProductGibbs pg = product_gibbs(ctx.G, ctx.F, std::nullopt, s,
                                    G.base_point(), G.base_point(),
                                    ctx.density_options());
    Word w = parse_word(cfg.ball_word);
    auto [plus, minus] = axis(G.evaluate(w));
    UnitTangent v;
    v.xi_minus = minus;
    v.xi_plus = plus;
    v.t = 0.0;
    BallDiag bd =
        dynamical_ball_diag(pg, v, cfg.ball_T, cfg.ball_Tp, cfg.ball_r);
    j["inner_measure"] = bd.inner_measure;
    j["outer_measure"] = bd.outer_measure;
    j["prediction"] = bd.prediction;
    j["ratio"] = bd.ratio;
    rep.csv = "# gibbs-ball\ninner,outer,prediction,ratio\n" +
              fmt17(bd.inner_measure) + "," + fmt17(bd.outer_measure) + "," +
              fmt17(bd.prediction) + "," + fmt17(bd.ratio) + "\n";
  } else if (sub == "crossratio") {
    Word w = parse_word(cfg.ball_word);
    Isometry g = G.evaluate(w);
    CrossratioLimit lim = crossratio_period_limit(
        ctx.F, g, BoundaryPoint(cfg.xi_angle), cfg.limit_n);
    double target =
        0.5 * (period(ctx.F, g) + period(ctx.F, g.inverse()));
    j["aitken"] = lim.aitken;
    j["period_average"] = target;
    j["sequence_length"] = lim.sequence.size();
    std::ostringstream os;
    os << "# crossratio word=" << cfg.ball_word << "\nn,value\n";
    for (size_t i = 0; i < lim.sequence.size(); ++i)
      os << (i + 1) << "," << fmt17(lim.sequence[i]) << "\n";
    rep.csv = os.str();
  } else {
    throw ParseError("unknown subcommand: " + sub);
  }
  j["warnings"] = payload_warnings;
  rep.json = j.dump(2) + "\n";
  rep.warnings.insert(rep.warnings.end(), payload_warnings.begin(),
                      payload_warnings.end());
}

}  // namespace

RunReport run(const ExperimentConfig& cfg, const std::string& sub,
              const RunOverrides& ov) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.subcommand = sub;
  rep.config_hash = cfg.content_hash;
  rep.warnings = cfg.warnings;

  if (std::find(subcommands().begin(), subcommands().end(), sub) ==
      subcommands().end()) {
    rep.exit_category = kExitUsage;
    rep.json = std::string("{\"error\":\"unknown subcommand\"}\n");
    return rep;
  }

  // results-level cache keyed by config hash + subcommand + overrides that
  // affect the payload (budget; workers never do)
  std::string cache_file;
  if (!ov.cache_dir.empty()) {
    uint64_t key = cfg.content_hash;
    key = fnv1a_bytes(sub, key);
    key = fnv1a_bytes(std::to_string(ov.budget), key);
    std::ostringstream os;
    os << ov.cache_dir << "/" << std::hex << key << ".cache";
    cache_file = os.str();
    std::ifstream f(cache_file, std::ios::binary);
    if (f) {
      std::stringstream ss;
      ss << f.rdbuf();
      std::string blob = ss.str();
      // layout: "GIBBS1\n<checksum>\n<csv_len>\n<csv><json>"
      std::istringstream hs(blob);
      std::string magic, sum_line, len_line;
      if (std::getline(hs, magic) && magic == "GIBBS1" &&
          std::getline(hs, sum_line) && std::getline(hs, len_line)) {
        size_t header = magic.size() + sum_line.size() + len_line.size() + 3;
        std::string payload = blob.substr(header);
        if (std::to_string(fnv1a_bytes(payload)) == sum_line) {
          size_t csv_len = std::stoull(len_line);
          rep.csv = payload.substr(0, csv_len);
          rep.json = payload.substr(csv_len);
          rep.cache_hit = true;
          rep.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
          return rep;
        }
        rep.warnings.push_back("cache checksum mismatch; recomputing");
      } else {
        rep.warnings.push_back("cache file malformed; recomputing");
      }
    }
  }

  try {
    Ctx ctx{nullptr,
            Potential::constant(0.0),
            cfg.make_character(),
            ov.workers > 0
                ? ov.workers
                : static_cast<int>(std::thread::hardware_concurrency()),
            ov.budget > 0 ? ov.budget : cfg.budget,
            cfg};
    ctx.G = std::make_shared<const SchottkyGroup>(cfg.make_group());
    ctx.G->validate();
    ctx.F = cfg.make_potential(ctx.G);
    run_dispatch(sub, ctx, rep);
  } catch (const ParseError&) {
    rep.exit_category = kExitUsage;
    throw;
  } catch (const BudgetExceeded&) {
    rep.exit_category = kExitBudget;
    throw;
  } catch (const InvalidDiscs&) {
    rep.exit_category = kExitValidation;
    throw;
  } catch (const NonLoxodromicGenerator&) {
    rep.exit_category = kExitValidation;
    throw;
  }

  if (rep.exit_category == kExitOk && !rep.warnings.empty())
    rep.exit_category = kExitNumericalWarning;

  if (!cache_file.empty()) {
    std::filesystem::create_directories(ov.cache_dir);
    std::string payload = rep.csv + rep.json;
    std::ofstream f(cache_file, std::ios::binary);
    f << "GIBBS1\n" << fnv1a_bytes(payload) << "\n" << rep.csv.size() << "\n"
      << payload;
  }
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return rep;
}

}  // namespace gibbs
