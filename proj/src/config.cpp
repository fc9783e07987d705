#include "gibbs/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gibbs {

namespace {

uint64_t fnv1a_str(const std::string& s, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct RawConfig {
  // section -> key -> (value, line)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>>
      data;
  std::vector<std::string> warnings;

  bool has(const std::string& sec, const std::string& key) const {
    auto s = data.find(sec);
    return s != data.end() && s->second.count(key) > 0;
  }
  std::string get(const std::string& sec, const std::string& key,
                  const std::string& fallback = "") const {
    auto s = data.find(sec);
    if (s == data.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second.first;
  }
  int line_of(const std::string& sec, const std::string& key) const {
    auto s = data.find(sec);
    if (s == data.end()) return 0;
    auto k = s->second.find(key);
    return k == s->second.end() ? 0 : k->second.second;
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

RawConfig parse_raw(const std::string& text, const std::string& name) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        std::ostringstream os;
        os << name << ":" << lineno << ": malformed section header";
        throw ParseError(os.str());
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << name << ":" << lineno << ": expected key = value";
      throw ParseError(os.str());
    }
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    auto& sec = raw.data[section];
    if (sec.count(key)) {
      std::ostringstream os;
      os << name << ":" << lineno << ": duplicate key '" << section << "."
         << key << "', last value wins";
      raw.warnings.push_back(os.str());
    }
    sec[key] = {val, lineno};
  }
  return raw;
}

std::vector<double> parse_numbers(const RawConfig& raw, const std::string& sec,
                                  const std::string& key,
                                  const std::string& name) {
  std::istringstream is(raw.get(sec, key));
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) {
    std::ostringstream os;
    os << name << ":" << raw.line_of(sec, key) << ": field '" << sec << "."
       << key << "' is not a number list";
    throw ParseError(os.str());
  }
  return out;
}

double parse_one(const RawConfig& raw, const std::string& sec,
                 const std::string& key, double fallback,
                 const std::string& name) {
  if (!raw.has(sec, key)) return fallback;
  auto v = parse_numbers(raw, sec, key, name);
  if (v.size() != 1) {
    std::ostringstream os;
    os << name << ":" << raw.line_of(sec, key) << ": field '" << sec << "."
       << key << "' wants a single number";
    throw ParseError(os.str());
  }
  return v[0];
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& name) {
  RawConfig raw = parse_raw(text, name);
  ExperimentConfig cfg;
  cfg.warnings = raw.warnings;

  // content hash: canonical section.key=value lines, sorted
  {
    std::vector<std::string> lines;
    for (const auto& [sec, kv] : raw.data)
      for (const auto& [key, vp] : kv)
        lines.push_back(sec + "." + key + "=" + vp.first);
    std::sort(lines.begin(), lines.end());
    uint64_t h = 1469598103934665603ull;
    for (const auto& l : lines) h = fnv1a_str(l + "\n", h);
    cfg.content_hash = h;
  }

  int k = static_cast<int>(parse_one(raw, "group", "generators", 0, name));
  if (k < 1) throw ParseError(name + ": [group] generators must be >= 1");
  for (int i = 1; i <= k; ++i) {
    std::string key = "g" + std::to_string(i);
    if (!raw.has("group", key)) {
      std::ostringstream os;
      os << name << ": missing generator '" << key << "'";
      throw ParseError(os.str());
    }
    auto m = parse_numbers(raw, "group", key, name);
    if (m.size() != 4) {
      std::ostringstream os;
      os << name << ":" << raw.line_of("group", key) << ": generator " << key
         << " wants 4 entries (half-plane, row-major)";
      throw ParseError(os.str());
    }
    double det = m[0] * m[3] - m[1] * m[2];
    if (std::abs(det - 1.0) >= 1e-12) {
      std::ostringstream os;
      os << name << ":" << raw.line_of("group", key) << ": generator " << key
         << " has determinant " << det << " != 1";
      throw ParseError(os.str());
    }
    cfg.generators.push_back({m[0], m[1], m[2], m[3]});
  }
  if (raw.has("group", "base")) {
    auto b = parse_numbers(raw, "group", "base", name);
    if (b.size() != 2)
      throw ParseError(name + ": [group] base wants two coordinates");
    cfg.base_point = Point(b[0], b[1]);
  }
  // optional disc overrides: disc+1, disc-1, ...
  {
    std::vector<PairingDisc> discs;
    bool any = false, all = true;
    for (int i = 1; i <= k; ++i) {
      for (std::string sgn : {"+", "-"}) {
        std::string key = "disc" + sgn + std::to_string(i);
        if (!raw.has("group", key)) {
          all = false;
          continue;
        }
        any = true;
        auto d = parse_numbers(raw, "group", key, name);
        if (d.size() != 3) {
          std::ostringstream os;
          os << name << ":" << raw.line_of("group", key) << ": " << key
             << " wants centre_re centre_im radius";
          throw ParseError(os.str());
        }
        discs.push_back({cplx(d[0], d[1]), d[2]});
      }
    }
    if (any && !all)
      throw ParseError(name + ": supply either all pairing discs or none");
    if (any) {
      // euclidean disjointness with a named diagnostic
      for (size_t i = 0; i < discs.size(); ++i)
        for (size_t j = i + 1; j < discs.size(); ++j) {
          double gap = std::abs(discs[i].center - discs[j].center) -
                       discs[i].radius - discs[j].radius;
          if (gap <= 0.0) {
            std::ostringstream os;
            os << name << ": pairing discs " << i << " and " << j
               << " overlap (gap " << gap << ")";
            throw ParseError(os.str());
          }
        }
      cfg.discs = discs;
    }
  }

  cfg.potential.kind = raw.get("potential", "kind", "constant");
  if (cfg.potential.kind != "constant" && cfg.potential.kind != "bump") {
    std::ostringstream os;
    os << name << ":" << raw.line_of("potential", "kind")
       << ": potential kind must be 'constant' or 'bump'";
    throw ParseError(os.str());
  }
  cfg.potential.kappa = parse_one(raw, "potential", "kappa", 0.0, name);
  if (raw.has("potential", "center")) {
    auto c = parse_numbers(raw, "potential", "center", name);
    if (c.size() != 3)
      throw ParseError(name + ": [potential] center wants re im angle");
    cfg.potential.center_re = c[0];
    cfg.potential.center_im = c[1];
    cfg.potential.center_angle = c[2];
  }
  cfg.potential.radius = parse_one(raw, "potential", "radius", 0.5, name);
  cfg.potential.width = parse_one(raw, "potential", "width", 1.0, name);
  cfg.potential.amplitude =
      parse_one(raw, "potential", "amplitude", 1.0, name);
  cfg.potential.reversible =
      parse_one(raw, "potential", "reversible", 0.0, name) != 0.0;
  if (cfg.potential.radius <= 0.0 || cfg.potential.width <= 0.0)
    throw ParseError(name + ": bump radius and width must be positive");

  if (raw.has("character", "values")) {
    auto v = parse_numbers(raw, "character", "values", name);
    if (static_cast<int>(v.size()) != k)
      throw ParseError(name + ": [character] values wants one per generator");
    cfg.character = v;
  }

  if (raw.has("semigroup", "alphabet")) {
    auto v = parse_numbers(raw, "semigroup", "alphabet", name);
    for (double lv : v) {
      int l = static_cast<int>(lv);
      if (l == 0 || std::abs(l) > k || lv != l) {
        std::ostringstream os;
        os << name << ":" << raw.line_of("semigroup", "alphabet")
           << ": alphabet letters must be nonzero integers in [-" << k << ", "
           << k << "]";
        throw ParseError(os.str());
      }
      Letter letter = static_cast<Letter>(l);
      if (std::find(cfg.semigroup_alphabet.begin(),
                    cfg.semigroup_alphabet.end(),
                    letter) != cfg.semigroup_alphabet.end()) {
        std::ostringstream os;
        os << name << ":" << raw.line_of("semigroup", "alphabet")
           << ": semigroup alphabet is unreduced (letter " << l
           << " repeats)";
        throw ParseError(os.str());
      }
      cfg.semigroup_alphabet.push_back(letter);
    }
  }

  cfg.horizon = parse_one(raw, "run", "horizon", 14.0, name);
  cfg.depth = static_cast<size_t>(parse_one(raw, "run", "depth", 8, name));
  cfg.exponent = parse_one(raw, "run", "exponent", 0.0, name);
  cfg.bucket = parse_one(raw, "run", "bucket", 1.0, name);
  cfg.budget =
      static_cast<uint64_t>(parse_one(raw, "run", "budget", 5e7, name));
  cfg.tolerance = parse_one(raw, "run", "tolerance", 1e-9, name);
  if (raw.has("run", "arc")) {
    auto a = parse_numbers(raw, "run", "arc", name);
    if (a.size() != 2)
      throw ParseError(name + ": [run] arc wants start length");
    cfg.arc_start = a[0];
    cfg.arc_len = a[1];
  }
  if (raw.has("run", "ball_word"))
    cfg.ball_word = raw.get("run", "ball_word");
  cfg.ball_T = parse_one(raw, "run", "ball_T", 2.0, name);
  cfg.ball_Tp = parse_one(raw, "run", "ball_Tp", 2.0, name);
  cfg.ball_r = parse_one(raw, "run", "ball_r", 1.5, name);
  cfg.xi_angle = parse_one(raw, "run", "xi_angle", 1.0, name);
  cfg.limit_n =
      static_cast<int>(parse_one(raw, "run", "limit_n", 40, name));

  if (cfg.horizon <= 0.0 || cfg.bucket <= 0.0 || cfg.tolerance <= 0.0)
    throw ParseError(name + ": horizon, bucket and tolerance must be > 0");
  if (cfg.horizon > 30.0)
    throw ParseError(
        name + ": horizon exceeds the representable displacement range (30)");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

SchottkyGroup ExperimentConfig::make_group() const {
  std::vector<Isometry> gens;
  for (const auto& m : generators)
    gens.push_back(Isometry::from_half_plane(m[0], m[1], m[2], m[3]));
  return SchottkyGroup(std::move(gens), base_point, discs);
}

Potential ExperimentConfig::make_potential(
    std::shared_ptr<const SchottkyGroup> G) const {
  if (potential.kind == "constant") return Potential::constant(potential.kappa);
  BumpSpec spec;
  spec.center = from_base_form(Point(potential.center_re, potential.center_im),
                               potential.center_angle);
  spec.spatial_radius = potential.radius;
  spec.angular_width = potential.width;
  spec.amplitude = potential.amplitude;
  spec.reversible = potential.reversible;
  Potential bump = Potential::bump_sum(std::move(G), spec);
  if (potential.kappa != 0.0) return bump + potential.kappa;
  return bump;
}

std::optional<Character> ExperimentConfig::make_character() const {
  if (!character) return std::nullopt;
  return Character{*character};
}

}  // namespace gibbs
