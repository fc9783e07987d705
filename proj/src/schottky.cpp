#include "gibbs/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gibbs {

namespace {

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t hash_double(double x, uint64_t h) { return fnv1a(&x, sizeof(x), h); }

// Hyperbolic distance from a point outside the disc to the disc region; the
// boundary arc is a geodesic since pairing discs are orthogonal to the
// boundary circle.
double dist_to_disc(const Point& z, const PairingDisc& d) {
  auto [a, b] = disc_arc(d);
  return dist_to_line(z, a, b);
}

// Minimal hyperbolic distance between two disjoint geodesics given by their
// endpoint pairs; the map s -> d(line1(s), line2) is convex.
double line_gap(const BoundaryPoint& a1, const BoundaryPoint& b1,
                const BoundaryPoint& a2, const BoundaryPoint& b2) {
  auto f = [&](double s) {
    Point p = geodesic_eval(a1, b1, s, Point());
    return dist_to_line(p, a2, b2);
  };
  double lo = -45.0, hi = 45.0;
  for (int i = 0; i < 120; ++i) {
    double m1 = lo + (hi - lo) / 3.0;
    double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return f(0.5 * (lo + hi));
}

// Image of a circle under a Mobius disc automorphism, via three points.
PairingDisc map_disc(const Isometry& g, const PairingDisc& d) {
  cplx p1 = d.center + d.radius;
  cplx p2 = d.center - d.radius;
  cplx p3 = d.center + cplx(0.0, d.radius);
  auto mob = [&](cplx z) {
    return (g.su_a() * z + g.su_b()) /
           (std::conj(g.su_b()) * z + std::conj(g.su_a()));
  };
  cplx q1 = mob(p1), q2 = mob(p2), q3 = mob(p3);
  // circumcentre of q1 q2 q3
  cplx d21 = q2 - q1, d31 = q3 - q1;
  double det = 2.0 * (d21.real() * d31.imag() - d21.imag() * d31.real());
  double n21 = std::norm(q2) - std::norm(q1);
  double n31 = std::norm(q3) - std::norm(q1);
  PairingDisc out;
  out.center = cplx((d31.imag() * n21 - d21.imag() * n31) / det,
                    (d21.real() * n31 - d31.real() * n21) / det);
  out.radius = std::abs(q1 - out.center);
  return out;
}

}  // namespace

std::pair<BoundaryPoint, BoundaryPoint> disc_arc(const PairingDisc& d) {
  double cc = std::abs(d.center);
  // |z|=1, |z-c|=r  =>  cos(theta - arg c) = (1 + cc^2 - r^2) / (2 cc)
  double cosv = (1.0 + cc * cc - d.radius * d.radius) / (2.0 * cc);
  if (cc < 1e-12 || cosv <= -1.0 || cosv >= 1.0)
    throw InvalidDiscs("pairing disc does not cross the boundary circle");
  double half = std::acos(cosv);
  double phi = std::atan2(d.center.imag(), d.center.real());
  return {BoundaryPoint(phi - half), BoundaryPoint(phi + half)};
}

int letter_index(Letter l) {
  return 2 * (std::abs(static_cast<int>(l)) - 1) + (l < 0 ? 1 : 0);
}

Letter index_letter(int idx) {
  int gen = idx / 2 + 1;
  return static_cast<Letter>((idx % 2) ? -gen : gen);
}

// --- Word ---

Word Word::inverse() const {
  Word w;
  w.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    w.letters.push_back(static_cast<Letter>(-*it));
  return w;
}

Word Word::operator*(const Word& o) const {
  Word w = *this;
  for (Letter l : o.letters) {
    if (!w.letters.empty() && w.letters.back() == -l)
      w.letters.pop_back();
    else
      w.letters.push_back(l);
  }
  return w;
}

bool Word::reduced() const {
  for (size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == -letters[i - 1]) return false;
  return true;
}

bool Word::cyclically_reduced() const {
  if (!reduced()) return false;
  if (letters.size() >= 2 && letters.front() == -letters.back()) return false;
  return true;
}

bool Word::operator<(const Word& o) const {
  if (letters.size() != o.letters.size())
    return letters.size() < o.letters.size();
  for (size_t i = 0; i < letters.size(); ++i) {
    int a = letter_index(letters[i]);
    int b = letter_index(o.letters[i]);
    if (a != b) return a < b;
  }
  return false;
}

Word Word::minimal_rotation() const {
  Word best = *this;
  Word rot = *this;
  for (size_t i = 1; i < letters.size(); ++i) {
    std::rotate(rot.letters.begin(), rot.letters.begin() + 1,
                rot.letters.end());
    if (rot < best) best = rot;
  }
  return best;
}

std::string Word::str() const {
  if (letters.empty()) return "e";
  std::string s;
  for (Letter l : letters) {
    char c = static_cast<char>('a' + std::abs(static_cast<int>(l)) - 1);
    if (l < 0) c = static_cast<char>(std::toupper(c));
    s.push_back(c);
  }
  return s;
}

double Character::operator()(const Word& w) const {
  std::vector<int64_t> counts(values.size(), 0);
  for (Letter l : w.letters) {
    size_t gi = static_cast<size_t>(std::abs(static_cast<int>(l)) - 1);
    counts[gi] += (l > 0) ? 1 : -1;
  }
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    s += static_cast<double>(counts[i]) * values[i];
  return s;
}

bool Character::is_zero() const {
  for (double v : values)
    if (v != 0.0) return false;
  return true;
}

// --- SchottkyGroup ---

SchottkyGroup::SchottkyGroup(std::vector<Isometry> generators, Point base_point,
                             std::optional<std::vector<PairingDisc>> discs)
    : gens_(std::move(generators)), base_(base_point) {
  if (gens_.empty()) throw Error("at least one generator required");
  check_guard(base_);
  letter_iso_.resize(2 * gens_.size());
  for (size_t i = 0; i < gens_.size(); ++i) {
    letter_iso_[2 * i] = gens_[i];
    letter_iso_[2 * i + 1] = gens_[i].inverse();
  }
  if (discs) {
    if (discs->size() != 2 * gens_.size())
      throw InvalidDiscs("need one pairing disc per letter");
    discs_ = *discs;
  } else {
    discs_.resize(2 * gens_.size());
    for (size_t i = 0; i < gens_.size(); ++i) {
      cplx a = gens_[i].su_a();
      cplx b = gens_[i].su_b();
      if (std::abs(b) < 1e-12)
        throw NonLoxodromicGenerator(
            "generator fixes the origin; no isometric circle");
      // g maps the exterior of its isometric circle onto the interior of
      // the isometric circle of g^{-1}
      discs_[2 * i] = {a / std::conj(b), 1.0 / std::abs(b)};        // D_{+i}
      discs_[2 * i + 1] = {-std::conj(a) / std::conj(b), 1.0 / std::abs(b)};
    }
  }
}

const Isometry& SchottkyGroup::letter_isometry(Letter l) const {
  return letter_iso_[static_cast<size_t>(letter_index(l))];
}

const PairingDisc& SchottkyGroup::letter_disc(Letter l) const {
  return discs_[static_cast<size_t>(letter_index(l))];
}

Isometry SchottkyGroup::evaluate(const Word& w) const {
  Isometry acc;
  for (Letter l : w.letters) acc = acc * letter_isometry(l);
  return acc;
}

std::vector<Letter> SchottkyGroup::alphabet() const {
  std::vector<Letter> out;
  for (int i = 0; i < 2 * rank(); ++i) out.push_back(index_letter(i));
  return out;
}

const ValidationReport& SchottkyGroup::validate(bool throwing) const {
  if (report_) {
    if (throwing && !report_->ok) throw InvalidDiscs(report_->failures.front());
    return *report_;
  }
  ValidationReport rep;
  rep.worst_margin = 1e300;
  auto fail = [&](const std::string& msg) { rep.failures.push_back(msg); };

  for (size_t i = 0; i < gens_.size(); ++i) {
    if (!gens_[i].is_loxodromic()) {
      std::ostringstream os;
      os << "generator " << (i + 1) << " is not loxodromic (|trace| = "
         << std::abs(gens_[i].trace()) << ")";
      if (throwing) throw NonLoxodromicGenerator(os.str());
      fail(os.str());
    }
  }

  const int n_letters = 2 * rank();
  // orthogonality to the boundary circle (so disc boundaries are geodesics)
  for (int i = 0; i < n_letters; ++i) {
    const PairingDisc& d = discs_[static_cast<size_t>(i)];
    double orth = std::abs(std::norm(d.center) - 1.0 - d.radius * d.radius);
    if (orth > 1e-9) {
      std::ostringstream os;
      os << "disc " << i << " does not meet the boundary orthogonally";
      fail(os.str());
    }
  }

  // pairwise disjointness (Euclidean test is exact for round discs)
  for (int i = 0; i < n_letters && rep.failures.empty(); ++i)
    for (int j = i + 1; j < n_letters; ++j) {
      const PairingDisc& a = discs_[static_cast<size_t>(i)];
      const PairingDisc& b = discs_[static_cast<size_t>(j)];
      double gap = std::abs(a.center - b.center) - a.radius - b.radius;
      if (gap <= 0.0) {
        std::ostringstream os;
        os << "pairing discs " << i << " and " << j << " are not disjoint "
           << "(euclidean gap " << gap << ")";
        fail(os.str());
      }
    }

  // ping-pong inclusions sampled on disc boundaries: each letter maps every
  // other disc boundary strictly inside its target disc
  if (rep.failures.empty()) {
    const int samples = 512;
    for (int li = 0; li < n_letters; ++li) {
      Letter l = index_letter(li);
      const Isometry& h = letter_iso_[static_cast<size_t>(li)];
      const PairingDisc& target = letter_disc(l);
      for (int mj = 0; mj < n_letters; ++mj) {
        if (index_letter(mj) == static_cast<Letter>(-l)) continue;
        const PairingDisc& src = discs_[static_cast<size_t>(mj)];
        for (int s = 0; s < samples; ++s) {
          cplx z = src.center +
                   std::polar(src.radius, kTwoPi * s / samples);
          if (std::abs(z) >= 1.0 - 1e-9) continue;  // outside the model
          cplx w = (h.su_a() * z + h.su_b()) /
                   (std::conj(h.su_b()) * z + std::conj(h.su_a()));
          double margin = target.radius - std::abs(w - target.center);
          rep.worst_margin = std::min(rep.worst_margin, margin);
          if (margin <= 0.0) {
            std::ostringstream os;
            os << "ping-pong failure: letter " << static_cast<int>(l)
               << " maps a point of disc " << mj << " outside its target "
               << "(margin " << margin << ")";
            fail(os.str());
            break;
          }
        }
        if (!rep.failures.empty()) break;
      }
      if (!rep.failures.empty()) break;
    }
  }

  if (rep.failures.empty()) {
    // base point must lie outside every closed disc
    for (int i = 0; i < n_letters; ++i) {
      if (discs_[static_cast<size_t>(i)].contains(base_.z)) {
        fail("base point lies inside a pairing disc");
        break;
      }
    }
  }

  if (rep.failures.empty()) {
    // certified nesting gap s0 = min over admissible letter pairs (l, m)
    // of the distance between bd D_{+l} and bd (h_l D_{+m})
    rep.s0 = 1e300;
    for (int li = 0; li < n_letters; ++li) {
      Letter l = index_letter(li);
      const Isometry& h = letter_iso_[static_cast<size_t>(li)];
      auto [a1, b1] = disc_arc(letter_disc(l));
      for (int mj = 0; mj < n_letters; ++mj) {
        Letter m = index_letter(mj);
        if (m == static_cast<Letter>(-l)) continue;
        PairingDisc img = map_disc(h, letter_disc(m));
        auto [a2, b2] = disc_arc(img);
        rep.s0 = std::min(rep.s0, line_gap(a1, b1, a2, b2));
      }
    }
    rep.s0 = std::max(1e-6, rep.s0 - 1e-9);  // shave a safety epsilon

    rep.D0 = 0.0;
    for (int i = 0; i < n_letters; ++i)
      rep.D0 = std::max(rep.D0, dist_to_disc(base_, discs_[static_cast<size_t>(i)]));

    rep.min_letter_displacement = 1e300;
    for (int i = 0; i < n_letters; ++i)
      rep.min_letter_displacement =
          std::min(rep.min_letter_displacement,
                   dist(base_, letter_iso_[static_cast<size_t>(i)].apply(base_)));
  }

  rep.ok = rep.failures.empty();
  report_ = rep;
  if (throwing && !rep.ok) throw InvalidDiscs(rep.failures.front());
  return *report_;
}

double SchottkyGroup::nesting_gap() const {
  validate();
  return report_->s0;
}

double SchottkyGroup::base_disc_distance() const {
  validate();
  return report_->D0;
}

double SchottkyGroup::letter_order_position(Letter l) const {
  return static_cast<double>(letter_index(l));
}

namespace {

struct DfsFrame {
  Isometry acc;      // product of the word so far
  Point pulled_x;    // word^{-1} applied to x
};

}  // namespace

EnumStats SchottkyGroup::enumerate(
    const EnumOptions& opts, const Point& x, const Point& y,
    const std::function<void(const Word&, const Isometry&, double)>& emit)
    const {
  validate();
  EnumStats stats;
  const double dxy0 = displacement(x, Isometry(), y);
  if (opts.include_identity &&
      (opts.max_displacement < 0.0 || dxy0 <= opts.max_displacement)) {
    emit(Word(), Isometry(), dxy0);
    ++stats.emitted;
  }
  ++stats.visited;

  size_t maxlen = opts.max_wordlen;
  if (opts.max_displacement >= 0.0) {
    double s0 = nesting_gap();
    double bound = (opts.max_displacement + dist(x, base_) + dist(y, base_)) /
                       s0 + 2.0;
    size_t geom = static_cast<size_t>(std::max(1.0, bound));
    maxlen = (maxlen == 0) ? geom : std::min(maxlen, geom);
  }
  if (maxlen == 0) maxlen = 1;  // nothing to do otherwise

  bool y_outside = true;
  for (const auto& d : discs_)
    if (d.contains(y.z)) y_outside = false;

  std::vector<Letter> letters = opts.alphabet;
  if (letters.empty()) letters = alphabet();
  std::sort(letters.begin(), letters.end(),
            [](Letter a, Letter b) { return letter_index(a) < letter_index(b); });
  const int n_letters = static_cast<int>(letters.size());
  std::vector<Letter> word;
  // iterative deepening keeps the emission order (length, then lexicographic)
  for (size_t depth = 1; depth <= maxlen && !stats.budget_exceeded; ++depth) {
    bool emitted_this_depth = false;
    std::vector<DfsFrame> frames(depth + 1);
    frames[0] = {Isometry(), x};
    word.clear();

    // explicit stack of next-letter indices
    std::vector<int> next(depth + 1, 0);
    size_t level = 0;
    while (true) {
      if (stats.visited >= opts.node_budget) {
        stats.budget_exceeded = true;
        break;
      }
      if (next[level] >= n_letters) {
        if (level == 0) break;
        --level;
        word.pop_back();
        continue;
      }
      Letter l = letters[static_cast<size_t>(next[level]++)];
      if (word.empty() && opts.first_letter && l != *opts.first_letter)
        continue;
      if (!word.empty() && l == -word.back()) continue;
      // certified displacement prune: every completion through this child
      // lands in the child's target disc
      if (opts.max_displacement >= 0.0 && y_outside) {
        double lower = dist_to_disc(frames[level].pulled_x, letter_disc(l));
        if (lower > opts.max_displacement + 1e-9) continue;
      }
      ++stats.visited;
      const Isometry& h = letter_iso_[static_cast<size_t>(letter_index(l))];
      Isometry acc = frames[level].acc * h;
      word.push_back(l);
      if (word.size() == depth) {
        double d = displacement(x, acc, y);
        if (opts.max_displacement < 0.0 || d <= opts.max_displacement) {
          emit(Word(word), acc, d);
          ++stats.emitted;
          emitted_this_depth = true;
        }
        word.pop_back();
      } else {
        frames[level + 1] = {acc, h.inverse().apply(frames[level].pulled_x)};
        ++level;
        next[level] = 0;
      }
    }
    if (stats.budget_exceeded) break;
    if (!emitted_this_depth && opts.max_displacement >= 0.0 && depth > 2)
      break;  // certified: deeper levels only move farther out
  }
  return stats;
}

EnumStats SchottkyGroup::enumerate_partition(
    Letter first, const EnumOptions& opts, const Point& x, const Point& y,
    const std::function<void(const Word&, const Isometry&, double)>& emit)
    const {
  EnumOptions sub = opts;
  sub.include_identity = false;
  sub.first_letter = first;
  return enumerate(sub, x, y, emit);
}

std::vector<ConjClass> SchottkyGroup::conjugacy_classes(
    double max_translation_length, uint64_t node_budget) const {
  validate();
  std::vector<ConjClass> out;
  if (max_translation_length <= 0.0) return out;
  double s0 = nesting_gap();
  size_t m_max =
      static_cast<size_t>(std::floor(max_translation_length / s0)) + 1;
  const int n_letters = 2 * rank();
  uint64_t visited = 0;

  std::vector<Letter> word;
  for (size_t m = 1; m <= m_max; ++m) {
    std::vector<int> next(m + 1, 0);
    std::vector<Isometry> prod(m + 1);
    prod[0] = Isometry();
    word.clear();
    size_t level = 0;
    while (true) {
      if (visited >= node_budget)
        throw BudgetExceeded("conjugacy class enumeration budget exhausted");
      if (next[level] >= n_letters) {
        if (level == 0) break;
        --level;
        word.pop_back();
        continue;
      }
      Letter l = index_letter(next[level]++);
      if (!word.empty() && l == -word.back()) continue;
      // cyclic reducedness at the seam
      if (word.size() + 1 == m && m >= 2 && l == -word.front()) continue;
      ++visited;
      word.push_back(l);
      prod[level + 1] = prod[level] * letter_isometry(l);
      if (word.size() == m) {
        Word w(word);
        Word minrot = w.minimal_rotation();
        if (w == minrot) {
          double tr = std::abs(prod[m].trace());
          if (tr > 2.0) {
            double ell = 2.0 * std::acosh(0.5 * tr);
            if (ell <= max_translation_length) {
              // primitive iff the cyclic word is not a proper power
              bool primitive = true;
              for (size_t d = 1; primitive && d < m; ++d) {
                if (m % d != 0) continue;
                bool period = true;
                for (size_t i = 0; i + d < m && period; ++i)
                  period = (word[i] == word[i + d]);
                if (period) primitive = false;
              }
              out.push_back({minrot, ell, primitive});
            }
          }
        }
        word.pop_back();
      } else {
        ++level;
        next[level] = 0;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ConjClass& a, const ConjClass& b) {
    return a.rep < b.rep;
  });
  return out;
}

std::pair<Point, Word> SchottkyGroup::reduce_point(const Point& z,
                                                   int max_steps) const {
  Point cur = z;
  std::vector<Letter> applied;  // letters applied, in application order
  for (int step = 0; step < max_steps; ++step) {
    bool inside = false;
    for (int i = 0; i < 2 * rank(); ++i) {
      const PairingDisc& d = discs_[static_cast<size_t>(i)];
      if (d.contains(cur.z, 1e-13)) {
        Letter l = index_letter(i);
        cur = letter_isometry(static_cast<Letter>(-l)).apply(cur);
        applied.push_back(static_cast<Letter>(-l));
        inside = true;
        break;
      }
    }
    if (!inside) {
      Word w;
      for (auto it = applied.rbegin(); it != applied.rend(); ++it)
        w.letters.push_back(*it);
      return {cur, w};
    }
  }
  throw Error("point reduction did not terminate (near the limit set?)");
}

uint64_t SchottkyGroup::content_hash() const {
  uint64_t h = 1469598103934665603ull;
  for (const auto& g : gens_) {
    h = hash_double(g.su_a().real(), h);
    h = hash_double(g.su_a().imag(), h);
    h = hash_double(g.su_b().real(), h);
    h = hash_double(g.su_b().imag(), h);
  }
  for (const auto& d : discs_) {
    h = hash_double(d.center.real(), h);
    h = hash_double(d.center.imag(), h);
    h = hash_double(d.radius, h);
  }
  h = hash_double(base_.z.real(), h);
  h = hash_double(base_.z.imag(), h);
  return h;
}

// --- axes ---

double translation_length(const Isometry& g) {
  double tr = std::abs(g.trace());
  if (tr <= 2.0) throw NotLoxodromic("translation length requires |tr| > 2");
  return 2.0 * std::acosh(0.5 * tr);
}

double translation_length(const SchottkyGroup& G, const Word& w) {
  return translation_length(G.evaluate(w));
}

std::pair<BoundaryPoint, BoundaryPoint> axis(const Isometry& g) {
  double tr = g.trace();
  if (std::abs(tr) <= 2.0) throw NotLoxodromic("axis requires |tr| > 2");
  cplx a = g.su_a(), b = g.su_b();
  double disc = a.real() * a.real() - 1.0;
  double root = std::sqrt(disc);
  cplx zp = (cplx(0.0, a.imag()) + root) / std::conj(b);
  cplx zm = (cplx(0.0, a.imag()) - root) / std::conj(b);
  // attracting fixed point has |g'| < 1, i.e. |conj(b) z + conj(a)| > 1
  double dp = std::abs(std::conj(b) * zp + std::conj(a));
  BoundaryPoint fp_p = BoundaryPoint::from_unit(zp / std::abs(zp));
  BoundaryPoint fp_m = BoundaryPoint::from_unit(zm / std::abs(zm));
  if (dp > 1.0) return {fp_p, fp_m};
  return {fp_m, fp_p};
}

}  // namespace gibbs
