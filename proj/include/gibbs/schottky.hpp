#ifndef GIBBS_SCHOTTKY_HPP
#define GIBBS_SCHOTTKY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/hypgeom.hpp"

// Schottky group combinatorics: validated ping-pong data, reduced-word and
// conjugacy-class enumeration with displacement pruning, translation lengths
// and axes, real characters.

namespace gibbs {

// Letters are nonzero signed generator indices: +i is g_i, -i is g_i^{-1},
// 1 <= i <= k. Enumeration order of letters is +1, -1, +2, -2, ...
using Letter = int8_t;

struct Word {
  std::vector<Letter> letters;

  Word() = default;
  explicit Word(std::vector<Letter> ls) : letters(std::move(ls)) {}
  bool empty() const { return letters.empty(); }
  size_t size() const { return letters.size(); }
  Word inverse() const;
  // Concatenation followed by free reduction.
  Word operator*(const Word& o) const;
  bool reduced() const;
  bool cyclically_reduced() const;
  // Lexicographically minimal rotation in the letter order above.
  Word minimal_rotation() const;
  bool operator==(const Word& o) const { return letters == o.letters; }
  bool operator<(const Word& o) const;
  std::string str() const;  // e.g. "a B b A" style letters
};

struct Character {
  std::vector<double> values;  // one per generator

  // Computed from exponent-count vectors so that chi(w^-1) == -chi(w) and
  // chi(uv) == chi(u) + chi(v) hold exactly in floating point.
  double operator()(const Word& w) const;
  bool is_zero() const;
};

struct PairingDisc {
  cplx center;     // Euclidean centre in the disc model
  double radius;   // Euclidean radius
  bool contains(cplx z, double margin = 0.0) const {
    return std::abs(z - center) <= radius - margin;
  }
};

struct ValidationReport {
  bool ok = false;
  double worst_margin = 0.0;  // min over required strict inclusions
  double s0 = 0.0;            // certified nesting gap (hyperbolic)
  double D0 = 0.0;            // max over discs of dist(base, disc)
  double min_letter_displacement = 0.0;
  std::vector<std::string> failures;
};

struct ConjClass {
  Word rep;                    // cyclically reduced, minimal rotation
  double translation_length;   // 2 arccosh(|tr|/2)
  bool primitive;
};

struct EnumOptions {
  size_t max_wordlen = 0;              // 0 = derive from displacement filter
  double max_displacement = -1.0;      // emit only d(x, gama y) <= this; <0 = all
  uint64_t node_budget = 50'000'000;   // visited nodes cap
  bool include_identity = true;
  // restrict to words over these letters (still cancellation-free); empty =
  // the full alphabet
  std::vector<Letter> alphabet;
  // restrict to words starting with this letter (parallel partitions)
  std::optional<Letter> first_letter;
};

struct EnumStats {
  uint64_t visited = 0;
  uint64_t emitted = 0;
  bool budget_exceeded = false;
};

class SchottkyGroup {
 public:
  // Generators in the half-plane matrix convention. Discs default to the
  // isometric circles of the generators; explicit discs may override them
  // (indexed +1, -1, +2, -2, ...).
  SchottkyGroup(std::vector<Isometry> generators, Point base_point = Point(),
                std::optional<std::vector<PairingDisc>> discs = std::nullopt);

  // Numerical ping-pong validation; also computes the certified constants
  // s0 and D0 used by enumeration cutoffs. Throws InvalidDiscs /
  // NonLoxodromicGenerator on hard failures when `throwing` is set.
  const ValidationReport& validate(bool throwing = true) const;

  int rank() const { return static_cast<int>(gens_.size()); }
  const Point& base_point() const { return base_; }
  const Isometry& letter_isometry(Letter l) const;
  const PairingDisc& letter_disc(Letter l) const;  // D_{+i} for l = +i
  Isometry evaluate(const Word& w) const;          // letter-wise product
  const std::vector<Isometry>& generators() const { return gens_; }

  // Certified constants (validate() must have succeeded).
  double nesting_gap() const;           // s0
  double base_disc_distance() const;    // D0
  double letter_order_position(Letter l) const;

  // All letters in the canonical enumeration order.
  std::vector<Letter> alphabet() const;

  // Deterministic depth-first enumeration of reduced words (length, then
  // lexicographic in the canonical letter order); prefix-monotone pruning by
  // the certified displacement bound when max_displacement is set. The
  // callback receives the word, its isometry, and d(x, gamma y).
  EnumStats enumerate(
      const EnumOptions& opts, const Point& x, const Point& y,
      const std::function<void(const Word&, const Isometry&, double)>& emit)
      const;

  // Restriction of `enumerate` to words starting with a given first letter
  // (identity never emitted); used for deterministic parallel partitions.
  EnumStats enumerate_partition(
      Letter first, const EnumOptions& opts, const Point& x, const Point& y,
      const std::function<void(const Word&, const Isometry&, double)>& emit)
      const;

  // Every conjugacy class of loxodromic elements with translation length
  // <= max_translation_length, each exactly once (deterministic order:
  // word length, then lexicographic on the minimal rotation).
  std::vector<ConjClass> conjugacy_classes(double max_translation_length,
                                           uint64_t node_budget =
                                               50'000'000) const;

  // Ping-pong reduction of a point: returns the reduced point (outside all
  // open pairing discs) and the word u with u * z inside the fundamental
  // region; depth-capped.
  std::pair<Point, Word> reduce_point(const Point& z, int max_steps = 200)
      const;

  // Content hash of the defining data (generators, discs, base point).
  uint64_t content_hash() const;

 private:
  std::vector<Isometry> gens_;
  std::vector<Isometry> letter_iso_;   // index: letter_index(l)
  std::vector<PairingDisc> discs_;     // same indexing
  Point base_;
  mutable std::optional<ValidationReport> report_;
};

int letter_index(Letter l);  // +1,-1,+2,-2,... -> 0,1,2,3,...
Letter index_letter(int idx);

// Boundary-circle endpoints of a pairing disc, in circle orientation.
std::pair<BoundaryPoint, BoundaryPoint> disc_arc(const PairingDisc& d);

// Attracting / repelling fixed points of a loxodromic isometry.
std::pair<BoundaryPoint, BoundaryPoint> axis(const Isometry& g);

double translation_length(const Isometry& g);  // 2 arccosh(|tr|/2)

// Translation length of the conjugacy class of w in the group.
double translation_length(const SchottkyGroup& G, const Word& w);

struct FreeSemigroup {
  std::vector<Letter> alphabet;  // letters allowed; enumeration emits words
                                 // over these letters with no cancellation
};

}  // namespace gibbs

#endif  // GIBBS_SCHOTTKY_HPP
