#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gibbs/schottky.hpp"

using namespace gibbs;

namespace {

std::vector<Word> all_reduced_words(int k, size_t maxlen) {
  std::vector<Word> out;
  out.emplace_back();
  std::vector<Word> level = {Word()};
  for (size_t len = 1; len <= maxlen; ++len) {
    std::vector<Word> next;
    for (const Word& w : level) {
      for (int idx = 0; idx < 2 * k; ++idx) {
        Letter l = index_letter(idx);
        if (!w.letters.empty() && l == -w.letters.back()) continue;
        Word e = w;
        e.letters.push_back(l);
        next.push_back(e);
      }
    }
    for (const Word& w : next) out.push_back(w);
    level = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("word reduction, inverse and rotation") {
  Word w({1, 2, -1});
  CHECK(w.reduced());
  CHECK(!w.cyclically_reduced());
  Word v = w * w.inverse();
  CHECK(v.empty());
  Word ab({1, 2});
  Word ba({2, 1});
  CHECK(ab.minimal_rotation() == ab);
  CHECK(ba.minimal_rotation() == ab);
  CHECK(Word({2, -1}).minimal_rotation() == Word({-1, 2}));
  CHECK(ab.str() == "ab");
  CHECK(Word({-1, 2}).str() == "Ab");
}

TEST_CASE("fixture group validates with positive margin") {
  SchottkyGroup G = fixtures::two_generator(2.4);
  const ValidationReport& rep = G.validate();
  CHECK(rep.ok);
  CHECK(rep.worst_margin > 0.0);
  CHECK(rep.s0 > 0.0);
  CHECK(rep.D0 > 0.0);
  CHECK(rep.min_letter_displacement == doctest::Approx(2.4).epsilon(1e-9));
}

TEST_CASE("duplicate generator fails validation (disc collision)") {
  double tau = 1.2;
  Isometry g1 = Isometry::from_half_plane(std::exp(tau), 0.0, 0.0,
                                          std::exp(-tau));
  SchottkyGroup G({g1, g1});
  CHECK_THROWS_AS(G.validate(), InvalidDiscs);
}

TEST_CASE("margin shrinks monotonically as discs approach tangency") {
  double prev = 1e300;
  for (double t : {2.8, 2.4, 2.1, 1.9}) {
    SchottkyGroup G = fixtures::two_generator(t);
    const ValidationReport& rep = G.validate();
    CHECK(rep.ok);
    CHECK(rep.worst_margin < prev);
    prev = rep.worst_margin;
  }
}

TEST_CASE("non-loxodromic generator rejected") {
  Isometry rot = Isometry::from_half_plane(std::cos(0.3), std::sin(0.3),
                                           -std::sin(0.3), std::cos(0.3));
  CHECK_THROWS_AS(SchottkyGroup({rot}), gibbs::Error);
}

TEST_CASE("enumeration counts 1 + 4 + 12 + 36 words at length 3") {
  SchottkyGroup G = fixtures::two_generator();
  EnumOptions opts;
  opts.max_wordlen = 3;
  size_t count = 0;
  std::vector<Word> words;
  G.enumerate(opts, G.base_point(), G.base_point(),
              [&](const Word& w, const Isometry&, double) {
                ++count;
                words.push_back(w);
              });
  CHECK(count == 53);
  CHECK(words[0].empty());
  CHECK(words[1] == Word({1}));
  CHECK(words[2] == Word({-1}));
  CHECK(words[3] == Word({2}));
  CHECK(words[4] == Word({-2}));
  CHECK(words[5] == Word({1, 1}));
  CHECK(words[6] == Word({1, 2}));
  CHECK(words[7] == Word({1, -2}));
  for (size_t i = 1; i < words.size(); ++i) CHECK(words[i - 1] < words[i]);
}

TEST_CASE("identity word has displacement d(x, y)") {
  SchottkyGroup G = fixtures::two_generator();
  Point x(0.1, 0.2), y(-0.3, 0.05);
  EnumOptions opts;
  opts.max_wordlen = 1;
  bool seen = false;
  G.enumerate(opts, x, y, [&](const Word& w, const Isometry&, double d) {
    if (w.empty()) {
      seen = true;
      CHECK(d == doctest::Approx(dist(x, y)).epsilon(1e-14));
    }
  });
  CHECK(seen);
}

TEST_CASE("displacement equals independently recomputed matrix product") {
  SchottkyGroup G = fixtures::two_generator();
  Point x(0.05, -0.1), y(0.2, 0.1);
  EnumOptions opts;
  opts.max_wordlen = 4;
  G.enumerate(opts, x, y, [&](const Word& w, const Isometry& iso, double d) {
    Isometry prod;
    for (Letter l : w.letters) prod = prod * G.letter_isometry(l);
    CHECK(prod.matrix_dist(iso) < 1e-12);
    CHECK(std::abs(dist(x, prod.apply(y)) - d) < 1e-10);
  });
}

TEST_CASE("freeness: words up to length 6 give distinct isometries") {
  SchottkyGroup G = fixtures::two_generator();
  EnumOptions opts;
  opts.max_wordlen = 6;
  std::vector<Isometry> isos;
  G.enumerate(opts, G.base_point(), G.base_point(),
              [&](const Word&, const Isometry& g, double) {
                isos.push_back(g);
              });
  CHECK(isos.size() == 1457);
  std::vector<size_t> idx(isos.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return isos[a].su_a().real() < isos[b].su_a().real();
  });
  double min_gap = 1e300;
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (isos[idx[j]].su_a().real() - isos[idx[i]].su_a().real() > 1e-5)
        break;
      min_gap = std::min(min_gap, isos[idx[i]].matrix_dist(isos[idx[j]]));
    }
  }
  CHECK(min_gap > 1e-6);
}

TEST_CASE("displacement filter emits exactly the annulus contents") {
  SchottkyGroup G = fixtures::two_generator();
  const double cap = 8.0;
  EnumOptions filtered;
  filtered.max_displacement = cap;
  std::set<std::string> got;
  G.enumerate(filtered, G.base_point(), G.base_point(),
              [&](const Word& w, const Isometry&, double d) {
                CHECK(d <= cap);
                got.insert(w.str());
              });
  EnumOptions all;
  all.max_wordlen = 6;  // safely above cap / s0 for the fixture
  std::set<std::string> expect;
  G.enumerate(all, G.base_point(), G.base_point(),
              [&](const Word& w, const Isometry&, double d) {
                if (d <= cap) expect.insert(w.str());
              });
  CHECK(got == expect);
  CHECK(got.size() > 20);
}

TEST_CASE("two enumeration runs produce identical streams") {
  SchottkyGroup G = fixtures::two_generator();
  EnumOptions opts;
  opts.max_displacement = 9.0;
  auto run = [&] {
    std::vector<std::pair<std::string, double>> out;
    G.enumerate(opts, G.base_point(), G.base_point(),
                [&](const Word& w, const Isometry&, double d) {
                  out.emplace_back(w.str(), d);
                });
    return out;
  };
  auto a = run();
  auto b = run();
  CHECK(a == b);
  CHECK(a.size() > 100);
}

TEST_CASE("partitions by first letter cover the stream exactly") {
  SchottkyGroup G = fixtures::two_generator();
  EnumOptions opts;
  opts.max_displacement = 8.5;
  std::multiset<std::string> whole;
  G.enumerate(opts, G.base_point(), G.base_point(),
              [&](const Word& w, const Isometry&, double) {
                if (!w.empty()) whole.insert(w.str());
              });
  std::multiset<std::string> pieces;
  for (Letter l : G.alphabet()) {
    G.enumerate_partition(l, opts, G.base_point(), G.base_point(),
                          [&](const Word& w, const Isometry&, double) {
                            CHECK(w.letters.front() == l);
                            pieces.insert(w.str());
                          });
  }
  CHECK(whole == pieces);
}

TEST_CASE("cyclic group conjugacy classes are the powers") {
  double t = 2.0 * std::log(2.0);
  SchottkyGroup G = fixtures::cyclic(t);
  auto classes = G.conjugacy_classes(5.0 * t + 1e-9);
  REQUIRE(classes.size() == 10);  // g^{+-1..+-5}
  std::map<int, int> by_len;
  for (const auto& c : classes) {
    int n = static_cast<int>(c.rep.size());
    by_len[n]++;
    CHECK(c.translation_length == doctest::Approx(n * t).epsilon(1e-9));
    CHECK(c.primitive == (n == 1));
  }
  for (int n = 1; n <= 5; ++n) CHECK(by_len[n] == 2);
}

TEST_CASE("translation length from trace equals axis displacement") {
  SchottkyGroup G = fixtures::two_generator();
  auto classes = G.conjugacy_classes(8.0);
  CHECK(classes.size() > 4);
  for (const auto& c : classes) {
    Isometry iso = G.evaluate(c.rep);
    auto [plus, minus] = axis(iso);
    Point on_axis = geodesic_eval(minus, plus, 0.0, G.base_point());
    double disp = dist(on_axis, iso.apply(on_axis));
    CHECK(std::abs(disp - c.translation_length) < 1e-9);
  }
}

TEST_CASE("conjugacy classes match a brute-force necklace enumeration") {
  SchottkyGroup G = fixtures::two_generator();
  double bound = 10.0;
  auto classes = G.conjugacy_classes(bound);
  std::set<std::string> got;
  for (const auto& c : classes) got.insert(c.rep.str());

  std::set<std::string> expect;
  size_t m_max = static_cast<size_t>(bound / G.nesting_gap()) + 1;
  for (const Word& w : all_reduced_words(2, m_max)) {
    if (w.empty() || !w.cyclically_reduced()) continue;
    if (!(w.minimal_rotation() == w)) continue;
    double tr = std::abs(G.evaluate(w).trace());
    if (tr <= 2.0) continue;
    if (2.0 * std::acosh(0.5 * tr) <= bound) expect.insert(w.str());
  }
  CHECK(got == expect);
  CHECK(got.size() > 10);
}

TEST_CASE("powers and conjugates have homogeneous translation lengths") {
  SchottkyGroup G = fixtures::two_generator();
  Word w({1, 2});
  double ell = translation_length(G, w);
  Word w2 = w * w;
  Word w3 = w2 * w;
  CHECK(translation_length(G, w2) == doctest::Approx(2 * ell).epsilon(1e-9));
  CHECK(translation_length(G, w3) == doctest::Approx(3 * ell).epsilon(1e-9));
  for (const Word& alpha : {Word({1}), Word({-2, 1}), Word({2, 2, -1})}) {
    Word conj = alpha * w * alpha.inverse();
    CHECK(translation_length(G, conj) == doctest::Approx(ell).epsilon(1e-9));
  }
}

TEST_CASE("axis: fixed points, attraction, inverse swap") {
  double tau = 0.8;
  Isometry g = Isometry::from_half_plane(std::exp(tau), 0.0, 0.0,
                                         std::exp(-tau));
  auto [plus, minus] = axis(g);
  CHECK(angle_dist(plus.theta, 0.0) < 1e-12);
  CHECK(angle_dist(minus.theta, kPi) < 1e-12);
  auto [ip, im] = axis(g.inverse());
  CHECK(angle_dist(ip.theta, minus.theta) < 1e-12);
  CHECK(angle_dist(im.theta, plus.theta) < 1e-12);

  SchottkyGroup G = fixtures::two_generator();
  for (const Word& w : {Word({1, 2}), Word({1, 1, -2}), Word({2, -1, 2})}) {
    Isometry iso = G.evaluate(w);
    auto [a, r] = axis(iso);
    CHECK(std::abs(iso.apply(a).unit() - a.unit()) < 1e-12);
    CHECK(std::abs(iso.apply(r).unit() - r.unit()) < 1e-12);
    BoundaryPoint probe(a.theta + 0.4);
    for (int i = 0; i < 40; ++i) probe = iso.apply(probe);
    CHECK(angle_dist(probe.theta, a.theta) < 1e-8);
  }
  CHECK_THROWS_AS(
      axis(Isometry::from_half_plane(std::cos(0.2), std::sin(0.2),
                                     -std::sin(0.2), std::cos(0.2))),
      NotLoxodromic);
}

TEST_CASE("characters: identity, commutators, exact additivity") {
  Character chi{{1.0, -0.5}};
  CHECK(chi(Word()) == 0.0);
  Word comm = Word({1, 2}) * Word({-1, -2});
  CHECK(chi(comm) == 0.0);
  CHECK(chi(Word({1})) == 1.0);
  CHECK(chi(Word({1})) + chi(Word({-1})) == 0.0);
  for (const Word& u : all_reduced_words(2, 3)) {
    CHECK(chi(u.inverse()) == -chi(u));
    for (const Word& v : all_reduced_words(2, 2)) {
      CHECK(chi(u * v) - chi(u) - chi(v) == 0.0);
    }
  }
}

TEST_CASE("reduce_point undoes a group translation") {
  SchottkyGroup G = fixtures::two_generator();
  for (const Word& w : all_reduced_words(2, 4)) {
    Point z = G.evaluate(w).apply(G.base_point());
    auto [red, u] = G.reduce_point(z);
    CHECK(dist(red, G.base_point()) < 1e-8);
    CHECK(u == w.inverse());
  }
}

TEST_CASE("node budget flags partial enumeration") {
  SchottkyGroup G = fixtures::two_generator();
  EnumOptions opts;
  opts.max_wordlen = 8;
  opts.node_budget = 100;
  EnumStats st = G.enumerate(opts, G.base_point(), G.base_point(),
                             [](const Word&, const Isometry&, double) {});
  CHECK(st.budget_exceeded);
}
