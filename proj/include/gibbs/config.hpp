#ifndef GIBBS_CONFIG_HPP
#define GIBBS_CONFIG_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/patterson.hpp"
#include "gibbs/potential.hpp"
#include "gibbs/schottky.hpp"

// Experiment configuration: a plain sectioned key-value text format with a
// content hash that is stable under key reordering.

namespace gibbs {

struct PotentialSpec {
  std::string kind = "constant";  // constant | bump
  double kappa = 0.0;
  // bump parameters
  double center_re = 0.0, center_im = 0.0, center_angle = 0.0;
  double radius = 0.5, width = 1.0, amplitude = 1.0;
  bool reversible = false;
};

struct ExperimentConfig {
  // group
  std::vector<std::array<double, 4>> generators;  // half-plane, row-major
  std::optional<std::vector<PairingDisc>> discs;
  Point base_point;

  PotentialSpec potential;
  std::optional<std::vector<double>> character;
  std::vector<Letter> semigroup_alphabet;

  // run parameters
  double horizon = 14.0;
  size_t depth = 8;
  double exponent = 0.0;     // density exponent; 0 = auto (oracle + 0.02)
  double bucket = 1.0;
  uint64_t budget = 50'000'000;
  double tolerance = 1e-9;
  double arc_start = 0.0, arc_len = 0.0;  // sector arc
  std::string ball_word = "ab";
  double ball_T = 2.0, ball_Tp = 2.0, ball_r = 1.5;
  double xi_angle = 1.0;     // probe boundary point for crossratio
  int limit_n = 40;

  std::vector<std::string> warnings;  // parse-time warnings
  uint64_t content_hash = 0;

  SchottkyGroup make_group() const;
  Potential make_potential(std::shared_ptr<const SchottkyGroup> G) const;
  std::optional<Character> make_character() const;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name);
ExperimentConfig parse_config(const std::string& path);

}  // namespace gibbs

#endif  // GIBBS_CONFIG_HPP
