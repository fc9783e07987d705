#ifndef GIBBS_PRESSURE_HPP
#define GIBBS_PRESSURE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gibbs/estimate.hpp"
#include "gibbs/potential.hpp"
#include "gibbs/schottky.hpp"

// Exponential growth-rate estimators: (twisted) Poincare series tables,
// critical exponents, Gurevich pressure over periodic orbits, semigroup
// exponents and the independent transfer-operator oracle.

namespace gibbs {

// Annular sums a_j = sum over gamma with d in ((j-1)c, jc] of
// e^{chi(gamma) + int_x^{gamma y} F}, stored in the log domain.
struct SeriesTable {
  double bucket_width = 1.0;        // c
  std::vector<double> log_sums;     // index j: displacement in ((j-1)c, jc]
  std::vector<uint64_t> counts;
  std::vector<double> max_disp;     // largest displacement seen per bucket
  double horizon = 0.0;             // n_max
  bool truncated = false;           // budget hit; sums partial
  uint64_t terms = 0;

  // merge adjacent buckets (doubles the annulus width)
  SeriesTable rebucket(int factor) const;
  // abscissas j*c and log-sums of the nonzero buckets
  void nonzero(std::vector<double>* n, std::vector<double>* logs) const;
  bool bitwise_equal(const SeriesTable& o) const;
};

struct TableOptions {
  double bucket_width = 1.0;
  uint64_t node_budget = 50'000'000;
  int workers = 1;
  std::vector<Letter> alphabet;           // empty = whole group
  bool kernel_filter = false;             // keep only chi(gamma) == 0
  QuadratureOptions quad;
};

// Orbit table over the group (or a semigroup alphabet). The flip identity
// Q_{F o iota, chi, x, y} = Q_{F, -chi, y, x} is applied structurally when
// every bump term of F is flipped, which makes flip-law comparisons
// bit-exact by construction.
SeriesTable annular_table(const SchottkyGroup& G, const Potential& F,
                          const std::optional<Character>& chi, const Point& x,
                          const Point& y, double n_max,
                          const TableOptions& opts = {});

// Regression + Aitken estimate from a table; auto-raises the annulus width
// until the fitted window has no empty buckets.
PressureEstimate critical_exponent(const SeriesTable& table);

// One-call convenience: table then estimate.
PressureEstimate critical_exponent(const SchottkyGroup& G, const Potential& F,
                                   const std::optional<Character>& chi,
                                   const Point& x, const Point& y,
                                   double n_max, const TableOptions& opts = {});

enum class SeriesVerdict { converged, divergent, indeterminate };

struct PartialSums {
  std::vector<double> log_partial;  // ln Q_N(s) for N = 1..n_max
  SeriesVerdict verdict = SeriesVerdict::indeterminate;
  double tail_ratio = 0.0;          // last-tail mass over head mass
};

PartialSums poincare_partial(const SchottkyGroup& G, const Potential& F,
                             const std::optional<Character>& chi, double s,
                             const Point& x, const Point& y, double n_max,
                             const TableOptions& opts = {});

struct GurevichOptions {
  double bucket_width = 1.0;      // c
  double window_radius = -1.0;    // < 0: auto from the generator axes
  bool primitive_only = false;
  uint64_t node_budget = 50'000'000;
  QuadratureOptions quad;
};

// Annular periodic-orbit table: sums of e^{chi(g) + Per_F(g)} over conjugacy
// classes with translation length in ((j-1)c, jc] whose orbit meets the
// window ball B(base, window_radius).
SeriesTable gurevich_table(const SchottkyGroup& G, const Potential& F,
                           const std::optional<Character>& chi, double t_max,
                           const GurevichOptions& opts = {});

PressureEstimate gurevich_pressure(const SchottkyGroup& G, const Potential& F,
                                   const std::optional<Character>& chi,
                                   double t_max,
                                   const GurevichOptions& opts = {});

// --- transfer-operator oracle ---

struct TransferOptions {
  int grid_size = 128;        // nodes per boundary arc
  int panels = 2;             // Chebyshev panels per arc
  int max_iterations = 20000;
  double eig_tol = 1e-13;
  TruncationOptions trunc;
  QuadratureOptions quad;
};

class TransferOperator {
 public:
  TransferOperator(const SchottkyGroup& G, const Potential& F,
                   const TransferOptions& opts = {});

  // log of the leading eigenvalue of L_s; strictly decreasing in s.
  double log_eigenvalue(double s) const;
  // weight of branch `letter` at a node, factored as exp(base - s * beta)
  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Branch {
    int target_offset;                 // start index of the target panel
    int target_len;
    std::vector<double> interp;        // barycentric row onto target nodes
    double cocycle_base;               // s-independent part of -C_{F-s}
    double beta;                       // Busemann factor multiplying s
  };
  struct Node {
    double theta;
    std::vector<Branch> branches;
  };
  std::vector<Node> nodes_;
  int max_iterations_;
  double eig_tol_;
};

// Root of log_eigenvalue(s) = 0, located by bracketing + bisection/secant.
PressureEstimate critical_exponent_oracle(const SchottkyGroup& G,
                                          const Potential& F,
                                          const TransferOptions& opts = {});

// Semigroup critical exponent over a restricted letter alphabet.
PressureEstimate semigroup_delta(const SchottkyGroup& G,
                                 const FreeSemigroup& S, const Potential& F,
                                 double n_max, const TableOptions& opts = {});

struct KernelGapResult {
  PressureEstimate full;     // delta_{Gamma, F}
  PressureEstimate kernel;   // delta over { chi(gamma) = 0 }
  double gap = 0.0;
  bool slow_convergence_caveat = true;
};

// Enumeration-filtered kernel exponent next to the full one.
KernelGapResult kernel_delta_experiment(const SchottkyGroup& G,
                                        const Character& chi,
                                        const Potential& F, double n_max,
                                        const TableOptions& opts = {});

}  // namespace gibbs

#endif  // GIBBS_PRESSURE_HPP
