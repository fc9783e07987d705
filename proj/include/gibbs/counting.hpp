#ifndef GIBBS_COUNTING_HPP
#define GIBBS_COUNTING_HPP

#include <optional>

#include "gibbs/patterson.hpp"
#include "gibbs/pressure.hpp"

// Orbital, sectorial, bisectorial and periodic-orbit counting functions
// (plain and twisted), log-growth fits, sector-ratio and periodic-orbit
// equidistribution diagnostics.

namespace gibbs {

struct CountTable {
  SeriesTable annular;                 // weighted annular sums G_c
  std::vector<double> log_cumulative;  // ln G(j c) at the grid points
  std::vector<uint64_t> cum_counts;
  double grid_step = 1.0;
  double t_max = 0.0;

  void finalize_cumulative();          // fills the cumulative arrays
};

struct CountOptions {
  double grid_step = 1.0;  // = annulus width c
  uint64_t node_budget = 50'000'000;
  int workers = 1;
  QuadratureOptions quad;
};

// Bisectorial orbital counting: gamma with d(x, gamma y) <= t, gamma y in
// the cone over U seen from x, gamma^{-1} x in the cone over V seen from y.
// Null arc sets mean the full circle.
CountTable orbital_count(const SchottkyGroup& G, const Potential& F,
                         const std::optional<Character>& chi, const Point& x,
                         const Point& y,
                         const std::optional<BoundaryArcSet>& U,
                         const std::optional<BoundaryArcSet>& V, double t_max,
                         const CountOptions& opts = {});

// Periodic-orbit table: conjugacy classes with translation length <= t_max,
// weights e^{chi(g) + Per_F(g)}.
CountTable periodic_count(const SchottkyGroup& G, const Potential& F,
                          const std::optional<Character>& chi, double t_max,
                          bool primitive_only, const CountOptions& opts = {});

// Slope of ln G_c; returns a zero-slope estimate tagged "eventually-constant"
// when the count stops growing (cone missing the limit set).
PressureEstimate loggrowth_fit(const CountTable& table);

struct SectorRatio {
  double count_ratio = 0.0;  // G_U(t_max) / G(t_max)
  double mass_ratio = 0.0;   // mu_x(U) / ||mu_x||
  bool boundary_mass_warning = false;
};
SectorRatio sector_ratio_test(const SchottkyGroup& G, const Potential& F,
                              const Point& x, const Point& y,
                              const BoundaryArcSet& U, double t_max,
                              const AtomicDensity& density,
                              const CountOptions& opts = {});

struct EquidistResult {
  double orbit_h = 0.0;     // sum over Per'(t) of e^{Per_F} int_g h
  double orbit_ref = 0.0;   // same for the reference bump
  double gibbs_h = 0.0;     // quasi-product integral of h
  double gibbs_ref = 0.0;
};
// Normalisation-free comparison data: orbit_h/orbit_ref should track
// gibbs_h/gibbs_ref as t_max grows.
EquidistResult equidistribution_test(const SchottkyGroup& G,
                                     const Potential& F, double t_max,
                                     const HopfBump& h, const HopfBump& ref,
                                     const ProductGibbs& pg,
                                     const CountOptions& opts = {});

}  // namespace gibbs

#endif  // GIBBS_COUNTING_HPP
