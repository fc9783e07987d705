#ifndef GIBBS_ESTIMATE_HPP
#define GIBBS_ESTIMATE_HPP

#include <string>
#include <vector>

// Exponent estimation: least-squares slope fitting with Aitken refinement
// and the shared PressureEstimate record.

namespace gibbs {

struct PressureEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int window_lo = 0;
  int window_hi = 0;
  std::string method;            // "regression" | "transfer-root" | ...
  double ls_slope = 0.0;         // raw least-squares slope
  double aitken = 0.0;           // accelerated second estimate
  bool aitken_ok = false;        // the accelerated tail was stable
  bool converged = true;         // |aitken - ls| within 3 sigma
  std::vector<double> residuals;
};

// Least-squares slope of y against x with slope standard error from the
// residuals; requires >= 3 points.
struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::vector<double> residuals;
};
SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// One Aitken delta-squared sweep (size shrinks by 2).
std::vector<double> aitken_sweep(const std::vector<double>& seq);

// Repeated-sweep accelerated limit of a convergent sequence; falls back to
// the last entry when the sequence is too short or the acceleration is
// numerically singular. `spread` (optional out) reports the scatter of the
// last few accelerated values.
double aitken_limit(const std::vector<double>& seq, double* spread = nullptr);

// Shared slope estimator for annular tables: fits ln(a_n) against n over
// [window_lo, window_hi], refines with Aitken on the increments, and fills a
// PressureEstimate (value = Aitken when stable, else the LS slope).
PressureEstimate estimate_growth(const std::vector<double>& n_values,
                                 const std::vector<double>& log_values,
                                 const std::string& method_tag);

}  // namespace gibbs

#endif  // GIBBS_ESTIMATE_HPP
