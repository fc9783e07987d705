#include "gibbs/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/errors.hpp"

namespace gibbs {

SlopeFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n != y.size() || n < 3)
    throw InsufficientData("slope fit needs at least 3 points");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double intercept = my - fit.slope * mx;
  double ss = 0.0;
  fit.residuals.resize(n);
  for (size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (intercept + fit.slope * x[i]);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.stderr_ = std::sqrt(ss / (static_cast<double>(n - 2)) / sxx);
  return fit;
}

std::vector<double> aitken_sweep(const std::vector<double>& seq) {
  std::vector<double> out;
  if (seq.size() < 3) return out;
  for (size_t i = 0; i + 2 < seq.size(); ++i) {
    double d1 = seq[i + 1] - seq[i];
    double d2 = seq[i + 2] - 2.0 * seq[i + 1] + seq[i];
    if (std::abs(d2) < 1e-14 * (std::abs(seq[i]) + 1.0))
      out.push_back(seq[i + 2]);
    else
      out.push_back(seq[i] - d1 * d1 / d2);
  }
  return out;
}

double aitken_limit(const std::vector<double>& seq, double* spread) {
  if (seq.empty()) throw InsufficientData("empty sequence");
  std::vector<double> cur = seq;
  for (int sweep = 0; sweep < 3 && cur.size() >= 5; ++sweep) {
    std::vector<double> nxt = aitken_sweep(cur);
    if (nxt.empty()) break;
    cur = std::move(nxt);
  }
  double val = cur.back();
  if (spread) {
    size_t tail = std::min<size_t>(3, cur.size());
    double lo = val, hi = val;
    for (size_t i = cur.size() - tail; i < cur.size(); ++i) {
      lo = std::min(lo, cur[i]);
      hi = std::max(hi, cur[i]);
    }
    *spread = hi - lo;
  }
  return val;
}

PressureEstimate estimate_growth(const std::vector<double>& n_values,
                                 const std::vector<double>& log_values,
                                 const std::string& method_tag) {
  if (n_values.size() < 3)
    throw InsufficientData("growth estimate needs >= 3 nonzero buckets");
  SlopeFit fit = fit_slope(n_values, log_values);

  PressureEstimate est;
  est.method = method_tag;
  est.ls_slope = fit.slope;
  est.stderr_ = fit.stderr_;
  est.residuals = fit.residuals;
  est.window_lo = static_cast<int>(n_values.front());
  est.window_hi = static_cast<int>(n_values.back());

  // increments of the log-sums converge geometrically; accelerate them
  std::vector<double> incr;
  for (size_t i = 1; i < n_values.size(); ++i) {
    double dn = n_values[i] - n_values[i - 1];
    if (dn > 0.0)
      incr.push_back((log_values[i] - log_values[i - 1]) / dn);
  }
  if (incr.size() >= 5) {
    double spread = 0.0;
    est.aitken = aitken_limit(incr, &spread);
    est.aitken_ok = std::isfinite(est.aitken) &&
                    spread < std::max(fit.stderr_, 1e-12) * 4.0;
  } else {
    est.aitken = fit.slope;
    est.aitken_ok = false;
  }
  est.value = est.aitken_ok ? est.aitken : fit.slope;
  est.converged =
      std::abs(est.aitken - fit.slope) <= 3.0 * std::max(fit.stderr_, 1e-12);
  return est;
}

}  // namespace gibbs
