#ifndef GIBBS_ACCUM_HPP
#define GIBBS_ACCUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gibbs {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Sums a bucket of values in a canonical order (ascending by value, bitwise
// ties broken nowhere since equal doubles add identically). Two buckets
// holding the same multiset of doubles produce bit-identical sums no matter
// how the terms were generated or partitioned.
inline double canonical_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

// log(sum(exp(log_terms))) with the same canonical-order guarantee; safe for
// exponents far outside double range. Returns -inf for an empty bucket.
inline double canonical_log_sum_exp(std::vector<double> log_terms) {
  if (log_terms.empty()) return -std::numeric_limits<double>::infinity();
  std::sort(log_terms.begin(), log_terms.end());
  double m = log_terms.back();
  if (!std::isfinite(m)) return m;
  CompensatedSum acc;
  for (double lt : log_terms) acc.add(std::exp(lt - m));
  return m + std::log(acc.value());
}

}  // namespace gibbs

#endif  // GIBBS_ACCUM_HPP
