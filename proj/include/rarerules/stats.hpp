#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "rarerules/mining.hpp"

namespace rarerules {

/// Classification rates of a single rule together with its relative risk.
/// local_support coincides with tpr by definition.
struct RuleMetrics {
  double tpr = 0;
  double tnr = 0;
  double fpr = 0;
  double fnr = 0;
  double local_support = 0;
  double confidence = 0;
  double relative_risk = 0;  // +infinity when no unmatched positive exists
};

/// Outcome of the nested-count hypothesis test: reject the equal-probability
/// null iff the counts differ by at least the margin k.
struct TestDecision {
  bool reject = false;
  std::int64_t diff_count = 0;
  int margin = 1;
  // Advisory asymptotic power bound; NaN when the variance term vanishes.
  double power_lower_bound = std::numeric_limits<double>::quiet_NaN();
};

/// Standard normal CDF via the complementary error function. Absolute error
/// is far below the 1e-7 contract (libm erfc is correctly rounded to ~1 ulp).
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// RR estimation mode. The raw plug-in estimate is the default everywhere;
/// Haldane-style 0.5 smoothing is a reporting option only (the pruning
/// inequalities are proved for raw probabilities).
enum class RrEstimate { raw, haldane };

/// Rates and relative risk from exact rule counts.
///
/// Relative risk follows the conditional-probability definition:
///   RR = [conf/supp] / [(n_pos - conf) / (n - supp)]
/// with a +infinity sentinel when every positive is matched.
inline RuleMetrics metrics(const ClassRule& rule, std::size_t n_pos, std::size_t n_neg,
                           RrEstimate estimate = RrEstimate::raw) {
  if (n_pos < 1 || n_neg < 1) throw DataError("metrics: needs n_pos >= 1 and n_neg >= 1");
  const std::size_t n = n_pos + n_neg;
  const std::size_t matched_pos = rule.conf_count;
  const std::size_t matched_neg = rule.neg_count();
  if (matched_pos > n_pos || matched_neg > n_neg)
    throw DataError("metrics: rule counts inconsistent with totals");
  if (rule.supp_count == n)
    throw DataError("metrics: relative risk undefined, pattern matches every transaction");

  RuleMetrics m;
  m.tpr = static_cast<double>(matched_pos) / static_cast<double>(n_pos);
  m.fpr = static_cast<double>(matched_neg) / static_cast<double>(n_neg);
  m.tnr = 1.0 - m.fpr;
  m.fnr = 1.0 - m.tpr;
  m.local_support = m.tpr;
  m.confidence = rule.supp_count == 0
                     ? 0.0
                     : static_cast<double>(matched_pos) / static_cast<double>(rule.supp_count);

  const std::size_t unmatched_pos = n_pos - matched_pos;
  if (estimate == RrEstimate::haldane) {
    const double matched_rate = (static_cast<double>(matched_pos) + 0.5) /
                                (static_cast<double>(rule.supp_count) + 1.0);
    const double unmatched_rate = (static_cast<double>(unmatched_pos) + 0.5) /
                                  (static_cast<double>(n - rule.supp_count) + 1.0);
    m.relative_risk = matched_rate / unmatched_rate;
  } else if (unmatched_pos == 0) {
    m.relative_risk = std::numeric_limits<double>::infinity();
  } else {
    const double unmatched_rate = static_cast<double>(unmatched_pos) /
                                  static_cast<double>(n - rule.supp_count);
    m.relative_risk = m.confidence / unmatched_rate;
  }
  return m;
}

/// Count-based test for nested patterns. The sub-pattern's count dominates
/// by inclusion, so a violated ordering signals corrupted inputs. Its exact
/// significance level is 0: under the null the two counts are equal and the
/// difference can never reach k.
inline TestDecision count_test(std::size_t count_small, std::size_t count_large_pattern,
                               int k) {
  if (k < 1) throw DataError("count_test: margin k must be a positive integer");
  if (count_small < count_large_pattern)
    throw DataError("count_test: sub-pattern count below superset count (corrupted inputs)");
  TestDecision d;
  d.diff_count = static_cast<std::int64_t>(count_small - count_large_pattern);
  d.margin = k;
  d.reject = d.diff_count >= k;
  return d;
}

/// Test statistic u_n of the asymptotic power bound.
inline double power_un(std::size_t n, double pi_hat_U, double pi_hat_Uprime, int k,
                       double pi1) {
  if (n < 1) throw DataError("power_un: n must be >= 1");
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw DataError("power_un: pi1 must lie in (0,1)");
  if (!(pi_hat_U > pi_hat_Uprime))
    throw DataError("power_un: zero variance, bound undefined");
  const double diff = pi_hat_U - pi_hat_Uprime;
  const double denom = std::sqrt(diff * (1.0 + pi_hat_Uprime - pi_hat_U) /
                                 static_cast<double>(n));
  return (static_cast<double>(k) / static_cast<double>(n) - pi1) / denom;
}

/// Asymptotic lower bound 1 - Phi(u_n) on the power of the count test.
/// Advisory output only; decisions are purely count-based.
inline double power_bound(std::size_t n, double pi_hat_U, double pi_hat_Uprime, int k,
                          double pi1) {
  return 1.0 - std_normal_cdf(power_un(n, pi_hat_U, pi_hat_Uprime, k, pi1));
}

}  // namespace rarerules
