#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rarerules/mining.hpp"
#include "rarerules/stats.hpp"

namespace rarerules {

struct ScoredRule {
  ClassRule rule;
  RuleMetrics metrics;
};

/// One discard decision: which rule fell, the nested witness that felled it,
/// which test was applied, and the counts that drove the decision.
struct AuditEntry {
  enum class Test { equal_support, redundant, weak };

  ClassRule discarded;
  ClassRule witness;
  Test test = Test::redundant;
  std::size_t count_small = 0;          // witness-side count (dominating)
  std::size_t count_large_pattern = 0;  // superset-side count
  std::int64_t diff_count = 0;
  int margin = 1;
  double power_lower_bound = std::numeric_limits<double>::quiet_NaN();
};

inline const char* audit_test_name(AuditEntry::Test t) {
  switch (t) {
    case AuditEntry::Test::equal_support:
      return "equal-support";
    case AuditEntry::Test::redundant:
      return "redundant";
    case AuditEntry::Test::weak:
      return "weak";
  }
  return "?";
}

/// Non-redundant family of risk patterns plus the audit trail of every
/// discard that produced it.
struct PrunedFamily {
  std::vector<ScoredRule> rules;
  std::vector<AuditEntry> audit;
  MiningParams params;
  std::string dataset_fingerprint;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

namespace detail {

/// RR from counts; nullopt when the pattern matches every transaction and
/// the unmatched side is empty.
inline std::optional<double> relative_risk_of(const ClassRule& r, std::size_t n_pos,
                                              std::size_t n_neg) {
  if (r.supp_count == n_pos + n_neg) return std::nullopt;
  return metrics(r, n_pos, n_neg).relative_risk;
}

inline std::map<std::size_t, std::vector<const ClassRule*>> group_by_length(
    const RuleSet& rs) {
  std::map<std::size_t, std::vector<const ClassRule*>> groups;
  for (const auto& r : rs.rules) groups[r.antecedent.length()].push_back(&r);
  return groups;
}

inline RuleSet strip_rules(const RuleSet& rs) {
  RuleSet out = rs;
  out.rules.clear();
  return out;
}

inline double power_or_nan(std::size_t n, std::size_t count_small,
                           std::size_t count_large, int k, double pi1) {
  if (count_small == count_large) return std::numeric_limits<double>::quiet_NaN();
  return power_bound(n, static_cast<double>(count_small) / static_cast<double>(n),
                     static_cast<double>(count_large) / static_cast<double>(n), k, pi1);
}

}  // namespace detail

/// Keeps exactly the rules whose relative risk on `ts` exceeds tau. The
/// +infinity sentinel always qualifies; patterns matching every transaction
/// (undefined RR) never do.
inline RuleSet threshold_risk_patterns(const RuleSet& rules, const TransactionSet& ts,
                                       double tau) {
  if (!(tau > 1.0)) throw DataError("rr threshold tau must exceed 1");
  RuleSet out = detail::strip_rules(rules);
  for (const auto& r : rules.rules) {
    auto rr = detail::relative_risk_of(r, ts.n_pos, ts.n_neg);
    if (rr && *rr > tau) out.rules.push_back(r);
  }
  return out;
}

/// Top-down redundancy pruning. Processes lengths max..2; a superset falls
/// when some immediate sub-pattern in the family leaves its matched-negative
/// count unchanged within margin k (the superset's RR cannot exceed the
/// sub-pattern's). Equal support counts short-circuit: support equality
/// forces both count equalities, so the superset is redundant outright.
/// S1/S2 are fixed from the input family per length iteration.
inline RuleSet prune_redundant(const RuleSet& rules, const TransactionSet& ts, int k,
                               std::vector<AuditEntry>* audit = nullptr) {
  if (k < 1) throw DataError("test margin k must be a positive integer");
  const auto groups = detail::group_by_length(rules);
  const double pi_neg = static_cast<double>(ts.n_neg) / static_cast<double>(ts.n);

  std::unordered_set<Itemset, ItemsetHash> discarded;
  const std::size_t max_len = groups.empty() ? 0 : groups.rbegin()->first;
  for (std::size_t l = max_len; l >= 2; --l) {
    auto s1 = groups.find(l);
    auto s2 = groups.find(l - 1);
    if (s1 == groups.end() || s2 == groups.end()) continue;
    for (const ClassRule* sup : s1->second) {
      for (const ClassRule* sub : s2->second) {
        if (!sub->antecedent.is_subset_of(sup->antecedent)) continue;
        AuditEntry entry;
        entry.discarded = *sup;
        entry.witness = *sub;
        entry.margin = k;
        if (sub->supp_count == sup->supp_count) {
          entry.test = AuditEntry::Test::equal_support;
          entry.count_small = sub->supp_count;
          entry.count_large_pattern = sup->supp_count;
          entry.diff_count = 0;
        } else {
          auto d = count_test(sub->neg_count(), sup->neg_count(), k);
          if (d.reject) continue;  // counts differ materially; not redundant
          entry.test = AuditEntry::Test::redundant;
          entry.count_small = sub->neg_count();
          entry.count_large_pattern = sup->neg_count();
          entry.diff_count = d.diff_count;
          entry.power_lower_bound = detail::power_or_nan(
              ts.n, sub->neg_count(), sup->neg_count(), k, pi_neg);
        }
        discarded.insert(sup->antecedent);
        if (audit) audit->push_back(std::move(entry));
        break;
      }
    }
  }

  RuleSet out = detail::strip_rules(rules);
  for (const auto& r : rules.rules)
    if (!discarded.count(r.antecedent)) out.rules.push_back(r);
  return out;
}

/// Bottom-up weak-rule pruning. Processes lengths 1..max-1; a pattern falls
/// when some immediate superset in the family keeps its matched-positive
/// count within margin k (the superset's RR is at least as large, at a lower
/// false-positive rate).
inline RuleSet prune_weak(const RuleSet& rules, const TransactionSet& ts, int k,
                          std::vector<AuditEntry>* audit = nullptr) {
  if (k < 1) throw DataError("test margin k must be a positive integer");
  const auto groups = detail::group_by_length(rules);
  const double pi_pos = static_cast<double>(ts.n_pos) / static_cast<double>(ts.n);

  std::unordered_set<Itemset, ItemsetHash> discarded;
  const std::size_t max_len = groups.empty() ? 0 : groups.rbegin()->first;
  for (std::size_t l = 1; l + 1 <= max_len; ++l) {
    auto s1 = groups.find(l);
    auto s2 = groups.find(l + 1);
    if (s1 == groups.end() || s2 == groups.end()) continue;
    for (const ClassRule* sub : s1->second) {
      for (const ClassRule* sup : s2->second) {
        if (!sub->antecedent.is_subset_of(sup->antecedent)) continue;
        auto d = count_test(sub->conf_count, sup->conf_count, k);
        if (d.reject) continue;
        AuditEntry entry;
        entry.discarded = *sub;
        entry.witness = *sup;
        entry.test = AuditEntry::Test::weak;
        entry.count_small = sub->conf_count;
        entry.count_large_pattern = sup->conf_count;
        entry.diff_count = d.diff_count;
        entry.margin = k;
        entry.power_lower_bound =
            detail::power_or_nan(ts.n, sub->conf_count, sup->conf_count, k, pi_pos);
        discarded.insert(sub->antecedent);
        if (audit) audit->push_back(std::move(entry));
        break;
      }
    }
  }

  RuleSet out = detail::strip_rules(rules);
  for (const auto& r : rules.rules)
    if (!discarded.count(r.antecedent)) out.rules.push_back(r);
  return out;
}

/// Stage 1 of the learning procedure: RR thresholding, then redundancy
/// pruning, then weak-rule pruning. An empty result is a warning condition
/// for callers, not an error.
inline PrunedFamily stage1(const RuleSet& rules, const TransactionSet& ts,
                           const MiningParams& params) {
  PrunedFamily family;
  family.params = params;
  family.dataset_fingerprint = rules.dataset_fingerprint;
  family.n = ts.n;
  family.n_pos = ts.n_pos;
  family.n_neg = ts.n_neg;

  RuleSet kept = threshold_risk_patterns(rules, ts, params.rr_threshold);
  kept = prune_redundant(kept, ts, params.test_margin, &family.audit);
  kept = prune_weak(kept, ts, params.test_margin, &family.audit);

  family.rules.reserve(kept.rules.size());
  for (const auto& r : kept.rules)
    family.rules.push_back({r, metrics(r, ts.n_pos, ts.n_neg)});
  return family;
}

/// Repackages a pruned family as a RuleSet (used to re-run stage1 when
/// checking idempotence, and by the serializers).
inline RuleSet to_ruleset(const PrunedFamily& family) {
  RuleSet rs;
  rs.params = family.params;
  rs.dataset_fingerprint = family.dataset_fingerprint;
  rs.n = family.n;
  rs.n_pos = family.n_pos;
  rs.n_neg = family.n_neg;
  for (const auto& s : family.rules) rs.rules.push_back(s.rule);
  return rs;
}

}  // namespace rarerules
