#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "rarerules/dataset.hpp"
#include "rarerules/schema.hpp"

namespace rarerules {

/// Class association rule: antecedent itemset plus exact counts over the
/// dataset it was mined from. Everything downstream derives from these two
/// integers.
struct ClassRule {
  Itemset antecedent;
  std::size_t supp_count = 0;  // transactions matching the antecedent
  std::size_t conf_count = 0;  // ... that also carry the positive label

  std::size_t neg_count() const { return supp_count - conf_count; }

  friend bool operator==(const ClassRule&, const ClassRule&) = default;
};

struct MiningParams {
  double min_local_support = 0.10;  // fraction of positives a rule must cover
  double min_conf_ratio = 3.0;      // confidence as a multiple of the base positive rate
  std::size_t max_length = 3;       // max antecedent size
  double rr_threshold = 2.0;        // tau; risk patterns need RR > tau
  int test_margin = 1;              // k of the pruning count test

  void validate(std::size_t attribute_count) const {
    if (!(min_local_support > 0.0 && min_local_support <= 1.0))
      throw DataError("min_local_support must lie in (0,1]");
    if (!(min_conf_ratio >= 1.0)) throw DataError("min_conf_ratio must be >= 1");
    if (max_length < 1) throw DataError("max_length must be >= 1");
    if (max_length > attribute_count)
      throw DataError("max_length exceeds attribute count");
    if (!(rr_threshold > 1.0)) throw DataError("rr_threshold must exceed 1");
    if (test_margin < 1) throw DataError("test margin k must be a positive integer");
  }
};

/// Mined rules sorted by (length, lexicographic item order), plus the
/// parameters and dataset identity they were mined under.
struct RuleSet {
  std::vector<ClassRule> rules;
  MiningParams params;
  std::string dataset_fingerprint;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  std::size_t max_rule_length() const {
    std::size_t m = 0;
    for (const auto& r : rules) m = std::max(m, r.antecedent.length());
    return m;
  }
};

inline bool rule_order(const ClassRule& a, const ClassRule& b) {
  if (a.antecedent.length() != b.antecedent.length())
    return a.antecedent.length() < b.antecedent.length();
  return a.antecedent < b.antecedent;
}

/// Candidate generation: joins frequent (k-1)-itemsets sharing their first
/// k-2 items, drops unions that would pair two levels of one attribute, and
/// prunes candidates with an infrequent (k-1)-subset.
inline std::vector<Itemset> apriori_gen(const std::vector<Itemset>& frequent_prev) {
  std::vector<Itemset> candidates;
  if (frequent_prev.empty()) return candidates;

  std::unordered_set<Itemset, ItemsetHash> prev(frequent_prev.begin(), frequent_prev.end());
  const std::size_t len = frequent_prev.front().length();

  for (std::size_t i = 0; i < frequent_prev.size(); ++i) {
    for (std::size_t j = i + 1; j < frequent_prev.size(); ++j) {
      const auto& a = frequent_prev[i];
      const auto& b = frequent_prev[j];
      bool joinable = true;
      for (std::size_t t = 0; t + 1 < len; ++t)
        if (a[t] != b[t]) {
          joinable = false;
          break;
        }
      if (!joinable) continue;
      if (a[len - 1].attribute == b[len - 1].attribute) continue;

      Itemset cand = a.union_with(b);
      bool all_subsets_frequent = true;
      for (std::size_t d = 0; d < cand.length(); ++d)
        if (!prev.count(cand.without(d))) {
          all_subsets_frequent = false;
          break;
        }
      if (all_subsets_frequent) candidates.push_back(std::move(cand));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return candidates;
}

/// One counting pass: per candidate, intersect its item columns and count
/// support and matched positives. Exact integer counts.
inline std::vector<ClassRule> count_pass(const TransactionSet& ts,
                                         const std::vector<Itemset>& candidates) {
  std::vector<ClassRule> out;
  out.reserve(candidates.size());
  BitRow acc;
  for (const auto& cand : candidates) {
    ClassRule r;
    r.antecedent = cand;
    if (cand.length() == 1) {
      const BitRow& col = ts.column(cand[0]);
      r.supp_count = col.count();
      r.conf_count = col.and_count(ts.labels);
    } else {
      acc.assign(ts.column(cand[0]));
      for (std::size_t t = 1; t < cand.length(); ++t) acc &= ts.column(cand[t]);
      r.supp_count = acc.count();
      r.conf_count = acc.and_count(ts.labels);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Transaction-major fallback used to cross-check the column counting path.
inline std::vector<ClassRule> count_pass_scan(const TransactionSet& ts,
                                              const std::vector<Itemset>& candidates) {
  std::vector<ClassRule> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) out.push_back({cand, 0, 0});
  for (std::size_t row = 0; row < ts.n; ++row) {
    const bool positive = ts.labels.test(row);
    for (auto& r : out) {
      if (!ts.matches(row, r.antecedent)) continue;
      r.supp_count += 1;
      if (positive) r.conf_count += 1;
    }
  }
  return out;
}

namespace detail {

inline bool passes_local_support(const ClassRule& r, std::size_t n_pos,
                                 const MiningParams& p) {
  return static_cast<double>(r.conf_count) / static_cast<double>(n_pos) >=
         p.min_local_support;
}

inline bool passes_confidence(const ClassRule& r, std::size_t n, std::size_t n_pos,
                              const MiningParams& p) {
  if (r.supp_count == 0) return false;
  const double confidence =
      static_cast<double>(r.conf_count) / static_cast<double>(r.supp_count);
  const double base_rate = static_cast<double>(n_pos) / static_cast<double>(n);
  return confidence >= p.min_conf_ratio * base_rate;
}

}  // namespace detail

/// Level-wise Apriori over class association rules. Levels survive on the
/// local-support condition alone (it is anti-monotone); the confidence-ratio
/// condition filters the final output but never prunes candidate growth.
/// Iteration stops when a level yields no locally-frequent rules.
inline RuleSet mine(const TransactionSet& ts, const MiningParams& params) {
  params.validate(ts.schema.attribute_count());
  if (ts.n_pos == 0) throw DataError("mine: no positive transactions to learn from");

  RuleSet out;
  out.params = params;
  out.dataset_fingerprint = fingerprint(ts);
  out.n = ts.n;
  out.n_pos = ts.n_pos;
  out.n_neg = ts.n_neg;

  std::vector<Itemset> candidates;
  for (std::uint32_t h = 0; h < ts.schema.attribute_count(); ++h)
    for (std::uint32_t j = 0; j < ts.schema.attributes[h].levels.size(); ++j)
      candidates.push_back(Itemset({{h, j}}));

  for (std::size_t level = 1; level <= params.max_length && !candidates.empty(); ++level) {
    std::vector<Itemset> frequent;
    for (auto& rule : count_pass(ts, candidates)) {
      if (!detail::passes_local_support(rule, ts.n_pos, params)) continue;
      frequent.push_back(rule.antecedent);
      if (detail::passes_confidence(rule, ts.n, ts.n_pos, params))
        out.rules.push_back(std::move(rule));
    }
    if (frequent.empty()) break;
    candidates = level < params.max_length ? apriori_gen(frequent) : std::vector<Itemset>{};
  }

  std::sort(out.rules.begin(), out.rules.end(), rule_order);
  return out;
}

}  // namespace rarerules
