#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rarerules/pruning.hpp"

namespace rarerules {

/// Disjunctive classifier: predicts positive iff the record fits at least
/// one risk pattern. Patterns keep Stage-2 insertion order; each carries the
/// relative risk re-estimated on validation data.
struct Classifier {
  struct Pattern {
    Itemset items;
    double validated_rr = 0;
  };

  std::vector<Pattern> patterns;
  MiningParams params;
  AttributeSchema schema;
  std::string train_fingerprint;
  std::string validation_fingerprint;
};

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
};

struct PerformancePoint {
  double sensitivity = 0;
  double specificity = 0;
  double global_error = 0;
  std::string label;
};

/// How Stage 2 reads "was not already retained": the coverage policy skips
/// records a retained pattern already matches (minimal classifiers); the
/// always-add policy adds the best not-yet-retained matching pattern for
/// every positive record.
enum class Stage2Policy { coverage, always_add };

/// Stage 2: representative-pattern selection on validation data.
///
/// Scans positive validation records in dataset order; the matching pattern
/// with maximal validated RR joins the classifier (ties broken by shorter
/// antecedent, then lexicographic item order).
inline Classifier select_representatives(const PrunedFamily& family,
                                         const TransactionSet& validation,
                                         Stage2Policy policy = Stage2Policy::coverage) {
  Classifier c;
  c.params = family.params;
  c.schema = validation.schema;
  c.train_fingerprint = family.dataset_fingerprint;
  c.validation_fingerprint = fingerprint(validation);
  if (family.rules.empty()) return c;
  if (validation.n_pos == 0) throw DataError("validation data has no positive records");

  struct Candidate {
    const Itemset* items;
    BitRow matches;
    double rr;
    bool retained = false;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(family.rules.size());
  for (const auto& scored : family.rules) {
    Candidate cand{&scored.rule.antecedent, validation.match_row(scored.rule.antecedent),
                   0.0};
    ClassRule on_val{scored.rule.antecedent, cand.matches.count(),
                     cand.matches.and_count(validation.labels)};
    // A pattern matching every validation row has no unmatched contrast
    // group; it scores 0 so anything informative outranks it.
    auto rr = detail::relative_risk_of(on_val, validation.n_pos, validation.n_neg);
    cand.rr = rr.value_or(0.0);
    candidates.push_back(std::move(cand));
  }

  for (std::size_t row = 0; row < validation.n; ++row) {
    if (!validation.labels.test(row)) continue;
    Candidate* best = nullptr;
    bool covered = false;
    for (auto& cand : candidates) {
      if (!cand.matches.test(row)) continue;
      if (cand.retained) {
        if (policy == Stage2Policy::coverage) {
          covered = true;
          break;
        }
        continue;  // always_add: retained patterns just drop out of the max
      }
      if (!best) {
        best = &cand;
        continue;
      }
      const bool better =
          cand.rr > best->rr ||
          (cand.rr == best->rr &&
           (cand.items->length() < best->items->length() ||
            (cand.items->length() == best->items->length() && *cand.items < *best->items)));
      if (better) best = &cand;
    }
    if (covered || !best) continue;
    best->retained = true;
    c.patterns.push_back({*best->items, best->rr});
  }
  return c;
}

/// True iff some pattern's items are all set in the record (one level index
/// per attribute, schema order).
inline bool predict(const Classifier& c, const std::vector<std::uint32_t>& record) {
  if (record.size() != c.schema.attribute_count())
    throw DataError("predict: record arity does not match classifier schema");
  for (std::size_t h = 0; h < record.size(); ++h)
    if (record[h] >= c.schema.attributes[h].levels.size())
      throw DataError("predict: level index out of range for attribute '" +
                      c.schema.attributes[h].name + "'");
  for (const auto& p : c.patterns) {
    bool hit = true;
    for (const auto& it : p.items.items())
      if (record[it.attribute] != it.level) {
        hit = false;
        break;
      }
    if (hit) return true;
  }
  return false;
}

inline bool predict(const Classifier& c, const TransactionSet& ts, std::size_t row) {
  if (ts.schema.attributes.size() != c.schema.attributes.size())
    throw DataError("predict: dataset schema does not match classifier schema");
  for (const auto& p : c.patterns)
    if (ts.matches(row, p.items)) return true;
  return false;
}

/// Stage 3: exact confusion counts of the disjunction over a test set.
inline std::pair<ConfusionMatrix, PerformancePoint> evaluate(const Classifier& c,
                                                             const TransactionSet& test) {
  if (test.n == 0) throw DataError("evaluate: empty test set");
  BitRow predicted(test.n);
  for (const auto& p : c.patterns) predicted |= test.match_row(p.items);

  ConfusionMatrix cm;
  cm.tp = predicted.and_count(test.labels);
  cm.fp = predicted.count() - cm.tp;
  cm.fn = test.n_pos - cm.tp;
  cm.tn = test.n_neg - cm.fp;

  PerformancePoint pt;
  pt.sensitivity = test.n_pos ? static_cast<double>(cm.tp) / static_cast<double>(test.n_pos)
                              : 0.0;
  pt.specificity = test.n_neg ? static_cast<double>(cm.tn) / static_cast<double>(test.n_neg)
                              : 0.0;
  pt.global_error = static_cast<double>(cm.fp + cm.fn) / static_cast<double>(test.n);
  return {cm, pt};
}

/// End-to-end Stage 1 + Stage 2 for one parameter combination.
struct TrainResult {
  RuleSet mined;
  PrunedFamily family;
  Classifier classifier;
};

inline TrainResult train_classifier(const TransactionSet& train,
                                    const TransactionSet& validation,
                                    const MiningParams& params,
                                    Stage2Policy policy = Stage2Policy::coverage) {
  TrainResult r;
  r.mined = mine(train, params);
  r.family = stage1(r.mined, train, params);
  r.classifier = select_representatives(r.family, validation, policy);
  return r;
}

/// One grid-search cell. Pipeline failures are captured per cell so a sweep
/// never dies on an individual combination.
struct GridPoint {
  std::string label;
  MiningParams params;
  PerformancePoint point;
  Classifier classifier;
  bool ok = false;
  std::string error;
};

inline unsigned worker_count(std::size_t jobs) {
  unsigned workers = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("RARE_RULES_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) workers = static_cast<unsigned>(v);
  }
  if (workers < 1) workers = 1;
  if (workers > jobs) workers = static_cast<unsigned>(jobs);
  return workers;
}

/// Runs the full Stage 1->2->3 pipeline per parameter combination, in grid
/// order. Cells run concurrently; datasets are shared immutably.
inline std::vector<GridPoint> grid_search(const TransactionSet& train,
                                          const TransactionSet& validation,
                                          const TransactionSet& test,
                                          const std::vector<MiningParams>& grid) {
  if (grid.empty()) throw DataError("grid_search: empty parameter grid");
  std::vector<GridPoint> out(grid.size());

  auto run_cell = [&](std::size_t i) {
    GridPoint& cell = out[i];
    cell.label = std::to_string(i + 1);
    cell.params = grid[i];
    try {
      TrainResult r = train_classifier(train, validation, grid[i]);
      cell.classifier = std::move(r.classifier);
      cell.point = evaluate(cell.classifier, test).second;
      cell.point.label = cell.label;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const unsigned workers = worker_count(grid.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_cell(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
        run_cell(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

/// Scoring rule applied among nondominated ROC points: the balanced
/// min(sensitivity, specificity) default, the Youden index, or (negative)
/// squared distance to the perfect corner (1,1).
enum class RocPolicy { min_rate, youden, distance };

/// ROC-point selection: restrict to Pareto-nondominated points (Northwest
/// rule), then maximize the policy's score, tie-break by lower global error,
/// then by lower index.
inline std::pair<std::size_t, PerformancePoint> roc_select(
    const std::vector<PerformancePoint>& points, RocPolicy policy = RocPolicy::min_rate) {
  if (points.empty()) throw DataError("roc_select: no points given");

  auto dominated = [&](std::size_t i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      if (points[j].sensitivity >= points[i].sensitivity &&
          points[j].specificity >= points[i].specificity &&
          (points[j].sensitivity > points[i].sensitivity ||
           points[j].specificity > points[i].specificity))
        return true;
    }
    return false;
  };

  auto score = [&](const PerformancePoint& p) {
    switch (policy) {
      case RocPolicy::youden:
        return p.sensitivity + p.specificity - 1.0;
      case RocPolicy::distance:
        return -((1.0 - p.sensitivity) * (1.0 - p.sensitivity) +
                 (1.0 - p.specificity) * (1.0 - p.specificity));
      case RocPolicy::min_rate:
        break;
    }
    return std::min(p.sensitivity, p.specificity);
  };

  std::size_t best = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (dominated(i)) continue;
    if (best == points.size()) {
      best = i;
      continue;
    }
    const double key_i = score(points[i]);
    const double key_b = score(points[best]);
    if (key_i > key_b ||
        (key_i == key_b && points[i].global_error < points[best].global_error))
      best = i;
  }
  return {best, points[best]};
}

}  // namespace rarerules
