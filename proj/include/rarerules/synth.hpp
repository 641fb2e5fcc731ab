#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rarerules/dataset.hpp"

namespace rarerules {

struct PlantedPattern {
  Itemset items;
  double target_rr = 0;
};

/// Recipe for an unbalanced dataset with planted risk patterns of known
/// relative risk. Labels follow a two-level mixture: records matching no
/// planted pattern are positive at the base rate; matching records use the
/// largest elevated rate among their patterns. Elevated rates are solved so
/// the asymptotic RR of each pattern hits its target.
struct PlantSpec {
  AttributeSchema schema;
  std::vector<std::vector<double>> marginals;  // per attribute; empty = uniform
  std::size_t n = 0;
  double base_positive_rate = 0.02;
  std::vector<PlantedPattern> planted;
  std::uint64_t noise_seed = 0;

  void validate() const {
    schema.validate();
    if (n < 1) throw DataError("synth: n must be positive");
    if (!(base_positive_rate > 0.0 && base_positive_rate < 0.5))
      throw DataError("synth: base positive rate must lie in (0, 0.5)");
    if (planted.size() > 16) throw DataError("synth: at most 16 planted patterns");
    for (const auto& p : planted) {
      schema.validate_itemset(p.items);
      if (p.items.empty()) throw DataError("synth: planted pattern is empty");
      if (!(p.target_rr > 1.0)) throw DataError("synth: target RR must exceed 1");
    }
    if (!marginals.empty()) {
      if (marginals.size() != schema.attribute_count())
        throw DataError("synth: marginals do not cover every attribute");
      for (std::size_t h = 0; h < marginals.size(); ++h) {
        if (marginals[h].size() != schema.attributes[h].levels.size())
          throw DataError("synth: marginal arity mismatch for attribute '" +
                          schema.attributes[h].name + "'");
        double sum = 0;
        for (double w : marginals[h]) {
          if (w < 0) throw DataError("synth: negative level weight");
          sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
          throw DataError("synth: level weights must sum to 1 for attribute '" +
                          schema.attributes[h].name + "'");
      }
    }
  }

  std::vector<std::vector<double>> effective_marginals() const {
    if (!marginals.empty()) return marginals;
    std::vector<std::vector<double>> m(schema.attribute_count());
    for (std::size_t h = 0; h < m.size(); ++h)
      m[h].assign(schema.attributes[h].levels.size(),
                  1.0 / static_cast<double>(schema.attributes[h].levels.size()));
    return m;
  }
};

struct PlantedReport {
  Itemset items;
  double target_rr = 0;
  double elevated_rate = 0;         // solved conditional positive probability
  std::size_t match_count = 0;      // realized tallies
  std::size_t match_pos_count = 0;
  double realized_rr = 0;
};

struct GroundTruth {
  std::vector<PlantedReport> planted;
  std::size_t n = 0;
  std::size_t n_pos = 0;
  std::size_t positives_covered_by_planted = 0;
  double positive_coverage = 0;  // fraction of positives matching some pattern
};

namespace synth_detail {

inline double u01(std::mt19937_64& rng) {
  // 53 random bits; identical across platforms, unlike the distribution
  // adaptors.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exact distribution over "which planted patterns match a random record",
/// walked attribute by attribute. State bit i means pattern i is still fully
/// satisfied. Cost O(attributes x levels x 2^p) with p <= 16.
inline std::vector<double> match_mask_distribution(
    const PlantSpec& spec, const std::vector<std::vector<double>>& marg) {
  const std::size_t p = spec.planted.size();
  const std::uint32_t full = p == 0 ? 0 : (std::uint32_t{1} << p) - 1;
  std::vector<double> dist(std::size_t{1} << p, 0.0);
  dist[full] = 1.0;
  std::vector<double> next(dist.size());

  for (std::uint32_t h = 0; h < spec.schema.attribute_count(); ++h) {
    bool relevant = false;
    const std::size_t q = spec.schema.attributes[h].levels.size();
    std::vector<std::uint32_t> allowed(q, full);
    for (std::size_t i = 0; i < p; ++i)
      for (const auto& it : spec.planted[i].items.items())
        if (it.attribute == h) {
          relevant = true;
          for (std::uint32_t j = 0; j < q; ++j)
            if (j != it.level) allowed[j] &= ~(std::uint32_t{1} << i);
        }
    if (!relevant) continue;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t m = 0; m < dist.size(); ++m) {
      if (dist[m] == 0.0) continue;
      for (std::uint32_t j = 0; j < q; ++j)
        next[m & allowed[j]] += dist[m] * marg[h][j];
    }
    dist.swap(next);
  }
  return dist;
}

inline double rate_of_mask(std::size_t mask, const std::vector<double>& elevated,
                           double base) {
  double r = base;
  for (std::size_t i = 0; i < elevated.size(); ++i)
    if (mask & (std::size_t{1} << i)) r = std::max(r, elevated[i]);
  return r;
}

/// Asymptotic RR of pattern i under the mixture with rates `e`.
inline double asymptotic_rr(std::size_t i, const std::vector<double>& dist,
                            const std::vector<double>& e, double base) {
  double p_match = 0, joint = 0, pi_pos = 0;
  for (std::size_t m = 0; m < dist.size(); ++m) {
    const double rate = rate_of_mask(m, e, base);
    pi_pos += dist[m] * rate;
    if (m & (std::size_t{1} << i)) {
      p_match += dist[m];
      joint += dist[m] * rate;
    }
  }
  if (p_match <= 0.0) throw DataError("synth: planted pattern has zero match probability");
  if (p_match >= 1.0) throw DataError("synth: planted pattern matches every record");
  const double matched_rate = joint / p_match;
  const double unmatched_rate = (pi_pos - joint) / (1.0 - p_match);
  return matched_rate / unmatched_rate;
}

/// Solves the elevated rates by ratio iteration on the RR identity.
inline std::vector<double> solve_elevated_rates(const PlantSpec& spec,
                                                const std::vector<double>& dist) {
  std::vector<double> e(spec.planted.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = std::min(spec.planted[i].target_rr * spec.base_positive_rate, 1.0);
  if (e.empty()) return e;

  for (int iter = 0; iter < 500; ++iter) {
    double worst = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double achieved = asymptotic_rr(i, dist, e, spec.base_positive_rate);
      const double target = spec.planted[i].target_rr;
      e[i] = std::min(e[i] * target / achieved, 1.0);
      worst = std::max(worst, std::abs(achieved - target) / target);
    }
    if (worst < 1e-12) break;
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double achieved = asymptotic_rr(i, dist, e, spec.base_positive_rate);
    if (achieved < spec.planted[i].target_rr * (1.0 - 1e-6))
      throw DataError("synth: infeasible target RR for pattern " + std::to_string(i) +
                      " (required conditional probability > 1)");
  }
  return e;
}

}  // namespace synth_detail

/// Draws the dataset and reports the realized (not target) RR of every
/// planted pattern, tallied independently of the stats module.
inline std::pair<TransactionSet, GroundTruth> generate(const PlantSpec& spec) {
  spec.validate();
  const auto marg = spec.effective_marginals();
  const auto dist = synth_detail::match_mask_distribution(spec, marg);
  const auto elevated = synth_detail::solve_elevated_rates(spec, dist);

  // Cumulative level weights per attribute for inverse-CDF draws.
  std::vector<std::vector<double>> cum(marg.size());
  for (std::size_t h = 0; h < marg.size(); ++h) {
    cum[h].resize(marg[h].size());
    double acc = 0;
    for (std::size_t j = 0; j < marg[h].size(); ++j) {
      acc += marg[h][j];
      cum[h][j] = acc;
    }
    cum[h].back() = 1.0;
  }

  TransactionSet ts;
  ts.schema = spec.schema;
  ts.n = spec.n;
  ts.item_columns.assign(spec.schema.item_count(), BitRow(spec.n));
  ts.labels = BitRow(spec.n);

  GroundTruth truth;
  truth.n = spec.n;
  truth.planted.reserve(spec.planted.size());
  for (std::size_t i = 0; i < spec.planted.size(); ++i)
    truth.planted.push_back(
        {spec.planted[i].items, spec.planted[i].target_rr, elevated[i]});

  std::mt19937_64 rng(spec.noise_seed);
  std::vector<std::uint32_t> levels(spec.schema.attribute_count());

  for (std::size_t row = 0; row < spec.n; ++row) {
    for (std::size_t h = 0; h < levels.size(); ++h) {
      const double u = synth_detail::u01(rng);
      std::uint32_t j = 0;
      while (u >= cum[h][j]) ++j;
      levels[h] = j;
      ts.item_columns[spec.schema.item_index({static_cast<std::uint32_t>(h), j})].set(row);
    }

    double rate = spec.base_positive_rate;
    bool any_match = false;
    for (std::size_t i = 0; i < spec.planted.size(); ++i) {
      bool hit = true;
      for (const auto& it : spec.planted[i].items.items())
        if (levels[it.attribute] != it.level) {
          hit = false;
          break;
        }
      if (!hit) continue;
      any_match = true;
      truth.planted[i].match_count += 1;
      rate = std::max(rate, elevated[i]);
    }

    const bool positive = synth_detail::u01(rng) < rate;
    if (positive) {
      ts.labels.set(row);
      truth.n_pos += 1;
      if (any_match) truth.positives_covered_by_planted += 1;
      for (std::size_t i = 0; i < spec.planted.size(); ++i) {
        bool hit = true;
        for (const auto& it : spec.planted[i].items.items())
          if (levels[it.attribute] != it.level) {
            hit = false;
            break;
          }
        if (hit) truth.planted[i].match_pos_count += 1;
      }
    }
  }

  ts.n_pos = ts.labels.count();
  ts.n_neg = ts.n - ts.n_pos;
  truth.positive_coverage =
      truth.n_pos ? static_cast<double>(truth.positives_covered_by_planted) /
                        static_cast<double>(truth.n_pos)
                  : 0.0;

  for (auto& rep : truth.planted) {
    // Same arithmetic shape as the stats module so integer-equal counts give
    // bit-identical RR values.
    const std::size_t unmatched_pos = truth.n_pos - rep.match_pos_count;
    if (unmatched_pos == 0) {
      rep.realized_rr = std::numeric_limits<double>::infinity();
    } else {
      const double confidence = rep.match_count == 0
                                    ? 0.0
                                    : static_cast<double>(rep.match_pos_count) /
                                          static_cast<double>(rep.match_count);
      const double unmatched_rate = static_cast<double>(unmatched_pos) /
                                    static_cast<double>(truth.n - rep.match_count);
      rep.realized_rr = confidence / unmatched_rate;
    }
  }
  return {std::move(ts), std::move(truth)};
}

}  // namespace rarerules
