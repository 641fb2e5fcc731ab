#pragma once

// Test-only fixtures and independent oracles. The oracles work on the raw
// categorical matrix and never touch the bit-column counting path they are
// used to check.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rarerules/rarerules.hpp"

namespace testsupport {

using namespace rarerules;

/// Plain categorical matrix: one level index per attribute per row.
struct RawData {
  std::vector<std::string> attr_names;
  std::vector<std::vector<std::string>> level_names;  // per attribute
  std::vector<std::vector<std::uint32_t>> rows;       // rows[r][h] = level index
  std::vector<char> labels;                           // 1 = positive

  std::size_t n() const { return rows.size(); }

  std::size_t n_pos() const {
    std::size_t c = 0;
    for (char l : labels) c += l ? 1 : 0;
    return c;
  }
};

inline RawData make_raw(std::size_t attributes, const std::vector<std::size_t>& levels) {
  RawData d;
  for (std::size_t h = 0; h < attributes; ++h) {
    d.attr_names.push_back("a" + std::to_string(h));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < levels[h]; ++j)
      names.push_back("v" + std::to_string(j));
    d.level_names.push_back(std::move(names));
  }
  return d;
}

inline AttributeSchema schema_of(const RawData& d) {
  AttributeSchema schema;
  for (std::size_t h = 0; h < d.attr_names.size(); ++h)
    schema.attributes.push_back({d.attr_names[h], d.level_names[h]});
  schema.class_column = "class";
  schema.positive_label = "1";
  schema.negative_label = "0";
  return schema;
}

inline csv::Table to_table(const RawData& d) {
  csv::Table t;
  t.header = d.attr_names;
  t.header.push_back("class");
  for (std::size_t r = 0; r < d.rows.size(); ++r) {
    std::vector<std::string> row;
    for (std::size_t h = 0; h < d.attr_names.size(); ++h)
      row.push_back(d.level_names[h][d.rows[r][h]]);
    row.push_back(d.labels[r] ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline TransactionSet to_ts(const RawData& d) { return encode(to_table(d), schema_of(d)); }

/// Row-scan counting oracle over the raw matrix.
inline ClassRule scan_count(const RawData& d, const Itemset& pattern) {
  ClassRule r;
  r.antecedent = pattern;
  for (std::size_t row = 0; row < d.rows.size(); ++row) {
    bool hit = true;
    for (const auto& it : pattern.items())
      if (d.rows[row][it.attribute] != it.level) {
        hit = false;
        break;
      }
    if (!hit) continue;
    r.supp_count += 1;
    if (d.labels[row]) r.conf_count += 1;
  }
  return r;
}

/// Exhaustive enumeration of every canonical itemset up to max_length.
inline void enumerate_itemsets(const RawData& d, std::size_t max_length,
                               std::vector<Itemset>& out) {
  std::vector<Item> current;
  auto recurse = [&](auto&& self, std::size_t attr) -> void {
    if (!current.empty()) out.push_back(Itemset(current));
    if (current.size() == max_length || attr == d.attr_names.size()) return;
    for (std::size_t h = attr; h < d.attr_names.size(); ++h)
      for (std::uint32_t j = 0; j < d.level_names[h].size(); ++j) {
        current.push_back({static_cast<std::uint32_t>(h), j});
        self(self, h + 1);
        current.pop_back();
      }
  };
  recurse(recurse, 0);
}

/// Brute-force mining oracle: enumerate, scan-count, filter with the spec's
/// threshold formulas, sort by (length, lexicographic items).
inline std::vector<ClassRule> oracle_mine(const RawData& d, const MiningParams& p) {
  std::vector<Itemset> all;
  enumerate_itemsets(d, p.max_length, all);
  const std::size_t n = d.n();
  const std::size_t n_pos = d.n_pos();
  std::vector<ClassRule> out;
  for (const auto& s : all) {
    ClassRule r = scan_count(d, s);
    const bool local_ok = static_cast<double>(r.conf_count) / static_cast<double>(n_pos) >=
                          p.min_local_support;
    if (!local_ok) continue;
    if (r.supp_count == 0) continue;
    const double confidence =
        static_cast<double>(r.conf_count) / static_cast<double>(r.supp_count);
    const double base_rate = static_cast<double>(n_pos) / static_cast<double>(n);
    if (confidence >= p.min_conf_ratio * base_rate) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), rule_order);
  return out;
}

/// Random raw dataset with at least one positive row.
inline RawData random_raw(std::mt19937_64& rng, std::size_t max_attrs = 6,
                          std::size_t max_levels = 3, std::size_t max_rows = 500) {
  std::uniform_int_distribution<std::size_t> attrs_d(2, max_attrs);
  std::uniform_int_distribution<std::size_t> levels_d(2, max_levels);
  std::uniform_int_distribution<std::size_t> rows_d(10, max_rows);
  std::uniform_real_distribution<double> rate_d(0.05, 0.5);

  const std::size_t m = attrs_d(rng);
  std::vector<std::size_t> q;
  for (std::size_t h = 0; h < m; ++h) q.push_back(levels_d(rng));
  RawData d = make_raw(m, q);

  const std::size_t n = rows_d(rng);
  const double pos_rate = rate_d(rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::uint32_t> row;
    for (std::size_t h = 0; h < m; ++h)
      row.push_back(static_cast<std::uint32_t>(
          std::uniform_int_distribution<std::size_t>(0, q[h] - 1)(rng)));
    d.rows.push_back(std::move(row));
    d.labels.push_back(u01(rng) < pos_rate ? 1 : 0);
  }
  if (d.n_pos() == 0) d.labels[0] = 1;
  return d;
}

struct Table2Row {
  double loc_supp;
  double min_conf;
  std::size_t max_lhs;
  double sensitivity;
  double specificity;
  double error;
};

/// The eighteen published grid results (sensitivity/specificity/error per
/// parameter combination), row order as printed.
inline const std::array<Table2Row, 18>& table2() {
  static const std::array<Table2Row, 18> rows = {{
      {0.09, 3, 3, 0.925, 0.684, 0.317},
      {0.09, 3, 4, 0.925, 0.686, 0.309},
      {0.09, 4, 3, 0.824, 0.816, 0.247},
      {0.09, 4, 4, 0.884, 0.760, 0.247},
      {0.09, 5, 3, 0.739, 0.867, 0.136},
      {0.09, 5, 4, 0.739, 0.870, 0.135},
      {0.10, 3, 3, 0.925, 0.684, 0.317},
      {0.10, 3, 4, 0.925, 0.686, 0.309},
      {0.10, 4, 3, 0.824, 0.816, 0.186},
      {0.10, 4, 4, 0.884, 0.760, 0.248},
      {0.10, 5, 3, 0.739, 0.867, 0.136},
      {0.10, 5, 4, 0.739, 0.870, 0.136},
      {0.15, 3, 3, 0.935, 0.679, 0.314},
      {0.15, 3, 4, 0.930, 0.685, 0.314},
      {0.15, 4, 3, 0.829, 0.815, 0.189},
      {0.15, 4, 4, 0.879, 0.763, 0.251},
      {0.15, 5, 3, 0.734, 0.867, 0.137},
      {0.15, 5, 4, 0.734, 0.875, 0.137},
  }};
  return rows;
}

inline std::vector<PerformancePoint> table2_points() {
  std::vector<PerformancePoint> pts;
  int num = 1;
  for (const auto& row : table2()) {
    PerformancePoint p;
    p.sensitivity = row.sensitivity;
    p.specificity = row.specificity;
    p.global_error = row.error;
    p.label = std::to_string(num++);
    pts.push_back(std::move(p));
  }
  return pts;
}

/// The plant spec used by the end-to-end recovery checks: 6 three-level
/// attributes, planted pairs on disjoint attributes with match probabilities
/// {0.02, 0.011, 0.007} and target RRs {8, 15, 30} over a 2% base rate.
inline PlantSpec recovery_spec(std::size_t n = 50000, std::uint64_t seed = 20240817) {
  PlantSpec spec;
  spec.schema.class_column = "outcome";
  spec.schema.positive_label = "1";
  spec.schema.negative_label = "0";
  const std::array<double, 3> match_prob = {0.02, 0.011, 0.007};
  for (std::size_t h = 0; h < 6; ++h) {
    spec.schema.attributes.push_back(
        {"f" + std::to_string(h), {"p", "q", "r"}});
    const double m = std::sqrt(match_prob[h / 2]);
    spec.marginals.push_back({m, (1.0 - m) / 2.0, (1.0 - m) / 2.0});
  }
  spec.n = n;
  spec.base_positive_rate = 0.02;
  spec.noise_seed = seed;
  spec.planted = {
      {Itemset({{0, 0}, {1, 0}}), 8.0},
      {Itemset({{2, 0}, {3, 0}}), 15.0},
      {Itemset({{4, 0}, {5, 0}}), 30.0},
  };
  return spec;
}

}  // namespace testsupport
