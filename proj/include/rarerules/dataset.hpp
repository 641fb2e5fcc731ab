#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rarerules/bitrow.hpp"
#include "rarerules/csv.hpp"
#include "rarerules/schema.hpp"

namespace rarerules {

/// Encoded dataset: one bit row per item (column-major) plus the class
/// indicator. Immutable after construction; reads are safe concurrently.
struct TransactionSet {
  AttributeSchema schema;
  std::size_t n = 0;
  std::vector<BitRow> item_columns;
  BitRow labels;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  const BitRow& column(const Item& it) const {
    return item_columns[schema.item_index(it)];
  }

  bool matches(std::size_t row, const Itemset& pattern) const {
    for (const auto& it : pattern.items())
      if (!column(it).test(row)) return false;
    return true;
  }

  /// Indicator row of the whole pattern: AND of its item columns.
  BitRow match_row(const Itemset& pattern) const {
    BitRow acc = column(pattern[0]);
    for (std::size_t t = 1; t < pattern.length(); ++t) acc &= column(pattern[t]);
    return acc;
  }

  /// Level index taken by `row` for `attribute` (scans that attribute's
  /// columns for the set bit).
  std::uint32_t level_of(std::size_t row, std::uint32_t attribute) const {
    const auto q = schema.attributes[attribute].levels.size();
    for (std::uint32_t j = 0; j < q; ++j)
      if (column({attribute, j}).test(row)) return j;
    throw std::logic_error("one-of-q invariant violated");
  }
};

struct SplitSpec {
  double train_fraction = 0.5;
  double validation_fraction = 0.25;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const {
    for (double f : {train_fraction, validation_fraction, test_fraction})
      if (!(f > 0.0 && f < 1.0)) throw DataError("split fractions must lie in (0,1)");
    if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9)
      throw DataError("split fractions must sum to 1");
  }
};

struct IngestOptions {
  bool map_missing = false;  // blank fields become an explicit "missing" level
};

inline constexpr const char* kMissingLevel = "missing";

namespace detail {

inline std::string field_or_missing(const std::string& value, const IngestOptions& opt,
                                    std::size_t row_1based, const std::string& column) {
  if (!value.empty()) return value;
  if (opt.map_missing) return kMissingLevel;
  throw DataError("missing value at row " + std::to_string(row_1based) + ", column '" +
                  column + "'");
}

/// Uniform draw from [0, n) by rejection; avoids the library-defined
/// behaviour of std::uniform_int_distribution so seeded runs reproduce
/// across standard libraries.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[bounded_draw(rng, i)]);
}

/// Splits `total` into three integer counts proportional to the fractions,
/// assigning remainders to the largest fractional parts (ties to the earlier
/// partition). Counts are within 1 of exact proportionality.
inline std::array<std::size_t, 3> apportion(std::size_t total, const SplitSpec& spec) {
  const std::array<double, 3> f{spec.train_fraction, spec.validation_fraction,
                                spec.test_fraction};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double ideal = f[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(ideal);
    frac[i] = ideal - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return frac[a] != frac[b] ? frac[a] > frac[b] : a < b; });
  for (std::size_t r = 0; assigned < total; ++assigned, ++r) counts[order[r % 3]] += 1;
  return counts;
}

}  // namespace detail

/// Builds a schema over all non-class columns, levels in first-appearance
/// order. The class column is excluded from the attributes.
inline AttributeSchema infer_schema(const csv::Table& table, const std::string& class_column,
                                    const std::string& positive_label,
                                    const IngestOptions& opt = {}) {
  if (table.header.empty()) throw DataError("empty file: no header row");
  std::size_t class_idx = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == class_column) class_idx = c;
  if (class_idx == table.header.size())
    throw DataError("missing class column '" + class_column + "'");

  AttributeSchema schema;
  schema.class_column = class_column;
  schema.positive_label = positive_label;
  schema.map_missing = opt.map_missing;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != class_idx) schema.attributes.push_back({table.header[c], {}});

  std::string negative_label;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(table.header.size()));
    std::size_t a = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == class_idx) {
        if (row[c] != positive_label && negative_label.empty()) negative_label = row[c];
        continue;
      }
      auto& attr = schema.attributes[a++];
      const std::string value = detail::field_or_missing(row[c], opt, r + 1, attr.name);
      if (std::find(attr.levels.begin(), attr.levels.end(), value) == attr.levels.end())
        attr.levels.push_back(value);
    }
  }
  if (table.rows.empty()) throw DataError("empty file: no data rows");
  for (const auto& attr : schema.attributes)
    if (attr.levels.size() < 2) throw DataError("degenerate attribute: '" + attr.name +
                                                "' has fewer than 2 distinct values");
  schema.negative_label = negative_label.empty() ? "not_" + positive_label : negative_label;
  schema.validate();
  return schema;
}

inline AttributeSchema infer_schema_file(const std::string& path, const std::string& class_column,
                                         const std::string& positive_label,
                                         const IngestOptions& opt = {}) {
  return infer_schema(csv::parse_file(path), class_column, positive_label, opt);
}

/// Encodes categorical rows into bit columns. Every value must already be a
/// level of the schema; unknown values are reported with row and column.
inline TransactionSet encode(const csv::Table& table, const AttributeSchema& schema,
                             IngestOptions opt = {}) {
  schema.validate();
  opt.map_missing = opt.map_missing || schema.map_missing;
  std::size_t class_idx = table.header.size();
  std::vector<std::size_t> attr_of_column(table.header.size(), SIZE_MAX);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == schema.class_column) {
      class_idx = c;
      continue;
    }
    auto h = schema.attribute_index(table.header[c]);
    if (!h) throw DataError("column '" + table.header[c] + "' not in schema");
    attr_of_column[c] = *h;
  }
  if (class_idx == table.header.size())
    throw DataError("missing class column '" + schema.class_column + "'");

  TransactionSet ts;
  ts.schema = schema;
  ts.n = table.rows.size();
  ts.item_columns.assign(schema.item_count(), BitRow(ts.n));
  ts.labels = BitRow(ts.n);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(table.header.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == class_idx) {
        if (row[c] == schema.positive_label) ts.labels.set(r);
        continue;
      }
      const auto h = static_cast<std::uint32_t>(attr_of_column[c]);
      const std::string value =
          detail::field_or_missing(row[c], opt, r + 1, schema.attributes[h].name);
      auto j = schema.level_index(h, value);
      if (!j)
        throw DataError("unknown level '" + value + "' at row " + std::to_string(r + 1) +
                        ", column '" + schema.attributes[h].name + "'");
      ts.item_columns[schema.item_index({h, *j})].set(r);
    }
  }
  ts.n_pos = ts.labels.count();
  ts.n_neg = ts.n - ts.n_pos;
  return ts;
}

inline TransactionSet encode_file(const std::string& path, const AttributeSchema& schema,
                                  const IngestOptions& opt = {}) {
  return encode(csv::parse_file(path), schema, opt);
}

/// Inverse of encode: reproduces the categorical rows (class values map to
/// the schema's positive/negative labels).
inline csv::Table decode(const TransactionSet& ts) {
  csv::Table out;
  for (const auto& a : ts.schema.attributes) out.header.push_back(a.name);
  out.header.push_back(ts.schema.class_column);
  out.rows.reserve(ts.n);
  for (std::size_t r = 0; r < ts.n; ++r) {
    std::vector<std::string> row;
    row.reserve(out.header.size());
    for (std::uint32_t h = 0; h < ts.schema.attribute_count(); ++h)
      row.push_back(ts.schema.attributes[h].levels[ts.level_of(r, h)]);
    row.push_back(ts.labels.test(r) ? ts.schema.positive_label : ts.schema.negative_label);
    out.rows.push_back(std::move(row));
  }
  return out;
}

/// Copies the selected rows into a fresh TransactionSet.
inline TransactionSet take_rows(const TransactionSet& ts, const std::vector<std::size_t>& rows) {
  TransactionSet part;
  part.schema = ts.schema;
  part.n = rows.size();
  part.item_columns.assign(ts.item_columns.size(), BitRow(part.n));
  part.labels = BitRow(part.n);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t c = 0; c < ts.item_columns.size(); ++c)
      if (ts.item_columns[c].test(rows[j])) part.item_columns[c].set(j);
    if (ts.labels.test(rows[j])) part.labels.set(j);
  }
  part.n_pos = part.labels.count();
  part.n_neg = part.n - part.n_pos;
  return part;
}

/// Deterministic train/validation/test partition. Stratified mode shuffles
/// positives and negatives separately so each part's positive rate stays
/// within 1/part_size of the global rate.
inline std::array<TransactionSet, 3> split(const TransactionSet& ts, const SplitSpec& spec) {
  spec.validate();
  if (ts.n < 3) throw DataError("split needs at least 3 transactions");
  if (spec.stratified && ts.n_pos < 3)
    throw DataError("too few positives for stratification (need 3, have " +
                    std::to_string(ts.n_pos) + ")");

  std::mt19937_64 rng(spec.seed);
  std::array<std::vector<std::size_t>, 3> parts;

  auto deal = [&](std::vector<std::size_t>& pool) {
    detail::shuffle_indices(pool, rng);
    const auto counts = detail::apportion(pool.size(), spec);
    std::size_t at = 0;
    for (int p = 0; p < 3; ++p)
      for (std::size_t i = 0; i < counts[p]; ++i) parts[p].push_back(pool[at++]);
  };

  if (spec.stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < ts.n; ++r) (ts.labels.test(r) ? pos : neg).push_back(r);
    deal(pos);
    deal(neg);
  } else {
    std::vector<std::size_t> all(ts.n);
    std::iota(all.begin(), all.end(), 0);
    deal(all);
  }

  std::array<TransactionSet, 3> out;
  for (int p = 0; p < 3; ++p) {
    std::sort(parts[p].begin(), parts[p].end());  // keep dataset order within parts
    out[p] = take_rows(ts, parts[p]);
  }
  return out;
}

/// FNV-1a over the encoded content; identifies a dataset in provenance blocks.
inline std::string fingerprint(const TransactionSet& ts) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  auto mix_str = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    mix(s.size());
  };
  mix(ts.n);
  for (const auto& a : ts.schema.attributes) {
    mix_str(a.name);
    for (const auto& l : a.levels) mix_str(l);
  }
  for (const auto& col : ts.item_columns)
    for (auto w : col.words()) mix(w);
  for (auto w : ts.labels.words()) mix(w);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rarerules
