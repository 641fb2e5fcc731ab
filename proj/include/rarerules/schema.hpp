#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace rarerules {

/// Data-contract violations (bad input files, inconsistent counts, ...).
/// The CLI maps these to exit code 2, as opposed to usage errors (exit 1).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Indicator variable: attribute `attribute` takes its `level`-th value.
struct Item {
  std::uint32_t attribute = 0;
  std::uint32_t level = 0;

  friend auto operator<=>(const Item&, const Item&) = default;
};

/// Conjunction of items over distinct attributes, kept sorted by attribute
/// index. The canonical form makes set operations and dedup cheap.
class Itemset {
 public:
  Itemset() = default;

  explicit Itemset(std::vector<Item> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    for (std::size_t i = 1; i < items_.size(); ++i)
      if (items_[i].attribute == items_[i - 1].attribute)
        throw DataError("itemset holds two levels of one attribute");
  }

  std::size_t length() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Item>& items() const { return items_; }
  const Item& operator[](std::size_t i) const { return items_[i]; }

  bool contains(const Item& it) const {
    return std::binary_search(items_.begin(), items_.end(), it);
  }

  bool is_subset_of(const Itemset& other) const {
    return std::includes(other.items_.begin(), other.items_.end(),
                         items_.begin(), items_.end());
  }

  /// Union of two itemsets; throws if the result would pair two levels of
  /// one attribute.
  Itemset union_with(const Itemset& other) const {
    std::vector<Item> merged;
    merged.reserve(items_.size() + other.items_.size());
    std::merge(items_.begin(), items_.end(), other.items_.begin(),
               other.items_.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return Itemset(std::move(merged));
  }

  /// Copy with the item at position `drop` removed.
  Itemset without(std::size_t drop) const {
    std::vector<Item> rest;
    rest.reserve(items_.size() - 1);
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (i != drop) rest.push_back(items_[i]);
    Itemset out;
    out.items_ = std::move(rest);  // already canonical
    return out;
  }

  friend auto operator<=>(const Itemset&, const Itemset&) = default;

 private:
  std::vector<Item> items_;
};

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const auto& it : s.items()) {
      h = (h ^ it.attribute) * 1099511628211ull;
      h = (h ^ it.level) * 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Attribute {
  std::string name;
  std::vector<std::string> levels;
};

/// Categorical schema plus the class-column binding used at encode time.
/// Levels keep first-appearance order so item indices are stable across runs.
struct AttributeSchema {
  std::vector<Attribute> attributes;
  std::string class_column;
  std::string positive_label;
  std::string negative_label;  // representative value written back by decode
  bool map_missing = false;    // blanks encode as the "missing" level

  std::size_t attribute_count() const { return attributes.size(); }

  std::size_t item_count() const {
    std::size_t total = 0;
    for (const auto& a : attributes) total += a.levels.size();
    return total;
  }

  /// Flat index of an item into the per-item column array.
  std::size_t item_index(const Item& it) const {
    std::size_t off = 0;
    for (std::uint32_t h = 0; h < it.attribute; ++h) off += attributes[h].levels.size();
    return off + it.level;
  }

  std::optional<std::uint32_t> attribute_index(const std::string& name) const {
    for (std::size_t h = 0; h < attributes.size(); ++h)
      if (attributes[h].name == name) return static_cast<std::uint32_t>(h);
    return std::nullopt;
  }

  std::optional<std::uint32_t> level_index(std::uint32_t attribute,
                                           const std::string& value) const {
    const auto& levels = attributes[attribute].levels;
    for (std::size_t j = 0; j < levels.size(); ++j)
      if (levels[j] == value) return static_cast<std::uint32_t>(j);
    return std::nullopt;
  }

  std::string item_name(const Item& it) const {
    return attributes[it.attribute].name + "=" + attributes[it.attribute].levels[it.level];
  }

  void validate() const {
    std::unordered_set<std::string> names;
    for (const auto& a : attributes) {
      if (a.name.empty()) throw DataError("attribute with empty name");
      if (!names.insert(a.name).second)
        throw DataError("duplicate attribute name: " + a.name);
      if (a.levels.size() < 2)
        throw DataError("degenerate attribute (fewer than 2 levels): " + a.name);
      std::unordered_set<std::string> lv(a.levels.begin(), a.levels.end());
      if (lv.size() != a.levels.size())
        throw DataError("duplicate level in attribute: " + a.name);
    }
  }

  /// Checks an itemset against this schema's bounds.
  void validate_itemset(const Itemset& s) const {
    for (const auto& it : s.items()) {
      if (it.attribute >= attributes.size())
        throw DataError("itemset references unknown attribute index");
      if (it.level >= attributes[it.attribute].levels.size())
        throw DataError("itemset references unknown level index");
    }
  }
};

}  // namespace rarerules
