#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "rarerules/classifier.hpp"

namespace rarerules {

namespace report_detail {

inline std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", std::round(v * 1000.0) / 1000.0);
  return buf;
}

inline std::string format2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace report_detail

/// Renders the classifier as a rooted tree in Graphviz DOT. Patterns sharing
/// item prefixes under the global item order (descending frequency among the
/// classifier's patterns, ties lexicographic) share internal nodes; each
/// pattern's terminal node carries its validated relative risk.
inline std::string export_tree(const Classifier& c) {
  if (c.patterns.empty()) throw DataError("export_tree: empty classifier");

  std::map<Item, std::size_t> freq;
  for (const auto& p : c.patterns)
    for (const auto& it : p.items.items()) freq[it] += 1;
  auto rank_less = [&](const Item& a, const Item& b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return a < b;
  };

  struct Node {
    Item item;
    std::string rr_label;  // non-empty for pattern terminals
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes(1);  // 0 = root

  for (const auto& p : c.patterns) {
    std::vector<Item> path(p.items.items());
    std::sort(path.begin(), path.end(), rank_less);
    std::size_t at = 0;
    for (const auto& it : path) {
      std::size_t next = nodes.size();
      for (std::size_t ch : nodes[at].children)
        if (nodes[ch].item == it) {
          next = ch;
          break;
        }
      if (next == nodes.size()) {
        nodes.push_back({it, "", {}});
        nodes[at].children.push_back(next);
      }
      at = next;
    }
    nodes[at].rr_label = "RR=" + report_detail::format2(p.validated_rr);
  }

  std::string dot = "digraph risk_patterns {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string label = report_detail::escape_dot(
        i == 0 ? "Total Population" : c.schema.item_name(nodes[i].item));
    if (!nodes[i].rr_label.empty()) label += "\\n" + nodes[i].rr_label;
    dot += "  n" + std::to_string(i) + " [label=\"" + label + "\"];\n";
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t ch : nodes[i].children)
      dot += "  n" + std::to_string(i) + " -> n" + std::to_string(ch) + ";\n";
  dot += "}\n";
  return dot;
}

inline constexpr const char* kTableHeader =
    "label,loc_supp,min_conf,max_lhs,sensitivity,specificity,classification_error";

/// Results table, one row per grid cell. Failed cells keep their label and
/// parameters with blank performance columns.
inline std::string export_table(const std::vector<GridPoint>& cells) {
  std::string out = std::string(kTableHeader) + "\n";
  for (const auto& cell : cells) {
    out += cell.label + ",";
    out += report_detail::format3(cell.params.min_local_support) + ",";
    out += report_detail::format_number(cell.params.min_conf_ratio) + ",";
    out += std::to_string(cell.params.max_length) + ",";
    if (cell.ok) {
      out += report_detail::format3(cell.point.sensitivity) + ",";
      out += report_detail::format3(cell.point.specificity) + ",";
      out += report_detail::format3(cell.point.global_error);
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace rarerules
