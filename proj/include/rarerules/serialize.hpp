#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rarerules/classifier.hpp"
#include "rarerules/pruning.hpp"
#include "rarerules/report.hpp"
#include "rarerules/synth.hpp"

namespace rarerules {

inline constexpr const char* kToolName = "rarerules";
inline constexpr const char* kToolVersion = "0.1.0";

namespace io {

using json = nlohmann::ordered_json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

inline json load_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("invalid JSON in " + path + ": " + e.what());
  }
}

// Relative risk can be the +infinity sentinel, which JSON numbers cannot
// carry; it round-trips as the string "inf".
inline json rr_to_json(double rr) {
  if (std::isinf(rr)) return json("inf");
  return json(rr);
}

inline double rr_from_json(const json& j) {
  if (j.is_string()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

inline json schema_to_json(const AttributeSchema& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes)
    attrs.push_back({{"name", a.name}, {"levels", a.levels}});
  json out{{"attributes", attrs},
           {"class_column", schema.class_column},
           {"positive_label", schema.positive_label},
           {"negative_label", schema.negative_label}};
  if (schema.map_missing) out["map_missing"] = true;
  return out;
}

inline AttributeSchema schema_from_json(const json& j) {
  AttributeSchema schema;
  for (const auto& a : j.at("attributes"))
    schema.attributes.push_back(
        {a.at("name").get<std::string>(), a.at("levels").get<std::vector<std::string>>()});
  schema.class_column = j.at("class_column").get<std::string>();
  schema.positive_label = j.at("positive_label").get<std::string>();
  schema.negative_label = j.value("negative_label", "not_" + schema.positive_label);
  schema.map_missing = j.value("map_missing", false);
  schema.validate();
  return schema;
}

inline json itemset_to_json(const Itemset& s, const AttributeSchema& schema) {
  json arr = json::array();
  for (const auto& it : s.items())
    arr.push_back({schema.attributes[it.attribute].name,
                   schema.attributes[it.attribute].levels[it.level]});
  return arr;
}

inline Itemset itemset_from_json(const json& arr, const AttributeSchema& schema) {
  std::vector<Item> items;
  for (const auto& pair : arr) {
    const auto attr_name = pair.at(0).get<std::string>();
    const auto level_name = pair.at(1).get<std::string>();
    auto h = schema.attribute_index(attr_name);
    if (!h) throw DataError("itemset references unknown attribute '" + attr_name + "'");
    auto j = schema.level_index(*h, level_name);
    if (!j)
      throw DataError("itemset references unknown level '" + level_name +
                      "' of attribute '" + attr_name + "'");
    items.push_back({*h, *j});
  }
  return Itemset(std::move(items));
}

inline json params_to_json(const MiningParams& p) {
  return json{{"min_local_support", p.min_local_support},
              {"min_conf_ratio", p.min_conf_ratio},
              {"max_length", p.max_length},
              {"rr_threshold", p.rr_threshold},
              {"k", p.test_margin}};
}

inline MiningParams params_from_json(const json& j) {
  MiningParams p;
  p.min_local_support = j.at("min_local_support").get<double>();
  p.min_conf_ratio = j.at("min_conf_ratio").get<double>();
  p.max_length = j.at("max_length").get<std::size_t>();
  p.rr_threshold = j.value("rr_threshold", p.rr_threshold);
  p.test_margin = j.value("k", p.test_margin);
  return p;
}

inline json metrics_to_json(const RuleMetrics& m) {
  return json{{"tpr", m.tpr},           {"tnr", m.tnr},
              {"fpr", m.fpr},           {"fnr", m.fnr},
              {"local_support", m.local_support},
              {"confidence", m.confidence},
              {"relative_risk", rr_to_json(m.relative_risk)}};
}

/// JSON lines: a header object recording provenance, then one rule per line.
inline std::string ruleset_to_jsonl(const RuleSet& rs, const AttributeSchema& schema,
                                    bool with_metrics = false,
                                    RrEstimate estimate = RrEstimate::raw) {
  json header{{"format", "ruleset"},
              {"tool", kToolName},
              {"version", kToolVersion},
              {"params", params_to_json(rs.params)},
              {"dataset",
               {{"fingerprint", rs.dataset_fingerprint},
                {"n", rs.n},
                {"n_pos", rs.n_pos},
                {"n_neg", rs.n_neg}}},
              {"rule_count", rs.rules.size()}};
  std::string out = header.dump() + "\n";
  for (const auto& r : rs.rules) {
    json line{{"items", itemset_to_json(r.antecedent, schema)},
              {"supp_count", r.supp_count},
              {"conf_count", r.conf_count}};
    if (with_metrics)
      line["metrics"] = metrics_to_json(metrics(r, rs.n_pos, rs.n_neg, estimate));
    out += line.dump() + "\n";
  }
  return out;
}

inline RuleSet ruleset_from_jsonl(const std::string& text, const AttributeSchema& schema) {
  RuleSet rs;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!header_seen) {
      if (j.value("format", "") != "ruleset") throw DataError("not a ruleset file");
      rs.params = params_from_json(j.at("params"));
      rs.dataset_fingerprint = j.at("dataset").at("fingerprint").get<std::string>();
      rs.n = j.at("dataset").at("n").get<std::size_t>();
      rs.n_pos = j.at("dataset").at("n_pos").get<std::size_t>();
      rs.n_neg = j.at("dataset").at("n_neg").get<std::size_t>();
      header_seen = true;
      continue;
    }
    ClassRule r;
    r.antecedent = itemset_from_json(j.at("items"), schema);
    r.supp_count = j.at("supp_count").get<std::size_t>();
    r.conf_count = j.at("conf_count").get<std::size_t>();
    rs.rules.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("empty ruleset file");
  return rs;
}

/// Header line documenting the pass boundaries, then one discard per line.
inline std::string audit_to_jsonl(const std::vector<AuditEntry>& audit,
                                  const AttributeSchema& schema) {
  const json header{{"format", "audit"},
                    {"tool", kToolName},
                    {"version", kToolVersion},
                    {"boundaries",
                     {{"redundant", "top-down, lengths max..2 inclusive"},
                      {"weak", "bottom-up, lengths 1..max-1 inclusive"}}},
                    {"discard_count", audit.size()}};
  std::string out = header.dump() + "\n";
  for (const auto& e : audit) {
    json line{{"discarded", itemset_to_json(e.discarded.antecedent, schema)},
              {"witness", itemset_to_json(e.witness.antecedent, schema)},
              {"test", audit_test_name(e.test)},
              {"count_small", e.count_small},
              {"count_large_pattern", e.count_large_pattern},
              {"diff_count", e.diff_count},
              {"k", e.margin},
              {"power_lower_bound", std::isnan(e.power_lower_bound)
                                        ? json(nullptr)
                                        : json(e.power_lower_bound)}};
    out += line.dump() + "\n";
  }
  return out;
}

inline json classifier_to_json(const Classifier& c) {
  json patterns = json::array();
  for (const auto& p : c.patterns)
    patterns.push_back({{"items", itemset_to_json(p.items, c.schema)},
                        {"validated_rr", rr_to_json(p.validated_rr)}});
  return json{{"format", "classifier"},
              {"tool", kToolName},
              {"version", kToolVersion},
              {"schema", schema_to_json(c.schema)},
              {"params", params_to_json(c.params)},
              {"patterns", patterns},
              {"provenance",
               {{"train_fingerprint", c.train_fingerprint},
                {"validation_fingerprint", c.validation_fingerprint}}}};
}

inline Classifier classifier_from_json(const json& j) {
  if (j.value("format", "") != "classifier") throw DataError("not a classifier file");
  Classifier c;
  c.schema = schema_from_json(j.at("schema"));
  c.params = params_from_json(j.at("params"));
  for (const auto& p : j.at("patterns"))
    c.patterns.push_back(
        {itemset_from_json(p.at("items"), c.schema), rr_from_json(p.at("validated_rr"))});
  c.train_fingerprint = j.at("provenance").at("train_fingerprint").get<std::string>();
  c.validation_fingerprint =
      j.at("provenance").at("validation_fingerprint").get<std::string>();
  return c;
}

inline json ground_truth_to_json(const GroundTruth& t, const AttributeSchema& schema) {
  json planted = json::array();
  for (const auto& rep : t.planted)
    planted.push_back({{"items", itemset_to_json(rep.items, schema)},
                       {"target_rr", rep.target_rr},
                       {"elevated_rate", rep.elevated_rate},
                       {"match_count", rep.match_count},
                       {"match_pos_count", rep.match_pos_count},
                       {"realized_rr", rr_to_json(rep.realized_rr)}});
  return json{{"format", "ground_truth"},
              {"n", t.n},
              {"n_pos", t.n_pos},
              {"positives_covered_by_planted", t.positives_covered_by_planted},
              {"positive_coverage", t.positive_coverage},
              {"planted", planted}};
}

inline PlantSpec plant_spec_from_json(const json& j) {
  PlantSpec spec;
  spec.n = j.at("n").get<std::size_t>();
  spec.base_positive_rate = j.at("base_positive_rate").get<double>();
  spec.noise_seed = j.value("seed", std::uint64_t{0});
  spec.schema.class_column = j.value("class_column", "class");
  spec.schema.positive_label = j.value("positive_label", "1");
  spec.schema.negative_label = j.value("negative_label", "0");

  for (const auto& a : j.at("attributes")) {
    Attribute attr{a.at("name").get<std::string>(),
                   a.at("levels").get<std::vector<std::string>>()};
    spec.schema.attributes.push_back(std::move(attr));
  }
  spec.marginals.resize(spec.schema.attribute_count());
  std::size_t h = 0;
  for (const auto& a : j.at("attributes")) {
    if (a.contains("weights")) {
      spec.marginals[h] = a.at("weights").get<std::vector<double>>();
    } else {
      const auto q = spec.schema.attributes[h].levels.size();
      spec.marginals[h].assign(q, 1.0 / static_cast<double>(q));
    }
    ++h;
  }
  for (const auto& p : j.at("planted"))
    spec.planted.push_back(
        {itemset_from_json(p.at("items"), spec.schema), p.at("target_rr").get<double>()});
  spec.validate();
  return spec;
}

/// Parses a results table back into grid cells (used by ROC selection over
/// externally supplied points).
inline std::vector<GridPoint> points_from_table(const csv::Table& table) {
  const std::vector<std::string> expected = {
      "label", "loc_supp", "min_conf", "max_lhs", "sensitivity", "specificity",
      "classification_error"};
  if (table.header != expected) throw DataError("points csv: unexpected header");
  std::vector<GridPoint> cells;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != expected.size())
      throw DataError("points csv: row " + std::to_string(r + 1) + " has wrong arity");
    GridPoint cell;
    cell.label = row[0];
    try {
      cell.params.min_local_support = std::stod(row[1]);
      cell.params.min_conf_ratio = std::stod(row[2]);
      cell.params.max_length = static_cast<std::size_t>(std::stoul(row[3]));
      if (row[4].empty() || row[5].empty() || row[6].empty()) {
        cell.ok = false;
      } else {
        cell.point.sensitivity = std::stod(row[4]);
        cell.point.specificity = std::stod(row[5]);
        cell.point.global_error = std::stod(row[6]);
        cell.point.label = cell.label;
        cell.ok = true;
      }
    } catch (const std::exception&) {
      throw DataError("points csv: unparsable number at row " + std::to_string(r + 1));
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

inline json provenance_block(const MiningParams& params, std::uint64_t seed,
                             const std::vector<std::pair<std::string, std::string>>&
                                 fingerprints) {
  json fp = json::object();
  for (const auto& [name, value] : fingerprints) fp[name] = value;
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"params", params_to_json(params)},
              {"seed", seed},
              {"dataset_fingerprints", fp}};
}

}  // namespace io
}  // namespace rarerules
