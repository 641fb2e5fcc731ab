#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rarerules/serialize.hpp"

namespace rarerules::cli {

namespace fs = std::filesystem;

namespace detail {

struct MiningFlags {
  MiningParams params;
  CLI::Option* ls = nullptr;
  CLI::Option* cr = nullptr;
  CLI::Option* ml = nullptr;
  CLI::Option* rr = nullptr;
  CLI::Option* k = nullptr;
};

inline MiningFlags add_mining_flags(CLI::App* cmd) {
  MiningFlags f;
  f.ls = cmd->add_option("--min-local-support", f.params.min_local_support,
                         "minimum fraction of positives a rule must cover");
  f.cr = cmd->add_option("--min-conf-ratio", f.params.min_conf_ratio,
                         "minimum confidence as a multiple of the base positive rate");
  f.ml = cmd->add_option("--max-length", f.params.max_length, "maximum antecedent length");
  f.rr = cmd->add_option("--rr-threshold", f.params.rr_threshold,
                         "relative-risk threshold tau");
  f.k = cmd->add_option("--k", f.params.test_margin, "count-test margin k");
  return f;
}

/// Fills flag values not given on the command line from the JSON config.
inline void apply_config(MiningFlags& f, const io::json& cfg) {
  if (cfg.is_null()) return;
  if (!f.ls->count() && cfg.contains("min_local_support"))
    f.params.min_local_support = cfg.at("min_local_support").get<double>();
  if (!f.cr->count() && cfg.contains("min_conf_ratio"))
    f.params.min_conf_ratio = cfg.at("min_conf_ratio").get<double>();
  if (!f.ml->count() && cfg.contains("max_length"))
    f.params.max_length = cfg.at("max_length").get<std::size_t>();
  if (!f.rr->count() && cfg.contains("rr_threshold"))
    f.params.rr_threshold = cfg.at("rr_threshold").get<double>();
  if (!f.k->count() && cfg.contains("k")) f.params.test_margin = cfg.at("k").get<int>();
}

inline SplitSpec make_split(const std::vector<double>& fractions, std::uint64_t seed,
                            bool stratified) {
  if (fractions.size() != 3)
    throw CLI::ValidationError("--split", "expected three comma-separated fractions");
  SplitSpec spec;
  spec.train_fraction = fractions[0];
  spec.validation_fraction = fractions[1];
  spec.test_fraction = fractions[2];
  spec.seed = seed;
  spec.stratified = stratified;
  return spec;
}

inline TransactionSet load_dataset(const std::string& data_path,
                                   const std::string& schema_path) {
  const AttributeSchema schema = io::schema_from_json(io::load_json(schema_path));
  TransactionSet ts = encode_file(data_path, schema);
  if (ts.n == 0) throw DataError("empty dataset: " + data_path);
  return ts;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory: " + dir);
}

inline std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

inline Stage2Policy parse_stage2_policy(const std::string& name) {
  if (name == "coverage") return Stage2Policy::coverage;
  if (name == "always-add") return Stage2Policy::always_add;
  throw CLI::ValidationError("--stage2-policy", "expected coverage or always-add");
}

inline RocPolicy parse_roc_policy(const std::string& name) {
  if (name == "min-rate") return RocPolicy::min_rate;
  if (name == "youden") return RocPolicy::youden;
  if (name == "distance") return RocPolicy::distance;
  throw CLI::ValidationError("--roc-policy", "expected min-rate, youden or distance");
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 usage error, 2 data error.
inline int run(int argc, const char* const* argv) {
  using io::json;

  CLI::App app{"class association rules for rare-class categorical data"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config mirroring the flags")
      ->envname("RARE_RULES_CONFIG");

  // schema ------------------------------------------------------------
  auto* schema_cmd = app.add_subcommand("schema", "infer a schema from a CSV file");
  std::string sc_data, sc_class, sc_positive, sc_out;
  bool sc_missing = false;
  schema_cmd->add_option("--data", sc_data, "input CSV")->required();
  schema_cmd->add_option("--class-column", sc_class, "name of the class column")->required();
  schema_cmd->add_option("--positive-label", sc_positive, "value marking the target class")
      ->required();
  schema_cmd->add_option("--out", sc_out, "schema JSON path")->required();
  schema_cmd->add_flag("--map-missing", sc_missing,
                       "map blank fields to an explicit 'missing' level");

  // split ---------------------------------------------------------------
  auto* split_cmd = app.add_subcommand("split", "partition a dataset into train/validation/test");
  std::string sp_data, sp_schema, sp_out;
  std::vector<double> sp_fractions{0.5, 0.25, 0.25};
  std::uint64_t sp_seed = 0;
  bool sp_no_stratify = false;
  split_cmd->add_option("--data", sp_data, "input CSV")->required();
  split_cmd->add_option("--schema", sp_schema, "schema JSON")->required();
  split_cmd->add_option("--split", sp_fractions, "train,validation,test fractions")
      ->delimiter(',');
  split_cmd->add_option("--seed", sp_seed, "shuffle seed");
  split_cmd->add_flag("--no-stratify", sp_no_stratify, "disable stratified splitting");
  split_cmd->add_option("--out", sp_out, "output directory")->required();

  // mine ----------------------------------------------------------------
  auto* mine_cmd = app.add_subcommand("mine", "mine frequent class association rules");
  std::string mn_data, mn_schema, mn_out;
  bool mn_metrics = false;
  mine_cmd->add_option("--data", mn_data, "training CSV")->required();
  mine_cmd->add_option("--schema", mn_schema, "schema JSON")->required();
  mine_cmd->add_option("--out", mn_out, "ruleset JSONL path")->required();
  mine_cmd->add_flag("--metrics", mn_metrics, "include per-rule metrics in the output");
  bool mn_smooth = false;
  mine_cmd->add_flag("--smooth-rr", mn_smooth,
                     "report Haldane-smoothed relative risks (metrics only)");
  auto mn_flags = detail::add_mining_flags(mine_cmd);

  // train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "mine, prune and select a classifier");
  std::string tr_data, tr_train, tr_validation, tr_schema, tr_out;
  std::vector<double> tr_fractions{0.5, 0.25, 0.25};
  std::uint64_t tr_seed = 0;
  bool tr_no_stratify = false;
  train_cmd->add_option("--data", tr_data, "single CSV to split internally");
  train_cmd->add_option("--train", tr_train, "training CSV");
  train_cmd->add_option("--validation", tr_validation, "validation CSV");
  train_cmd->add_option("--schema", tr_schema, "schema JSON")->required();
  train_cmd->add_option("--split", tr_fractions, "fractions when --data is used")
      ->delimiter(',');
  train_cmd->add_option("--seed", tr_seed, "split seed");
  train_cmd->add_flag("--no-stratify", tr_no_stratify, "disable stratified splitting");
  train_cmd->add_option("--out", tr_out, "output directory")->required();
  std::string tr_stage2 = "coverage";
  train_cmd->add_option("--stage2-policy", tr_stage2,
                        "representative selection: coverage or always-add")
      ->check(CLI::IsMember({"coverage", "always-add"}));
  auto tr_flags = detail::add_mining_flags(train_cmd);

  // evaluate --------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("evaluate", "score a classifier on a test CSV");
  std::string ev_classifier, ev_data, ev_out;
  eval_cmd->add_option("--classifier", ev_classifier, "classifier JSON")->required();
  eval_cmd->add_option("--data", ev_data, "test CSV")->required();
  eval_cmd->add_option("--out", ev_out, "evaluation report JSON path");

  // grid ------------------------------------------------------------------
  auto* grid_cmd = app.add_subcommand("grid", "parameter sweep with ROC-point selection");
  std::string gr_data, gr_schema, gr_out, gr_points;
  std::vector<double> gr_fractions{0.5, 0.25, 0.25};
  std::uint64_t gr_seed = 0;
  bool gr_no_stratify = false, gr_select_only = false;
  std::vector<double> gr_local{0.09, 0.10, 0.15};
  std::vector<double> gr_conf{3, 4, 5};
  std::vector<std::size_t> gr_maxlen{3, 4};
  grid_cmd->add_option("--data", gr_data, "input CSV");
  grid_cmd->add_option("--schema", gr_schema, "schema JSON");
  grid_cmd->add_option("--split", gr_fractions, "train,validation,test fractions")
      ->delimiter(',');
  grid_cmd->add_option("--seed", gr_seed, "split seed");
  grid_cmd->add_flag("--no-stratify", gr_no_stratify, "disable stratified splitting");
  grid_cmd->add_option("--local-supports", gr_local, "local-support grid")->delimiter(',');
  grid_cmd->add_option("--conf-ratios", gr_conf, "confidence-ratio grid")->delimiter(',');
  grid_cmd->add_option("--max-lengths", gr_maxlen, "antecedent-length grid")
      ->delimiter(',');
  grid_cmd->add_option("--points", gr_points, "existing results table CSV");
  grid_cmd->add_flag("--select-only", gr_select_only,
                     "only run ROC selection over --points");
  grid_cmd->add_option("--out", gr_out, "output directory");
  std::string gr_policy = "min-rate";
  grid_cmd->add_option("--roc-policy", gr_policy,
                       "selection among nondominated points: min-rate, youden, distance")
      ->check(CLI::IsMember({"min-rate", "youden", "distance"}));
  auto gr_flags = detail::add_mining_flags(grid_cmd);

  // export-tree ------------------------------------------------------------
  auto* tree_cmd = app.add_subcommand("export-tree", "render a classifier as a DOT tree");
  std::string xt_classifier, xt_out;
  tree_cmd->add_option("--classifier", xt_classifier, "classifier JSON")->required();
  tree_cmd->add_option("--out", xt_out, "DOT output path")->required();

  // synth --------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted-pattern dataset");
  std::string sy_spec, sy_out;
  std::uint64_t sy_seed = 0;
  synth_cmd->add_option("--spec", sy_spec, "plant spec JSON")->required();
  synth_cmd->add_option("--out", sy_out, "output directory")->required();
  auto* sy_seed_opt =
      synth_cmd->add_option("--seed", sy_seed, "overrides the seed in the spec");

  // App-level flags like --config may appear after the subcommand name.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);

    json cfg;
    if (!config_path.empty()) cfg = io::load_json(config_path);
    detail::apply_config(mn_flags, cfg);
    detail::apply_config(tr_flags, cfg);
    detail::apply_config(gr_flags, cfg);

    if (*schema_cmd) {
      IngestOptions opt{sc_missing};
      const auto schema = infer_schema_file(sc_data, sc_class, sc_positive, opt);
      io::write_text(sc_out, io::schema_to_json(schema).dump(2) + "\n");
      std::cout << "schema: " << schema.attribute_count() << " attributes, "
                << schema.item_count() << " items -> " << sc_out << "\n";
    }

    if (*split_cmd) {
      const auto ts = detail::load_dataset(sp_data, sp_schema);
      const auto spec = detail::make_split(sp_fractions, sp_seed, !sp_no_stratify);
      const auto parts = split(ts, spec);
      detail::ensure_dir(sp_out);
      const char* names[3] = {"train.csv", "validation.csv", "test.csv"};
      json fingerprints = json::object();
      for (int p = 0; p < 3; ++p) {
        io::write_text(detail::join(sp_out, names[p]), csv::write(decode(parts[p])));
        fingerprints[names[p]] = fingerprint(parts[p]);
      }
      json prov{{"tool", kToolName},
                {"version", kToolVersion},
                {"seed", sp_seed},
                {"split", sp_fractions},
                {"stratified", !sp_no_stratify},
                {"source_fingerprint", fingerprint(ts)},
                {"dataset_fingerprints", fingerprints}};
      io::write_text(detail::join(sp_out, "provenance.json"), prov.dump(2) + "\n");
      std::cout << "split: " << parts[0].n << "/" << parts[1].n << "/" << parts[2].n
                << " rows -> " << sp_out << "\n";
    }

    if (*mine_cmd) {
      const auto ts = detail::load_dataset(mn_data, mn_schema);
      const RuleSet rs = mine(ts, mn_flags.params);
      const auto estimate = mn_smooth ? RrEstimate::haldane : RrEstimate::raw;
      io::write_text(mn_out, io::ruleset_to_jsonl(rs, ts.schema, mn_metrics, estimate));
      std::cout << "mined " << rs.rules.size() << " rules -> " << mn_out << "\n";
    }

    if (*train_cmd) {
      TransactionSet train_ts, validation_ts;
      json fingerprints = json::object();
      detail::ensure_dir(tr_out);
      if (!tr_data.empty()) {
        const auto ts = detail::load_dataset(tr_data, tr_schema);
        const auto spec = detail::make_split(tr_fractions, tr_seed, !tr_no_stratify);
        auto parts = split(ts, spec);
        train_ts = std::move(parts[0]);
        validation_ts = std::move(parts[1]);
        io::write_text(detail::join(tr_out, "test.csv"), csv::write(decode(parts[2])));
        fingerprints["test"] = fingerprint(parts[2]);
      } else {
        if (tr_train.empty() || tr_validation.empty())
          throw CLI::ValidationError("train",
                                     "give either --data or both --train and --validation");
        train_ts = detail::load_dataset(tr_train, tr_schema);
        validation_ts = detail::load_dataset(tr_validation, tr_schema);
      }

      const TrainResult result = train_classifier(train_ts, validation_ts, tr_flags.params,
                                                  detail::parse_stage2_policy(tr_stage2));
      io::write_text(detail::join(tr_out, "classifier.json"),
                     io::classifier_to_json(result.classifier).dump(2) + "\n");
      io::write_text(detail::join(tr_out, "audit.jsonl"),
                     io::audit_to_jsonl(result.family.audit, train_ts.schema));
      fingerprints["train"] = result.classifier.train_fingerprint;
      fingerprints["validation"] = result.classifier.validation_fingerprint;
      json prov{{"tool", kToolName},
                {"version", kToolVersion},
                {"params", io::params_to_json(tr_flags.params)},
                {"seed", tr_seed},
                {"dataset_fingerprints", fingerprints}};
      io::write_text(detail::join(tr_out, "provenance.json"), prov.dump(2) + "\n");
      if (result.classifier.patterns.empty())
        std::cerr << "warning: empty classifier (no risk pattern survived selection)\n";
      std::cout << "mined " << result.mined.rules.size() << " rules, kept "
                << result.family.rules.size() << " risk patterns, classifier has "
                << result.classifier.patterns.size() << " patterns -> " << tr_out << "\n";
    }

    if (*eval_cmd) {
      const Classifier c = io::classifier_from_json(io::load_json(ev_classifier));
      TransactionSet test_ts = encode_file(ev_data, c.schema);
      if (test_ts.n == 0) throw DataError("empty dataset: " + ev_data);
      const auto [cm, pt] = evaluate(c, test_ts);
      json report{{"format", "evaluation"},
                  {"tool", kToolName},
                  {"version", kToolVersion},
                  {"confusion", {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}}},
                  {"sensitivity", pt.sensitivity},
                  {"specificity", pt.specificity},
                  {"global_error", pt.global_error},
                  {"dataset_fingerprints",
                   {{"test", fingerprint(test_ts)},
                    {"train", c.train_fingerprint},
                    {"validation", c.validation_fingerprint}}}};
      if (!ev_out.empty()) io::write_text(ev_out, report.dump(2) + "\n");
      std::cout << "tp=" << cm.tp << " fn=" << cm.fn << " fp=" << cm.fp << " tn=" << cm.tn
                << " sensitivity=" << report_detail::format3(pt.sensitivity)
                << " specificity=" << report_detail::format3(pt.specificity)
                << " classification_error=" << report_detail::format3(pt.global_error)
                << "\n";
    }

    if (*grid_cmd) {
      std::vector<GridPoint> cells;
      if (gr_select_only) {
        if (gr_points.empty())
          throw CLI::ValidationError("grid", "--select-only requires --points");
        cells = io::points_from_table(csv::parse_file(gr_points));
      } else {
        if (gr_data.empty() || gr_schema.empty())
          throw CLI::ValidationError("grid", "sweep mode requires --data and --schema");
        const auto ts = detail::load_dataset(gr_data, gr_schema);
        const auto spec = detail::make_split(gr_fractions, gr_seed, !gr_no_stratify);
        const auto parts = split(ts, spec);
        std::vector<MiningParams> grid;
        for (double ls : gr_local)
          for (double cr : gr_conf)
            for (std::size_t ml : gr_maxlen) {
              MiningParams p = gr_flags.params;
              p.min_local_support = ls;
              p.min_conf_ratio = cr;
              p.max_length = ml;
              grid.push_back(p);
            }
        cells = grid_search(parts[0], parts[1], parts[2], grid);
        if (!gr_out.empty()) {
          detail::ensure_dir(gr_out);
          io::write_text(detail::join(gr_out, "table.csv"), export_table(cells));
          json prov{{"tool", kToolName},
                    {"version", kToolVersion},
                    {"seed", gr_seed},
                    {"rr_threshold", gr_flags.params.rr_threshold},
                    {"k", gr_flags.params.test_margin},
                    {"dataset_fingerprints",
                     {{"train", fingerprint(parts[0])},
                      {"validation", fingerprint(parts[1])},
                      {"test", fingerprint(parts[2])}}}};
          io::write_text(detail::join(gr_out, "provenance.json"), prov.dump(2) + "\n");
        }
      }

      std::vector<PerformancePoint> points;
      std::vector<std::size_t> cell_of_point;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].ok) {
          std::cerr << "warning: cell " << cells[i].label << " failed: " << cells[i].error
                    << "\n";
          continue;
        }
        points.push_back(cells[i].point);
        cell_of_point.push_back(i);
      }
      if (points.empty()) throw DataError("grid: no cell produced a usable point");
      const auto [idx, best] = roc_select(points, detail::parse_roc_policy(gr_policy));
      const auto& winner = cells[cell_of_point[idx]];
      std::cout << "selected classifier " << winner.label
                << ": sensitivity=" << report_detail::format3(best.sensitivity)
                << " specificity=" << report_detail::format3(best.specificity)
                << " classification_error=" << report_detail::format3(best.global_error)
                << "\n";
    }

    if (*tree_cmd) {
      const Classifier c = io::classifier_from_json(io::load_json(xt_classifier));
      std::string dot = "// " + std::string(kToolName) + " " + kToolVersion +
                        " train=" + c.train_fingerprint +
                        " validation=" + c.validation_fingerprint + "\n";
      dot += export_tree(c);
      io::write_text(xt_out, dot);
      std::cout << "tree with " << c.patterns.size() << " patterns -> " << xt_out << "\n";
    }

    if (*synth_cmd) {
      PlantSpec spec = io::plant_spec_from_json(io::load_json(sy_spec));
      if (sy_seed_opt->count()) spec.noise_seed = sy_seed;
      auto [ts, truth] = generate(spec);
      detail::ensure_dir(sy_out);
      io::write_text(detail::join(sy_out, "data.csv"), csv::write(decode(ts)));
      io::write_text(detail::join(sy_out, "schema.json"),
                     io::schema_to_json(ts.schema).dump(2) + "\n");
      json truth_json = io::ground_truth_to_json(truth, ts.schema);
      truth_json["provenance"] = {{"tool", kToolName},
                                  {"version", kToolVersion},
                                  {"seed", spec.noise_seed},
                                  {"dataset_fingerprints", {{"data", fingerprint(ts)}}}};
      io::write_text(detail::join(sy_out, "ground_truth.json"), truth_json.dump(2) + "\n");
      std::cout << "synth: " << ts.n << " rows, " << ts.n_pos << " positives -> " << sy_out
                << "\n";
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("rarerules");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rarerules::cli
