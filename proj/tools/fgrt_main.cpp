// fgrt: fuzzy greedy rule-tree classifier.
//
// Subcommands: fit, predict, evaluate, sweep, optimize-partitions.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgrt/data.hpp"
#include "fgrt/errors.hpp"
#include "fgrt/eval.hpp"
#include "fgrt/inference.hpp"
#include "fgrt/model_io.hpp"

namespace {

using namespace fgrt;

struct CliConfig {
  std::string data_path;
  std::string label_column;
  std::string model_path;
  std::string output_path;
  std::uint64_t seed = 42;
  int folds = 5;
  int threads = 1;
  bool optimize_partitions = false;
  bool explain_predictions = false;
  bool cartesian = false;
  std::string tnorm = "product";
  std::string aggregation = "max";
  TreeConfig tree;
  SearchConfig search;
  std::vector<int> axis_max_rules;
  std::vector<double> axis_coverage;
  std::vector<double> axis_theta;
};

void add_common_options(CLI::App* cmd, CliConfig& cfg, bool needs_output) {
  cmd->add_option("--data", cfg.data_path, "input CSV with a header row")
      ->required();
  cmd->add_option("--label-column", cfg.label_column,
                  "label column name (default: last column)");
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "worker threads for folds and features")
      ->capture_default_str();
  auto* out = cmd->add_option("--output", cfg.output_path, "output file path");
  if (needs_output) out->required();
}

void add_tree_options(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--max-rules", cfg.tree.max_rules, "rule budget (leaves)")
      ->capture_default_str();
  cmd->add_option("--max-depth", cfg.tree.max_depth, "conditions per rule limit")
      ->capture_default_str();
  cmd->add_option("--min-gain-theta", cfg.tree.min_gain_theta,
                  "minimum impurity gain to split")
      ->capture_default_str();
  cmd->add_option("--coverage-threshold", cfg.tree.coverage_threshold,
                  "fraction of root membership below which a node stops")
      ->capture_default_str();
  cmd->add_option("--firing-threshold", cfg.tree.firing_threshold,
                  "minimum rule firing before falling back")
      ->capture_default_str();
  cmd->add_option("--tnorm", cfg.tnorm, "conjunction operator: product|minimum")
      ->capture_default_str();
  cmd->add_option("--aggregation", cfg.aggregation,
                  "score aggregation: max|additive")
      ->capture_default_str();
}

void add_search_options(CLI::App* cmd, CliConfig& cfg) {
  cmd->add_option("--optimize-partitions", cfg.optimize_partitions,
                  "tune partitions by separability before growing")
      ->capture_default_str();
  cmd->add_option("--step-fractions", cfg.search.step_fractions,
                  "coordinate-descent step fractions, strictly decreasing")
      ->capture_default_str()
      ->delimiter(',');
  cmd->add_option("--max-cycles", cfg.search.max_cycles,
                  "coordinate-descent cycle cap per step size")
      ->capture_default_str();
}

FitOptions make_fit_options(const CliConfig& cfg) {
  FitOptions options;
  options.tree = cfg.tree;
  options.tree.tnorm = tnorm_from_string(cfg.tnorm);
  options.search = cfg.search;
  options.optimize_partitions = cfg.optimize_partitions;
  options.aggregation = aggregation_from_string(cfg.aggregation);
  options.threads = cfg.threads;
  options.seed = cfg.seed;
  if (options.threads < 1) throw ConfigError("--threads must be >= 1");
  options.tree.validate();
  options.search.validate();
  return options;
}

Dataset load_dataset(const CliConfig& cfg) {
  const std::optional<std::string> label =
      cfg.label_column.empty() ? std::nullopt
                               : std::optional<std::string>(cfg.label_column);
  return load_csv(cfg.data_path, label);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write output file: " + path);
  return out;
}

int run_fit(const CliConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  FitOptions options = make_fit_options(cfg);
  options.dataset_name = ds.name;
  const FitResult fit =
      fit_model(ds.X, ds.y, ds.feature_names, ds.class_names, options);
  save_model(fit.model, cfg.model_path);
  std::cout << pretty_rulebase(fit.model);
  std::cout << "# rules=" << fit.model.rules.size()
            << " train_seconds=" << fit.train_seconds << "\n";
  if (!cfg.output_path.empty()) {
    auto out = open_output(cfg.output_path);
    write_partition_dump(out, fit.partition_records);
  }
  return 0;
}

// Rows of the prediction file arranged in the model's training feature
// order, matched by column name.
Matrix arrange_features(const FgrtModel& model, const Dataset& ds) {
  std::vector<int> source_of;
  for (const FeatureSpec& f : model.features)
    source_of.push_back(f.source_index);
  std::vector<std::pair<std::string, int>> wanted;  // name -> source index
  for (const FeatureSpec& f : model.features)
    wanted.emplace_back(f.name, f.source_index);
  for (const DroppedFeature& f : model.dropped_features)
    wanted.emplace_back(f.name, f.source_index);

  Matrix raw(ds.X.rows, model.original_arity);
  for (const auto& [name, source] : wanted) {
    const auto it =
        std::find(ds.feature_names.begin(), ds.feature_names.end(), name);
    if (it == ds.feature_names.end())
      throw DataError("prediction data is missing feature column '" + name + "'");
    const std::size_t col = it - ds.feature_names.begin();
    for (std::size_t i = 0; i < ds.X.rows; ++i)
      raw.at(i, source) = ds.X.at(i, col);
  }
  return raw;
}

int run_predict(const CliConfig& cfg) {
  const FgrtModel model = load_model(cfg.model_path);
  const Dataset ds = load_dataset(cfg);
  const Matrix raw = arrange_features(model, ds);

  auto out = open_output(cfg.output_path);
  write_predictions_csv(out, model, raw);

  if (cfg.explain_predictions)
    for (std::size_t i = 0; i < raw.rows; ++i)
      std::cout << "# sample " << i << "\n" << explain(model, raw.row(i));

  // Accuracy against the file's labels, when they all match model classes.
  bool labels_known = true;
  for (const std::string& name : ds.class_names)
    labels_known = labels_known &&
                   std::find(model.class_names.begin(), model.class_names.end(),
                             name) != model.class_names.end();
  if (labels_known) {
    int correct = 0;
    for (std::size_t i = 0; i < raw.rows; ++i) {
      const Prediction pred = classify(model, raw.row(i));
      if (model.class_names[pred.predicted_class] == ds.class_names[ds.y[i]])
        ++correct;
    }
    std::cout << "accuracy=" << static_cast<double>(correct) / raw.rows << " ("
              << correct << "/" << raw.rows << ")\n";
  }
  return 0;
}

int run_evaluate(const CliConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  FitOptions options = make_fit_options(cfg);
  options.dataset_name = ds.name;
  if (cfg.folds < 2) throw ConfigError("--folds must be >= 2");
  const EvalReport report = cross_validate(ds, options, cfg.folds);

  const EvalReport reports[] = {report};
  auto out = open_output(cfg.output_path);
  write_report_csv(out, reports);
  auto manifest = open_output(cfg.output_path + ".manifest");
  write_manifest(manifest, options, cfg.folds, reports);

  std::cout << "dataset=" << report.dataset
            << " mean_accuracy=" << report.mean_accuracy
            << " mean_rules=" << report.mean_rules
            << " mean_conditions_per_rule=" << report.mean_conditions << "\n"
            << "train_seconds=" << report.train_seconds
            << " predict_seconds=" << report.predict_seconds << "\n";
  return 0;
}

int run_sweep(const CliConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  FitOptions options = make_fit_options(cfg);
  options.dataset_name = ds.name;
  if (cfg.folds < 2) throw ConfigError("--folds must be >= 2");

  SweepAxes axes;
  axes.max_rules = cfg.axis_max_rules;
  axes.coverage_threshold = cfg.axis_coverage;
  axes.min_gain_theta = cfg.axis_theta;
  axes.cartesian = cfg.cartesian;
  if (axes.max_rules.empty() && axes.coverage_threshold.empty() &&
      axes.min_gain_theta.empty()) {
    axes.max_rules = {5, 10, 15, 20, 25, 30};
    axes.coverage_threshold = {0.0, 0.025, 0.05, 0.075, 0.10};
    axes.min_gain_theta = {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  }

  const std::vector<EvalReport> reports = sweep(ds, options, axes, cfg.folds);
  auto out = open_output(cfg.output_path);
  write_report_csv(out, reports);
  auto manifest = open_output(cfg.output_path + ".manifest");
  write_manifest(manifest, options, cfg.folds, reports);
  for (const EvalReport& r : reports)
    std::cout << r.cell << " mean_accuracy=" << r.mean_accuracy << "\n";
  return 0;
}

int run_optimize_partitions(const CliConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  FitOptions options = make_fit_options(cfg);
  options.dataset_name = ds.name;
  options.optimize_partitions = true;
  const std::vector<PartitionRecord> records = build_partition_records(
      ds.X, ds.y, ds.feature_names, ds.n_classes(), options);
  auto out = open_output(cfg.output_path);
  write_partition_dump(out, records);
  std::cout << "features=" << records.size() << " dump written to "
            << cfg.output_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fgrt: fuzzy greedy rule-tree classifier"};
  app.require_subcommand(1);
  // Defaults can come from a config file given before the subcommand, with
  // keys scoped per subcommand ([fit] / fit.max-rules); explicit flags win.
  app.set_config("--config", "", "read defaults from a config file");
  CliConfig cfg;

  CLI::App* fit = app.add_subcommand("fit", "train a model and print its rulebase");
  add_common_options(fit, cfg, false);
  add_tree_options(fit, cfg);
  add_search_options(fit, cfg);
  fit->add_option("--model", cfg.model_path, "model file to write")->required();

  CLI::App* predict =
      app.add_subcommand("predict", "classify a CSV with a trained model");
  add_common_options(predict, cfg, true);
  predict->add_option("--model", cfg.model_path, "model file to read")->required();
  predict->add_flag("--explain", cfg.explain_predictions,
                    "print fired rules per sample");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "stratified k-fold cross-validation");
  add_common_options(evaluate, cfg, true);
  add_tree_options(evaluate, cfg);
  add_search_options(evaluate, cfg);
  evaluate->add_option("--folds", cfg.folds, "fold count")->capture_default_str();

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "hyperparameter sweep over config axes");
  add_common_options(sweep_cmd, cfg, true);
  add_tree_options(sweep_cmd, cfg);
  add_search_options(sweep_cmd, cfg);
  sweep_cmd->add_option("--folds", cfg.folds, "fold count")->capture_default_str();
  sweep_cmd->add_option("--axis-max-rules", cfg.axis_max_rules,
                        "max_rules axis values")
      ->delimiter(',');
  sweep_cmd->add_option("--axis-coverage", cfg.axis_coverage,
                        "coverage_threshold axis values")
      ->delimiter(',');
  sweep_cmd->add_option("--axis-theta", cfg.axis_theta,
                        "min_gain_theta axis values")
      ->delimiter(',');
  sweep_cmd->add_flag("--cartesian", cfg.cartesian,
                      "cross all axes instead of varying one at a time");

  CLI::App* optparts = app.add_subcommand(
      "optimize-partitions", "emit the optimized partition dump, no tree");
  add_common_options(optparts, cfg, true);
  add_tree_options(optparts, cfg);
  add_search_options(optparts, cfg);

  try {
    app.parse(argc, argv);
    if (fit->parsed()) return run_fit(cfg);
    if (predict->parsed()) return run_predict(cfg);
    if (evaluate->parsed()) return run_evaluate(cfg);
    if (sweep_cmd->parsed()) return run_sweep(cfg);
    if (optparts->parsed()) return run_optimize_partitions(cfg);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints usage or help text
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
