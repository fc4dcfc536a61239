#include "fgrt/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "fgrt/errors.hpp"
#include "fgrt/inference.hpp"
#include "fgrt/model_io.hpp"

namespace fgrt {
namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

Matrix take_rows(const Matrix& X, std::span<const int> rows) {
  Matrix out(rows.size(), X.cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < X.cols; ++j)
      out.at(i, j) = X.at(rows[i], j);
  return out;
}

std::vector<double> column(const Matrix& X, std::size_t j) {
  std::vector<double> col(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) col[i] = X.at(i, j);
  return col;
}

// Runs fn(i) for i in [0, count) with at most `threads` concurrent tasks.
// Results are applied in index order, so the outcome matches sequential.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  for (int begin = 0; begin < count; begin += threads) {
    const int end = std::min(count, begin + threads);
    std::vector<std::future<void>> batch;
    batch.reserve(end - begin);
    for (int i = begin; i < end; ++i)
      batch.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : batch) f.get();
  }
}

}  // namespace

namespace {

struct RetainedFeature {
  int source_index;
  int norm_column;
  FeaturePartition partition;
};

struct PartitionStage {
  NormStats stats;
  Matrix Xn;
  std::vector<RetainedFeature> retained;
  std::vector<DroppedFeature> dropped;
  std::vector<PartitionRecord> records;
};

PartitionStage prepare_partitions(const Matrix& X_raw, std::span<const int> y,
                                  std::span<const std::string> feature_names,
                                  int n_classes, const FitOptions& options) {
  options.tree.validate();
  options.search.validate();
  if (X_raw.rows == 0) throw DataError("fit_model: empty dataset");
  if (X_raw.cols != feature_names.size())
    throw DataError("fit_model: feature name count does not match matrix");

  PartitionStage stage;
  stage.stats = normalize_fit(X_raw);
  stage.Xn = normalize_apply(X_raw, stage.stats);

  for (int j : stage.stats.degenerate)
    stage.dropped.push_back(
        {feature_names[j], j, "zero variance in training data"});

  // Quantile partitions per retained feature; a feature can still drop out
  // here if its spread collapses (kept as a guard, normalization already
  // removes constant columns).
  for (std::size_t jj = 0; jj < stage.stats.kept.size(); ++jj) {
    const int j = stage.stats.kept[jj];
    try {
      stage.retained.push_back(
          {j, static_cast<int>(jj),
           quantile_partition(column(stage.Xn, jj), feature_names[j])});
    } catch (const DegenerateFeatureError& e) {
      stage.dropped.push_back({feature_names[j], j, e.what()});
    }
  }
  if (stage.retained.empty())
    throw DataError("fit_model: every feature is degenerate");

  stage.records.resize(stage.retained.size());
  if (options.optimize_partitions) {
    parallel_for(
        static_cast<int>(stage.retained.size()), options.threads, [&](int idx) {
          RetainedFeature& r = stage.retained[idx];
          const std::vector<double> col = column(stage.Xn, r.norm_column);
          PartitionOptResult opt = optimize_partition(
              col, y, n_classes, options.search, r.partition);
          stage.records[idx] = {r.partition.feature_name, opt.partition,
                                opt.si_initial, opt.si_search_start,
                                opt.si_final, opt.evaluations};
          r.partition = std::move(opt.partition);
        });
  } else {
    for (std::size_t idx = 0; idx < stage.retained.size(); ++idx) {
      const RetainedFeature& r = stage.retained[idx];
      const double si = separability_index(r.partition,
                                           column(stage.Xn, r.norm_column), y,
                                           n_classes)
                            .value;
      stage.records[idx] = {r.partition.feature_name, r.partition, si, si, si,
                            0};
    }
  }
  return stage;
}

}  // namespace

std::vector<PartitionRecord> build_partition_records(
    const Matrix& X_raw, std::span<const int> y,
    std::span<const std::string> feature_names, int n_classes,
    const FitOptions& options) {
  return prepare_partitions(X_raw, y, feature_names, n_classes, options)
      .records;
}

FitResult fit_model(const Matrix& X_raw, std::span<const int> y,
                    std::span<const std::string> feature_names,
                    std::span<const std::string> class_names,
                    const FitOptions& options) {
  const double t0 = now_seconds();
  const int n_classes = static_cast<int>(class_names.size());
  PartitionStage stage =
      prepare_partitions(X_raw, y, feature_names, n_classes, options);
  const Matrix& Xn = stage.Xn;
  const NormStats& stats = stage.stats;
  std::vector<RetainedFeature>& retained = stage.retained;
  std::vector<DroppedFeature> dropped = std::move(stage.dropped);
  std::vector<PartitionRecord> records = std::move(stage.records);

  // Model feature matrix: retained columns in order.
  Matrix Xm(Xn.rows, retained.size());
  std::vector<FeaturePartition> partitions;
  partitions.reserve(retained.size());
  for (std::size_t jj = 0; jj < retained.size(); ++jj) {
    partitions.push_back(retained[jj].partition);
    for (std::size_t i = 0; i < Xn.rows; ++i)
      Xm.at(i, jj) = Xn.at(i, retained[jj].norm_column);
  }

  FgrtModel model = grow_tree(Xm, y, partitions, options.tree, n_classes);
  model.aggregation = options.aggregation;
  model.original_arity = static_cast<int>(X_raw.cols);
  model.class_names.assign(class_names.begin(), class_names.end());
  model.dropped_features = std::move(dropped);
  for (std::size_t jj = 0; jj < retained.size(); ++jj) {
    FeatureSpec& spec = model.features[jj];
    spec.source_index = retained[jj].source_index;
    spec.mean = stats.mean[spec.source_index];
    spec.stddev = stats.stddev[spec.source_index];
  }
  model.metadata.dataset = options.dataset_name;
  model.metadata.seed = options.seed;

  FitResult result;
  result.model = std::move(model);
  result.partition_records = std::move(records);
  result.train_seconds = now_seconds() - t0;
  return result;
}

EvalReport cross_validate(const Dataset& dataset, const FitOptions& options,
                          int folds) {
  const FoldPlan plan = stratified_kfold(dataset.y, folds, options.seed);

  EvalReport report;
  report.dataset = dataset.name;
  report.cell = "default";
  report.k = folds;
  report.seed = options.seed;
  report.optimized_partitions = options.optimize_partitions;
  report.config = options.tree;
  report.folds.resize(folds);

  FitOptions fold_options = options;
  fold_options.dataset_name = dataset.name;
  fold_options.threads = 1;  // folds own the thread budget below

  auto run_fold = [&](int fold) {
    std::vector<int> train_rows, test_rows;
    for (std::size_t i = 0; i < dataset.y.size(); ++i)
      (plan.assignments[i] == fold ? test_rows : train_rows)
          .push_back(static_cast<int>(i));

    const Matrix X_train = take_rows(dataset.X, train_rows);
    std::vector<int> y_train(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i)
      y_train[i] = dataset.y[train_rows[i]];

    FitResult fit = fit_model(X_train, y_train, dataset.feature_names,
                              dataset.class_names, fold_options);

    const double t0 = now_seconds();
    int correct = 0;
    for (int row : test_rows) {
      const Prediction pred = classify(fit.model, dataset.X.row(row));
      if (pred.predicted_class == dataset.y[row]) ++correct;
    }
    const double predict_seconds = now_seconds() - t0;

    FoldResult& fr = report.folds[fold];
    fr.fold = fold;
    fr.n_test = static_cast<int>(test_rows.size());
    fr.accuracy = test_rows.empty()
                      ? 0.0
                      : static_cast<double>(correct) / test_rows.size();
    fr.num_rules = static_cast<int>(fit.model.rules.size());
    std::size_t total_conditions = 0;
    for (const FuzzyRule& r : fit.model.rules)
      total_conditions += r.conditions.size();
    fr.conditions_per_rule =
        fit.model.rules.empty()
            ? 0.0
            : static_cast<double>(total_conditions) / fit.model.rules.size();
    fr.rulebase_size = static_cast<double>(total_conditions);
    fr.train_seconds = fit.train_seconds;
    fr.predict_seconds = predict_seconds;
  };

  parallel_for(folds, options.threads, run_fold);

  for (const FoldResult& fr : report.folds) {
    report.mean_accuracy += fr.accuracy;
    report.mean_rules += fr.num_rules;
    report.mean_conditions += fr.conditions_per_rule;
    report.mean_rulebase += fr.rulebase_size;
    report.train_seconds += fr.train_seconds;
    report.predict_seconds += fr.predict_seconds;
  }
  report.mean_accuracy /= folds;
  report.mean_rules /= folds;
  report.mean_conditions /= folds;
  report.mean_rulebase /= folds;
  return report;
}

std::vector<EvalReport> sweep(const Dataset& dataset, const FitOptions& base,
                              const SweepAxes& axes, int folds) {
  for (double v : axes.coverage_threshold)
    if (v < 0.0 || v > 1.0)
      throw ConfigError("sweep: coverage_threshold axis values must lie in [0, 1]");
  for (double v : axes.min_gain_theta)
    if (v < 0.0) throw ConfigError("sweep: min_gain_theta axis values must be >= 0");
  for (int v : axes.max_rules)
    if (v < 1) throw ConfigError("sweep: max_rules axis values must be >= 1");

  std::vector<std::pair<std::string, FitOptions>> cells;
  auto add_cell = [&](const std::string& key, const FitOptions& opts) {
    cells.emplace_back(key, opts);
  };

  if (axes.cartesian) {
    const std::vector<int> rules =
        axes.max_rules.empty() ? std::vector<int>{base.tree.max_rules}
                               : axes.max_rules;
    const std::vector<double> covs =
        axes.coverage_threshold.empty()
            ? std::vector<double>{base.tree.coverage_threshold}
            : axes.coverage_threshold;
    const std::vector<double> thetas =
        axes.min_gain_theta.empty()
            ? std::vector<double>{base.tree.min_gain_theta}
            : axes.min_gain_theta;
    for (int r : rules)
      for (double cov : covs)
        for (double theta : thetas) {
          FitOptions opts = base;
          opts.tree.max_rules = r;
          opts.tree.coverage_threshold = cov;
          opts.tree.min_gain_theta = theta;
          add_cell("max_rules=" + std::to_string(r) + ";coverage=" + fmt(cov) +
                       ";theta=" + fmt(theta),
                   opts);
        }
  } else {
    for (int r : axes.max_rules) {
      FitOptions opts = base;
      opts.tree.max_rules = r;
      add_cell("max_rules=" + std::to_string(r), opts);
    }
    for (double cov : axes.coverage_threshold) {
      FitOptions opts = base;
      opts.tree.coverage_threshold = cov;
      add_cell("coverage=" + fmt(cov), opts);
    }
    for (double theta : axes.min_gain_theta) {
      FitOptions opts = base;
      opts.tree.min_gain_theta = theta;
      add_cell("theta=" + fmt(theta), opts);
    }
  }
  if (cells.empty()) throw ConfigError("sweep: no axis values given");

  std::vector<EvalReport> reports(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    reports[i] = cross_validate(dataset, cells[i].second, folds);
    reports[i].cell = cells[i].first;
  }
  return reports;
}

Dataset make_gaussian_dataset(int n, int m, int n_classes, double separation,
                              std::uint64_t seed) {
  if (n < 1 || m < 1 || n_classes < 1)
    throw ConfigError("make_gaussian_dataset: n, m and n_classes must be >= 1");
  std::mt19937_64 rng(seed);
  // Box-Muller on raw generator output; std::normal_distribution draws an
  // implementation-defined sequence, this one is identical everywhere.
  double spare = 0.0;
  bool has_spare = false;
  auto gauss = [&](std::mt19937_64& gen) {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double scale = 1.0 / (static_cast<double>(std::mt19937_64::max()) + 2.0);
    const double u = (static_cast<double>(gen()) + 1.0) * scale;  // (0, 1)
    const double v = (static_cast<double>(gen()) + 1.0) * scale;
    const double radius = std::sqrt(-2.0 * std::log(u));
    spare = radius * std::sin(2.0 * M_PI * v);
    has_spare = true;
    return radius * std::cos(2.0 * M_PI * v);
  };

  std::vector<std::vector<double>> means(n_classes, std::vector<double>(m, 0.0));
  if (n_classes <= m) {
    for (int c = 0; c < n_classes; ++c) means[c][c] = separation;
  } else {
    for (int c = 0; c < n_classes; ++c) {
      double norm_sq = 0.0;
      for (int j = 0; j < m; ++j) {
        means[c][j] = gauss(rng);
        norm_sq += means[c][j] * means[c][j];
      }
      const double scale = separation / std::sqrt(norm_sq);
      for (int j = 0; j < m; ++j) means[c][j] *= scale;
    }
  }

  Dataset ds;
  ds.name = "synthetic";
  for (int j = 0; j < m; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (int c = 0; c < n_classes; ++c) ds.class_names.push_back(std::to_string(c));
  ds.X = Matrix(n, m);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % n_classes;
    ds.y[i] = c;
    for (int j = 0; j < m; ++j) ds.X.at(i, j) = means[c][j] + gauss(rng);
  }
  return ds;
}

std::vector<TimingRow> runtime_scaling(std::span<const int> n_grid,
                                       std::span<const int> m_grid, int base_n,
                                       int base_m, std::uint64_t seed,
                                       const TreeConfig& config) {
  FitOptions options;
  options.tree = config;
  options.seed = seed;
  options.dataset_name = "runtime-scaling";

  std::vector<TimingRow> rows;
  auto measure = [&](int n, int m) {
    const Dataset ds = make_gaussian_dataset(n, m, 2, 1.0, seed);
    FitResult fit = fit_model(ds.X, ds.y, ds.feature_names, ds.class_names,
                              options);
    rows.push_back({n, m, fit.train_seconds,
                    static_cast<int>(fit.model.rules.size())});
  };
  for (int n : n_grid) measure(n, base_m);
  for (int m : m_grid) measure(base_n, m);
  return rows;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("fit_loglog_slope: need at least two (x, y) pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "dataset,cell,fold,n_test,accuracy,num_rules,conditions_per_rule,"
         "rulebase_size\n";
  for (const EvalReport& report : reports) {
    for (const FoldResult& fr : report.folds) {
      out << report.dataset << ',' << report.cell << ',' << fr.fold << ','
          << fr.n_test << ',' << fmt(fr.accuracy) << ',' << fr.num_rules << ','
          << fmt(fr.conditions_per_rule) << ',' << fmt(fr.rulebase_size)
          << '\n';
    }
    int n_total = 0;
    for (const FoldResult& fr : report.folds) n_total += fr.n_test;
    out << report.dataset << ',' << report.cell << ",mean," << n_total << ','
        << fmt(report.mean_accuracy) << ',' << fmt(report.mean_rules) << ','
        << fmt(report.mean_conditions) << ',' << fmt(report.mean_rulebase)
        << '\n';
  }
}

void write_manifest(std::ostream& out, const FitOptions& options, int folds,
                    std::span<const EvalReport> reports) {
  out << "format_version=" << kModelFormatVersion << '\n';
  out << "seed=" << options.seed << '\n';
  out << "folds=" << folds << '\n';
  out << "max_rules=" << options.tree.max_rules << '\n';
  out << "max_depth=" << options.tree.max_depth << '\n';
  out << "min_gain_theta=" << fmt(options.tree.min_gain_theta) << '\n';
  out << "coverage_threshold=" << fmt(options.tree.coverage_threshold) << '\n';
  out << "firing_threshold=" << fmt(options.tree.firing_threshold) << '\n';
  out << "tnorm=" << to_string(options.tree.tnorm) << '\n';
  out << "aggregation=" << to_string(options.aggregation) << '\n';
  out << "optimize_partitions=" << (options.optimize_partitions ? 1 : 0) << '\n';
  out << "step_fractions=";
  for (std::size_t i = 0; i < options.search.step_fractions.size(); ++i)
    out << (i ? "," : "") << fmt(options.search.step_fractions[i]);
  out << '\n';
  out << "max_cycles=" << options.search.max_cycles << '\n';
  out << "cells=";
  for (std::size_t i = 0; i < reports.size(); ++i)
    out << (i ? ";" : "") << reports[i].cell;
  out << '\n';
}

void write_partition_dump(std::ostream& out,
                          std::span<const PartitionRecord> records) {
  out << "feature,term,a,b,c,d,si_before,si_after,evaluations\n";
  for (const PartitionRecord& rec : records) {
    for (const LinguisticTerm& term : rec.partition.terms) {
      out << rec.feature << ',' << term.label << ',' << fmt(term.shape.a) << ','
          << fmt(term.shape.b) << ',' << fmt(term.shape.c) << ','
          << fmt(term.shape.d) << ',' << fmt(rec.si_before) << ','
          << fmt(rec.si_after) << ',' << rec.evaluations << '\n';
    }
  }
}

void write_timings_csv(std::ostream& out, std::span<const TimingRow> rows) {
  out << "n,m,train_seconds,num_rules\n";
  for (const TimingRow& row : rows)
    out << row.n << ',' << row.m << ',' << fmt(row.train_seconds) << ','
        << row.num_rules << '\n';
}

}  // namespace fgrt
