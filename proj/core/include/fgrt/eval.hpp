// Training pipeline and the evaluation harness: cross-validated scoring,
// hyperparameter sweeps, runtime-scaling measurements and report emission.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fgrt/data.hpp"
#include "fgrt/partition_builder.hpp"
#include "fgrt/tree.hpp"

namespace fgrt {

struct FitOptions {
  TreeConfig tree;
  SearchConfig search;
  bool optimize_partitions = false;
  Aggregation aggregation = Aggregation::Max;
  int threads = 1;  // per-feature optimization and fold parallelism
  std::uint64_t seed = 0;
  std::string dataset_name;
};

// One row of the partition dump: the (possibly optimized) terms of one
// feature plus its separability before/after and the probe count.
struct PartitionRecord {
  std::string feature;
  FeaturePartition partition;
  double si_before = 0.0;        // raw default partition
  double si_search_start = 0.0;  // projected search start (optimized runs)
  double si_after = 0.0;         // returned partition
  int evaluations = 0;
};

struct FitResult {
  FgrtModel model;
  std::vector<PartitionRecord> partition_records;
  double train_seconds = 0.0;
};

// Full training path on raw (unnormalized) rows: fit normalization, build
// quantile partitions, optionally optimize them, grow the tree. Degenerate
// features are dropped and recorded on the model.
FitResult fit_model(const Matrix& X_raw, std::span<const int> y,
                    std::span<const std::string> feature_names,
                    std::span<const std::string> class_names,
                    const FitOptions& options);

// The partition stage of fit_model alone (normalize, quantile partitions,
// optional optimization), for dumping partitions without growing a tree.
std::vector<PartitionRecord> build_partition_records(
    const Matrix& X_raw, std::span<const int> y,
    std::span<const std::string> feature_names, int n_classes,
    const FitOptions& options);

struct FoldResult {
  int fold = 0;
  int n_test = 0;
  double accuracy = 0.0;
  int num_rules = 0;
  double conditions_per_rule = 0.0;
  double rulebase_size = 0.0;  // total conditions in the rulebase
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::string cell;  // config-cell key, "default" outside sweeps
  int k = 0;
  std::uint64_t seed = 0;
  bool optimized_partitions = false;
  TreeConfig config;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double mean_rules = 0.0;
  double mean_conditions = 0.0;
  double mean_rulebase = 0.0;
  double train_seconds = 0.0;    // summed over folds
  double predict_seconds = 0.0;  // summed over folds
};

// Stratified k-fold evaluation. Per fold: normalization, partitions and
// optional optimization are fit on the training rows only; the held-out
// rows are scored through classify().
EvalReport cross_validate(const Dataset& dataset, const FitOptions& options,
                          int folds);

struct SweepAxes {
  std::vector<int> max_rules;
  std::vector<double> coverage_threshold;
  std::vector<double> min_gain_theta;
  bool cartesian = false;  // default: vary one axis at a time
};

std::vector<EvalReport> sweep(const Dataset& dataset, const FitOptions& base,
                              const SweepAxes& axes, int folds);

struct TimingRow {
  int n = 0;
  int m = 0;
  double train_seconds = 0.0;
  int num_rules = 0;
};

// Wall-time of the full training path on synthetic Gaussian data across a
// sample-count grid (feature count fixed) and a feature-count grid (sample
// count fixed).
std::vector<TimingRow> runtime_scaling(std::span<const int> n_grid,
                                       std::span<const int> m_grid, int base_n,
                                       int base_m, std::uint64_t seed,
                                       const TreeConfig& config);

// Mixture of class-conditional unit-variance Gaussians. For n_classes <= m
// class c's mean sits on axis c at `separation`, so each class has one
// discriminating feature whose marginal mean gap is `separation` sigmas;
// otherwise means are random directions of that norm.
Dataset make_gaussian_dataset(int n, int m, int n_classes, double separation,
                              std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

// Delimited report: one row per (dataset, cell, fold) plus one aggregate
// "mean" row per report. Deterministic for fixed inputs (no wall times).
void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);

// Companion run manifest: seed, fold count, config echo, format_version.
void write_manifest(std::ostream& out, const FitOptions& options, int folds,
                    std::span<const EvalReport> reports);

void write_partition_dump(std::ostream& out,
                          std::span<const PartitionRecord> records);

void write_timings_csv(std::ostream& out, std::span<const TimingRow> rows);

}  // namespace fgrt
