// Dataset ingestion, z-score normalization and stratified k-fold plans.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgrt/tree.hpp"

namespace fgrt {

struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix X;
  std::vector<int> y;  // dense class ids in [0, n_classes)
  std::vector<std::string> class_names;

  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// Comma-separated text with a header row. The label column is selected by
// name, defaulting to the last column; labels map to dense class ids in
// first-appearance order. Non-numeric feature cells raise DataError with
// 1-based row/column coordinates.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = {});

// Per-feature mean and population standard deviation (divide by n), fit on
// training rows only. Zero-spread features are flagged and dropped by
// normalize_apply.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<int> kept;        // source column indices with stddev > 0
  std::vector<int> degenerate;  // source column indices with stddev == 0
};

NormStats normalize_fit(const Matrix& X);

// Applies train-fold stats: drops degenerate columns, then z-scores the
// kept ones. Column order follows NormStats::kept.
Matrix normalize_apply(const Matrix& X, const NormStats& stats);

// Deterministic stratified fold assignment. Per-class fold counts differ by
// at most one; classes with fewer than k samples end up in distinct folds
// and are listed in small_classes.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // per-sample fold index in [0, k)
  std::uint64_t seed = 0;
  std::vector<int> small_classes;
};

FoldPlan stratified_kfold(std::span<const int> y, int k, std::uint64_t seed);

}  // namespace fgrt
