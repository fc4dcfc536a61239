// Classification over a trained model: rule firing, score aggregation,
// ancestor fallback for weakly fired samples, and textual explanations.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fgrt/tree.hpp"

namespace fgrt {

struct Prediction {
  int predicted_class = 0;
  std::vector<double> class_scores;
  std::vector<std::pair<int, double>> fired_rules;  // (rule idx, firing), desc
  bool fallback_used = false;
  int winning_rule = -1;  // -1 when fallback decided the class
};

// Normalizes the raw sample with the stored per-feature stats, clips each
// value to the partition domain (out-of-range samples read as the nearest
// edge term's plateau) and scores the rulebase. With Max aggregation each
// class score is the best firing x confidence over the rules; Additive sums
// them. When no rule fires at or above firing_threshold, prediction falls
// back to the deepest fallback node still firing at or above the threshold,
// or ultimately the root distribution. Argmax ties break to the lowest
// class id. Throws DataError when x_raw does not match the model arity.
Prediction classify(const FgrtModel& model, std::span<const double> x_raw);

// The fired rules in pretty-printed form ordered by descending firing
// strength (stable on ties), plus a "fallback to prior" note when no rule
// fired above the threshold.
std::string explain(const FgrtModel& model, std::span<const double> x_raw);

// One record per sample: predicted class, per-class scores, winning rule
// index and the fallback flag, as delimited text with a header row.
void write_predictions_csv(std::ostream& out, const FgrtModel& model,
                           const Matrix& X_raw);

}  // namespace fgrt
