#include "fgrt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fgrt/errors.hpp"

namespace fgrt {
namespace {

// Normalized, domain-clipped values for the model's retained features.
std::vector<double> prepare_sample(const FgrtModel& model,
                                   std::span<const double> x_raw) {
  if (x_raw.size() != static_cast<std::size_t>(model.original_arity))
    throw DataError("classify: sample has " + std::to_string(x_raw.size()) +
                    " features, model expects " +
                    std::to_string(model.original_arity));
  std::vector<double> x(model.features.size());
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    const FeatureSpec& f = model.features[j];
    const double z = (x_raw[f.source_index] - f.mean) / f.stddev;
    x[j] = std::clamp(z, f.partition.domain_min, f.partition.domain_max);
  }
  return x;
}

int argmax_lowest(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

std::string render_rule(const FgrtModel& model, const FuzzyRule& rule) {
  std::ostringstream out;
  char buf[64];
  out << "IF ";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const RuleCondition& cond = rule.conditions[i];
    if (i > 0) out << " AND ";
    out << model.features[cond.feature].name << " IS "
        << model.features[cond.feature].partition.terms[cond.term].label;
  }
  std::snprintf(buf, sizeof(buf), "%.3f", rule.confidence[rule.predicted_class]);
  out << " THEN class=" << model.class_names[rule.predicted_class]
      << " (confidence=" << buf;
  std::snprintf(buf, sizeof(buf), "%.3f", rule.support);
  out << ", support=" << buf << ")";
  return out.str();
}

}  // namespace

Prediction classify(const FgrtModel& model, std::span<const double> x_raw) {
  const std::vector<double> x = prepare_sample(model, x_raw);
  const std::vector<FeaturePartition> parts = model.partitions();
  const int n_classes = static_cast<int>(model.class_names.size());

  Prediction pred;
  pred.class_scores.assign(n_classes, 0.0);

  std::vector<double> firings(model.rules.size(), 0.0);
  double max_firing = 0.0;
  for (std::size_t r = 0; r < model.rules.size(); ++r) {
    const double firing =
        rule_membership(model.rules[r].conditions, parts, x, model.config.tnorm);
    firings[r] = firing;
    max_firing = std::max(max_firing, firing);
    if (firing > 0.0) pred.fired_rules.emplace_back(static_cast<int>(r), firing);
  }
  std::stable_sort(pred.fired_rules.begin(), pred.fired_rules.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  if (model.rules.empty() || max_firing < model.config.firing_threshold) {
    // Weakly fired: use the deepest sufficiently fired internal node,
    // ultimately the root distribution.
    pred.fallback_used = true;
    const std::vector<double>* chosen = &model.default_distribution;
    std::size_t chosen_depth = 0;
    for (const FallbackNode& node : model.fallback_nodes) {
      if (node.conditions.size() <= chosen_depth) continue;
      const double firing =
          rule_membership(node.conditions, parts, x, model.config.tnorm);
      if (firing >= model.config.firing_threshold) {
        chosen = &node.distribution;
        chosen_depth = node.conditions.size();
      }
    }
    pred.class_scores = *chosen;
    pred.predicted_class = argmax_lowest(pred.class_scores);
    return pred;
  }

  for (std::size_t r = 0; r < model.rules.size(); ++r) {
    const FuzzyRule& rule = model.rules[r];
    for (int c = 0; c < n_classes; ++c) {
      const double score = firings[r] * rule.confidence[c];
      if (model.aggregation == Aggregation::Max)
        pred.class_scores[c] = std::max(pred.class_scores[c], score);
      else
        pred.class_scores[c] += score;
    }
  }
  pred.predicted_class = argmax_lowest(pred.class_scores);

  // The rule whose vote produced the winning score.
  double best = -1.0;
  for (std::size_t r = 0; r < model.rules.size(); ++r) {
    const double score =
        firings[r] * model.rules[r].confidence[pred.predicted_class];
    if (score > best) {
      best = score;
      pred.winning_rule = static_cast<int>(r);
    }
  }
  return pred;
}

void write_predictions_csv(std::ostream& out, const FgrtModel& model,
                           const Matrix& X_raw) {
  char buf[40];
  out << "index,predicted_class";
  for (const std::string& name : model.class_names) out << ",score_" << name;
  out << ",winning_rule,fallback\n";
  for (std::size_t i = 0; i < X_raw.rows; ++i) {
    const Prediction pred = classify(model, X_raw.row(i));
    out << i << ',' << model.class_names[pred.predicted_class];
    for (double score : pred.class_scores) {
      std::snprintf(buf, sizeof(buf), "%.10g", score);
      out << ',' << buf;
    }
    out << ',' << pred.winning_rule << ',' << (pred.fallback_used ? 1 : 0)
        << '\n';
  }
}

std::string explain(const FgrtModel& model, std::span<const double> x_raw) {
  const Prediction pred = classify(model, x_raw);
  std::ostringstream out;
  char buf[64];
  out << "prediction: class=" << model.class_names[pred.predicted_class];
  if (pred.fallback_used) {
    out << "\n  fallback to prior: no rule fired at or above threshold ";
    std::snprintf(buf, sizeof(buf), "%g", model.config.firing_threshold);
    out << buf;
  }
  for (const auto& [rule_idx, firing] : pred.fired_rules) {
    std::snprintf(buf, sizeof(buf), "%.3f", firing);
    out << "\n  [firing=" << buf << "] "
        << render_rule(model, model.rules[rule_idx]);
  }
  out << "\n";
  return out.str();
}

}  // namespace fgrt
