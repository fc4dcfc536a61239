// Greedy fuzzy rule-tree induction: membership-weighted Gini impurity,
// impurity gain, best-first expansion under a global rule budget, and
// extraction of the flat rulebase.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgrt/fuzzy.hpp"

namespace fgrt {

enum class Aggregation { Max, Additive };

const char* to_string(Aggregation a);
Aggregation aggregation_from_string(const std::string& name);

struct TreeConfig {
  int max_rules = 15;
  int max_depth = 5;
  double min_gain_theta = 0.01;
  double coverage_threshold = 0.05;
  double firing_threshold = 0.05;
  TNorm tnorm = TNorm::Product;

  void validate() const;  // throws ConfigError
};

// Row-major dense matrix, the only shape the induction loop needs.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

// One extracted rule: a conjunction of conditions plus the leaf's
// membership-weighted class profile.
struct FuzzyRule {
  std::vector<RuleCondition> conditions;
  int predicted_class = 0;
  std::vector<double> confidence;  // sums to 1
  double support = 0.0;            // total training membership at the leaf
};

// Internal node retained for inference fallback: when no rule fires above
// the firing threshold, prediction falls back to the deepest of these whose
// conditions still fire.
struct FallbackNode {
  std::vector<RuleCondition> conditions;
  std::vector<double> distribution;
};

struct FeatureSpec {
  std::string name;
  int source_index = 0;  // column in the raw (pre-drop) feature block
  double mean = 0.0;
  double stddev = 1.0;
  FeaturePartition partition;
};

struct DroppedFeature {
  std::string name;
  int source_index = 0;
  std::string reason;
};

struct ModelMetadata {
  std::string dataset;
  std::uint64_t seed = 0;
};

// Trained artifact. Immutable once built; safe to share across threads.
struct FgrtModel {
  int format_version = 1;
  TreeConfig config;
  Aggregation aggregation = Aggregation::Max;
  std::vector<FeatureSpec> features;  // retained features, rule indices refer here
  std::vector<DroppedFeature> dropped_features;
  int original_arity = 0;  // feature count classify() expects in raw input
  std::vector<std::string> class_names;
  std::vector<double> default_distribution;  // root class distribution
  std::vector<FuzzyRule> rules;              // leaves, in creation order
  std::vector<FallbackNode> fallback_nodes;  // internal nodes, in creation order

  ModelMetadata metadata;

  std::vector<FeaturePartition> partitions() const;
};

// Membership-weighted Gini impurity. Returns nullopt when the total
// membership is zero (dead node).
std::optional<double> fuzzy_gini(std::span<const double> memberships,
                                 std::span<const int> labels, int n_classes);

// Impurity reduction from conjoining one condition: Gini(parent) minus
// Gini(child). A dead child yields -infinity so it is never selected.
double impurity_gain(std::span<const double> parent_memberships,
                     std::span<const double> child_memberships,
                     std::span<const int> labels, int n_classes);

// Per-rule training diagnostics, filled on request by grow_tree.
struct GrowDiagnostics {
  std::vector<std::vector<double>> rule_memberships;  // [rule][sample]
  int expansions = 0;
};

// Best-first induction with multi-way splits. Each iteration picks the
// (node, feature) pair whose best term maximizes the mass-weighted impurity
// gain, requires that gain to exceed min_gain_theta, and splits the node
// into one child per live linguistic term of the selected feature; splits
// that would push the leaf count past max_rules are passed over. Growth
// stops at the depth limit, the gain threshold or an exhausted budget.
// Deterministic: priority ties break on lower feature index, then lower
// term index, then the deeper node, then creation order.
FgrtModel grow_tree(const Matrix& X, std::span<const int> y,
                    const std::vector<FeaturePartition>& partitions,
                    const TreeConfig& config, int n_classes,
                    GrowDiagnostics* diagnostics = nullptr);

// One rule per line: IF f IS Term AND ... THEN class=<name> (confidence, support).
std::string pretty_rulebase(const FgrtModel& model);

}  // namespace fgrt
