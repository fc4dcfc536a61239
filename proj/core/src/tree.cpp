#include "fgrt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "fgrt/errors.hpp"

namespace fgrt {

namespace {
constexpr double kPurityLimit = 1.0 - 1e-6;
}

const char* to_string(Aggregation a) {
  return a == Aggregation::Max ? "max" : "additive";
}

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "max") return Aggregation::Max;
  if (name == "additive") return Aggregation::Additive;
  throw ConfigError("unknown aggregation '" + name +
                    "' (expected max|additive)");
}

void TreeConfig::validate() const {
  if (max_rules < 1) throw ConfigError("max_rules must be >= 1");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (min_gain_theta < 0.0) throw ConfigError("min_gain_theta must be >= 0");
  if (coverage_threshold < 0.0 || coverage_threshold > 1.0)
    throw ConfigError("coverage_threshold must lie in [0, 1]");
  if (firing_threshold < 0.0 || firing_threshold > 1.0)
    throw ConfigError("firing_threshold must lie in [0, 1]");
}

std::vector<FeaturePartition> FgrtModel::partitions() const {
  std::vector<FeaturePartition> out;
  out.reserve(features.size());
  for (const FeatureSpec& f : features) out.push_back(f.partition);
  return out;
}

std::optional<double> fuzzy_gini(std::span<const double> memberships,
                                 std::span<const int> labels, int n_classes) {
  if (memberships.size() != labels.size())
    throw ConfigError("fuzzy_gini: memberships and labels differ in length");
  std::vector<double> mass(n_classes, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < memberships.size(); ++i) {
    mass[labels[i]] += memberships[i];
    total += memberships[i];
  }
  if (total <= 0.0) return std::nullopt;
  double sum_sq = 0.0;
  for (double m : mass) {
    const double p = m / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double impurity_gain(std::span<const double> parent_memberships,
                     std::span<const double> child_memberships,
                     std::span<const int> labels, int n_classes) {
  const auto parent = fuzzy_gini(parent_memberships, labels, n_classes);
  const auto child = fuzzy_gini(child_memberships, labels, n_classes);
  if (!child) return -std::numeric_limits<double>::infinity();
  if (!parent)
    throw ConfigError("impurity_gain: parent node has zero membership");
  return *parent - *child;
}

namespace {

struct Node {
  std::vector<RuleCondition> conditions;
  std::vector<double> mu;
  double mu_sum = 0.0;
  std::vector<double> distribution;
  double gini = 0.0;
  int depth = 0;
  bool expandable = false;
  bool has_children = false;
};

struct Candidate {
  double priority;  // mass-weighted gain of the best term, the order key
  double gain;      // raw impurity gain of the best term, gated by theta
  int node;
  int feature;
  int term;  // best term, for tie-breaking
  int depth;
};

// Max-heap order: higher priority first; ties prefer lower feature, lower
// term, deeper node (re-evaluating an existing child beats opening a new
// condition at its parent), then creation order. Priority weights the gain
// by the child's share of the root membership mass, as classical trees
// weight impurity decrease; otherwise high-purity slivers monopolize the
// rule budget.
struct CandidateWorse {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.feature != b.feature) return a.feature > b.feature;
    if (a.term != b.term) return a.term > b.term;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.node > b.node;
  }
};

bool feature_on_path(const Node& node, int feature) {
  for (const RuleCondition& c : node.conditions)
    if (c.feature == feature) return true;
  return false;
}

}  // namespace

FgrtModel grow_tree(const Matrix& X, std::span<const int> y,
                    const std::vector<FeaturePartition>& partitions,
                    const TreeConfig& config, int n_classes,
                    GrowDiagnostics* diagnostics) {
  config.validate();
  if (X.rows == 0 || y.empty()) throw DataError("grow_tree: empty dataset");
  if (X.rows != y.size())
    throw DataError("grow_tree: feature matrix and labels differ in length");
  if (partitions.empty())
    throw DataError("grow_tree: no usable features (all degenerate)");
  if (partitions.size() != X.cols)
    throw DataError("grow_tree: partition count does not match feature count");
  if (n_classes < 1) throw ConfigError("grow_tree: need at least one class");
  for (int label : y)
    if (label < 0 || label >= n_classes)
      throw DataError("grow_tree: label outside [0, n_classes)");

  const std::size_t n = X.rows;
  const int m = static_cast<int>(partitions.size());

  // Per-(feature, term) membership columns, computed once.
  std::vector<std::vector<std::vector<double>>> term_mu(m);
  for (int f = 0; f < m; ++f) {
    const auto& terms = partitions[f].terms;
    term_mu[f].resize(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
      term_mu[f][t].resize(n);
      for (std::size_t i = 0; i < n; ++i)
        term_mu[f][t][i] = terms[t].shape.membership(X.at(i, f));
    }
  }

  std::vector<Node> nodes;
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateWorse> heap;
  // Condition sets of all created nodes. Distinct paths can assemble the
  // same conjunction in a different order; a second copy would waste rule
  // budget on a region that is already covered.
  std::set<std::vector<std::pair<int, int>>> existing_rules;

  auto canonical_conditions = [](const std::vector<RuleCondition>& conditions) {
    std::vector<std::pair<int, int>> key;
    key.reserve(conditions.size());
    for (const RuleCondition& c : conditions) key.emplace_back(c.feature, c.term);
    std::sort(key.begin(), key.end());
    return key;
  };

  auto node_stats = [&](const std::vector<double>& mu, Node& node) {
    std::vector<double> mass(n_classes, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mass[y[i]] += mu[i];
      total += mu[i];
    }
    node.mu_sum = total;
    node.distribution.assign(n_classes, 0.0);
    double sum_sq = 0.0;
    if (total > 0.0) {
      for (int c = 0; c < n_classes; ++c) {
        node.distribution[c] = mass[c] / total;
        sum_sq += node.distribution[c] * node.distribution[c];
      }
    }
    node.gini = 1.0 - sum_sq;
  };

  double root_mass = 0.0;

  // One candidate per (node, feature): the split is scored by its best
  // term, and applying it spawns a child per live term of that feature.
  auto push_candidates = [&](int node_id) {
    const Node& node = nodes[node_id];
    for (int f = 0; f < m; ++f) {
      if (feature_on_path(node, f)) continue;
      double best_priority = 0.0, best_gain = 0.0;
      int best_term = -1;
      for (std::size_t t = 0; t < term_mu[f].size(); ++t) {
        const std::vector<double>& col = term_mu[f][t];
        std::vector<double> mass(n_classes, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double mu = conjoin(config.tnorm, node.mu[i], col[i]);
          mass[y[i]] += mu;
          total += mu;
        }
        if (total <= 0.0) continue;  // dead child, skipped silently
        double sum_sq = 0.0;
        for (int c = 0; c < n_classes; ++c) {
          const double p = mass[c] / total;
          sum_sq += p * p;
        }
        const double gain = node.gini - (1.0 - sum_sq);
        const double priority = gain * total / root_mass;
        if (gain > config.min_gain_theta &&
            (best_term < 0 || priority > best_priority)) {
          best_priority = priority;
          best_gain = gain;
          best_term = static_cast<int>(t);
        }
      }
      if (best_term >= 0)
        heap.push({best_priority, best_gain, node_id, f, best_term, node.depth});
    }
  };

  auto make_expandable = [&](Node& node) {
    if (node.depth >= config.max_depth) return false;
    if (node.mu_sum / root_mass < config.coverage_threshold) return false;
    const double purity =
        *std::max_element(node.distribution.begin(), node.distribution.end());
    return purity < kPurityLimit;
  };

  // Root: empty rule, membership 1 everywhere.
  {
    Node root;
    root.mu.assign(n, 1.0);
    node_stats(root.mu, root);
    root_mass = root.mu_sum;
    root.expandable = make_expandable(root);
    nodes.push_back(std::move(root));
    if (nodes[0].expandable) push_candidates(0);
  }

  int leaf_count = 0;  // childless non-root nodes
  int expansions = 0;

  while (leaf_count < config.max_rules && !heap.empty()) {
    const Candidate best = heap.top();
    heap.pop();
    if (nodes[best.node].has_children) continue;  // already split

    // Materialize the live children of the multi-way split up front so the
    // rule budget can be checked before committing.
    std::vector<Node> children;
    for (std::size_t t = 0; t < term_mu[best.feature].size(); ++t) {
      const std::vector<double>& col = term_mu[best.feature][t];
      Node child;
      child.conditions = nodes[best.node].conditions;
      child.conditions.push_back({best.feature, static_cast<int>(t)});
      child.mu.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        child.mu[i] = conjoin(config.tnorm, nodes[best.node].mu[i], col[i]);
      node_stats(child.mu, child);
      if (child.mu_sum <= 0.0) continue;  // dead term, skipped silently
      if (existing_rules.count(canonical_conditions(child.conditions)))
        continue;  // same conjunction already reached along another path
      child.depth = nodes[best.node].depth + 1;
      child.expandable = make_expandable(child);
      children.push_back(std::move(child));
    }
    if (children.empty()) continue;

    // A split turns a non-root leaf into an internal node, freeing one slot.
    const int freed = best.node != 0 ? 1 : 0;
    if (leaf_count - freed + static_cast<int>(children.size()) >
        config.max_rules)
      continue;  // split does not fit the rule budget; try the next-best

    leaf_count += static_cast<int>(children.size()) - freed;
    nodes[best.node].has_children = true;
    for (Node& child : children) {
      existing_rules.insert(canonical_conditions(child.conditions));
      const int child_id = static_cast<int>(nodes.size());
      nodes.push_back(std::move(child));
      if (nodes[child_id].expandable) push_candidates(child_id);
    }
    ++expansions;
  }

  FgrtModel model;
  model.config = config;
  model.original_arity = m;
  model.default_distribution = nodes[0].distribution;
  model.class_names.reserve(n_classes);
  for (int c = 0; c < n_classes; ++c)
    model.class_names.push_back(std::to_string(c));
  model.features.reserve(partitions.size());
  for (int f = 0; f < m; ++f)
    model.features.push_back(
        {partitions[f].feature_name, f, 0.0, 1.0, partitions[f]});

  for (std::size_t id = 1; id < nodes.size(); ++id) {
    const Node& node = nodes[id];
    if (node.has_children) {
      model.fallback_nodes.push_back({node.conditions, node.distribution});
      continue;
    }
    FuzzyRule rule;
    rule.conditions = node.conditions;
    rule.confidence = node.distribution;
    rule.support = node.mu_sum;
    rule.predicted_class = static_cast<int>(
        std::max_element(node.distribution.begin(), node.distribution.end()) -
        node.distribution.begin());
    model.rules.push_back(std::move(rule));
    if (diagnostics) diagnostics->rule_memberships.push_back(node.mu);
  }
  if (diagnostics) diagnostics->expansions = expansions;
  return model;
}

std::string pretty_rulebase(const FgrtModel& model) {
  std::ostringstream out;
  char buf[64];
  if (model.rules.empty()) {
    const int c = static_cast<int>(
        std::max_element(model.default_distribution.begin(),
                         model.default_distribution.end()) -
        model.default_distribution.begin());
    out << "(empty rulebase; default class=" << model.class_names[c] << ")\n";
    return out.str();
  }
  for (const FuzzyRule& rule : model.rules) {
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
    out << ", support=" << buf << ")\n";
  }
  return out.str();
}

}  // namespace fgrt
