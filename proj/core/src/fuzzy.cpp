#include "fgrt/fuzzy.hpp"

#include <cstddef>

#include "fgrt/errors.hpp"

namespace fgrt {

const char* to_string(TNorm t) {
  return t == TNorm::Product ? "product" : "minimum";
}

TNorm tnorm_from_string(const std::string& name) {
  if (name == "product") return TNorm::Product;
  if (name == "minimum") return TNorm::Minimum;
  throw ConfigError("unknown t-norm '" + name + "' (expected product|minimum)");
}

double rule_membership(std::span<const RuleCondition> conditions,
                       std::span<const FeaturePartition> partitions,
                       std::span<const double> x, TNorm tnorm) {
  double mu = 1.0;
  for (const RuleCondition& cond : conditions) {
    if (cond.feature < 0 ||
        static_cast<std::size_t>(cond.feature) >= partitions.size()) {
      throw MalformedRuleError("rule condition references feature index " +
                               std::to_string(cond.feature) + " of " +
                               std::to_string(partitions.size()));
    }
    const FeaturePartition& part = partitions[cond.feature];
    if (cond.term < 0 ||
        static_cast<std::size_t>(cond.term) >= part.terms.size()) {
      throw MalformedRuleError("rule condition references term index " +
                               std::to_string(cond.term) + " of " +
                               std::to_string(part.terms.size()) +
                               " on feature '" + part.feature_name + "'");
    }
    mu = conjoin(tnorm, mu,
                 part.terms[cond.term].shape.membership(x[cond.feature]));
  }
  return mu;
}

}  // namespace fgrt
