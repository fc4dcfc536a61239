// Membership-function geometry and conjunction semantics. Everything here
// is immutable after construction and safe to evaluate from any thread.
#pragma once

#include <span>
#include <string>
#include <vector>

namespace fgrt {

// Trapezoidal membership function with knots a <= b <= c <= d.
// Plateau on [b, c], linear ramps on [a, b) and (c, d], zero outside.
// Degenerate ramps (a == b or c == d) act as crisp shoulders: the plateau
// branch is tested before the ramps, so the 0/0 case is never evaluated.
struct Trapezoid {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  bool valid() const { return a <= b && b <= c && c <= d; }

  double membership(double x) const {
    if (x >= b && x <= c) return 1.0;
    if (x <= a || x >= d) return 0.0;
    if (x < b) return (x - a) / (b - a);
    return (d - x) / (d - c);
  }
};

// Named fuzzy set over one feature.
struct LinguisticTerm {
  std::string label;
  Trapezoid shape;
};

// Ordered family of linguistic terms covering one feature's domain.
// Invariants (maintained by the builders in partition_builder.hpp):
//   - consecutive terms ordered: term[i].a <= term[i+1].a, term[i].d <= term[i+1].d
//   - full coverage: max membership > 0 everywhere in [domain_min, domain_max]
struct FeaturePartition {
  std::string feature_name;
  std::vector<LinguisticTerm> terms;
  double domain_min = 0.0;
  double domain_max = 0.0;
};

enum class TNorm { Product, Minimum };

const char* to_string(TNorm t);
TNorm tnorm_from_string(const std::string& name);

// Fuzzy AND of two membership degrees. Commutative, associative,
// identity 1, annihilator 0.
inline double conjoin(TNorm t, double m1, double m2) {
  return t == TNorm::Product ? m1 * m2 : (m1 < m2 ? m1 : m2);
}

// One conjunct of a rule: "feature <f> is term <t>" by index.
struct RuleCondition {
  int feature = 0;
  int term = 0;

  bool operator==(const RuleCondition&) const = default;
};

// Membership degree of a sample to a conjunctive rule: the t-norm fold of
// the per-condition memberships. An empty condition list matches everything
// (returns 1). Throws MalformedRuleError on an out-of-range feature or term
// index.
double rule_membership(std::span<const RuleCondition> conditions,
                       std::span<const FeaturePartition> partitions,
                       std::span<const double> x, TNorm tnorm);

}  // namespace fgrt
