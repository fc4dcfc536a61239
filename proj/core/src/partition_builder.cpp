#include "fgrt/partition_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "fgrt/errors.hpp"

namespace fgrt {
namespace {

constexpr int kTermsPerFeature = 3;
const char* kDefaultLabels[kTermsPerFeature] = {"Low", "Medium", "High"};

// Linear-interpolation quantile (R-7) on a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double pct) {
  const double h = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return std::lerp(sorted[lo], sorted[hi], h - static_cast<double>(lo));
}

// Knots of a k-term partition in the interleaved (non-decreasing) order:
// a1 b1 c1, then for each later term j: a_j d_{j-1} b_j c_j, finally d_k.
std::vector<double> interleaved_knots(const FeaturePartition& p) {
  std::vector<double> v;
  v.reserve(4 * p.terms.size());
  v.push_back(p.terms[0].shape.a);
  v.push_back(p.terms[0].shape.b);
  v.push_back(p.terms[0].shape.c);
  for (std::size_t j = 1; j < p.terms.size(); ++j) {
    v.push_back(p.terms[j].shape.a);
    v.push_back(p.terms[j - 1].shape.d);
    v.push_back(p.terms[j].shape.b);
    v.push_back(p.terms[j].shape.c);
  }
  v.push_back(p.terms.back().shape.d);
  return v;
}

FeaturePartition from_interleaved(const std::vector<double>& v,
                                  const std::string& feature_name,
                                  std::span<const std::string> labels,
                                  double domain_min, double domain_max) {
  const std::size_t k = v.size() / 4;
  FeaturePartition p;
  p.feature_name = feature_name;
  p.domain_min = domain_min;
  p.domain_max = domain_max;
  p.terms.resize(k);
  p.terms[0].shape.a = v[0];
  p.terms[0].shape.b = v[1];
  p.terms[0].shape.c = v[2];
  for (std::size_t j = 1; j < k; ++j) {
    const std::size_t base = 3 + 4 * (j - 1);
    p.terms[j].shape.a = v[base];
    p.terms[j - 1].shape.d = v[base + 1];
    p.terms[j].shape.b = v[base + 2];
    p.terms[j].shape.c = v[base + 3];
  }
  p.terms[k - 1].shape.d = v[4 * k - 1];
  for (std::size_t j = 0; j < k; ++j) {
    if (j < labels.size()) {
      p.terms[j].label = labels[j];
    } else if (k == kTermsPerFeature) {
      p.terms[j].label = kDefaultLabels[j];
    } else {
      p.terms[j].label = "T" + std::to_string(j);
    }
  }
  return p;
}

double max_membership(const FeaturePartition& p, double x) {
  double best = 0.0;
  for (const LinguisticTerm& t : p.terms)
    best = std::max(best, t.shape.membership(x));
  return best;
}

}  // namespace

void SearchConfig::validate() const {
  if (step_fractions.empty())
    throw ConfigError("step_fractions must be non-empty");
  for (std::size_t i = 0; i < step_fractions.size(); ++i) {
    const double s = step_fractions[i];
    if (s <= 0.0 || s >= 1.0)
      throw ConfigError("step fractions must lie in (0, 1)");
    if (i > 0 && s >= step_fractions[i - 1])
      throw ConfigError("step fractions must be strictly decreasing");
  }
  if (max_cycles < 1) throw ConfigError("max_cycles must be >= 1");
  if (parameters_per_feature < 1 || parameters_per_feature > 3)
    throw ConfigError("parameters_per_feature must be in [1, 3]");
}

FeaturePartition quantile_partition(std::span<const double> values,
                                    const std::string& feature_name, int k) {
  if (k != kTermsPerFeature)
    throw ConfigError("quantile_partition supports exactly 3 terms, got " +
                      std::to_string(k));
  if (values.size() < 2)
    throw DegenerateFeatureError("feature '" + feature_name +
                                 "' has fewer than 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw DegenerateFeatureError("feature '" + feature_name +
                                 "' is constant (all values equal)");

  double q[5];
  q[0] = quantile_sorted(sorted, 0.0);
  q[1] = quantile_sorted(sorted, 20.0);
  q[2] = quantile_sorted(sorted, 50.0);
  q[3] = quantile_sorted(sorted, 80.0);
  q[4] = quantile_sorted(sorted, 100.0);

  FeaturePartition p;
  p.feature_name = feature_name;
  p.domain_min = q[0];
  p.domain_max = q[4];
  p.terms = {
      {kDefaultLabels[0], {q[0], q[0], q[1], q[2]}},
      {kDefaultLabels[1],
       {q[1], (q[1] + q[2]) / 2.0, (q[2] + q[3]) / 2.0, q[3]}},
      {kDefaultLabels[2], {q[2], q[3], q[4], q[4]}},
  };
  return p;
}

EncodedPartition encode(const FeaturePartition& partition) {
  if (partition.terms.empty())
    throw EncodingError("cannot encode an empty partition");
  const std::vector<double> knots = interleaved_knots(partition);

  EncodedPartition e;
  e.domain_min = partition.domain_min;
  e.domain_max = partition.domain_max;
  e.increments.resize(knots.size());
  e.increments[0] = knots[0] - partition.domain_min;
  if (e.increments[0] < 0.0)
    throw EncodingError("partition support starts below domain_min");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double diff = knots[i] - knots[i - 1];
    if (diff < 0.0) {
      std::ostringstream msg;
      msg << "partition violates the interleaved ordering at position " << i
          << " (" << knots[i] << " < " << knots[i - 1] << ")";
      throw EncodingError(msg.str());
    }
    e.increments[i] = diff;
  }
  return e;
}

FeaturePartition decode(const EncodedPartition& encoded,
                        const std::string& feature_name,
                        std::span<const std::string> term_labels) {
  const std::size_t n = encoded.increments.size();
  if (n < 4 || n % 4 != 0)
    throw EncodingError("increment vector size must be a positive multiple of 4");
  for (double inc : encoded.increments)
    if (inc < 0.0 || !std::isfinite(inc))
      throw EncodingError("increments must be finite and non-negative");

  std::vector<double> acc(n);
  acc[0] = encoded.increments[0];
  for (std::size_t i = 1; i < n; ++i) acc[i] = acc[i - 1] + encoded.increments[i];
  const double span = acc.back() - acc.front();
  if (span <= 0.0)
    throw EncodingError("degenerate encoding: increments sum to zero width");

  const double scale = (encoded.domain_max - encoded.domain_min) / span;
  std::vector<double> knots(n);
  for (std::size_t i = 0; i < n; ++i)
    knots[i] = encoded.domain_min + (acc[i] - acc.front()) * scale;
  knots[0] = encoded.domain_min;
  knots[n - 1] = encoded.domain_max;  // pin exactly, the rescale rounds

  // Flatten the outer shoulders so the domain edges always sit on the first
  // and last plateau; inner knots keep the literal rescaled positions.
  knots[1] = knots[0];
  knots[n - 2] = knots[n - 1];

  return from_interleaved(knots, feature_name, term_labels,
                          encoded.domain_min, encoded.domain_max);
}

std::vector<std::string> partition_violations(const FeaturePartition& p) {
  std::vector<std::string> out;
  if (p.terms.empty()) {
    out.push_back("partition has no terms");
    return out;
  }
  if (!(p.domain_min < p.domain_max))
    out.push_back("domain_min must be strictly below domain_max");

  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const LinguisticTerm& t = p.terms[i];
    if (t.label.empty())
      out.push_back("term " + std::to_string(i) + " has an empty label");
    for (std::size_t j = i + 1; j < p.terms.size(); ++j)
      if (p.terms[j].label == t.label)
        out.push_back("duplicate term label '" + t.label + "'");
    if (!t.shape.valid()) {
      std::ostringstream msg;
      msg << "term '" << t.label << "' violates a <= b <= c <= d: (" << t.shape.a
          << ", " << t.shape.b << ", " << t.shape.c << ", " << t.shape.d << ")";
      out.push_back(msg.str());
    }
    if (i + 1 < p.terms.size()) {
      const Trapezoid& next = p.terms[i + 1].shape;
      if (t.shape.a > next.a || t.shape.d > next.d)
        out.push_back("terms '" + t.label + "' and '" + p.terms[i + 1].label +
                      "' are out of order");
    }
  }

  // Coverage. Memberships are piecewise linear with breakpoints only at the
  // trapezoid knots, so checking every in-domain knot plus the midpoints of
  // consecutive knots is exact.
  std::vector<double> points{p.domain_min, p.domain_max};
  for (const LinguisticTerm& t : p.terms)
    for (double v : {t.shape.a, t.shape.b, t.shape.c, t.shape.d})
      if (v >= p.domain_min && v <= p.domain_max) points.push_back(v);
  std::sort(points.begin(), points.end());
  const std::size_t n_knots = points.size();
  for (std::size_t i = 0; i + 1 < n_knots; ++i)
    points.push_back((points[i] + points[i + 1]) / 2.0);
  for (double x : points) {
    if (max_membership(p, x) <= 0.0) {
      std::ostringstream msg;
      msg << "coverage hole at x = " << x;
      out.push_back(msg.str());
      break;
    }
  }
  return out;
}

SeparabilityScore separability_index(const FeaturePartition& partition,
                                     std::span<const double> values,
                                     std::span<const int> labels,
                                     int n_classes) {
  if (values.size() != labels.size() || values.empty())
    throw ConfigError("separability_index: values and labels must be "
                      "non-empty and of equal length");
  const std::size_t v_count = partition.terms.size();

  std::vector<double> totals(v_count, 0.0);
  std::vector<std::vector<double>> mass(v_count,
                                        std::vector<double>(n_classes, 0.0));
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t v = 0; v < v_count; ++v) {
      const double mu = partition.terms[v].shape.membership(values[i]);
      totals[v] += mu;
      mass[v][labels[i]] += mu;
    }
  }

  SeparabilityScore score;
  score.per_term_per_class.assign(v_count, std::vector<double>(n_classes, 0.0));
  for (std::size_t v = 0; v < v_count; ++v) {
    if (totals[v] <= 0.0) continue;  // empty term contributes nothing
    for (int c = 0; c < n_classes; ++c) {
      const double contrib = mass[v][c] * mass[v][c] / totals[v];
      score.per_term_per_class[v][c] = contrib;
      score.value += contrib;
    }
  }
  return score;
}

FeaturePartition rebuild_three_term_partition(const FeaturePartition& reference,
                                              double low_plateau_end,
                                              double high_plateau_start,
                                              double medium_half_width) {
  if (reference.terms.size() != kTermsPerFeature)
    throw ConfigError("rebuild_three_term_partition requires a three-term partition");
  // Proportions come from the monotone projection of the reference, not the
  // raw knots: quantile defaults overshoot the interleaved chain, and raw
  // overshoot proportions would collapse every rebuilt ramp to zero width.
  std::vector<double> ref = interleaved_knots(reference);
  {
    double running = ref.front();
    for (double& knot : ref) {
      running = std::max(knot, running);
      knot = running;
    }
  }
  // Interleaved index map: 0:a1 1:b1 2:c1 3:a2 4:d1 5:b2 6:c2 7:a3 8:d2
  // 9:b3 10:c3 11:d3
  auto ratio = [](double num, double den) { return den != 0.0 ? num / den : 0.0; };
  const double prop_a2 = ratio(ref[3] - ref[2], ref[5] - ref[2]);
  const double prop_d1 = ratio(ref[4] - ref[2], ref[5] - ref[2]);
  const double prop_a3 = ratio(ref[7] - ref[6], ref[9] - ref[6]);
  const double prop_d2 = ratio(ref[8] - ref[6], ref[9] - ref[6]);
  const double half_width = std::max(0.0, medium_half_width);
  const double center = (low_plateau_end + high_plateau_start) / 2.0;

  std::vector<double> knots(12);
  knots[0] = reference.domain_min;
  knots[1] = ref[1];
  knots[2] = low_plateau_end;
  knots[5] = center - half_width;
  knots[6] = center + half_width;
  knots[3] = low_plateau_end + prop_a2 * (knots[5] - low_plateau_end);
  knots[4] = low_plateau_end + prop_d1 * (knots[5] - low_plateau_end);
  knots[9] = high_plateau_start;
  knots[7] = knots[6] + prop_a3 * (high_plateau_start - knots[6]);
  knots[8] = knots[6] + prop_d2 * (high_plateau_start - knots[6]);
  knots[10] = ref[10];
  knots[11] = reference.domain_max;

  // Project onto the valid monotone cone: negative increments collapse to
  // zero width while untouched knots keep their absolute positions, so a
  // probe stays local to the moved control.
  double running = reference.domain_min;
  for (double& knot : knots) {
    running = std::clamp(std::max(knot, running), reference.domain_min,
                         reference.domain_max);
    knot = running;
  }
  knots[11] = reference.domain_max;
  knots[10] = knots[11];  // flat outer shoulders, as decode produces
  knots[1] = knots[0];

  std::vector<std::string> labels;
  labels.reserve(reference.terms.size());
  for (const LinguisticTerm& t : reference.terms) labels.push_back(t.label);
  return from_interleaved(knots, reference.feature_name, labels,
                          reference.domain_min, reference.domain_max);
}

namespace {

struct BoundaryControls {
  double low_end;      // c1
  double high_start;   // b3
  double half_width;   // (c2 - b2) / 2
};

BoundaryControls extract_controls(const FeaturePartition& p) {
  return {p.terms[0].shape.c, p.terms[2].shape.b,
          (p.terms[1].shape.c - p.terms[1].shape.b) / 2.0};
}

}  // namespace

PartitionOptResult optimize_partition(std::span<const double> values,
                                      std::span<const int> labels,
                                      int n_classes, const SearchConfig& config,
                                      const FeaturePartition& initial) {
  config.validate();
  if (initial.terms.size() != kTermsPerFeature)
    throw ConfigError("optimize_partition requires a three-term partition");

  const double range = initial.domain_max - initial.domain_min;

  PartitionOptResult result;
  result.si_initial =
      separability_index(initial, values, labels, n_classes).value;

  // The search walks the rebuilt family, whose members are valid by
  // construction, starting from the projection of `initial`. Separability
  // totals are only comparable within that family (overlapping defaults
  // carry more membership mass), so acceptance is anchored to the projected
  // start and the family's best member replaces the default.
  BoundaryControls controls = extract_controls(initial);
  FeaturePartition best = rebuild_three_term_partition(
      initial, controls.low_end, controls.high_start, controls.half_width);
  double best_si = separability_index(best, values, labels, n_classes).value;
  result.si_search_start = best_si;

  for (double fraction : config.step_fractions) {
    const double step = fraction * range;
    for (int cycle = 0; cycle < config.max_cycles; ++cycle) {
      bool improved = false;
      for (int param = 0; param < config.parameters_per_feature; ++param) {
        for (double direction : {+1.0, -1.0}) {
          BoundaryControls moved = controls;
          if (param == 0) moved.low_end += direction * step;
          else if (param == 1) moved.high_start += direction * step;
          else moved.half_width += direction * step;
          FeaturePartition candidate = rebuild_three_term_partition(
              initial, moved.low_end, moved.high_start, moved.half_width);
          const double si =
              separability_index(candidate, values, labels, n_classes).value;
          ++result.evaluations;
          if (si > best_si) {
            best = std::move(candidate);
            best_si = si;
            controls = extract_controls(best);
            improved = true;
            break;
          }
        }
      }
      if (!improved) break;
    }
  }

  result.partition = std::move(best);
  result.si_final = best_si;
  return result;
}

}  // namespace fgrt
