// Quantile-based partition construction, the interleaved increment encoding
// that makes every non-negative vector decode to a valid partition, the
// separability index, and the cyclic coordinate-descent partition optimizer.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "fgrt/fuzzy.hpp"

namespace fgrt {

// Increment representation of a k-term partition (4k entries). Adjacent
// trapezoid parameters are interleaved so that accumulating the increments
// yields the parameter sequence in non-decreasing order; for k = 3 the
// accumulated order is a1 b1 c1 a2 d1 b2 c2 a3 d2 b3 c3 d3. The first entry
// stores a1 - domain_min, so a domain-spanning partition always encodes to
// a leading zero and every entry is >= 0.
struct EncodedPartition {
  std::vector<double> increments;
  double domain_min = 0.0;
  double domain_max = 0.0;
};

// Per-term, per-class contributions to the separability index plus their
// total. `value` equals the sum of all matrix entries.
struct SeparabilityScore {
  double value = 0.0;
  std::vector<std::vector<double>> per_term_per_class;  // [term][class]
};

// Coordinate-descent schedule. Step fractions are multiples of the feature
// range, tried largest first; the search converges when a full cycle at the
// smallest fraction accepts nothing.
struct SearchConfig {
  std::vector<double> step_fractions = {0.10, 0.05, 0.02};
  int max_cycles = 10;
  int parameters_per_feature = 3;

  // Throws ConfigError unless step_fractions is strictly decreasing with
  // every entry in (0, 1) and the integer fields are positive.
  void validate() const;
};

struct PartitionOptResult {
  FeaturePartition partition;
  double si_initial = 0.0;       // separability of the raw input partition
  double si_search_start = 0.0;  // separability of the projected search start
  double si_final = 0.0;         // separability of the returned partition
  int evaluations = 0;           // separability_index calls on probes
};

// Default Low/Medium/High partition from the data quantiles Q0..Q4 at
// percentiles {0, 20, 50, 80, 100} (linear interpolation):
//   Low    (Q0, Q0, Q1, Q2)
//   Medium (Q1, (Q1+Q2)/2, (Q2+Q3)/2, Q3)
//   High   (Q2, Q3, Q4, Q4)
// `values` need not be sorted. Throws DegenerateFeatureError when all
// values are equal, ConfigError when k != 3 (only three-term partitions
// have a defined quantile layout).
FeaturePartition quantile_partition(std::span<const double> values,
                                    const std::string& feature_name,
                                    int k = 3);

// Interleaved increment encoding of a partition. Requires the accumulated
// parameter order to be non-decreasing (stricter than per-trapezoid
// validity); throws EncodingError otherwise. decode(encode(p)) == p for
// partitions whose support spans [domain_min, domain_max] exactly.
EncodedPartition encode(const FeaturePartition& partition);

// Accumulates the increments, rescales affinely so the accumulated range
// maps onto [domain_min, domain_max], and de-interleaves into trapezoids.
// Any non-negative increment vector yields a valid, ordered, covering
// partition. Throws EncodingError when the increments after the first sum
// to zero (zero-width domain) or any increment is negative.
FeaturePartition decode(const EncodedPartition& encoded,
                        const std::string& feature_name = "",
                        std::span<const std::string> term_labels = {});

// Checks per-trapezoid validity, term ordering and full-domain coverage;
// returns human-readable violations, empty when the partition is valid.
std::vector<std::string> partition_violations(const FeaturePartition& p);

// Separability index of one feature's partition against the class labels:
// the per-term, per-class squared membership mass over the per-term total
// mass. Terms with zero total activation contribute zero. Labels must be
// dense class ids in [0, n_classes).
SeparabilityScore separability_index(const FeaturePartition& partition,
                                     std::span<const double> values,
                                     std::span<const int> labels,
                                     int n_classes);

// Builds a three-term partition from its boundary controls: the end of
// Low's plateau, the start of High's plateau and Medium's plateau
// half-width. Medium's plateau centers midway between the two boundary
// controls, the dependent ramp knots keep `reference`'s relative
// proportions inside the plateau gaps, and the result is projected onto
// the valid monotone cone (knots that would fall out of order collapse
// onto their predecessor), so any control placement yields a valid
// partition.
FeaturePartition rebuild_three_term_partition(const FeaturePartition& reference,
                                              double low_plateau_end,
                                              double high_plateau_start,
                                              double medium_half_width);

// Cyclic coordinate descent over the three boundary controls above. Each
// probe is rebuilt against `initial` (its ramp proportions), so every
// probe is valid by construction. The search starts from the projection of
// `initial` into that family; only strict separability improvements are
// accepted, so the result never scores below the search start. The best
// family member replaces the default: separability totals are
// mass-weighted and only comparable between partitions of the same overlap
// structure.
PartitionOptResult optimize_partition(std::span<const double> values,
                                      std::span<const int> labels,
                                      int n_classes,
                                      const SearchConfig& config,
                                      const FeaturePartition& initial);

}  // namespace fgrt
