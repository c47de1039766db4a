#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcpd/segmentation.hpp"

namespace fcpd {

/// Absent value: undefined variation or a coefficient a short tail lacks.
using FeatureValue = std::optional<double>;

struct FeatureOptions {
  int delay = 1;
  double epsilon = 1e-9;
};

/// Query inputs describing one segment. Canonical names are `alpha_k`,
/// `var_alpha_k_d`, `size` and `var_size_d`; lookups also accept the aliases
/// average, slope, curvature, var_average, var_slope, var_curvature and
/// var_size, which resolve against the record's delay.
struct FeatureRecord {
  std::size_t segment_index = 0;
  int delay = 1;
  std::map<std::string, FeatureValue> values;

  /// nullopt both for unknown names and for MISSING values.
  FeatureValue get(std::string_view name) const;
  bool has(std::string_view name) const;
};

/// Maps a feature alias to its canonical name for the given delay.
std::string canonical_feature_name(std::string_view name, int delay);

/// alpha_k of every segment. Throws InvalidConfiguration when k is outside
/// 0..degree.
std::vector<FeatureValue> coefficient_feature(std::span<const Segment> segments, int k, int degree);

/// (alpha_k[t] - alpha_k[t-d]) / alpha_k[t-d], attached to segment t.
/// MISSING for t < d and when |alpha_k[t-d]| < epsilon.
std::vector<FeatureValue> variation_feature(std::span<const Segment> segments, int k, int delay = 1,
                                            double epsilon = 1e-9);

struct SizeFeatures {
  std::vector<double> size;
  std::vector<FeatureValue> variation;
};

SizeFeatures size_features(std::span<const Segment> segments, int delay = 1);

std::vector<FeatureRecord> build_feature_records(const Segmentation& segmentation, int degree,
                                                 const FeatureOptions& options = {});

}  // namespace fcpd
