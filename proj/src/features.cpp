#include "fcpd/features.hpp"

#include <cmath>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

void check_delay(int delay) {
  if (delay < 1) {
    throw InvalidConfiguration("delay must be at least 1, got " + std::to_string(delay));
  }
}

FeatureValue relative_change(FeatureValue current, FeatureValue past, double epsilon) {
  if (!current || !past || std::fabs(*past) < epsilon) {
    return std::nullopt;
  }
  return (*current - *past) / *past;
}

FeatureValue coefficient_of(const Segment& s, int k) {
  if (k > s.alpha.degree()) return std::nullopt;
  return s.alpha.alpha[static_cast<std::size_t>(k)];
}

}  // namespace

std::string canonical_feature_name(std::string_view name, int delay) {
  const std::string d = std::to_string(delay);
  if (name == "average") return "alpha_0";
  if (name == "slope") return "alpha_1";
  if (name == "curvature") return "alpha_2";
  if (name == "var_average") return "var_alpha_0_" + d;
  if (name == "var_slope") return "var_alpha_1_" + d;
  if (name == "var_curvature") return "var_alpha_2_" + d;
  if (name == "var_size") return "var_size_" + d;
  return std::string(name);
}

FeatureValue FeatureRecord::get(std::string_view name) const {
  auto it = values.find(canonical_feature_name(name, delay));
  return it == values.end() ? std::nullopt : it->second;
}

bool FeatureRecord::has(std::string_view name) const {
  return values.count(canonical_feature_name(name, delay)) != 0;
}

std::vector<FeatureValue> coefficient_feature(std::span<const Segment> segments, int k, int degree) {
  if (k < 0 || k > degree) {
    throw InvalidConfiguration("coefficient index " + std::to_string(k) + " outside 0.." + std::to_string(degree));
  }
  std::vector<FeatureValue> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(coefficient_of(s, k));
  return out;
}

std::vector<FeatureValue> variation_feature(std::span<const Segment> segments, int k, int delay, double epsilon) {
  check_delay(delay);
  if (k < 0) {
    throw InvalidConfiguration("coefficient index must be non-negative");
  }
  const auto d = static_cast<std::size_t>(delay);
  std::vector<FeatureValue> out(segments.size());
  for (std::size_t t = d; t < segments.size(); ++t) {
    out[t] = relative_change(coefficient_of(segments[t], k), coefficient_of(segments[t - d], k), epsilon);
  }
  return out;
}

SizeFeatures size_features(std::span<const Segment> segments, int delay) {
  check_delay(delay);
  const auto d = static_cast<std::size_t>(delay);
  SizeFeatures out;
  out.size.reserve(segments.size());
  for (const auto& s : segments) out.size.push_back(static_cast<double>(s.length()));
  out.variation.resize(segments.size());
  for (std::size_t t = d; t < segments.size(); ++t) {
    out.variation[t] = (out.size[t] - out.size[t - d]) / out.size[t - d];
  }
  return out;
}

std::vector<FeatureRecord> build_feature_records(const Segmentation& segmentation, int degree,
                                                 const FeatureOptions& options) {
  check_delay(options.delay);
  const auto& segs = segmentation.segments;
  const std::string d = std::to_string(options.delay);
  std::vector<FeatureRecord> records(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    records[i].segment_index = segs[i].index;
    records[i].delay = options.delay;
  }
  for (int k = 0; k <= degree; ++k) {
    const auto coef = coefficient_feature(segs, k, degree);
    const auto var = variation_feature(segs, k, options.delay, options.epsilon);
    const std::string name = "alpha_" + std::to_string(k);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      records[i].values[name] = coef[i];
      records[i].values["var_" + name + "_" + d] = var[i];
    }
  }
  const auto sizes = size_features(segs, options.delay);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    records[i].values["size"] = sizes.size[i];
    records[i].values["var_size_" + d] = sizes.variation[i];
  }
  return records;
}

}  // namespace fcpd
