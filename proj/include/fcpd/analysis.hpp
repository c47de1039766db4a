#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fcpd/segmentation.hpp"
#include "fcpd/shape_space.hpp"

namespace fcpd {

using Point2 = std::array<double, 2>;

struct KMeansOptions {
  int max_iterations = 300;
  /// Independent k-means++ starts; the lowest final inertia wins.
  int restarts = 10;
  /// When the points admit at most this many k-partitions, the best one is
  /// found by enumeration and used as one more start.
  std::size_t exhaustive_limit = 4096;
};

struct ClusterResult {
  std::vector<int> assignments;          // per point
  std::vector<Point2> centroids;         // per cluster
  std::vector<std::size_t> representatives;  // per cluster: point nearest the centroid
  double inertia = 0.0;                  // within-cluster sum of squares
  std::vector<double> inertia_history;   // after each Lloyd iteration of the winning start
  int iterations = 0;
  /// For kmeans_segments: segment index of each point.
  std::vector<std::size_t> segment_indices;
};

/// Lloyd iteration with k-means++ seeding. Deterministic for a fixed seed.
/// Throws InvalidConfiguration when k < 1 or there are fewer points than k.
ClusterResult kmeans(std::span<const Point2> points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Clusters segments by a pair of shape coefficients (slope and curvature by
/// default). Segments lacking either coefficient (short tails) are left out;
/// representatives are reported as segment indices.
ClusterResult kmeans_segments(std::span<const Segment> segments, int k, std::uint64_t seed,
                              std::array<int, 2> coefficients = {1, 2}, const KMeansOptions& options = {});

double within_cluster_ss(std::span<const Point2> points, std::span<const int> assignments,
                         std::span<const Point2> centroids);

struct SensitivityReport {
  double mean_upper = 0.0;  // mean of the best 3 scores
  double mean_lower = 0.0;  // mean of the worst 3 scores
  double mean_segment_count = 0.0;
  std::size_t upper_count = 0;
  std::size_t lower_count = 0;
  std::size_t series_count = 1;
};

/// Throws InvalidData for an empty score list. With fewer than 3 scores the
/// bounds average whatever exists.
SensitivityReport sensitivity_bounds(std::span<const double> scores, std::optional<std::size_t> segment_count = {});
/// Averages per-series reports. Throws InvalidData when empty.
SensitivityReport combine_sensitivity(std::span<const SensitivityReport> reports);

struct OffsetResult {
  /// Per reference point: candidate - reference, or nullopt when unmatched.
  std::vector<std::optional<std::int64_t>> offsets;
  std::vector<std::optional<std::size_t>> matched_candidate;

  bool any_match() const;
  std::optional<double> mean_absolute() const;
};

/// Order-preserving greedy matching: each reference point, in order, takes
/// the nearest still-unmatched candidate (earlier candidate on ties).
/// Throws InvalidData when either list is not sorted ascending.
OffsetResult change_point_offsets(std::span<const std::int64_t> reference, std::span<const std::int64_t> candidate);

struct CycleAnomaly {
  enum class Kind {
    AdditiveNoise,  // y += scale * u
    Replace,        // y = level + scale * u
  };
  Kind kind = Kind::AdditiveNoise;
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
  double level = 0.0;
  double scale = 1.0;
};

struct CycleOptions {
  std::size_t n = 2000;
  double period = 200.0;
  std::uint64_t seed = 0;
  std::vector<CycleAnomaly> anomalies = default_anomalies();

  /// Standard-normal noise on [500, 600]; 0.5 + u/2 replacing [1400, 1600].
  static std::vector<CycleAnomaly> default_anomalies();
};

/// sqrt(2) * sin(2 pi i / period) with the anomalies applied in order.
/// Throws InvalidConfiguration for n == 0, period <= 0 or an anomaly outside [0, n).
TimeSeries generate_cycle(const CycleOptions& options);

}  // namespace fcpd
