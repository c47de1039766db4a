#include "fcpd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

std::vector<Point2> seed_plus_plus(std::span<const Point2> points, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> centers;
  centers.reserve(static_cast<std::size_t>(k));
  const auto first = static_cast<std::size_t>(unit(rng) * static_cast<double>(points.size()));
  centers.push_back(points[std::min(first, points.size() - 1)]);

  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = sq_dist(points[i], centers[0]);
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = points.size() - 1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        if (target < d2[i]) {
          pick = i;
          break;
        }
        target -= d2[i];
      }
    } else {
      pick = std::min(static_cast<std::size_t>(unit(rng) * static_cast<double>(points.size())), points.size() - 1);
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], sq_dist(points[i], centers.back()));
  }
  return centers;
}

ClusterResult lloyd(std::span<const Point2> points, std::vector<Point2> centroids, int max_iterations) {
  const std::size_t k = centroids.size();
  ClusterResult r;
  r.assignments.assign(points.size(), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = sq_dist(points[i], centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (r.assignments[i] != best) {
        r.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<Point2> sums(k, Point2{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(r.assignments[i]);
      sums[c][0] += points[i][0];
      sums[c][1] += points[i][1];
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids[c] = {sums[c][0] / static_cast<double>(counts[c]), sums[c][1] / static_cast<double>(counts[c])};
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // Empty cluster: move it onto the point worst served by its centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = sq_dist(points[i], centroids[static_cast<std::size_t>(r.assignments[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids[c] = points[far];
    }
    r.iterations = iter + 1;
    r.inertia_history.push_back(within_cluster_ss(points, r.assignments, centroids));
  }
  r.centroids = std::move(centroids);
  r.inertia = within_cluster_ss(points, r.assignments, r.centroids);
  return r;
}

// Stirling number of the second kind, saturating at cap + 1.
std::size_t partition_count(std::size_t n, std::size_t k, std::size_t cap) {
  std::vector<std::size_t> row(k + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = std::min(i, k); j >= 1; --j) {
      const long double v = static_cast<long double>(j) * row[j] + row[j - 1];
      row[j] = v > static_cast<long double>(cap) ? cap + 1 : static_cast<std::size_t>(v);
    }
    row[0] = 0;
  }
  return row[k];
}

// Centroids of the minimum-WCSS partition into exactly k non-empty groups.
std::vector<Point2> best_partition_centroids(std::span<const Point2> points, std::size_t k) {
  const std::size_t n = points.size();
  std::vector<std::size_t> label(n, 0);
  std::vector<Point2> best;
  double best_ss = std::numeric_limits<double>::infinity();
  std::vector<Point2> sums(k);
  std::vector<double> sq(k);
  std::vector<std::size_t> counts(k);
  // Restricted growth strings enumerate each partition once.
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t used) {
    if (n - i < k - used) return;
    if (i == n) {
      std::fill(sums.begin(), sums.end(), Point2{0.0, 0.0});
      std::fill(sq.begin(), sq.end(), 0.0);
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t p = 0; p < n; ++p) {
        sums[label[p]][0] += points[p][0];
        sums[label[p]][1] += points[p][1];
        ++counts[label[p]];
      }
      std::vector<Point2> centroids(k);
      for (std::size_t c = 0; c < k; ++c) {
        const auto m = static_cast<double>(counts[c]);
        centroids[c] = {sums[c][0] / m, sums[c][1] / m};
      }
      double ss = 0.0;
      for (std::size_t p = 0; p < n; ++p) ss += sq_dist(points[p], centroids[label[p]]);
      if (ss < best_ss) {
        best_ss = ss;
        best = std::move(centroids);
      }
      return;
    }
    for (std::size_t c = 0; c <= std::min(used, k - 1); ++c) {
      label[i] = c;
      walk(i + 1, std::max(used, c + 1));
    }
  };
  walk(0, 0);
  return best;
}

void fill_representatives(std::span<const Point2> points, ClusterResult& r) {
  r.representatives.assign(r.centroids.size(), 0);
  std::vector<double> best(r.centroids.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(r.assignments[i]);
    const double d = sq_dist(points[i], r.centroids[c]);
    if (d < best[c]) {
      best[c] = d;
      r.representatives[c] = i;
    }
  }
}

}  // namespace

double within_cluster_ss(std::span<const Point2> points, std::span<const int> assignments,
                         std::span<const Point2> centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += sq_dist(points[i], centroids[static_cast<std::size_t>(assignments[i])]);
  }
  return total;
}

ClusterResult kmeans(std::span<const Point2> points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) {
    throw InvalidConfiguration("number of clusters must be at least 1");
  }
  if (points.size() < static_cast<std::size_t>(k)) {
    throw InvalidConfiguration("cannot form " + std::to_string(k) + " clusters from " +
                               std::to_string(points.size()) + " points");
  }
  if (options.max_iterations < 1 || options.restarts < 1) {
    throw InvalidConfiguration("k-means needs at least one iteration and one start");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw InvalidData("k-means points must be finite");
    }
  }
  std::mt19937_64 rng(seed);
  ClusterResult best;
  bool have = false;
  for (int start = 0; start < options.restarts; ++start) {
    ClusterResult r = lloyd(points, seed_plus_plus(points, k, rng), options.max_iterations);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  if (partition_count(points.size(), kk, options.exhaustive_limit) <= options.exhaustive_limit) {
    ClusterResult r = lloyd(points, best_partition_centroids(points, kk), options.max_iterations);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  fill_representatives(points, best);
  return best;
}

ClusterResult kmeans_segments(std::span<const Segment> segments, int k, std::uint64_t seed,
                              std::array<int, 2> coefficients, const KMeansOptions& options) {
  if (coefficients[0] < 0 || coefficients[1] < 0) {
    throw InvalidConfiguration("coefficient indices must be non-negative");
  }
  std::vector<Point2> points;
  std::vector<std::size_t> owners;
  for (const auto& s : segments) {
    if (std::max(coefficients[0], coefficients[1]) > s.alpha.degree()) continue;
    points.push_back({s.alpha.alpha[static_cast<std::size_t>(coefficients[0])],
                      s.alpha.alpha[static_cast<std::size_t>(coefficients[1])]});
    owners.push_back(s.index);
  }
  ClusterResult r = kmeans(points, k, seed, options);
  for (auto& rep : r.representatives) rep = owners[rep];
  r.segment_indices = std::move(owners);
  return r;
}

SensitivityReport sensitivity_bounds(std::span<const double> scores, std::optional<std::size_t> segment_count) {
  if (scores.empty()) {
    throw InvalidData("sensitivity bounds need at least one score");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t n = std::min<std::size_t>(3, sorted.size());
  SensitivityReport r;
  double upper = 0.0;
  double lower = 0.0;
  // Same summation order for both bounds, so equal score sets give equal bounds.
  for (std::size_t i = 0; i < n; ++i) {
    upper += sorted[i];
    lower += sorted[sorted.size() - n + i];
  }
  r.mean_upper = upper / static_cast<double>(n);
  r.mean_lower = lower / static_cast<double>(n);
  r.upper_count = n;
  r.lower_count = n;
  r.mean_segment_count = static_cast<double>(segment_count.value_or(scores.size()));
  return r;
}

SensitivityReport combine_sensitivity(std::span<const SensitivityReport> reports) {
  if (reports.empty()) {
    throw InvalidData("no sensitivity reports to combine");
  }
  SensitivityReport out;
  out.series_count = reports.size();
  for (const auto& r : reports) {
    out.mean_upper += r.mean_upper;
    out.mean_lower += r.mean_lower;
    out.mean_segment_count += r.mean_segment_count;
    out.upper_count += r.upper_count;
    out.lower_count += r.lower_count;
  }
  const auto n = static_cast<double>(reports.size());
  out.mean_upper /= n;
  out.mean_lower /= n;
  out.mean_segment_count /= n;
  return out;
}

bool OffsetResult::any_match() const {
  return std::any_of(offsets.begin(), offsets.end(), [](const auto& o) { return o.has_value(); });
}

std::optional<double> OffsetResult::mean_absolute() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : offsets) {
    if (o) {
      sum += std::fabs(static_cast<double>(*o));
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

OffsetResult change_point_offsets(std::span<const std::int64_t> reference, std::span<const std::int64_t> candidate) {
  if (!std::is_sorted(reference.begin(), reference.end()) || !std::is_sorted(candidate.begin(), candidate.end())) {
    throw InvalidData("change point lists must be sorted ascending");
  }
  OffsetResult r;
  r.offsets.resize(reference.size());
  r.matched_candidate.resize(reference.size());
  std::vector<bool> used(candidate.size(), false);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    std::optional<std::size_t> best;
    std::int64_t best_d = 0;
    for (std::size_t j = 0; j < candidate.size(); ++j) {
      if (used[j]) continue;
      const std::int64_t d = candidate[j] > reference[i] ? candidate[j] - reference[i] : reference[i] - candidate[j];
      if (!best || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best) {
      used[*best] = true;
      r.matched_candidate[i] = best;
      r.offsets[i] = candidate[*best] - reference[i];
    }
  }
  return r;
}

std::vector<CycleAnomaly> CycleOptions::default_anomalies() {
  return {
      {CycleAnomaly::Kind::AdditiveNoise, 500, 600, 0.0, 1.0},
      {CycleAnomaly::Kind::Replace, 1400, 1600, 0.5, 0.5},
  };
}

TimeSeries generate_cycle(const CycleOptions& options) {
  if (options.n == 0) {
    throw InvalidConfiguration("cycle length must be positive");
  }
  if (!(std::isfinite(options.period) && options.period > 0.0)) {
    throw InvalidConfiguration("cycle period must be positive");
  }
  for (const auto& a : options.anomalies) {
    if (a.first > a.last || a.last >= options.n) {
      throw InvalidConfiguration("anomaly interval [" + std::to_string(a.first) + ", " + std::to_string(a.last) +
                                 "] lies outside [0, " + std::to_string(options.n) + ")");
    }
    if (!std::isfinite(a.level) || !std::isfinite(a.scale)) {
      throw InvalidConfiguration("anomaly parameters must be finite");
    }
  }
  std::vector<double> y(options.n);
  for (std::size_t i = 0; i < options.n; ++i) {
    y[i] = std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / options.period);
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& a : options.anomalies) {
    for (std::size_t i = a.first; i <= a.last; ++i) {
      const double u = normal(rng);
      if (a.kind == CycleAnomaly::Kind::AdditiveNoise) {
        y[i] += a.scale * u;
      } else {
        y[i] = a.level + a.scale * u;
      }
    }
  }
  return TimeSeries(std::move(y));
}

}  // namespace fcpd
