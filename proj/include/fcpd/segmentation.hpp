#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fcpd/shape_space.hpp"

namespace fcpd {

enum class SssMode {
  Alpha1Sign,     // sign of the window's fitted slope coefficient
  FirstDiffSign,  // sign of y_t - y_{t-1}
};

enum class TailPolicy { EmitFlagged, Drop };

enum class ClosedBy { Dpu, Sss, EndOfStream, MaxLength };

std::string_view to_string(SssMode mode);
std::string_view to_string(TailPolicy policy);
std::string_view to_string(ClosedBy reason);
SssMode parse_sss_mode(std::string_view text);
TailPolicy parse_tail_policy(std::string_view text);

struct SegmentationConfig {
  int degree = 5;
  std::optional<double> th_dpu;
  std::optional<int> th_sss;
  SssMode sss_mode = SssMode::Alpha1Sign;
  double sss_deadband = 0.01;
  /// 0 selects max(2, degree + 1).
  std::size_t min_segment_len = 0;
  /// A window that reaches this many points is closed with ClosedBy::MaxLength.
  std::size_t max_segment_len = kMaxWindowLength;
  TailPolicy tail_policy = TailPolicy::EmitFlagged;

  std::size_t effective_min_len() const;
  /// Throws InvalidConfiguration.
  void validate() const;
};

struct Segment {
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  ShapeVector alpha;
  ClosedBy closed_by = ClosedBy::EndOfStream;

  std::size_t length() const noexcept { return end - start + 1; }
  bool is_tail() const noexcept { return closed_by == ClosedBy::EndOfStream; }
  bool operator==(const Segment&) const = default;
};

struct Segmentation {
  std::vector<Segment> segments;

  /// End index of every segment but the last.
  std::vector<std::size_t> change_points() const;
  bool operator==(const Segmentation&) const = default;
};

/// Strict |predicted - observed| > threshold.
bool dpu_triggered(double predicted, double observed, double th_dpu);

/// Counts sign switches of the slope within one window. Values whose magnitude
/// is within the deadband count as zero and leave the remembered sign alone.
class SlopeSignCounter {
 public:
  SlopeSignCounter(SssMode mode, double deadband) : mode_(mode), deadband_(deadband) {}

  /// Feeds the window state after a grow step.
  void observe(const GrowingWindow& window, double previous_value);
  void observe_slope(double slope);
  void reset();

  SssMode mode() const noexcept { return mode_; }
  int count() const noexcept { return count_; }
  int last_sign() const noexcept { return last_sign_; }

 private:
  SssMode mode_;
  double deadband_;
  int count_ = 0;
  int last_sign_ = 0;
};

inline bool sss_triggered(const SlopeSignCounter& counter, int th_sss) { return counter.count() > th_sss; }

/// Decides whether the window that just absorbed the sample at global_index
/// must close. Only called once the window holds min_segment_len points.
using BoundaryCriterion = std::function<std::optional<ClosedBy>(
    const GrowingWindow& window, const SlopeSignCounter& sss, std::size_t global_index)>;

/// DPU/SSS disjunction described by the config.
BoundaryCriterion threshold_criterion(const SegmentationConfig& config);

struct PushEvent {
  std::optional<Segment> closed;

  bool absorbed() const noexcept { return !closed.has_value(); }
};

/// On-line segmenter: feed samples one at a time, receive closed segments.
class Segmenter {
 public:
  explicit Segmenter(SegmentationConfig config);
  Segmenter(SegmentationConfig config, BoundaryCriterion criterion);

  /// Throws InvalidData for non-finite y.
  PushEvent push(double y);
  /// Closes the stream; returns the partial window per the tail policy.
  std::optional<Segment> finish();

  const SegmentationConfig& config() const noexcept { return config_; }
  std::size_t consumed() const noexcept { return consumed_; }
  std::size_t segments_emitted() const noexcept { return next_index_; }
  const GrowingWindow& window() const noexcept { return window_; }

 private:
  Segment close(ClosedBy reason);

  SegmentationConfig config_;
  BoundaryCriterion criterion_;
  std::size_t min_len_;
  GrowingWindow window_;
  SlopeSignCounter sss_;
  std::vector<double> head_;  // first K points of the window, for short tails
  double previous_value_ = 0.0;
  std::size_t consumed_ = 0;
  std::size_t next_index_ = 0;
  bool finished_ = false;
};

/// Batch driver over Segmenter. Throws InsufficientData when the series has
/// fewer than degree + 1 points.
Segmentation segment_series(std::span<const double> series, const SegmentationConfig& config);
Segmentation segment_series(std::span<const double> series, const SegmentationConfig& config,
                            const BoundaryCriterion& criterion);

}  // namespace fcpd
