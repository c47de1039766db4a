#include "fcpd/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fcpd/errors.hpp"

namespace fcpd {

std::string_view to_string(SssMode mode) {
  return mode == SssMode::Alpha1Sign ? "alpha1" : "first-diff";
}

std::string_view to_string(TailPolicy policy) {
  return policy == TailPolicy::EmitFlagged ? "emit" : "drop";
}

std::string_view to_string(ClosedBy reason) {
  switch (reason) {
    case ClosedBy::Dpu:
      return "DPU";
    case ClosedBy::Sss:
      return "SSS";
    case ClosedBy::EndOfStream:
      return "END_OF_STREAM";
    case ClosedBy::MaxLength:
      return "MAX_LENGTH";
  }
  return "?";
}

SssMode parse_sss_mode(std::string_view text) {
  if (text == "alpha1" || text == "ALPHA1_SIGN") return SssMode::Alpha1Sign;
  if (text == "first-diff" || text == "FIRST_DIFF_SIGN") return SssMode::FirstDiffSign;
  throw InvalidConfiguration("unknown SSS mode '" + std::string(text) + "' (expected alpha1 or first-diff)");
}

TailPolicy parse_tail_policy(std::string_view text) {
  if (text == "emit" || text == "EMIT_FLAGGED") return TailPolicy::EmitFlagged;
  if (text == "drop" || text == "DROP") return TailPolicy::Drop;
  throw InvalidConfiguration("unknown tail policy '" + std::string(text) + "' (expected emit or drop)");
}

std::size_t SegmentationConfig::effective_min_len() const {
  const std::size_t floor = std::max<std::size_t>(2, static_cast<std::size_t>(std::max(degree, 0)) + 1);
  return min_segment_len == 0 ? floor : min_segment_len;
}

void SegmentationConfig::validate() const {
  if (degree < 0 || degree > kMaxDegree) {
    throw InvalidConfiguration("degree must lie in [0, " + std::to_string(kMaxDegree) + "], got " +
                               std::to_string(degree));
  }
  if (!th_dpu && !th_sss) {
    throw InvalidConfiguration("at least one of th_dpu and th_sss must be set");
  }
  if (th_dpu && !(std::isfinite(*th_dpu) && *th_dpu > 0.0)) {
    throw InvalidConfiguration("th_dpu must be a positive finite number");
  }
  if (th_sss && *th_sss < 0) {
    throw InvalidConfiguration("th_sss must be non-negative");
  }
  if (!(std::isfinite(sss_deadband) && sss_deadband >= 0.0)) {
    throw InvalidConfiguration("SSS deadband must be a non-negative finite number");
  }
  if (th_sss && sss_mode == SssMode::Alpha1Sign && degree == 0) {
    throw InvalidConfiguration("alpha1 SSS mode needs degree >= 1 (degree 0 has no slope coefficient)");
  }
  const std::size_t floor = std::max<std::size_t>(2, static_cast<std::size_t>(degree) + 1);
  if (min_segment_len != 0 && min_segment_len < floor) {
    throw InvalidConfiguration("min_segment_len must be at least " + std::to_string(floor));
  }
  if (max_segment_len < effective_min_len() || max_segment_len > kMaxWindowLength) {
    throw InvalidConfiguration("max_segment_len must lie in [min_segment_len, " + std::to_string(kMaxWindowLength) +
                               "]");
  }
}

std::vector<std::size_t> Segmentation::change_points() const {
  std::vector<std::size_t> out;
  if (segments.size() > 1) {
    out.reserve(segments.size() - 1);
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      out.push_back(segments[i].end);
    }
  }
  return out;
}

bool dpu_triggered(double predicted, double observed, double th_dpu) {
  if (!std::isfinite(predicted) || !std::isfinite(observed) || !std::isfinite(th_dpu)) {
    throw InvalidData("DPU criterion needs finite inputs");
  }
  return std::fabs(predicted - observed) > th_dpu;
}

void SlopeSignCounter::observe(const GrowingWindow& window, double previous_value) {
  if (mode_ == SssMode::Alpha1Sign) {
    if (window.degree() >= 1 && window.has_shape()) {
      observe_slope(window.shape().alpha[1]);
    }
  } else if (window.count() >= 2) {
    observe_slope(window.last_value() - previous_value);
  }
}

void SlopeSignCounter::observe_slope(double slope) {
  if (std::fabs(slope) <= deadband_) {
    return;
  }
  const int sign = slope > 0 ? 1 : -1;
  if (last_sign_ != 0 && sign != last_sign_) {
    ++count_;
  }
  last_sign_ = sign;
}

void SlopeSignCounter::reset() {
  count_ = 0;
  last_sign_ = 0;
}

BoundaryCriterion threshold_criterion(const SegmentationConfig& config) {
  const std::optional<double> th_dpu = config.th_dpu;
  const std::optional<int> th_sss = config.th_sss;
  return [th_dpu, th_sss](const GrowingWindow& window, const SlopeSignCounter& sss,
                          std::size_t) -> std::optional<ClosedBy> {
    if (th_dpu && dpu_triggered(window.predicted_last(), window.last_value(), *th_dpu)) {
      return ClosedBy::Dpu;
    }
    if (th_sss && sss_triggered(sss, *th_sss)) {
      return ClosedBy::Sss;
    }
    return std::nullopt;
  };
}

Segmenter::Segmenter(SegmentationConfig config) : Segmenter(config, threshold_criterion(config)) {}

Segmenter::Segmenter(SegmentationConfig config, BoundaryCriterion criterion)
    : config_((config.validate(), config)),
      criterion_(std::move(criterion)),
      min_len_(config_.effective_min_len()),
      window_(config_.degree, 0),
      sss_(config_.sss_mode, config_.sss_deadband) {
  if (!criterion_) {
    throw InvalidConfiguration("segmenter needs a boundary criterion");
  }
  head_.reserve(static_cast<std::size_t>(config_.degree) + 1);
}

PushEvent Segmenter::push(double y) {
  if (finished_) {
    throw InvalidConfiguration("push after finish");
  }
  if (!std::isfinite(y)) {
    throw InvalidData("sample " + std::to_string(consumed_) + " is not finite");
  }
  const double previous = previous_value_;
  window_.grow(y);
  if (head_.size() <= static_cast<std::size_t>(config_.degree)) {
    head_.push_back(y);
  }
  sss_.observe(window_, previous);
  previous_value_ = y;
  const std::size_t global = consumed_++;

  PushEvent event;
  if (window_.count() >= min_len_) {
    if (auto reason = criterion_(window_, sss_, global)) {
      event.closed = close(*reason);
    } else if (window_.count() >= config_.max_segment_len) {
      event.closed = close(ClosedBy::MaxLength);
    }
  }
  return event;
}

Segment Segmenter::close(ClosedBy reason) {
  Segment seg;
  seg.index = next_index_++;
  seg.start = window_.start_index();
  seg.end = window_.start_index() + window_.count() - 1;
  seg.closed_by = reason;
  if (window_.has_shape()) {
    seg.alpha = window_.shape();
  } else {
    // Short tail: fall back to the highest degree the points support.
    seg.alpha = fit(head_, static_cast<int>(head_.size()) - 1);
  }
  window_ = GrowingWindow(config_.degree, seg.end + 1);
  sss_.reset();
  head_.clear();
  return seg;
}

std::optional<Segment> Segmenter::finish() {
  if (finished_) {
    return std::nullopt;
  }
  finished_ = true;
  if (window_.empty() || config_.tail_policy == TailPolicy::Drop) {
    return std::nullopt;
  }
  return close(ClosedBy::EndOfStream);
}

Segmentation segment_series(std::span<const double> series, const SegmentationConfig& config) {
  config.validate();
  return segment_series(series, config, threshold_criterion(config));
}

Segmentation segment_series(std::span<const double> series, const SegmentationConfig& config,
                            const BoundaryCriterion& criterion) {
  config.validate();
  if (series.size() < static_cast<std::size_t>(config.degree) + 1) {
    throw InsufficientData("series has " + std::to_string(series.size()) + " points, degree " +
                           std::to_string(config.degree) + " needs at least " + std::to_string(config.degree + 1));
  }
  Segmenter segmenter(config, criterion);
  Segmentation out;
  for (double y : series) {
    if (auto event = segmenter.push(y); event.closed) {
      out.segments.push_back(std::move(*event.closed));
    }
  }
  if (auto tail = segmenter.finish()) {
    out.segments.push_back(std::move(*tail));
  }
  return out;
}

}  // namespace fcpd
