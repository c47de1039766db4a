#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcpd/analysis.hpp"
#include "fcpd/features.hpp"
#include "fcpd/fuzzy.hpp"
#include "fcpd/segmentation.hpp"
#include "fcpd/shape_space.hpp"

namespace fcpd {

enum class OutputFormat { Csv, Json };
OutputFormat parse_output_format(std::string_view text);

struct RunOptions {
  SegmentationConfig segmentation;
  FeatureOptions features;
  bool normalize = false;
};

struct ScoredSegment {
  Segment segment;
  double score = 0.0;
  bool degenerate = false;
};

struct SkippedSegment {
  std::size_t index = 0;
  std::string missing_feature;
};

struct QueryReport {
  TimeSeries series;  // after optional normalization
  Segmentation segmentation;
  /// Score descending, ties by segment index ascending.
  std::vector<ScoredSegment> ranked;
  std::vector<SkippedSegment> skipped;
};

/// Every feature name a record built with these settings carries, aliases included.
std::vector<std::string> known_feature_names(int degree, int delay);

/// normalize? -> segment -> features -> infer -> sort. Throws MissingFeature
/// before scoring anything when a rule input is not a known feature name.
QueryReport run_query(const TimeSeries& series, const RunOptions& options, const FisConfig& fis);

/// Segments only (normalization applied when requested).
Segmentation run_segmentation(const TimeSeries& series, const RunOptions& options, TimeSeries* analysed = nullptr);

void write_segments(std::ostream& out, const Segmentation& segmentation, int degree, OutputFormat format);
void write_query_report(std::ostream& out, const QueryReport& report, int degree, OutputFormat format);
void write_clusters(std::ostream& out, const ClusterResult& clusters, OutputFormat format);
void write_sensitivity(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<SensitivityReport>& per_series, const SensitivityReport& combined,
                       OutputFormat format);
void write_offsets(std::ostream& out, std::span<const std::int64_t> reference, const OffsetResult& offsets,
                   OutputFormat format);

/// Writes series.dat, fit.dat, boundaries.dat and, with scores, scores.dat as
/// whitespace-separated columns.
void write_plot_data(const std::filesystem::path& dir, const TimeSeries& series, const Segmentation& segmentation,
                     const std::vector<ScoredSegment>* scores = nullptr);

struct SeriesSensitivity {
  std::string name;
  SensitivityReport report;
  std::size_t scored = 0;
};

/// Runs the query on every series, in parallel, and reports per-series
/// bounds in the order given. Series with no scorable segment are reported
/// with series_count = 0 and left out of the combined report.
std::vector<SeriesSensitivity> sensitivity_batch(const std::vector<std::filesystem::path>& files,
                                                 const RunOptions& options, const FisConfig& fis,
                                                 unsigned max_threads = 0);

}  // namespace fcpd
