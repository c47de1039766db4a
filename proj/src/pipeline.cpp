#include "fcpd/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "fcpd/errors.hpp"
#include "fcpd/io.hpp"

namespace fcpd {

using nlohmann::ordered_json;

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw InvalidConfiguration("unknown output format '" + std::string(text) + "' (expected csv or json)");
}

std::vector<std::string> known_feature_names(int degree, int delay) {
  const std::string d = std::to_string(delay);
  std::vector<std::string> names = {"size", "var_size_" + d, "var_size"};
  for (int k = 0; k <= degree; ++k) {
    names.push_back("alpha_" + std::to_string(k));
    names.push_back("var_alpha_" + std::to_string(k) + "_" + d);
  }
  static const char* const aliases[][2] = {{"average", "var_average"}, {"slope", "var_slope"},
                                           {"curvature", "var_curvature"}};
  for (int k = 0; k <= std::min(degree, 2); ++k) {
    names.emplace_back(aliases[k][0]);
    names.emplace_back(aliases[k][1]);
  }
  return names;
}

Segmentation run_segmentation(const TimeSeries& series, const RunOptions& options, TimeSeries* analysed) {
  TimeSeries input = options.normalize ? normalize(series) : series;
  Segmentation seg = segment_series(input.values(), options.segmentation);
  if (analysed != nullptr) *analysed = std::move(input);
  return seg;
}

QueryReport run_query(const TimeSeries& series, const RunOptions& options, const FisConfig& fis) {
  fis.validate();
  options.segmentation.validate();
  const int degree = options.segmentation.degree;
  const auto known = known_feature_names(degree, options.features.delay);
  const auto inputs = fis.referenced_inputs();
  for (const auto& name : inputs) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw MissingFeature(name, "rule input '" + name + "' is not a segment feature (known: alpha_k, var_alpha_k_" +
                                     std::to_string(options.features.delay) +
                                     ", size, var_size and their aliases average, slope, curvature)");
    }
  }

  QueryReport report;
  report.segmentation = run_segmentation(series, options, &report.series);
  const auto records = build_feature_records(report.segmentation, degree, options.features);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FeatureRecord& rec = records[i];
    auto missing = std::find_if(inputs.begin(), inputs.end(), [&](const std::string& n) { return !rec.get(n); });
    if (missing != inputs.end()) {
      report.skipped.push_back({rec.segment_index, *missing});
      continue;
    }
    const InferenceResult r = infer(fis, [&](std::string_view n) { return rec.get(n); });
    report.ranked.push_back({report.segmentation.segments[i], r.score, r.degenerate});
  }
  std::stable_sort(report.ranked.begin(), report.ranked.end(), [](const ScoredSegment& a, const ScoredSegment& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.segment.index < b.segment.index;
  });
  return report;
}

namespace {

void csv_header(std::ostream& out, int degree, bool with_score) {
  out << "index,start,end,length,closed_by";
  for (int k = 0; k <= degree; ++k) out << ",alpha_" << k;
  if (with_score) out << ",score";
  out << '\n';
}

void csv_row(std::ostream& out, const Segment& s, int degree, const double* score) {
  out << s.index << ',' << s.start << ',' << s.end << ',' << s.length() << ',' << to_string(s.closed_by);
  for (int k = 0; k <= degree; ++k) {
    out << ',';
    if (k <= s.alpha.degree()) out << format_double(s.alpha.alpha[static_cast<std::size_t>(k)]);
  }
  if (score != nullptr) out << ',' << format_double(*score);
  out << '\n';
}

ordered_json json_row(const Segment& s, int degree) {
  ordered_json row;
  row["index"] = s.index;
  row["start"] = s.start;
  row["end"] = s.end;
  row["length"] = s.length();
  row["closed_by"] = std::string(to_string(s.closed_by));
  for (int k = 0; k <= degree; ++k) {
    const std::string key = "alpha_" + std::to_string(k);
    if (k <= s.alpha.degree()) {
      row[key] = s.alpha.alpha[static_cast<std::size_t>(k)];
    } else {
      row[key] = nullptr;
    }
  }
  return row;
}

}  // namespace

void write_segments(std::ostream& out, const Segmentation& segmentation, int degree, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    csv_header(out, degree, false);
    for (const auto& s : segmentation.segments) csv_row(out, s, degree, nullptr);
    return;
  }
  ordered_json doc;
  doc["segments"] = ordered_json::array();
  for (const auto& s : segmentation.segments) doc["segments"].push_back(json_row(s, degree));
  doc["change_points"] = segmentation.change_points();
  out << doc.dump(2) << '\n';
}

void write_query_report(std::ostream& out, const QueryReport& report, int degree, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    csv_header(out, degree, true);
    for (const auto& r : report.ranked) csv_row(out, r.segment, degree, &r.score);
    return;
  }
  ordered_json doc;
  doc["segments"] = ordered_json::array();
  for (const auto& r : report.ranked) {
    ordered_json row = json_row(r.segment, degree);
    row["score"] = r.score;
    row["degenerate"] = r.degenerate;
    doc["segments"].push_back(std::move(row));
  }
  doc["skipped"] = ordered_json::array();
  for (const auto& s : report.skipped) {
    doc["skipped"].push_back({{"index", s.index}, {"missing_feature", s.missing_feature}});
  }
  doc["change_points"] = report.segmentation.change_points();
  out << doc.dump(2) << '\n';
}

void write_clusters(std::ostream& out, const ClusterResult& clusters, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "segment,cluster\n";
    for (std::size_t i = 0; i < clusters.assignments.size(); ++i) {
      out << clusters.segment_indices[i] << ',' << clusters.assignments[i] << '\n';
    }
    out << "\ncluster,centroid_x,centroid_y,representative\n";
    for (std::size_t c = 0; c < clusters.centroids.size(); ++c) {
      out << c << ',' << format_double(clusters.centroids[c][0]) << ',' << format_double(clusters.centroids[c][1])
          << ',' << clusters.representatives[c] << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["assignments"] = ordered_json::array();
  for (std::size_t i = 0; i < clusters.assignments.size(); ++i) {
    doc["assignments"].push_back({{"segment", clusters.segment_indices[i]}, {"cluster", clusters.assignments[i]}});
  }
  doc["clusters"] = ordered_json::array();
  for (std::size_t c = 0; c < clusters.centroids.size(); ++c) {
    doc["clusters"].push_back({{"cluster", c},
                               {"centroid", {clusters.centroids[c][0], clusters.centroids[c][1]}},
                               {"representative", clusters.representatives[c]}});
  }
  doc["inertia"] = clusters.inertia;
  doc["iterations"] = clusters.iterations;
  out << doc.dump(2) << '\n';
}

void write_sensitivity(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<SensitivityReport>& per_series, const SensitivityReport& combined,
                       OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "series,mean_upper,mean_lower,segment_count\n";
    for (std::size_t i = 0; i < per_series.size(); ++i) {
      out << names[i] << ',' << format_double(per_series[i].mean_upper) << ','
          << format_double(per_series[i].mean_lower) << ',' << format_double(per_series[i].mean_segment_count)
          << '\n';
    }
    out << "ALL," << format_double(combined.mean_upper) << ',' << format_double(combined.mean_lower) << ','
        << format_double(combined.mean_segment_count) << '\n';
    return;
  }
  ordered_json doc;
  doc["series"] = ordered_json::array();
  for (std::size_t i = 0; i < per_series.size(); ++i) {
    doc["series"].push_back({{"name", names[i]},
                             {"mean_upper", per_series[i].mean_upper},
                             {"mean_lower", per_series[i].mean_lower},
                             {"segment_count", per_series[i].mean_segment_count}});
  }
  doc["combined"] = {{"mean_upper", combined.mean_upper},
                     {"mean_lower", combined.mean_lower},
                     {"mean_segment_count", combined.mean_segment_count},
                     {"series_count", combined.series_count}};
  out << doc.dump(2) << '\n';
}

void write_offsets(std::ostream& out, std::span<const std::int64_t> reference, const OffsetResult& offsets,
                   OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "reference,candidate,offset\n";
    for (std::size_t i = 0; i < reference.size(); ++i) {
      out << reference[i] << ',';
      if (offsets.offsets[i]) out << reference[i] + *offsets.offsets[i] << ',' << *offsets.offsets[i];
      else out << ',';
      out << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["offsets"] = ordered_json::array();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ordered_json row{{"reference", reference[i]}};
    if (offsets.offsets[i]) {
      row["candidate"] = reference[i] + *offsets.offsets[i];
      row["offset"] = *offsets.offsets[i];
    } else {
      row["candidate"] = nullptr;
      row["offset"] = nullptr;
    }
    doc["offsets"].push_back(std::move(row));
  }
  if (auto m = offsets.mean_absolute()) doc["mean_absolute_offset"] = *m;
  out << doc.dump(2) << '\n';
}

void write_plot_data(const std::filesystem::path& dir, const TimeSeries& series, const Segmentation& segmentation,
                     const std::vector<ScoredSegment>* scores) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw InvalidConfiguration("cannot create plot directory '" + dir.string() + "': " + ec.message());
  }
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw InvalidConfiguration("cannot write '" + (dir / name).string() + "'");
    return f;
  };
  {
    auto f = open("series.dat");
    for (std::size_t i = 0; i < series.size(); ++i) f << i << ' ' << format_double(series[i]) << '\n';
  }
  {
    auto f = open("fit.dat");
    for (const auto& s : segmentation.segments) {
      const OrthoBasis basis(s.alpha.last_index, s.alpha.degree());
      for (std::size_t x = 0; x < s.length(); ++x) {
        f << s.start + x << ' ' << format_double(evaluate(s.alpha, basis, static_cast<double>(x))) << '\n';
      }
      f << '\n';
    }
  }
  {
    auto f = open("boundaries.dat");
    for (auto cp : segmentation.change_points()) f << cp << '\n';
  }
  if (scores != nullptr) {
    std::vector<ScoredSegment> by_index = *scores;
    std::sort(by_index.begin(), by_index.end(),
              [](const ScoredSegment& a, const ScoredSegment& b) { return a.segment.index < b.segment.index; });
    auto f = open("scores.dat");
    for (const auto& s : by_index) {
      f << s.segment.index << ' ' << s.segment.start << ' ' << s.segment.end << ' ' << format_double(s.score) << '\n';
    }
  }
}

std::vector<SeriesSensitivity> sensitivity_batch(const std::vector<std::filesystem::path>& files,
                                                 const RunOptions& options, const FisConfig& fis,
                                                 unsigned max_threads) {
  std::vector<SeriesSensitivity> out(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const QueryReport report = run_query(ingest_csv_file(files[i]), options, fis);
        out[i].name = files[i].filename().string();
        out[i].scored = report.ranked.size();
        if (report.ranked.empty()) {
          out[i].report.series_count = 0;
          out[i].report.mean_segment_count = static_cast<double>(report.segmentation.segments.size());
          continue;
        }
        std::vector<double> scores;
        for (const auto& r : report.ranked) scores.push_back(r.score);
        out[i].report = sensitivity_bounds(scores, report.segmentation.segments.size());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : max_threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(files.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace fcpd
