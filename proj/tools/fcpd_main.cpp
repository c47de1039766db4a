// fcpd: segment a series, score segments against a fuzzy query, and run the
// auxiliary analyses (clusters, sensitivity bounds, offsets, synthetic cycle).

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcpd/analysis.hpp"
#include "fcpd/errors.hpp"
#include "fcpd/io.hpp"
#include "fcpd/pipeline.hpp"
#include "fcpd/query_dsl.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfig = 2, kData = 3, kRules = 4 };

int exit_code_for(const fcpd::Error& e) {
  switch (e.kind()) {
    case fcpd::ErrorKind::InvalidConfiguration:
      return kConfig;
    case fcpd::ErrorKind::InsufficientData:
    case fcpd::ErrorKind::InvalidData:
      return kData;
    case fcpd::ErrorKind::MissingFeature:
    case fcpd::ErrorKind::Query:
      return kRules;
  }
  return kUnexpected;
}

struct CommonArgs {
  std::string input = "-";
  int degree = 5;
  std::optional<double> th_dpu;
  std::optional<int> th_sss;
  std::string sss_mode = "alpha1";
  double deadband = 0.01;
  std::size_t min_len = 0;
  std::string tail = "emit";
  bool normalize = false;
  int delay = 1;
  std::string format = "csv";
  std::string plot_dir;
  std::string rules;
};

void add_segmentation_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("input", a.input, "CSV series (one value per line or t,value rows); '-' reads stdin");
  cmd->add_option("--degree,-K", a.degree, "Polynomial degree K")->check(CLI::Range(0, fcpd::kMaxDegree));
  cmd->add_option("--th-dpu", a.th_dpu, "Deviation-of-predicted-value threshold");
  cmd->add_option("--th-sss", a.th_sss, "Slope sign switch threshold");
  cmd->add_option("--sss-mode", a.sss_mode, "alpha1 | first-diff")->check(CLI::IsMember({"alpha1", "first-diff"}));
  cmd->add_option("--sss-deadband", a.deadband, "Slopes within this magnitude count as zero");
  cmd->add_option("--min-len", a.min_len, "Minimum segment length (default max(2, K+1))");
  cmd->add_option("--tail", a.tail, "emit | drop the unfinished last window")->check(CLI::IsMember({"emit", "drop"}));
  cmd->add_flag("--normalize", a.normalize, "Zero mean, unit variance before segmenting");
  cmd->add_option("--format", a.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

fcpd::RunOptions run_options(const CommonArgs& a) {
  fcpd::RunOptions o;
  o.segmentation.degree = a.degree;
  o.segmentation.th_dpu = a.th_dpu;
  o.segmentation.th_sss = a.th_sss;
  o.segmentation.sss_mode = fcpd::parse_sss_mode(a.sss_mode);
  o.segmentation.sss_deadband = a.deadband;
  o.segmentation.min_segment_len = a.min_len;
  o.segmentation.tail_policy = fcpd::parse_tail_policy(a.tail);
  o.segmentation.validate();
  o.features.delay = a.delay;
  if (a.delay < 1) throw fcpd::InvalidConfiguration("--delay must be at least 1");
  o.normalize = a.normalize;
  return o;
}

fcpd::TimeSeries read_input(const std::string& path) {
  if (path == "-") return fcpd::ingest_csv(std::cin);
  return fcpd::ingest_csv_file(path);
}

fcpd::FisConfig load_rules(const std::string& path) {
  if (path.empty()) throw fcpd::InvalidConfiguration("--rules is required");
  return fcpd::to_fis(fcpd::load_query_file(path));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FCPD_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw fcpd::InvalidConfiguration("FCPD_SEED must be a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
  }
  return 0;
}

std::vector<std::int64_t> parse_points(const std::string& arg) {
  std::string text = arg;
  if (fs::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::vector<std::int64_t> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw fcpd::InvalidData("change point '" + token + "' is not an integer");
    }
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') flush();
    else token.push_back(c);
  }
  flush();
  return out;
}

std::vector<fs::path> list_series(const fs::path& path) {
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw fcpd::InvalidData("no .csv files in '" + path.string() + "'");
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fcpd - on-line change point detection and fuzzy segment queries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fcpd 0.3.0");

  CommonArgs seg_args;
  auto* segment = app.add_subcommand("segment", "Segment a series and print the segment table");
  add_segmentation_flags(segment, seg_args);
  segment->add_option("--plot-dir", seg_args.plot_dir, "Write series/fit/boundary data files here");

  CommonArgs q_args;
  auto* query = app.add_subcommand("query", "Score segments against a fuzzy rule file");
  add_segmentation_flags(query, q_args);
  query->add_option("--rules", q_args.rules, "Query file (.fcq)")->required();
  query->add_option("--delay", q_args.delay, "Segment delay for variation features");
  query->add_option("--plot-dir", q_args.plot_dir, "Write series/fit/boundary/score data files here");

  CommonArgs c_args;
  int clusters = 3;
  std::optional<std::uint64_t> c_seed;
  std::vector<int> coefficient_pair = {1, 2};
  auto* cluster = app.add_subcommand("cluster", "K-means over segment shape coefficients");
  add_segmentation_flags(cluster, c_args);
  cluster->add_option("--clusters,-k", clusters, "Number of clusters")->check(CLI::PositiveNumber);
  cluster->add_option("--seed", c_seed, "Random seed (falls back to FCPD_SEED)");
  cluster->add_option("--coefficients", coefficient_pair, "Coefficient pair to cluster on")->expected(2);

  CommonArgs s_args;
  unsigned threads = 0;
  auto* sensitivity = app.add_subcommand("sensitivity", "Best/worst 3 score bounds over one series or a directory");
  add_segmentation_flags(sensitivity, s_args);
  sensitivity->add_option("--rules", s_args.rules, "Query file (.fcq)")->required();
  sensitivity->add_option("--delay", s_args.delay, "Segment delay for variation features");
  sensitivity->add_option("--threads", threads, "Worker threads (0 = hardware)");

  std::size_t gen_n = 2000;
  double gen_period = 200.0;
  std::optional<std::uint64_t> gen_seed;
  bool gen_clean = false;
  std::string gen_format = "csv";
  auto* generate = app.add_subcommand("generate", "Synthetic sinusoid with noise anomalies");
  generate->add_option("--n", gen_n, "Number of samples");
  generate->add_option("--period", gen_period, "Samples per cycle");
  generate->add_option("--seed", gen_seed, "Random seed (falls back to FCPD_SEED)");
  generate->add_flag("--no-anomalies", gen_clean, "Pure sinusoid");
  generate->add_option("--format", gen_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string ref_arg;
  std::string cand_arg;
  std::string off_format = "csv";
  auto* offsets = app.add_subcommand("offsets", "Signed offsets between two change point lists");
  offsets->add_option("--reference", ref_arg, "File or comma list of reference change points")->required();
  offsets->add_option("--candidate", cand_arg, "File or comma list of candidate change points")->required();
  offsets->add_option("--format", off_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*segment) {
      const auto opts = run_options(seg_args);
      fcpd::TimeSeries analysed;
      const auto seg = fcpd::run_segmentation(read_input(seg_args.input), opts, &analysed);
      fcpd::write_segments(std::cout, seg, opts.segmentation.degree, fcpd::parse_output_format(seg_args.format));
      if (!seg_args.plot_dir.empty()) fcpd::write_plot_data(seg_args.plot_dir, analysed, seg);
    } else if (*query) {
      const auto opts = run_options(q_args);
      const auto fis = load_rules(q_args.rules);
      const auto report = fcpd::run_query(read_input(q_args.input), opts, fis);
      const auto fmt = fcpd::parse_output_format(q_args.format);
      fcpd::write_query_report(std::cout, report, opts.segmentation.degree, fmt);
      if (fmt == fcpd::OutputFormat::Csv) {
        for (const auto& s : report.skipped) {
          std::cerr << "skipped segment " << s.index << ": " << s.missing_feature << " is undefined\n";
        }
        for (const auto& r : report.ranked) {
          if (r.degenerate) std::cerr << "segment " << r.segment.index << ": no rule fired\n";
        }
      }
      if (!q_args.plot_dir.empty()) {
        fcpd::write_plot_data(q_args.plot_dir, report.series, report.segmentation, &report.ranked);
      }
    } else if (*cluster) {
      const auto opts = run_options(c_args);
      const auto seg = fcpd::run_segmentation(read_input(c_args.input), opts);
      const auto result = fcpd::kmeans_segments(seg.segments, clusters, resolve_seed(c_seed),
                                                {coefficient_pair[0], coefficient_pair[1]});
      fcpd::write_clusters(std::cout, result, fcpd::parse_output_format(c_args.format));
    } else if (*sensitivity) {
      const auto opts = run_options(s_args);
      const auto fis = load_rules(s_args.rules);
      const auto files = list_series(s_args.input);
      const auto batch = fcpd::sensitivity_batch(files, opts, fis, threads);
      std::vector<std::string> names;
      std::vector<fcpd::SensitivityReport> reports;
      for (const auto& b : batch) {
        if (b.report.series_count == 0) {
          std::cerr << b.name << ": no scorable segments\n";
          continue;
        }
        names.push_back(b.name);
        reports.push_back(b.report);
      }
      if (reports.empty()) throw fcpd::InvalidData("no series produced a scorable segment");
      fcpd::write_sensitivity(std::cout, names, reports, fcpd::combine_sensitivity(reports),
                              fcpd::parse_output_format(s_args.format));
    } else if (*generate) {
      fcpd::CycleOptions opts;
      opts.n = gen_n;
      opts.period = gen_period;
      opts.seed = resolve_seed(gen_seed);
      if (gen_clean) opts.anomalies.clear();
      const auto series = fcpd::generate_cycle(opts);
      if (gen_format == "json") {
        std::cout << nlohmann::json(std::vector<double>(series.values().begin(), series.values().end())).dump()
                  << '\n';
      } else {
        std::cout << "t,y\n";
        for (std::size_t i = 0; i < series.size(); ++i) std::cout << i << ',' << fcpd::format_double(series[i]) << '\n';
      }
    } else if (*offsets) {
      const auto reference = parse_points(ref_arg);
      const auto candidate = parse_points(cand_arg);
      const auto result = fcpd::change_point_offsets(reference, candidate);
      fcpd::write_offsets(std::cout, reference, result, fcpd::parse_output_format(off_format));
    }
  } catch (const fcpd::Error& e) {
    std::cerr << "fcpd: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "fcpd: " << e.what() << '\n';
    return kUnexpected;
  }
  return kOk;
}
