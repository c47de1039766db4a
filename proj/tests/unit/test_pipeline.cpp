#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fcpd/errors.hpp"
#include "fcpd/io.hpp"
#include "fcpd/pipeline.hpp"
#include "fcpd/query_dsl.hpp"

using namespace fcpd;
using Catch::Approx;

namespace {

FisConfig load_rules(const char* name) { return to_fis(load_query_file(std::filesystem::path(FCPD_QUERY_DIR) / name)); }

RunOptions cycle_options() {
  RunOptions o;
  o.segmentation.degree = 5;
  o.segmentation.th_sss = 1;
  o.segmentation.sss_mode = SssMode::FirstDiffSign;
  return o;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fcpd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cycle query ranks every scorable segment", "[pipeline]") {
  const auto series = generate_cycle({});
  const auto report = run_query(series, cycle_options(), load_rules("cycle.fcq"));
  const auto& segs = report.segmentation.segments;
  CHECK(report.ranked.size() + report.skipped.size() == segs.size());
  std::set<std::size_t> seen;
  for (const auto& r : report.ranked) {
    CHECK(seen.insert(r.segment.index).second);
    CHECK(r.segment == segs[r.segment.index]);
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 1.0);
  }
  for (std::size_t i = 1; i < report.ranked.size(); ++i) {
    const auto& a = report.ranked[i - 1];
    const auto& b = report.ranked[i];
    CHECK((a.score > b.score || (a.score == b.score && a.segment.index < b.segment.index)));
  }
}

TEST_CASE("constant series with variation rules scores nothing", "[pipeline]") {
  const TimeSeries flat(std::vector<double>(300, 0.0));
  RunOptions o;
  o.segmentation.degree = 2;
  o.segmentation.th_dpu = 0.5;
  const auto report = run_query(flat, o, load_rules("cicop_evening_burglaries.fcq"));
  CHECK(report.ranked.empty());
  CHECK_FALSE(report.skipped.empty());
  std::ostringstream csv;
  write_query_report(csv, report, 2, OutputFormat::Csv);
  CHECK(csv.str() == "index,start,end,length,closed_by,alpha_0,alpha_1,alpha_2,score\n");
}

TEST_CASE("unknown rule inputs are reported by name", "[pipeline][errors]") {
  const auto fis = to_fis(parse_query("var momentum [0, 1] { hi: tri(0, 1, 1) }\nvar score [0, 1] { hi: tri(0, 1, 1) }\n"
                                      "IF (momentum is hi), THEN (score is hi)\n"));
  try {
    run_query(TimeSeries(std::vector<double>{1, 2, 3, 4}), cycle_options(), fis);
    FAIL("expected MissingFeature");
  } catch (const MissingFeature& e) {
    CHECK(e.feature() == "momentum");
  }
  RunOptions o = cycle_options();
  o.segmentation.degree = 1;
  CHECK_THROWS_AS(run_query(TimeSeries(std::vector<double>{1, 2, 3, 4}), o, load_rules("curvature_change.fcq")), MissingFeature);
}

TEST_CASE("csv and json carry the same values", "[pipeline][output]") {
  const auto report = run_query(generate_cycle({}), cycle_options(), load_rules("cycle.fcq"));
  std::ostringstream csv, js;
  write_query_report(csv, report, 5, OutputFormat::Csv);
  write_query_report(js, report, 5, OutputFormat::Json);
  const auto doc = nlohmann::json::parse(js.str());
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  const auto header = split(line);
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    const auto fields = split(line);
    REQUIRE(fields.size() == header.size());
    const auto& obj = doc["segments"][row];
    for (std::size_t c = 0; c < header.size(); ++c) {
      INFO(header[c] << " row " << row);
      const auto& v = obj[header[c]];
      if (v.is_null()) {
        CHECK(fields[c].empty());
      } else if (v.is_string()) {
        CHECK(fields[c] == v.get<std::string>());
      } else {
        CHECK(std::stod(fields[c]) == v.get<double>());
      }
    }
    ++row;
  }
  CHECK(row == doc["segments"].size());
  CHECK(row == report.ranked.size());
}

TEST_CASE("segment output formats", "[pipeline][output]") {
  Segmentation seg;
  seg.segments.push_back({0, 0, 3, fit(std::vector<double>{1, 2, 3, 4}, 1), ClosedBy::Dpu});
  seg.segments.push_back({1, 4, 4, fit(std::vector<double>{9}, 0), ClosedBy::EndOfStream});
  std::ostringstream csv;
  write_segments(csv, seg, 1, OutputFormat::Csv);
  CHECK(csv.str() ==
        "index,start,end,length,closed_by,alpha_0,alpha_1\n0,0,3,4,DPU,2.5,1\n1,4,4,1,END_OF_STREAM,9,\n");
  std::ostringstream js;
  write_segments(js, seg, 1, OutputFormat::Json);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["change_points"] == nlohmann::json::array({3}));
  CHECK(doc["segments"][1]["alpha_1"].is_null());
}

TEST_CASE("runs are deterministic", "[pipeline][property]") {
  const auto fis = load_rules("cycle.fcq");
  std::string first;
  for (int run = 0; run < 3; ++run) {
    const auto report = run_query(generate_cycle({}), cycle_options(), fis);
    std::ostringstream out;
    write_query_report(out, report, 5, OutputFormat::Json);
    if (run == 0) first = out.str();
    CHECK(out.str() == first);
  }
}

TEST_CASE("plot data files", "[pipeline][output]") {
  const auto dir = scratch_dir("plot");
  const auto series = generate_cycle({});
  const auto report = run_query(series, cycle_options(), load_rules("cycle.fcq"));
  write_plot_data(dir, report.series, report.segmentation, &report.ranked);
  for (const char* f : {"series.dat", "fit.dat", "boundaries.dat", "scores.dat"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream b(dir / "boundaries.dat");
  std::size_t lines = 0;
  for (std::string l; std::getline(b, l);) ++lines;
  CHECK(lines == report.segmentation.change_points().size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("batch sensitivity keeps input order", "[pipeline][sensitivity]") {
  const auto dir = scratch_dir("batch");
  std::vector<std::filesystem::path> files;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    CycleOptions c;
    c.seed = seed;
    const auto y = generate_cycle(c);
    files.push_back(dir / ("s" + std::to_string(seed) + ".csv"));
    std::ofstream f(files.back());
    for (double v : y.values()) f << format_double(v) << '\n';
  }
  const auto fis = load_rules("cycle.fcq");
  const auto parallel = sensitivity_batch(files, cycle_options(), fis, 4);
  const auto serial = sensitivity_batch(files, cycle_options(), fis, 1);
  REQUIRE(parallel.size() == files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    CHECK(parallel[i].name == files[i].filename().string());
    CHECK(parallel[i].report.mean_upper == serial[i].report.mean_upper);
    CHECK(parallel[i].report.mean_lower == serial[i].report.mean_lower);
    CHECK(parallel[i].report.mean_lower <= parallel[i].report.mean_upper);
  }
  files.push_back(dir / "missing.csv");
  CHECK_THROWS_AS(sensitivity_batch(files, cycle_options(), fis, 2), InvalidData);
  std::filesystem::remove_all(dir);
}

TEST_CASE("output format names", "[pipeline]") {
  CHECK(parse_output_format("csv") == OutputFormat::Csv);
  CHECK(parse_output_format("json") == OutputFormat::Json);
  CHECK_THROWS_AS(parse_output_format("xml"), InvalidConfiguration);
}
