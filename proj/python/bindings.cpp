#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "fcpd/analysis.hpp"
#include "fcpd/errors.hpp"
#include "fcpd/pipeline.hpp"
#include "fcpd/query_dsl.hpp"

namespace py = pybind11;
using namespace fcpd;

namespace {

RunOptions make_options(int degree, std::optional<double> th_dpu, std::optional<int> th_sss,
                        const std::string& sss_mode, double sss_deadband, std::size_t min_len,
                        const std::string& tail, bool normalize, int delay) {
  RunOptions o;
  o.segmentation.degree = degree;
  o.segmentation.th_dpu = th_dpu;
  o.segmentation.th_sss = th_sss;
  o.segmentation.sss_mode = parse_sss_mode(sss_mode);
  o.segmentation.sss_deadband = sss_deadband;
  o.segmentation.min_segment_len = min_len;
  o.segmentation.tail_policy = parse_tail_policy(tail);
  o.segmentation.validate();
  o.normalize = normalize;
  o.features.delay = delay;
  return o;
}

py::dict segment_dict(const Segment& s) {
  py::dict d;
  d["index"] = s.index;
  d["start"] = s.start;
  d["end"] = s.end;
  d["length"] = s.length();
  d["closed_by"] = std::string(to_string(s.closed_by));
  d["alpha"] = s.alpha.alpha;
  return d;
}

FisConfig load_rules(const std::optional<std::string>& rules_file, const std::optional<std::string>& rules_text) {
  if (rules_file.has_value() == rules_text.has_value()) {
    throw InvalidConfiguration("give exactly one of rules_file and rules_text");
  }
  return to_fis(rules_file ? load_query_file(*rules_file) : parse_query(*rules_text));
}

}  // namespace

#define SEGMENT_ARGS                                                                                         \
  py::arg("degree") = 5, py::arg("th_dpu") = py::none(), py::arg("th_sss") = py::none(),                    \
      py::arg("sss_mode") = "alpha1", py::arg("sss_deadband") = 0.01, py::arg("min_len") = 0,               \
      py::arg("tail") = "emit", py::arg("normalize") = false

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming change point detection with fuzzy segment queries";

  auto base = py::register_exception<Error>(m, "FcpdError", PyExc_RuntimeError);
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<InvalidData>(m, "InvalidData", base.ptr());
  py::register_exception<MissingFeature>(m, "MissingFeature", base.ptr());
  py::register_exception<QueryError>(m, "QueryError", base.ptr());

  m.def(
      "fit",
      [](const std::vector<double>& values, int degree) { return fit(TimeSeries(values).values(), degree).alpha; },
      py::arg("values"), py::arg("degree"), "Least-squares shape vector of one window.");

  m.def(
      "evaluate",
      [](const std::vector<double>& alpha, std::size_t window_length, double x) {
        if (window_length == 0) throw InvalidConfiguration("window length must be positive");
        return evaluate(ShapeVector{alpha, window_length - 1}, x);
      },
      py::arg("alpha"), py::arg("window_length"), py::arg("x"), "Value of a fitted shape at local index x.");

  m.def(
      "segment",
      [](const std::vector<double>& values, int degree, std::optional<double> th_dpu, std::optional<int> th_sss,
         const std::string& sss_mode, double sss_deadband, std::size_t min_len, const std::string& tail,
         bool normalize) {
        const auto o = make_options(degree, th_dpu, th_sss, sss_mode, sss_deadband, min_len, tail, normalize, 1);
        py::list out;
        for (const auto& s : run_segmentation(TimeSeries(values), o).segments) out.append(segment_dict(s));
        return out;
      },
      py::arg("values"), SEGMENT_ARGS, "Segment a series; returns one dict per segment.");

  m.def(
      "query",
      [](const std::vector<double>& values, std::optional<std::string> rules_file,
         std::optional<std::string> rules_text, int degree, std::optional<double> th_dpu, std::optional<int> th_sss,
         const std::string& sss_mode, double sss_deadband, std::size_t min_len, const std::string& tail,
         bool normalize, int delay) {
        const auto o = make_options(degree, th_dpu, th_sss, sss_mode, sss_deadband, min_len, tail, normalize, delay);
        const auto report = run_query(TimeSeries(values), o, load_rules(rules_file, rules_text));
        py::list ranked;
        for (const auto& r : report.ranked) {
          py::dict d = segment_dict(r.segment);
          d["score"] = r.score;
          d["degenerate"] = r.degenerate;
          ranked.append(d);
        }
        py::list skipped;
        for (const auto& s : report.skipped) {
          py::dict d;
          d["index"] = s.index;
          d["missing_feature"] = s.missing_feature;
          skipped.append(d);
        }
        py::dict out;
        out["ranked"] = ranked;
        out["skipped"] = skipped;
        out["change_points"] = report.segmentation.change_points();
        return out;
      },
      py::arg("values"), py::arg("rules_file") = py::none(), py::arg("rules_text") = py::none(), SEGMENT_ARGS,
      py::arg("delay") = 1, "Score segments against a rule file or rule text, best first.");

  m.def(
      "format_query", [](const std::string& text) { return print_query(parse_query(text)); }, py::arg("text"),
      "Parse rule text and print it in canonical form.");

  m.def(
      "generate_cycle",
      [](std::size_t n, double period, std::uint64_t seed, bool anomalies) {
        CycleOptions c;
        c.n = n;
        c.period = period;
        c.seed = seed;
        if (!anomalies) c.anomalies.clear();
        const auto y = generate_cycle(c);
        return std::vector<double>(y.values().begin(), y.values().end());
      },
      py::arg("n") = 2000, py::arg("period") = 200.0, py::arg("seed") = 0, py::arg("anomalies") = true,
      "Sinusoid with the default noise anomalies.");

  m.def(
      "change_point_offsets",
      [](const std::vector<std::int64_t>& reference, const std::vector<std::int64_t>& candidate) {
        return change_point_offsets(reference, candidate).offsets;
      },
      py::arg("reference"), py::arg("candidate"), "Signed offset per reference point, None when unmatched.");

  m.def(
      "sensitivity_bounds",
      [](const std::vector<double>& scores) {
        const auto r = sensitivity_bounds(scores);
        py::dict d;
        d["mean_upper"] = r.mean_upper;
        d["mean_lower"] = r.mean_lower;
        d["count"] = r.upper_count;
        return d;
      },
      py::arg("scores"), "Mean of the best and of the worst 3 scores.");

  m.def(
      "kmeans",
      [](const std::vector<std::array<double, 2>>& points, int k, std::uint64_t seed) {
        const auto r = kmeans(points, k, seed);
        py::dict d;
        d["assignments"] = r.assignments;
        d["centroids"] = r.centroids;
        d["representatives"] = r.representatives;
        d["inertia"] = r.inertia;
        return d;
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, "Seeded k-means over 2-d points.");

#ifdef VERSION_INFO
#define FCPD_STR(x) #x
#define FCPD_XSTR(x) FCPD_STR(x)
  m.attr("__version__") = FCPD_XSTR(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
