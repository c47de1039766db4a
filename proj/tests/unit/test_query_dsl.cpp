#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "fcpd/errors.hpp"
#include "fcpd/query_dsl.hpp"
#include "malformed_queries.hpp"
#include "oracles.hpp"

using namespace fcpd;

namespace {

const char* const kHeader =
    "var average [-2, 2] {\n  negative: zmf(-1, 0)\n  zero: gauss(0, 0.2)\n  positive: smf(0, 1)\n}\n"
    "var var_average [-1, 1] {\n  large_decrease: zmf(-1, -0.3)\n  constant: gauss(0, 0.1)\n"
    "  large_increase: smf(0.3, 1)\n}\n"
    "var var_slope [-1, 1] {\n  constant: gauss(0, 0.1)\n}\n"
    "var score [0, 1] {\n  low: tri(0, 0, 0.5)\n  high: tri(0.5, 1, 1)\n  very_low: tri(0, 0, 0.25)\n}\n";

QueryDocument parse_with_header(const std::string& rules) { return parse_query(std::string(kHeader) + rules); }

QueryError capture(const std::string& text) {
  try {
    parse_query(text);
  } catch (const QueryError& e) {
    return e;
  }
  FAIL("expected a QueryError for:\n" << text);
  return QueryError(QueryErrorKind::Syntax, 0, 0, "");
}

}  // namespace

TEST_CASE("single atom rule", "[dsl][parse]") {
  const auto doc = parse_with_header("IF (var_average is large_decrease), THEN (score is high)\n");
  REQUIRE(doc.rules.size() == 1);
  const auto& r = doc.rules[0];
  CHECK(r.antecedent == Expr::atom("var_average", "large_decrease"));
  CHECK(r.output_variable == "score");
  CHECK(r.output_set == "high");
  CHECK(r.weight == 1.0);
}

TEST_CASE("negated atom", "[dsl][parse]") {
  const auto doc = parse_with_header("IF (average is not zero), THEN (score is high)\n");
  CHECK(doc.rules[0].antecedent == Expr::atom("average", "zero", true));
}

TEST_CASE("disjunction over two variables", "[dsl][parse]") {
  const auto doc =
      parse_with_header("IF (var_average is constant) or (var_slope is constant), THEN (score is very_low)\n");
  CHECK(doc.rules[0].antecedent ==
        Expr::any_of({Expr::atom("var_average", "constant"), Expr::atom("var_slope", "constant")}));
}

TEST_CASE("and binds tighter than or", "[dsl][parse]") {
  const auto doc = parse_with_header(
      "IF (average is zero) and (var_average is constant) or (var_slope is constant), THEN (score is low)\n"
      "IF (average is zero) or (var_average is constant) and (var_slope is constant), THEN (score is low)\n"
      "IF ((average is zero) or (var_average is constant)) and (var_slope is constant), THEN (score is low)\n");
  const auto a = Expr::atom("average", "zero");
  const auto b = Expr::atom("var_average", "constant");
  const auto c = Expr::atom("var_slope", "constant");
  CHECK(doc.rules[0].antecedent == Expr::any_of({Expr::all_of({a, b}), c}));
  CHECK(doc.rules[1].antecedent == Expr::any_of({a, Expr::all_of({b, c})}));
  CHECK(doc.rules[2].antecedent == Expr::all_of({Expr::any_of({a, b}), c}));
}

TEST_CASE("keywords ignore case, identifiers do not", "[dsl][parse]") {
  const auto doc = parse_query(
      "VAR x [0, 1] { A: TRI(0, 0.5, 1) a: Smf(0, 1) }\nVar y [0, 1] { hi: tri(0, 1, 1) }\n"
      "if (x IS NOT A) AND (x Is a), then (y is hi) WEIGHT 0.5\nSET resolution = 11\n");
  REQUIRE(doc.variables.size() == 2);
  CHECK(doc.variables[0].sets.size() == 2);
  CHECK(doc.rules[0].weight == 0.5);
  CHECK(doc.rules[0].antecedent == Expr::all_of({Expr::atom("x", "A", true), Expr::atom("x", "a")}));
  CHECK(to_fis(doc).resolution == 11);
  // Option names are identifiers, so "Resolution" is not "resolution".
  const auto e = capture("set Resolution = 11\n");
  CHECK(e.query_kind() == QueryErrorKind::InvalidParameter);
}

TEST_CASE("options and comments", "[dsl][parse]") {
  const auto doc = parse_with_header(
      "# comment line\nset resolution = 2001 # trailing\nset AND = min\nset defuzzification = CENTROID\n"
      "IF (average is zero), THEN (score is low)\n");
  REQUIRE(doc.options.size() == 3);
  CHECK(doc.options[0].name == "resolution");
  CHECK(std::get<double>(doc.options[0].value) == 2001.0);
  CHECK(doc.options[1].name == "and");
  CHECK(to_fis(doc).resolution == 2001);
  CHECK(parse_query(print_query(doc)) == doc);
}

TEST_CASE("empty document round-trips", "[dsl][print]") {
  const auto doc = parse_query("");
  CHECK(doc.empty());
  CHECK(print_query(doc).empty());
  CHECK(parse_query(print_query(doc)) == doc);
  CHECK(parse_query("  # only a comment\n\n").empty());
}

TEST_CASE("printer output is canonical", "[dsl][print]") {
  const auto doc = parse_query(
      "var x [0,1]{a:tri(0,.5,1)}var s[0,1]{h:tri(0,1,1)} IF (x is a),THEN(s is h)weight 0.25");
  const std::string text = print_query(doc);
  CHECK(text ==
        "var x [0, 1] {\n  a: tri(0, 0.5, 1)\n}\n\nvar s [0, 1] {\n  h: tri(0, 1, 1)\n}\n\n"
        "IF (x is a), THEN (s is h) weight 0.25\n");
  CHECK(print_query(parse_query(text)) == text);
}

TEST_CASE("every shipped query file round-trips", "[dsl][print]") {
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FCPD_QUERY_DIR)) {
    if (entry.path().extension() != ".fcq") continue;
    ++files;
    const auto doc = load_query_file(entry.path());
    INFO(entry.path().string());
    CHECK_FALSE(doc.rules.empty());
    CHECK(parse_query(print_query(doc)) == doc);
    CHECK_NOTHROW(to_fis(doc));
  }
  CHECK(files == 11);
}

TEST_CASE("random documents round-trip", "[dsl][property]") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const auto fis = oracle::random_fis(rng, 3, 4, 9);
    QueryDocument doc;
    doc.variables = fis.inputs;
    doc.variables.push_back(fis.output);
    doc.rules = fis.rules;
    if (trial % 3 == 0) doc.options.push_back({"resolution", 501.0});
    const auto reparsed = parse_query(print_query(doc));
    CHECK(reparsed == doc);
    CHECK(parse_query(print_query(reparsed)) == reparsed);
  }
}

TEST_CASE("malformed inputs report category and position", "[dsl][errors]") {
  for (const auto& m : fixtures::malformed_queries()) {
    INFO(m.label);
    const auto e = capture(m.text);
    CHECK(e.query_kind() == m.kind);
    CHECK(e.line() == m.line);
    CHECK(e.column() == m.column);
    CHECK(e.kind() == ErrorKind::Query);
  }
}

TEST_CASE("structural problems surface when building the system", "[dsl][errors]") {
  auto structure = [](const std::string& text) {
    try {
      to_fis(parse_query(text));
    } catch (const QueryError& e) {
      return e.query_kind() == QueryErrorKind::Structure;
    }
    return false;
  };
  CHECK(structure("var x [0, 1] { a: tri(0, 0.5, 1) }\n"));
  CHECK(structure("var x [0, 1] { a: tri(0, 0.5, 1) }\nvar s [0, 1] { h: tri(0, 1, 1) }\n"
                  "var t [0, 1] { h: tri(0, 1, 1) }\nIF (x is a), THEN (s is h)\nIF (x is a), THEN (t is h)\n"));
  CHECK(structure("var x [0, 1] { a: tri(0, 0.5, 1) }\nIF (x is a), THEN (x is a)\n"));
  CHECK_THROWS_AS(load_query_file("/nonexistent/query.fcq"), QueryError);
}

TEST_CASE("error messages carry the position", "[dsl][errors]") {
  const auto e = capture("var x [0, 1] {\n  a: tri(0, 1)\n}\n");
  CHECK(std::string(e.what()).find("2:6") != std::string::npos);
  CHECK(to_string(QueryErrorKind::ArityMismatch) == "arity-mismatch");
}
