#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fcpd {

struct Triangular {
  double a, b, c;
  bool operator==(const Triangular&) const = default;
};

struct Trapezoidal {
  double a, b, c, d;
  bool operator==(const Trapezoidal&) const = default;
};

struct Gaussian {
  double center, sigma;
  bool operator==(const Gaussian&) const = default;
};

/// Quadratic spline falling from 1 at a to 0 at b.
struct ZShape {
  double a, b;
  bool operator==(const ZShape&) const = default;
};

/// Quadratic spline rising from 0 at a to 1 at b.
struct SShape {
  double a, b;
  bool operator==(const SShape&) const = default;
};

using MembershipFunction = std::variant<Triangular, Trapezoidal, Gaussian, ZShape, SShape>;

/// Degree of membership of x; always in [0, 1].
double membership(const MembershipFunction& mf, double x);
/// Throws InvalidConfiguration when parameters break the shape's ordering rules.
void validate(const MembershipFunction& mf);

/// DSL keyword of the variant ("tri", "trap", "gauss", "zmf", "smf").
std::string_view mf_keyword(const MembershipFunction& mf);
std::vector<double> mf_parameters(const MembershipFunction& mf);

struct FuzzySet {
  std::string name;
  MembershipFunction mf;
  bool operator==(const FuzzySet&) const = default;
};

struct LinguisticVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<FuzzySet> sets;

  const FuzzySet* find(std::string_view set_name) const;
  double clamp(double x) const;
  bool operator==(const LinguisticVariable&) const = default;
};

/// Antecedent expression: an atom `(variable is [not] set)` or an n-ary
/// conjunction/disjunction of sub-expressions.
struct Expr {
  enum class Op { Atom, And, Or };

  Op op = Op::Atom;
  std::string variable;
  std::string set;
  bool negated = false;
  std::vector<Expr> children;

  static Expr atom(std::string variable, std::string set, bool negated = false);
  static Expr all_of(std::vector<Expr> children);
  static Expr any_of(std::vector<Expr> children);

  /// Calls f(variable, set) for every atom, left to right.
  void for_each_atom(const std::function<void(const std::string&, const std::string&)>& f) const;
  bool operator==(const Expr&) const = default;
};

struct Rule {
  Expr antecedent;
  std::string output_variable;
  std::string output_set;
  double weight = 1.0;
  bool operator==(const Rule&) const = default;
};

/// Mamdani system with fixed operators: AND = min, OR = max, NOT = 1 - x,
/// min implication, max aggregation, discretized centroid.
struct FisConfig {
  std::vector<LinguisticVariable> inputs;
  LinguisticVariable output;
  std::vector<Rule> rules;
  std::size_t resolution = 1001;

  const LinguisticVariable* find_input(std::string_view name) const;
  /// Names of input variables referenced by at least one rule, sorted.
  std::vector<std::string> referenced_inputs() const;
  /// Throws InvalidConfiguration.
  void validate() const;
};

struct InferenceResult {
  double score = 0.0;
  /// No rule fired: score is the output domain midpoint.
  bool degenerate = false;
};

struct InferenceTrace {
  InferenceResult result;
  std::vector<double> firing;     // per rule, before weighting
  std::vector<double> grid;       // output domain samples
  std::vector<double> aggregate;  // aggregated membership at each grid point
};

using FeatureLookup = std::function<std::optional<double>(std::string_view)>;

/// Throws MissingFeature when an input referenced by a rule has no value.
InferenceResult infer(const FisConfig& fis, const FeatureLookup& lookup);
InferenceResult infer(const FisConfig& fis, const std::map<std::string, double>& inputs);
InferenceTrace infer_traced(const FisConfig& fis, const FeatureLookup& lookup);

}  // namespace fcpd
