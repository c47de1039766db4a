#include "fcpd/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

double z_spline(double a, double b, double x) {
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  const double mid = 0.5 * (a + b);
  const double w = b - a;
  if (x <= mid) {
    const double t = (x - a) / w;
    return 1.0 - 2.0 * t * t;
  }
  const double t = (x - b) / w;
  return 2.0 * t * t;
}

struct MembershipVisitor {
  double x;

  double operator()(const Triangular& t) const {
    if (x < t.a || x > t.c) return 0.0;
    if (x <= t.b) return t.b == t.a ? 1.0 : (x - t.a) / (t.b - t.a);
    return t.c == t.b ? 1.0 : (t.c - x) / (t.c - t.b);
  }
  double operator()(const Trapezoidal& t) const {
    if (x < t.a || x > t.d) return 0.0;
    if (x < t.b) return (x - t.a) / (t.b - t.a);
    if (x <= t.c) return 1.0;
    return t.d == t.c ? 1.0 : (t.d - x) / (t.d - t.c);
  }
  double operator()(const Gaussian& g) const {
    const double u = (x - g.center) / g.sigma;
    return std::exp(-0.5 * u * u);
  }
  double operator()(const ZShape& z) const { return z_spline(z.a, z.b, x); }
  double operator()(const SShape& s) const { return 1.0 - z_spline(s.a, s.b, x); }
};

bool all_finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void validate_variable(const LinguisticVariable& var) {
  if (var.name.empty()) {
    throw InvalidConfiguration("linguistic variable without a name");
  }
  if (!(std::isfinite(var.lo) && std::isfinite(var.hi) && var.lo < var.hi)) {
    throw InvalidConfiguration("variable '" + var.name + "' needs a finite domain with lo < hi");
  }
  std::set<std::string> seen;
  for (const auto& s : var.sets) {
    if (!seen.insert(s.name).second) {
      throw InvalidConfiguration("variable '" + var.name + "' declares set '" + s.name + "' twice");
    }
    validate(s.mf);
  }
}

double eval_expr(const Expr& e, const FisConfig& fis, const std::map<std::string, double, std::less<>>& values) {
  switch (e.op) {
    case Expr::Op::Atom: {
      const LinguisticVariable* var = fis.find_input(e.variable);
      const double x = var->clamp(values.find(e.variable)->second);
      const double mu = membership(var->find(e.set)->mf, x);
      return e.negated ? 1.0 - mu : mu;
    }
    case Expr::Op::And: {
      double acc = 1.0;
      for (const auto& c : e.children) acc = std::min(acc, eval_expr(c, fis, values));
      return acc;
    }
    case Expr::Op::Or: {
      double acc = 0.0;
      for (const auto& c : e.children) acc = std::max(acc, eval_expr(c, fis, values));
      return acc;
    }
  }
  return 0.0;
}

}  // namespace

double membership(const MembershipFunction& mf, double x) {
  const double mu = std::visit(MembershipVisitor{x}, mf);
  return std::clamp(mu, 0.0, 1.0);
}

void validate(const MembershipFunction& mf) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Triangular>) {
          if (!all_finite({m.a, m.b, m.c}) || !(m.a <= m.b && m.b <= m.c) || m.a == m.c) {
            throw InvalidConfiguration("triangular set needs a <= b <= c with a < c");
          }
        } else if constexpr (std::is_same_v<T, Trapezoidal>) {
          if (!all_finite({m.a, m.b, m.c, m.d}) || !(m.a <= m.b && m.b <= m.c && m.c <= m.d) || m.a == m.d) {
            throw InvalidConfiguration("trapezoidal set needs a <= b <= c <= d with a < d");
          }
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          if (!all_finite({m.center, m.sigma}) || !(m.sigma > 0.0)) {
            throw InvalidConfiguration("gaussian set needs a finite center and sigma > 0");
          }
        } else {
          if (!all_finite({m.a, m.b}) || !(m.a < m.b)) {
            throw InvalidConfiguration("spline set needs a < b");
          }
        }
      },
      mf);
}

std::string_view mf_keyword(const MembershipFunction& mf) {
  static constexpr std::string_view names[] = {"tri", "trap", "gauss", "zmf", "smf"};
  return names[mf.index()];
}

std::vector<double> mf_parameters(const MembershipFunction& mf) {
  return std::visit(
      [](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Triangular>) return {m.a, m.b, m.c};
        else if constexpr (std::is_same_v<T, Trapezoidal>) return {m.a, m.b, m.c, m.d};
        else if constexpr (std::is_same_v<T, Gaussian>) return {m.center, m.sigma};
        else return {m.a, m.b};
      },
      mf);
}

const FuzzySet* LinguisticVariable::find(std::string_view set_name) const {
  for (const auto& s : sets) {
    if (s.name == set_name) return &s;
  }
  return nullptr;
}

double LinguisticVariable::clamp(double x) const { return std::clamp(x, lo, hi); }

Expr Expr::atom(std::string variable, std::string set, bool negated) {
  Expr e;
  e.op = Op::Atom;
  e.variable = std::move(variable);
  e.set = std::move(set);
  e.negated = negated;
  return e;
}

Expr Expr::all_of(std::vector<Expr> children) {
  Expr e;
  e.op = Op::And;
  e.children = std::move(children);
  return e;
}

Expr Expr::any_of(std::vector<Expr> children) {
  Expr e;
  e.op = Op::Or;
  e.children = std::move(children);
  return e;
}

void Expr::for_each_atom(const std::function<void(const std::string&, const std::string&)>& f) const {
  if (op == Op::Atom) {
    f(variable, set);
    return;
  }
  for (const auto& c : children) c.for_each_atom(f);
}

const LinguisticVariable* FisConfig::find_input(std::string_view name) const {
  for (const auto& v : inputs) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<std::string> FisConfig::referenced_inputs() const {
  std::set<std::string> names;
  for (const auto& r : rules) {
    r.antecedent.for_each_atom([&](const std::string& var, const std::string&) { names.insert(var); });
  }
  return {names.begin(), names.end()};
}

void FisConfig::validate() const {
  if (rules.empty()) {
    throw InvalidConfiguration("inference system has no rules");
  }
  if (resolution < 2) {
    throw InvalidConfiguration("output resolution must be at least 2");
  }
  std::set<std::string> names;
  for (const auto& v : inputs) {
    validate_variable(v);
    if (!names.insert(v.name).second) {
      throw InvalidConfiguration("input variable '" + v.name + "' declared twice");
    }
  }
  validate_variable(output);
  if (names.count(output.name) != 0) {
    throw InvalidConfiguration("variable '" + output.name + "' is both an input and the output");
  }
  for (const auto& r : rules) {
    if (r.output_variable != output.name) {
      throw InvalidConfiguration("rule concludes on '" + r.output_variable + "' but the output is '" + output.name +
                                 "'");
    }
    if (output.find(r.output_set) == nullptr) {
      throw InvalidConfiguration("output set '" + r.output_set + "' is not declared");
    }
    if (!(r.weight > 0.0 && r.weight <= 1.0)) {
      throw InvalidConfiguration("rule weight must lie in (0, 1]");
    }
    if (r.antecedent.op != Expr::Op::Atom && r.antecedent.children.empty()) {
      throw InvalidConfiguration("empty antecedent");
    }
    r.antecedent.for_each_atom([&](const std::string& var, const std::string& set) {
      const LinguisticVariable* in = find_input(var);
      if (in == nullptr) {
        throw InvalidConfiguration("rule references unknown input '" + var + "'");
      }
      if (in->find(set) == nullptr) {
        throw InvalidConfiguration("variable '" + var + "' has no set '" + set + "'");
      }
    });
  }
}

InferenceTrace infer_traced(const FisConfig& fis, const FeatureLookup& lookup) {
  fis.validate();
  std::map<std::string, double, std::less<>> values;
  for (const auto& name : fis.referenced_inputs()) {
    const std::optional<double> v = lookup(name);
    if (!v || !std::isfinite(*v)) {
      throw MissingFeature(name, "no value for input '" + name + "'");
    }
    values.emplace(name, *v);
  }

  InferenceTrace trace;
  trace.firing.reserve(fis.rules.size());
  for (const auto& r : fis.rules) {
    trace.firing.push_back(eval_expr(r.antecedent, fis, values));
  }

  const LinguisticVariable& out = fis.output;
  const std::size_t n = fis.resolution;
  trace.grid.resize(n);
  trace.aggregate.assign(n, 0.0);
  const double step = (out.hi - out.lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    trace.grid[i] = i + 1 == n ? out.hi : out.lo + step * static_cast<double>(i);
  }
  for (std::size_t r = 0; r < fis.rules.size(); ++r) {
    const double height = fis.rules[r].weight * trace.firing[r];
    if (height <= 0.0) continue;
    const MembershipFunction& mf = out.find(fis.rules[r].output_set)->mf;
    for (std::size_t i = 0; i < n; ++i) {
      trace.aggregate[i] = std::max(trace.aggregate[i], std::min(height, membership(mf, trace.grid[i])));
    }
  }

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += trace.grid[i] * trace.aggregate[i];
    den += trace.aggregate[i];
  }
  if (den > 0.0) {
    trace.result.score = std::clamp(num / den, out.lo, out.hi);
  } else {
    trace.result.score = 0.5 * (out.lo + out.hi);
    trace.result.degenerate = true;
  }
  return trace;
}

InferenceResult infer(const FisConfig& fis, const FeatureLookup& lookup) { return infer_traced(fis, lookup).result; }

InferenceResult infer(const FisConfig& fis, const std::map<std::string, double>& inputs) {
  return infer(fis, [&](std::string_view name) -> std::optional<double> {
    auto it = inputs.find(std::string(name));
    if (it == inputs.end()) return std::nullopt;
    return it->second;
  });
}

}  // namespace fcpd
