#include "fcpd/query_dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, LBrace, RBrace, Comma, Colon, Equals, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t line;
  std::size_t column;
  double number = 0.0;
};

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident:
      return "identifier";
    case Tok::Number:
      return "number";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::LBracket:
      return "'['";
    case Tok::RBracket:
      return "']'";
    case Tok::LBrace:
      return "'{'";
    case Tok::RBrace:
      return "'}'";
    case Tok::Comma:
      return "','";
    case Tok::Colon:
      return "':'";
    case Tok::Equals:
      return "'='";
    case Tok::End:
      return "end of input";
  }
  return "token";
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

constexpr std::string_view kKeywords[] = {"var", "if", "then", "is", "not", "and", "or", "weight", "set"};

bool is_keyword(std::string_view word) {
  return std::any_of(std::begin(kKeywords), std::end(kKeywords), [&](std::string_view k) { return iequals(k, word); });
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, {}, line_, column_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    const std::size_t start = pos_;
    const std::size_t line = line_;
    const std::size_t col = column_;
    const char c = text_[pos_];
    auto single = [&](Tok kind) {
      advance();
      return Token{kind, text_.substr(start, 1), line, col};
    };
    switch (c) {
      case '(':
        return single(Tok::LParen);
      case ')':
        return single(Tok::RParen);
      case '[':
        return single(Tok::LBracket);
      case ']':
        return single(Tok::RBracket);
      case '{':
        return single(Tok::LBrace);
      case '}':
        return single(Tok::RBrace);
      case ',':
        return single(Tok::Comma);
      case ':':
        return single(Tok::Colon);
      case '=':
        return single(Tok::Equals);
      default:
        break;
    }
    if (ident_start(c)) {
      while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
      return {Tok::Ident, text_.substr(start, pos_ - start), line, col};
    }
    if (digit(c) || c == '.' || c == '-' || c == '+') {
      return number(start, line, col);
    }
    throw QueryError(QueryErrorKind::Syntax, line, col, std::string("unexpected character '") + c + "'");
  }

  Token number(std::size_t start, std::size_t line, std::size_t col) {
    if (text_[pos_] == '-' || text_[pos_] == '+') advance();
    std::size_t digits = 0;
    while (pos_ < text_.size() && digit(text_[pos_])) {
      advance();
      ++digits;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (pos_ < text_.size() && digit(text_[pos_])) {
        advance();
        ++digits;
      }
    }
    if (digits == 0) {
      throw QueryError(QueryErrorKind::Syntax, line, col, "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
      std::size_t exp_digits = 0;
      while (pos_ < text_.size() && digit(text_[pos_])) {
        advance();
        ++exp_digits;
      }
      if (exp_digits == 0) {
        throw QueryError(QueryErrorKind::Syntax, line, col, "malformed exponent");
      }
    }
    if (pos_ < text_.size() && (ident_char(text_[pos_]) || text_[pos_] == '.')) {
      throw QueryError(QueryErrorKind::Syntax, line, col, "malformed number");
    }
    std::string_view lexeme = text_.substr(start, pos_ - start);
    std::string_view digits_part = lexeme.front() == '+' ? lexeme.substr(1) : lexeme;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(digits_part.data(), digits_part.data() + digits_part.size(), value);
    if (ec != std::errc() || ptr != digits_part.data() + digits_part.size() || !std::isfinite(value)) {
      throw QueryError(QueryErrorKind::Syntax, line, col, "number out of range");
    }
    return {Tok::Number, lexeme, line, col, value};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

struct Reference {
  std::string variable;
  std::size_t var_line, var_col;
  std::string set;
  std::size_t set_line, set_col;
};

const std::set<std::string, std::less<>> kOperatorOptions = {"and", "or", "not", "implication", "aggregation",
                                                             "defuzzification"};

std::string_view expected_operator(std::string_view option) {
  if (option == "and") return "min";
  if (option == "or") return "max";
  if (option == "not") return "complement";
  if (option == "implication") return "min";
  if (option == "aggregation") return "max";
  return "centroid";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  QueryDocument run() {
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && iequals(t.text, "var")) {
        parse_variable();
      } else if (t.kind == Tok::Ident && iequals(t.text, "if")) {
        parse_rule();
      } else if (t.kind == Tok::Ident && iequals(t.text, "set")) {
        parse_option();
      } else {
        fail(t, "expected 'var', 'IF' or 'set', found " + found(t));
      }
    }
    check_references();
    return std::move(doc_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + std::string(t.text) + "'";
  }

  [[noreturn]] static void fail(const Token& t, const std::string& message,
                                QueryErrorKind kind = QueryErrorKind::Syntax) {
    throw QueryError(kind, t.line, t.column, message);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(describe(kind)) + ", found " + found(peek()));
    }
    return take();
  }

  void expect_keyword(std::string_view keyword) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || !iequals(t.text, keyword)) {
      fail(t, "expected '" + std::string(keyword) + "', found " + found(t));
    }
    take();
  }

  bool accept_keyword(std::string_view keyword) {
    if (peek().kind == Tok::Ident && iequals(peek().text, keyword)) {
      take();
      return true;
    }
    return false;
  }

  const Token& expect_name(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) {
      fail(t, "expected " + std::string(what) + ", found " + found(t));
    }
    if (is_keyword(t.text)) {
      fail(t, "'" + std::string(t.text) + "' is a reserved word and cannot name a " + std::string(what));
    }
    return take();
  }

  void parse_variable() {
    take();  // var
    const Token& name = expect_name("variable name");
    if (doc_.find_variable(name.text) != nullptr) {
      fail(name, "variable '" + std::string(name.text) + "' is already declared", QueryErrorKind::DuplicateName);
    }
    LinguisticVariable var;
    var.name = std::string(name.text);
    expect(Tok::LBracket);
    const Token& lo = expect(Tok::Number);
    expect(Tok::Comma);
    const Token& hi = expect(Tok::Number);
    expect(Tok::RBracket);
    if (!(lo.number < hi.number)) {
      fail(lo, "domain of '" + var.name + "' needs lo < hi", QueryErrorKind::InvalidParameter);
    }
    var.lo = lo.number;
    var.hi = hi.number;
    expect(Tok::LBrace);
    do {
      parse_set(var);
    } while (peek().kind != Tok::RBrace && peek().kind != Tok::End);
    expect(Tok::RBrace);
    doc_.variables.push_back(std::move(var));
  }

  void parse_set(LinguisticVariable& var) {
    const Token& name = expect_name("set name");
    if (var.find(name.text) != nullptr) {
      fail(name, "set '" + std::string(name.text) + "' is already declared in '" + var.name + "'",
           QueryErrorKind::DuplicateName);
    }
    expect(Tok::Colon);
    const Token& kind = peek();
    if (kind.kind != Tok::Ident) {
      fail(kind, "expected membership function kind, found " + found(kind));
    }
    take();
    expect(Tok::LParen);
    std::vector<double> params;
    params.push_back(expect(Tok::Number).number);
    while (peek().kind == Tok::Comma) {
      take();
      params.push_back(expect(Tok::Number).number);
    }
    expect(Tok::RParen);

    MembershipFunction mf;
    auto arity = [&](std::size_t n) {
      if (params.size() != n) {
        fail(kind,
             "'" + std::string(kind.text) + "' takes " + std::to_string(n) + " parameters, got " +
                 std::to_string(params.size()),
             QueryErrorKind::ArityMismatch);
      }
    };
    if (iequals(kind.text, "tri")) {
      arity(3);
      mf = Triangular{params[0], params[1], params[2]};
    } else if (iequals(kind.text, "trap")) {
      arity(4);
      mf = Trapezoidal{params[0], params[1], params[2], params[3]};
    } else if (iequals(kind.text, "gauss")) {
      arity(2);
      mf = Gaussian{params[0], params[1]};
    } else if (iequals(kind.text, "zmf")) {
      arity(2);
      mf = ZShape{params[0], params[1]};
    } else if (iequals(kind.text, "smf")) {
      arity(2);
      mf = SShape{params[0], params[1]};
    } else {
      fail(kind, "unknown membership function '" + std::string(kind.text) + "' (expected tri, trap, gauss, zmf, smf)");
    }
    try {
      validate(mf);
    } catch (const InvalidConfiguration& e) {
      fail(kind, e.what(), QueryErrorKind::InvalidParameter);
    }
    var.sets.push_back({std::string(name.text), mf});
  }

  void parse_rule() {
    take();  // IF
    Rule rule;
    rule.antecedent = parse_expr();
    expect(Tok::Comma);
    expect_keyword("then");
    expect(Tok::LParen);
    const Token& var = expect_name("variable name");
    expect_keyword("is");
    const Token& set = expect_name("set name");
    expect(Tok::RParen);
    rule.output_variable = std::string(var.text);
    rule.output_set = std::string(set.text);
    references_.push_back({rule.output_variable, var.line, var.column, rule.output_set, set.line, set.column});
    if (accept_keyword("weight")) {
      const Token& w = expect(Tok::Number);
      if (!(w.number > 0.0 && w.number <= 1.0)) {
        fail(w, "rule weight must lie in (0, 1]", QueryErrorKind::InvalidParameter);
      }
      rule.weight = w.number;
    }
    doc_.rules.push_back(std::move(rule));
  }

  Expr parse_expr() {
    std::vector<Expr> terms;
    terms.push_back(parse_and());
    while (accept_keyword("or")) {
      terms.push_back(parse_and());
    }
    return terms.size() == 1 ? std::move(terms.front()) : Expr::any_of(std::move(terms));
  }

  Expr parse_and() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    while (accept_keyword("and")) {
      terms.push_back(parse_term());
    }
    return terms.size() == 1 ? std::move(terms.front()) : Expr::all_of(std::move(terms));
  }

  Expr parse_term() {
    expect(Tok::LParen);
    if (peek().kind == Tok::LParen) {
      Expr inner = parse_expr();
      expect(Tok::RParen);
      return inner;
    }
    const Token& var = expect_name("variable name");
    expect_keyword("is");
    const bool negated = accept_keyword("not");
    const Token& set = expect_name("set name");
    expect(Tok::RParen);
    references_.push_back({std::string(var.text), var.line, var.column, std::string(set.text), set.line, set.column});
    return Expr::atom(std::string(var.text), std::string(set.text), negated);
  }

  void parse_option() {
    take();  // set
    // Operator options are named after the connectives, so reserved words are
    // fine here (and, like all keywords, case-insensitive).
    const Token& name = peek();
    if (name.kind != Tok::Ident) {
      fail(name, "expected option name, found " + found(name));
    }
    take();
    expect(Tok::Equals);
    const Token& value = peek();
    QueryOption option;
    option.name = std::string(name.text);
    if (is_keyword(option.name)) {
      std::transform(option.name.begin(), option.name.end(), option.name.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    }
    if (value.kind == Tok::Number) {
      option.value = value.number;
    } else if (value.kind == Tok::Ident) {
      option.value = std::string(value.text);
    } else {
      fail(value, "expected option value, found " + found(value));
    }
    take();
    for (const auto& o : doc_.options) {
      if (o.name == option.name) {
        fail(name, "option '" + option.name + "' is set twice", QueryErrorKind::DuplicateName);
      }
    }
    if (option.name == "resolution") {
      const double* n = std::get_if<double>(&option.value);
      if (n == nullptr || *n < 2 || *n > 1e7 || std::floor(*n) != *n) {
        fail(value, "resolution must be an integer in [2, 10000000]", QueryErrorKind::InvalidParameter);
      }
    } else if (kOperatorOptions.count(option.name) != 0) {
      const std::string* v = std::get_if<std::string>(&option.value);
      const std::string_view want = expected_operator(option.name);
      if (v == nullptr || !iequals(*v, want)) {
        fail(value, "option '" + option.name + "' only supports '" + std::string(want) + "'",
             QueryErrorKind::InvalidParameter);
      }
    } else {
      fail(name, "unknown option '" + option.name + "'", QueryErrorKind::InvalidParameter);
    }
    doc_.options.push_back(std::move(option));
  }

  void check_references() const {
    for (const auto& ref : references_) {
      const LinguisticVariable* var = doc_.find_variable(ref.variable);
      if (var == nullptr) {
        throw QueryError(QueryErrorKind::UndeclaredReference, ref.var_line, ref.var_col,
                         "undeclared variable '" + ref.variable + "'");
      }
      if (var->find(ref.set) == nullptr) {
        throw QueryError(QueryErrorKind::UndeclaredReference, ref.set_line, ref.set_col,
                         "variable '" + ref.variable + "' has no set '" + ref.set + "'");
      }
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  QueryDocument doc_;
  std::vector<Reference> references_;
};

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void print_term(const Expr& e, std::string& out);

void print_expr(const Expr& e, std::string& out) {
  if (e.op == Expr::Op::Atom) {
    print_term(e, out);
    return;
  }
  const char* joiner = e.op == Expr::Op::And ? " and " : " or ";
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i > 0) out += joiner;
    print_term(e.children[i], out);
  }
}

void print_term(const Expr& e, std::string& out) {
  if (e.op == Expr::Op::Atom) {
    out += "(" + e.variable + " is " + (e.negated ? "not " : "") + e.set + ")";
    return;
  }
  out += "(";
  print_expr(e, out);
  out += ")";
}

}  // namespace

const LinguisticVariable* QueryDocument::find_variable(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

QueryDocument parse_query(std::string_view text) { return Parser(text).run(); }

std::string print_query(const QueryDocument& doc) {
  std::string out;
  for (const auto& var : doc.variables) {
    out += "var " + var.name + " [" + format_number(var.lo) + ", " + format_number(var.hi) + "] {\n";
    for (const auto& s : var.sets) {
      out += "  " + s.name + ": " + std::string(mf_keyword(s.mf)) + "(";
      const auto params = mf_parameters(s.mf);
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(params[i]);
      }
      out += ")\n";
    }
    out += "}\n\n";
  }
  for (const auto& o : doc.options) {
    out += "set " + o.name + " = ";
    if (const double* n = std::get_if<double>(&o.value)) {
      out += format_number(*n);
    } else {
      out += std::get<std::string>(o.value);
    }
    out += "\n";
  }
  if (!doc.options.empty()) out += "\n";
  for (const auto& r : doc.rules) {
    out += "IF ";
    print_expr(r.antecedent, out);
    out += ", THEN (" + r.output_variable + " is " + r.output_set + ")";
    if (r.weight != 1.0) out += " weight " + format_number(r.weight);
    out += "\n";
  }
  return out;
}

FisConfig to_fis(const QueryDocument& doc) {
  if (doc.rules.empty()) {
    throw QueryError(QueryErrorKind::Structure, 0, 0, "query has no rules");
  }
  const std::string& output_name = doc.rules.front().output_variable;
  std::set<std::string> antecedent_vars;
  for (const auto& r : doc.rules) {
    if (r.output_variable != output_name) {
      throw QueryError(QueryErrorKind::Structure, 0, 0,
                       "rules conclude on both '" + output_name + "' and '" + r.output_variable +
                           "'; exactly one output variable is supported");
    }
    r.antecedent.for_each_atom([&](const std::string& var, const std::string&) { antecedent_vars.insert(var); });
  }
  if (antecedent_vars.count(output_name) != 0) {
    throw QueryError(QueryErrorKind::Structure, 0, 0,
                     "output variable '" + output_name + "' also appears in an antecedent");
  }
  FisConfig fis;
  for (const auto& v : doc.variables) {
    if (v.name == output_name) {
      fis.output = v;
    } else {
      fis.inputs.push_back(v);
    }
  }
  fis.rules = doc.rules;
  for (const auto& o : doc.options) {
    if (o.name == "resolution") {
      fis.resolution = static_cast<std::size_t>(std::get<double>(o.value));
    }
  }
  try {
    fis.validate();
  } catch (const InvalidConfiguration& e) {
    throw QueryError(QueryErrorKind::Structure, 0, 0, e.what());
  }
  return fis;
}

QueryDocument load_query_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw QueryError(QueryErrorKind::Structure, 0, 0, "cannot open query file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_query(buffer.str());
}

}  // namespace fcpd
