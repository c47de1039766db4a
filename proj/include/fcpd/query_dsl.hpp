#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fcpd/fuzzy.hpp"

namespace fcpd {

struct QueryOption {
  std::string name;
  std::variant<double, std::string> value;
  bool operator==(const QueryOption&) const = default;
};

/// Parsed `.fcq` document: variable declarations, rules, and `set` options,
/// each in source order.
struct QueryDocument {
  std::vector<LinguisticVariable> variables;
  std::vector<Rule> rules;
  std::vector<QueryOption> options;

  const LinguisticVariable* find_variable(std::string_view name) const;
  bool empty() const noexcept { return variables.empty() && rules.empty() && options.empty(); }
  bool operator==(const QueryDocument&) const = default;
};

/// Grammar:
///
///   document := (var_decl | rule | option)*
///   var_decl := "var" IDENT "[" NUMBER "," NUMBER "]" "{" set_decl+ "}"
///   set_decl := IDENT ":" ("tri"|"trap"|"gauss"|"zmf"|"smf") "(" NUMBER ("," NUMBER)* ")"
///   rule     := "IF" expr "," "THEN" "(" IDENT "is" IDENT ")" ("weight" NUMBER)?
///   expr     := term (("and"|"or") term)*      -- "and" binds tighter
///   term     := "(" IDENT "is" ["not"] IDENT ")" | "(" expr ")"
///   option   := "set" IDENT "=" (NUMBER | IDENT)
///
/// Keywords are case-insensitive, identifiers case-sensitive, `#` starts a
/// comment. Throws QueryError.
QueryDocument parse_query(std::string_view text);

/// Canonical text; parse_query(print_query(d)) == d.
std::string print_query(const QueryDocument& doc);

/// Builds the inference system. The output variable is the one every rule
/// concludes on; all other declared variables are inputs. Throws QueryError.
FisConfig to_fis(const QueryDocument& doc);

QueryDocument load_query_file(const std::filesystem::path& path);

}  // namespace fcpd
