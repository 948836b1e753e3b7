#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "minexp/formula.hpp"

namespace minexp {

/// Parse failure. `line` is 1-based; `column` is 1-based or 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, std::size_t line, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Thrown by parse_assignment when a variable is given both polarities.
class InconsistentAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strict DIMACS cnf reader. Duplicate literals inside a clause collapse;
/// complementary pairs are kept. The declared clause count must match.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(std::string_view text);

/// `p cnf V C` header followed by one 0-terminated clause per line.
/// Comment lines are emitted first, each prefixed with "c ".
std::string render_dimacs(const CnfFormula& f, const std::vector<std::string>& comments = {});

struct ParsedFormula {
  Formula formula;
  NameTable names;  // only bare identifiers are recorded
};

/// Grammar:
///   disj := conj ('|' conj)*      conj := unary ('&' unary)*
///   unary := '~' unary | '(' disj ')' | atom | 'true' | 'false'
/// Atoms `p<digits>` denote that variable index. Other identifiers get fresh
/// indices above every explicit p-index, in order of first occurrence.
ParsedFormula parse_formula(std::string_view text);

/// Whitespace-separated signed integers; unmentioned variables stay unknown.
PartialAssignment parse_assignment(std::string_view text);
std::string render_assignment(const PartialAssignment& a);

std::string read_file(const std::string& path);

}  // namespace minexp
