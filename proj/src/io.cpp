#include "minexp/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace minexp {

ParseError::ParseError(std::string what, std::size_t line, std::size_t column)
    : std::runtime_error([&] {
        std::string msg = "line " + std::to_string(line);
        if (column) msg += ", column " + std::to_string(column);
        return msg + ": " + what;
      }()),
      line_(line),
      column_(column) {}

namespace {

bool parse_int(std::string_view tok, long long& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long long declared_vars = 0, declared_clauses = 0;
  CnfFormula f;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0][0] == 'c') continue;
    if (toks[0] == "%") break;  // SATLIB trailer
    if (toks[0] == "p") {
      if (have_header) throw ParseError("duplicate problem line", lineno);
      if (toks.size() != 4 || toks[1] != "cnf" || !parse_int(toks[2], declared_vars) ||
          !parse_int(toks[3], declared_clauses) || declared_vars < 0 || declared_clauses < 0)
        throw ParseError("malformed header, expected 'p cnf <vars> <clauses>'", lineno);
      have_header = true;
      f.num_vars = static_cast<Var>(declared_vars);
      continue;
    }
    if (!have_header) throw ParseError("clause data before 'p cnf' header", lineno);
    for (auto tok : toks) {
      long long v = 0;
      if (!parse_int(tok, v)) throw ParseError("invalid literal '" + std::string(tok) + "'", lineno);
      if (v == 0) {
        f.clauses.emplace_back(std::move(pending));
        pending.clear();
        continue;
      }
      if (v > declared_vars || -v > declared_vars)
        throw ParseError("literal " + std::string(tok) + " exceeds declared variable count " +
                             std::to_string(declared_vars),
                         lineno);
      if (pending.empty()) pending_line = lineno;
      pending.push_back(Literal::from_dimacs(v));
    }
  }
  if (!have_header) throw ParseError("missing 'p cnf' header", lineno == 0 ? 1 : lineno);
  if (!pending.empty()) throw ParseError("unterminated clause (missing trailing 0)", pending_line);
  if (static_cast<long long>(f.clauses.size()) != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                         std::to_string(f.clauses.size()),
                     lineno == 0 ? 1 : lineno);
  return f;
}

CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

std::string render_dimacs(const CnfFormula& f, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "c " + c + "\n";
  out += "p cnf " + std::to_string(f.num_vars) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const auto& c : f.clauses) {
    for (auto l : c) out += std::to_string(l.to_dimacs()) + " ";
    out += "0\n";
  }
  return out;
}

// --- formula text ---------------------------------------------------------

namespace {

enum class Tok { Ident, Not, And, Or, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;  // 1-based column
};

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {
    tokenize();
    assign_indices();
  }

  ParsedFormula run() {
    Formula f = parse_disj();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'", peek().pos);
    return {std::move(f), std::move(names_)};
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
    // multi-line input: report the line the position falls on
    std::size_t line = 1, col = pos;
    for (std::size_t i = 0; i + 1 < pos && i < text_.size(); ++i)
      if (text_[i] == '\n') {
        ++line;
        col = pos - i - 1;
      }
    throw ParseError(what, line, col);
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      std::size_t pos = i + 1;
      switch (c) {
        case '~': tokens_.push_back({Tok::Not, "~", pos}); ++i; continue;
        case '&': tokens_.push_back({Tok::And, "&", pos}); ++i; continue;
        case '|': tokens_.push_back({Tok::Or, "|", pos}); ++i; continue;
        case '(': tokens_.push_back({Tok::LParen, "(", pos}); ++i; continue;
        case ')': tokens_.push_back({Tok::RParen, ")", pos}); ++i; continue;
        default: break;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
          ++j;
        tokens_.push_back({Tok::Ident, std::string(text_.substr(i, j - i)), pos});
        i = j;
        continue;
      }
      fail(std::string("stray character '") + c + "'", pos);
    }
    tokens_.push_back({Tok::End, "end of input", text_.size() + 1});
  }

  static bool explicit_index(const std::string& s, Var& out) {
    if (s.size() < 2 || s[0] != 'p') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    if (s[1] == '0') return false;
    long long v = 0;
    if (!parse_int(std::string_view(s).substr(1), v) || v <= 0 || v > 0x7fffffff) return false;
    out = static_cast<Var>(v);
    return true;
  }

  void assign_indices() {
    Var top = 0;
    for (const auto& t : tokens_) {
      Var v = 0;
      if (t.kind == Tok::Ident && explicit_index(t.text, v)) top = std::max(top, v);
    }
    for (const auto& t : tokens_) {
      if (t.kind != Tok::Ident || t.text == "true" || t.text == "false") continue;
      Var v = 0;
      if (explicit_index(t.text, v) || index_.count(t.text)) continue;
      index_[t.text] = ++top;
      names_[top] = t.text;
    }
  }

  const Token& peek() const { return tokens_[at_]; }
  const Token& next() { return tokens_[at_++]; }

  Formula parse_disj() {
    Formula f = parse_conj();
    while (peek().kind == Tok::Or) {
      next();
      f = Formula::disj(f, parse_conj());
    }
    return f;
  }

  Formula parse_conj() {
    Formula f = parse_unary();
    while (peek().kind == Tok::And) {
      next();
      f = Formula::conj(f, parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Not:
        return Formula::negation(parse_unary());
      case Tok::LParen: {
        Formula f = parse_disj();
        if (peek().kind != Tok::RParen)
          fail("expected ')' to close '(' at column " + std::to_string(t.pos), peek().pos);
        next();
        return f;
      }
      case Tok::Ident: {
        if (t.text == "true") return Formula::verum();
        if (t.text == "false") return Formula::falsum();
        Var v = 0;
        if (explicit_index(t.text, v)) return Formula::atom(v);
        return Formula::atom(index_.at(t.text));
      }
      case Tok::RParen:
        fail("unbalanced ')'", t.pos);
      default:
        fail("expected a formula, found '" + t.text + "'", t.pos);
    }
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t at_ = 0;
  std::map<std::string, Var> index_;
  NameTable names_;
};

}  // namespace

ParsedFormula parse_formula(std::string_view text) { return FormulaParser(text).run(); }

PartialAssignment parse_assignment(std::string_view text) {
  PartialAssignment a;
  std::size_t lineno = 1, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find_first_of("c#"); hash != std::string_view::npos &&
                                              line.find_first_not_of(" \t") == hash)
      line = {};  // comment line
    for (auto tok : split_ws(line)) {
      long long v = 0;
      if (!parse_int(tok, v)) throw ParseError("invalid literal '" + std::string(tok) + "'", lineno);
      if (v == 0) throw ParseError("0 is not a literal", lineno);
      Literal l = Literal::from_dimacs(v);
      Truth want = l.negative() ? Truth::False : Truth::True;
      Truth have = a.value(l.var());
      if (have != Truth::Unknown && have != want)
        throw InconsistentAssignment("variable " + std::to_string(l.var()) +
                                     " assigned both polarities");
      a.set(l.var(), l.positive());
    }
    ++lineno;
    start = end + 1;
  }
  return a;
}

std::string render_assignment(const PartialAssignment& a) {
  std::string out;
  for (auto l : a.literals()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(l.to_dimacs());
  }
  return out + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace minexp
