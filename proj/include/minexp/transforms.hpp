#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "minexp/formula.hpp"

namespace minexp {

/// Result of simplifying a clause set under a literal set L.
struct PartialEvalResult {
  CnfFormula simplified;               // surviving clauses, L-falsified literals dropped
  std::vector<std::size_t> kept;       // source clause id of each surviving clause
  std::vector<std::size_t> removed;    // satisfied by L, or tautological
  std::vector<std::size_t> falsified;  // every literal false under L
};

PartialEvalResult partial_eval(const CnfFormula& s, const PartialAssignment& l);

/// S|L is valid: nothing survives and nothing is falsified. Linear in |S|.
bool cnf_valid_after(const CnfFormula& s, const PartialAssignment& l);

struct TseitinResult {
  CnfFormula cnf;
  Literal root;
  Var first_aux = 0;  // auxiliaries occupy [first_aux, last_aux]
  Var last_aux = 0;   // last_aux < first_aux when none were allocated
};

/// Definitional CNF with one auxiliary per internal node, numbered in
/// post-order starting above `original_vars` (or above max_var(f) when that is
/// smaller). An atom maps to itself with an empty clause set.
TseitinResult tseitin(const Formula& f, Var original_vars = 0);

/// Which truth value is being explained.
enum class Target : std::uint8_t { Top, Bottom };

inline const char* to_string(Target t) { return t == Target::Top ? "top" : "bot"; }

/// A subconjunction chi of the instance's literal set, rendered in De Morgan form.
struct Explanation {
  std::vector<Literal> chi;  // sorted
  Target mode = Target::Top;
  Formula rendered = Formula::verum();
  std::size_t size = 0;
};

/// DM(chi) for Target::Top, DM(¬chi) for Target::Bottom:
///   DM(chi)  = (p1 & ... & pk) & ~(q1 | ... | qm)
///   DM(¬chi) = ~(p1 & ... & pk) | (q1 | ... | qm)
/// Empty parts are omitted; empty chi gives verum (Top) or falsum (Bottom), size 0.
/// Throws std::invalid_argument when chi holds a complementary pair.
Explanation dm_render(std::vector<Literal> chi, Target mode);

/// Size of dm_render(chi, mode) without building it: 2n-1, plus one when the
/// single negation is present; 0 for empty chi.
std::size_t dm_size(const std::vector<Literal>& chi, Target mode);

/// Exact CNF equivalent of f over the same atoms, by negation normal form and
/// distribution. Returns nullopt once more than `max_clauses` clauses would be
/// produced. Tautological clauses are dropped.
std::optional<CnfFormula> clausal_form(const Formula& f, std::size_t max_clauses = 1u << 16);

/// Clause-set to formula: a left-nested conjunction of left-nested disjunctions.
Formula to_formula(const CnfFormula& s);

}  // namespace minexp
