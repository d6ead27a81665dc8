#pragma once

#include "chcmq/clause.hpp"

#include <string>
#include <vector>

namespace chcmq {

/// `(declare-datatypes ...)` for every ADT of the table, or "" if none.
std::string smt_datatypes(const SortTable& sorts);

std::string smt_term(const Expr& e);
std::string smt_term(const SortTable& sorts, const Expr& e);
std::string smt_atom(const SortTable& sorts, const Atom& a);
std::string smt_sort(const SortTable& sorts, Sort s);
std::string smt_symbol(const std::string& name);

/// Horn script: `(set-logic HORN)`, datatypes, one `declare-fun` per
/// predicate, one universally closed implication per clause, `(check-sat)`.
/// Clauses without variables are asserted without a quantifier, since
/// `(forall () ...)` is not well-formed SMT-LIB.
std::string emit_smtlib(const Problem& p);

/// Same, for an explicit clause list over the problem's declarations.
std::string emit_smtlib(const Problem& p, const std::vector<Clause>& clauses);

/// Datatypes, predicate declarations and clause assertions only.
std::string emit_clause_assertions(const Problem& p, const std::vector<Clause>& clauses);

/// Satisfiability script for one quantifier-free formula (no check-sat,
/// no logic line), used by the constraint oracle.
std::string smt_query_body(const SortTable& sorts, const Expr& formula);

}  // namespace chcmq
