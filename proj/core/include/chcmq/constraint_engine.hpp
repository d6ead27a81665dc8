#pragma once

#include "chcmq/expr.hpp"
#include "chcmq/oracle.hpp"
#include "chcmq/sort.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chcmq {

/// Equivalent formula with True/False units removed, nested And/Or
/// flattened, double negations removed and constant relations folded.
Expr simplify(const Expr& c);

/// Splits a formula into atomic conjuncts: relations, their negations,
/// Bool variables, negated Bool variables, and Iff between such.
/// nullopt when some conjunct has other Boolean structure.
std::optional<std::vector<Expr>> atomic_conjuncts(const Expr& c);

/// Satisfiability, entailment, projection and generalization of
/// constraints, backed by an external oracle. Safe to share between
/// threads if the oracle is.
class ConstraintEngine {
public:
    ConstraintEngine(const SortTable& sorts, std::shared_ptr<Oracle> oracle);

    Verdict satisfiability(const Expr& c);
    /// Unsat of c & ~d: Sat means "does not entail".
    Verdict entailment(const Expr& c, const Expr& d);

    /// Conservative readings: unknown counts as satisfiable, and as
    /// "does not entail".
    bool maybe_satisfiable(const Expr& c) { return satisfiability(c) != Verdict::Unsat; }
    bool entails(const Expr& c, const Expr& d) { return entailment(c, d) == Verdict::Unsat; }
    bool equivalent(const Expr& c, const Expr& d) { return entails(c, d) && entails(d, c); }

    /// Over-approximation of c with free variables among `keep`.
    Expr project(const Expr& c, const std::set<std::string>& keep);
    /// Widening: the atomic conjuncts of d entailed by c (d itself when all
    /// are kept), or True when d does not decompose.
    Expr generalize(const Expr& d, const Expr& c);

    const SortTable& sorts() const { return *sorts_; }
    std::size_t oracle_calls() const { return calls_; }

private:
    const SortTable* sorts_;
    std::shared_ptr<Oracle> oracle_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace chcmq
