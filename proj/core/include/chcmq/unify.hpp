#pragma once

#include "chcmq/clause.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace chcmq {

/// Sort-preserving map from variable names to terms. apply() is
/// simultaneous: bound terms are not substituted again.
class Substitution {
public:
    bool bind(const Expr& var, const Expr& term);
    const Expr* lookup(const std::string& name) const;
    bool contains(const std::string& name) const { return map_.count(name) != 0; }
    bool empty() const { return map_.empty(); }
    const std::map<std::string, Expr>& bindings() const { return map_; }

    Expr apply(const Expr& e) const;
    Atom apply(const Atom& a) const;
    Clause apply(const Clause& c) const;

    /// Idempotent copy of a triangular (acyclic) substitution.
    Substitution resolved() const;

private:
    std::map<std::string, Expr> map_;
};

/// Most general unifier over constructor terms and variables; other terms
/// unify only when syntactically equal. When two variables meet, the one
/// from `b` is bound to the one from `a`.
std::optional<Substitution> mgu(const Atom& a, const Atom& b);
bool unify(const Expr& a, const Expr& b, Substitution& s);

/// One-way matching: extends `s` so that s(pattern) == target, binding only
/// variables of the pattern. Already bound pattern variables must agree.
bool match(const Expr& pattern, const Expr& target, Substitution& s);
bool match(const Atom& pattern, const Atom& target, Substitution& s);

/// Deterministic fresh-variable supply. Generated names contain "__", which
/// the parser rejects in source text, so they never collide with user names.
class NameSupply {
public:
    std::string fresh(const std::string& hint);
    Expr fresh_var(const std::string& hint, Sort sort) { return Expr::var(fresh(hint), sort); }
    /// Marks a name as used so fresh() never returns it.
    void reserve(const std::string& name) { taken_.insert(name); }
    void reserve(const Clause& c);

private:
    std::map<std::string, int> counters_;
    std::set<std::string> taken_;
};

std::string base_name(const std::string& var);

/// Variant of `c` whose variables in `avoid` are replaced by fresh ones.
Clause rename_apart(const Clause& c, const std::set<std::string>& avoid, NameSupply& names);
/// Variant of `c` with every variable replaced by a fresh one.
Clause rename_fresh(const Clause& c, NameSupply& names);

/// True iff a and b are equal up to a bijective variable renaming
/// (extending `s`, which maps variables of a to terms of b).
bool variant(const Atom& a, const Atom& b, Substitution& s);

}  // namespace chcmq
