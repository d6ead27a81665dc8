#include "chcmq/constraint_engine.hpp"

#include "chcmq/fourier_motzkin.hpp"
#include "chcmq/smtlib.hpp"

#include <algorithm>

namespace chcmq {

namespace {

std::optional<std::int64_t> int_value(const Expr& e) {
    if (e.op() == Op::IntConst) return e.value();
    return std::nullopt;
}

Expr simplify_node(const Expr& e) {
    switch (e.op()) {
    case Op::Not: {
        const Expr& a = e.arg(0);
        if (a.op() == Op::BoolConst) return Expr::bool_const(!a.is_true());
        if (a.op() == Op::Not) return a.arg(0);
        return e;
    }
    case Op::And:
    case Op::Or: {
        const bool conj = e.op() == Op::And;
        std::vector<Expr> parts;
        for (const auto& a : e.args()) {
            if (a.op() == e.op()) {
                for (const auto& b : a.args())
                    if (std::find(parts.begin(), parts.end(), b) == parts.end()) parts.push_back(b);
                continue;
            }
            if (a.op() == Op::BoolConst) {
                if (a.is_true() != conj) return a;  // false in And, true in Or
                continue;
            }
            if (std::find(parts.begin(), parts.end(), a) == parts.end()) parts.push_back(a);
        }
        return conj ? Expr::and_(std::move(parts)) : Expr::or_(std::move(parts));
    }
    case Op::Implies: {
        const Expr& a = e.arg(0);
        const Expr& b = e.arg(1);
        if (a.is_false() || b.is_true() || a == b) return Expr::tt();
        if (a.is_true()) return b;
        if (b.is_false()) return simplify_node(Expr::not_(a));
        return e;
    }
    case Op::Iff: {
        const Expr& a = e.arg(0);
        const Expr& b = e.arg(1);
        if (a == b) return Expr::tt();
        if (a.op() == Op::BoolConst) return a.is_true() ? b : simplify_node(Expr::not_(b));
        if (b.op() == Op::BoolConst) return b.is_true() ? a : simplify_node(Expr::not_(a));
        return e;
    }
    case Op::Ite: {
        const Expr& c = e.arg(0);
        if (c.op() == Op::BoolConst) return c.is_true() ? e.arg(1) : e.arg(2);
        if (e.arg(1) == e.arg(2)) return e.arg(1);
        return e;
    }
    case Op::Eq:
        if (e.arg(0) == e.arg(1)) return Expr::tt();
        if (e.arg(0).op() == Op::Ctor && e.arg(1).op() == Op::Ctor) {
            const Expr& a = e.arg(0);
            const Expr& b = e.arg(1);
            if (a.ctor_index() != b.ctor_index()) return Expr::ff();
            std::vector<Expr> parts;
            for (std::size_t i = 0; i < a.args().size(); ++i) parts.push_back(simplify_node(Expr::eq(a.arg(i), b.arg(i))));
            return simplify_node(Expr::and_(std::move(parts)));
        }
        [[fallthrough]];
    case Op::Lt:
    case Op::Le:
    case Op::Ge:
    case Op::Gt: {
        auto x = int_value(e.arg(0));
        auto y = int_value(e.arg(1));
        if (!x || !y) return e;
        switch (e.op()) {
        case Op::Eq: return Expr::bool_const(*x == *y);
        case Op::Lt: return Expr::bool_const(*x < *y);
        case Op::Le: return Expr::bool_const(*x <= *y);
        case Op::Ge: return Expr::bool_const(*x >= *y);
        default: return Expr::bool_const(*x > *y);
        }
    }
    default: return e;
    }
}

bool is_relation_atom(const Expr& e) { return is_relation(e.op()); }

bool is_literal(const Expr& e) {
    if (e.is_var() || is_relation_atom(e) || e.op() == Op::BoolConst) return true;
    return e.op() == Op::Not && (e.arg(0).is_var() || is_relation_atom(e.arg(0)));
}

bool subset_of(const std::vector<Expr>& small, const std::vector<Expr>& big) {
    return std::all_of(small.begin(), small.end(),
                       [&](const Expr& x) { return std::find(big.begin(), big.end(), x) != big.end(); });
}

bool vars_within(const Expr& e, const std::set<std::string>& keep) {
    for (const auto& v : free_vars(e))
        if (!keep.count(v.name())) return false;
    return true;
}

}  // namespace

Expr simplify(const Expr& c) { return transform(c, simplify_node); }

std::optional<std::vector<Expr>> atomic_conjuncts(const Expr& c) {
    std::vector<Expr> out;
    for (const auto& k : conjuncts(c)) {
        const bool ok = is_literal(k) || (k.op() == Op::Iff && is_literal(k.arg(0)) && is_literal(k.arg(1)));
        if (!ok) return std::nullopt;
        out.push_back(k);
    }
    return out;
}

ConstraintEngine::ConstraintEngine(const SortTable& sorts, std::shared_ptr<Oracle> oracle)
    : sorts_(&sorts), oracle_(std::move(oracle)) {}

Verdict ConstraintEngine::satisfiability(const Expr& c) {
    const Expr s = simplify(c);
    if (s.is_true()) return Verdict::Sat;
    if (s.is_false()) return Verdict::Unsat;
    ++calls_;
    return oracle_->check(smt_query_body(*sorts_, s));
}

Verdict ConstraintEngine::entailment(const Expr& c, const Expr& d) {
    const Expr sd = simplify(d);
    const Expr sc = simplify(c);
    if (sd.is_true() || sc.is_false()) return Verdict::Unsat;
    if (subset_of(conjuncts(sd), conjuncts(sc))) return Verdict::Unsat;
    return satisfiability(Expr::and_({sc, Expr::not_(sd)}));
}

Expr ConstraintEngine::project(const Expr& c, const std::set<std::string>& keep) {
    std::vector<Expr> kept;
    std::vector<LinearConstraint> system;
    bool eliminating = false;
    for (const auto& k : conjuncts(simplify(c))) {
        const bool inside = vars_within(k, keep);
        auto lin = to_linear(k);
        if (lin) {
            system.push_back(*lin);
            if (!inside) eliminating = true;
        }
        if (inside && !lin) kept.push_back(k);
    }
    std::vector<Expr> exact = kept;
    std::vector<Expr> safe = kept;
    for (const auto& l : system) {
        bool inside = true;
        for (const auto& [v, k] : l.coeffs) inside = inside && keep.count(v);
        if (inside) safe.push_back(to_expr(l));
    }
    if (!eliminating) return simplify(Expr::and_(std::move(safe)));
    if (auto reduced = fm_eliminate(system, keep)) {
        for (const auto& l : *reduced) exact.push_back(to_expr(l));
        Expr candidate = simplify(Expr::and_(std::move(exact)));
        if (entails(c, candidate)) return candidate;
    }
    return simplify(Expr::and_(std::move(safe)));
}

Expr ConstraintEngine::generalize(const Expr& d, const Expr& c) {
    auto parts = atomic_conjuncts(d);
    if (!parts) return Expr::tt();
    std::vector<Expr> kept;
    for (const auto& a : *parts)
        if (entails(c, a)) kept.push_back(a);
    if (kept.size() == parts->size()) return d;
    return Expr::and_(std::move(kept));
}

}  // namespace chcmq
