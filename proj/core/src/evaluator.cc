#include "chcmq/evaluator.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace chcmq {

bool operator<(const Value& a, const Value& b) {
    if (a.sort != b.sort) return a.sort < b.sort;
    if (a.num != b.num) return a.num < b.num;
    if (a.ctor != b.ctor) return a.ctor < b.ctor;
    return a.args < b.args;
}

std::string to_string(const Value& v) {
    if (v.sort.is_bool()) return v.truth() ? "true" : "false";
    if (v.sort.is_int()) return std::to_string(v.num);
    std::ostringstream os;
    os << '#' << v.ctor;
    if (!v.args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < v.args.size(); ++i) os << (i ? "," : "") << to_string(v.args[i]);
        os << ')';
    }
    return os.str();
}

Value list_value(Sort s, std::span<const std::int64_t> elems) {
    Value out = Value::adt(s, SortTable::kNil, {});
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
        out = Value::adt(s, SortTable::kCons, {Value::integer(*it), std::move(out)});
    return out;
}

Value evaluate(const Expr& e, const Env& env) {
    auto sub = [&](std::size_t i) { return evaluate(e.arg(i), env); };
    switch (e.op()) {
    case Op::Var: {
        auto it = env.find(e.name());
        if (it == env.end()) throw EvalError("unbound variable " + e.name());
        return it->second;
    }
    case Op::IntConst: return Value::integer(e.value());
    case Op::BoolConst: return Value::boolean(e.value() != 0);
    case Op::Linear: {
        std::int64_t acc = e.value();
        for (std::size_t i = 0; i < e.args().size(); ++i) acc += e.coeffs()[i] * sub(i).num;
        return Value::integer(acc);
    }
    case Op::Ctor: {
        std::vector<Value> args;
        for (std::size_t i = 0; i < e.args().size(); ++i) args.push_back(sub(i));
        return Value::adt(e.sort(), e.ctor_index(), std::move(args));
    }
    case Op::Ite: return sub(0).truth() ? sub(1) : sub(2);
    case Op::Not: return Value::boolean(!sub(0).truth());
    case Op::And:
        for (std::size_t i = 0; i < e.args().size(); ++i)
            if (!sub(i).truth()) return Value::boolean(false);
        return Value::boolean(true);
    case Op::Or:
        for (std::size_t i = 0; i < e.args().size(); ++i)
            if (sub(i).truth()) return Value::boolean(true);
        return Value::boolean(false);
    case Op::Implies: return Value::boolean(!sub(0).truth() || sub(1).truth());
    case Op::Iff: return Value::boolean(sub(0).truth() == sub(1).truth());
    case Op::Eq: return Value::boolean(sub(0) == sub(1));
    case Op::Lt: return Value::boolean(sub(0).num < sub(1).num);
    case Op::Le: return Value::boolean(sub(0).num <= sub(1).num);
    case Op::Ge: return Value::boolean(sub(0).num >= sub(1).num);
    case Op::Gt: return Value::boolean(sub(0).num > sub(1).num);
    }
    throw EvalError("unknown node");
}

bool holds(const Expr& f, const Env& env) { return evaluate(f, env).truth(); }

bool match_value(const Expr& pattern, const Value& v, Env& env) {
    if (pattern.is_var()) {
        auto [it, fresh] = env.emplace(pattern.name(), v);
        return fresh || it->second == v;
    }
    if (pattern.op() == Op::Ctor) {
        if (v.ctor != pattern.ctor_index() || v.args.size() != pattern.args().size()) return false;
        for (std::size_t i = 0; i < v.args.size(); ++i)
            if (!match_value(pattern.arg(i), v.args[i], env)) return false;
        return true;
    }
    try {
        return evaluate(pattern, env) == v;
    } catch (const EvalError&) {
        return false;
    }
}

namespace {

bool bound(const Expr& e, const Env& env) {
    for (const auto& v : free_vars(e))
        if (!env.count(v.name())) return false;
    return true;
}

// Binds variables forced by top-level equalities and literals.
void propagate(const Expr& constraint, Env& env) {
    const auto parts = conjuncts(constraint);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& k : parts) {
            if (k.is_var() && !env.count(k.name())) {
                env.emplace(k.name(), Value::boolean(true));
                changed = true;
            } else if (k.op() == Op::Not && k.arg(0).is_var() && !env.count(k.arg(0).name())) {
                env.emplace(k.arg(0).name(), Value::boolean(false));
                changed = true;
            } else if (k.op() == Op::Eq || k.op() == Op::Iff) {
                for (int side = 0; side < 2; ++side) {
                    const Expr& lhs = k.arg(side);
                    const Expr& rhs = k.arg(1 - side);
                    if (lhs.is_var() && !env.count(lhs.name()) && bound(rhs, env)) {
                        env.emplace(lhs.name(), evaluate(rhs, env));
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
}

struct CataSolver {
    const Problem& p;
    int range;

    std::set<std::vector<Value>> outputs(const std::string& pred, std::span<const Value> inputs, const Value& adt) {
        const PredDecl& d = p.pred(pred);
        std::set<std::vector<Value>> out;
        for (const Clause* c : p.clauses_of(pred)) {
            Env env;
            bool ok = true;
            std::size_t in_i = 0;
            for (std::size_t i = 0; i < d.roles.size() && ok; ++i) {
                if (d.roles[i] == ArgRole::In) ok = match_value(c->head->args[i], inputs[in_i++], env);
                else if (d.roles[i] == ArgRole::Adt) ok = match_value(c->head->args[i], adt, env);
            }
            if (!ok) continue;
            solve(*c, env, std::vector<bool>(c->body.size(), false), out);
        }
        return out;
    }

    void solve(const Clause& c, Env env, std::vector<bool> done, std::set<std::vector<Value>>& out) {
        propagate(c.constraint, env);
        for (std::size_t i = 0; i < c.body.size(); ++i) {
            if (done[i]) continue;
            const Atom& a = c.body[i];
            const CataArgs ca = p.cata_args(a);
            if (!bound(ca.adt, env)) continue;
            std::vector<Value> ins;
            bool ready = true;
            for (const auto& x : ca.in) {
                if (!bound(x, env)) {
                    ready = false;
                    break;
                }
                ins.push_back(evaluate(x, env));
            }
            if (!ready) continue;
            done[i] = true;
            for (const auto& tuple : outputs(a.pred, ins, evaluate(ca.adt, env))) {
                Env next = env;
                bool ok = true;
                for (std::size_t k = 0; k < tuple.size() && ok; ++k) ok = match_value(ca.out[k], tuple[k], next);
                if (ok) solve(c, std::move(next), done, out);
            }
            return;
        }
        for (bool d : done)
            if (!d) throw EvalError("catamorphism body atom with unbound inputs in " + to_string(c));
        std::vector<Expr> open;
        for (const auto& v : vars_of(c))
            if (!env.count(v.name())) {
                if (v.sort().is_adt()) throw EvalError("unbound ADT variable " + v.name());
                open.push_back(v);
            }
        enumerate(c, env, open, 0, out);
    }

    void enumerate(const Clause& c, Env& env, const std::vector<Expr>& open, std::size_t k,
                   std::set<std::vector<Value>>& out) {
        if (k == open.size()) {
            if (!holds(c.constraint, env)) return;
            const CataArgs ca = p.cata_args(*c.head);
            std::vector<Value> tuple;
            for (const auto& y : ca.out) tuple.push_back(evaluate(y, env));
            out.insert(std::move(tuple));
            return;
        }
        const Expr& v = open[k];
        auto try_value = [&](Value val) {
            env[v.name()] = std::move(val);
            enumerate(c, env, open, k + 1, out);
        };
        if (v.sort().is_bool()) {
            try_value(Value::boolean(false));
            try_value(Value::boolean(true));
        } else {
            for (int x = -range; x <= range; ++x) try_value(Value::integer(x));
        }
        env.erase(v.name());
    }
};

}  // namespace

std::vector<std::vector<Value>> cata_outputs(const Problem& p, const std::string& pred,
                                             std::span<const Value> inputs, const Value& adt, int range) {
    CataSolver s{p, range};
    auto set = s.outputs(pred, inputs, adt);
    return {set.begin(), set.end()};
}

}  // namespace chcmq
