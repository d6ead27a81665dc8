#include "chcmq/unify.hpp"

#include <stdexcept>

namespace chcmq {

bool Substitution::bind(const Expr& var, const Expr& term) {
    if (!var.is_var()) throw std::invalid_argument("bind: not a variable");
    if (var.sort() != term.sort()) return false;
    map_.insert_or_assign(var.name(), term);
    return true;
}

const Expr* Substitution::lookup(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second;
}

Expr Substitution::apply(const Expr& e) const {
    if (map_.empty()) return e;
    return transform(e, [this](const Expr& n) {
        if (!n.is_var()) return n;
        const Expr* t = lookup(n.name());
        return t == nullptr ? n : *t;
    });
}

Atom Substitution::apply(const Atom& a) const {
    Atom out{a.pred, {}};
    out.args.reserve(a.args.size());
    for (const auto& x : a.args) out.args.push_back(apply(x));
    return out;
}

Clause Substitution::apply(const Clause& c) const {
    Clause out = c;
    if (out.head) out.head = apply(*out.head);
    out.constraint = apply(c.constraint);
    for (auto& b : out.body) b = apply(b);
    return out;
}

Substitution Substitution::resolved() const {
    Substitution out = *this;
    for (bool changed = true; changed;) {
        changed = false;
        for (auto& [name, term] : out.map_) {
            Expr next = out.apply(term);
            if (next != term) {
                term = std::move(next);
                changed = true;
            }
        }
    }
    return out;
}

namespace {

Expr walk(const Expr& e, const Substitution& s) {
    Expr cur = e;
    while (cur.is_var()) {
        const Expr* t = s.lookup(cur.name());
        if (t == nullptr || *t == cur) break;
        cur = *t;
    }
    return cur;
}

bool occurs(const std::string& name, const Expr& e, const Substitution& s) {
    Expr t = walk(e, s);
    if (t.is_var()) return t.name() == name;
    for (const auto& a : t.args())
        if (occurs(name, a, s)) return true;
    return false;
}

}  // namespace

bool unify(const Expr& a, const Expr& b, Substitution& s) {
    Expr x = walk(a, s);
    Expr y = walk(b, s);
    if (x.sort() != y.sort()) return false;
    if (x == y) return true;
    if (y.is_var()) {
        if (x.op() != Op::Var && occurs(y.name(), x, s)) return false;
        return s.bind(y, x);
    }
    if (x.is_var()) {
        if (occurs(x.name(), y, s)) return false;
        return s.bind(x, y);
    }
    if (x.op() == Op::Ctor && y.op() == Op::Ctor) {
        if (x.ctor_index() != y.ctor_index() || x.args().size() != y.args().size()) return false;
        for (std::size_t i = 0; i < x.args().size(); ++i)
            if (!unify(x.arg(i), y.arg(i), s)) return false;
        return true;
    }
    // Arithmetic and ite subterms: syntactic equality only, after resolving
    // bound variables inside them.
    const Substitution r = s.resolved();
    return r.apply(x) == r.apply(y);
}

std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
    if (a.pred != b.pred || a.args.size() != b.args.size()) return std::nullopt;
    Substitution s;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!unify(a.args[i], b.args[i], s)) return std::nullopt;
    return s.resolved();
}

bool match(const Expr& pattern, const Expr& target, Substitution& s) {
    if (pattern.sort() != target.sort()) return false;
    if (pattern.is_var()) {
        if (const Expr* t = s.lookup(pattern.name())) return *t == target;
        return s.bind(pattern, target);
    }
    if (pattern.op() != target.op()) return false;
    if (pattern.op() == Op::Ctor) {
        if (pattern.ctor_index() != target.ctor_index()) return false;
        for (std::size_t i = 0; i < pattern.args().size(); ++i)
            if (!match(pattern.arg(i), target.arg(i), s)) return false;
        return true;
    }
    return s.apply(pattern) == target;
}

bool match(const Atom& pattern, const Atom& target, Substitution& s) {
    if (pattern.pred != target.pred || pattern.args.size() != target.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match(pattern.args[i], target.args[i], s)) return false;
    return true;
}

std::string base_name(const std::string& var) {
    const auto pos = var.find("__");
    return pos == std::string::npos ? var : var.substr(0, pos);
}

std::string NameSupply::fresh(const std::string& hint) {
    std::string base = base_name(hint);
    if (base.empty() || base == "_") base = "V";
    for (;;) {
        std::string name = base + "__" + std::to_string(++counters_[base]);
        if (taken_.insert(name).second) return name;
    }
}

void NameSupply::reserve(const Clause& c) {
    for (const auto& v : vars_of(c)) taken_.insert(v.name());
}

Clause rename_apart(const Clause& c, const std::set<std::string>& avoid, NameSupply& names) {
    Substitution s;
    for (const auto& v : vars_of(c))
        if (avoid.count(v.name())) s.bind(v, names.fresh_var(v.name(), v.sort()));
    return s.apply(c);
}

Clause rename_fresh(const Clause& c, NameSupply& names) {
    Substitution s;
    for (const auto& v : vars_of(c)) s.bind(v, names.fresh_var(v.name(), v.sort()));
    return s.apply(c);
}

bool variant(const Atom& a, const Atom& b, Substitution& s) {
    if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
    Substitution trial = s;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!match(a.args[i], b.args[i], trial)) return false;
    std::set<std::string> images;
    for (const auto& [name, term] : trial.bindings()) {
        if (!term.is_var() || !images.insert(term.name()).second) return false;
    }
    s = std::move(trial);
    return true;
}

}  // namespace chcmq
