#include "chcmq/clause.hpp"

#include "chcmq/unify.hpp"

#include <sstream>
#include <stdexcept>

namespace chcmq {

const char* origin_name(Origin o) {
    switch (o) {
    case Origin::Source: return "source";
    case Origin::R1: return "R1";
    case Origin::R2: return "R2";
    case Origin::R3: return "R3";
    case Origin::R4: return "R4";
    }
    return "?";
}

int PredDecl::adt_position() const {
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] == ArgRole::Adt) return static_cast<int>(i);
    return -1;
}

const PredDecl& Problem::declare(PredDecl decl) {
    if (index_.count(decl.name)) throw std::invalid_argument("predicate '" + decl.name + "' declared twice");
    index_.emplace(decl.name, preds_.size());
    preds_.push_back(std::move(decl));
    return preds_.back();
}

const PredDecl* Problem::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &preds_[it->second];
}

const PredDecl& Problem::pred(const std::string& name) const {
    if (const PredDecl* d = find(name)) return *d;
    throw std::out_of_range("undeclared predicate '" + name + "'");
}

CataArgs Problem::cata_args(const Atom& a) const {
    const PredDecl& d = pred(a.pred);
    if (d.kind != PredKind::Cata) throw std::invalid_argument(a.pred + " is not a catamorphism");
    CataArgs out;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        switch (d.roles[i]) {
        case ArgRole::In: out.in.push_back(a.args[i]); break;
        case ArgRole::Adt: out.adt = a.args[i]; break;
        case ArgRole::Out: out.out.push_back(a.args[i]); break;
        }
    }
    return out;
}

const PredDecl& Problem::true_pred(Sort adt) {
    const std::string name = "true_" + sorts.smt_name(adt);
    if (const PredDecl* d = find(name)) return *d;
    const PredDecl& decl = declare({name, {adt}, PredKind::True, {}});
    const AdtDecl& info = sorts.adt(adt);
    for (std::size_t c = 0; c < info.ctors.size(); ++c) {
        std::vector<Expr> args;
        for (std::size_t i = 0; i < info.ctors[c].args.size(); ++i)
            args.push_back(Expr::var("X" + std::to_string(i + 1), info.ctors[c].args[i]));
        Clause fact;
        fact.head = Atom{name, {Expr::ctor(adt, static_cast<int>(c), info.ctors[c].name, std::move(args))}};
        program.push_back(std::move(fact));
    }
    return decl;
}

std::vector<const Clause*> Problem::clauses_of(const std::string& name) const {
    std::vector<const Clause*> out;
    for (const auto* set : {&program, &property})
        for (const auto& c : *set)
            if (c.head && c.head->pred == name) out.push_back(&c);
    return out;
}

VarList vars_of(const Atom& a, VarFilter filter) {
    VarList out;
    for (const auto& x : a.args) collect_vars(x, out, filter);
    return out;
}

VarList vars_of(const Clause& c, VarFilter filter) {
    VarList out;
    if (c.head)
        for (const auto& x : c.head->args) collect_vars(x, out, filter);
    collect_vars(c.constraint, out, filter);
    for (const auto& b : c.body)
        for (const auto& x : b.args) collect_vars(x, out, filter);
    return out;
}

namespace {

std::string canonical_name(std::size_t i) {
    std::string s(1, static_cast<char>('A' + i % 26));
    if (i >= 26) s += std::to_string(i / 26);
    return s;
}

}  // namespace

Clause canonical(const Clause& c) {
    Substitution s;
    std::size_t i = 0;
    for (const auto& v : vars_of(c)) s.bind(v, Expr::var(canonical_name(i++), v.sort()));
    return s.apply(c);
}

std::string to_string(const Atom& a) {
    std::ostringstream os;
    os << a.pred;
    if (!a.args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) os << ',';
            os << to_string(a.args[i]);
        }
        os << ')';
    }
    return os.str();
}

std::string to_string(const Clause& c) {
    std::ostringstream os;
    os << (c.head ? to_string(*c.head) : "false");
    std::vector<std::string> items;
    if (!c.constraint.is_true()) items.push_back(to_string(c.constraint));
    for (const auto& b : c.body) items.push_back(to_string(b));
    if (!items.empty()) {
        os << " :- ";
        for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : "") << items[i];
    }
    os << '.';
    return os.str();
}

namespace {

const char* role_name(ArgRole r) {
    switch (r) {
    case ArgRole::In: return "in";
    case ArgRole::Adt: return "adt";
    case ArgRole::Out: return "out";
    }
    return "?";
}

}  // namespace

std::string to_surface(const Problem& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.sorts.adt_count(); ++i) {
        const AdtDecl& d = p.sorts.adt(p.sorts.adt_sort(i));
        if (d.shape != AdtShape::User) continue;
        os << "sort " << d.name << " = ";
        for (std::size_t c = 0; c < d.ctors.size(); ++c) {
            if (c) os << " | ";
            os << d.ctors[c].name;
            if (!d.ctors[c].args.empty()) {
                os << '(';
                for (std::size_t k = 0; k < d.ctors[c].args.size(); ++k)
                    os << (k ? ", " : "") << p.sorts.name(d.ctors[c].args[k]);
                os << ')';
            }
        }
        os << ".\n";
    }
    for (const auto& d : p.preds()) {
        os << (d.kind == PredKind::Cata ? "cata " : "pred ") << d.name << '(';
        for (std::size_t i = 0; i < d.args.size(); ++i) {
            if (i) os << ", ";
            if (d.kind == PredKind::Cata) os << role_name(d.roles[i]) << ": ";
            os << p.sorts.name(d.args[i]);
        }
        os << ").\n";
    }
    auto section = [&](const std::vector<Clause>& cs) {
        if (cs.empty()) return;
        os << '\n';
        for (const auto& c : cs) os << to_string(canonical(c)) << '\n';
    };
    section(p.program);
    section(p.property);
    section(p.queries);
    return os.str();
}

}  // namespace chcmq
