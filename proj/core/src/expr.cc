#include "chcmq/expr.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace chcmq {

struct Expr::Node {
    explicit Node(Op o) : op(o) {}
    Op op;
    Sort sort = Sort::boolean();
    std::string name;
    std::int64_t value = 0;
    int ctor = -1;
    std::vector<Expr> args;
    std::vector<std::int64_t> coeffs;
    std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::shared_ptr<const Expr::Node> finish(Expr::Node n);

}  // namespace

bool is_relation(Op op) {
    switch (op) {
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Ge:
    case Op::Gt: return true;
    default: return false;
    }
}

namespace {

std::shared_ptr<const Expr::Node> finish(Expr::Node n) {
    std::size_t h = std::hash<int>{}(static_cast<int>(n.op));
    h = mix(h, static_cast<std::size_t>(n.sort.kind()) * 7919 + n.sort.adt_id());
    h = mix(h, std::hash<std::string>{}(n.name));
    h = mix(h, std::hash<std::int64_t>{}(n.value));
    h = mix(h, static_cast<std::size_t>(n.ctor + 1));
    for (const auto& a : n.args) h = mix(h, a.hash());
    for (auto c : n.coeffs) h = mix(h, std::hash<std::int64_t>{}(c));
    n.hash = h;
    return std::make_shared<const Expr::Node>(std::move(n));
}

void require_bool(const Expr& e, const char* what) {
    if (!e.sort().is_bool()) throw std::invalid_argument(std::string(what) + ": operand is not Bool");
}

}  // namespace

Expr::Expr() : Expr(bool_const(true)) {}

Expr Expr::var(std::string name, Sort sort) {
    Node n{Op::Var};
    n.sort = sort;
    n.name = std::move(name);
    return Expr(finish(std::move(n)));
}

Expr Expr::int_const(std::int64_t v) {
    Node n{Op::IntConst};
    n.sort = Sort::integer();
    n.value = v;
    return Expr(finish(std::move(n)));
}

Expr Expr::bool_const(bool v) {
    static const Expr t = [] {
        Node n{Op::BoolConst};
        n.value = 1;
        return Expr(finish(std::move(n)));
    }();
    static const Expr f = Expr(finish(Node{Op::BoolConst}));
    return v ? t : f;
}

bool Expr::is_linear_term() const {
    return op() == Op::Var ? sort().is_int() : (op() == Op::IntConst || op() == Op::Linear);
}

Expr Expr::linear(std::vector<std::pair<std::int64_t, Expr>> terms, std::int64_t constant) {
    std::map<std::string, std::int64_t> acc;
    for (auto& [k, v] : terms) {
        if (!v.is_var() || !v.sort().is_int()) throw std::invalid_argument("linear: non-Int variable");
        acc[v.name()] += k;
    }
    Node n{Op::Linear};
    n.sort = Sort::integer();
    n.value = constant;
    for (auto& [name, k] : acc) {
        if (k == 0) continue;
        n.args.push_back(Expr::var(name, Sort::integer()));
        n.coeffs.push_back(k);
    }
    if (n.args.empty()) return int_const(constant);
    if (n.args.size() == 1 && n.coeffs[0] == 1 && constant == 0) return n.args[0];
    return Expr(finish(std::move(n)));
}

namespace {

void linear_parts(const Expr& e, std::int64_t k, std::vector<std::pair<std::int64_t, Expr>>& terms,
                  std::int64_t& constant) {
    switch (e.op()) {
    case Op::Var:
        if (!e.sort().is_int()) break;
        terms.emplace_back(k, e);
        return;
    case Op::IntConst: constant += k * e.value(); return;
    case Op::Linear:
        for (std::size_t i = 0; i < e.args().size(); ++i) terms.emplace_back(k * e.coeffs()[i], e.args()[i]);
        constant += k * e.value();
        return;
    default: break;
    }
    throw std::invalid_argument("arithmetic on a non-linear term: " + to_string(e));
}

}  // namespace

Expr Expr::add(const Expr& a, const Expr& b) {
    std::vector<std::pair<std::int64_t, Expr>> terms;
    std::int64_t constant = 0;
    linear_parts(a, 1, terms, constant);
    linear_parts(b, 1, terms, constant);
    return linear(std::move(terms), constant);
}

Expr Expr::scale(std::int64_t k, const Expr& a) {
    std::vector<std::pair<std::int64_t, Expr>> terms;
    std::int64_t constant = 0;
    linear_parts(a, k, terms, constant);
    return linear(std::move(terms), constant);
}

Expr Expr::ctor(Sort sort, int index, std::string name, std::vector<Expr> args) {
    Node n{Op::Ctor};
    n.sort = sort;
    n.ctor = index;
    n.name = std::move(name);
    n.args = std::move(args);
    return Expr(finish(std::move(n)));
}

Expr Expr::ite(Expr cond, Expr then_e, Expr else_e) {
    require_bool(cond, "ite");
    if (then_e.sort() != else_e.sort()) throw std::invalid_argument("ite: branch sorts differ");
    Node n{Op::Ite};
    n.sort = then_e.sort();
    n.args = {std::move(cond), std::move(then_e), std::move(else_e)};
    return Expr(finish(std::move(n)));
}

Expr Expr::not_(Expr f) {
    require_bool(f, "not");
    Node n{Op::Not};
    n.args = {std::move(f)};
    return Expr(finish(std::move(n)));
}

Expr Expr::and_(std::vector<Expr> fs) {
    if (fs.empty()) return tt();
    if (fs.size() == 1) return fs[0];
    for (const auto& f : fs) require_bool(f, "and");
    Node n{Op::And};
    n.args = std::move(fs);
    return Expr(finish(std::move(n)));
}

Expr Expr::or_(std::vector<Expr> fs) {
    if (fs.empty()) return ff();
    if (fs.size() == 1) return fs[0];
    for (const auto& f : fs) require_bool(f, "or");
    Node n{Op::Or};
    n.args = std::move(fs);
    return Expr(finish(std::move(n)));
}

Expr Expr::implies(Expr a, Expr b) {
    require_bool(a, "implies");
    require_bool(b, "implies");
    Node n{Op::Implies};
    n.args = {std::move(a), std::move(b)};
    return Expr(finish(std::move(n)));
}

Expr Expr::iff(Expr a, Expr b) {
    require_bool(a, "iff");
    require_bool(b, "iff");
    Node n{Op::Iff};
    n.args = {std::move(a), std::move(b)};
    return Expr(finish(std::move(n)));
}

Expr Expr::eq(Expr a, Expr b) {
    if (a.sort() != b.sort()) throw std::invalid_argument("equality between different sorts");
    if (a.sort().is_bool()) return iff(std::move(a), std::move(b));
    return rel(Op::Eq, std::move(a), std::move(b));
}

Expr Expr::rel(Op op, Expr a, Expr b) {
    if (!is_relation(op)) throw std::invalid_argument("rel: not a relation");
    if (op == Op::Eq) {
        if (a.sort() != b.sort() || a.sort().is_bool())
            throw std::invalid_argument("rel: Eq needs two Int or two ADT operands of one sort");
    } else if (!a.sort().is_int() || !b.sort().is_int()) {
        throw std::invalid_argument("rel: arithmetic comparison on non-Int operands");
    }
    Node n{op};
    n.args = {std::move(a), std::move(b)};
    return Expr(finish(std::move(n)));
}

Op Expr::op() const { return node_->op; }
Sort Expr::sort() const { return node_->sort; }
const std::string& Expr::name() const { return node_->name; }
std::int64_t Expr::value() const { return node_->value; }
int Expr::ctor_index() const { return node_->ctor; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::span<const std::int64_t> Expr::coeffs() const { return node_->coeffs; }
std::size_t Expr::hash() const { return node_->hash; }

int compare(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    if (a.sort() != b.sort()) return a.sort() < b.sort() ? -1 : 1;
    if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
    if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
    if (a.ctor_index() != b.ctor_index()) return a.ctor_index() < b.ctor_index() ? -1 : 1;
    auto ca = a.coeffs(), cb = b.coeffs();
    if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (ca[i] != cb[i]) return ca[i] < cb[i] ? -1 : 1;
    auto xa = a.args(), xb = b.args();
    if (xa.size() != xb.size()) return xa.size() < xb.size() ? -1 : 1;
    for (std::size_t i = 0; i < xa.size(); ++i)
        if (int c = compare(xa[i], xb[i]); c != 0) return c;
    return 0;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

void VarList::add(const Expr& v) {
    if (seen_.insert(v.name()).second) vars_.push_back(v);
}

void collect_vars(const Expr& e, VarList& out, VarFilter filter) {
    if (e.is_var()) {
        const bool keep = filter == VarFilter::All || (filter == VarFilter::Basic && e.sort().is_basic()) ||
                          (filter == VarFilter::Adt && e.sort().is_adt());
        if (keep) out.add(e);
        return;
    }
    for (const auto& a : e.args()) collect_vars(a, out, filter);
}

VarList free_vars(const Expr& e, VarFilter filter) {
    VarList out;
    collect_vars(e, out, filter);
    return out;
}

Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn) {
    switch (e.op()) {
    case Op::Var:
    case Op::IntConst:
    case Op::BoolConst: return fn(e);
    case Op::Linear: {
        const std::int64_t constant = e.value();
        bool changed = false;
        std::vector<Expr> rebuilt;
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            Expr r = transform(e.args()[i], fn);
            changed = changed || r != e.args()[i];
            rebuilt.push_back(r);
        }
        if (!changed) return fn(e);
        Expr sum = Expr::int_const(constant);
        for (std::size_t i = 0; i < rebuilt.size(); ++i) sum = Expr::add(sum, Expr::scale(e.coeffs()[i], rebuilt[i]));
        return fn(sum);
    }
    case Op::Ctor: {
        std::vector<Expr> args;
        for (const auto& a : e.args()) args.push_back(transform(a, fn));
        return fn(Expr::ctor(e.sort(), e.ctor_index(), e.name(), std::move(args)));
    }
    case Op::Ite:
        return fn(Expr::ite(transform(e.arg(0), fn), transform(e.arg(1), fn), transform(e.arg(2), fn)));
    case Op::Not: return fn(Expr::not_(transform(e.arg(0), fn)));
    case Op::And:
    case Op::Or: {
        std::vector<Expr> args;
        for (const auto& a : e.args()) args.push_back(transform(a, fn));
        return fn(e.op() == Op::And ? Expr::and_(std::move(args)) : Expr::or_(std::move(args)));
    }
    case Op::Implies: return fn(Expr::implies(transform(e.arg(0), fn), transform(e.arg(1), fn)));
    case Op::Iff: return fn(Expr::iff(transform(e.arg(0), fn), transform(e.arg(1), fn)));
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Ge:
    case Op::Gt: return fn(Expr::rel(e.op(), transform(e.arg(0), fn), transform(e.arg(1), fn)));
    }
    throw std::logic_error("transform: unknown op");
}

std::vector<Expr> conjuncts(const Expr& f) {
    std::vector<Expr> out;
    std::function<void(const Expr&)> walk = [&](const Expr& g) {
        if (g.op() == Op::And) {
            for (const auto& a : g.args()) walk(a);
        } else if (!g.is_true()) {
            out.push_back(g);
        }
    };
    walk(f);
    return out;
}

int ctor_depth(const Expr& e) {
    if (e.op() != Op::Ctor) return 0;
    int d = 0;
    for (const auto& a : e.args()) d = std::max(d, ctor_depth(a));
    return d + 1;
}

namespace {

int precedence(const Expr& e) {
    switch (e.op()) {
    case Op::Iff: return 6;  // printed as `=`
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return 5;
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Ge:
    case Op::Gt: return 6;
    case Op::Linear: return 7;
    default: return 9;
    }
}

void print(std::ostream& os, const Expr& e, int ctx);

void print_wrapped(std::ostream& os, const Expr& e, int min_prec) {
    if (precedence(e) < min_prec) {
        os << '(';
        print(os, e, 0);
        os << ')';
    } else {
        print(os, e, min_prec);
    }
}

void print_list(std::ostream& os, const Expr& e) {
    os << '[';
    const Expr* cur = &e;
    bool first = true;
    while (cur->op() == Op::Ctor && cur->name() == "cons") {
        if (!first) os << ',';
        first = false;
        print(os, cur->arg(0), 0);
        cur = &cur->arg(1);
    }
    if (!(cur->op() == Op::Ctor && cur->name() == "nil")) {
        os << '|';
        print(os, *cur, 0);
    }
    os << ']';
}

const char* rel_symbol(Op op) {
    switch (op) {
    case Op::Eq: return "=";
    case Op::Lt: return "<";
    case Op::Le: return "=<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    default: return "?";
    }
}

void print(std::ostream& os, const Expr& e, int) {
    switch (e.op()) {
    case Op::Var: os << e.name(); return;
    case Op::IntConst: os << e.value(); return;
    case Op::BoolConst: os << (e.value() ? "true" : "false"); return;
    case Op::Linear: {
        bool first = true;
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            std::int64_t k = e.coeffs()[i];
            if (first) {
                if (k < 0) os << '-';
            } else {
                os << (k < 0 ? " - " : " + ");
            }
            const std::int64_t mag = k < 0 ? -k : k;
            if (mag != 1) os << mag << '*';
            os << e.args()[i].name();
            first = false;
        }
        if (e.value() != 0) os << (e.value() < 0 ? " - " : " + ") << (e.value() < 0 ? -e.value() : e.value());
        return;
    }
    case Op::Ctor:
        if (e.name() == "nil") {
            os << "[]";
        } else if (e.name() == "cons") {
            print_list(os, e);
        } else {
            os << e.name();
            if (!e.args().empty()) {
                os << '(';
                for (std::size_t i = 0; i < e.args().size(); ++i) {
                    if (i) os << ',';
                    print(os, e.args()[i], 0);
                }
                os << ')';
            }
        }
        return;
    case Op::Ite:
        os << "ite(";
        print(os, e.arg(0), 0);
        os << ", ";
        print(os, e.arg(1), 0);
        os << ", ";
        print(os, e.arg(2), 0);
        os << ')';
        return;
    case Op::Not:
        os << '~';
        print_wrapped(os, e.arg(0), 9);
        return;
    case Op::And:
    case Op::Or:
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            if (i) os << (e.op() == Op::And ? " & " : " \\/ ");
            print_wrapped(os, e.args()[i], precedence(e) + 1);
        }
        return;
    case Op::Implies:
        print_wrapped(os, e.arg(0), 3);
        os << " => ";
        print_wrapped(os, e.arg(1), 2);
        return;
    case Op::Iff:
        print_wrapped(os, e.arg(0), 7);
        os << " = ";
        print_wrapped(os, e.arg(1), 7);
        return;
    case Op::Eq:
    case Op::Lt:
    case Op::Le:
    case Op::Ge:
    case Op::Gt:
        print_wrapped(os, e.arg(0), 7);
        os << ' ' << rel_symbol(e.op()) << ' ';
        print_wrapped(os, e.arg(1), 7);
        return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(os, e, 0);
    return os.str();
}

}  // namespace chcmq
