#pragma once

#include "chcmq/sort.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chcmq {

/// Node kinds. Terms (Var, IntConst, BoolConst, Linear, Ctor, Ite) and
/// constraint formulas (everything Bool-sorted) share one representation;
/// a Bool variable doubles as an atomic formula.
enum class Op : std::uint8_t {
    Var,
    IntConst,
    BoolConst,
    Linear,  // a0 + a1*X1 + ... + an*Xn, canonical (sorted, no zero coefficients)
    Ctor,
    Ite,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,  // Int or ADT equality; Bool equality is always Iff
    Lt,
    Le,
    Ge,
    Gt,
};

bool is_relation(Op op);

/// Immutable, cheaply copyable expression handle.
class Expr {
public:
    Expr();  // BoolConst true

    static Expr var(std::string name, Sort sort);
    static Expr int_const(std::int64_t v);
    static Expr bool_const(bool v);
    static Expr tt() { return bool_const(true); }
    static Expr ff() { return bool_const(false); }
    /// Builds sum(coeffs[i]*vars[i]) + constant, merging duplicates and
    /// collapsing to Var/IntConst when possible.
    static Expr linear(std::vector<std::pair<std::int64_t, Expr>> terms, std::int64_t constant);
    static Expr ctor(Sort sort, int index, std::string name, std::vector<Expr> args);
    static Expr ite(Expr cond, Expr then_e, Expr else_e);
    static Expr not_(Expr f);
    static Expr and_(std::vector<Expr> fs);
    static Expr or_(std::vector<Expr> fs);
    static Expr implies(Expr a, Expr b);
    static Expr iff(Expr a, Expr b);
    /// Sort-directed equality: Iff on Bool operands, Eq otherwise.
    static Expr eq(Expr a, Expr b);
    static Expr rel(Op op, Expr a, Expr b);

    /// Sum and scaling on linear operands (Var/IntConst/Linear of sort Int).
    static Expr add(const Expr& a, const Expr& b);
    static Expr scale(std::int64_t k, const Expr& a);

    Op op() const;
    Sort sort() const;
    const std::string& name() const;  // Var and Ctor
    std::int64_t value() const;       // IntConst, BoolConst (0/1), Linear constant
    int ctor_index() const;
    std::span<const Expr> args() const;
    std::span<const std::int64_t> coeffs() const;  // Linear only; parallel to args()
    const Expr& arg(std::size_t i) const { return args()[i]; }

    bool is_var() const { return op() == Op::Var; }
    bool is_true() const { return op() == Op::BoolConst && value() != 0; }
    bool is_false() const { return op() == Op::BoolConst && value() == 0; }
    bool is_linear_term() const;  // Var/IntConst/Linear of sort Int

    std::size_t hash() const;
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
    /// Total order (structural), used for sets and deterministic output.
    friend bool operator<(const Expr& a, const Expr& b);
    friend int compare(const Expr& a, const Expr& b);

    struct Node;  // opaque outside expr.cc

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

int compare(const Expr& a, const Expr& b);

enum class VarFilter : std::uint8_t { All, Basic, Adt };

/// Variables in order of first occurrence (left to right).
class VarList {
public:
    void add(const Expr& v);
    bool contains(const std::string& name) const { return seen_.count(name) != 0; }
    const std::vector<Expr>& vars() const { return vars_; }
    std::set<std::string> names() const { return seen_; }
    std::size_t size() const { return vars_.size(); }
    bool empty() const { return vars_.empty(); }
    auto begin() const { return vars_.begin(); }
    auto end() const { return vars_.end(); }

private:
    std::vector<Expr> vars_;
    std::set<std::string> seen_;
};

void collect_vars(const Expr& e, VarList& out, VarFilter filter = VarFilter::All);
VarList free_vars(const Expr& e, VarFilter filter = VarFilter::All);

/// Rewrites bottom-up: `fn` sees each node after its children were rebuilt
/// and returns the replacement.
Expr transform(const Expr& e, const std::function<Expr(const Expr&)>& fn);

/// Conjuncts of a formula with nested Ands flattened (True dropped).
std::vector<Expr> conjuncts(const Expr& f);

/// Depth of constructor nesting (0 for variables and basic terms).
int ctor_depth(const Expr& e);

std::string to_string(const Expr& e);

}  // namespace chcmq

template <>
struct std::hash<chcmq::Expr> {
    std::size_t operator()(const chcmq::Expr& e) const noexcept { return e.hash(); }
};
