#include "chcmq/fourier_motzkin.hpp"

#include <algorithm>
#include <numeric>

namespace chcmq {

namespace {

struct Overflow {};

std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
}

std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
    return r;
}

bool linear_parts(const Expr& t, std::map<std::string, std::int64_t>& coeffs, std::int64_t& constant,
                  std::int64_t sign) {
    switch (t.op()) {
    case Op::Var:
        if (!t.sort().is_int()) return false;
        coeffs[t.name()] = add(coeffs[t.name()], sign);
        return true;
    case Op::IntConst: constant = add(constant, mul(sign, t.value())); return true;
    case Op::Linear:
        constant = add(constant, mul(sign, t.value()));
        for (std::size_t i = 0; i < t.args().size(); ++i)
            coeffs[t.args()[i].name()] = add(coeffs[t.args()[i].name()], mul(sign, t.coeffs()[i]));
        return true;
    default: return false;
    }
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// Divides by the coefficient gcd; inequalities round the constant up,
// which is exact over the integers.
LinearConstraint normalize(LinearConstraint c) {
    std::erase_if(c.coeffs, [](const auto& kv) { return kv.second == 0; });
    std::int64_t g = 0;
    for (const auto& [v, k] : c.coeffs) g = std::gcd(g, k);
    if (g <= 1) return c;
    if (c.equality) {
        if (c.constant % g != 0) return LinearConstraint{{}, 1, false};
        c.constant /= g;
    } else {
        c.constant = -floor_div(-c.constant, g);
    }
    for (auto& [v, k] : c.coeffs) k /= g;
    return c;
}

LinearConstraint combine(const LinearConstraint& a, std::int64_t ka, const LinearConstraint& b, std::int64_t kb) {
    LinearConstraint out;
    out.equality = a.equality && b.equality;
    out.constant = add(mul(ka, a.constant), mul(kb, b.constant));
    out.coeffs = {};
    for (const auto& [v, k] : a.coeffs) out.coeffs[v] = add(out.coeffs[v], mul(ka, k));
    for (const auto& [v, k] : b.coeffs) out.coeffs[v] = add(out.coeffs[v], mul(kb, k));
    return normalize(std::move(out));
}

std::int64_t coeff(const LinearConstraint& c, const std::string& v) {
    auto it = c.coeffs.find(v);
    return it == c.coeffs.end() ? 0 : it->second;
}

void eliminate(std::vector<LinearConstraint>& sys, const std::string& x) {
    auto eq = std::find_if(sys.begin(), sys.end(), [&](const auto& c) { return c.equality && coeff(c, x) != 0; });
    std::vector<LinearConstraint> out;
    if (eq != sys.end()) {
        const LinearConstraint e = *eq;
        const std::int64_t k = coeff(e, x);
        for (auto it = sys.begin(); it != sys.end(); ++it) {
            if (it == eq) continue;
            const std::int64_t m = coeff(*it, x);
            if (m == 0) out.push_back(*it);
            else out.push_back(combine(*it, k < 0 ? -k : k, e, k < 0 ? m : -m));
        }
    } else {
        std::vector<const LinearConstraint*> lower, upper;
        for (const auto& c : sys) {
            const std::int64_t m = coeff(c, x);
            if (m == 0) out.push_back(c);
            else if (c.equality) out.push_back(c);  // unreachable: handled above
            else (m > 0 ? upper : lower).push_back(&c);
        }
        for (const auto* u : upper)
            for (const auto* l : lower) out.push_back(combine(*u, -coeff(*l, x), *l, coeff(*u, x)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::erase_if(out, [](const auto& c) { return c.coeffs.empty() && (c.equality ? c.constant == 0 : c.constant <= 0); });
    sys = std::move(out);
}

}  // namespace

std::optional<LinearConstraint> to_linear(const Expr& atom) {
    const Op op = atom.op();
    if (op != Op::Lt && op != Op::Le && op != Op::Ge && op != Op::Gt && op != Op::Eq) return std::nullopt;
    if (!atom.arg(0).sort().is_int()) return std::nullopt;
    try {
        LinearConstraint c;
        const std::int64_t sign = (op == Op::Ge || op == Op::Gt) ? -1 : 1;
        if (!linear_parts(atom.arg(0), c.coeffs, c.constant, sign)) return std::nullopt;
        if (!linear_parts(atom.arg(1), c.coeffs, c.constant, -sign)) return std::nullopt;
        if (op == Op::Lt || op == Op::Gt) c.constant = add(c.constant, 1);
        c.equality = op == Op::Eq;
        return normalize(std::move(c));
    } catch (const Overflow&) {
        return std::nullopt;
    }
}

Expr to_expr(const LinearConstraint& c) {
    if (c.coeffs.empty()) return Expr::bool_const(c.equality ? c.constant == 0 : c.constant <= 0);
    std::vector<std::pair<std::int64_t, Expr>> terms;
    for (const auto& [v, k] : c.coeffs) terms.emplace_back(k, Expr::var(v, Sort::integer()));
    Expr lhs = Expr::linear(std::move(terms), 0);
    return Expr::rel(c.equality ? Op::Eq : Op::Le, lhs, Expr::int_const(-c.constant));
}

std::optional<std::vector<LinearConstraint>> fm_eliminate(std::vector<LinearConstraint> system,
                                                          const std::set<std::string>& keep, std::size_t limit) {
    try {
        for (auto& c : system) c = normalize(std::move(c));
        for (;;) {
            std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // upper, lower occurrences
            std::set<std::string> in_equality;
            for (const auto& c : system)
                for (const auto& [v, k] : c.coeffs) {
                    if (keep.count(v)) continue;
                    if (c.equality) in_equality.insert(v);
                    (k > 0 ? counts[v].first : counts[v].second)++;
                }
            if (counts.empty()) return system;
            // Equalities first, then the variable producing the fewest pairs.
            std::string best;
            std::size_t best_cost = SIZE_MAX;
            for (const auto& [v, ul] : counts) {
                const std::size_t cost = in_equality.count(v) ? 0 : ul.first * ul.second;
                if (cost < best_cost) {
                    best = v;
                    best_cost = cost;
                }
            }
            eliminate(system, best);
            if (system.size() > limit) return std::nullopt;
        }
    } catch (const Overflow&) {
        return std::nullopt;
    }
}

}  // namespace chcmq
