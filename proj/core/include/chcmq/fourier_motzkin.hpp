#pragma once

#include "chcmq/expr.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace chcmq {

/// sum(coeffs) + constant (<= 0 | = 0) over Int variables.
struct LinearConstraint {
    std::map<std::string, std::int64_t> coeffs;
    std::int64_t constant = 0;
    bool equality = false;

    friend auto operator<=>(const LinearConstraint&, const LinearConstraint&) = default;
};

/// Reads an Int relation (Lt/Le/Ge/Gt, or Eq on Int) as a constraint;
/// strict inequalities are tightened over the integers.
std::optional<LinearConstraint> to_linear(const Expr& atom);
Expr to_expr(const LinearConstraint& c);

/// Eliminates every variable outside `keep` from a conjunction of linear
/// constraints. Exact over the rationals, with integer rounding of
/// constants, so the result is implied by the input. Returns nullopt if
/// intermediate coefficients overflow or the system grows past `limit`.
std::optional<std::vector<LinearConstraint>> fm_eliminate(std::vector<LinearConstraint> system,
                                                          const std::set<std::string>& keep,
                                                          std::size_t limit = 256);

}  // namespace chcmq
