#pragma once

#include "chcmq/clause.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chcmq {

/// Ground value of any sort.
struct Value {
    Sort sort = Sort::integer();
    std::int64_t num = 0;  // Int value, or 0/1 for Bool
    int ctor = -1;         // ADT constructor index
    std::vector<Value> args;

    static Value integer(std::int64_t v) { return {Sort::integer(), v, -1, {}}; }
    static Value boolean(bool b) { return {Sort::boolean(), b ? 1 : 0, -1, {}}; }
    static Value adt(Sort s, int ctor, std::vector<Value> args) { return {s, 0, ctor, std::move(args)}; }

    bool truth() const { return num != 0; }

    friend bool operator==(const Value&, const Value&) = default;
    friend bool operator<(const Value& a, const Value& b);
};

std::string to_string(const Value& v);

/// Integer list over `list(int)`-shaped sort `s`, head first.
Value list_value(Sort s, std::span<const std::int64_t> elems);

using Env = std::map<std::string, Value>;

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluates a term or formula under a total assignment of its variables.
Value evaluate(const Expr& e, const Env& env);
bool holds(const Expr& f, const Env& env);

/// One-way match of a constructor pattern against a value.
bool match_value(const Expr& pattern, const Value& v, Env& env);

/// Every output tuple derivable for catamorphism `pred` on the given inputs,
/// by structural recursion over `adt`. Free basic variables that no
/// equality determines are enumerated over [-range, range] and both Bools,
/// so the result is exact for catamorphisms whose outputs stay in range.
std::vector<std::vector<Value>> cata_outputs(const Problem& p, const std::string& pred,
                                             std::span<const Value> inputs, const Value& adt, int range = 8);

}  // namespace chcmq
