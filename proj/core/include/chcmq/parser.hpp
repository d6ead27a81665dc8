#pragma once

#include "chcmq/clause.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace chcmq {

enum class ParseErrorKind : std::uint8_t { Syntax, Sort, UndeclaredPredicate, DuplicateQuery, Declaration };

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, int line, int col, const std::string& msg);
    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return col_; }

private:
    ParseErrorKind kind_;
    int line_;
    int col_;
};

/// Parses the surface format and normalizes every clause:
///  - body atom arguments become distinct variables (displaced terms are
///    moved into equalities),
///  - head arguments keep constructor patterns, but basic non-variable
///    subterms are moved into the constraint,
///  - `_` becomes a fresh variable.
Problem parse_problem(std::string_view text);

}  // namespace chcmq
