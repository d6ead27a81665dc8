#pragma once

#include "chcmq/clause.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chcmq {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query violating one of the five shape conditions; `condition()` is
/// the roman numeral of the first violated one ("i" .. "v").
class QueryError : public AnalysisError {
public:
    QueryError(std::string condition, const std::string& msg);
    const std::string& condition() const { return condition_; }

private:
    std::string condition_;
};

/// Fails if a catamorphism predicate occurs in a program clause.
std::map<std::string, PredKind> classify_predicates(const Problem& p);

enum class SchemaShape : std::uint8_t { List, Tree };

struct CatamorphismSchema {
    std::string pred;
    SchemaShape shape = SchemaShape::List;
    std::vector<Sort> inputs;
    Sort adt = Sort::integer();
    std::vector<Sort> outputs;
    const Clause* base = nullptr;
    const Clause* recursive = nullptr;
    /// Inner catamorphism of the recursive clause, or empty if the clause
    /// only recurses on itself (or not at all).
    std::string inner;
    Expr combine;  // the recursive clause's constraint
    /// Horn script, sat iff the predicate is functional.
    std::string functionality_obligation;
    /// Quantified script, unsat iff the predicate is total.
    std::string totality_obligation;
};

/// Checks the two clauses of `pred` against the list or tree schema, with
/// base and combine parts given as constraints, and recursively checks the
/// inner catamorphism.
CatamorphismSchema check_schema(const Problem& p, const std::string& pred);
std::vector<CatamorphismSchema> check_all_schemas(const Problem& p);

struct CataAtomSpec {
    Atom atom;
    std::vector<Expr> in;
    Expr adt;
    std::vector<Expr> out;
};

struct QuerySpec {
    const Clause* query = nullptr;
    Expr constraint;
    std::vector<CataAtomSpec> catas;
    Atom program_atom;

    /// The query put back together: constraint, catamorphisms, program atom.
    Clause reassemble() const;
};

QuerySpec validate_query(const Problem& p, const Clause& q);
std::vector<QuerySpec> validate_queries(const Problem& p);

CataAtomSpec io_split(const Problem& p, const Atom& a);

}  // namespace chcmq
