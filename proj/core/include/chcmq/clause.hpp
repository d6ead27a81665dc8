#pragma once

#include "chcmq/expr.hpp"
#include "chcmq/sort.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chcmq {

struct Atom {
    std::string pred;
    std::vector<Expr> args;

    friend bool operator==(const Atom&, const Atom&) = default;
};

enum class Origin : std::uint8_t { Source, R1, R2, R3, R4 };
const char* origin_name(Origin o);

/// H <- c, B1, ..., Bn.  An absent head is `false`.
struct Clause {
    std::optional<Atom> head;
    Expr constraint = Expr::tt();
    std::vector<Atom> body;
    Origin origin = Origin::Source;
    int id = -1;

    bool is_query() const { return !head.has_value(); }
};

enum class PredKind : std::uint8_t { Program, Cata, True, Definition };
enum class ArgRole : std::uint8_t { In, Adt, Out };

struct PredDecl {
    std::string name;
    std::vector<Sort> args;
    PredKind kind = PredKind::Program;
    std::vector<ArgRole> roles;  // catamorphisms only, parallel to args

    int adt_position() const;  // -1 unless a catamorphism
};

/// Input basic terms, ADT term and output terms of a catamorphism atom.
struct CataArgs {
    std::vector<Expr> in;
    Expr adt;
    std::vector<Expr> out;
};

/// A parsed verification problem: program clauses, catamorphism clauses
/// and queries over one sort table.
class Problem {
public:
    SortTable sorts;
    std::vector<Clause> program;
    std::vector<Clause> property;
    std::vector<Clause> queries;

    const PredDecl& declare(PredDecl decl);
    const PredDecl* find(const std::string& name) const;
    const PredDecl& pred(const std::string& name) const;
    const std::vector<PredDecl>& preds() const { return preds_; }

    PredKind kind(const std::string& name) const { return pred(name).kind; }
    bool is_cata(const Atom& a) const { return kind(a.pred) == PredKind::Cata; }
    CataArgs cata_args(const Atom& a) const;

    /// The builtin `true` predicate of an ADT sort, created (with one fact
    /// per constructor) on first request.
    const PredDecl& true_pred(Sort adt);

    /// Clauses whose head predicate is `name`, searching program then
    /// property clauses.
    std::vector<const Clause*> clauses_of(const std::string& name) const;

private:
    std::vector<PredDecl> preds_;
    std::map<std::string, std::size_t> index_;
};

VarList vars_of(const Atom& a, VarFilter filter = VarFilter::All);
VarList vars_of(const Clause& c, VarFilter filter = VarFilter::All);

/// Renames every variable of the clause to A, B, ..., Z, A1, B1, ... in
/// order of first occurrence (head, constraint, body).
Clause canonical(const Clause& c);

std::string to_string(const Atom& a);
/// Surface syntax of a clause, without canonical renaming.
std::string to_string(const Clause& c);

/// Surface text of a whole problem: declarations, then program, property
/// and query clauses, each clause canonically renamed.
std::string to_surface(const Problem& p);

}  // namespace chcmq
