#pragma once

#include "chcmq/cata_analysis.hpp"
#include "chcmq/constraint_engine.hpp"
#include "chcmq/unify.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chcmq {

class TransformError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// newp(U) <- c, Catas, A.
struct Definition {
    Atom head;
    Expr constraint;
    std::vector<Atom> catas;
    Atom atom;  // program atom, or a builtin true_* atom
    int serial = 0;  // creation order
    int clause_id = -1;

    const std::string& name() const { return head.pred; }
    Clause clause() const;
};

/// Definitions keyed by program predicate (at most one each), plus any
/// number of definitions for the builtin `true_*` predicates.
class DefinitionSet {
public:
    const Definition* for_pred(const std::string& pred) const;
    std::vector<const Definition*> for_true(const std::string& true_pred) const;
    const Definition* by_name(const std::string& name) const;

    /// Adds `d`, replacing the definition of the same program predicate.
    void put(Definition d);

    /// All definitions in creation order.
    std::vector<const Definition*> all() const;
    std::size_t size() const { return defs_.size(); }
    bool empty() const { return defs_.empty(); }
    bool is_monovariant(const Problem& p) const;

private:
    std::vector<Definition> defs_;
};

enum class DefineCase : std::uint8_t { Skip, Extend, Project };
const char* define_case_name(DefineCase c);

struct DefineEvent {
    int iteration = 0;
    DefineCase kind = DefineCase::Skip;
    std::string pred;        // program (or true_*) predicate
    std::string definition;  // definition used, created or replaced
    std::string replaced;    // Extend only
    std::string clause;      // clause that triggered the event
};

/// One application of R1..R4 in the final derivation.
struct RuleStep {
    Origin rule = Origin::R1;
    std::vector<int> inputs;  // clause ids consumed
    std::vector<std::string> definitions;  // definitions involved
    std::vector<Clause> outputs;
};

/// Ordered record of a transformation, serializable as text and JSON.
class DerivationLog {
public:
    std::vector<DefineEvent> exploration;
    std::vector<RuleStep> steps;
    std::vector<std::string> warnings;
    int iterations = 0;

    std::string text() const;
    std::string json() const;
};

struct TransformOptions {
    int max_iterations = 50;
    /// Complete matchings tried per definition before giving up.
    int match_budget = 64;
};

/// A definition matched against an occurrence: the renaming maps the
/// definition's variables into the clause.
struct DefinitionMatch {
    const Definition* definition = nullptr;
    Substitution renaming;
};

class Transformer {
public:
    Transformer(Problem& p, ConstraintEngine& engine, TransformOptions options = {});

    const std::vector<QuerySpec>& queries() const { return queries_; }
    DerivationLog& log() { return log_; }
    /// Every definition introduced so far, including replaced ones.
    const std::vector<Definition>& introduced() const { return introduced_; }

    std::vector<Clause> one_step_unfold(const Clause& c, std::size_t atom_index);
    /// R2 steps 1-3 on a definition.
    std::vector<Clause> unfold_rule(const Definition& d);
    /// R3 using every applicable query, left to right over program atoms.
    Clause strengthen_clause(const Clause& c);
    /// R4: replaces every program atom and catamorphism atom by a
    /// definition head.
    Clause fold_clause(const Clause& c, const DefinitionSet& defs);

    DefinitionSet define_fn(const std::vector<Clause>& cls, DefinitionSet defs, int iteration = 0);
    DefinitionSet tau(const DefinitionSet& defs, int iteration = 0);
    /// Iterates tau from the empty set; `history` receives every iterate.
    DefinitionSet lfp_tau(std::vector<DefinitionSet>* history = nullptr);

    struct Expansion {
        std::vector<Clause> unfolded;
        std::vector<Clause> strengthened;
    };
    /// Unfolding followed by strengthening, cached per definition name.
    const Expansion& expand(const Definition& d);

    /// D1 below D2: same program atom up to renaming, catamorphisms of D1
    /// among those of D2, and c1 entails c2.
    bool def_extends(const Definition& d1, const Definition& d2);

    std::optional<DefinitionMatch> match_definition(const Definition& d, const Atom& atom,
                                                    const std::vector<Atom>& catas, const Expr& c);

    /// Program atoms of a clause body, followed by one `true_*` atom per
    /// ADT variable carrying catamorphisms that no program atom covers.
    std::vector<Atom> anchors(const Clause& c);
    /// Catamorphism atoms of `c` sharing an ADT variable with `a`.
    std::vector<Atom> catas_of(const Clause& c, const Atom& a) const;

    int fresh_clause_id() { return next_id_++; }

private:
    std::vector<std::pair<Clause, std::size_t>> resolvents(const Clause& c, std::size_t atom_index);
    Definition make_definition(std::vector<Atom> catas, Atom atom, Expr constraint);
    std::optional<Definition> extend(const Definition& d, const Atom& atom, const std::vector<Atom>& catas,
                                     const Expr& c);
    bool content_equal(const DefinitionSet& a, const DefinitionSet& b);
    std::string fresh_pred();
    bool is_program_atom(const Atom& a) const;

    Problem& p_;
    ConstraintEngine& engine_;
    TransformOptions options_;
    std::vector<QuerySpec> queries_;
    std::map<std::string, const QuerySpec*> query_of_;
    NameSupply names_;
    int pred_counter_ = 0;
    int serial_ = 0;
    int next_id_ = 1;
    std::map<std::string, Expansion> expansions_;
    std::vector<Definition> introduced_;
    DerivationLog log_;
};

struct TransformResult {
    Problem problem;  // transformed clause set with its declarations
    DefinitionSet definitions;
    std::vector<DefinitionSet> history;
    DerivationLog log;
};

/// Fold(Strengthen(Unfold(lfp)), lfp) together with the folded queries.
/// With no queries the program is returned unchanged.
TransformResult transform_all(const Problem& p, ConstraintEngine& engine, TransformOptions options = {});

}  // namespace chcmq
