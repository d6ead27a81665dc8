// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Needs CHCMQ_ORACLE, CHCMQ_SOLVER and CHCMQ_CORPUS.

#include "isort_golden.hpp"
#include "reference_folds.hpp"
#include "support.hpp"

#include "chcmq/evaluator.hpp"
#include "chcmq/solver_driver.hpp"
#include "chcmq/transformer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

using namespace chcmq;
using namespace chcmq::test;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Collects failed checks; an empty list passes.
struct Checks {
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    Outcome outcome(std::string summary) const {
        if (failures.empty()) return {true, std::move(summary)};
        std::string detail = failures.front();
        if (failures.size() > 1) detail += " (+" + std::to_string(failures.size() - 1) + " more)";
        return {false, detail};
    }
};

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(corpus_dir()))
        if (e.path().extension() == ".chc") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::string category_of(const std::string& source) {
    static const std::regex tag(R"(%\s*category:\s*([^\n]*\S))");
    std::smatch m;
    return std::regex_search(source, m, tag) ? m[1].str() : std::string{};
}

unsigned workers() { return std::max(4u, std::thread::hardware_concurrency()); }

// Calls `fn(i)` for every index on a small pool of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers(), n); ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) fn(i);
        });
}

SolverConfig solver_config(double timeout) {
    SolverConfig c = solver_config_from_env();
    c.timeout_seconds = timeout;
    return c;
}

Problem transformed(const Problem& p) {
    ConstraintEngine engine(p.sorts, shared_oracle());
    return transform_all(p, engine).problem;
}

struct Isort {
    Problem problem = load("isort.chc");
    ConstraintEngine engine{problem.sorts, shared_oracle()};
    Transformer t{problem, engine};
};

Outcome golden_derivation() {
    const auto start = Clock::now();
    Checks checks;
    Isort x;
    const DefinitionSet first = x.t.tau({}, 1);
    const Definition* ins_def = first.for_pred("ins_sort");
    if (!ins_def) return {false, "no ins_sort definition after the first iteration"};
    const std::map<std::string, std::string> ins_names{{"new1", ins_def->name()}};

    const auto unfolded = x.t.unfold_rule(*ins_def);
    const auto want_unfold = clauses_in(kInsSortUnfolded);
    checks.expect(unfolded.size() == 2, "unfolding gave " + std::to_string(unfolded.size()) + " clauses, not 2");
    if (unfolded.size() == 2) {
        checks.expect(same_clause(x.engine, unfolded[0], want_unfold[0], ins_names, true), "base clause mismatch");
        checks.expect(same_clause(x.engine, unfolded[1], want_unfold[1], ins_names, true), "recursive clause mismatch");
    }

    const Clause strengthened = x.t.strengthen_clause(with_program_atom(unfolded, "ord_ins"));
    checks.expect(same_clause(x.engine, strengthened, clause_in(kStrengthenedRecursive), ins_names, true),
                  "strengthened clause mismatch");

    const DefinitionSet lfp = x.t.lfp_tau();
    const Definition& fixpoint_ins_def = *lfp.for_pred("ins_sort");
    const Clause folded = x.t.fold_clause(
        x.t.strengthen_clause(with_program_atom(x.t.unfold_rule(fixpoint_ins_def), "ord_ins")), lfp);
    const Clause folded_query = x.t.fold_clause(x.problem.queries.at(0), lfp);
    const std::map<std::string, std::string> names{{"new1", fixpoint_ins_def.name()},
                                                   {"new2", lfp.for_pred("ord_ins")->name()},
                                                   {"new19", lfp.for_pred("empty_list")->name()}};
    const auto want_fold = clauses_in(kFoldedClauseAndQuery);
    checks.expect(same_clause(x.engine, folded, want_fold[0], names), "folded clause mismatch");
    checks.expect(same_clause(x.engine, folded_query, want_fold[1], names), "folded query mismatch");

    const double seconds = since(start);
    checks.expect(seconds < 5.0, "took " + std::to_string(seconds) + " s");
    return checks.outcome("unfolded, strengthened and folded clauses match");
}

Outcome fixpoint_content() {
    const auto start = Clock::now();
    Checks checks;
    Isort x;
    const DefinitionSet lfp = x.t.lfp_tau();
    std::multiset<Signature> expected, got;
    for (const auto& c : clauses_in(kFixpointDefinitions)) expected.insert(signature(x.problem, c));
    for (const Definition* d : lfp.all()) {
        got.insert(signature(x.problem, d->clause()));
        checks.expect(x.engine.equivalent(d->constraint, Expr::tt()),
                      d->name() + " constraint is not equivalent to true");
    }
    checks.expect(lfp.size() == 7, std::to_string(lfp.size()) + " definitions, not 7");
    checks.expect(got == expected, "definition signatures differ from the reference list");
    const double seconds = since(start);
    checks.expect(seconds < 60.0, "took " + std::to_string(seconds) + " s");
    return checks.outcome("7 definitions, signatures match, " + std::to_string(x.t.log().iterations) + " iterations");
}

Outcome transformed_sat() {
    const SolverDriver solver(solver_config(300));
    const SolveResult r = solver.solve(transformed(load("isort.chc")));
    std::ostringstream detail;
    detail << solve_verdict_name(r.verdict) << " in " << r.seconds << " s";
    return {r.verdict == SolveVerdict::Sat, detail.str()};
}

Outcome mutants_unsat() {
    const SolverDriver solver(solver_config(300));
    const std::vector<std::string> mutants = {"isort_drop.chc", "isort_flip.chc", "isort_extra.chc"};
    std::vector<SolveResult> results(mutants.size());
    parallel_for(mutants.size(), [&](std::size_t i) { results[i] = solver.solve(transformed(load(mutants[i]))); });
    Checks checks;
    std::ostringstream summary;
    for (std::size_t i = 0; i < mutants.size(); ++i) {
        summary << (i ? ", " : "") << mutants[i] << " " << solve_verdict_name(results[i].verdict);
        checks.expect(results[i].verdict == SolveVerdict::Unsat,
                      mutants[i] + " is " + solve_verdict_name(results[i].verdict));
    }
    return checks.outcome(summary.str());
}

// Both sets get 60 s. Originals of sat problems rarely finish within it, and a
// timeout only makes the comparison inconclusive.
Outcome equisatisfiability() {
    const auto files = corpus_files();
    const SolverDriver solver(solver_config(300));
    std::vector<std::optional<EquisatResult>> results(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        try {
            const Problem p = parse_problem(read_file(files[i]));
            results[i] = check_equisat(solver, p, transformed(p), 60.0);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    Checks checks;
    checks.expect(files.size() >= 20, std::to_string(files.size()) + " corpus problems, fewer than 20");
    std::size_t agree = 0, inconclusive = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string name = files[i].filename().string();
        checks.expect(errors[i].empty(), name + ": " + errors[i]);
        if (!results[i]) continue;
        checks.expect(results[i]->outcome != Equisat::Disagree,
                      name + " disagrees: original " + solve_verdict_name(results[i]->original.verdict) +
                          ", transformed " + solve_verdict_name(results[i]->transformed.verdict));
        agree += results[i]->outcome == Equisat::Agree;
        inconclusive += results[i]->outcome == Equisat::Inconclusive;
    }
    return checks.outcome(std::to_string(files.size()) + " problems: " + std::to_string(agree) + " agree, " +
                          std::to_string(inconclusive) + " inconclusive, 0 disagree");
}

Outcome termination_and_monotonicity() {
    Checks checks;
    std::size_t most = 0;
    for (const auto& file : corpus_files()) {
        const std::string name = file.filename().string();
        Problem p = parse_problem(read_file(file));
        ConstraintEngine engine(p.sorts, shared_oracle());
        Transformer t(p, engine);
        std::vector<DefinitionSet> history;
        try {
            t.lfp_tau(&history);
        } catch (const TransformError& e) {
            checks.expect(false, name + ": " + e.what());
            continue;
        }
        most = std::max(most, history.size() - 1);
        for (std::size_t i = 0; i < history.size(); ++i) {
            checks.expect(history[i].is_monovariant(p), name + ": iterate " + std::to_string(i) + " not monovariant");
            if (i + 1 == history.size()) continue;
            for (const Definition* d : history[i].all()) {
                bool below = false;
                for (const Definition* e : history[i + 1].all())
                    if (e->atom.pred == d->atom.pred && t.def_extends(*d, *e)) below = true;
                checks.expect(below, name + ": " + d->name() + " not extended at iterate " + std::to_string(i + 1));
            }
        }
    }
    return checks.outcome("all corpus fixpoints reached, at most " + std::to_string(most) + " iterations");
}

// Increasing chain c0 |= c1 |= ... built by dropping conjuncts and loosening
// bounds.
struct ChainGen {
    std::mt19937& rng;
    std::vector<Expr> ints = {Expr::var("X", Sort::integer()), Expr::var("Y", Sort::integer()),
                              Expr::var("Z", Sort::integer())};
    std::vector<Expr> bools = {Expr::var("P", Sort::boolean()), Expr::var("Q", Sort::boolean())};

    int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

    struct Bound {
        int kind;  // 0: v >= k, 1: v <= k, 2: u <= v + k, 3: Bool literal
        int a, b;
        std::int64_t k;
    };

    Expr expr(const Bound& b) const {
        switch (b.kind) {
        case 0: return Expr::rel(Op::Ge, ints[b.a], Expr::int_const(b.k));
        case 1: return Expr::rel(Op::Le, ints[b.a], Expr::int_const(b.k));
        case 2: return Expr::rel(Op::Le, ints[b.a], Expr::add(ints[b.b], Expr::int_const(b.k)));
        default: return b.k ? bools[b.a] : Expr::not_(bools[b.a]);
        }
    }

    Bound random_bound() {
        const int kind = pick(4);
        if (kind == 3) return {3, pick(2), 0, pick(2)};
        const int a = pick(3);
        return {kind, a, (a + 1 + pick(2)) % 3, kind == 0 ? -pick(4) : kind == 1 ? 4 + pick(4) : pick(3)};
    }

    std::vector<Bound> start() {
        std::vector<Bound> out;
        const int n = 1 + pick(8);
        for (int i = 0; i < n; ++i) out.push_back(random_bound());
        return out;
    }

    void weaken(std::vector<Bound>& c) {
        if (c.empty() || pick(3) == 0) return;
        Bound& b = c[static_cast<std::size_t>(pick(static_cast<int>(c.size())))];
        if (b.kind == 3 || pick(3) == 0) {
            c.erase(c.begin() + (&b - c.data()));
            return;
        }
        b.k += b.kind == 0 ? -1 - pick(2) : 1 + pick(2);
    }

    Expr conj(const std::vector<Bound>& c) const {
        std::vector<Expr> parts;
        for (const auto& b : c) parts.push_back(expr(b));
        return Expr::and_(parts);
    }
};

Outcome widening_stabilization() {
    std::mt19937 rng(20261015);
    ChainGen gen{rng};
    SortTable sorts;
    ConstraintEngine engine(sorts, shared_oracle());
    Checks checks;
    std::size_t longest = 0;
    for (int chain = 0; chain < 100; ++chain) {
        std::vector<Expr> cs;
        auto bounds = gen.start();
        for (int i = 0; i < 20; ++i) {
            cs.push_back(gen.conj(bounds));
            gen.weaken(bounds);
        }
        const std::string tag = "chain " + std::to_string(chain);
        for (std::size_t i = 0; i + 1 < cs.size(); ++i)
            checks.expect(engine.entails(cs[i], cs[i + 1]), tag + " is not increasing");

        Expr d = cs[0];
        const auto d0 = atomic_conjuncts(d);
        if (!d0) {
            checks.expect(false, tag + ": start does not decompose");
            continue;
        }
        std::size_t changes = 0;
        for (std::size_t i = 1; i < cs.size(); ++i) {
            const Expr g = engine.generalize(d, cs[i]);
            checks.expect(engine.entails(d, g), tag + ": previous iterate does not entail the generalization");
            checks.expect(engine.entails(cs[i], g), tag + ": chain element does not entail the generalization");
            if (!engine.equivalent(g, d)) ++changes;
            d = g;
        }
        longest = std::max(longest, changes);
        checks.expect(changes <= d0->size(), tag + ": " + std::to_string(changes) + " strict steps for " +
                                                 std::to_string(d0->size()) + " conjuncts");
    }
    return checks.outcome("100 chains of 20, at most " + std::to_string(longest) + " strict steps, " +
                          std::to_string(engine.oracle_calls()) + " oracle queries");
}

Outcome catamorphism_sanity() {
    Problem p = load("isort.chc");
    const Sort ls = p.sorts.list_of(Sort::integer());
    Checks checks;
    const auto lists = all_lists(4);
    for (const auto& xs : lists) {
        std::string shown = "[";
        for (auto v : xs) shown += std::to_string(v);
        shown += "]";
        const Value v = list_value(ls, xs);
        const std::map<std::string, std::vector<Value>> want = {
            {"ordered", {Value::boolean(ordered_ref(xs))}},
            {"first", {Value::boolean(!xs.empty()), Value::integer(head_of(xs).value_or(0))}},
            {"last", {Value::boolean(!xs.empty()), Value::integer(xs.empty() ? 0 : xs.back())}}};
        for (const auto& [pred, out] : want) {
            const auto got = cata_outputs(p, pred, {}, v);
            checks.expect(got.size() == 1, pred + shown + " has " + std::to_string(got.size()) + " outputs");
            checks.expect(got.size() != 1 || got[0] == out, pred + shown + " differs from the reference fold");
        }
    }
    return checks.outcome(std::to_string(lists.size()) + " lists, one output each for ordered, first, last");
}

Outcome desk_benchmark() {
    const auto start = Clock::now();
    BenchConfig config;
    config.solver = solver_config(300);
    config.oracle = oracle_config_from_env();
    config.solve_original = false;
    config.jobs = static_cast<int>(workers());
    const BenchReport report = run_bench(corpus_dir(), config);

    std::map<std::string, std::set<SolveVerdict>> variants;
    Checks checks;
    for (const auto& row : report.rows) {
        const std::string category = category_of(read_file(corpus_dir() / row.name));
        checks.expect(!category.empty(), row.name + " has no category");
        checks.expect(row.expected.has_value(), row.name + " has no expected verdict");
        checks.expect(row.met(), row.name + ": " + (row.error.empty() ? "expected verdict missed" : row.error));
        if (row.expected) variants[category].insert(*row.expected);
    }
    std::size_t complete = 0;
    for (const auto& [category, verdicts] : variants)
        complete += verdicts.count(SolveVerdict::Sat) && verdicts.count(SolveVerdict::Unsat);
    checks.expect(report.rows.size() >= 10, std::to_string(report.rows.size()) + " problems, fewer than 10");
    checks.expect(complete >= 4, std::to_string(complete) + " categories with both variants, fewer than 4");
    const double seconds = since(start);
    checks.expect(seconds < 1800, "took " + std::to_string(seconds) + " s");
    std::ostringstream summary;
    summary << report.rows.size() << " problems, " << complete << " categories with sat and unsat variants, "
            << report.totals.transformed_sat << " sat, " << report.totals.transformed_unsat << " unsat";
    return checks.outcome(summary.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"golden insertion sort derivation", golden_derivation},
        {"fixpoint definitions", fixpoint_content},
        {"transformed insertion sort is sat", transformed_sat},
        {"insertion sort mutants are unsat", mutants_unsat},
        {"equisatisfiability over the corpus", equisatisfiability},
        {"termination and monotonicity", termination_and_monotonicity},
        {"widening stabilization", widening_stabilization},
        {"catamorphism sanity", catamorphism_sanity},
        {"desk benchmark", desk_benchmark},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %zu, %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
