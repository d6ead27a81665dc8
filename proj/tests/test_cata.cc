#include "reference_folds.hpp"
#include "support.hpp"

#include "chcmq/cata_analysis.hpp"
#include "chcmq/evaluator.hpp"

#include <doctest.h>

#include <boost/process.hpp>

#include <optional>

using namespace chcmq;
using namespace chcmq::test;
namespace bp = boost::process;

namespace {

const char* kTreeSource = R"(
pred insert(int, tree(int), tree(int)).
cata bounds(adt: tree(int), out: bool, out: int, out: int).
cata sorted(adt: tree(int), out: bool).
cata size(adt: tree(int), out: int).

insert(X, leaf, node(leaf, X, leaf)).
insert(X, node(L, N, R), node(L1, N, R)) :- X =< N, insert(X, L, L1).
insert(X, node(L, N, R), node(L, N, R1)) :- X > N, insert(X, R, R1).

bounds(leaf, E, Lo, Hi) :- ~E & Lo = 0 & Hi = 0.
bounds(node(L, N, R), E, Lo, Hi) :-
    E & Lo = ite(E1, Lo1, N) & Hi = ite(E2, Hi2, N),
    bounds(L, E1, Lo1, Hi1), bounds(R, E2, Lo2, Hi2).
sorted(leaf, B) :- B.
sorted(node(L, N, R), B) :-
    B = (B1 & B2 & (E1 => Hi1 < N) & (E2 => N =< Lo2)),
    sorted(L, B1), sorted(R, B2), bounds(L, E1, Lo1, Hi1), bounds(R, E2, Lo2, Hi2).
size(leaf, S) :- S = 0.
size(node(L, N, R), S) :- S = S1 + S2 + 1, size(L, S1), size(R, S2).

false :- ~(B1 => B2), sorted(T, B1), sorted(T1, B2), insert(X, T, T1).
)";

Problem isort_with(const std::string& extra) {
    return parse_problem(test::read_file(test::corpus_dir() / "isort.chc") + extra);
}

const CatamorphismSchema& schema_of(const std::vector<CatamorphismSchema>& all, const std::string& pred) {
    for (const auto& s : all)
        if (s.pred == pred) return s;
    throw std::runtime_error("no schema for " + pred);
}

// Oracle output on a complete script, one line per response.
std::vector<std::string> run_script(const std::string& script) {
    bp::opstream in;
    bp::ipstream out;
    const std::string path = oracle_config_from_env().path;
    const auto exe = path.find('/') == std::string::npos ? bp::search_path(path) : boost::filesystem::path(path);
    bp::child z3(exe, "-in", "-smt2", "-T:20", bp::std_in < in, bp::std_out > out, bp::std_err > bp::null);
    in << script << "\n(exit)\n" << std::flush;
    in.pipe().close();
    std::vector<std::string> lines;
    for (std::string line; std::getline(out, line);) lines.push_back(line);
    z3.wait();
    return lines;
}

// Declarations and assertions only, so the oracle parses and sort-checks
// without solving.
std::vector<std::string> parse_only(std::string script) {
    if (auto at = script.rfind("(check-sat)"); at != std::string::npos) script.erase(at);
    return run_script(script);
}

}  // namespace

TEST_CASE("predicate classes of insertion sort") {
    const Problem p = test::load("isort.chc");
    const auto kinds = classify_predicates(p);
    for (const char* prog : {"ins_sort", "ord_ins", "append", "snoc", "empty_list"})
        CHECK(kinds.at(prog) == PredKind::Program);
    for (const char* cata : {"ordered", "first", "last"}) CHECK(kinds.at(cata) == PredKind::Cata);
}

TEST_CASE("a problem without catamorphisms is all program") {
    const Problem p = parse_problem("pred p(int).\np(X) :- X > 0.\nfalse :- X < 0, p(X).\n");
    for (const auto& [name, kind] : classify_predicates(p))
        if (name == "p") CHECK(kind == PredKind::Program);
}

TEST_CASE("a catamorphism called from a program clause is rejected") {
    const Problem p = isort_with("pred bad(list(int)).\nbad(Xs) :- ordered(Xs, B), B.\n");
    CHECK_THROWS_AS(classify_predicates(p), AnalysisError);
}

TEST_CASE("list schemas of insertion sort") {
    const Problem p = test::load("isort.chc");
    const auto all = check_all_schemas(p);
    REQUIRE(all.size() == 3);

    const auto& ordered = schema_of(all, "ordered");
    CHECK(ordered.shape == SchemaShape::List);
    CHECK(ordered.inner == "first");
    CHECK(ordered.inputs.empty());
    CHECK(ordered.outputs == std::vector<Sort>{Sort::boolean()});
    REQUIRE(ordered.base != nullptr);
    REQUIRE(ordered.recursive != nullptr);
    CHECK(to_string(ordered.combine) == to_string(ordered.recursive->constraint));

    const auto& last = schema_of(all, "last");
    CHECK(last.inner.empty());
    CHECK(last.outputs == std::vector<Sort>{Sort::boolean(), Sort::integer()});

    const auto& first = schema_of(all, "first");
    CHECK(first.inner.empty());
}

TEST_CASE("tree schema with one inner catamorphism on both subtrees") {
    const Problem p = parse_problem(kTreeSource);
    const auto all = check_all_schemas(p);
    const auto& sorted = schema_of(all, "sorted");
    CHECK(sorted.shape == SchemaShape::Tree);
    CHECK(sorted.inner == "bounds");
    CHECK(schema_of(all, "size").inner.empty());
    CHECK_NOTHROW(validate_queries(p));
}

TEST_CASE("schema violations") {
    SUBCASE("two base clauses") {
        const Problem p = isort_with("cata two(adt: list(int), out: int).\n"
                                     "two([], N) :- N = 0.\ntwo([], N) :- N = 1.\n"
                                     "two([H|T], N) :- N = M + 1, two(T, M).\n");
        CHECK_THROWS_WITH_AS(check_schema(p, "two"), doctest::Contains("more than one base clause"), AnalysisError);
    }
    SUBCASE("missing base clause") {
        const Problem p = isort_with("cata len(adt: list(int), out: int).\nlen([H|T], N) :- N = M + 1, len(T, M).\n");
        CHECK_THROWS_WITH_AS(check_schema(p, "len"), doctest::Contains("missing base clause"), AnalysisError);
    }
    SUBCASE("self call on the whole list") {
        const Problem p = isort_with("cata len(adt: list(int), out: int).\nlen([], N) :- N = 0.\n"
                                     "len([H|T], N) :- N = M + 1, len([H|T], M).\n");
        CHECK_THROWS_AS(check_schema(p, "len"), AnalysisError);
    }
    SUBCASE("two different inner catamorphisms") {
        const Problem p = isort_with("cata odd(adt: list(int), out: bool).\n"
                                     "odd([], B) :- ~B.\n"
                                     "odd([H|T], B) :- B = (B1 & B2 & ~B3), odd(T, B3), ordered(T, B1), first(T, B2, F).\n");
        CHECK_THROWS_WITH_AS(check_schema(p, "odd"), doctest::Contains("more than one inner"), AnalysisError);
    }
}

TEST_CASE("query specs of q1 and q4") {
    const Problem p = test::load("isort.chc");
    const auto specs = validate_queries(p);
    REQUIRE(specs.size() == 4);

    const QuerySpec& q1 = specs[0];
    CHECK(q1.program_atom.pred == "ins_sort");
    REQUIRE(q1.catas.size() == 2);
    CHECK(to_string(q1.catas[0].atom) == "ordered(Xs,B1)");
    CHECK(to_string(q1.catas[1].atom) == "ordered(Zs,B2)");
    CHECK(to_string(q1.constraint) == to_string(p.queries[0].constraint));

    const QuerySpec& q4 = specs[3];
    CHECK(q4.program_atom.pred == "snoc");
    REQUIRE(q4.catas.size() == 3);
    std::set<std::string> adts;
    for (const auto& c : q4.catas) adts.insert(c.adt.name());
    CHECK(adts == std::set<std::string>{"Xs", "XsX"});
}

TEST_CASE("each query condition is reported by name") {
    auto condition_of = [](const std::string& query) -> std::string {
        const Problem p = isort_with("pred keep(list(int), list(int)).\npred put(int, list(int)).\n"
                                     "keep(Xs, Xs).\nput(X, [X]).\n" + query);
        try {
            validate_query(p, p.queries.back());
        } catch (const QueryError& e) {
            return e.condition();
        }
        return "";
    };
    CHECK(condition_of("false :- ordered(Xs, B), ~B.\n") == "i");
    CHECK(condition_of("false :- ~B & Y > 0, ordered(Xs, B), keep(Xs, Ys).\n") == "ii");
    CHECK(condition_of("false :- B1 & ~B2, ordered(Xs, B1), ordered(Xs, B2), keep(Xs, Zs).\n") == "");
    CHECK(condition_of("false :- ~B, first(Xs, B, X), put(X, Xs).\n") == "iv");
    CHECK(condition_of("false :- ~B, ordered(Ws, B), keep(Xs, Ys).\n") == "v");
}

TEST_CASE("a program atom with a repeated argument violates condition (i)") {
    // The parser never produces one, so build it directly.
    const Problem p = isort_with("pred keep(list(int), list(int)).\nkeep(Xs, Xs).\nfalse :- ~B, ordered(Xs, B), keep(Xs, Ys).\n");
    Clause q = p.queries.back();
    q.body.back().args[1] = q.body.back().args[0];
    try {
        validate_query(p, q);
        FAIL("accepted");
    } catch (const QueryError& e) {
        CHECK(e.condition() == "i");
    }
}

TEST_CASE("io split follows the declaration") {
    const Problem p = isort_with("cata h(in: int, adt: list(int), out: int).\n"
                                 "h(N, [], R) :- R = N.\nh(N, [X|Xs], R) :- R = S + X, h(N, Xs, S).\n"
                                 "false :- ~(R >= N), h(N, Xs, R), empty_list(Xs).\n");
    const auto names = [](const std::vector<Expr>& xs) {
        std::vector<std::string> out;
        for (const auto& x : xs) out.push_back(x.name());
        return out;
    };
    const CataAtomSpec h = io_split(p, p.queries.back().body[0]);
    CHECK(names(h.in) == std::vector<std::string>{"N"});
    CHECK(h.adt.name() == "Xs");
    CHECK(names(h.out) == std::vector<std::string>{"R"});

    const CataAtomSpec last = io_split(p, p.queries[1].body[3]);
    CHECK(last.in.empty());
    CHECK(names(last.out) == std::vector<std::string>{"B4", "L"});
}

TEST_CASE("reassembled queries are logically identical") {
    const Problem p = test::load("isort.chc");
    ConstraintEngine engine(p.sorts, test::shared_oracle());
    const auto specs = validate_queries(p);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CAPTURE(i);
        CHECK(test::same_clause(engine, specs[i].reassemble(), p.queries[i]));
    }
}

TEST_CASE("proof obligations are well-sorted scripts") {
    REQUIRE_FALSE(parse_only("(declare-fun x () Int)\n(assert (and x true))\n").empty());
    for (const Problem& p : {test::load("isort.chc"), parse_problem(kTreeSource)}) {
        for (const auto& s : check_all_schemas(p)) {
            CAPTURE(s.pred);
            CHECK(parse_only(s.functionality_obligation).empty());
            CHECK(parse_only(s.totality_obligation).empty());
        }
    }
}

TEST_CASE("obligations of a non-recursive catamorphism are discharged") {
    const auto all = check_all_schemas(test::load("isort.chc"));
    const auto& first = schema_of(all, "first");
    CHECK(run_script(first.functionality_obligation) == std::vector<std::string>{"sat"});
    CHECK(run_script(first.totality_obligation) == std::vector<std::string>{"unsat"});
}

TEST_CASE("list catamorphisms match reference folds on every 0/1 list up to length 4") {
    Problem p = test::load("isort.chc");
    const Sort ls = p.sorts.list_of(Sort::integer());
    const auto lists = all_lists(4);
    CHECK(lists.size() == 31);
    for (const auto& xs : lists) {
        CAPTURE(xs.size());
        const Value v = list_value(ls, xs);
        const auto ordered = cata_outputs(p, "ordered", {}, v);
        const auto first = cata_outputs(p, "first", {}, v);
        const auto last = cata_outputs(p, "last", {}, v);
        REQUIRE(ordered.size() == 1);
        REQUIRE(first.size() == 1);
        REQUIRE(last.size() == 1);
        CHECK(ordered[0] == std::vector<Value>{Value::boolean(ordered_ref(xs))});
        CHECK(first[0] == std::vector<Value>{Value::boolean(!xs.empty()), Value::integer(head_of(xs).value_or(0))});
        CHECK(last[0] == std::vector<Value>{Value::boolean(!xs.empty()), Value::integer(xs.empty() ? 0 : xs.back())});
    }
}
