#include "support.hpp"

#include "chcmq/evaluator.hpp"
#include "chcmq/fourier_motzkin.hpp"

#include <doctest.h>

#include <random>

using namespace chcmq;

namespace {

Expr X() { return Expr::var("X", Sort::integer()); }
Expr Y() { return Expr::var("Y", Sort::integer()); }
Expr B(int i) { return Expr::var("B" + std::to_string(i), Sort::boolean()); }
Expr num(std::int64_t v) { return Expr::int_const(v); }
Expr ge(Expr a, Expr b) { return Expr::rel(Op::Ge, std::move(a), std::move(b)); }
Expr le(Expr a, Expr b) { return Expr::rel(Op::Le, std::move(a), std::move(b)); }
Expr plus(Expr a, std::int64_t k) { return Expr::add(a, num(k)); }

SortTable& no_sorts() {
    static SortTable t;
    return t;
}

ConstraintEngine engine() { return ConstraintEngine(no_sorts(), test::shared_oracle()); }

// Truth-table semantics over Bool variables and Int variables in [-2, 2].
bool truth_equivalent(const Expr& a, const Expr& b) {
    VarList vars = free_vars(a);
    for (const auto& v : free_vars(b)) vars.add(v);
    std::function<bool(std::size_t, Env&)> go = [&](std::size_t k, Env& env) {
        if (k == vars.size()) return holds(a, env) == holds(b, env);
        const Expr& v = vars.vars()[k];
        const int lo = v.sort().is_bool() ? 0 : -2;
        const int hi = v.sort().is_bool() ? 1 : 2;
        for (int x = lo; x <= hi; ++x) {
            env[v.name()] = v.sort().is_bool() ? Value::boolean(x) : Value::integer(x);
            if (!go(k + 1, env)) return false;
        }
        return true;
    };
    Env env;
    return go(0, env);
}

struct FormulaGen {
    std::mt19937& rng;

    Expr term() {
        switch (rng() % 3) {
        case 0: return X();
        case 1: return Y();
        default: return num(static_cast<int>(rng() % 5) - 2);
        }
    }

    Expr formula(int depth) {
        const int pick = static_cast<int>(rng() % (depth > 0 ? 9 : 4));
        switch (pick) {
        case 0: return B(1 + static_cast<int>(rng() % 3));
        case 1: return Expr::bool_const(rng() % 2);
        case 2: return le(term(), term());
        case 3: return Expr::rel(Op::Eq, term(), term());
        case 4: return Expr::not_(formula(depth - 1));
        case 5: return Expr::and_({formula(depth - 1), formula(depth - 1), formula(depth - 1)});
        case 6: return Expr::or_({formula(depth - 1), formula(depth - 1)});
        case 7: return Expr::implies(formula(depth - 1), formula(depth - 1));
        default: return Expr::iff(formula(depth - 1), formula(depth - 1));
        }
    }
};

}  // namespace

TEST_CASE("satisfiability") {
    auto e = engine();
    CHECK(e.satisfiability(Expr::and_({ge(X(), num(1)), le(X(), num(0))})) == Verdict::Unsat);
    CHECK(e.satisfiability(Expr::and_({B(1), Expr::not_(B(1))})) == Verdict::Unsat);
    const Expr f = Expr::and_({Expr::implies(B(1), B(2)), B(1), Expr::not_(B(2))});
    CHECK(e.satisfiability(f) == Verdict::Unsat);
    CHECK(truth_equivalent(f, Expr::ff()));
    CHECK(e.satisfiability(ge(X(), num(3))) == Verdict::Sat);
}

TEST_CASE("entailment") {
    auto e = engine();
    CHECK(e.entails(ge(X(), num(1)), ge(X(), num(0))));
    CHECK_FALSE(e.entails(ge(X(), num(0)), ge(X(), num(1))));
    CHECK(e.entails(Expr::tt(), Expr::tt()));
    const Expr both = Expr::and_({B(1), B(2)});
    const Expr imp = Expr::implies(B(1), B(2));
    CHECK(e.entails(both, imp));
    CHECK(truth_equivalent(Expr::implies(both, imp), Expr::tt()));
}

TEST_CASE("projection eliminates through equalities") {
    auto e = engine();
    const Expr c = Expr::and_({ge(X(), num(1)), Expr::rel(Op::Eq, Y(), plus(X(), 1))});
    const Expr r = e.project(c, {"Y"});
    for (const auto& v : free_vars(r)) CHECK(v.name() == "Y");
    CHECK(e.entails(c, r));
    CHECK(e.entails(r, ge(Y(), num(2))));
    CHECK(e.project(Expr::tt(), {"X"}).is_true());
    const Expr both = Expr::and_({ge(X(), num(1)), le(Y(), num(4))});
    CHECK(e.equivalent(e.project(both, {"X", "Y"}), both));
}

TEST_CASE("projection drops Boolean structure over eliminated variables") {
    auto e = engine();
    const Expr c = Expr::and_({Expr::iff(B(1), le(X(), Y())), B(2), ge(Y(), num(0))});
    const Expr r = e.project(c, {"B2", "Y"});
    for (const auto& v : free_vars(r)) CHECK((v.name() == "B2" || v.name() == "Y"));
    CHECK(e.entails(c, r));
    CHECK(e.entails(r, B(2)));
}

TEST_CASE("fourier-motzkin pairs bounds and tightens strict inequalities") {
    auto lo = to_linear(Expr::rel(Op::Lt, num(2), X()));  // 3 - X <= 0
    auto mid = to_linear(Expr::rel(Op::Lt, X(), Y()));    // X - Y + 1 <= 0
    REQUIRE(lo);
    REQUIRE(mid);
    auto out = fm_eliminate({*lo, *mid}, {"Y"});
    REQUIRE(out);
    REQUIRE(out->size() == 1);
    CHECK(to_string(to_expr(out->front())) == to_string(Expr::rel(Op::Le, Expr::scale(-1, Y()), num(-4))));
}

TEST_CASE("fourier-motzkin ignores zero coefficients") {
    LinearConstraint c{{{"X", 1}, {"Z", 0}}, -2, false};
    auto out = fm_eliminate({c}, {"X"});
    REQUIRE(out);
    REQUIRE(out->size() == 1);
    CHECK(out->front().coeffs == std::map<std::string, std::int64_t>{{"X", 1}});
}

TEST_CASE("fourier-motzkin projections are implied by the system") {
    std::mt19937 rng(5);
    const std::vector<std::string> names{"A", "B", "C"};
    for (int round = 0; round < 200; ++round) {
        std::vector<LinearConstraint> sys;
        for (int i = 0; i < 4; ++i) {
            LinearConstraint c;
            for (const auto& n : names) c.coeffs[n] = static_cast<std::int64_t>(rng() % 5) - 2;
            c.constant = static_cast<std::int64_t>(rng() % 7) - 3;
            c.equality = rng() % 5 == 0;
            sys.push_back(c);
        }
        const auto out = fm_eliminate(sys, {"A"});
        REQUIRE(out);
        auto value = [](const LinearConstraint& c, const std::map<std::string, std::int64_t>& at) {
            std::int64_t v = c.constant;
            for (const auto& [n, k] : c.coeffs) v += k * at.at(n);
            return c.equality ? v == 0 : v <= 0;
        };
        for (int a = -4; a <= 4; ++a)
            for (int b = -4; b <= 4; ++b)
                for (int cc = -4; cc <= 4; ++cc) {
                    const std::map<std::string, std::int64_t> at{{"A", a}, {"B", b}, {"C", cc}};
                    if (!std::all_of(sys.begin(), sys.end(), [&](const auto& c) { return value(c, at); })) continue;
                    for (const auto& c : *out) CHECK(value(c, at));
                }
    }
}

TEST_CASE("generalization keeps entailed conjuncts") {
    auto e = engine();
    const Expr d = Expr::and_({ge(X(), num(0)), le(X(), num(5))});
    const Expr c = Expr::and_({ge(X(), num(0)), le(X(), num(9))});
    CHECK(e.generalize(d, c) == ge(X(), num(0)));
    CHECK(e.generalize(c, c) == c);
    CHECK(e.generalize(Expr::tt(), c).is_true());
    CHECK(e.generalize(Expr::or_({B(1), B(2)}), B(1)).is_true());
}

TEST_CASE("simplify rules") {
    CHECK(simplify(Expr::and_({Expr::tt(), B(1)})) == B(1));
    CHECK(simplify(Expr::not_(Expr::not_(B(1)))) == B(1));
    CHECK(simplify(Expr::or_({B(1), Expr::tt()})).is_true());
    CHECK(simplify(Expr::and_({B(1), Expr::and_({B(2), B(3)})})) == Expr::and_({B(1), B(2), B(3)}));
    CHECK(simplify(le(num(1), num(2))).is_true());
}

TEST_CASE("simplify preserves meaning on random formulas") {
    std::mt19937 rng(3);
    FormulaGen gen{rng};
    auto e = engine();
    for (int i = 0; i < 100; ++i) {
        const Expr f = gen.formula(3);
        const Expr s = simplify(f);
        CAPTURE(to_string(f));
        CAPTURE(to_string(s));
        CHECK(truth_equivalent(f, s));
        CHECK(e.equivalent(f, s));
    }
}

TEST_CASE("entailment is reflexive and transitive on a sample") {
    std::mt19937 rng(5);
    FormulaGen gen{rng};
    auto e = engine();
    for (int i = 0; i < 30; ++i) {
        const Expr a = gen.formula(2), b = gen.formula(2), c = gen.formula(2);
        CHECK(e.entails(a, a));
        const Expr ab = Expr::and_({a, b});
        const Expr abc = Expr::and_({ab, c});
        if (e.entails(abc, ab) && e.entails(ab, a)) CHECK(e.entails(abc, a));
        if (e.entails(a, b) && e.entails(b, c)) CHECK(e.entails(a, c));
    }
}

TEST_CASE("widening chains shrink monotonically and stabilize") {
    std::mt19937 rng(13);
    auto e = engine();
    const std::vector<Expr> pool = {ge(X(), num(0)), le(X(), num(5)), ge(Y(), X()), B(1), Expr::not_(B(2)),
                                    Expr::iff(B(3), le(X(), Y())), le(Y(), num(9)), ge(Y(), num(-3))};
    for (int chain = 0; chain < 10; ++chain) {
        std::vector<Expr> start;
        for (const auto& a : pool)
            if (rng() % 2) start.push_back(a);
        Expr d = Expr::and_(start);
        std::size_t size = atomic_conjuncts(d)->size();
        for (int step = 0; step < 8; ++step) {
            std::vector<Expr> next;
            for (const auto& a : pool)
                if (rng() % 3) next.push_back(a);
            const Expr c = Expr::and_(next);
            const Expr g = e.generalize(d, c);
            CHECK(e.entails(d, g));
            CHECK(e.entails(c, g));
            const auto parts = atomic_conjuncts(g);
            REQUIRE(parts);
            CHECK(parts->size() <= size);
            for (const auto& p : *parts) CHECK(std::find(start.begin(), start.end(), p) != start.end());
            size = parts->size();
            d = g;
        }
    }
}

TEST_CASE("catamorphisms evaluate to exactly one output per small list") {
    Problem p = test::load("isort.chc");
    const Sort ls = p.sorts.list_of(Sort::integer());
    auto outs = [&](const char* pred, std::vector<std::int64_t> xs) {
        return cata_outputs(p, pred, {}, list_value(ls, xs));
    };
    CHECK(outs("ordered", {0, 1}) == std::vector<std::vector<Value>>{{Value::boolean(true)}});
    CHECK(outs("ordered", {1, 0}) == std::vector<std::vector<Value>>{{Value::boolean(false)}});
    CHECK(outs("last", {1, 0}) == std::vector<std::vector<Value>>{{Value::boolean(true), Value::integer(0)}});
    CHECK(outs("first", {}) == std::vector<std::vector<Value>>{{Value::boolean(false), Value::integer(0)}});
}
