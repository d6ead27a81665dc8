// Micro benchmarks. The transformation benchmarks need z3 (CHCMQ_ORACLE or
// PATH); the corpus is read from CHCMQ_CORPUS or the source tree.

#include "chcmq/cata_analysis.hpp"
#include "chcmq/fourier_motzkin.hpp"
#include "chcmq/parser.hpp"
#include "chcmq/smtlib.hpp"
#include "chcmq/transformer.hpp"
#include "chcmq/unify.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace chcmq;

namespace {

std::string corpus_file(const std::string& name) {
    const char* dir = std::getenv("CHCMQ_CORPUS");
    std::ifstream in(std::filesystem::path(dir ? dir : CHCMQ_SOURCE_CORPUS) / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& isort_source() {
    static const std::string text = corpus_file("isort.chc");
    return text;
}

void BM_ParseIsort(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(parse_problem(isort_source()));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * isort_source().size()));
}
BENCHMARK(BM_ParseIsort);

void BM_ValidateQueries(benchmark::State& state) {
    const Problem p = parse_problem(isort_source());
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_all_schemas(p));
        benchmark::DoNotOptimize(validate_queries(p));
    }
}
BENCHMARK(BM_ValidateQueries);

void BM_EmitSmtlib(benchmark::State& state) {
    const Problem p = parse_problem(isort_source());
    for (auto _ : state) benchmark::DoNotOptimize(emit_smtlib(p));
}
BENCHMARK(BM_EmitSmtlib);

// Variant check of two wide atoms that differ only in variable names.
void BM_VariantWideAtom(benchmark::State& state) {
    const auto width = static_cast<int>(state.range(0));
    Atom a{"p", {}}, b{"p", {}};
    for (int i = 0; i < width; ++i) {
        a.args.push_back(Expr::var("X" + std::to_string(i), Sort::integer()));
        b.args.push_back(Expr::var("Y" + std::to_string(width - i), Sort::integer()));
    }
    for (auto _ : state) {
        Substitution s;
        benchmark::DoNotOptimize(variant(a, b, s));
    }
}
BENCHMARK(BM_VariantWideAtom)->Arg(8)->Arg(32)->Arg(128);

// Projection of a random bounded system onto two of its variables.
void BM_FourierMotzkin(benchmark::State& state) {
    const auto vars = static_cast<int>(state.range(0));
    std::mt19937 rng(7);
    std::vector<LinearConstraint> system;
    for (int i = 0; i < 2 * vars; ++i) {
        LinearConstraint c;
        for (int v = 0; v < vars; ++v)
            if (rng() % 2) c.coeffs["V" + std::to_string(v)] = static_cast<std::int64_t>(rng() % 5) - 2;
        c.constant = static_cast<std::int64_t>(rng() % 11) - 5;
        system.push_back(std::move(c));
    }
    const std::set<std::string> keep{"V0", "V1"};
    for (auto _ : state) benchmark::DoNotOptimize(fm_eliminate(system, keep, 4096));
}
BENCHMARK(BM_FourierMotzkin)->Arg(4)->Arg(6)->Arg(8);

// Oracle verdicts are cached across iterations, so this measures the
// transformer itself after the first pass.
void BM_TransformIsortWarm(benchmark::State& state) {
    const Problem p = parse_problem(isort_source());
    ConstraintEngine engine(p.sorts, std::make_shared<Z3Oracle>(oracle_config_from_env()));
    for (auto _ : state) benchmark::DoNotOptimize(transform_all(p, engine));
    state.counters["oracle_calls"] = static_cast<double>(engine.oracle_calls()) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_TransformIsortWarm)->Unit(benchmark::kMillisecond);

// Fresh oracle processes every iteration.
void BM_TransformIsortCold(benchmark::State& state) {
    const Problem p = parse_problem(isort_source());
    for (auto _ : state) {
        ConstraintEngine engine(p.sorts, std::make_shared<Z3Oracle>(oracle_config_from_env()));
        benchmark::DoNotOptimize(transform_all(p, engine));
    }
}
BENCHMARK(BM_TransformIsortCold)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
