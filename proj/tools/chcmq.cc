// chcmq: transform, solve, verify and benchmark catamorphism-based CHC problems.
//
// Exit codes: 0 success, 1 parse or validation error, 2 transformation
// failure, 3 solver error, 4 verdict check failed (verify disagreement,
// bench expectation missed).

#include "chcmq/cata_analysis.hpp"
#include "chcmq/parser.hpp"
#include "chcmq/smtlib.hpp"
#include "chcmq/solver_driver.hpp"
#include "chcmq/transformer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace chcmq;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kTransform = 2, kSolver = 3, kCheck = 4 };

struct Config {
    SolverConfig solver = solver_config_from_env();
    OracleConfig oracle = oracle_config_from_env();
    int max_iterations = TransformOptions{}.max_iterations;
    std::string out;
    bool verbose = false;
    bool emit_obligations = false;
    int jobs = 1;
    double original_timeout = 0;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

// Parse, classify and check every query up front, so that invalid input is
// reported as such rather than as a transformation failure.
Problem load(const fs::path& file) {
    Problem p = parse_problem(read_file(file));
    classify_predicates(p);
    check_all_schemas(p);
    validate_queries(p);
    return p;
}

TransformResult transform(const Problem& p, const Config& cfg) {
    ConstraintEngine engine(p.sorts, std::make_shared<Z3Oracle>(cfg.oracle));
    TransformOptions opts;
    opts.max_iterations = cfg.max_iterations;
    return transform_all(p, engine, opts);
}

int cmd_transform(const fs::path& input, const Config& cfg) {
    const Problem p = load(input);
    const TransformResult r = transform(p, cfg);
    const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
    fs::create_directories(dir);
    const std::string stem = input.stem().string();
    const fs::path surface = dir / (stem + ".transformed.chc");
    const fs::path smt = dir / (stem + ".transformed.smt2");
    write_file(surface, to_surface(r.problem));
    write_file(smt, emit_smtlib(r.problem));
    write_file(dir / (stem + ".log.txt"), r.log.text());
    write_file(dir / (stem + ".log.json"), r.log.json());
    std::cout << surface.string() << "\n" << smt.string() << "\n" << (dir / (stem + ".log.txt")).string() << "\n";
    if (cfg.emit_obligations) {
        for (const auto& s : check_all_schemas(p)) {
            const fs::path f = dir / (stem + "." + s.pred + ".functionality.smt2");
            const fs::path t = dir / (stem + "." + s.pred + ".totality.smt2");
            write_file(f, s.functionality_obligation);
            write_file(t, s.totality_obligation);
            std::cout << f.string() << "\n" << t.string() << "\n";
        }
    }
    for (const auto& w : r.log.warnings) std::cerr << "warning: " << w << "\n";
    if (cfg.verbose) std::cerr << r.log.text();
    return kOk;
}

void print_result(const SolveResult& r) {
    std::cout << solve_verdict_name(r.verdict) << "\n";
    std::cerr << "time " << r.seconds << " s, solver " << r.solver << "\n";
    if (!r.diagnostic.empty()) std::cerr << r.diagnostic << "\n";
}

int cmd_solve(const fs::path& input, bool transformed, const Config& cfg) {
    const SolverDriver solver(cfg.solver);
    const Problem p = load(input);
    if (transformed) print_result(solver.solve(transform(p, cfg).problem));
    else print_result(solver.solve(p));
    return kOk;
}

int cmd_verify(const fs::path& input, const Config& cfg) {
    const SolverDriver solver(cfg.solver);
    const Problem p = load(input);
    const EquisatResult r = check_equisat(solver, p, transform(p, cfg).problem);
    std::cout << equisat_name(r.outcome) << " (original " << solve_verdict_name(r.original.verdict) << ", transformed "
              << solve_verdict_name(r.transformed.verdict) << ")\n";
    return r.outcome == Equisat::Disagree ? kCheck : kOk;
}

int cmd_bench(const fs::path& corpus, const Config& cfg) {
    BenchConfig bc;
    bc.solver = cfg.solver;
    bc.oracle = cfg.oracle;
    bc.transform.max_iterations = cfg.max_iterations;
    bc.jobs = cfg.jobs;
    bc.original_timeout_seconds = cfg.original_timeout;
    const BenchReport report = run_bench(corpus, bc);
    const fs::path base = fs::absolute(corpus).lexically_normal();
    const std::string name = (base.has_filename() ? base.filename() : base.parent_path().filename()).string();
    const fs::path dir = cfg.out.empty() ? (base.has_filename() ? base.parent_path() : base.parent_path().parent_path())
                                         : fs::path(cfg.out);
    const auto files = write_report(report, dir / (name + "-report"));
    std::cout << report.text();
    for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
    return report.all_met() ? kOk : kCheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Catamorphism-based CHC transformation and solving"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;

    app.add_option("--solver", cfg.solver.path, "CHC solver binary (env CHCMQ_SOLVER)");
    app.add_option("--solver-arg", cfg.solver.args, "Solver argument, repeatable; replaces the defaults");
    app.add_option("--timeout", cfg.solver.timeout_seconds, "Solver time limit in seconds (env CHCMQ_TIMEOUT)")
        ->check(CLI::PositiveNumber);
    app.add_option("--oracle", cfg.oracle.path, "SMT solver for constraint queries (env CHCMQ_ORACLE)");
    app.add_option("--max-iters", cfg.max_iterations, "Iteration cap of the definition fixpoint")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", cfg.out, "Output directory");
    app.add_flag("-v,--verbose", cfg.verbose, "Print the derivation log");

    fs::path input;
    auto* transform_cmd = app.add_subcommand("transform", "Write the transformed set, its SMT-LIB form and the log");
    transform_cmd->add_option("file", input, "Problem in surface syntax")->required()->check(CLI::ExistingFile);
    transform_cmd->add_flag("--emit-obligations", cfg.emit_obligations,
                            "Also write catamorphism functionality and totality scripts");

    bool transformed = false;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the problem, or its transformed set");
    solve_cmd->add_option("file", input, "Problem in surface syntax")->required()->check(CLI::ExistingFile);
    solve_cmd->add_flag("--transformed", transformed, "Solve the transformed set");

    auto* verify_cmd = app.add_subcommand("verify", "Check that original and transformed verdicts agree");
    verify_cmd->add_option("file", input, "Problem in surface syntax")->required()->check(CLI::ExistingFile);

    fs::path corpus;
    auto* bench_cmd = app.add_subcommand("bench", "Transform and solve every .chc file of a directory");
    bench_cmd->add_option("dir", corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    bench_cmd->add_option("--jobs", cfg.jobs, "Parallel workers")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--original-timeout", cfg.original_timeout,
                          "Time limit for the untransformed sets (default: --timeout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }

    try {
        if (*transform_cmd) return cmd_transform(input, cfg);
        if (*solve_cmd) return cmd_solve(input, transformed, cfg);
        if (*verify_cmd) return cmd_verify(input, cfg);
        if (*bench_cmd) return cmd_bench(corpus, cfg);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kInvalid;
    } catch (const QueryError& e) {
        std::cerr << "invalid " << e.what() << "\n";
        return kInvalid;
    } catch (const AnalysisError& e) {
        std::cerr << "invalid problem: " << e.what() << "\n";
        return kInvalid;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const TransformError& e) {
        std::cerr << "transformation failed: " << e.what() << "\n";
        return kTransform;
    } catch (const OracleError& e) {
        std::cerr << "transformation failed: " << e.what() << "\n";
        return kTransform;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTransform;
    }
    return kOk;
}
