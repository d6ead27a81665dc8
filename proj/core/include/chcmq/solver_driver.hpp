#pragma once

#include "chcmq/clause.hpp"
#include "chcmq/oracle.hpp"
#include "chcmq/transformer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chcmq {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolveVerdict : std::uint8_t { Sat, Unsat, Unknown, Timeout };
const char* solve_verdict_name(SolveVerdict v);
std::optional<SolveVerdict> parse_solve_verdict(const std::string& s);

struct SolverConfig {
    std::string path = "z3";
    std::vector<std::string> args = {"fp.engine=spacer"};
    double timeout_seconds = 300;
};

/// CHCMQ_SOLVER (binary) and CHCMQ_TIMEOUT (seconds) over the defaults.
SolverConfig solver_config_from_env();

struct SolveResult {
    SolveVerdict verdict = SolveVerdict::Unknown;
    double seconds = 0;
    std::string solver;
    /// Solver output that was not a verdict, if any.
    std::string diagnostic;

    bool definitive() const { return verdict == SolveVerdict::Sat || verdict == SolveVerdict::Unsat; }
};

/// Runs `<path> <args> <file.smt2>` once per call, killing it at the timeout.
class SolverDriver {
public:
    /// Throws SolverError if the binary cannot be found.
    explicit SolverDriver(SolverConfig config);

    /// `timeout` overrides the configured limit for this call.
    SolveResult solve(const Problem& p, std::optional<double> timeout = {}) const;
    SolveResult solve(const Problem& p, const std::vector<Clause>& clauses, std::optional<double> timeout = {}) const;
    SolveResult solve_script(const std::string& smt, std::optional<double> timeout = {}) const;

    /// Binary path and first line of its `--version` output.
    const std::string& identity() const { return identity_; }
    const SolverConfig& config() const { return config_; }

private:
    SolverConfig config_;
    std::filesystem::path exe_;
    std::string identity_;
};

enum class Equisat : std::uint8_t { Agree, Disagree, Inconclusive };
const char* equisat_name(Equisat e);

/// Disagree only if both verdicts are definitive and differ.
Equisat compare_verdicts(SolveVerdict original, SolveVerdict transformed);

struct EquisatResult {
    Equisat outcome = Equisat::Inconclusive;
    SolveResult original;
    SolveResult transformed;
};

/// Solves both sets; `timeout` overrides the solver limit for each call.
EquisatResult check_equisat(const SolverDriver& solver, const Problem& original, const Problem& transformed,
                            std::optional<double> timeout = {});

struct BenchConfig {
    SolverConfig solver;
    /// Limit for the untransformed sets; they rarely finish, so a smaller
    /// limit keeps runs short. Zero means `solver.timeout_seconds`.
    double original_timeout_seconds = 0;
    bool solve_original = true;
    OracleConfig oracle;
    TransformOptions transform;
    int jobs = 1;
};

struct BenchRow {
    std::string name;
    std::size_t queries = 0;
    std::optional<SolveVerdict> expected;
    std::optional<SolveResult> original;
    std::optional<SolveResult> transformed;
    double transform_seconds = 0;
    std::string error;

    /// No expectation, or the transformed verdict equals it.
    bool met() const;
    Equisat equisat() const;
};

struct BenchTotals {
    std::size_t problems = 0;
    std::size_t queries = 0;
    std::size_t original_sat = 0, original_unsat = 0;
    std::size_t transformed_sat = 0, transformed_unsat = 0;
    std::size_t errors = 0, missed = 0, disagreements = 0;
    double original_seconds = 0, transformed_seconds = 0, transform_seconds = 0;

    friend bool operator==(const BenchTotals&, const BenchTotals&) = default;
};

struct BenchReport {
    std::vector<BenchRow> rows;  // sorted by name
    BenchTotals totals;
    std::string solver;

    static BenchTotals totals_of(const std::vector<BenchRow>& rows);
    bool all_met() const { return totals.missed == 0 && totals.errors == 0 && totals.disagreements == 0; }

    std::string text() const;
    std::string csv() const;
};

/// The `% expect: sat|unsat` tag of a surface file, if any.
std::optional<SolveVerdict> expected_verdict(const std::string& source);

/// Transforms and solves every `*.chc` file of `corpus`, original and
/// transformed set, on `config.jobs` workers. Per-problem failures land in
/// the row's `error`.
BenchReport run_bench(const std::filesystem::path& corpus, const BenchConfig& config);

/// Writes `<stem>.txt` and `<stem>.csv`; returns both paths.
std::vector<std::filesystem::path> write_report(const BenchReport& report, const std::filesystem::path& stem);

}  // namespace chcmq
