#include "chcmq/solver_driver.hpp"

#include "chcmq/parser.hpp"
#include "chcmq/smtlib.hpp"

#include "child_wait.hpp"

#include <boost/filesystem.hpp>
#include <boost/process.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace bp = boost::process;

namespace chcmq {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

std::filesystem::path temp_path(const char* model) {
    return (boost::filesystem::temp_directory_path() / boost::filesystem::unique_path(model)).string();
}

std::string seconds_str(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << s;
    return os.str();
}

}  // namespace

const char* solve_verdict_name(SolveVerdict v) {
    switch (v) {
    case SolveVerdict::Sat: return "sat";
    case SolveVerdict::Unsat: return "unsat";
    case SolveVerdict::Unknown: return "unknown";
    case SolveVerdict::Timeout: return "timeout";
    }
    return "?";
}

std::optional<SolveVerdict> parse_solve_verdict(const std::string& s) {
    if (s == "sat") return SolveVerdict::Sat;
    if (s == "unsat") return SolveVerdict::Unsat;
    if (s == "unknown") return SolveVerdict::Unknown;
    if (s == "timeout") return SolveVerdict::Timeout;
    return std::nullopt;
}

SolverConfig solver_config_from_env() {
    SolverConfig c;
    if (const char* p = std::getenv("CHCMQ_SOLVER"); p && *p) c.path = p;
    if (const char* t = std::getenv("CHCMQ_TIMEOUT"); t && *t) c.timeout_seconds = std::atof(t);
    return c;
}

SolverDriver::SolverDriver(SolverConfig config) : config_(std::move(config)) {
    if (config_.path.find('/') == std::string::npos) exe_ = bp::search_path(config_.path).string();
    else if (std::filesystem::exists(config_.path)) exe_ = config_.path;
    if (exe_.empty()) throw SolverError("solver not found: " + config_.path);

    identity_ = exe_.string();
    bp::ipstream out;
    bp::child c(exe_.string(), "--version", bp::std_out > out, bp::std_err > bp::null, bp::std_in < bp::null);
    if (std::string line; std::getline(out, line) && !trim(line).empty()) identity_ += " (" + trim(line) + ")";
    c.wait();
}

SolveResult SolverDriver::solve(const Problem& p, std::optional<double> timeout) const {
    return solve_script(emit_smtlib(p), timeout);
}

SolveResult SolverDriver::solve(const Problem& p, const std::vector<Clause>& clauses,
                                std::optional<double> timeout) const {
    return solve_script(emit_smtlib(p, clauses), timeout);
}

SolveResult SolverDriver::solve_script(const std::string& smt, std::optional<double> timeout) const {
    const double limit = timeout.value_or(config_.timeout_seconds);
    const auto input = temp_path("chcmq-%%%%-%%%%-%%%%.smt2");
    const auto output = temp_path("chcmq-%%%%-%%%%-%%%%.out");
    std::ofstream(input) << smt;

    SolveResult r;
    r.solver = identity_;
    std::vector<std::string> argv = config_.args;
    argv.push_back(input.string());
    const auto t0 = Clock::now();
    bp::child c(exe_.string(), argv, bp::std_out > output.string(), bp::std_err > bp::null, bp::std_in < bp::null);
    std::error_code ec;
    const bool finished = detail::wait_child(c, std::chrono::duration<double>(limit));
    if (!finished) {
        c.terminate(ec);
        r.seconds = since(t0);
        r.verdict = SolveVerdict::Timeout;
    } else {
        r.seconds = since(t0);
        const std::string text = read_all(output);
        std::istringstream in(text);
        std::string first;
        in >> first;
        if (auto v = parse_solve_verdict(first)) {
            r.verdict = *v;
        } else {
            r.verdict = SolveVerdict::Unknown;
            r.diagnostic = trim(text);
            if (r.diagnostic.empty()) r.diagnostic = "no output, exit code " + std::to_string(c.exit_code());
        }
    }
    std::filesystem::remove(input, ec);
    std::filesystem::remove(output, ec);
    return r;
}

const char* equisat_name(Equisat e) {
    switch (e) {
    case Equisat::Agree: return "agree";
    case Equisat::Disagree: return "disagree";
    case Equisat::Inconclusive: return "inconclusive";
    }
    return "?";
}

Equisat compare_verdicts(SolveVerdict original, SolveVerdict transformed) {
    auto definitive = [](SolveVerdict v) { return v == SolveVerdict::Sat || v == SolveVerdict::Unsat; };
    if (!definitive(original) || !definitive(transformed)) return Equisat::Inconclusive;
    return original == transformed ? Equisat::Agree : Equisat::Disagree;
}

EquisatResult check_equisat(const SolverDriver& solver, const Problem& original, const Problem& transformed,
                            std::optional<double> timeout) {
    EquisatResult r;
    r.original = solver.solve(original, timeout);
    r.transformed = solver.solve(transformed, timeout);
    r.outcome = compare_verdicts(r.original.verdict, r.transformed.verdict);
    return r;
}

bool BenchRow::met() const {
    if (!expected) return true;
    return transformed && transformed->verdict == *expected;
}

Equisat BenchRow::equisat() const {
    if (!original || !transformed) return Equisat::Inconclusive;
    return compare_verdicts(original->verdict, transformed->verdict);
}

BenchTotals BenchReport::totals_of(const std::vector<BenchRow>& rows) {
    BenchTotals t;
    for (const auto& r : rows) {
        ++t.problems;
        t.queries += r.queries;
        if (r.original) {
            t.original_sat += r.original->verdict == SolveVerdict::Sat;
            t.original_unsat += r.original->verdict == SolveVerdict::Unsat;
            t.original_seconds += r.original->seconds;
        }
        if (r.transformed) {
            t.transformed_sat += r.transformed->verdict == SolveVerdict::Sat;
            t.transformed_unsat += r.transformed->verdict == SolveVerdict::Unsat;
            t.transformed_seconds += r.transformed->seconds;
        }
        t.transform_seconds += r.transform_seconds;
        t.errors += !r.error.empty();
        t.missed += !r.met();
        t.disagreements += r.equisat() == Equisat::Disagree;
    }
    return t;
}

namespace {

std::string status_of(const BenchRow& r) {
    if (!r.error.empty()) return "error";
    if (r.equisat() == Equisat::Disagree) return "disagree";
    if (!r.met()) return "missed";
    return "ok";
}

std::string verdict_cell(const std::optional<SolveResult>& r) { return r ? solve_verdict_name(r->verdict) : "-"; }
std::string seconds_cell(const std::optional<SolveResult>& r) { return r ? seconds_str(r->seconds) : "-"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string BenchReport::text() const {
    std::size_t w = 7;
    for (const auto& r : rows) w = std::max(w, r.name.size());
    std::ostringstream os;
    os << "solver: " << solver << "\n\n";
    auto line = [&](const std::string& name, const std::string& q, const std::string& exp, const std::string& ov,
                    const std::string& ot, const std::string& tv, const std::string& tt, const std::string& tr,
                    const std::string& st) {
        os << std::left << std::setw(static_cast<int>(w) + 2) << name << std::right << std::setw(4) << q
           << std::setw(8) << exp << std::setw(10) << ov << std::setw(9) << ot << std::setw(10) << tv
           << std::setw(9) << tt << std::setw(11) << tr << "  " << st << "\n";
    };
    line("problem", "q", "expect", "original", "time", "transf.", "time", "transform", "status");
    for (const auto& r : rows) {
        line(r.name, std::to_string(r.queries), r.expected ? solve_verdict_name(*r.expected) : "-",
             verdict_cell(r.original), seconds_cell(r.original), verdict_cell(r.transformed),
             seconds_cell(r.transformed), seconds_str(r.transform_seconds), status_of(r));
    }
    const BenchTotals& t = totals;
    os << "\nproblems " << t.problems << ", queries " << t.queries << "\n"
       << "original: " << t.original_sat << " sat, " << t.original_unsat << " unsat, "
       << seconds_str(t.original_seconds) << " s\n"
       << "transformed: " << t.transformed_sat << " sat, " << t.transformed_unsat << " unsat, "
       << seconds_str(t.transformed_seconds) << " s solving, " << seconds_str(t.transform_seconds)
       << " s transforming\n"
       << "missed " << t.missed << ", errors " << t.errors << ", disagreements " << t.disagreements << "\n";
    for (const auto& r : rows)
        if (!r.error.empty()) os << r.name << ": " << r.error << "\n";
    return os.str();
}

std::string BenchReport::csv() const {
    std::ostringstream os;
    os << "name,queries,expected,original,original_s,transformed,transformed_s,transform_s,status,error\n";
    for (const auto& r : rows) {
        os << csv_field(r.name) << ',' << r.queries << ',' << (r.expected ? solve_verdict_name(*r.expected) : "")
           << ',' << (r.original ? solve_verdict_name(r.original->verdict) : "") << ','
           << (r.original ? seconds_str(r.original->seconds) : "") << ','
           << (r.transformed ? solve_verdict_name(r.transformed->verdict) : "") << ','
           << (r.transformed ? seconds_str(r.transformed->seconds) : "") << ',' << seconds_str(r.transform_seconds)
           << ',' << status_of(r) << ',' << csv_field(r.error) << "\n";
    }
    return os.str();
}

std::optional<SolveVerdict> expected_verdict(const std::string& source) {
    std::istringstream in(source);
    for (std::string line; std::getline(in, line);) {
        const auto at = line.find("% expect:");
        if (at == std::string::npos) continue;
        const auto v = parse_solve_verdict(trim(line.substr(at + 9)));
        if (v == SolveVerdict::Sat || v == SolveVerdict::Unsat) return v;
    }
    return std::nullopt;
}

BenchReport run_bench(const std::filesystem::path& corpus, const BenchConfig& config) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(corpus))
        for (const auto& e : std::filesystem::directory_iterator(corpus))
            if (e.is_regular_file() && e.path().extension() == ".chc") files.push_back(e.path());
    std::sort(files.begin(), files.end());

    BenchReport report;
    report.rows.resize(files.size());
    if (!files.empty()) {
        const SolverDriver solver(config.solver);
        report.solver = solver.identity();
        auto oracle = std::make_shared<Z3Oracle>(config.oracle);
        const double original_limit =
            config.original_timeout_seconds > 0 ? config.original_timeout_seconds : config.solver.timeout_seconds;

        auto run_one = [&](const std::filesystem::path& file) {
            BenchRow row;
            row.name = file.filename().string();
            const std::string source = read_all(file);
            row.expected = expected_verdict(source);
            try {
                Problem p = parse_problem(source);
                row.queries = p.queries.size();
                if (config.solve_original) row.original = solver.solve(p, original_limit);
                ConstraintEngine engine(p.sorts, oracle);
                const auto t0 = Clock::now();
                const TransformResult t = transform_all(p, engine, config.transform);
                row.transform_seconds = since(t0);
                row.transformed = solver.solve(t.problem);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        };

        std::atomic<std::size_t> next{0};
        const int jobs = std::clamp(config.jobs, 1, static_cast<int>(files.size()));
        {
            std::vector<std::jthread> workers;
            for (int j = 0; j < jobs; ++j)
                workers.emplace_back([&] {
                    for (std::size_t i; (i = next++) < files.size();) report.rows[i] = run_one(files[i]);
                });
        }
    }
    report.totals = BenchReport::totals_of(report.rows);
    return report;
}

std::vector<std::filesystem::path> write_report(const BenchReport& report, const std::filesystem::path& stem) {
    if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
    std::filesystem::path txt = stem, csv = stem;
    txt += ".txt";
    csv += ".csv";
    std::ofstream(txt) << report.text();
    std::ofstream(csv) << report.csv();
    return {txt, csv};
}

}  // namespace chcmq
