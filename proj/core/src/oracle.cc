#include "chcmq/oracle.hpp"

#include "child_wait.hpp"

#include <boost/process.hpp>

#include <cstdlib>

namespace bp = boost::process;

namespace chcmq {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

OracleConfig oracle_config_from_env() {
    OracleConfig c;
    if (const char* p = std::getenv("CHCMQ_ORACLE"); p && *p) c.path = p;
    if (const char* t = std::getenv("CHCMQ_ORACLE_TIMEOUT"); t && *t) c.timeout_ms = std::atoi(t);
    return c;
}

class Z3Oracle::Session {
public:
    explicit Session(const OracleConfig& cfg) {
        boost::filesystem::path exe = cfg.path;
        if (cfg.path.find('/') == std::string::npos) exe = bp::search_path(cfg.path);
        if (exe.empty()) throw OracleError("constraint oracle not found: " + cfg.path);
        child_ = bp::child(exe, "-in", "-smt2", bp::std_in < to_, bp::std_out > from_, bp::std_err > bp::null);
        to_ << "(set-option :timeout " << cfg.timeout_ms << ")\n" << std::flush;
    }

    ~Session() {
        if (child_.running()) {
            to_ << "(exit)\n" << std::flush;
            to_.pipe().close();
            std::error_code ec;
            if (!detail::wait_child(child_, std::chrono::milliseconds(200))) child_.terminate(ec);
        }
    }

    Verdict check(const std::string& body) {
        to_ << "(push 1)\n" << body << "(check-sat)\n(pop 1)\n" << std::flush;
        std::string line, errors;
        while (std::getline(from_, line)) {
            Verdict v;
            if (line == "sat") v = Verdict::Sat;
            else if (line == "unsat") v = Verdict::Unsat;
            else if (line == "unknown" || line == "timeout") v = Verdict::Unknown;
            else {
                errors += line + "\n";
                continue;
            }
            if (!errors.empty()) throw OracleError("constraint oracle rejected query\n" + errors + "query:\n" + body);
            return v;
        }
        throw OracleError("constraint oracle exited unexpectedly\n" + errors + "query:\n" + body);
    }

private:
    bp::opstream to_;
    bp::ipstream from_;
    bp::child child_;
};

Z3Oracle::Z3Oracle(OracleConfig config) : config_(std::move(config)) {}
Z3Oracle::~Z3Oracle() = default;

std::unique_ptr<Z3Oracle::Session> Z3Oracle::acquire() {
    {
        std::lock_guard lock(mu_);
        if (!idle_.empty()) {
            auto s = std::move(idle_.back());
            idle_.pop_back();
            return s;
        }
    }
    return std::make_unique<Session>(config_);
}

void Z3Oracle::release(std::unique_ptr<Session> s) {
    std::lock_guard lock(mu_);
    idle_.push_back(std::move(s));
}

Verdict Z3Oracle::check(const std::string& body) {
    {
        std::lock_guard lock(mu_);
        ++queries_;
        if (auto it = cache_.find(body); it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    auto session = acquire();
    // A session whose process died is dropped rather than returned.
    const Verdict v = session->check(body);
    release(std::move(session));
    std::lock_guard lock(mu_);
    cache_.emplace(body, v);
    return v;
}

std::size_t Z3Oracle::queries() const {
    std::lock_guard lock(mu_);
    return queries_;
}

std::size_t Z3Oracle::cache_hits() const {
    std::lock_guard lock(mu_);
    return hits_;
}

}  // namespace chcmq
