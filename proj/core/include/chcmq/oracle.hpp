#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace chcmq {

enum class Verdict : std::uint8_t { Sat, Unsat, Unknown };
const char* verdict_name(Verdict v);

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decides satisfiability of SMT-LIB query bodies (declarations plus
/// assertions, no check-sat).
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual Verdict check(const std::string& body) = 0;
};

struct OracleConfig {
    std::string path = "z3";
    int timeout_ms = 5000;
};

/// Oracle config from CHCMQ_ORACLE (binary path) and CHCMQ_ORACLE_TIMEOUT
/// (milliseconds), falling back to `z3` on PATH.
OracleConfig oracle_config_from_env();

/// Interactive z3 processes (`-in -smt2`), one per concurrent caller,
/// each query wrapped in push/pop. Verdicts are cached by query text.
class Z3Oracle : public Oracle {
public:
    explicit Z3Oracle(OracleConfig config);
    ~Z3Oracle() override;
    Z3Oracle(const Z3Oracle&) = delete;
    Z3Oracle& operator=(const Z3Oracle&) = delete;

    Verdict check(const std::string& body) override;

    std::size_t queries() const;
    std::size_t cache_hits() const;

    class Session;

private:
    std::unique_ptr<Session> acquire();
    void release(std::unique_ptr<Session> s);

    OracleConfig config_;
    mutable std::mutex mu_;
    std::vector<std::unique_ptr<Session>> idle_;
    std::unordered_map<std::string, Verdict> cache_;
    std::size_t queries_ = 0;
    std::size_t hits_ = 0;
};

}  // namespace chcmq
