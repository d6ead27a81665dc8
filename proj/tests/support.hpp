#pragma once

#include "chcmq/constraint_engine.hpp"
#include "chcmq/parser.hpp"
#include "chcmq/unify.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace chcmq::test {

inline std::filesystem::path corpus_dir() {
    const char* dir = std::getenv("CHCMQ_CORPUS");
    return dir ? dir : "corpus";
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Problem load(const std::string& name) { return parse_problem(read_file(corpus_dir() / name)); }

/// One oracle process pool per test binary.
inline std::shared_ptr<Oracle> shared_oracle() {
    static auto oracle = std::make_shared<Z3Oracle>(oracle_config_from_env());
    return oracle;
}

/// `got` equals `want` up to a bijective variable renaming, with the
/// predicates of `want` renamed by `preds`. Body atoms are compared as a
/// multiset unless `ordered`; constraints must be equivalent.
inline bool same_clause(ConstraintEngine& engine, const Clause& got, const Clause& want,
                        const std::map<std::string, std::string>& preds = {}, bool ordered = false) {
    auto rename = [&](Atom a) {
        if (auto it = preds.find(a.pred); it != preds.end()) a.pred = it->second;
        return a;
    };
    if (got.is_query() != want.is_query() || got.body.size() != want.body.size()) return false;
    Substitution s;
    if (want.head && !variant(rename(*want.head), *got.head, s)) return false;
    std::vector<bool> used(got.body.size(), false);
    std::function<bool(std::size_t, const Substitution&)> go = [&](std::size_t i, const Substitution& cur) {
        if (i == want.body.size()) return engine.equivalent(cur.apply(want.constraint), got.constraint);
        for (std::size_t j = ordered ? i : 0; j < (ordered ? i + 1 : got.body.size()); ++j) {
            if (used[j]) continue;
            Substitution trial = cur;
            if (!variant(rename(want.body[i]), got.body[j], trial)) continue;
            used[j] = true;
            const bool ok = go(i + 1, trial);
            used[j] = false;
            if (ok) return true;
        }
        return false;
    };
    return go(0, s);
}

}  // namespace chcmq::test
