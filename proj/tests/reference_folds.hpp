#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace chcmq::test {

// Reference folds over integer lists, written directly from the clause text.
inline std::optional<std::int64_t> head_of(const std::vector<std::int64_t>& xs) {
    if (xs.empty()) return std::nullopt;
    return xs.front();
}

inline bool ordered_ref(const std::vector<std::int64_t>& xs) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (xs[i] > xs[i + 1]) return false;
    return true;
}

inline std::vector<std::vector<std::int64_t>> all_lists(int max_len) {
    std::vector<std::vector<std::int64_t>> out{{}};
    for (std::size_t from = 0; from < out.size(); ++from) {
        if (static_cast<int>(out[from].size()) == max_len) continue;
        for (std::int64_t v : {0, 1}) {
            auto next = out[from];
            next.push_back(v);
            out.push_back(next);
        }
    }
    return out;
}

}  // namespace chcmq::test
