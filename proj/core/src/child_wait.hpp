#pragma once

#include <boost/process/child.hpp>

#include <chrono>
#include <thread>

namespace chcmq::detail {

/// Polls until `c` exits or `limit` elapses; true if it exited. Unlike
/// `child::wait_for`, this does not install a SIGCHLD handler, which
/// misbehaves when several threads wait at once.
inline bool wait_child(boost::process::child& c, std::chrono::duration<double> limit) {
    const auto deadline = std::chrono::steady_clock::now() + limit;
    std::error_code ec;
    auto pause = std::chrono::microseconds(200);
    while (c.running(ec)) {
        if (ec || std::chrono::steady_clock::now() >= deadline) return false;
        std::this_thread::sleep_for(pause);
        pause = std::min(pause * 2, std::chrono::microseconds(20000));
    }
    return !ec;
}

}  // namespace chcmq::detail
