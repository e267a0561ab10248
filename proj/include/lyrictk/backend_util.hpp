#pragma once

#include <chrono>
#include <thread>
#include <utility>

#include "lyrictk/errors.hpp"

namespace lyrictk {

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{200};  // doubles per attempt
};

// Runs fn, retrying only on TransportError. Anything else flies through.
template <typename F>
auto with_retries(const RetryPolicy& policy, F&& fn) -> decltype(fn()) {
    int attempt = 0;
    for (;;) {
        try {
            return fn();
        } catch (const TransportError&) {
            if (attempt >= policy.max_retries) throw;
            std::this_thread::sleep_for(policy.base_delay * (1 << attempt));
            ++attempt;
        }
    }
}

}  // namespace lyrictk
