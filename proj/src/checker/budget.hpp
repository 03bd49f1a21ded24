#pragma once

#include <chrono>
#include <cstdint>

namespace sleec::detail {

class BudgetExceeded;

/// Cooperative wall-clock limit polled from the search loops.
class Budget {
public:
    explicit Budget(std::chrono::milliseconds limit)
        : limit_(limit), start_(std::chrono::steady_clock::now()) {}

    bool exhausted() const {
        return limit_.count() > 0 && std::chrono::steady_clock::now() - start_ > limit_;
    }

    /// Throws E every few thousand calls once the limit has passed.
    template <typename E>
    void poll() {
        if ((++calls_ & 0xFFF) == 0 && exhausted()) throw E{};
    }

private:
    std::chrono::milliseconds limit_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t calls_ = 0;
};

}  // namespace sleec::detail
