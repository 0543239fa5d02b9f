#pragma once

#include <cstdint>

namespace fastrip::opcount {

inline thread_local std::uint64_t counter = 0;
inline thread_local bool enabled = false;

inline void add(std::uint64_t ops) {
    if (enabled) counter += ops;
}

// RAII scope that zeroes and enables the multiply-add counter.
struct Scope {
    Scope() {
        counter = 0;
        enabled = true;
    }
    ~Scope() { enabled = false; }
    std::uint64_t count() const { return counter; }
};

}  // namespace fastrip::opcount
