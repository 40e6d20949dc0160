#pragma once

#include <cstdint>
#include <initializer_list>

namespace kgbox {

std::uint64_t splitmix64(std::uint64_t x);

// Folds a list of integers into one 64-bit stream key.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts);

// Counter-based generator: value n of a stream is a pure function of
// (key, n), so draws never depend on iteration order elsewhere.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key)
        , counter_(counter)
    {
    }

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }
    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace kgbox
