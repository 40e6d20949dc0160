#include "kgbox/random.hpp"

#include <cmath>
#include <numbers>

namespace kgbox {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t key = 0x6A09E667F3BCC908ull;
    for (auto p : parts) {
        key = splitmix64(key ^ p);
    }
    return key;
}

std::int64_t CounterRng::uniform_int(std::int64_t lo, std::int64_t hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(std::floor(uniform() * static_cast<double>(span)));
}

double CounterRng::normal()
{
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace kgbox
