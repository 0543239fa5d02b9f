#pragma once

#include <cmath>
#include <cstdint>

namespace fastrip {

// SplitMix64 finalizer (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014). Used both as the stream hash and for
// seed derivation, so every draw is a pure function of (key, counter).
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class SeedRole : std::uint64_t {
    Epsilon = 1,
    EpsilonPrime = 2,
    Omega = 3,
    Trial = 4,
    Support = 5,
    Coefficients = 6,
    Projector = 7,
    Probe = 8,
};

// Child seed = chained SplitMix64 hash of (master, index, role).
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                           SeedRole role) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(index + 0x1000));
    h = splitmix64(h ^ static_cast<std::uint64_t>(role));
    return h;
}

// Counter-based generator: word i of the stream keyed by `key` is
// splitmix64(key' ^ splitmix64(i)). Stateless apart from the counter, so
// streams can be split and replayed deterministically on any platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept
        : key_(splitmix64(key ^ 0x6a09e667f3bcc908ULL)) {}

    std::uint64_t next_u64() noexcept { return splitmix64(key_ ^ splitmix64(counter_++)); }

    // Uniform in [0, 1), 53 random bits.
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // +1 or -1 from the top bit.
    double next_sign() noexcept {
        return (next_u64() >> 63) ? -1.0 : 1.0;
    }

    // Standard normal via Box-Muller; pairs are cached.
    double next_gaussian() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_unit();
        const double u2 = next_unit();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    // Uniform integer in [0, bound) by rejection on the top range.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fastrip
