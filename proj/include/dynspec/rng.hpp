#pragma once

#include <cstdint>
#include <limits>

namespace dynspec {

/// Stream ids that keep independent kinds of draws apart under one seed.
enum class RngStream : std::uint64_t {
    noise = 1,
    arms = 2,
    theta = 3,
    test = 4,
};

/// Counter-based generator: output n is a SplitMix64 hash of
/// (seed, stream, n). Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, RngStream stream) noexcept
        : key_(mix(seed ^ mix(static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ull))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dynspec
