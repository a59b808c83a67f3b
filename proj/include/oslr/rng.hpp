#pragma once

#include <cstdint>
#include <random>

namespace oslr {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * Random stream owned by one replicate.
 *
 * The engine state is a pure function of (master seed, stream index), so the
 * numbers a replicate sees do not depend on which worker runs it or when.
 * Uniform draws use the top 53 bits of mt19937_64 output, which makes the
 * sequence identical across standard library implementations.
 */
class ReplicateStream {
public:
    ReplicateStream(std::uint64_t master_seed, std::uint64_t index)
    {
        const std::uint64_t key = mix64(master_seed ^ mix64(index));
        std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace oslr
