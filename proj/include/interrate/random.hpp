#pragma once

#include <cstdint>
#include <random>

namespace interrate {

/// Portable pseudo-random stream, layout version 1.
///
/// A stream is std::mt19937_64 seeded through std::seed_seq with the words
/// {seed lo, seed hi, stream lo, stream hi, version}. Both are fully specified
/// by the standard, and every draw below is converted by hand (no
/// std::*_distribution), so a (seed, stream) pair yields the same numbers on
/// every conforming platform.
///
/// Stream ids in use: 0 = random truth matrices, 1 + k = synthetic sequence k,
/// 0x464f4c44 = fold shuffling.
class RandomStream {
public:
    static constexpr std::uint32_t kLayoutVersion = 1;

    RandomStream(std::uint64_t seed, std::uint64_t stream);

    /// Uniform double in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform();

    /// Uniform integer in [0, n), unbiased (rejection sampling); n > 0.
    [[nodiscard]] std::uint64_t uniform_index(std::uint64_t n);

    [[nodiscard]] bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kTruthStream = 0;
inline constexpr std::uint64_t kFoldStream = 0x464f4c44;

[[nodiscard]] inline constexpr std::uint64_t sequence_stream(std::uint64_t index) {
    return 1 + index;
}

} // namespace interrate
