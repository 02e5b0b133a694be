#ifndef GHOSTUMAP_RANDOM_HPP
#define GHOSTUMAP_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <limits>

/**
 * @file random.hpp
 *
 * @brief Splittable random streams.
 *
 * Every consumer of randomness (the original optimizer, initialization, and each
 * individual ghost) owns its own stream derived from the master seed, so the draws
 * seen by one consumer never depend on how many draws another consumer made.
 */

namespace ghostumap {

/**
 * 64-bit finalizer from SplitMix64 (variant 13 of Stafford's mixers).
 */
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * @brief Splittable generator in the style of SplitMix64 / Java's SplittableRandom.
 *
 * The state is a Weyl sequence `seed += gamma` and the output is `mix64(seed)`.
 * Streams created with `derive()` get both a fresh seed and a fresh odd gamma,
 * so their sequences are distinct rather than shifted copies of one another.
 *
 * Satisfies the UniformRandomBitGenerator requirements.
 */
class SplitStream {
public:
    using result_type = std::uint64_t;

    SplitStream() = default;

    explicit SplitStream(std::uint64_t seed) : seed_(mix64(seed)), gamma_(make_gamma(seed ^ 0x5851f42d4c957f2dULL)) {}

    /**
     * Derive an independent stream for a (tag, a, b) key, e.g. (ghost tag, point, ghost).
     * Derivation is a pure function of the master seed and the key.
     */
    static SplitStream derive(std::uint64_t master, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0) {
        std::uint64_t k = mix64(master + 0x9e3779b97f4a7c15ULL);
        k = mix64(k ^ (tag * 0xd1b54a32d192ed03ULL));
        k = mix64(k ^ (a * 0xaef17502108ef2d9ULL + 1));
        k = mix64(k ^ (b * 0xdb4f0b9175ae2165ULL + 2));
        SplitStream out;
        out.seed_ = k;
        out.gamma_ = make_gamma(mix64(k ^ 0x2545f4914f6cdd1dULL));
        return out;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        seed_ += gamma_;
        return mix64(seed_);
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); multiply-high mapping, bias below n / 2^64.
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

    bool operator==(const SplitStream&) const = default;

private:
    static std::uint64_t make_gamma(std::uint64_t z) {
        z = mix64(z) | 1ULL;
        // Reject gammas with too few bit transitions, as SplittableRandom does.
        std::uint64_t flips = z ^ (z >> 1);
        if (__builtin_popcountll(flips) < 24) {
            z ^= 0xaaaaaaaaaaaaaaaaULL;
        }
        return z;
    }

    std::uint64_t seed_ = 0;
    std::uint64_t gamma_ = 0x9e3779b97f4a7c15ULL;
};

/**
 * Tags used to derive the streams of a run.
 */
enum class StreamTag : std::uint64_t {
    original = 1,
    init = 2,
    ghost = 3,
    worker = 4,
    data = 5,
    placement = 6
};

/**
 * @brief All random streams used by one optimization run.
 */
struct RngStreams {
    std::uint64_t master_seed = 0;

    explicit RngStreams(std::uint64_t seed) : master_seed(seed) {}

    /// Negative sampling for the original projections.
    SplitStream original() const {
        return SplitStream::derive(master_seed, static_cast<std::uint64_t>(StreamTag::original));
    }

    /// Negative sampling for worker `w` in parallel mode.
    SplitStream original_worker(std::size_t w) const {
        return SplitStream::derive(master_seed, static_cast<std::uint64_t>(StreamTag::worker), w);
    }

    /// Initial embedding (jitter or uniform draws).
    SplitStream init() const {
        return SplitStream::derive(master_seed, static_cast<std::uint64_t>(StreamTag::init));
    }

    /// Ghost placement around the targets.
    SplitStream placement() const {
        return SplitStream::derive(master_seed, static_cast<std::uint64_t>(StreamTag::placement));
    }

    /// Negative sampling for ghost `k` of point `i`.
    SplitStream ghost(std::size_t i, std::size_t k) const {
        return SplitStream::derive(master_seed, static_cast<std::uint64_t>(StreamTag::ghost), i, k);
    }
};

}

#endif
