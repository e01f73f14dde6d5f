#pragma once

#include <cstdint>

namespace mdpu {

/// Counter-based generator: draw i of stream k is a pure function of
/// (seed, k, i), so independent streams never perturb one another and a
/// generator's full state is just its counters.
class CounterRng {
public:
    enum Stream : std::uint64_t { transition = 1, discovery = 2, reveal = 3 };

    CounterRng() = default;
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        return mix(mix(seed ^ mix(stream)) + counter);
    }

    /// Next 64 raw bits from `stream`, advancing its counter.
    std::uint64_t next(Stream stream, std::uint64_t& counter) const { return at(seed_, stream, counter++); }

    /// Uniform in [0, 1) with 53 bits of precision.
    static double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by multiply-shift.
    static std::uint64_t to_index(std::uint64_t bits, std::uint64_t n) {
        __extension__ using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(bits) * n) >> 64);
    }

private:
    std::uint64_t seed_ = 0;
};

}  // namespace mdpu
