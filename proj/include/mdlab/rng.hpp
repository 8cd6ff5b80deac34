#ifndef MDLAB_RNG_HPP
#define MDLAB_RNG_HPP

#include <cstdint>

namespace mdlab {

// Counter-based generator: the stream is a pure function of (seed, counter),
// so block i of a parallel run draws exactly the same bits as block i of a
// serial run. Core mixer is splitmix64.
class BlockRng {
   public:
    BlockRng(std::uint64_t seed, std::uint64_t counter)
        : state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(counter + 0xbf58476d1ce4e5b9ULL))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform word of n bits, n <= 32.
    std::uint32_t bits(int n) {
        return static_cast<std::uint32_t>(next() >> (64 - n)) & ((n == 32) ? 0xffffffffu : ((1u << n) - 1u));
    }

    // Uniform double in [0,1) with 53 bits of precision.
    double canonical() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return canonical() < p; }

    // Word of n i.i.d. Bernoulli(p) bits (bit i = position i).
    std::uint32_t bernoulli_word(int n, double p) {
        std::uint32_t w = 0;
        for (int i = 0; i < n; ++i)
            if (bernoulli(p)) w |= (1u << i);
        return w;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    std::uint64_t state_;
};

}  // namespace mdlab

#endif
