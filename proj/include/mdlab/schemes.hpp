#ifndef MDLAB_SCHEMES_HPP
#define MDLAB_SCHEMES_HPP

#include <cstdint>
#include <map>
#include <string>

#include "mdlab/gf2.hpp"

namespace mdlab::schemes {

using gf2::LinearCode;
using gf2::Word;

// Three descriptions from two independent fair sources X, Z: descriptions 1
// and 2 carry the quantization indices of X and Z, description 3 carries the
// XOR of the two indices (a codeword index by linearity).
struct ThreeDescConfig {
    double delta = 0.1;  // nominal test-channel crossover, used for the pair-distortion report
    LinearCode code;
    std::uint64_t blocks = 1;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Four descriptions from correlated fair sources, X = Z + Be(delta - lambda):
// descriptions 1/4 carry quantization indices, descriptions 2/3 carry the raw
// quantization noise words.
struct FourDescConfig {
    double delta = 0.11;
    double lambda = 0.03;  // margin keeping the decoder-23 channel inside the code's reach
    LinearCode code;
    std::uint64_t blocks = 1;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct Rate {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double bits() const { return static_cast<double>(num) / den; }
};

struct SchemeReport {
    std::string scheme;
    int n = 0, k = 0;
    double delta = 0.0, lambda = 0.0;
    std::uint64_t blocks = 0, seed = 0;
    std::map<std::string, Rate> rates;              // exact per-description rates
    std::map<std::string, double> rates_ideal;      // entropy-coded noise rates (four-desc)
    std::map<std::string, double> noise_bias;       // empirical noise bias per noise description
    std::map<std::string, double> distortions;      // per-decoder per-symbol Hamming
    std::map<std::string, double> stderrs;          // standard error of each distortion entry
    std::map<std::string, double> distortions_pair; // joint-decoder pair distortion (three-desc)
    std::map<std::string, std::uint64_t> failures;  // per-decoder lossless block failures
};

struct ThreeDescBlock {
    Word index1 = 0, index2 = 0, index3 = 0;  // description payloads
    Word rec1 = 0, rec2 = 0, rec3 = 0;        // decoder 1/2/3 outputs
    Word rec13_u2 = 0, rec23_u1 = 0;          // counterpart codewords recovered at 13/23
    bool recover13_ok = false, recover23_ok = false;
};

ThreeDescBlock three_desc_block(const ThreeDescConfig& cfg, Word x, Word z);

struct FourDescBlock {
    Word index1 = 0, index4 = 0;   // quantization indices u, v
    Word noise2 = 0, noise3 = 0;   // description 2/3 payloads
    Word rec1 = 0, rec4 = 0;       // decoder 1/4 outputs
    Word rec12 = 0, rec34 = 0;     // exact reconstructions
    Word rec23 = 0;                // estimate of x + z
    Word sum_index = 0;            // decoded index of (u + v)
    bool sum_ok = false;
};

FourDescBlock four_desc_block(const FourDescConfig& cfg, Word x, Word z);

SchemeReport run_monte_carlo(const ThreeDescConfig& cfg);
SchemeReport run_monte_carlo(const FourDescConfig& cfg);

}  // namespace mdlab::schemes

#endif
