#ifndef MDLAB_GF2_HPP
#define MDLAB_GF2_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mdlab/errors.hpp"

namespace mdlab::gf2 {

// Words are bit-packed into machine integers, bit i = position i.
using Word = std::uint32_t;

inline constexpr int kMaxN = 24;           // exhaustive loops run over 2^n words
inline constexpr int kMaxExhaustiveN = 20; // cap for exhaustive source goodness

// Binary linear block code given by a k x n generator matrix. Immutable
// after construction; the codebook cache is built on first use.
class LinearCode {
   public:
    LinearCode(int n, int k, std::vector<Word> generator_rows);

    int n() const { return n_; }
    int k() const { return k_; }
    double rate() const { return n_ == 0 ? 0.0 : static_cast<double>(k_) / n_; }
    const std::vector<Word>& generator() const { return rows_; }

    // u * G over GF(2); u is a k-bit message word.
    Word encode(Word u) const;

    // All 2^k codewords, indexed by message word.
    const std::vector<Word>& codebook() const;

    bool is_codeword(Word w) const;

   private:
    int n_ = 0;
    int k_ = 0;
    std::vector<Word> rows_;
    mutable std::vector<Word> codebook_;
};

struct QuantizeResult {
    Word index = 0;     // message word of the winning codeword
    Word codeword = 0;
    int distance = 0;   // Hamming distance from the input
};

// Nearest-codeword quantization of an n-bit word; ties broken by the
// smallest message index. Doubles as minimum-distance channel decoding.
QuantizeResult quantize(const LinearCode& code, Word x);

struct GoodnessReport {
    double avg_distortion = 0.0;           // per-symbol Hamming distortion of a uniform word
    double channel_error_prob = 0.0;       // min-distance decoding failure at `crossover`
    double crossover = 0.0;
    double distortion_stderr = 0.0;        // 0 for exhaustive evaluation
    double channel_stderr = 0.0;
};

// Distance from every n-bit word to the code (multi-source BFS over the
// hypercube); index = word, value = min Hamming distance.
std::vector<std::uint8_t> distance_profile(const LinearCode& code);

// Per-position probability that the quantization noise bit is 1 when the
// input word is uniform, computed exhaustively.
std::vector<double> noise_bias_profile(const LinearCode& code);

// Mean per-symbol quantizer distortion over a uniform input word.
// Exhaustive for n <= 20; Monte-Carlo above that (or on request).
double source_goodness(const LinearCode& code);
double source_goodness_mc(const LinearCode& code, std::uint64_t samples, std::uint64_t seed,
                          double* stderr_out = nullptr);

// Probability that min-distance decoding of codeword + Be(crossover)^n noise
// fails to return the transmitted codeword. The coset geometry is evaluated
// around the zero codeword by linearity; decoding ties are charged the exact
// loss probability of the index tie-break under a uniform transmitted index.
// Exhaustive noise enumeration for n <= 16, Monte-Carlo otherwise.
double channel_goodness(const LinearCode& code, double crossover);
double channel_goodness_mc(const LinearCode& code, double crossover, std::uint64_t samples,
                           std::uint64_t seed, double* stderr_out = nullptr);

enum class SearchCriterion { Source, Channel, Both };

struct SearchResult {
    LinearCode code;
    GoodnessReport report;
};

// Random search over full-rank generators, keeping the best code under the
// criterion (Both = lexicographic on (avg_distortion, channel_error_prob)).
// Deterministic given the seed. Requires 1 <= k <= n <= 20.
SearchResult search_code(int n, int k, int trials, SearchCriterion criterion, double crossover,
                         std::uint64_t seed, int threads = 1);

int gf2_rank(std::vector<Word> rows, int n);

}  // namespace mdlab::gf2

#endif
