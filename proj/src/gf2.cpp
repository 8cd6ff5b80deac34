#include "mdlab/gf2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "mdlab/rng.hpp"

namespace mdlab::gf2 {

namespace {

Word mask_of(int n) { return n == 32 ? 0xffffffffu : ((Word(1) << n) - 1); }

}  // namespace

LinearCode::LinearCode(int n, int k, std::vector<Word> generator_rows)
    : n_(n), k_(k), rows_(std::move(generator_rows)) {
    if (n < 1 || n > kMaxN || k < 0 || k > n)
        throw InvalidDimensions("need 0 <= k <= n <= 24");
    if (static_cast<int>(rows_.size()) != k)
        throw InvalidDimensions("generator must have exactly k rows");
    for (Word r : rows_)
        if (r & ~mask_of(n)) throw InvalidDimensions("generator row wider than n bits");
}

Word LinearCode::encode(Word u) const {
    if (k_ < 32 && (u >> k_) != 0) throw LengthMismatch("message wider than k bits");
    Word w = 0;
    for (int j = 0; j < k_; ++j)
        if ((u >> j) & 1u) w ^= rows_[j];
    return w;
}

const std::vector<Word>& LinearCode::codebook() const {
    if (codebook_.empty()) {
        codebook_.resize(std::size_t(1) << k_);
        codebook_[0] = 0;
        for (std::size_t m = 1; m < codebook_.size(); ++m)
            codebook_[m] = codebook_[m & (m - 1)] ^ rows_[std::countr_zero(m)];
    }
    return codebook_;
}

bool LinearCode::is_codeword(Word w) const {
    const auto& cb = codebook();
    return std::find(cb.begin(), cb.end(), w) != cb.end();
}

QuantizeResult quantize(const LinearCode& code, Word x) {
    if (x & ~mask_of(code.n())) throw LengthMismatch("input word wider than n bits");
    const auto& cb = code.codebook();
    QuantizeResult best{0, cb[0], std::popcount(x ^ cb[0])};
    for (Word m = 1; m < cb.size(); ++m) {
        int d = std::popcount(x ^ cb[m]);
        if (d < best.distance) best = {m, cb[m], d};
    }
    return best;
}

std::vector<std::uint8_t> distance_profile(const LinearCode& code) {
    const std::size_t space = std::size_t(1) << code.n();
    std::vector<std::uint8_t> dist(space, 0xff);
    std::vector<Word> frontier = code.codebook();
    for (Word c : frontier) dist[c] = 0;
    std::vector<Word> next;
    std::uint8_t level = 0;
    while (!frontier.empty()) {
        ++level;
        next.clear();
        for (Word w : frontier)
            for (int i = 0; i < code.n(); ++i) {
                Word v = w ^ (Word(1) << i);
                if (dist[v] == 0xff) {
                    dist[v] = level;
                    next.push_back(v);
                }
            }
        frontier.swap(next);
    }
    return dist;
}

std::vector<double> noise_bias_profile(const LinearCode& code) {
    const std::size_t space = std::size_t(1) << code.n();
    std::vector<std::uint64_t> ones(code.n(), 0);
    for (std::size_t x = 0; x < space; ++x) {
        Word noise = static_cast<Word>(x) ^ quantize(code, static_cast<Word>(x)).codeword;
        for (int i = 0; i < code.n(); ++i) ones[i] += (noise >> i) & 1u;
    }
    std::vector<double> bias(code.n());
    for (int i = 0; i < code.n(); ++i) bias[i] = static_cast<double>(ones[i]) / space;
    return bias;
}

double source_goodness(const LinearCode& code) {
    if (code.n() > kMaxExhaustiveN)
        throw TooLargeForExhaustive("exhaustive source goodness needs n <= 20");
    auto dist = distance_profile(code);
    std::uint64_t total = 0;
    for (std::uint8_t d : dist) total += d;
    return static_cast<double>(total) / (static_cast<double>(code.n()) * dist.size());
}

double source_goodness_mc(const LinearCode& code, std::uint64_t samples, std::uint64_t seed,
                          double* stderr_out) {
    std::uint64_t sum = 0, sumsq = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        BlockRng rng(seed, i);
        Word x = rng.bits(code.n());
        int d = quantize(code, x).distance;
        sum += d;
        sumsq += std::uint64_t(d) * d;
    }
    double mean = static_cast<double>(sum) / samples;
    if (stderr_out) {
        double var = (static_cast<double>(sumsq) - mean * sum) / (samples - 1);
        *stderr_out = std::sqrt(var / samples) / code.n();
    }
    return mean / code.n();
}

namespace {

// Failure probability of min-distance decoding for one noise word, averaged
// over a uniform transmitted codeword. The noise word loses outright when
// some codeword sits strictly closer than the transmitted one (dist < wt).
// On a tie the lexicographic index rule picks the transmitted word only if
// the uniform index shift keeps it smallest, which happens with probability
// 2^-(number of distinct top set bits among the tied nonzero codewords).
double tie_fail_prob(Word noise, int noise_wt, int coset_min, const std::vector<Word>& tied) {
    if (coset_min < noise_wt) return 1.0;
    std::uint32_t msbs = 0;
    for (Word m : tied) {
        Word c = noise ^ m;
        if (c) msbs |= Word(1) << (31 - std::countl_zero(c));
    }
    return 1.0 - std::ldexp(1.0, -std::popcount(msbs));
}

}  // namespace

double channel_goodness(const LinearCode& code, double crossover) {
    if (crossover <= 0.0 || crossover >= 0.5)
        throw OutOfRange("crossover must lie strictly inside (0, 0.5)");
    if (code.n() > 16) return channel_goodness_mc(code, crossover, 200000, 0x6d646c61);
    const auto& cb = code.codebook();
    const std::size_t space = std::size_t(1) << code.n();
    std::vector<double> wt_prob(code.n() + 1);
    for (int i = 0; i <= code.n(); ++i)
        wt_prob[i] = std::pow(crossover, i) * std::pow(1.0 - crossover, code.n() - i);

    // Walk the noise space one coset at a time: every member shares the same
    // coset-minimal word set M, and the argmin codewords for member w are
    // exactly {w ^ m : m in M}.
    std::vector<bool> visited(space, false);
    std::vector<Word> members(cb.size());
    std::vector<Word> min_words;
    double err = 0.0;
    for (std::size_t e0 = 0; e0 < space; ++e0) {
        if (visited[e0]) continue;
        int coset_min = code.n() + 1;
        for (std::size_t i = 0; i < cb.size(); ++i) {
            members[i] = static_cast<Word>(e0) ^ cb[i];
            coset_min = std::min(coset_min, std::popcount(members[i]));
        }
        min_words.clear();
        for (Word w : members)
            if (std::popcount(w) == coset_min) min_words.push_back(w);
        for (Word w : members) {
            visited[w] = true;
            err += wt_prob[std::popcount(w)] * tie_fail_prob(w, std::popcount(w), coset_min, min_words);
        }
    }
    return err;
}

double channel_goodness_mc(const LinearCode& code, double crossover, std::uint64_t samples,
                           std::uint64_t seed, double* stderr_out) {
    if (crossover <= 0.0 || crossover >= 0.5)
        throw OutOfRange("crossover must lie strictly inside (0, 0.5)");
    const auto& cb = code.codebook();
    double sum = 0.0, sumsq = 0.0;
    std::vector<Word> tied;
    for (std::uint64_t i = 0; i < samples; ++i) {
        BlockRng rng(seed, i);
        Word noise = rng.bernoulli_word(code.n(), crossover);
        int best = code.n() + 1;
        tied.clear();
        for (Word c : cb) {
            int d = std::popcount(noise ^ c);
            if (d < best) {
                best = d;
                tied.clear();
            }
            if (d == best) tied.push_back(noise ^ c);
        }
        double f = tie_fail_prob(noise, std::popcount(noise), best, tied);
        sum += f;
        sumsq += f * f;
    }
    double mean = sum / samples;
    if (stderr_out) {
        double var = (sumsq - mean * sum) / (samples - 1);
        *stderr_out = std::sqrt(var / samples);
    }
    return mean;
}

int gf2_rank(std::vector<Word> rows, int n) {
    int rank = 0;
    for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if ((rows[r] >> col) & 1u) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && ((rows[r] >> col) & 1u)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

namespace {

LinearCode random_full_rank_code(int n, int k, BlockRng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<Word> rows(k);
        for (auto& r : rows) r = rng.bits(n);
        if (gf2_rank(rows, n) == k) return LinearCode(n, k, std::move(rows));
    }
    throw InvalidDimensions("failed to sample a full-rank generator");
}

struct TrialScore {
    double primary;
    double secondary;
    bool operator<(const TrialScore& o) const {
        return primary < o.primary || (primary == o.primary && secondary < o.secondary);
    }
};

}  // namespace

SearchResult search_code(int n, int k, int trials, SearchCriterion criterion, double crossover,
                         std::uint64_t seed, int threads) {
    if (k < 1 || k > n || n > kMaxExhaustiveN) throw InvalidDimensions("need 1 <= k <= n <= 20");
    if (trials < 1) throw InvalidDimensions("trials must be >= 1");
    bool needs_channel = criterion != SearchCriterion::Source;
    if (needs_channel && (crossover <= 0.0 || crossover >= 0.5))
        throw OutOfRange("crossover must lie strictly inside (0, 0.5)");

    auto evaluate = [&](const LinearCode& code) -> TrialScore {
        switch (criterion) {
            case SearchCriterion::Source:
                return {source_goodness(code), 0.0};
            case SearchCriterion::Channel:
                return {channel_goodness(code, crossover), 0.0};
            case SearchCriterion::Both:
            default:
                return {source_goodness(code), channel_goodness(code, crossover)};
        }
    };

    // Each trial draws from its own counter so the winner is independent of
    // the thread schedule; ties go to the lowest trial index.
    struct Best {
        TrialScore score{1e300, 1e300};
        int trial = -1;
        std::optional<LinearCode> code;
    };
    int nthreads = std::max(1, threads);
    std::vector<Best> best(nthreads);
    auto run = [&](int tid) {
        for (int t = tid; t < trials; t += nthreads) {
            BlockRng rng(seed, static_cast<std::uint64_t>(t));
            LinearCode code = random_full_rank_code(n, k, rng);
            TrialScore s = evaluate(code);
            Best& b = best[tid];
            if (!b.code || s < b.score || (!(b.score < s) && t < b.trial)) {
                b.score = s;
                b.trial = t;
                b.code = std::move(code);
            }
        }
    };
    if (nthreads == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int tid = 0; tid < nthreads; ++tid) pool.emplace_back(run, tid);
        for (auto& th : pool) th.join();
    }
    Best winner;
    for (auto& b : best)
        if (b.code && (!winner.code || b.score < winner.score ||
                       (!(winner.score < b.score) && b.trial < winner.trial)))
            winner = std::move(b);

    GoodnessReport report;
    report.avg_distortion = source_goodness(*winner.code);
    if (needs_channel) {
        report.crossover = crossover;
        report.channel_error_prob = channel_goodness(*winner.code, crossover);
    }
    return {std::move(*winner.code), report};
}

}  // namespace mdlab::gf2
