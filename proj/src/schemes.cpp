#include "mdlab/schemes.hpp"

#include <bit>
#include <cmath>
#include <thread>
#include <vector>

#include "mdlab/pmf.hpp"
#include "mdlab/rng.hpp"

namespace mdlab::schemes {

namespace {

Word mask_of(int n) { return n == 32 ? 0xffffffffu : ((Word(1) << n) - 1); }

void check_word(Word w, int n) {
    if (w & ~mask_of(n)) throw LengthMismatch("source word wider than n bits");
}

// Exact integer accumulator: sum and sum of squares of per-block Hamming
// distances, so aggregation is independent of the block schedule.
struct Accum {
    std::uint64_t sum = 0;
    std::uint64_t sumsq = 0;
    void add(std::uint64_t d) {
        sum += d;
        sumsq += d * d;
    }
    void merge(const Accum& o) {
        sum += o.sum;
        sumsq += o.sumsq;
    }
    // Mean and standard error of the per-block distortion d/denom.
    void report(std::uint64_t blocks, double denom, double& mean, double& se) const {
        mean = static_cast<double>(sum) / (blocks * denom);
        if (blocks < 2) {
            se = 0.0;
            return;
        }
        double m = static_cast<double>(sum) / blocks;
        double var = (static_cast<double>(sumsq) - m * static_cast<double>(sum)) / (blocks - 1);
        se = std::sqrt(var / blocks) / denom;
    }
};

}  // namespace

ThreeDescBlock three_desc_block(const ThreeDescConfig& cfg, Word x, Word z) {
    const auto& code = cfg.code;
    check_word(x, code.n());
    check_word(z, code.n());
    auto qx = gf2::quantize(code, x);
    auto qz = gf2::quantize(code, z);

    ThreeDescBlock b;
    b.index1 = qx.index;
    b.index2 = qz.index;
    b.index3 = qx.index ^ qz.index;
    b.rec1 = qx.codeword;
    b.rec2 = qz.codeword;
    b.rec3 = code.encode(b.index3);
    // Decoder 13 adds the sum codeword to U1 to recover U2; exact by linearity.
    b.rec13_u2 = b.rec3 ^ b.rec1;
    b.rec23_u1 = b.rec3 ^ b.rec2;
    b.recover13_ok = (b.rec13_u2 == qz.codeword);
    b.recover23_ok = (b.rec23_u1 == qx.codeword);
    return b;
}

FourDescBlock four_desc_block(const FourDescConfig& cfg, Word x, Word z) {
    const auto& code = cfg.code;
    check_word(x, code.n());
    check_word(z, code.n());
    auto qx = gf2::quantize(code, x);
    auto qz = gf2::quantize(code, z);

    FourDescBlock b;
    b.index1 = qx.index;
    b.index4 = qz.index;
    b.noise2 = x ^ qx.codeword;
    b.noise3 = z ^ qz.codeword;
    b.rec1 = qx.codeword;
    b.rec4 = qz.codeword;
    b.rec12 = b.rec1 ^ b.noise2;  // = x exactly
    b.rec34 = b.rec4 ^ b.noise3;  // = z exactly
    // Decoder 23: the noise sum equals (x+z) + (u+v)G; min-distance decoding
    // treats x+z as channel noise and recovers the sum codeword.
    Word s = b.noise2 ^ b.noise3;
    auto qs = gf2::quantize(code, s);
    b.sum_index = qs.index;
    b.sum_ok = (qs.index == (qx.index ^ qz.index));
    b.rec23 = s ^ qs.codeword;
    return b;
}

SchemeReport run_monte_carlo(const ThreeDescConfig& cfg) {
    if (cfg.blocks < 1) throw OutOfRange("blocks must be >= 1");
    const int n = cfg.code.n();
    const int k = cfg.code.k();
    cfg.code.codebook();  // build the cache before threads share the code

    struct Partial {
        Accum d1, d2, d3, d12, d13, d23;
        std::uint64_t pair12 = 0, pair13 = 0, pair23 = 0;  // mismatch counts for the pair distortion
        std::uint64_t fail13 = 0, fail23 = 0;
    };
    int nthreads = std::max(1, cfg.threads);
    std::vector<Partial> parts(nthreads);

    auto run = [&](int tid) {
        Partial& p = parts[tid];
        for (std::uint64_t blk = tid; blk < cfg.blocks; blk += nthreads) {
            BlockRng rng(cfg.seed, blk);
            Word x = rng.bits(n);
            Word z = rng.bits(n);
            auto b = three_desc_block(cfg, x, z);
            std::uint64_t e1 = std::popcount(x ^ b.rec1);
            std::uint64_t e2 = std::popcount(z ^ b.rec2);
            p.d1.add(e1);
            p.d2.add(e2);
            p.d3.add(std::popcount((x ^ z) ^ b.rec3));
            p.d12.add(e1 + e2);
            std::uint64_t e13 = e1 + std::popcount(z ^ b.rec13_u2);
            std::uint64_t e23 = std::popcount(x ^ b.rec23_u1) + e2;
            p.d13.add(e13);
            p.d23.add(e23);
            // Pair mismatch count: positions where (x,z) != (xh,zh), split by
            // one- vs two-coordinate mismatches, folds into the log-ratio
            // distortion as value = c * log2((1-d)/d) * mismatches.
            p.pair12 += e1 + e2;
            p.pair13 += e13;
            p.pair23 += e23;
            if (!b.recover13_ok) ++p.fail13;
            if (!b.recover23_ok) ++p.fail23;
        }
    };
    if (nthreads == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(run, t);
        for (auto& th : pool) th.join();
    }
    Partial all;
    for (const auto& p : parts) {
        all.d1.merge(p.d1);
        all.d2.merge(p.d2);
        all.d3.merge(p.d3);
        all.d12.merge(p.d12);
        all.d13.merge(p.d13);
        all.d23.merge(p.d23);
        all.pair12 += p.pair12;
        all.pair13 += p.pair13;
        all.pair23 += p.pair23;
        all.fail13 += p.fail13;
        all.fail23 += p.fail23;
    }

    SchemeReport rep;
    rep.scheme = "three-desc";
    rep.n = n;
    rep.k = k;
    rep.delta = cfg.delta;
    rep.blocks = cfg.blocks;
    rep.seed = cfg.seed;
    rep.rates["1"] = {k, n};
    rep.rates["2"] = {k, n};
    rep.rates["3"] = {k, n};
    auto put = [&](const std::string& key, const Accum& a, double denom) {
        double mean, se;
        a.report(cfg.blocks, denom, mean, se);
        rep.distortions[key] = mean;
        rep.stderrs[key] = se;
    };
    put("1", all.d1, n);
    put("2", all.d2, n);
    put("3", all.d3, n);
    put("12", all.d12, 2.0 * n);
    put("13", all.d13, 2.0 * n);
    put("23", all.d23, 2.0 * n);
    // Log-ratio pair distortion (c = 1): every coordinate mismatch costs
    // log2((1-delta)/delta), matching the constructed pair table.
    double step = std::log2((1.0 - cfg.delta) / cfg.delta);
    rep.distortions_pair["12"] = step * all.pair12 / (cfg.blocks * static_cast<double>(n));
    rep.distortions_pair["13"] = step * all.pair13 / (cfg.blocks * static_cast<double>(n));
    rep.distortions_pair["23"] = step * all.pair23 / (cfg.blocks * static_cast<double>(n));
    rep.failures["13"] = all.fail13;
    rep.failures["23"] = all.fail23;
    return rep;
}

SchemeReport run_monte_carlo(const FourDescConfig& cfg) {
    if (cfg.blocks < 1) throw OutOfRange("blocks must be >= 1");
    if (!(cfg.lambda >= 0.0) || !(cfg.lambda < cfg.delta))
        throw OutOfRange("need 0 <= lambda < delta");
    const int n = cfg.code.n();
    const int k = cfg.code.k();
    const double p_noise = cfg.delta - cfg.lambda;
    cfg.code.codebook();

    struct Partial {
        Accum d1, d4, d12, d34, d23;
        std::uint64_t ones2 = 0, ones3 = 0;
        std::uint64_t fail12 = 0, fail34 = 0, fail23 = 0;
    };
    int nthreads = std::max(1, cfg.threads);
    std::vector<Partial> parts(nthreads);

    auto run = [&](int tid) {
        Partial& p = parts[tid];
        for (std::uint64_t blk = tid; blk < cfg.blocks; blk += nthreads) {
            BlockRng rng(cfg.seed, blk);
            Word z = rng.bits(n);
            Word e = rng.bernoulli_word(n, p_noise);
            Word x = z ^ e;
            auto b = four_desc_block(cfg, x, z);
            p.d1.add(std::popcount(x ^ b.rec1));
            p.d4.add(std::popcount(z ^ b.rec4));
            p.d12.add(std::popcount(x ^ b.rec12));
            p.d34.add(std::popcount(z ^ b.rec34));
            p.d23.add(std::popcount((x ^ z) ^ b.rec23));
            p.ones2 += std::popcount(b.noise2);
            p.ones3 += std::popcount(b.noise3);
            if (b.rec12 != x) ++p.fail12;
            if (b.rec34 != z) ++p.fail34;
            if (!b.sum_ok) ++p.fail23;
        }
    };
    if (nthreads == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(run, t);
        for (auto& th : pool) th.join();
    }
    Partial all;
    for (const auto& p : parts) {
        all.d1.merge(p.d1);
        all.d4.merge(p.d4);
        all.d12.merge(p.d12);
        all.d34.merge(p.d34);
        all.d23.merge(p.d23);
        all.ones2 += p.ones2;
        all.ones3 += p.ones3;
        all.fail12 += p.fail12;
        all.fail34 += p.fail34;
        all.fail23 += p.fail23;
    }

    SchemeReport rep;
    rep.scheme = "four-desc";
    rep.n = n;
    rep.k = k;
    rep.delta = cfg.delta;
    rep.lambda = cfg.lambda;
    rep.blocks = cfg.blocks;
    rep.seed = cfg.seed;
    rep.rates["1"] = {k, n};
    rep.rates["4"] = {k, n};
    // Descriptions 2/3 carry raw n-bit noise words; the ideal-entropy-coded
    // rate is the binary entropy of the measured noise bias.
    rep.rates["2"] = {1, 1};
    rep.rates["3"] = {1, 1};
    double bias2 = static_cast<double>(all.ones2) / (cfg.blocks * static_cast<double>(n));
    double bias3 = static_cast<double>(all.ones3) / (cfg.blocks * static_cast<double>(n));
    rep.noise_bias["2"] = bias2;
    rep.noise_bias["3"] = bias3;
    rep.rates_ideal["2"] = prob::binary_entropy(bias2);
    rep.rates_ideal["3"] = prob::binary_entropy(bias3);

    auto put = [&](const std::string& key, const Accum& a) {
        double mean, se;
        a.report(cfg.blocks, n, mean, se);
        rep.distortions[key] = mean;
        rep.stderrs[key] = se;
    };
    put("1", all.d1);
    put("4", all.d4);
    put("12", all.d12);
    put("34", all.d34);
    put("23", all.d23);
    rep.failures["12"] = all.fail12;
    rep.failures["34"] = all.fail34;
    rep.failures["23"] = all.fail23;
    return rep;
}

}  // namespace mdlab::schemes
