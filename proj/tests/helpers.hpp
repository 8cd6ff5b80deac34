// Shared fixtures for the test suites: small pmf constructors and random
// generators with fully deterministic streams.
#ifndef MDLAB_TEST_HELPERS_HPP
#define MDLAB_TEST_HELPERS_HPP

#include <functional>
#include <string>
#include <vector>

#include "mdlab/pmf.hpp"
#include "mdlab/rng.hpp"

namespace mdlab::test {

using prob::JointPmf;
using prob::Variable;

// Builds a table by evaluating fn on every joint assignment (digits in
// variable order) and normalizing.
inline JointPmf pmf_from_fn(std::vector<Variable> vars,
                            const std::function<double(const std::vector<int>&)>& fn) {
    std::uint64_t cells = 1;
    for (const auto& v : vars) cells *= static_cast<std::uint64_t>(v.size);
    std::vector<double> probs(cells);
    std::vector<int> digits(vars.size());
    double total = 0.0;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        std::uint64_t rem = cell;
        for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
            digits[i] = static_cast<int>(rem % vars[i].size);
            rem /= vars[i].size;
        }
        probs[cell] = fn(digits);
        total += probs[cell];
    }
    for (double& p : probs) p /= total;
    return JointPmf(std::move(vars), std::move(probs));
}

// Random full-support pmf over `sizes` with entries bounded away from zero.
inline JointPmf random_pmf(const std::vector<int>& sizes, std::uint64_t seed,
                           double floor_mass = 0.05) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        vars.push_back({"V" + std::to_string(i), sizes[i]});
    BlockRng rng(seed, 0);
    return pmf_from_fn(std::move(vars),
                       [&](const std::vector<int>&) { return floor_mass + rng.canonical(); });
}

// Markov chain A - B - C - D over binary alphabets with random kernels:
// p(a) p(b|a) p(c|b) p(d|c). Variables are named A,B,C,D.
inline JointPmf random_long_chain(std::uint64_t seed) {
    BlockRng rng(seed, 1);
    double pa = 0.05 + 0.9 * rng.canonical();
    double pb[2], pc[2], pd[2];
    for (int i = 0; i < 2; ++i) {
        pb[i] = 0.05 + 0.9 * rng.canonical();
        pc[i] = 0.05 + 0.9 * rng.canonical();
        pd[i] = 0.05 + 0.9 * rng.canonical();
    }
    auto bern = [](double p, int v) { return v ? p : 1.0 - p; };
    return pmf_from_fn({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, [&](const std::vector<int>& t) {
        return bern(pa, t[0]) * bern(pb[t[0]], t[1]) * bern(pc[t[1]], t[2]) * bern(pd[t[2]], t[3]);
    });
}

// Branching chain p(b) p(a|b) p(c,d|b) with full-support random kernels:
// A is independent of (C,D) given B, and (C,D) given b has full support.
inline JointPmf random_branch_chain(std::uint64_t seed) {
    BlockRng rng(seed, 2);
    double pb = 0.05 + 0.9 * rng.canonical();
    double pa[2];
    double pcd[2][4];
    for (int b = 0; b < 2; ++b) {
        pa[b] = 0.05 + 0.9 * rng.canonical();
        double total = 0.0;
        for (int j = 0; j < 4; ++j) {
            pcd[b][j] = 0.05 + rng.canonical();
            total += pcd[b][j];
        }
        for (int j = 0; j < 4; ++j) pcd[b][j] /= total;
    }
    auto bern = [](double p, int v) { return v ? p : 1.0 - p; };
    return pmf_from_fn({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, [&](const std::vector<int>& t) {
        return bern(pb, t[1]) * bern(pa[t[1]], t[0]) * pcd[t[1]][2 * t[2] + t[3]];
    });
}

}  // namespace mdlab::test

#endif
