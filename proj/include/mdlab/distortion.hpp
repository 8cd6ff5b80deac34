#ifndef MDLAB_DISTORTION_HPP
#define MDLAB_DISTORTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mdlab/errors.hpp"
#include "mdlab/pmf.hpp"

namespace mdlab::dist {

// Per-letter distortion d(source symbol, reconstruction symbol) >= 0.
struct DistortionTable {
    int source_size = 0;
    int recon_size = 0;
    std::vector<std::vector<double>> values;  // [source][recon]
    double c = 1.0;                           // scale constant
    std::vector<double> d0;                   // per-source offset

    double at(int s, int r) const { return values[s][r]; }
};

// Average Hamming distortion between two packed words of length n.
double hamming_avg(std::uint32_t a, std::uint32_t b, int n);

// Joint distortion on pairs (x,z) -> (xh,zh) built from the product BSC(delta)
// test channel: d((x,z),(xh,zh)) = -c log2 p(x,z|xh,zh) + d0(x,z), with d0
// chosen so the diagonal is exactly zero. Pairs are indexed 2x + z.
// Requires delta strictly inside (0, 0.5) and c > 0.
DistortionTable build_dxz(double delta, double c);

// E[d(source, reconstruction)] under the joint pmf; source_vars and
// recon_vars index the table rows/columns in the order given.
double expected_distortion(const prob::JointPmf& pmf, const DistortionTable& table,
                           const std::vector<std::string>& source_vars,
                           const std::vector<std::string>& recon_vars);

}  // namespace mdlab::dist

#endif
