#include "mdlab/distortion.hpp"

#include <bit>
#include <cmath>

namespace mdlab::dist {

double hamming_avg(std::uint32_t a, std::uint32_t b, int n) {
    if (n < 1 || n > 32) throw LengthMismatch("word length must be in [1,32]");
    std::uint32_t mask = (n == 32) ? 0xffffffffu : ((std::uint32_t(1) << n) - 1);
    if ((a | b) & ~mask) throw LengthMismatch("word wider than n bits");
    return static_cast<double>(std::popcount(a ^ b)) / n;
}

DistortionTable build_dxz(double delta, double c) {
    if (!(delta > 0.0) || !(delta < 0.5))
        throw DegenerateDelta("delta must lie strictly inside (0, 0.5)");
    if (!(c > 0.0)) throw OutOfRange("scale constant must be positive");

    // With uniform (X,Z) and the product BSC(delta) test channel, the reverse
    // conditional is again BSC(delta) x BSC(delta), so
    //   p(x,z | xh,zh) = delta^m (1-delta)^(2-m),  m = #mismatched coordinates,
    // and the entry reduces to c * m * log2((1-delta)/delta).
    DistortionTable t;
    t.source_size = 4;
    t.recon_size = 4;
    t.c = c;
    t.values.assign(4, std::vector<double>(4, 0.0));
    t.d0.assign(4, 0.0);
    double step = std::log2((1.0 - delta) / delta);
    for (int s = 0; s < 4; ++s) {
        t.d0[s] = c * 2.0 * std::log2(1.0 - delta);  // c log2 p(x,z|x,z)
        for (int r = 0; r < 4; ++r) {
            int m = ((s ^ r) & 1) + (((s ^ r) >> 1) & 1);
            t.values[s][r] = c * m * step;
        }
        t.values[s][s] = 0.0;  // exact by construction
    }
    return t;
}

double expected_distortion(const prob::JointPmf& pmf, const DistortionTable& table,
                           const std::vector<std::string>& source_vars,
                           const std::vector<std::string>& recon_vars) {
    auto si = pmf.var_indices(source_vars);
    auto ri = pmf.var_indices(recon_vars);
    std::uint64_t src_cells = 1, rec_cells = 1;
    for (int i : si) src_cells *= pmf.variables()[i].size;
    for (int i : ri) rec_cells *= pmf.variables()[i].size;
    if (src_cells != static_cast<std::uint64_t>(table.source_size) ||
        rec_cells != static_cast<std::uint64_t>(table.recon_size))
        throw ShapeMismatch("variable alphabets do not match the distortion table");

    double total = 0.0;
    std::vector<int> digits;
    for (std::uint64_t cell = 0; cell < pmf.num_cells(); ++cell) {
        double p = pmf.probs()[cell];
        if (p == 0.0) continue;
        pmf.decode(cell, digits);
        std::uint64_t s = 0, r = 0;
        for (int i : si) s = s * pmf.variables()[i].size + digits[i];
        for (int i : ri) r = r * pmf.variables()[i].size + digits[i];
        total += p * table.values[s][r];
    }
    return total;
}

}  // namespace mdlab::dist
