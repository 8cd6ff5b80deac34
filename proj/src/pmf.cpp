#include "mdlab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace mdlab::prob {

namespace {

double plogp(double p) { return p > kZeroEps ? -p * std::log2(p) : 0.0; }

void require_disjoint(const std::vector<std::vector<std::string>>& sets) {
    std::set<std::string> seen;
    for (const auto& s : sets)
        for (const auto& name : s)
            if (!seen.insert(name).second) throw OverlappingSets("variable sets overlap at '" + name + "'");
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

JointPmf::JointPmf(std::vector<Variable> variables, std::vector<double> probs)
    : variables_(std::move(variables)), probs_(std::move(probs)) {
    std::uint64_t cells = 1;
    for (const auto& v : variables_) {
        if (v.size < 1) throw ShapeMismatch("alphabet size must be >= 1 for '" + v.name + "'");
        cells *= static_cast<std::uint64_t>(v.size);
        if (cells > kMaxCells) throw AlphabetTooLarge("joint alphabet exceeds 2^24 cells");
    }
    strides_.assign(variables_.size(), 1);
    for (int i = static_cast<int>(variables_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::uint64_t>(variables_[i + 1].size);
}

int JointPmf::var_index(const std::string& name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i].name == name) return static_cast<int>(i);
    throw UnknownVariable("no variable named '" + name + "'");
}

std::vector<int> JointPmf::var_indices(const std::vector<std::string>& names) const {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(var_index(n));
    return out;
}

void JointPmf::decode(std::uint64_t cell, std::vector<int>& digits) const {
    digits.resize(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        digits[i] = static_cast<int>(cell / strides_[i]);
        cell %= strides_[i];
    }
}

std::vector<double> JointPmf::marginal(const std::vector<int>& idx) const {
    std::uint64_t size = 1;
    for (int i : idx) size *= static_cast<std::uint64_t>(variables_[i].size);
    std::vector<double> out(size, 0.0);
    std::vector<int> digits;
    for (std::uint64_t cell = 0; cell < probs_.size(); ++cell) {
        double p = probs_[cell];
        if (p == 0.0) continue;
        decode(cell, digits);
        std::uint64_t key = 0;
        for (int i : idx) key = key * static_cast<std::uint64_t>(variables_[i].size) + digits[i];
        out[key] += p;
    }
    return out;
}

void validate(const JointPmf& pmf) {
    std::uint64_t cells = 1;
    for (const auto& v : pmf.variables()) cells *= static_cast<std::uint64_t>(v.size);
    if (cells != pmf.probs().size()) {
        std::ostringstream msg;
        msg << "table has " << pmf.probs().size() << " entries, expected " << cells;
        throw ShapeMismatch(msg.str());
    }
    double total = 0.0;
    for (double p : pmf.probs()) {
        if (p < 0.0) throw NegativeMass("negative probability entry");
        total += p;
    }
    if (std::abs(total - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "entries sum to " << total << " (deviation " << total - 1.0 << ")";
        throw NotNormalized(msg.str());
    }
}

double entropy(const JointPmf& pmf, const std::vector<std::string>& vars) {
    if (vars.empty()) throw UnknownVariable("entropy over an empty variable set");
    auto marg = pmf.marginal(pmf.var_indices(vars));
    double h = 0.0;
    for (double p : marg) h += plogp(p);
    return h;
}

double conditional_entropy(const JointPmf& pmf, const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
    if (b.empty()) return entropy(pmf, a);
    return entropy(pmf, concat(a, b)) - entropy(pmf, b);
}

double mutual_information(const JointPmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, const std::vector<std::string>& c) {
    if (a.empty() || b.empty()) throw UnknownVariable("mutual information needs nonempty A and B");
    require_disjoint({a, b, c});
    // I(A;B|C) = H(A|C) + H(B|C) - H(A,B|C)
    double i = conditional_entropy(pmf, a, c) + conditional_entropy(pmf, b, c) -
               conditional_entropy(pmf, concat(a, b), c);
    return i < 0.0 ? 0.0 : i;
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw OutOfRange("binary_entropy needs p in [0,1]");
    return plogp(p) + plogp(1.0 - p);
}

double binary_convolve(double a, double b) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) throw OutOfRange("binary_convolve needs a,b in [0,1]");
    return a * (1.0 - b) + b * (1.0 - a);
}

MarkovResult is_markov(const JointPmf& pmf, const std::vector<std::string>& a,
                       const std::vector<std::string>& b, const std::vector<std::string>& c,
                       double tol) {
    double dev = mutual_information(pmf, a, c, b);
    return {dev <= tol, dev};
}

CommonFunctionResult common_function_exists(const JointPmf& pmf, const std::vector<std::string>& b,
                                            const std::vector<std::string>& c,
                                            const std::vector<std::string>& d, double support_eps) {
    require_disjoint({b, c, d});
    auto bi = pmf.var_indices(b);
    auto ci = pmf.var_indices(c);
    auto di = pmf.var_indices(d);

    std::uint64_t nb = 1, nc = 1, nd = 1;
    for (int i : bi) nb *= static_cast<std::uint64_t>(pmf.variables()[i].size);
    for (int i : ci) nc *= static_cast<std::uint64_t>(pmf.variables()[i].size);
    for (int i : di) nd *= static_cast<std::uint64_t>(pmf.variables()[i].size);

    std::vector<int> order;
    order.insert(order.end(), bi.begin(), bi.end());
    order.insert(order.end(), ci.begin(), ci.end());
    order.insert(order.end(), di.begin(), di.end());
    auto table = pmf.marginal(order);  // indexed (b, c, d), b slowest

    CommonFunctionResult res;
    res.per_b.assign(nb, false);
    res.b_mass.assign(nb, 0.0);

    std::vector<int> parent(nc + nd);
    for (std::uint64_t bv = 0; bv < nb; ++bv) {
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::vector<bool> touched(nc + nd, false);
        double mass = 0.0;
        for (std::uint64_t cv = 0; cv < nc; ++cv)
            for (std::uint64_t dv = 0; dv < nd; ++dv) {
                double p = table[(bv * nc + cv) * nd + dv];
                mass += p;
                if (p <= support_eps) continue;
                int u = static_cast<int>(cv), v = static_cast<int>(nc + dv);
                touched[u] = touched[v] = true;
                parent[find(u)] = find(v);
            }
        res.b_mass[bv] = mass;
        if (mass <= kZeroEps) continue;  // zero-mass b is skipped
        std::set<int> roots;
        for (int v = 0; v < static_cast<int>(nc + nd); ++v)
            if (touched[v]) roots.insert(find(v));
        if (roots.size() >= 2) {
            res.per_b[bv] = true;
            res.exists = true;
        }
    }
    return res;
}

ImplicationResult check_lemma2(const JointPmf& pmf, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               const std::vector<std::string>& d, double tol) {
    require_disjoint({a, b, c, d});
    double i_ad = mutual_information(pmf, a, d, concat(b, c));
    double i_ac = mutual_information(pmf, a, c, concat(b, d));
    bool no_common = !common_function_exists(pmf, b, c, d).exists;

    ImplicationResult res;
    res.hypotheses_hold = (i_ad <= tol) && (i_ac <= tol) && no_common;
    res.conclusion_deviation = mutual_information(pmf, a, concat(c, d), b);
    res.conclusion_holds = res.conclusion_deviation <= tol;
    return res;
}

ImplicationResult check_lemma3(const JointPmf& pmf, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               const std::vector<std::string>& d, double tol) {
    require_disjoint({a, b, c, d});
    double i_ad = mutual_information(pmf, a, d, concat(b, c));
    double i_ac = mutual_information(pmf, a, c, b);
    double i_bd = mutual_information(pmf, b, d, c);

    ImplicationResult res;
    res.hypotheses_hold = (i_ad <= tol) && (i_ac <= tol) && (i_bd <= tol);
    double dev_front = mutual_information(pmf, a, concat(c, d), b);
    double dev_back = mutual_information(pmf, concat(a, b), d, c);
    res.conclusion_deviation = std::max(dev_front, dev_back);
    res.conclusion_holds = res.conclusion_deviation <= tol;
    return res;
}

}  // namespace mdlab::prob
