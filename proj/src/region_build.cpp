#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "mdlab/region.hpp"

namespace mdlab::region {

namespace {

std::string desc_key(const std::vector<int>& subset) {
    std::string s;
    for (int d : subset) s += std::to_string(d);
    return s;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) s += ",";
        s += names[i];
    }
    return s;
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a)
        if (std::find(b.begin(), b.end(), x) == b.end()) return false;
    return true;
}

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    int c = 0;
    for (int x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) ++c;
    return c;
}

struct Codebook {
    enum Kind { Base, Refine, Extra } kind = Base;
    std::string var;
    std::vector<int> bin_descs;                // descriptions carrying a bin index
    std::vector<int> subset;                   // Base: the set A
    int threshold = 1;                         // Base: i, Refine: k
    int desc = 0;                              // Refine: j
    std::vector<std::vector<int>> decode_any;  // Extra: minimal decoder subsets

    bool decoded_at(const std::vector<int>& s) const {
        switch (kind) {
            case Base:
                return intersection_size(subset, s) >= threshold;
            case Refine:
                return std::find(s.begin(), s.end(), desc) != s.end() &&
                       static_cast<int>(s.size()) >= threshold;
            case Extra:
                for (const auto& g : decode_any)
                    if (is_subset(g, s)) return true;
                return false;
        }
        return false;
    }
};

// One additive term of a packing bound: +pool (+reduction) - received bins.
struct PackTerm {
    std::vector<std::string> vars;    // contributes to the partition entropies
    double entropy_bits = 0.0;        // H of `vars`, used for the CMS constant
    int pool = -1;                    // r[...] column; -1 => branch-resolved sum pool
    int sum_index = -1;               // which sum pair resolves the pool (when pool < 0)
    int reduction = -1;               // rhop[...] column (linear scheme)
    std::vector<int> bins;            // columns subtracted as received bin rates
    bool branch_dependent() const { return pool < 0; }
};

class Builder {
   public:
    Builder(const CodebookLayout& layout, const prob::JointPmf& pmf,
            const std::vector<DecoderSpec>& decoders, bool linear, double q_bits)
        : layout_(layout), pmf_(pmf), decoders_(decoders), linear_(linear), q_(q_bits) {}

    IneqSystem build() {
        validate_layout();
        collect_codebooks();
        declare_variables();
        covering_bounds();
        packing_bounds();
        rate_accounting();
        range_bounds();
        if (linear_) sum_branches();
        return std::move(sys_);
    }

   private:
    void fail(const std::string& msg) { throw LayoutMismatch(msg); }

    void validate_layout() {
        if (layout_.L < 1) fail("layout needs at least one description");
        if (decoders_.empty()) fail("at least one decoder is required");
        for (const auto& d : decoders_) {
            if (d.subset.empty()) fail("decoder with empty description subset");
            for (int j : d.subset)
                if (j < 1 || j > layout_.L) fail("decoder references an unknown description");
        }
        if (!linear_ && !layout_.sums.empty())
            fail("sum pairs require the linear scheme");
        for (const auto& name : layout_.sources) check_var(name);
    }

    void check_var(const std::string& name) {
        try {
            int idx = pmf_.var_index(name);
            if (linear_) {
                double bits = std::log2(static_cast<double>(pmf_.variables()[idx].size));
                if (bits > q_ + 1e-12)
                    throw QTooSmall("q_bits smaller than log2 alphabet of '" + name + "'");
            }
        } catch (const UnknownVariable&) {
            fail("variable '" + name + "' is not in the pmf");
        }
    }

    void collect_codebooks() {
        std::set<std::string> names;
        auto add_name = [&](const std::string& v) {
            if (!names.insert(v).second) fail("duplicate codebook variable '" + v + "'");
            check_var(v);
        };
        for (const auto& b : layout_.base) {
            if (b.subset.empty()) fail("base codebook with empty description set");
            for (int j : b.subset)
                if (j < 1 || j > layout_.L) fail("base codebook references unknown description");
            if (b.threshold < 1 || b.threshold > static_cast<int>(b.subset.size()))
                fail("base codebook threshold out of range for '" + b.var + "'");
            add_name(b.var);
            Codebook cb;
            cb.kind = Codebook::Base;
            cb.var = b.var;
            cb.subset = b.subset;
            cb.threshold = b.threshold;
            cb.bin_descs = b.subset;
            cbs_.push_back(std::move(cb));
        }
        for (const auto& r : layout_.refine) {
            if (r.desc < 1 || r.desc > layout_.L) fail("refinement references unknown description");
            if (r.threshold < 1 || r.threshold > std::max(1, layout_.L - 1))
                fail("refinement threshold out of range for '" + r.var + "'");
            add_name(r.var);
            Codebook cb;
            cb.kind = Codebook::Refine;
            cb.var = r.var;
            cb.desc = r.desc;
            cb.threshold = r.threshold;
            cb.bin_descs = {r.desc};
            cbs_.push_back(std::move(cb));
        }
        for (const auto& e : layout_.extra) {
            if (e.decode_any.empty()) fail("extra codebook without a decode condition");
            add_name(e.var);
            Codebook cb;
            cb.kind = Codebook::Extra;
            cb.var = e.var;
            cb.decode_any = e.decode_any;
            for (int j = 1; j <= layout_.L; ++j) cb.bin_descs.push_back(j);
            cbs_.push_back(std::move(cb));
        }
        if (cbs_.empty()) fail("layout has no codebooks");

        for (const auto& s : layout_.sums) {
            if (cb_index(s.y) < 0 || cb_index(s.z) < 0)
                fail("sum pair must reference codebook variables");
            bool needs_sum_var = false;
            for (const auto& c : s.cases)
                if (c.mode == SumCase::SumOnly) needs_sum_var = true;
            if (needs_sum_var && s.sum_var.empty())
                throw MissingSumVariable("sum-only decoding requires the Y+Z variable in the pmf");
            if (!s.sum_var.empty()) {
                try {
                    check_var(s.sum_var);
                } catch (const LayoutMismatch&) {
                    throw MissingSumVariable("variable '" + s.sum_var + "' is not in the pmf");
                }
            }
        }
    }

    int cb_index(const std::string& var) const {
        for (std::size_t i = 0; i < cbs_.size(); ++i)
            if (cbs_[i].var == var) return static_cast<int>(i);
        return -1;
    }

    int add_var(const std::string& name) {
        sys_.vars.push_back(name);
        return static_cast<int>(sys_.vars.size()) - 1;
    }

    void declare_variables() {
        for (int j = 1; j <= layout_.L; ++j) rate_var_.push_back(add_var("R" + std::to_string(j)));
        pool_var_.resize(cbs_.size());
        bin_var_.resize(cbs_.size());
        reduction_var_.assign(cbs_.size(), -1);
        for (std::size_t i = 0; i < cbs_.size(); ++i) {
            pool_var_[i] = add_var("r[" + cbs_[i].var + "]");
            for (int j : cbs_[i].bin_descs)
                bin_var_[i][j] = add_var("rho[" + cbs_[i].var + "," + std::to_string(j) + "]");
        }
        if (linear_)
            for (std::size_t i = 0; i < cbs_.size(); ++i)
                reduction_var_[i] = add_var("rhop[" + cbs_[i].var + "]");
        for (std::size_t s = 0; s < layout_.sums.size(); ++s) {
            const auto& sum = layout_.sums[s];
            std::string key = sum.y + "+" + sum.z;
            sum_bin_var_.emplace_back();
            for (int j = 1; j <= layout_.L; ++j)
                sum_bin_var_[s][j] = add_var("rho[" + key + "," + std::to_string(j) + "]");
            sum_reduction_var_.push_back(add_var("rhop[" + key + "]"));
            sum_entropy_.push_back(sum_pair_entropy(sum));
        }
        // sigma split variables are declared lazily per (sum, decoder) case
    }

    double entropy_of(std::vector<std::string> names) {
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        if (names.empty()) return 0.0;
        auto it = entropy_cache_.find(names);
        if (it != entropy_cache_.end()) return it->second;
        double h = prob::entropy(pmf_, names);
        entropy_cache_.emplace(std::move(names), h);
        return h;
    }

    double conditional(const std::vector<std::string>& a, const std::vector<std::string>& b) {
        if (b.empty()) return entropy_of(a);
        std::vector<std::string> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        return entropy_of(ab) - entropy_of(b);
    }

    // H(Y+Z): from the materialized sum variable when present, otherwise from
    // the joint marginal of (Y,Z) under addition modulo the common alphabet.
    double sum_pair_entropy(const SumPair& sum) {
        if (!sum.sum_var.empty()) return entropy_of({sum.sum_var});
        int yi = pmf_.var_index(sum.y), zi = pmf_.var_index(sum.z);
        int ys = pmf_.variables()[yi].size, zs = pmf_.variables()[zi].size;
        if (ys != zs) fail("sum pair over mismatched alphabets");
        auto joint = pmf_.marginal({yi, zi});
        std::vector<double> ps(ys, 0.0);
        for (int y = 0; y < ys; ++y)
            for (int z = 0; z < zs; ++z) ps[(y + z) % ys] += joint[y * zs + z];
        double h = 0.0;
        for (double p : ps)
            if (p > prob::kZeroEps) h -= p * std::log2(p);
        return h;
    }

    LinIneq fresh_row(Rel rel, std::string tag) {
        LinIneq row;
        row.coeffs.assign(sys_.vars.size(), 0);
        row.rel = rel;
        row.tag = std::move(tag);
        return row;
    }

    // (a) mutual covering bounds over every nonempty sub-collection.
    void covering_bounds() {
        std::size_t m = cbs_.size();
        if (m > 20 || ((std::size_t(1) << m) - 1) > kDefaultRowCap)
            throw Blowup("too many codebooks for the covering enumeration");
        for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
            std::vector<std::string> names;
            double rhs = 0.0;
            LinIneq row = fresh_row(Rel::Ge, "");
            for (std::size_t i = 0; i < m; ++i) {
                if (!(mask >> i & 1)) continue;
                names.push_back(cbs_[i].var);
                row.coeffs[pool_var_[i]] = 1;
                if (linear_) {
                    row.coeffs[reduction_var_[i]] = 1;
                    rhs += q_;
                } else {
                    rhs += entropy_of({cbs_[i].var});
                }
            }
            row.tag = "cover{" + join_names(names) + "}";
            rhs -= conditional(names, layout_.sources);
            row.rhs = Rational(rhs);
            sys_.common.push_back(std::move(row));
        }
    }

    std::vector<int> received_sum_bins(std::size_t s, const std::vector<int>& dec) const {
        std::vector<int> cols;
        for (int j : dec) cols.push_back(sum_bin_var_[s].at(j));
        return cols;
    }

    // Decoded terms at a decoder, including the sum-case augmentations.
    std::vector<PackTerm> decoded_terms(const DecoderSpec& dec) {
        std::vector<PackTerm> terms;
        std::vector<bool> decoded(cbs_.size(), false);
        for (std::size_t i = 0; i < cbs_.size(); ++i) {
            if (!cbs_[i].decoded_at(dec.subset)) continue;
            decoded[i] = true;
            PackTerm t;
            t.vars = {cbs_[i].var};
            t.entropy_bits = entropy_of({cbs_[i].var});
            t.pool = pool_var_[i];
            t.reduction = reduction_var_[i];
            for (int j : dec.subset) {
                auto it = bin_var_[i].find(j);
                if (it != bin_var_[i].end()) t.bins.push_back(it->second);
            }
            terms.push_back(std::move(t));
        }
        for (std::size_t s = 0; s < layout_.sums.size(); ++s) {
            const auto& sum = layout_.sums[s];
            for (const auto& c : sum.cases) {
                if (c.decoder != dec.subset) continue;
                int yi = cb_index(sum.y), zi = cb_index(sum.z);
                bool y_dec = decoded[yi], z_dec = decoded[zi];
                switch (c.mode) {
                    case SumCase::Both: {
                        if (!y_dec || !z_dec)
                            fail("sum case 'both' needs Y and Z decoded at " + desc_key(dec.subset));
                        int sy = add_var("sigma[" + sum.y + "+" + sum.z + "@" + desc_key(dec.subset) +
                                         "," + sum.y + "]");
                        int sz = add_var("sigma[" + sum.y + "+" + sum.z + "@" + desc_key(dec.subset) +
                                         "," + sum.z + "]");
                        for (auto& row : sys_.common) row.coeffs.resize(sys_.vars.size(), 0);
                        LinIneq split = fresh_row(Rel::Eq, "sigma-split{" + desc_key(dec.subset) + "}");
                        split.coeffs[sy] = 1;
                        split.coeffs[sz] = 1;
                        for (int col : received_sum_bins(s, dec.subset)) split.coeffs[col] -= 1;
                        sys_.common.push_back(std::move(split));
                        LinIneq ny = fresh_row(Rel::Ge, "sigma-nonneg");
                        ny.coeffs[sy] = 1;
                        sys_.common.push_back(ny);
                        LinIneq nz = fresh_row(Rel::Ge, "sigma-nonneg");
                        nz.coeffs[sz] = 1;
                        sys_.common.push_back(nz);
                        for (auto& t : terms) {
                            if (t.vars == std::vector<std::string>{sum.y}) t.bins.push_back(sy);
                            if (t.vars == std::vector<std::string>{sum.z}) t.bins.push_back(sz);
                        }
                        break;
                    }
                    case SumCase::One: {
                        if (y_dec == z_dec)
                            fail("sum case 'one' needs exactly one of Y,Z decoded at " +
                                 desc_key(dec.subset));
                        const std::string& delivered = y_dec ? sum.z : sum.y;
                        int di = y_dec ? zi : yi;
                        PackTerm t;
                        t.vars = {delivered};
                        t.entropy_bits = entropy_of({delivered});
                        t.pool = pool_var_[di];
                        t.reduction = reduction_var_[di];
                        t.bins = received_sum_bins(s, dec.subset);
                        terms.push_back(std::move(t));
                        break;
                    }
                    case SumCase::SumOnly: {
                        if (y_dec || z_dec)
                            fail("sum case 'sum-only' forbids Y or Z decoded at " +
                                 desc_key(dec.subset));
                        PackTerm t;
                        t.vars = {sum.sum_var};
                        t.entropy_bits = sum_entropy_[s];
                        t.pool = -1;  // resolved per branch to r[Y] or r[Z]
                        t.sum_index = static_cast<int>(s);
                        t.reduction = sum_reduction_var_[s];
                        t.bins = received_sum_bins(s, dec.subset);
                        terms.push_back(std::move(t));
                        break;
                    }
                }
            }
        }
        return terms;
    }

    // (b) packing bounds over every 2-partition with nonempty first part.
    void packing_bounds() {
        for (const auto& dec : decoders_) {
            auto terms = decoded_terms(dec);
            std::size_t m = terms.size();
            if (m == 0) continue;
            if (m > 16) throw Blowup("too many decoded codebooks at one decoder");
            for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
                LinIneq row = fresh_row(Rel::Le, "");
                std::vector<std::string> p1_vars, p2_vars, p1_names;
                double rhs = 0.0;
                bool branch_dep = false;
                int branch_sum = -1;
                for (std::size_t i = 0; i < m; ++i) {
                    const auto& t = terms[i];
                    if (mask >> i & 1) {
                        p1_vars.insert(p1_vars.end(), t.vars.begin(), t.vars.end());
                        p1_names.push_back(t.vars.front());
                        if (t.branch_dependent()) {
                            branch_dep = true;
                            branch_sum = t.sum_index;
                        } else {
                            row.coeffs[t.pool] += 1;
                        }
                        if (linear_) {
                            row.coeffs[t.reduction] += 1;
                            rhs += q_;
                        } else {
                            rhs += t.entropy_bits;
                        }
                        for (int col : t.bins) row.coeffs[col] -= 1;
                    } else {
                        p2_vars.insert(p2_vars.end(), t.vars.begin(), t.vars.end());
                    }
                }
                rhs -= conditional(p1_vars, p2_vars);
                row.rhs = Rational(rhs);
                row.tag = "pack{s=" + desc_key(dec.subset) + ";P1=" + join_names(p1_names) + "}";
                if (!branch_dep) {
                    sys_.common.push_back(std::move(row));
                } else {
                    // Two variants, one per choice of the sum pool rate.
                    branch_rows_.push_back({row, branch_sum});
                }
            }
        }
    }

    // (c) description-rate accounting R_j = sum of bin rates carried on j.
    void rate_accounting() {
        for (int j = 1; j <= layout_.L; ++j) {
            LinIneq row = fresh_row(Rel::Eq, "rate[" + std::to_string(j) + "]");
            row.coeffs[rate_var_[j - 1]] = 1;
            for (std::size_t i = 0; i < cbs_.size(); ++i) {
                auto it = bin_var_[i].find(j);
                if (it != bin_var_[i].end()) row.coeffs[it->second] -= 1;
            }
            for (std::size_t s = 0; s < layout_.sums.size(); ++s)
                row.coeffs[sum_bin_var_[s].at(j)] -= 1;
            sys_.common.push_back(std::move(row));
        }
    }

    // (d) 0 <= rho <= r, r >= 0, and the linear reduction ranges.
    void range_bounds() {
        auto ge0 = [&](int col, const std::string& tag) {
            LinIneq row = fresh_row(Rel::Ge, tag);
            row.coeffs[col] = 1;
            sys_.common.push_back(std::move(row));
        };
        for (std::size_t i = 0; i < cbs_.size(); ++i) {
            ge0(pool_var_[i], "pool-nonneg{" + cbs_[i].var + "}");
            for (auto [j, col] : bin_var_[i]) {
                ge0(col, "bin-nonneg");
                LinIneq row = fresh_row(Rel::Le, "bin-le-pool{" + cbs_[i].var + "}");
                row.coeffs[col] = 1;
                row.coeffs[pool_var_[i]] = -1;
                sys_.common.push_back(std::move(row));
            }
            if (linear_) {
                ge0(reduction_var_[i], "reduction-nonneg");
                LinIneq row = fresh_row(Rel::Le, "reduction-ub{" + cbs_[i].var + "}");
                row.coeffs[reduction_var_[i]] = 1;
                row.rhs = Rational(q_ - entropy_of({cbs_[i].var}));
                sys_.common.push_back(std::move(row));
            }
        }
        for (std::size_t s = 0; s < layout_.sums.size(); ++s) {
            for (auto [j, col] : sum_bin_var_[s]) ge0(col, "sum-bin-nonneg");
            ge0(sum_reduction_var_[s], "sum-reduction-nonneg");
            LinIneq row = fresh_row(Rel::Le, "sum-reduction-ub");
            row.coeffs[sum_reduction_var_[s]] = 1;
            row.rhs = Rational(q_ - sum_entropy_[s]);
            sys_.common.push_back(std::move(row));
        }
    }

    // The max{r_y, r_z} covering bound: one branch per choice, across all
    // sum pairs; branch-dependent packing rows resolve their pool rate here.
    void sum_branches() {
        for (auto& row : sys_.common) row.coeffs.resize(sys_.vars.size(), 0);
        if (layout_.sums.empty()) return;
        std::size_t nsums = layout_.sums.size();
        if (nsums > 16) throw Blowup("too many sum pairs");
        for (std::size_t choice = 0; choice < (std::size_t(1) << nsums); ++choice) {
            std::vector<LinIneq> rows;
            for (std::size_t s = 0; s < nsums; ++s) {
                bool pick_y = !(choice >> s & 1);
                int pool = pool_var_[cb_index(pick_y ? layout_.sums[s].y : layout_.sums[s].z)];
                LinIneq cover = fresh_row(Rel::Ge, "sumcover{" + layout_.sums[s].y + "+" +
                                                       layout_.sums[s].z + "}");
                cover.coeffs[pool] = 1;
                cover.rhs = Rational(q_ - sum_entropy_[s]);
                rows.push_back(std::move(cover));
                for (auto [j, col] : sum_bin_var_[s]) {
                    LinIneq lim = fresh_row(Rel::Le, "sum-bin-le-pool");
                    lim.coeffs[col] = 1;
                    lim.coeffs[pool] = -1;
                    rows.push_back(std::move(lim));
                }
                for (const auto& [proto, sum_idx] : branch_rows_) {
                    if (sum_idx != static_cast<int>(s)) continue;
                    LinIneq row = proto;
                    row.coeffs.resize(sys_.vars.size(), 0);
                    row.coeffs[pool] += 1;
                    rows.push_back(std::move(row));
                }
            }
            sys_.branches.push_back(std::move(rows));
        }
    }

    const CodebookLayout& layout_;
    const prob::JointPmf& pmf_;
    const std::vector<DecoderSpec>& decoders_;
    bool linear_;
    double q_;

    IneqSystem sys_;
    std::vector<Codebook> cbs_;
    std::vector<int> rate_var_;
    std::vector<int> pool_var_;
    std::vector<std::map<int, int>> bin_var_;
    std::vector<int> reduction_var_;
    std::vector<std::map<int, int>> sum_bin_var_;
    std::vector<int> sum_reduction_var_;
    std::vector<double> sum_entropy_;
    std::vector<std::pair<LinIneq, int>> branch_rows_;
    std::map<std::vector<std::string>, double> entropy_cache_;
};

}  // namespace

IneqSystem build_cms_system(const CodebookLayout& layout, const prob::JointPmf& pmf,
                            const std::vector<DecoderSpec>& decoders) {
    return Builder(layout, pmf, decoders, false, 0.0).build();
}

IneqSystem build_linear_system(const CodebookLayout& layout, const prob::JointPmf& pmf,
                               const std::vector<DecoderSpec>& decoders, double q_bits) {
    if (q_bits <= 0.0) throw QTooSmall("q_bits must be positive");
    return Builder(layout, pmf, decoders, true, q_bits).build();
}

}  // namespace mdlab::region
