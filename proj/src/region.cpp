#include "mdlab/region.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <sstream>

namespace mdlab::region {

using boost::multiprecision::cpp_int;

double to_double(const Rational& q) { return q.convert_to<double>(); }

int IneqSystem::var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return static_cast<int>(i);
    throw DimensionMismatch("no variable named '" + name + "' in the system");
}

LinIneq to_le(const LinIneq& row) {
    if (row.rel == Rel::Eq) throw DimensionMismatch("equality row has no <= form");
    if (row.rel == Rel::Le) return row;
    LinIneq out = row;
    out.rel = Rel::Le;
    for (auto& c : out.coeffs) c = -c;
    out.rhs = -out.rhs;
    return out;
}

void normalize_row(LinIneq& row) {
    cpp_int num_gcd = 0, den_lcm = 1;
    for (const auto& c : row.coeffs) {
        if (c == 0) continue;
        num_gcd = gcd(num_gcd, numerator(c));
        den_lcm = lcm(den_lcm, denominator(c));
    }
    if (num_gcd == 0) return;  // all-zero coefficients
    Rational content(num_gcd, den_lcm);
    if (content < 0) content = -content;
    for (auto& c : row.coeffs) c /= content;
    row.rhs /= content;
}

LinIneq combine_rows(const IneqSystem& system,
                     const std::vector<std::pair<std::size_t, Rational>>& weights) {
    LinIneq out;
    out.coeffs.assign(system.vars.size(), 0);
    out.rel = Rel::Le;
    std::ostringstream tag;
    tag << "combine{";
    for (const auto& [idx, w] : weights) {
        if (w < 0) throw DimensionMismatch("combination weights must be nonnegative");
        LinIneq le = to_le(system.common.at(idx));
        for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += w * le.coeffs[i];
        out.rhs += w * le.rhs;
        tag << idx << " ";
    }
    tag << "}";
    out.tag = tag.str();
    return out;
}

int find_row(const IneqSystem& system, const std::string& needle) {
    for (std::size_t i = 0; i < system.common.size(); ++i)
        if (system.common[i].tag.find(needle) != std::string::npos) return static_cast<int>(i);
    return -1;
}

namespace {

std::size_t row_cap_from_env(std::optional<std::size_t> requested) {
    if (requested) return *requested;
    if (const char* env = std::getenv("MDLAB_ROW_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultRowCap;
}

std::string coeff_key(const LinIneq& row) {
    std::ostringstream key;
    for (std::size_t i = 0; i < row.coeffs.size(); ++i)
        if (row.coeffs[i] != 0) key << i << ":" << row.coeffs[i] << ";";
    return key.str();
}

// A working row bundles the inequality with the set of post-substitution
// source rows it combines (Imbert's acceleration needs the count).
struct WorkRow {
    LinIneq row;
    std::vector<std::uint64_t> hist;
    int hist_count = 0;
};

// Dedup: keep the tightest rhs per coefficient vector, drop trivially true
// rows, keep one infeasibility marker if a row reads 0 <= negative.
std::vector<WorkRow> prune(std::vector<WorkRow> rows, std::size_t nvars) {
    std::map<std::string, std::size_t> seen;
    std::vector<WorkRow> out;
    // Zero-coefficient rows collapse to a single "0 <= worst constant" row;
    // the membership layer classifies it against the float tolerance, so a
    // 1e-12 deficit from rounded entropy constants stays marginal rather
    // than becoming a hard contradiction.
    bool has_zero_row = false;
    Rational worst_zero_rhs = 0;
    for (auto& wr : rows) {
        normalize_row(wr.row);
        std::string key = coeff_key(wr.row);
        if (key.empty()) {
            if (wr.row.rhs < 0 && (!has_zero_row || wr.row.rhs < worst_zero_rhs)) {
                has_zero_row = true;
                worst_zero_rhs = wr.row.rhs;
            }
            continue;
        }
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(std::move(key), out.size());
            out.push_back(std::move(wr));
        } else if (wr.row.rhs < out[it->second].row.rhs) {
            out[it->second] = std::move(wr);
        }
    }
    if (has_zero_row && to_double(worst_zero_rhs) < -kMembershipTol) {
        WorkRow marker;
        marker.row.coeffs.assign(nvars, 0);
        marker.row.rel = Rel::Le;
        marker.row.rhs = worst_zero_rhs;
        marker.row.tag = "constant";
        out.push_back(std::move(marker));
    }

    // Imbert's subset rule: a derived row whose source set strictly contains
    // another surviving row's source set is redundant. Quadratic, so only
    // applied while the row count is moderate.
    if (out.size() > 1 && out.size() <= 8000) {
        std::vector<std::size_t> order(out.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out[a].hist_count < out[b].hist_count;
        });
        std::vector<bool> dead(out.size(), false);
        for (std::size_t a = 0; a < order.size(); ++a) {
            if (dead[order[a]]) continue;
            const auto& small = out[order[a]];
            if (small.hist.empty()) continue;
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                if (dead[order[b]]) continue;
                const auto& big = out[order[b]];
                if (big.hist_count <= small.hist_count) continue;
                if (big.hist.size() != small.hist.size()) continue;
                bool subset = true;
                for (std::size_t w = 0; w < small.hist.size() && subset; ++w)
                    subset = (small.hist[w] & ~big.hist[w]) == 0;
                if (subset) dead[order[b]] = true;
            }
        }
        std::vector<WorkRow> kept;
        kept.reserve(out.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            if (!dead[i]) kept.push_back(std::move(out[i]));
        out = std::move(kept);
    }
    return out;
}

// Substitutes every equality into the inequality rows, preferring pivots on
// variables that are not kept. Equalities that only touch kept variables are
// emitted as a <= / >= pair.
void substitute_equalities(std::vector<LinIneq>& rows, const std::vector<bool>& keep_mask,
                           std::ostringstream& log) {
    for (std::size_t e = 0; e < rows.size(); ++e) {
        if (rows[e].rel != Rel::Eq) continue;
        LinIneq eq = rows[e];
        int pivot = -1;
        for (std::size_t i = 0; i < eq.coeffs.size(); ++i)
            if (eq.coeffs[i] != 0 && !keep_mask[i]) {
                pivot = static_cast<int>(i);
                break;
            }
        if (pivot < 0) {
            // No eliminable variable: replace by the two inequalities.
            rows[e].rel = Rel::Le;
            LinIneq ge = eq;
            ge.rel = Rel::Ge;
            rows.push_back(to_le(ge));
            continue;
        }
        log << "substitute " << eq.tag << " pivot #" << pivot << "\n";
        Rational pc = eq.coeffs[pivot];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == e || rows[r].coeffs[pivot] == 0) continue;
            Rational f = rows[r].coeffs[pivot] / pc;
            for (std::size_t i = 0; i < eq.coeffs.size(); ++i)
                rows[r].coeffs[i] -= f * eq.coeffs[i];
            rows[r].rhs -= f * eq.rhs;
        }
        rows[e].coeffs.assign(eq.coeffs.size(), 0);  // consumed
        rows[e].rhs = 0;
        rows[e].rel = Rel::Le;
    }
    std::erase_if(rows, [](const LinIneq& r) { return r.rel == Rel::Eq; });
}

std::vector<LinIneq> project_branch(std::vector<LinIneq> in_rows,
                                    const std::vector<bool>& keep_mask, std::size_t cap,
                                    std::ostringstream& log) {
    const std::size_t nvars = keep_mask.size();
    substitute_equalities(in_rows, keep_mask, log);

    std::vector<WorkRow> rows;
    rows.reserve(in_rows.size());
    const std::size_t hist_words = (in_rows.size() + 63) / 64;
    for (std::size_t i = 0; i < in_rows.size(); ++i) {
        WorkRow wr;
        wr.row = to_le(in_rows[i]);
        wr.hist.assign(hist_words, 0);
        wr.hist[i / 64] |= std::uint64_t(1) << (i % 64);
        wr.hist_count = 1;
        rows.push_back(std::move(wr));
    }
    rows = prune(std::move(rows), nvars);

    int eliminated = 0;
    while (true) {
        // Pick the eliminable variable with the fewest upper x lower pairings.
        int best = -1;
        std::size_t best_cost = 0;
        for (std::size_t v = 0; v < nvars; ++v) {
            if (keep_mask[v]) continue;
            std::size_t pos = 0, neg = 0;
            for (const auto& r : rows) {
                if (r.row.coeffs[v] > 0) ++pos;
                else if (r.row.coeffs[v] < 0) ++neg;
            }
            if (pos + neg == 0) continue;
            std::size_t cost = pos * neg;
            if (best < 0 || cost < best_cost) {
                best = static_cast<int>(v);
                best_cost = cost;
            }
        }
        if (best < 0) break;
        ++eliminated;

        std::vector<WorkRow> uppers, lowers, rest;
        for (auto& r : rows) {
            if (r.row.coeffs[best] > 0) uppers.push_back(std::move(r));
            else if (r.row.coeffs[best] < 0) lowers.push_back(std::move(r));
            else rest.push_back(std::move(r));
        }
        log << "eliminate #" << best << ": " << uppers.size() << " upper x " << lowers.size()
            << " lower, " << rest.size() << " untouched\n";
        if (rest.size() + uppers.size() * lowers.size() > cap)
            throw Blowup("row cap exceeded while eliminating variable");
        for (const auto& u : uppers)
            for (const auto& l : lowers) {
                // Imbert's acceleration: a combination of more than
                // eliminated+1 source rows is redundant and can be dropped.
                int count = 0;
                std::vector<std::uint64_t> hist(hist_words);
                for (std::size_t w = 0; w < hist_words; ++w) {
                    hist[w] = u.hist[w] | l.hist[w];
                    count += std::popcount(hist[w]);
                }
                if (count > eliminated + 1) continue;
                WorkRow combo;
                combo.row.coeffs.resize(nvars);
                Rational wu = -l.row.coeffs[best];  // positive
                Rational wl = u.row.coeffs[best];   // positive
                for (std::size_t i = 0; i < nvars; ++i)
                    combo.row.coeffs[i] = wu * u.row.coeffs[i] + wl * l.row.coeffs[i];
                combo.row.rhs = wu * u.row.rhs + wl * l.row.rhs;
                combo.row.rel = Rel::Le;
                combo.row.tag = "fm";
                combo.hist = std::move(hist);
                combo.hist_count = count;
                rest.push_back(std::move(combo));
            }
        rows = prune(std::move(rest), nvars);
        if (rows.size() > cap) throw Blowup("row cap exceeded after pruning");
    }
    std::vector<LinIneq> out;
    out.reserve(rows.size());
    for (auto& wr : rows) out.push_back(std::move(wr.row));
    return out;
}

}  // namespace

RateRegion fm_eliminate(const IneqSystem& system, const std::vector<std::string>& keep,
                        std::optional<std::size_t> row_cap) {
    std::size_t cap = row_cap_from_env(row_cap);
    std::vector<bool> keep_mask(system.vars.size(), false);
    std::vector<int> keep_idx;
    for (const auto& name : keep) {
        int i = system.var_index(name);
        keep_mask[i] = true;
        keep_idx.push_back(i);
    }

    RateRegion region;
    region.keep = keep;
    std::ostringstream log;
    std::size_t nb = system.num_branches();
    for (std::size_t b = 0; b < nb; ++b) {
        log << "branch " << b << ":\n";
        std::vector<LinIneq> rows = system.common;
        if (!system.branches.empty())
            rows.insert(rows.end(), system.branches[b].begin(), system.branches[b].end());
        auto projected = project_branch(std::move(rows), keep_mask, cap, log);
        // Re-index the surviving rows onto the kept variables.
        std::vector<LinIneq> out;
        out.reserve(projected.size());
        for (auto& r : projected) {
            LinIneq slim;
            slim.rel = Rel::Le;
            slim.rhs = r.rhs;
            slim.tag = r.tag;
            slim.coeffs.reserve(keep_idx.size());
            for (int i : keep_idx) slim.coeffs.push_back(r.coeffs[i]);
            out.push_back(std::move(slim));
        }
        region.disjuncts.push_back(std::move(out));
    }
    region.provenance = log.str();
    return region;
}

namespace {

Membership classify_rows(const std::vector<LinIneq>& rows, const std::vector<double>& point,
                         double tol) {
    Membership m = Membership::Feasible;
    for (const auto& row : rows) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < row.coeffs.size(); ++i)
            if (row.coeffs[i] != 0) lhs += to_double(row.coeffs[i]) * point[i];
        double slack = to_double(row.rhs) - lhs;
        if (slack < -tol) return Membership::Infeasible;
        if (slack <= tol) m = Membership::Marginal;
    }
    return m;
}

}  // namespace

Membership is_member(const RateRegion& region, const std::vector<double>& point, double tol) {
    if (point.size() != region.keep.size())
        throw DimensionMismatch("point dimension does not match the kept variables");
    Membership best = Membership::Infeasible;
    for (const auto& rows : region.disjuncts)
        best = std::max(best, classify_rows(rows, point, tol));
    return best;
}

Membership check_assignment(const IneqSystem& system, const std::map<std::string, double>& point,
                            double tol) {
    std::vector<double> x(system.vars.size());
    for (std::size_t i = 0; i < system.vars.size(); ++i) {
        auto it = point.find(system.vars[i]);
        if (it == point.end())
            throw DimensionMismatch("assignment is missing variable '" + system.vars[i] + "'");
        x[i] = it->second;
    }
    auto eval = [&](const std::vector<LinIneq>& rows) {
        Membership m = Membership::Feasible;
        for (const auto& row : rows) {
            double lhs = 0.0;
            for (std::size_t i = 0; i < row.coeffs.size(); ++i)
                if (row.coeffs[i] != 0) lhs += to_double(row.coeffs[i]) * x[i];
            double rhs = to_double(row.rhs);
            double lo = -1e300, hi = 1e300;
            if (row.rel == Rel::Le) hi = rhs;
            else if (row.rel == Rel::Ge) lo = rhs;
            else lo = hi = rhs;
            if (lhs > hi + tol || lhs < lo - tol) return Membership::Infeasible;
            if (lhs > hi - tol || lhs < lo + tol) m = Membership::Marginal;
        }
        return m;
    };
    Membership best = Membership::Infeasible;
    std::size_t nb = system.num_branches();
    for (std::size_t b = 0; b < nb; ++b) {
        std::vector<LinIneq> rows = system.common;
        if (!system.branches.empty())
            rows.insert(rows.end(), system.branches[b].begin(), system.branches[b].end());
        best = std::max(best, eval(rows));
    }
    return best;
}

std::vector<SlicePoint> sample_slice(const RateRegion& region,
                                     const std::map<std::string, double>& fixed,
                                     const std::string& sweep, double from, double to,
                                     double step) {
    if (step <= 0) throw DimensionMismatch("slice step must be positive");
    int sweep_idx = -1;
    std::vector<double> point(region.keep.size(), 0.0);
    for (std::size_t i = 0; i < region.keep.size(); ++i) {
        if (region.keep[i] == sweep) {
            sweep_idx = static_cast<int>(i);
            continue;
        }
        auto it = fixed.find(region.keep[i]);
        if (it == fixed.end())
            throw DimensionMismatch("slice is missing a value for '" + region.keep[i] + "'");
        point[i] = it->second;
    }
    if (sweep_idx < 0) throw DimensionMismatch("sweep variable '" + sweep + "' is not kept");

    std::vector<SlicePoint> out;
    for (double v = from; v <= to + 1e-12; v += step) {
        point[sweep_idx] = v;
        out.push_back({v, is_member(region, point)});
    }
    return out;
}

}  // namespace mdlab::region
