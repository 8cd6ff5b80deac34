#ifndef MDLAB_REGION_HPP
#define MDLAB_REGION_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdlab/errors.hpp"
#include "mdlab/pmf.hpp"

namespace mdlab::region {

// Coefficients are exact rationals; only the constant side of a row carries
// floating point (it is built from entropies of the attached pmf).
using Rational = boost::multiprecision::cpp_rational;

enum class Rel { Le, Ge, Eq };

struct LinIneq {
    std::vector<Rational> coeffs;  // dense, aligned with the owning system's variables
    Rel rel = Rel::Le;
    Rational rhs = 0;
    std::string tag;  // provenance: which bound produced the row

    // sum_i coeffs[i] * var_i  REL  rhs
};

// A conjunction of linear inequalities, optionally split into disjunctive
// branches (a point satisfies the system when it satisfies the common rows
// plus all rows of at least one branch). Branches come from the sum-codebook
// covering bound max{r_y, r_z} >= q - H(Y+Z).
struct IneqSystem {
    std::vector<std::string> vars;
    std::vector<LinIneq> common;
    std::vector<std::vector<LinIneq>> branches;

    int var_index(const std::string& name) const;
    std::size_t num_branches() const { return branches.empty() ? 1 : branches.size(); }
};

enum class Membership { Infeasible = 0, Marginal = 1, Feasible = 2 };

inline constexpr double kMembershipTol = 1e-9;
inline constexpr std::size_t kDefaultRowCap = 200000;

// Projection of a system onto the kept variables: a union of polyhedra in
// <= form with exact rational coefficients.
struct RateRegion {
    std::vector<std::string> keep;
    std::vector<std::vector<LinIneq>> disjuncts;  // rows aligned with `keep`
    std::string provenance;
};

// ---------------------------------------------------------------------------
// Codebook layouts
// ---------------------------------------------------------------------------

// Base-layer codebook C_{A,i}: decoded once at least `threshold` of the
// descriptions in `subset` arrive; binned separately onto each description
// in `subset`.
struct BaseCodebook {
    std::vector<int> subset;  // 1-based description indices, sorted
    int threshold = 1;
    std::string var;
};

// Refinement codebook for one description: decoded when that description
// arrives together with at least threshold-1 others; a single bin index is
// carried on its own description.
struct RefineCodebook {
    int threshold = 1;  // in [1 : L-1]
    int desc = 1;
    std::string var;
};

// Generalized codebook with an arbitrary monotone decode condition, given by
// its minimal decoder subsets; binned onto every description.
struct ExtraCodebook {
    std::vector<std::vector<int>> decode_any;  // decoded iff some member is a subset of s
    std::string var;
};

// Per-decoder handling when a decoder must reconstruct the sum Y+Z:
//   Both:    the decoder reconstructs Y and Z; the sum bin rate splits
//            between them (sigma_y + sigma_z = received sum bin rate).
//   One:     the decoder reconstructs exactly one of them; the other is
//            treated as delivered with the sum's bin rate.
//   SumOnly: neither is reconstructed; the sum variable itself joins the
//            decoded set (its pmf entry must exist).
enum class SumCase { Both = 1, One = 2, SumOnly = 3 };

struct SumDecoderCase {
    std::vector<int> decoder;
    SumCase mode = SumCase::SumOnly;
};

struct SumPair {
    std::string y, z;
    std::string sum_var;  // name of Y+Z in the pmf; required for SumOnly
    std::vector<SumDecoderCase> cases;
};

struct CodebookLayout {
    int L = 0;
    std::vector<std::string> sources;  // conditioning variables of the covering bounds
    std::vector<BaseCodebook> base;
    std::vector<RefineCodebook> refine;
    std::vector<ExtraCodebook> extra;
    std::vector<SumPair> sums;  // linear scheme only
};

struct DecoderSpec {
    std::vector<int> subset;  // received descriptions, 1-based
    std::map<std::string, double> distortion;  // carried as metadata
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

// Random-coding system: mutual covering bounds over every nonempty
// sub-collection of codebooks, packing bounds over every 2-partition of the
// codebooks decoded at each decoder, description-rate accounting equalities
// R_j = sum of bin rates on j, and 0 <= rho <= r.
IneqSystem build_cms_system(const CodebookLayout& layout, const prob::JointPmf& pmf,
                            const std::vector<DecoderSpec>& decoders);

// Linear-coding system: same skeleton with every codebook entropy H(V)
// replaced by q - rho'(V), the reduction bounds 0 <= rho'(V) <= q - H(V), and
// the sum-codebook machinery (covering max{r_y, r_z} >= q - H(Y+Z) handled by
// branching, per-decoder cases as configured). q_bits is the log2 of the
// common embedding field size.
IneqSystem build_linear_system(const CodebookLayout& layout, const prob::JointPmf& pmf,
                               const std::vector<DecoderSpec>& decoders, double q_bits);

// ---------------------------------------------------------------------------
// Projection and queries
// ---------------------------------------------------------------------------

// Exact Fourier-Motzkin projection onto `keep`. Equalities are substituted
// first; remaining variables are eliminated one at a time in min-fill order
// (fewest upper x lower pairings, ties by name). Rows that duplicate or are
// dominated by another row are dropped after each step. Throws Blowup if an
// intermediate row count exceeds the cap (MDLAB_ROW_CAP overrides the
// default).
RateRegion fm_eliminate(const IneqSystem& system, const std::vector<std::string>& keep,
                        std::optional<std::size_t> row_cap = std::nullopt);

Membership is_member(const RateRegion& region, const std::vector<double>& point,
                     double tol = kMembershipTol);

// Evaluates a full assignment against every row of the system (all branch
// choices); useful for checking explicit witnesses.
Membership check_assignment(const IneqSystem& system, const std::map<std::string, double>& point,
                            double tol = kMembershipTol);

struct SlicePoint {
    double value = 0.0;
    Membership membership = Membership::Infeasible;
};

std::vector<SlicePoint> sample_slice(const RateRegion& region,
                                     const std::map<std::string, double>& fixed,
                                     const std::string& sweep, double from, double to,
                                     double step);

// ---------------------------------------------------------------------------
// Row utilities (shared by the engine and the fixtures)
// ---------------------------------------------------------------------------

// Row in <= form (Ge rows negated; Eq rows rejected).
LinIneq to_le(const LinIneq& row);

// Nonnegative combination sum_i w_i * row_i of <=-normalized rows.
LinIneq combine_rows(const IneqSystem& system, const std::vector<std::pair<std::size_t, Rational>>& weights);

// Divides a row by the positive content of its coefficient vector.
void normalize_row(LinIneq& row);

// Index of the first common row whose tag contains `needle`; -1 if none.
int find_row(const IneqSystem& system, const std::string& needle);

double to_double(const Rational& q);

}  // namespace mdlab::region

#endif
