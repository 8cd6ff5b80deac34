#ifndef MDLAB_PMF_HPP
#define MDLAB_PMF_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mdlab/errors.hpp"

namespace mdlab::prob {

// Mass below this is treated as an exact zero when deciding support.
inline constexpr double kZeroEps = 1e-15;
// Threshold above which a cell counts as a supported edge in the
// common-function connectivity graph.
inline constexpr double kSupportEps = 1e-12;
// Normalization slack accepted by validate().
inline constexpr double kNormTol = 1e-12;

// Joint alphabet size cap: dense tables only, desk-scale alphabets.
inline constexpr std::uint64_t kMaxCells = std::uint64_t(1) << 24;

struct Variable {
    std::string name;
    int size = 0;  // alphabet size, >= 1
};

// Finite joint distribution over named variables. The table is dense, in
// joint lexicographic order with the first-listed variable slowest-varying.
class JointPmf {
   public:
    JointPmf() = default;
    JointPmf(std::vector<Variable> variables, std::vector<double> probs);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t num_cells() const { return probs_.size(); }

    // Index of a named variable; throws UnknownVariable.
    int var_index(const std::string& name) const;
    std::vector<int> var_indices(const std::vector<std::string>& names) const;

    // Digits of a flat cell index, one digit per variable (same order as
    // variables()).
    void decode(std::uint64_t cell, std::vector<int>& digits) const;

    // Marginal table over the given variable indices, in the mixed-radix
    // order induced by `idx` (first entry slowest-varying).
    std::vector<double> marginal(const std::vector<int>& idx) const;

   private:
    std::vector<Variable> variables_;
    std::vector<double> probs_;
    std::vector<std::uint64_t> strides_;
};

// Confirms the invariants: nonnegative entries, normalization within
// kNormTol, table length equal to the product of alphabet sizes.
// Throws NegativeMass, NotNormalized or ShapeMismatch.
void validate(const JointPmf& pmf);

// Shannon entropy H(vars) in bits, with 0 log 0 := 0.
double entropy(const JointPmf& pmf, const std::vector<std::string>& vars);

// Conditional entropy H(a | b) = H(a,b) - H(b). `b` may be empty.
double conditional_entropy(const JointPmf& pmf, const std::vector<std::string>& a,
                           const std::vector<std::string>& b);

// I(A;B|C) in bits, clamped to >= 0. `c` may be empty. The three sets must be
// pairwise disjoint and A, B nonempty.
double mutual_information(const JointPmf& pmf, const std::vector<std::string>& a,
                          const std::vector<std::string>& b,
                          const std::vector<std::string>& c = {});

// h_b(p) in bits; throws OutOfRange unless 0 <= p <= 1.
double binary_entropy(double p);

// Binary convolution a*b = a(1-b) + b(1-a); throws OutOfRange outside [0,1].
double binary_convolve(double a, double b);

struct MarkovResult {
    bool holds = false;
    double deviation = 0.0;  // I(A;C|B) in bits
};

// Tests the chain A <-> B <-> C, i.e. I(A;C|B) <= tol.
MarkovResult is_markov(const JointPmf& pmf, const std::vector<std::string>& a,
                       const std::vector<std::string>& b, const std::vector<std::string>& c,
                       double tol);

struct CommonFunctionResult {
    bool exists = false;           // true iff some b admits non-constant f_b(C) = g_b(D) a.s.
    std::vector<bool> per_b;       // indexed by the joint assignment of B
    std::vector<double> b_mass;    // marginal mass of each b
};

// For each assignment b of B with positive mass, builds the bipartite graph
// on supported values of C and D (edge when p(b,c,d) > support_eps) and
// checks whether it splits into >= 2 connected components among
// positive-probability vertices. A split is exactly the existence of
// non-constant common functions f_b(C) = g_b(D) holding with probability 1.
// Assignments b with zero marginal mass are skipped.
CommonFunctionResult common_function_exists(const JointPmf& pmf,
                                            const std::vector<std::string>& b,
                                            const std::vector<std::string>& c,
                                            const std::vector<std::string>& d,
                                            double support_eps = kSupportEps);

struct ImplicationResult {
    bool hypotheses_hold = false;
    bool conclusion_holds = false;
    double conclusion_deviation = 0.0;
};

// Merge criterion for two one-sided chains (lemma2 checker):
//   hypotheses: I(A;D|B,C) <= tol, I(A;C|B,D) <= tol, and no common function
//               between C and D given B;
//   conclusion: I(A;C,D|B) <= tol.
ImplicationResult check_lemma2(const JointPmf& pmf, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               const std::vector<std::string>& d, double tol);

// Three short chains imply the long chain (lemma3 checker):
//   hypotheses: I(A;D|B,C) <= tol, I(A;C|B) <= tol, I(B;D|C) <= tol;
//   conclusion: I(A;C,D|B) <= tol and I(A,B;D|C) <= tol.
ImplicationResult check_lemma3(const JointPmf& pmf, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::vector<std::string>& c,
                               const std::vector<std::string>& d, double tol);

}  // namespace mdlab::prob

#endif
