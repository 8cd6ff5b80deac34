#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mdlab/json_io.hpp"
#include "mdlab/pmf.hpp"
#include "mdlab/region.hpp"

using namespace mdlab;
using namespace mdlab::region;
using mdlab::test::pmf_from_fn;
using prob::JointPmf;

namespace {

double h_b(double p) { return prob::binary_entropy(p); }

// Joint law used by the Lemma-1 style fixtures: random full support over one
// source bit and four auxiliary bits.
JointPmf lemma1_pmf(std::uint64_t seed) {
    BlockRng rng(seed, 0x11);
    return pmf_from_fn({{"X", 2}, {"V", 2}, {"U1", 2}, {"U2", 2}, {"U0", 2}},
                       [&](const std::vector<int>&) { return 0.05 + rng.canonical(); });
}

CodebookLayout lemma1_layout() {
    CodebookLayout lay;
    lay.L = 2;
    lay.sources = {"X"};
    lay.base = {{{1, 2}, 1, "V"}};
    lay.refine = {{1, 1, "U1"}, {1, 2, "U2"}};
    lay.extra = {{{{1, 2}}, "U0"}};
    return lay;
}

std::vector<DecoderSpec> lemma1_decoders() { return {{{1}, {}}, {{2}, {}}, {{1, 2}, {}}}; }

// Test channels of the three-descriptions construction: independent uniform
// U1, U2; X and Z are noisy views; U3 (and U23) equal U1 + U2.
JointPmf three_desc_pmf(double delta, bool with_u23) {
    std::vector<prob::Variable> vars = {{"X", 2}, {"Z", 2}, {"U1", 2}, {"U2", 2}, {"U3", 2}};
    if (with_u23) vars.push_back({"U23", 2});
    return pmf_from_fn(std::move(vars), [&](const std::vector<int>& t) {
        int x = t[0], z = t[1], u1 = t[2], u2 = t[3], u3 = t[4];
        if (u3 != (u1 ^ u2)) return 0.0;
        if (with_u23 && t[5] != u3) return 0.0;
        double px = (x == u1) ? 1.0 - delta : delta;
        double pz = (z == u2) ? 1.0 - delta : delta;
        return 0.25 * px * pz;
    });
}

// Four-descriptions test channels: Z uniform, X = Z + Be(delta - lambda),
// U1/U4 noisy views of X/Z, W2/W3 the corresponding noises, S = U1 + U4.
JointPmf four_desc_pmf(double delta, double lambda) {
    return pmf_from_fn(
        {{"X", 2}, {"Z", 2}, {"U1", 2}, {"U4", 2}, {"W2", 2}, {"W3", 2}, {"S", 2}},
        [&](const std::vector<int>& t) {
            int x = t[0], z = t[1], u1 = t[2], u4 = t[3], w2 = t[4], w3 = t[5], s = t[6];
            if (w2 != (x ^ u1) || w3 != (z ^ u4) || s != (u1 ^ u4)) return 0.0;
            double pe = (x == z) ? 1.0 - (delta - lambda) : delta - lambda;
            double pa = (w2 == 1) ? delta : 1.0 - delta;
            double pb = (w3 == 1) ? delta : 1.0 - delta;
            return 0.5 * pe * pa * pb;
        });
}

int count_tag(const IneqSystem& sys, const std::string& needle) {
    int n = 0;
    for (const auto& row : sys.common)
        if (row.tag.find(needle) != std::string::npos) ++n;
    return n;
}

}  // namespace

TEST_CASE("full two-descriptions layout emits 63 covering bounds") {
    // 4 base codebooks (A = {1}, {2}, and two thresholds for {1,2}) plus one
    // refinement codebook per description: 6 codebooks, 2^6 - 1 covers.
    CodebookLayout lay;
    lay.L = 2;
    lay.sources = {"X"};
    lay.base = {{{1}, 1, "V1"}, {{2}, 1, "V2"}, {{1, 2}, 1, "V12a"}, {{1, 2}, 2, "V12b"}};
    lay.refine = {{1, 1, "U1"}, {1, 2, "U2"}};
    auto pmf = mdlab::test::random_pmf({2, 2, 2, 2, 2, 2, 2}, 3);
    // Rename V0..V6 -> layout names.
    std::vector<prob::Variable> vars = {{"X", 2},    {"V1", 2},  {"V2", 2}, {"V12a", 2},
                                        {"V12b", 2}, {"U1", 2}, {"U2", 2}};
    JointPmf named(vars, pmf.probs());
    auto sys = build_cms_system(lay, named, {{{1}, {}}, {{2}, {}}, {{1, 2}, {}}});
    CHECK(count_tag(sys, "cover{") == 63);
    // Decoded sets: {V1, V12a, U1} at decoder 1, {V2, V12a, U2} at decoder 2,
    // all six at decoder 12.
    CHECK(count_tag(sys, "pack{s=1;") == 7);
    CHECK(count_tag(sys, "pack{s=2;") == 7);
    CHECK(count_tag(sys, "pack{s=12;") == 63);
    CHECK(count_tag(sys, "rate[") == 2);
}

TEST_CASE("single codebook at a single decoder reduces to r <= rho") {
    CodebookLayout lay;
    lay.L = 1;
    lay.sources = {"X"};
    lay.base = {{{1}, 1, "U"}};
    auto pmf = pmf_from_fn({{"X", 2}, {"U", 2}}, [](const std::vector<int>& t) {
        return t[0] == t[1] ? 0.4 : 0.1;
    });
    auto sys = build_cms_system(lay, pmf, {{{1}, {}}});
    int idx = find_row(sys, "pack{s=1;P1=U}");
    REQUIRE(idx >= 0);
    const auto& row = sys.common[idx];
    // H(U) <= H(U) + rho - r, i.e. r - rho <= 0 with the entropies cancelling.
    CHECK(row.coeffs[sys.var_index("r[U]")] == Rational(1));
    CHECK(row.coeffs[sys.var_index("rho[U,1]")] == Rational(-1));
    CHECK(std::abs(to_double(row.rhs)) <= 1e-12);
}

TEST_CASE("lemma-1 fixture: packing (1)-(3) plus covering (4) force the mutual-information row") {
    auto pmf = lemma1_pmf(42);
    auto sys = build_cms_system(lemma1_layout(), pmf, lemma1_decoders());

    int r1 = find_row(sys, "pack{s=1;P1=V,U1}");
    int r2 = find_row(sys, "pack{s=2;P1=V,U2}");
    int r3 = find_row(sys, "pack{s=12;P1=U0}");
    int r4 = find_row(sys, "cover{V,U1,U2,U0}");
    REQUIRE(r1 >= 0);
    REQUIRE(r2 >= 0);
    REQUIRE(r3 >= 0);
    REQUIRE(r4 >= 0);

    double i_u1u2_given_v = prob::mutual_information(pmf, {"U1"}, {"U2"}, {"V"});
    double i_all_x = prob::mutual_information(pmf, {"V", "U1", "U2", "U0"}, {"X"});
    CHECK(i_u1u2_given_v > 1e-3);  // generic pmf

    // Route 1: direct nonnegative combination (1) + (2) + (3) - (4).
    auto combo = combine_rows(sys, {{static_cast<std::size_t>(r1), Rational(1)},
                                    {static_cast<std::size_t>(r2), Rational(1)},
                                    {static_cast<std::size_t>(r3), Rational(1)},
                                    {static_cast<std::size_t>(r4), Rational(1)}});
    // Coefficients: +1 on r[V], -1 on each of the six received bin rates, and
    // zero on every other pool rate.
    CHECK(combo.coeffs[sys.var_index("r[V]")] == Rational(1));
    for (const char* name : {"r[U1]", "r[U2]", "r[U0]"})
        CHECK(combo.coeffs[sys.var_index(name)] == Rational(0));
    for (const char* name :
         {"rho[V,1]", "rho[V,2]", "rho[U1,1]", "rho[U2,2]", "rho[U0,1]", "rho[U0,2]"})
        CHECK(combo.coeffs[sys.var_index(name)] == Rational(-1));
    // The six bin rates sum to R1 + R2; at the optimal operating point that
    // equals I(V,U1,U2,U0;X), leaving r[V] <= -I(U1;U2|V).
    CHECK(to_double(combo.rhs) + i_all_x == doctest::Approx(-i_u1u2_given_v).epsilon(1e-9));

    // Route 2: Fourier-Motzkin elimination of everything except r[V], with
    // the rate accounting and the optimality constraint joined in.
    IneqSystem fixture;
    fixture.vars = sys.vars;
    fixture.common = {sys.common[r1], sys.common[r2], sys.common[r3], sys.common[r4]};
    int a1 = find_row(sys, "rate[1]");
    int a2 = find_row(sys, "rate[2]");
    REQUIRE(a1 >= 0);
    REQUIRE(a2 >= 0);
    fixture.common.push_back(sys.common[a1]);
    fixture.common.push_back(sys.common[a2]);
    LinIneq opt;
    opt.coeffs.assign(sys.vars.size(), 0);
    opt.rel = Rel::Eq;
    opt.coeffs[sys.var_index("R1")] = 1;
    opt.coeffs[sys.var_index("R2")] = 1;
    opt.rhs = Rational(i_all_x);
    opt.tag = "ptp-optimality";
    fixture.common.push_back(std::move(opt));

    auto reg = fm_eliminate(fixture, {"r[V]"});
    REQUIRE(reg.disjuncts.size() == 1);
    REQUIRE(reg.disjuncts[0].size() == 1);
    const auto& row = reg.disjuncts[0][0];
    CHECK(row.coeffs[0] == Rational(1));
    CHECK(to_double(row.rhs) == doctest::Approx(-i_u1u2_given_v).epsilon(1e-9));
    // I > 0 forces r[V] < 0: no nonnegative pool rate survives.
    CHECK(is_member(reg, {0.0}) == Membership::Infeasible);
}

TEST_CASE("three-descriptions reduction: the projected R3 lower bound") {
    double delta = 0.2;
    auto pmf = three_desc_pmf(delta, true);
    CodebookLayout lay;
    lay.L = 3;
    lay.sources = {"X", "Z"};
    lay.refine = {{1, 1, "U1"}, {1, 2, "U2"}, {1, 3, "U3"}, {2, 3, "U23"}};
    std::vector<DecoderSpec> decs = {{{1}, {}}, {{2}, {}}, {{3}, {}},
                                     {{1, 2}, {}}, {{1, 3}, {}}, {{2, 3}, {}}};
    auto sys = build_cms_system(lay, pmf, decs);

    // Assemble the reduction: the decoder-13 packing bound over all decoded
    // codebooks, the covering bound on everything, rate accounting, the
    // bin-equals-pool consequences, and the decoder-1/2 operating points.
    int pack13 = find_row(sys, "pack{s=13;P1=U1,U3,U23}");
    int cover = find_row(sys, "cover{U1,U2,U3,U23}");
    REQUIRE(pack13 >= 0);
    REQUIRE(cover >= 0);
    IneqSystem fixture;
    fixture.vars = sys.vars;
    fixture.common = {sys.common[pack13], sys.common[cover]};
    for (int j = 1; j <= 3; ++j) {
        int a = find_row(sys, "rate[" + std::to_string(j) + "]");
        REQUIRE(a >= 0);
        fixture.common.push_back(sys.common[a]);
    }
    auto add_eq = [&](const std::string& var, const std::string& var2, double c) {
        LinIneq eq;
        eq.coeffs.assign(sys.vars.size(), 0);
        eq.rel = Rel::Eq;
        eq.coeffs[sys.var_index(var)] = 1;
        if (!var2.empty()) eq.coeffs[sys.var_index(var2)] = -1;
        eq.rhs = Rational(c);
        eq.tag = "fixture-eq";
        fixture.common.push_back(std::move(eq));
    };
    add_eq("rho[U1,1]", "r[U1]", 0.0);
    add_eq("rho[U2,2]", "r[U2]", 0.0);
    add_eq("rho[U3,3]", "r[U3]", 0.0);
    add_eq("r[U1]", "", prob::mutual_information(pmf, {"U1"}, {"X", "Z"}));
    add_eq("r[U2]", "", prob::mutual_information(pmf, {"U2"}, {"X", "Z"}));

    auto reg = fm_eliminate(fixture, {"R3"});
    double target = prob::mutual_information(pmf, {"U3", "U23"}, {"X", "Z", "U1", "U2"}) -
                    prob::mutual_information(pmf, {"U1"}, {"U3", "U23"});
    // Tightest derived lower bound on R3.
    double lower = -1e300;
    REQUIRE(reg.disjuncts.size() == 1);
    for (const auto& row : reg.disjuncts[0]) {
        if (row.coeffs[0] < 0) lower = std::max(lower, to_double(row.rhs / row.coeffs[0]));
    }
    CHECK(lower == doctest::Approx(target).epsilon(1e-9));
    // At these test channels U3 carries one fresh bit: the bound exceeds the
    // single-description rate 1 - h_b(delta).
    CHECK(lower >= 1.0 - h_b(delta) - 1e-9);
    CHECK(lower == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linear system: reduction bounds and degenerate q") {
    auto pmf = lemma1_pmf(7);
    auto sys = build_linear_system(lemma1_layout(), pmf, lemma1_decoders(), 1.0);
    // Full-entropy variables admit no reduction: rhop <= q - H(V).
    for (const char* v : {"V", "U1", "U2", "U0"}) {
        int idx = find_row(sys, std::string("reduction-ub{") + v + "}");
        REQUIRE(idx >= 0);
        double ub = to_double(sys.common[idx].rhs);
        CHECK(ub == doctest::Approx(1.0 - prob::entropy(pmf, {v})).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_linear_system(lemma1_layout(), pmf, lemma1_decoders(), 0.8),
                    QTooSmall);
    CHECK_THROWS_AS(build_linear_system(lemma1_layout(), pmf, lemma1_decoders(), -1.0),
                    QTooSmall);
}

TEST_CASE("layout validation errors") {
    auto pmf = lemma1_pmf(8);
    auto lay = lemma1_layout();
    auto decs = lemma1_decoders();

    auto bad_var = lay;
    bad_var.base[0].var = "missing";
    CHECK_THROWS_AS(build_cms_system(bad_var, pmf, decs), LayoutMismatch);

    auto bad_thresh = lay;
    bad_thresh.base[0].threshold = 3;
    CHECK_THROWS_AS(build_cms_system(bad_thresh, pmf, decs), LayoutMismatch);

    auto sums = lay;
    sums.sums.push_back({"U1", "U2", "", {}});
    CHECK_THROWS_AS(build_cms_system(sums, pmf, decs), LayoutMismatch);

    auto missing_sum = lay;
    missing_sum.sums.push_back({"U1", "U2", "", {{{1, 2}, SumCase::SumOnly}}});
    CHECK_THROWS_AS(build_linear_system(missing_sum, pmf, decs, 1.0), MissingSumVariable);

    CHECK_THROWS_AS(build_cms_system(lay, pmf, {}), LayoutMismatch);
    CHECK_THROWS_AS(build_cms_system(lay, pmf, {{{1, 5}, {}}}), LayoutMismatch);
}

TEST_CASE("remark-1 equivalence: pinned reductions reproduce the CMS region") {
    struct Fixture {
        CodebookLayout lay;
        JointPmf pmf;
        std::vector<DecoderSpec> decs;
        std::vector<std::string> keep;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({lemma1_layout(), lemma1_pmf(12), lemma1_decoders(), {"R1", "R2"}});
    {
        CodebookLayout lay;
        lay.L = 3;
        lay.sources = {"X", "Z"};
        lay.refine = {{1, 1, "U1"}, {1, 2, "U2"}, {1, 3, "U3"}, {2, 3, "U23"}};
        fixtures.push_back({lay, three_desc_pmf(0.2, true),
                            {{{1}, {}}, {{2}, {}}, {{3}, {}}, {{1, 2}, {}}, {{1, 3}, {}}, {{2, 3}, {}}},
                            {"R1", "R2", "R3"}});
    }

    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        const auto& fx = fixtures[f];
        auto cms = build_cms_system(fx.lay, fx.pmf, fx.decs);
        auto lin = build_linear_system(fx.lay, fx.pmf, fx.decs, 1.0);
        // Pin every reduction variable at its upper bound q - H(V).
        for (std::size_t v = 0; v < lin.vars.size(); ++v) {
            const auto& name = lin.vars[v];
            if (name.rfind("rhop[", 0) != 0) continue;
            std::string var = name.substr(5, name.size() - 6);
            LinIneq eq;
            eq.coeffs.assign(lin.vars.size(), 0);
            eq.rel = Rel::Eq;
            eq.coeffs[v] = 1;
            eq.rhs = Rational(1.0 - prob::entropy(fx.pmf, {var}));
            eq.tag = "pin";
            lin.common.push_back(std::move(eq));
        }
        auto cms_reg = fm_eliminate(cms, fx.keep);
        auto lin_reg = fm_eliminate(lin, fx.keep);

        BlockRng rng(900 + f, 0);
        int agree_feasible = 0, agree_infeasible = 0;
        for (int t = 0; t < 250; ++t) {
            std::vector<double> point(fx.keep.size());
            for (auto& x : point) x = 2.2 * rng.canonical() - 0.1;
            bool in_cms = is_member(cms_reg, point) != Membership::Infeasible;
            bool in_lin = is_member(lin_reg, point) != Membership::Infeasible;
            CHECK(in_cms == in_lin);
            (in_cms ? agree_feasible : agree_infeasible)++;
        }
        CHECK(agree_feasible > 0);
        CHECK(agree_infeasible > 0);
    }
}

TEST_CASE("three-descriptions witness is feasible in the linear system") {
    double delta = 0.2;
    double r = 1.0 - h_b(delta);
    auto pmf = three_desc_pmf(delta, false);
    CodebookLayout lay;
    lay.L = 3;
    lay.sources = {"X", "Z"};
    lay.refine = {{1, 1, "U1"}, {1, 2, "U2"}};
    lay.sums = {{"U1", "U2", "U3",
                 {{{3}, SumCase::SumOnly}, {{1, 3}, SumCase::One}, {{2, 3}, SumCase::One}}}};
    std::vector<DecoderSpec> decs = {{{1}, {}}, {{2}, {}}, {{3}, {}},
                                     {{1, 2}, {}}, {{1, 3}, {}}, {{2, 3}, {}}};
    auto sys = build_linear_system(lay, pmf, decs, 1.0);
    CHECK(sys.branches.size() == 2);

    std::map<std::string, double> witness = {
        {"R1", r}, {"R2", r}, {"R3", r},
        {"r[U1]", r}, {"r[U2]", r},
        {"rho[U1,1]", r}, {"rho[U2,2]", r},
        {"rhop[U1]", 0.0}, {"rhop[U2]", 0.0},
        {"rho[U1+U2,1]", 0.0}, {"rho[U1+U2,2]", 0.0}, {"rho[U1+U2,3]", r},
        {"rhop[U1+U2]", 0.0},
    };
    CHECK(check_assignment(sys, witness) != Membership::Infeasible);

    auto reg = fm_eliminate(sys, {"R1", "R2", "R3"});
    CHECK(is_member(reg, {r, r, r}) != Membership::Infeasible);
    // Interior needs R1 > R3: the sum-codebook bins ride on the pool of one
    // side, so R3 tracks that pool while R1 also carries its own index.
    CHECK(is_member(reg, {r + 0.10, r + 0.08, r + 0.05}) == Membership::Feasible);
    // The region genuinely excludes cheaper sum descriptions.
    CHECK(is_member(reg, {r, r, r - 0.02}) == Membership::Infeasible);
    CHECK(is_member(reg, {r - 0.02, r, r}) == Membership::Infeasible);
    CHECK(is_member(reg, {0.0, 0.0, 0.0}) == Membership::Infeasible);
}

TEST_CASE("four-descriptions witness is feasible in the linear system") {
    double delta = 0.11, lambda = 0.03;
    double r1 = 1.0 - h_b(delta), r2 = h_b(delta);
    auto pmf = four_desc_pmf(delta, lambda);
    prob::validate(pmf);
    CodebookLayout lay;
    lay.L = 4;
    lay.sources = {"X", "Z"};
    lay.refine = {{1, 1, "U1"}, {1, 2, "W2"}, {1, 3, "W3"}, {1, 4, "U4"}};
    lay.sums = {{"U1", "U4", "S", {{{2, 3}, SumCase::SumOnly}}}};
    std::vector<DecoderSpec> decs = {{{1}, {}}, {{4}, {}}, {{1, 2}, {}}, {{3, 4}, {}}, {{2, 3}, {}}};
    auto sys = build_linear_system(lay, pmf, decs, 1.0);

    std::map<std::string, double> witness = {
        {"R1", r1}, {"R2", r2}, {"R3", r2}, {"R4", r1},
        {"r[U1]", r1}, {"r[U4]", r1}, {"r[W2]", r2}, {"r[W3]", r2},
        {"rho[U1,1]", r1}, {"rho[U4,4]", r1}, {"rho[W2,2]", r2}, {"rho[W3,3]", r2},
        {"rhop[U1]", 0.0}, {"rhop[U4]", 0.0}, {"rhop[W2]", r1}, {"rhop[W3]", r1},
        {"rho[U1+U4,1]", 0.0}, {"rho[U1+U4,2]", 0.0}, {"rho[U1+U4,3]", 0.0},
        {"rho[U1+U4,4]", 0.0}, {"rhop[U1+U4]", 0.0},
    };
    CHECK(check_assignment(sys, witness) != Membership::Infeasible);

    auto reg = fm_eliminate(sys, {"R1", "R2", "R3", "R4"});
    CHECK(is_member(reg, {r1, r2, r2, r1}) != Membership::Infeasible);
    CHECK(is_member(reg, {r1 + 0.03, r2 + 0.03, r2 + 0.03, r1 + 0.03}) == Membership::Feasible);
    // Dropping a noise description below h_b(delta) must leave the region:
    // decoder 12 then cannot disambiguate the noise codebook.
    CHECK(is_member(reg, {r1, r2 - 0.02, r2, r1}) == Membership::Infeasible);
}

TEST_CASE("systems and regions round-trip through JSON") {
    auto pmf = lemma1_pmf(5);
    auto sys = build_cms_system(lemma1_layout(), pmf, lemma1_decoders());
    auto j = io::to_json(sys);
    auto back = io::system_from_json(j);
    REQUIRE(back.vars == sys.vars);
    REQUIRE(back.common.size() == sys.common.size());
    for (std::size_t i = 0; i < sys.common.size(); ++i) {
        CHECK(back.common[i].coeffs == sys.common[i].coeffs);
        CHECK(back.common[i].rel == sys.common[i].rel);
        CHECK(back.common[i].rhs == sys.common[i].rhs);
    }
    auto reg = fm_eliminate(sys, {"R1", "R2"});
    auto reg_back = io::region_from_json(io::to_json(reg));
    BlockRng rng(31, 0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> p = {3 * rng.canonical(), 3 * rng.canonical()};
        CHECK(is_member(reg, p) == is_member(reg_back, p));
    }
}
