// mdlab: simulate the two linear-code multiple-descriptions schemes, search
// for good short binary codes, build/project/query achievable-rate inequality
// systems, run the conditional-independence checkers, and emit the
// constructed pair distortion.
//
// Exit codes: 0 success (or feasible/marginal point, passing check),
//             1 infeasible point or failed check,
//             2 usage error,
//             3 input error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mdlab/distortion.hpp"
#include "mdlab/gf2.hpp"
#include "mdlab/json_io.hpp"
#include "mdlab/pmf.hpp"
#include "mdlab/region.hpp"
#include "mdlab/rng.hpp"
#include "mdlab/schemes.hpp"

namespace {

constexpr const char* kVersion = "mdlab 0.1.0";

using mdlab::io::json;

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char ch;
    while (in.get(ch)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    // The manifest sits beside the primary output so reruns stay
    // byte-identical in the output itself.
    void write_beside(const std::string& out_path) const {
        json inputs_json = json::object();
        for (const auto& p : inputs) {
            std::ostringstream hex;
            hex << "fnv1a:" << std::hex << fnv1a_file(p);
            inputs_json[p] = hex.str();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        json m = {{"command", command},
                  {"argv", argv},
                  {"version", kVersion},
                  {"inputs", inputs_json},
                  {"duration_ms", ms}};
        if (seed) m["seed"] = *seed;
        mdlab::io::write_text_file(out_path + ".manifest.json", m.dump(2) + "\n");
    }
};

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> parse_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::map<std::string, double> parse_assignments(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--fix expects NAME=VALUE pairs");
        out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return out;
}

void parse_range(const std::string& s, double& from, double& to, double& step) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
        throw CLI::ValidationError("--range expects FROM:TO:STEP");
    from = std::stod(a);
    to = std::stod(b);
    step = std::stod(c);
}

// Random factorized chain p(a)p(b|a)p(c|b)p(d|c) over bits (checker fixture).
mdlab::prob::JointPmf random_long_chain(std::uint64_t seed) {
    mdlab::BlockRng rng(seed, 1);
    double pa = 0.05 + 0.9 * rng.canonical();
    double pb[2], pc[2], pd[2];
    for (int i = 0; i < 2; ++i) {
        pb[i] = 0.05 + 0.9 * rng.canonical();
        pc[i] = 0.05 + 0.9 * rng.canonical();
        pd[i] = 0.05 + 0.9 * rng.canonical();
    }
    auto bern = [](double p, int v) { return v ? p : 1.0 - p; };
    std::vector<double> probs(16);
    for (int cell = 0; cell < 16; ++cell) {
        int a = cell >> 3 & 1, b = cell >> 2 & 1, c = cell >> 1 & 1, d = cell & 1;
        probs[cell] = bern(pa, a) * bern(pb[a], b) * bern(pc[b], c) * bern(pd[c], d);
    }
    return mdlab::prob::JointPmf({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, std::move(probs));
}

// Random branch chain p(b)p(a|b)p(c,d|b) with full support.
mdlab::prob::JointPmf random_branch_chain(std::uint64_t seed) {
    mdlab::BlockRng rng(seed, 2);
    double pb = 0.05 + 0.9 * rng.canonical();
    double pa[2], pcd[2][4];
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
    std::vector<double> probs(16);
    for (int cell = 0; cell < 16; ++cell) {
        int a = cell >> 3 & 1, b = cell >> 2 & 1, c = cell >> 1 & 1, d = cell & 1;
        probs[cell] = bern(pb, b) * bern(pa[b], a) * pcd[b][2 * c + d];
    }
    return mdlab::prob::JointPmf({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, std::move(probs));
}

// Fully random full-support pmf over four bits.
mdlab::prob::JointPmf random_full_support(std::uint64_t seed) {
    mdlab::BlockRng rng(seed, 3);
    std::vector<double> probs(16);
    double total = 0.0;
    for (auto& p : probs) {
        p = 0.02 + rng.canonical();
        total += p;
    }
    for (auto& p : probs) p /= total;
    return mdlab::prob::JointPmf({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, std::move(probs));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear-code multiple-descriptions laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::vector<std::string> raw_args(argv, argv + argc);

    // ---- simulate ------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "run a scheme end to end");
    simulate->require_subcommand(1);
    struct SimArgs {
        double delta = 0.1, lambda = 0.03;
        int n = 16, k = 8, threads = 1, trials = 200;
        std::uint64_t blocks = 10000, seed = 0;
        std::string code_file, out_file, csv_file;
    } sim;
    auto add_sim_flags = [&](CLI::App* cmd, bool four) {
        cmd->add_option("--delta", sim.delta, "test-channel crossover")->required();
        if (four) cmd->add_option("--lambda", sim.lambda, "source correlation margin");
        cmd->add_option("--n", sim.n, "blocklength");
        cmd->add_option("--k", sim.k, "code dimension");
        cmd->add_option("--blocks", sim.blocks, "number of simulated blocks");
        cmd->add_option("--seed", sim.seed, "RNG seed");
        cmd->add_option("--code", sim.code_file, "code JSON file (searched from seed when absent)");
        cmd->add_option("--trials", sim.trials, "search trials when no --code is given");
        cmd->add_option("--threads", sim.threads, "worker threads");
        cmd->add_option("--out", sim.out_file, "report JSON path");
        cmd->add_option("--csv", sim.csv_file, "per-decoder CSV path");
    };
    auto* sim3 = simulate->add_subcommand("three-desc", "two independent fair sources, XOR third description");
    add_sim_flags(sim3, false);
    auto* sim4 = simulate->add_subcommand("four-desc", "correlated sources, raw-noise descriptions");
    add_sim_flags(sim4, true);

    // ---- code ----------------------------------------------------------------
    auto* code_cmd = app.add_subcommand("code", "binary linear code tools");
    code_cmd->require_subcommand(1);
    struct CodeArgs {
        int n = 16, k = 8, trials = 500, threads = 1;
        std::string criterion = "source", out_file;
        double crossover = 0.1;
        std::uint64_t seed = 0;
    } ca;
    auto* search = code_cmd->add_subcommand("search", "random search over full-rank generators");
    search->add_option("--n", ca.n)->required();
    search->add_option("--k", ca.k)->required();
    search->add_option("--trials", ca.trials);
    search->add_option("--criterion", ca.criterion)->check(CLI::IsMember({"source", "channel", "both"}));
    search->add_option("--crossover", ca.crossover);
    search->add_option("--seed", ca.seed);
    search->add_option("--threads", ca.threads);
    search->add_option("--out", ca.out_file);

    // ---- region ----------------------------------------------------------------
    auto* region_cmd = app.add_subcommand("region", "achievable-rate inequality systems");
    region_cmd->require_subcommand(1);
    struct RegionArgs {
        std::string setup_file, scheme = "cms", system_file, region_file;
        std::string keep, point, fix, sweep, range, out_file;
    } ra;
    auto* rbuild = region_cmd->add_subcommand("build", "layout + pmf -> inequality system");
    rbuild->add_option("--setup", ra.setup_file)->required();
    rbuild->add_option("--scheme", ra.scheme)->check(CLI::IsMember({"cms", "linear"}));
    rbuild->add_option("--out", ra.out_file)->required();
    auto* rproject = region_cmd->add_subcommand("project", "Fourier-Motzkin projection");
    rproject->add_option("--system", ra.system_file)->required();
    rproject->add_option("--keep", ra.keep)->required();
    rproject->add_option("--out", ra.out_file)->required();
    auto* rmember = region_cmd->add_subcommand("member", "membership of a rate point");
    rmember->add_option("--region", ra.region_file)->required();
    rmember->add_option("--point", ra.point)->required();
    auto* rslice = region_cmd->add_subcommand("slice", "sweep one rate, emit CSV");
    rslice->add_option("--region", ra.region_file)->required();
    rslice->add_option("--fix", ra.fix);
    rslice->add_option("--sweep", ra.sweep)->required();
    rslice->add_option("--range", ra.range)->required();
    rslice->add_option("--out", ra.out_file)->required();

    // ---- check -----------------------------------------------------------------
    auto* check_cmd = app.add_subcommand("check", "conditional-independence checkers");
    check_cmd->require_subcommand(1);
    struct CheckArgs {
        std::string dist_file, a = "A", b = "B", c = "C", d = "D";
        double tol = 1e-9;
        std::uint64_t random_n = 0, seed = 0;
    } ck;
    auto add_check_flags = [&](CLI::App* cmd) {
        cmd->add_option("--dist", ck.dist_file, "pmf JSON file");
        cmd->add_option("--A", ck.a);
        cmd->add_option("--B", ck.b);
        cmd->add_option("--C", ck.c);
        cmd->add_option("--D", ck.d);
        cmd->add_option("--tol", ck.tol);
        cmd->add_option("--random", ck.random_n, "number of randomized trials");
        cmd->add_option("--seed", ck.seed);
    };
    auto* lemma2 = check_cmd->add_subcommand("lemma2", "common-function merge criterion");
    add_check_flags(lemma2);
    auto* lemma3 = check_cmd->add_subcommand("lemma3", "short chains imply the long chain");
    add_check_flags(lemma3);

    // ---- dist -----------------------------------------------------------------
    auto* dist_cmd = app.add_subcommand("dist", "distortion tables");
    dist_cmd->require_subcommand(1);
    struct DistArgs {
        double delta = 0.2, c = 1.0;
        std::string out_file;
    } da;
    auto* makedxz = dist_cmd->add_subcommand("make-dxz", "pair log-ratio distortion table");
    makedxz->add_option("--delta", da.delta)->required();
    makedxz->add_option("--c", da.c);
    makedxz->add_option("--out", da.out_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        // ---- simulate ----------------------------------------------------------
        for (auto* cmd : {sim3, sim4}) {
            if (!cmd->parsed()) continue;
            bool four = (cmd == sim4);
            Manifest man{four ? "simulate four-desc" : "simulate three-desc", raw_args, sim.seed};
            std::optional<mdlab::gf2::LinearCode> code;
            if (!sim.code_file.empty()) {
                man.inputs.push_back(sim.code_file);
                code = mdlab::io::code_from_json(mdlab::io::load_json_file(sim.code_file));
            } else {
                double crossover = four ? sim.delta - sim.lambda : sim.delta;
                auto found = mdlab::gf2::search_code(
                    sim.n, sim.k, sim.trials,
                    four ? mdlab::gf2::SearchCriterion::Channel : mdlab::gf2::SearchCriterion::Source,
                    crossover, sim.seed, sim.threads);
                code = std::move(found.code);
            }
            mdlab::schemes::SchemeReport rep;
            if (four) {
                mdlab::schemes::FourDescConfig cfg{sim.delta, sim.lambda, *code, sim.blocks,
                                                   sim.seed, sim.threads};
                rep = run_monte_carlo(cfg);
            } else {
                mdlab::schemes::ThreeDescConfig cfg{sim.delta, *code, sim.blocks, sim.seed,
                                                    sim.threads};
                rep = run_monte_carlo(cfg);
            }
            json out = mdlab::io::to_json(rep);
            out["code"] = mdlab::io::to_json(*code);
            std::string text = out.dump(2) + "\n";
            if (sim.out_file.empty()) {
                std::cout << text;
            } else {
                mdlab::io::write_text_file(sim.out_file, text);
                man.write_beside(sim.out_file);
            }
            if (!sim.csv_file.empty()) {
                mdlab::io::write_text_file(sim.csv_file, mdlab::io::to_csv(rep));
                man.write_beside(sim.csv_file);
            }
            return 0;
        }

        // ---- code search ---------------------------------------------------------
        if (search->parsed()) {
            Manifest man{"code search", raw_args, ca.seed};
            auto criterion = ca.criterion == "source"   ? mdlab::gf2::SearchCriterion::Source
                             : ca.criterion == "channel" ? mdlab::gf2::SearchCriterion::Channel
                                                         : mdlab::gf2::SearchCriterion::Both;
            auto res = mdlab::gf2::search_code(ca.n, ca.k, ca.trials, criterion, ca.crossover,
                                               ca.seed, ca.threads);
            json out = {{"code", mdlab::io::to_json(res.code)},
                        {"report",
                         {{"avg_distortion", res.report.avg_distortion},
                          {"channel_error_prob", res.report.channel_error_prob},
                          {"crossover", res.report.crossover}}}};
            std::string text = out.dump(2) + "\n";
            if (ca.out_file.empty()) {
                std::cout << text;
            } else {
                mdlab::io::write_text_file(ca.out_file, text);
                man.write_beside(ca.out_file);
            }
            return 0;
        }

        // ---- region ---------------------------------------------------------------
        if (rbuild->parsed()) {
            Manifest man{"region build", raw_args, std::nullopt};
            man.inputs.push_back(ra.setup_file);
            auto setup = mdlab::io::setup_from_json(mdlab::io::load_json_file(ra.setup_file));
            mdlab::prob::validate(setup.pmf);
            auto sys = (ra.scheme == "cms")
                           ? mdlab::region::build_cms_system(setup.layout, setup.pmf, setup.decoders)
                           : mdlab::region::build_linear_system(setup.layout, setup.pmf,
                                                                setup.decoders, setup.q_bits);
            mdlab::io::write_text_file(ra.out_file, mdlab::io::to_json(sys).dump(2) + "\n");
            man.write_beside(ra.out_file);
            std::cerr << "built " << sys.common.size() << " common rows, " << sys.branches.size()
                      << " branches over " << sys.vars.size() << " variables\n";
            return 0;
        }
        if (rproject->parsed()) {
            Manifest man{"region project", raw_args, std::nullopt};
            man.inputs.push_back(ra.system_file);
            auto sys = mdlab::io::system_from_json(mdlab::io::load_json_file(ra.system_file));
            auto reg = mdlab::region::fm_eliminate(sys, parse_names(ra.keep));
            mdlab::io::write_text_file(ra.out_file, mdlab::io::to_json(reg).dump(2) + "\n");
            man.write_beside(ra.out_file);
            std::size_t rows = 0;
            for (const auto& d : reg.disjuncts) rows += d.size();
            std::cerr << "projected to " << reg.keep.size() << " variables, " << rows
                      << " rows in " << reg.disjuncts.size() << " disjunct(s)\n";
            return 0;
        }
        if (rmember->parsed()) {
            auto reg = mdlab::io::region_from_json(mdlab::io::load_json_file(ra.region_file));
            auto m = mdlab::region::is_member(reg, parse_point(ra.point));
            switch (m) {
                case mdlab::region::Membership::Feasible:
                    std::cout << "feasible\n";
                    return 0;
                case mdlab::region::Membership::Marginal:
                    std::cout << "marginal\n";
                    return 0;
                default:
                    std::cout << "infeasible\n";
                    return 1;
            }
        }
        if (rslice->parsed()) {
            Manifest man{"region slice", raw_args, std::nullopt};
            man.inputs.push_back(ra.region_file);
            auto reg = mdlab::io::region_from_json(mdlab::io::load_json_file(ra.region_file));
            double from, to, step;
            parse_range(ra.range, from, to, step);
            auto fixed = ra.fix.empty() ? std::map<std::string, double>{} : parse_assignments(ra.fix);
            auto pts = mdlab::region::sample_slice(reg, fixed, ra.sweep, from, to, step);
            std::ostringstream csv;
            csv << ra.sweep << ",membership\n";
            for (const auto& p : pts)
                csv << p.value << ","
                    << (p.membership == mdlab::region::Membership::Infeasible
                            ? "infeasible"
                            : (p.membership == mdlab::region::Membership::Marginal ? "marginal"
                                                                                   : "feasible"))
                    << "\n";
            mdlab::io::write_text_file(ra.out_file, csv.str());
            man.write_beside(ra.out_file);
            return 0;
        }

        // ---- check ------------------------------------------------------------------
        for (auto* cmd : {lemma2, lemma3}) {
            if (!cmd->parsed()) continue;
            bool use_lemma2 = (cmd == lemma2);
            if (ck.random_n > 0) {
                std::uint64_t held = 0, nonvacuous = 0;
                for (std::uint64_t i = 0; i < ck.random_n; ++i) {
                    std::uint64_t s = mdlab::BlockRng::mix(ck.seed * 1315423911ULL + i);
                    mdlab::prob::ImplicationResult r;
                    if (use_lemma2) {
                        auto pmf = (i % 2 == 0) ? random_branch_chain(s) : random_full_support(s);
                        r = mdlab::prob::check_lemma2(pmf, {"A"}, {"B"}, {"C"}, {"D"}, ck.tol);
                    } else {
                        auto pmf = random_long_chain(s);
                        r = mdlab::prob::check_lemma3(pmf, {"A"}, {"B"}, {"C"}, {"D"}, ck.tol);
                    }
                    if (!r.hypotheses_hold || r.conclusion_holds) ++held;
                    if (r.hypotheses_hold) ++nonvacuous;
                }
                std::cout << held << "/" << ck.random_n << " implications hold (" << nonvacuous
                          << " with hypotheses satisfied)\n";
                return held == ck.random_n ? 0 : 1;
            }
            if (ck.dist_file.empty())
                throw CLI::ValidationError("check needs --dist FILE or --random N");
            auto pmf = mdlab::io::pmf_from_json(mdlab::io::load_json_file(ck.dist_file));
            mdlab::prob::validate(pmf);
            auto names = [&](const std::string& s) { return parse_names(s); };
            auto r = use_lemma2
                         ? mdlab::prob::check_lemma2(pmf, names(ck.a), names(ck.b), names(ck.c),
                                                     names(ck.d), ck.tol)
                         : mdlab::prob::check_lemma3(pmf, names(ck.a), names(ck.b), names(ck.c),
                                                     names(ck.d), ck.tol);
            std::cout << "hypotheses: " << (r.hypotheses_hold ? "hold" : "fail")
                      << "\nconclusion: " << (r.conclusion_holds ? "holds" : "fails")
                      << " (deviation " << r.conclusion_deviation << " bits)\n";
            return (r.hypotheses_hold && !r.conclusion_holds) ? 1 : 0;
        }

        // ---- dist -------------------------------------------------------------------
        if (makedxz->parsed()) {
            Manifest man{"dist make-dxz", raw_args, std::nullopt};
            auto table = mdlab::dist::build_dxz(da.delta, da.c);
            mdlab::io::write_text_file(da.out_file, mdlab::io::to_json(table).dump(2) + "\n");
            man.write_beside(da.out_file);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const mdlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
