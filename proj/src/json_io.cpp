#include "mdlab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace mdlab::io {

namespace {

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ShapeMismatch(std::string("missing JSON field '") + key + "'");
    return *it;
}

json row_to_json(const region::LinIneq& row, const std::vector<std::string>& vars) {
    json coeffs = json::object();
    for (std::size_t i = 0; i < row.coeffs.size(); ++i)
        if (row.coeffs[i] != 0) coeffs[vars[i]] = rational_str(row.coeffs[i]);
    const char* rel = row.rel == region::Rel::Le ? "<=" : (row.rel == region::Rel::Ge ? ">=" : "=");
    return {{"coeffs", std::move(coeffs)},
            {"rel", rel},
            {"rhs", region::to_double(row.rhs)},
            {"rhs_exact", rational_str(row.rhs)},
            {"tag", row.tag}};
}

region::LinIneq row_from_json(const json& j, const std::vector<std::string>& vars) {
    region::LinIneq row;
    row.coeffs.assign(vars.size(), 0);
    for (const auto& [name, value] : require(j, "coeffs").items()) {
        auto it = std::find(vars.begin(), vars.end(), name);
        if (it == vars.end()) throw ShapeMismatch("row references unknown variable '" + name + "'");
        row.coeffs[it - vars.begin()] = rational_from_str(value.get<std::string>());
    }
    std::string rel = require(j, "rel").get<std::string>();
    row.rel = rel == "<=" ? region::Rel::Le : (rel == ">=" ? region::Rel::Ge : region::Rel::Eq);
    if (j.contains("rhs_exact"))
        row.rhs = rational_from_str(j["rhs_exact"].get<std::string>());
    else
        row.rhs = region::Rational(require(j, "rhs").get<double>());
    if (j.contains("tag")) row.tag = j["tag"].get<std::string>();
    return row;
}

}  // namespace

std::string rational_str(const region::Rational& q) {
    std::ostringstream ss;
    ss << q;
    return ss.str();
}

region::Rational rational_from_str(const std::string& s) {
    auto slash = s.find('/');
    using boost::multiprecision::cpp_int;
    if (slash == std::string::npos) return region::Rational(cpp_int(s));
    return region::Rational(cpp_int(s.substr(0, slash)), cpp_int(s.substr(slash + 1)));
}

json to_json(const prob::JointPmf& pmf) {
    json vars = json::array();
    for (const auto& v : pmf.variables()) vars.push_back({{"name", v.name}, {"size", v.size}});
    return {{"variables", std::move(vars)}, {"probs", pmf.probs()}};
}

prob::JointPmf pmf_from_json(const json& j) {
    std::vector<prob::Variable> vars;
    for (const auto& v : require(j, "variables"))
        vars.push_back({require(v, "name").get<std::string>(), require(v, "size").get<int>()});
    return prob::JointPmf(std::move(vars), require(j, "probs").get<std::vector<double>>());
}

json to_json(const gf2::LinearCode& code) {
    json rows = json::array();
    for (gf2::Word r : code.generator()) {
        json bits = json::array();
        for (int i = 0; i < code.n(); ++i) bits.push_back(static_cast<int>((r >> i) & 1u));
        rows.push_back(std::move(bits));
    }
    return {{"n", code.n()}, {"k", code.k()}, {"generator", std::move(rows)}};
}

gf2::LinearCode code_from_json(const json& j) {
    int n = require(j, "n").get<int>();
    int k = require(j, "k").get<int>();
    std::vector<gf2::Word> rows;
    for (const auto& bits : require(j, "generator")) {
        gf2::Word w = 0;
        int i = 0;
        for (const auto& b : bits) {
            if (b.get<int>()) w |= (gf2::Word(1) << i);
            ++i;
        }
        if (i != n) throw ShapeMismatch("generator row width differs from n");
        rows.push_back(w);
    }
    return gf2::LinearCode(n, k, std::move(rows));
}

json to_json(const dist::DistortionTable& table) {
    return {{"c", table.c}, {"values", table.values}, {"d0", table.d0}};
}

dist::DistortionTable table_from_json(const json& j) {
    dist::DistortionTable t;
    t.c = require(j, "c").get<double>();
    t.values = require(j, "values").get<std::vector<std::vector<double>>>();
    t.d0 = require(j, "d0").get<std::vector<double>>();
    t.source_size = static_cast<int>(t.values.size());
    t.recon_size = t.values.empty() ? 0 : static_cast<int>(t.values.front().size());
    return t;
}

json to_json(const schemes::SchemeReport& rep) {
    json rates = json::object();
    for (const auto& [key, r] : rep.rates)
        rates[key] = {{"num", r.num}, {"den", r.den}, {"bits", r.bits()}};
    json out = {{"scheme", rep.scheme}, {"n", rep.n},         {"k", rep.k},
                {"delta", rep.delta},   {"blocks", rep.blocks}, {"seed", rep.seed},
                {"rates", std::move(rates)}, {"distortions", rep.distortions},
                {"stderr", rep.stderrs}, {"failures", rep.failures}};
    if (rep.scheme == "four-desc") {
        out["lambda"] = rep.lambda;
        out["rates_ideal"] = rep.rates_ideal;
        out["noise_bias"] = rep.noise_bias;
    }
    if (!rep.distortions_pair.empty()) out["distortions_pair"] = rep.distortions_pair;
    return out;
}

std::string to_csv(const schemes::SchemeReport& rep) {
    std::ostringstream csv;
    csv << "decoder,label,rate,distortion,stderr,failures\n";
    auto label_of = [&](const std::string& d) -> std::string {
        if (rep.scheme == "three-desc") {
            if (d == "1") return "X";
            if (d == "2") return "Z";
            if (d == "3") return "X+Z";
            return "(X,Z)";
        }
        if (d == "1" || d == "12") return "X";
        if (d == "4" || d == "34") return "Z";
        return "X+Z";
    };
    for (const auto& [dec, dist] : rep.distortions) {
        double rate = 0.0;
        for (char ch : dec) {
            auto it = rep.rates.find(std::string(1, ch));
            if (it != rep.rates.end()) rate += it->second.bits();
        }
        csv << dec << "," << label_of(dec) << "," << rate << "," << dist << ","
            << rep.stderrs.at(dec) << ",";
        auto f = rep.failures.find(dec);
        if (f != rep.failures.end()) csv << f->second;
        csv << "\n";
    }
    return csv.str();
}

json to_json(const RegionSetup& setup) {
    const auto& lay = setup.layout;
    json base = json::array();
    for (const auto& b : lay.base)
        base.push_back({{"A", b.subset}, {"i", b.threshold}, {"var", b.var}});
    json refine = json::array();
    for (const auto& r : lay.refine)
        refine.push_back({{"k", r.threshold}, {"j", r.desc}, {"var", r.var}});
    json extra = json::array();
    for (const auto& e : lay.extra) extra.push_back({{"decode", e.decode_any}, {"var", e.var}});
    json sums = json::array();
    for (const auto& s : lay.sums) {
        json cases = json::array();
        for (const auto& c : s.cases)
            cases.push_back({{"decoder", c.decoder}, {"case", static_cast<int>(c.mode)}});
        json entry = {{"y", s.y}, {"z", s.z}, {"cases", std::move(cases)}};
        if (!s.sum_var.empty()) entry["sum_var"] = s.sum_var;
        sums.push_back(std::move(entry));
    }
    json decoders = json::array();
    for (const auto& d : setup.decoders) {
        json entry = {{"subset", d.subset}};
        if (!d.distortion.empty()) entry["distortion"] = d.distortion;
        decoders.push_back(std::move(entry));
    }
    return {{"L", lay.L},
            {"pmf", to_json(setup.pmf)},
            {"layout",
             {{"sources", lay.sources},
              {"base", std::move(base)},
              {"refine", std::move(refine)},
              {"extra", std::move(extra)},
              {"sums", std::move(sums)}}},
            {"decoders", std::move(decoders)},
            {"q_bits", setup.q_bits}};
}

RegionSetup setup_from_json(const json& j) {
    RegionSetup setup;
    setup.layout.L = require(j, "L").get<int>();
    setup.pmf = pmf_from_json(require(j, "pmf"));
    const json& lay = require(j, "layout");
    if (lay.contains("sources")) setup.layout.sources = lay["sources"].get<std::vector<std::string>>();
    if (lay.contains("base"))
        for (const auto& b : lay["base"])
            setup.layout.base.push_back({require(b, "A").get<std::vector<int>>(),
                                         require(b, "i").get<int>(),
                                         require(b, "var").get<std::string>()});
    if (lay.contains("refine"))
        for (const auto& r : lay["refine"])
            setup.layout.refine.push_back({require(r, "k").get<int>(), require(r, "j").get<int>(),
                                           require(r, "var").get<std::string>()});
    if (lay.contains("extra"))
        for (const auto& e : lay["extra"])
            setup.layout.extra.push_back({require(e, "decode").get<std::vector<std::vector<int>>>(),
                                          require(e, "var").get<std::string>()});
    if (lay.contains("sums"))
        for (const auto& s : lay["sums"]) {
            region::SumPair sum;
            sum.y = require(s, "y").get<std::string>();
            sum.z = require(s, "z").get<std::string>();
            if (s.contains("sum_var")) sum.sum_var = s["sum_var"].get<std::string>();
            for (const auto& c : require(s, "cases"))
                sum.cases.push_back({require(c, "decoder").get<std::vector<int>>(),
                                     static_cast<region::SumCase>(require(c, "case").get<int>())});
            setup.layout.sums.push_back(std::move(sum));
        }
    for (const auto& d : require(j, "decoders")) {
        region::DecoderSpec spec;
        spec.subset = require(d, "subset").get<std::vector<int>>();
        if (d.contains("distortion"))
            spec.distortion = d["distortion"].get<std::map<std::string, double>>();
        setup.decoders.push_back(std::move(spec));
    }
    if (j.contains("q_bits")) setup.q_bits = j["q_bits"].get<double>();
    return setup;
}

json to_json(const region::IneqSystem& system) {
    json common = json::array();
    for (const auto& row : system.common) common.push_back(row_to_json(row, system.vars));
    json branches = json::array();
    for (const auto& branch : system.branches) {
        json rows = json::array();
        for (const auto& row : branch) rows.push_back(row_to_json(row, system.vars));
        branches.push_back(std::move(rows));
    }
    return {{"variables", system.vars}, {"common", std::move(common)}, {"branches", std::move(branches)}};
}

region::IneqSystem system_from_json(const json& j) {
    region::IneqSystem sys;
    sys.vars = require(j, "variables").get<std::vector<std::string>>();
    for (const auto& row : require(j, "common")) sys.common.push_back(row_from_json(row, sys.vars));
    if (j.contains("branches"))
        for (const auto& branch : j["branches"]) {
            std::vector<region::LinIneq> rows;
            for (const auto& row : branch) rows.push_back(row_from_json(row, sys.vars));
            sys.branches.push_back(std::move(rows));
        }
    return sys;
}

json to_json(const region::RateRegion& reg) {
    json disjuncts = json::array();
    for (const auto& rows : reg.disjuncts) {
        json arr = json::array();
        for (const auto& row : rows) arr.push_back(row_to_json(row, reg.keep));
        disjuncts.push_back(std::move(arr));
    }
    return {{"keep", reg.keep}, {"disjuncts", std::move(disjuncts)}, {"provenance", reg.provenance}};
}

region::RateRegion region_from_json(const json& j) {
    region::RateRegion reg;
    reg.keep = require(j, "keep").get<std::vector<std::string>>();
    for (const auto& rows : require(j, "disjuncts")) {
        std::vector<region::LinIneq> out;
        for (const auto& row : rows) out.push_back(row_from_json(row, reg.keep));
        reg.disjuncts.push_back(std::move(out));
    }
    if (j.contains("provenance")) reg.provenance = j["provenance"].get<std::string>();
    return reg;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("bad JSON in '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << contents;
}

}  // namespace mdlab::io
