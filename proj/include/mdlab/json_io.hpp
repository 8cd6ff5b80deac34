#ifndef MDLAB_JSON_IO_HPP
#define MDLAB_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "mdlab/distortion.hpp"
#include "mdlab/gf2.hpp"
#include "mdlab/pmf.hpp"
#include "mdlab/region.hpp"
#include "mdlab/schemes.hpp"

namespace mdlab::io {

using nlohmann::json;

// {"variables":[{"name":"X","size":2},...],"probs":[...]}, probs in joint
// lexicographic order, first-listed variable slowest-varying.
json to_json(const prob::JointPmf& pmf);
prob::JointPmf pmf_from_json(const json& j);

// {"n":16,"k":8,"generator":[[bit,...],...]}
json to_json(const gf2::LinearCode& code);
gf2::LinearCode code_from_json(const json& j);

// {"c":1.0,"values":[[...],...],"d0":[...]}
json to_json(const dist::DistortionTable& table);
dist::DistortionTable table_from_json(const json& j);

json to_json(const schemes::SchemeReport& report);
std::string to_csv(const schemes::SchemeReport& report);

// Region setup file: {"L":3,"pmf":{...},"layout":{...},"decoders":[...],"q_bits":1.0}
struct RegionSetup {
    region::CodebookLayout layout;
    prob::JointPmf pmf;
    std::vector<region::DecoderSpec> decoders;
    double q_bits = 1.0;
};
json to_json(const RegionSetup& setup);
RegionSetup setup_from_json(const json& j);

json to_json(const region::IneqSystem& system);
region::IneqSystem system_from_json(const json& j);

json to_json(const region::RateRegion& region);
region::RateRegion region_from_json(const json& j);

std::string rational_str(const region::Rational& q);
region::Rational rational_from_str(const std::string& s);

// File helpers shared by the CLI and the tests.
json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace mdlab::io

#endif
