#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sp2lab/run_config.hpp"
#include "sp2lab/topology.hpp"
#include "sp2lab/verify.hpp"
#include "sp2lab/zero_locus.hpp"

namespace sp2lab {

using Json = nlohmann::ordered_json;

// Compact JSON with doubles printed as %.17g; non-finite numbers become null. Object keys keep insertion order.
std::string dump_json(const Json& j, int indent = 2);

Json config_json(const RunConfig& c);
Json scan_report_json(const ScanReport& R, const RunConfig& c);
// Header: theta,t,min_sec,fd_sec,u0..u6,v0..v6,classification,on_zero_locus
std::string samples_csv(const ScanReport& R);
Json suite_json(const SuiteResult& S);
Json verify_json(const std::vector<SuiteResult>& suites, const RunConfig& c);
Json homology_json(const HomologyReport& R);

}  // namespace sp2lab
