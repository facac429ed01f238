#include "sp2lab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sp2lab {

namespace {

std::string g17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        os << (first ? "" : ",") << pad << Json(it.key()).dump() << sep;
        write(os, it.value(), indent, depth + 1);
        first = false;
      }
      os << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric arrays on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && e.is_primitive();
      os << "[";
      bool first = true;
      for (const auto& e : j) {
        os << (first ? "" : (flat ? ", " : ",")) << (flat ? "" : pad);
        write(os, e, indent, depth + 1);
        first = false;
      }
      os << (flat ? "" : close) << "]";
      return;
    }
    case Json::value_t::number_float:
      os << g17(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

Json vec7(const Eigen::Matrix<double, 7, 1>& v) {
  Json a = Json::array();
  for (int i = 0; i < 7; ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  os << "\n";
  return os.str();
}

Json config_json(const RunConfig& c) {
  Json j;
  j["nu1"] = c.params.nu1;
  j["nu2"] = c.params.nu2;
  j["l1u"] = to_string(c.params.l1u);
  j["l1d"] = to_string(c.params.l1d);
  j["theta_steps"] = c.theta_steps;
  j["t_steps"] = c.t_steps;
  j["restarts"] = c.restarts;
  j["planes_per_point"] = c.planes_per_point;
  j["seed"] = c.seed;
  j["fd_step"] = c.fd_step;
  j["flat_threshold"] = c.flat_threshold;
  return j;
}

Json scan_report_json(const ScanReport& R, const RunConfig& c) {
  const bool expect_locus = !R.params.l1u.infinite || !R.params.l1d.infinite;
  const LocusReport L = locus_report(R, expect_locus, c.flat_threshold);
  Json j;
  j["config"] = config_json(c);
  j["metric"] = expect_locus ? "full" : "split";
  j["global_min"] = R.global_min;
  j["threshold"] = R.threshold;
  j["max_zero_noise"] = R.max_zero_noise;
  j["nonnegative"] = R.global_min >= -1e-6;
  Json loc;
  loc["checked"] = expect_locus;
  loc["misplaced"] = L.misplaced;
  loc["max_on_locus"] = L.max_on_locus;
  loc["min_off_locus"] = L.min_off_locus;
  loc["unconverged"] = L.unconverged;
  loc["unclassified"] = L.unclassified;
  loc["max_fd_gap"] = L.max_fd_gap;
  j["locus"] = loc;
  Json h = Json::object();
  for (const auto& [k, v] : R.histogram) h[k] = v;
  j["histogram"] = h;
  Json pts = Json::array();
  for (const auto& p : R.points) {
    Json q;
    q["i"] = p.i;
    q["j"] = p.j;
    q["theta"] = p.theta;
    q["t"] = p.t;
    q["min_sec"] = p.min_sec;
    q["fd_sec"] = p.fd_sec;
    q["converged"] = p.converged;
    q["on_zero_locus"] = p.on_zero_locus;
    q["classification"] = tag_name(p.tag);
    q["u"] = vec7(p.u);
    q["v"] = vec7(p.v);
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

std::string samples_csv(const ScanReport& R) {
  std::ostringstream os;
  os << "theta,t,min_sec,fd_sec";
  for (int i = 0; i < 7; ++i) os << ",u" << i;
  for (int i = 0; i < 7; ++i) os << ",v" << i;
  os << ",classification,on_zero_locus\n";
  for (const auto& p : R.points) {
    os << g17(p.theta) << "," << g17(p.t) << "," << g17(p.min_sec) << "," << g17(p.fd_sec);
    for (int i = 0; i < 7; ++i) os << "," << g17(p.u[i]);
    for (int i = 0; i < 7; ++i) os << "," << g17(p.v[i]);
    os << "," << tag_name(p.tag) << "," << (p.on_zero_locus ? "true" : "false") << "\n";
  }
  return os.str();
}

Json suite_json(const SuiteResult& S) {
  Json j;
  j["suite"] = S.name;
  j["status"] = S.pass() ? "pass" : "fail";
  Json checks = Json::object();
  for (const auto& c : S.checks) {
    Json k;
    k["status"] = c.pass ? "pass" : "fail";
    k["max_residual"] = c.residual;
    k["tolerance"] = c.tolerance;
    k["samples"] = c.samples;
    if (!c.detail.empty()) k["detail"] = c.detail;
    k["counterexample"] = c.counterexample.empty() ? Json(nullptr) : Json(c.counterexample);
    checks[c.id] = k;
  }
  j["checks"] = checks;
  return j;
}

Json verify_json(const std::vector<SuiteResult>& suites, const RunConfig& c) {
  Json j;
  j["config"] = config_json(c);
  bool pass = true;
  Json arr = Json::array();
  for (const auto& S : suites) {
    pass = pass && S.pass();
    arr.push_back(suite_json(S));
  }
  j["status"] = pass ? "pass" : "fail";
  j["suites"] = arr;
  return j;
}

Json homology_json(const HomologyReport& R) {
  Json j;
  j["m"] = R.m;
  j["n"] = R.n;
  Json H = Json::array();
  for (const auto& g : R.H) H.push_back(g.str());
  j["H"] = H;
  j["pi1"] = R.pi1.str();
  j["pi2"] = R.pi2.str();
  j["pi3"] = R.pi3.str();
  Json s = Json::array();
  for (long long d : R.smith) s.push_back(d);
  j["smith"] = s;
  j["torsion_statement_applies"] = R.hypothesis_holds;
  j["poincare_ranks"] = R.poincare_ranks;
  return j;
}

}  // namespace sp2lab
