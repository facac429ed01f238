// sp2lab: curvature queries, verification suites, zero-locus scans and topology reports.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sp2lab/curvature.hpp"
#include "sp2lab/report.hpp"
#include "sp2lab/run_config.hpp"
#include "sp2lab/submersion.hpp"
#include "sp2lab/topology.hpp"
#include "sp2lab/verify.hpp"
#include "sp2lab/zero_locus.hpp"

using namespace sp2lab;

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitUsage = 2;

struct Common {
  std::string config_path;
  std::optional<std::string> nu1, nu2, l1u, l1d, seed, grid, restarts, out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value config file; flags override it");
  app->add_option("--nu1", c.nu1, "fibre scale of V1, in (0, 1/sqrt(2))");
  app->add_option("--nu2", c.nu2, "fibre scale of V2, in (0, 1/sqrt(2))");
  app->add_option("--l1u", c.l1u, "A^u deformation scale (number or inf)");
  app->add_option("--l1d", c.l1d, "A^d deformation scale (number or inf)");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--grid", c.grid, "scan grid THETAxT, e.g. 16x16");
  app->add_option("--restarts", c.restarts, "minimizer restarts per grid point");
  app->add_option("--out", c.out, "output directory");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg = load_run_config(c.config_path);
  auto apply = [&](const char* key, const std::optional<std::string>& v) {
    if (v) set_key(cfg, key, *v);
  };
  apply("nu1", c.nu1);
  apply("nu2", c.nu2);
  apply("l1u", c.l1u);
  apply("l1d", c.l1d);
  apply("seed", c.seed);
  apply("restarts", c.restarts);
  apply("out", c.out);
  if (c.grid) {
    const auto x = c.grid->find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("--grid: expected THETAxT, got '" + *c.grid + "'");
    set_key(cfg, "theta_steps", c.grid->substr(0, x));
    set_key(cfg, "t_steps", c.grid->substr(x + 1));
  }
  cfg.validate();
  return cfg;
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < item.size() && item[pos] == ' ') ++pos;
    if (pos == 0 || pos != item.size()) throw ConfigError(std::string(what) + ": cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.size() != n)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " comma separated numbers");
  return out;
}

Frame frame_for(const std::string& alpha) {
  Frame f;
  if (alpha == "i") f = {Quat::i(), Quat::j(), Quat::k()};
  else if (alpha == "j") f = {Quat::j(), Quat::k(), Quat::i()};
  else if (alpha == "k") f = {Quat::k(), Quat::i(), Quat::j()};
  else throw ConfigError("--alpha must be i, j or k");
  return f;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
}

std::filesystem::path out_dir(const RunConfig& cfg) {
  std::filesystem::path d(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out + "': " + ec.message());
  return d;
}

// closed form for the split metric when the plane sits in V1, V2, H or H x (V1 + V2)
std::optional<double> closed_form_sec(const RunConfig& cfg, const Sp2Point& Q, const TangentVec& u,
                                      const TangentVec& v) {
  const MetricParams& p = cfg.params;
  if (!p.l1u.infinite || !p.l1d.infinite) return std::nullopt;
  const SplitParts a = split(Q, u), b = split(Q, v);
  auto tiny = [](const TangentVec& x, const TangentVec& ref) { return max_abs(x) <= 1e-12 * std::max(1.0, max_abs(ref)); };
  auto only_h = [&](const SplitParts& s, const TangentVec& w) { return tiny(s.v1, w) && tiny(s.v2, w); };
  auto only_v1 = [&](const SplitParts& s, const TangentVec& w) { return tiny(s.h, w) && tiny(s.v2, w); };
  auto only_v2 = [&](const SplitParts& s, const TangentVec& w) { return tiny(s.h, w) && tiny(s.v1, w); };
  auto only_v = [&](const SplitParts& s, const TangentVec& w) { return tiny(s.h, w); };
  const double area = split_inner(p.nu1, p.nu2, Q, u, u) * split_inner(p.nu1, p.nu2, Q, v, v) -
                      std::pow(split_inner(p.nu1, p.nu2, Q, u, v), 2);
  if (!(area > 0)) return std::nullopt;
  std::optional<double> curv;
  if (only_v1(a, u) && only_v1(b, v))
    curv = closed_fiber_curv(p.nu1, to_lie(Q, u).e[0][0], to_lie(Q, v).e[0][0]);
  else if (only_v2(a, u) && only_v2(b, v))
    curv = closed_fiber_curv(p.nu2, to_lie(Q, u).e[1][1], to_lie(Q, v).e[1][1]);
  else if (only_h(a, u) && only_h(b, v))
    curv = closed_horizontal_curv(Q, u, v, p.nu1, p.nu2);
  else if (only_h(a, u) && only_v(b, v))
    curv = vertizontal_curv(Q, u, b.v1, b.v2, p.nu1, p.nu2);
  else if (only_v(a, u) && only_h(b, v))
    curv = vertizontal_curv(Q, v, a.v1, a.v2, p.nu1, p.nu2);
  if (!curv) return std::nullopt;
  return *curv / area;
}

int cmd_curv(const RunConfig& cfg, const std::string& space, double theta, double t, const std::string& alpha,
             const std::string& us, const std::string& vs) {
  const MetricParams& p = cfg.params;
  p.validate();
  const Frame fr = frame_for(alpha);
  FdOptions fd;
  fd.step = cfg.fd_step;
  Json j;
  j["config"] = config_json(cfg);
  j["space"] = space;
  j["theta"] = theta;
  j["t"] = t;
  j["alpha"] = alpha;
  Json eng;
  std::optional<double> closed;
  double lie = 0, fdv = 0;
  if (space == "sp2") {
    const auto uc = parse_list(us, 10, "--u"), vc = parse_list(vs, 10, "--v");
    const LieCoords lu = Eigen::Map<const LieCoords>(uc.data()), lv = Eigen::Map<const LieCoords>(vc.data());
    const Sp2Point Q = representative_point(theta, t, fr.alpha);
    const TangentVec u = left_translate(Q, lie_from_coords(lu)), v = left_translate(Q, lie_from_coords(lv));
    const auto g = full_metric(p);
    const double area = g->norm2(Q, u) * g->norm2(Q, v) - std::pow(g->inner(Q, u, v), 2);
    if (!(area > 1e-14 * g->norm2(Q, u) * g->norm2(Q, v))) throw ConfigError("--u and --v are linearly dependent");
    closed = closed_form_sec(cfg, Q, u, v);
    lie = ExactModel(p, Space::Sp2, Q).sectional(u, v);
    fdv = Sp2Fd(*g, Q, fd).sectional(u, v);
    if (p.l1u.infinite && p.l1d.infinite) {
      const PlaneClassification c = classify_plane_g_nu(Q, u, v, p.nu1, p.nu2);
      j["classification"] = tag_name(c.tag);
      j["rule"] = c.rule;
    }
  } else if (space == "e20") {
    const auto uc = parse_list(us, 7, "--u"), vc = parse_list(vs, 7, "--v");
    const Coeffs7 a = Eigen::Map<const Coeffs7>(uc.data()), b = Eigen::Map<const Coeffs7>(vc.data());
    if ((a * b.norm() - b * a.norm()).norm() < 1e-12 * a.norm() * b.norm() ||
        (a * b.norm() + b * a.norm()).norm() < 1e-12 * a.norm() * b.norm() || a.norm() == 0 || b.norm() == 0)
      throw ConfigError("--u and --v are linearly dependent");
    if (theta < 0 || theta >= M_PI || t < 0 || t > M_PI / 4 + 1e-15)
      throw ConfigError("need theta in [0, pi), t in [0, pi/4]");
    const HorizontalBasis B = q20_horizontal_basis(t, p, theta, fr);
    const auto all = B.all();
    TangentVec u{}, v{};
    for (int i = 0; i < 7; ++i) {
      u = u + a[i] * all[static_cast<std::size_t>(i)];
      v = v + b[i] * all[static_cast<std::size_t>(i)];
    }
    const TangentVec du = to_deformed(p, B.at, u), dv = to_deformed(p, B.at, v);
    lie = ExactModel(p, Space::E20, B.at).sectional(du, dv);
    fdv = SubmersionFd(submersion(SubmersionKind::Q20), full_metric(p), B.at, fd).base_sectional(du, dv);
    j["on_zero_locus"] = zero_locus_membership(theta, t);
    if (alpha == "i") {
      const PlaneClassification c = classify_plane_full(theta, t, p, a, b);
      j["classification"] = tag_name(c.tag);
      j["rule"] = c.rule;
    }
  } else {
    throw ConfigError("--space must be sp2 or e20");
  }
  eng["closed_form"] = closed ? Json(*closed) : Json(nullptr);
  eng["lie_theoretic"] = lie;
  eng["finite_difference"] = fdv;
  j["sectional"] = eng;
  Json d;
  d["lie_vs_fd"] = std::abs(lie - fdv);
  d["closed_vs_lie"] = closed ? Json(std::abs(*closed - lie)) : Json(nullptr);
  j["deltas"] = d;
  std::cout << dump_json(j);
  return kExitPass;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, bool scans) {
  std::vector<std::string> names;
  if (suite == "all") names = suite_names();
  else {
    bool known = false;
    for (const auto& n : suite_names()) known = known || n == suite;
    if (!known) throw ConfigError("unknown suite '" + suite + "'");
    names = {suite};
  }
  VerifyOptions o = cfg.verify_options();
  o.run_scans = scans;
  std::vector<SuiteResult> results;
  bool pass = true;
  for (const auto& n : names) {
    results.push_back(run_suite(n, o));
    const SuiteResult& S = results.back();
    pass = pass && S.pass();
    for (const auto& c : S.checks)
      std::fprintf(stderr, "%-4s %-40s %.3g / %.3g\n", c.pass ? "ok" : "FAIL", c.id.c_str(), c.residual, c.tolerance);
  }
  write_file(out_dir(cfg) / "verify_result.json", dump_json(verify_json(results, cfg)));
  std::printf("%s\n", pass ? "pass" : "fail");
  return pass ? kExitPass : kExitFail;
}

int cmd_scan(const RunConfig& cfg, bool csv) {
  const ScanReport R = scan_min_curvature(cfg.params, cfg.scan_config());
  const Json j = scan_report_json(R, cfg);
  const auto dir = out_dir(cfg);
  write_file(dir / "scan_report.json", dump_json(j));
  if (csv) write_file(dir / "samples.csv", samples_csv(R));
  const bool ok = j["nonnegative"].get<bool>() && j["locus"]["misplaced"].get<int>() == 0 &&
                  j["locus"]["unclassified"].get<int>() == 0;
  std::printf("global min %.6g, %s\n", R.global_min, ok ? "pass" : "fail");
  return ok ? kExitPass : kExitFail;
}

int cmd_topology(long long m, long long n, bool gluing) {
  if (gluing) std::tie(m, n) = homology_indexing({m, n});
  std::cout << dump_json(homology_json(homology_E(m, n)));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature and topology checks for Sp(2) and E_{2,0}"};
  app.require_subcommand(1);

  Common curv_c, verify_c, scan_c;
  auto* curv = app.add_subcommand("curv", "sectional curvature of one plane under every engine");
  add_common(curv, curv_c);
  std::string space = "e20", alpha = "i", us, vs;
  double theta = 0.3, t = 0.4;
  curv->add_option("--space", space, "sp2 or e20")->capture_default_str();
  curv->add_option("--theta", theta, "orbit angle in [0, pi)")->capture_default_str();
  curv->add_option("--t", t, "diagonal parameter in [0, pi/4]")->capture_default_str();
  curv->add_option("--alpha", alpha, "frame unit: i, j or k")->capture_default_str();
  curv->add_option("--u", us, "first vector: 7 horizontal basis coefficients (e20) or 10 lie coordinates (sp2)")
      ->required();
  curv->add_option("--v", vs, "second vector, same format")->required();

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, verify_c);
  std::string suite = "all";
  bool no_scans = false;
  verify->add_option("--suite", suite, "cheeger, curvature3, hopf4, zeros5, basis6, locus7, topo8 or all")
      ->capture_default_str();
  verify->add_flag("--no-scans", no_scans, "skip the grid scans inside locus7");

  auto* scan = app.add_subcommand("scan", "minimum sectional curvature over a (theta, t) grid of E_{2,0}");
  add_common(scan, scan_c);
  bool no_csv = false;
  scan->add_flag("--no-csv", no_csv, "do not write samples.csv");

  auto* topo = app.add_subcommand("topology", "homology of the S^3-bundle E_{m,n} over S^4");
  long long m = 2, n = 0;
  bool gluing = false;
  topo->add_option("--m", m, "first bundle index")->capture_default_str();
  topo->add_option("--n", n, "second bundle index")->capture_default_str();
  topo->add_flag("--gluing", gluing, "read (m, n) as a gluing type and translate to the homology indexing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*curv) return cmd_curv(resolve(curv_c), space, theta, t, alpha, us, vs);
    if (*verify) return cmd_verify(resolve(verify_c), suite, !no_scans);
    if (*scan) return cmd_scan(resolve(scan_c), !no_csv);
    if (*topo) return cmd_topology(m, n, gluing);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
