// One line per acceptance criterion; exit status 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sp2lab/topology.hpp"
#include "sp2lab/verify.hpp"
#include "sp2lab/zero_locus.hpp"

using namespace sp2lab;

namespace {

struct Line {
  bool pass = false;
  std::string what;
};

int failures = 0;

void report(int id, const char* name, const std::function<Line()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Line l;
  try {
    l = f();
  } catch (const std::exception& e) {
    l = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!l.pass) ++failures;
  std::printf("C%-2d %s %-22s %s (%.1fs)\n", id, l.pass ? "PASS" : "FAIL", name, l.what.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

}  // namespace

int main() {
  const MetricParams params;  // nu1 = nu2 = 1/2, l1u = l1d = 1
  const std::uint64_t seed = 42;

  report(1, "oracle_concordance", [&] {
    const ConcordanceReport C = closed_form_concordance(params.nu1, params.nu2, 5, 12, seed);
    const bool ok = C.tuples == 5 && C.samples >= 500 && C.max_residual <= 1e-4;
    return Line{ok, fmt("max rel err %.3g <= 1e-4 over %.0f samples, %.0f nu tuples", C.max_residual,
                        static_cast<double>(C.samples), C.tuples) +
                        " worst " + C.worst};
  });

  ScanConfig sc;  // 16 x 16, 20 restarts, seed 42
  MetricParams split = params;
  split.l1u = Scale::inf();
  split.l1d = Scale::inf();
  ScanReport full_scan, split_scan;
  report(2, "nonnegativity", [&] {
    full_scan = scan_min_curvature(params, sc);
    split_scan = scan_min_curvature(split, sc);
    const bool ok = full_scan.global_min >= -1e-6 && split_scan.global_min >= -1e-6 &&
                    full_scan.points.size() == 256 && split_scan.points.size() == 256;
    return Line{ok, fmt("min sec full %.3g, split %.3g >= -1e-6 on %.0fx%.0f grid", full_scan.global_min,
                        split_scan.global_min, sc.theta_steps, sc.t_steps)};
  });

  report(3, "zero_locus_exactness", [&] {
    if (full_scan.points.empty()) return Line{false, "no scan"};
    const LocusReport L = locus_report(full_scan, true);
    const bool ok = L.misplaced == 0 && L.unclassified == 0 && L.unconverged == 0;
    return Line{ok, fmt("misplaced %.0f, max on locus %.3g <= 1e-8, min off locus %.3g > threshold %.3g",
                        L.misplaced, L.max_on_locus, L.min_off_locus, full_scan.threshold) +
                        fmt(", %.0f unconverged, %.0f unclassified", L.unconverged, L.unclassified)};
  });

  report(4, "classification", [&] {
    SoundnessReport R = sp2_classification_sweep(params.nu1, params.nu2, 40, 200, seed);
    merge_into(R, e20_classification_sweep(params, 30, 40, seed + 1));
    merge_into(R, e20_classification_sweep(split, 30, 40, seed + 2));
    const bool ok = R.planes >= 10000 && R.mismatches == 0 && R.unclassified == 0;
    return Line{ok, fmt("%.0f planes, %.0f mismatches, %.0f unclassified, max |fd| on zero tags %.3g",
                        static_cast<double>(R.planes), static_cast<double>(R.mismatches),
                        static_cast<double>(R.unclassified), R.max_zero_fd)};
  });

  report(5, "orbit_identities", [&] {
    const auto rs = check_orbit_identities(8, 8);
    bool ok = !rs.empty();
    double zero = 0, spread = 0;
    for (const auto& r : rs) {
      ok = ok && r.pass && r.zero_mismatch <= 1e-9;
      zero = std::max(zero, r.zero_mismatch);
      spread = std::max(spread, r.scale_spread);
    }
    return Line{ok, fmt("%.0f identities on 8x8 grid, zero-set mismatch %.3g <= 1e-9, scale spread %.3g",
                        static_cast<double>(rs.size()), zero, spread)};
  });

  report(6, "hopf_A_tensor", [&] {
    const HopfReport H = hopf_concordance(100, seed);
    return Line{H.samples == 100 && H.max_error <= 1e-8,
                fmt("max rel err %.3g <= 1e-8 over %.0f samples", H.max_error, H.samples)};
  });

  report(7, "horizontal_bases", [&] {
    const BasisReport B = horizontal_basis_report(params, 16);
    return Line{B.ok, fmt("orthogonality %.3g <= 1e-10, limit gap %.3g, limit identities %.3g", B.max_orthogonality,
                          B.max_limit_gap, B.limit_identity)};
  });

  report(8, "flat_torus", [&] {
    const TorusReport T = verify_flat_torus(params, 64, 0.3, 4);
    const bool ok = T.samples == 64 && T.max_abs_sec <= 1e-8 && T.max_abs_sec_fd <= 1e-8 &&
                    (!T.closure_tested || T.closure_gap <= 1e-8);
    return Line{ok, fmt("max |sec| %.3g <= 1e-8 at 64 points, fd %.3g, closure gap %.3g", T.max_abs_sec,
                        T.max_abs_sec_fd, T.closure_gap)};
  });

  report(9, "topology", [&] {
    const HomologyReport R = homology_E(2, 0);
    bool groups = R.H[3].str() == "Z/2" && R.H[0].str() == "Z" && R.H[7].str() == "Z";
    for (int q : {1, 2, 4, 5, 6}) groups = groups && R.H[static_cast<std::size_t>(q)].str() == "0";
    const TransitionCheck T = transition_identity_check(10000, seed);
    return Line{groups && T.ok && T.samples == 10000,
                "H3 = " + R.H[3].str() + fmt(", transition err %.3g, orbit err %.3g over 10000 samples", T.max_error,
                                             T.max_orbit_error)};
  });

  report(10, "cheeger", [&] {
    VerifyOptions o;
    o.params = params;
    o.seed = seed;
    const SuiteResult S = run_suite("cheeger", o);
    double order = std::numeric_limits<double>::infinity(), limit = order, iso = 0;
    bool ok = true;
    int isometries = 0;
    for (const auto& c : S.checks) {
      if (c.id == "cheeger.order_independence") {
        order = c.residual;
        ok = ok && c.pass && c.residual <= 1e-10;
      } else if (c.id == "cheeger.large_scale_limit") {
        limit = c.residual;
        ok = ok && c.pass && c.residual <= 1e-10;
      } else if (c.id.rfind("cheeger.isometry.", 0) == 0) {
        ++isometries;
        iso = std::max(iso, c.residual);
        ok = ok && c.pass && c.residual <= 1e-9;
      }
    }
    ok = ok && isometries == 5 && std::isfinite(order) && std::isfinite(limit);
    return Line{ok, fmt("commutativity %.3g <= 1e-10, l -> inf %.3g <= 1e-10, isometry (5 actions) %.3g <= 1e-9",
                        order, limit, iso)};
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
