#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sp2lab/metric.hpp"
#include "sp2lab/zero_locus.hpp"

namespace sp2lab {

struct CheckResult {
  std::string id;
  bool pass = false;
  double residual = 0;   // worst value of the checked quantity
  double tolerance = 0;  // bound it was held to
  long samples = 0;
  std::string detail;
  std::string counterexample;  // empty when none
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  bool pass() const;
};

const std::vector<std::string>& suite_names();  // cheeger, curvature3, hopf4, zeros5, basis6, locus7, topo8

struct VerifyOptions {
  MetricParams params;
  std::uint64_t seed = 42;
  double scale = 1.0;      // multiplies the default sample counts
  bool run_scans = true;   // locus7: the two grid scans (minutes)
  double flat_threshold = 1e-8;  // |sec| at or below counts as flat
  int planes_per_point = 0;      // classification sweeps; 0 keeps the suite defaults
  ScanConfig scan;
  FdOptions fd;
};

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt);

// ---------------------------------------------------------------- pieces shared with the acceptance binary

// Closed-form vs finite-difference agreement under the split metric for random nu tuples (the first one is the
// given pair). residual is max |closed - fd| / max(|closed|, 1e-2 * scale) with scale the product of the vector norms.
struct ConcordanceReport {
  long samples = 0;
  double max_residual = 0;
  int tuples = 0;
  std::vector<std::pair<double, double>> nus;
  std::map<std::string, double> by_component;  // worst residual per component kind
  std::string worst;
};
ConcordanceReport closed_form_concordance(double nu1, double nu2, int tuples, int points_per_tuple, std::uint64_t seed,
                                          const FdOptions& fd = {});

// Hopf A tensor: closed form against the numerical connection, |A_z N beta| against |z||beta|.
struct HopfReport {
  int samples = 0;
  double max_error = 0;       // relative
  double max_norm_error = 0;  // relative
};
HopfReport hopf_concordance(int samples, std::uint64_t seed);

// Predicates of the classifiers against finite-difference signs.
struct SoundnessReport {
  long planes = 0;
  long zero_predicted = 0;
  long positive_predicted = 0;
  long mismatches = 0;
  long unclassified = 0;
  long subset_violations = 0;  // flat under the deformed metric but not under the split one
  double threshold = 0;        // 10 x max |fd| on zero-predicted planes
  double max_zero_fd = 0;
  double min_positive_fd = 0;
  std::map<std::string, long> histogram;
  std::string counterexample;
};
// Planes of Sp(2) under the split metric: random, V1 x V2, z + w with A1_z v1 + A2_z v2 = 0 and perturbations.
SoundnessReport sp2_classification_sweep(double nu1, double nu2, int points, int planes_per_point, std::uint64_t seed,
                                         const FdOptions& fd = {}, double flat = 1e-8);
// Planes of E20 from the zero families and at random, on and off the zero locus, against the fd O'Neill value.
SoundnessReport e20_classification_sweep(const MetricParams& params, int points, int planes_per_point,
                                         std::uint64_t seed, const FdOptions& fd = {}, double flat = 1e-8);
void merge_into(SoundnessReport& into, const SoundnessReport& from);

// Horizontal bases: residual over a t grid and the t -> pi/4 limits.
struct BasisReport {
  int samples = 0;
  double max_orthogonality = 0;
  double max_limit_gap = 0;     // normalized vectors at pi/4 - 1e-7 against pi/4
  double limit_identity = 0;    // eta_i(pi/4) = (0, vartheta_i)/nu2^2 and vartheta_i - eta_i = (-vartheta_i/nu1^2, 0)
  bool ok = false;
};
BasisReport horizontal_basis_report(const MetricParams& params, int t_steps);

// Scan outcome against the zero locus.
struct LocusReport {
  double global_min = 0;
  double max_on_locus = 0;       // largest minimum at member points
  double min_off_locus = 0;      // smallest minimum at non-member points
  int misplaced = 0;             // members with min > flat or non-members with min <= flat or below threshold
  int unconverged = 0;
  int unclassified = 0;
  double max_fd_gap = 0;         // |fd - exact| on the minimizing planes
};
LocusReport locus_report(const ScanReport& R, bool expect_locus, double flat = 1e-8);

}  // namespace sp2lab
