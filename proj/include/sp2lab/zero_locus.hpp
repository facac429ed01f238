#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sp2lab/curvature.hpp"
#include "sp2lab/metric.hpp"
#include "sp2lab/submersion.hpp"

namespace sp2lab {

// theta in {0, pi/4, pi/2, 3pi/4} or t = pi/4, to 1e-12. Throws outside theta in [0, pi), t in [0, pi/4].
bool zero_locus_membership(double theta, double t);

enum class PlaneTag {
  Positive,
  ZeroThm51,
  ZeroProp71i,
  ZeroProp71ii,
  ZeroProp74,
  ZeroProp75x,
  ZeroProp75y,
  NumericallyFlatUnclassified
};
const char* tag_name(PlaneTag tag);
bool predicts_zero(PlaneTag tag);

struct PlaneClassification {
  PlaneTag tag = PlaneTag::Positive;
  std::string rule;         // which predicate decided
  Eigen::Vector3i ranks{0, 0, 0};  // projection ranks onto H, V1, V2 (split metric planes)
  int orbit_rank_up = -1;   // rank of the projection onto the A^u orbit (-1 if not evaluated)
  int orbit_rank_down = -1;
  double a_residual = -1;   // |A^1_z v1 + A^2_z v2|^2 relative, or family-fit residual
  double sec_split = 0;     // E20 (or Sp(2)) sectional curvature under the split metric, when evaluated
  double sec_full = 0;      // E20 sectional curvature under the deformed metric, when evaluated
};

// Decision tree for planes of Sp(2) with the split metric: projection ranks, the H projection,
// then vanishing of A^1_z v1 + A^2_z v2.
PlaneClassification classify_plane_g_nu(const Sp2Point& Q, const TangentVec& u, const TangentVec& v, double nu1,
                                        double nu2);

using Coeffs7 = Eigen::Matrix<double, 7, 1>;

struct FullClassifyOptions {
  double flat_tol = 1e-10;  // |sec| below this counts as flat in the exact engine
  double fit_tol = 1e-8;    // family membership tolerance
  double rank_tol = 1e-9;   // relative singular-value cutoff of the orbit projections
};

// Planes of E20 given by coefficients over q20_horizontal_basis(t, params, theta) (split metric vectors;
// under the deformed metric they stand for their images under to_deformed). With infinite scales this
// classifies zeros of the split metric.
PlaneClassification classify_plane_full(double theta, double t, const MetricParams& params, const Coeffs7& a,
                                        const Coeffs7& b, const FullClassifyOptions& opt = {});

// Zero-plane families in HorizontalBasis coefficients. phi selects the combination
// cos(phi) (first) + sin(phi) (second) of the index-1 and index-2 vectors.
enum class Family { EtaTheta, XTheta, ThetaPair, XStable, YStable };
const char* family_name(Family f);
// lambda is the free parameter where the family has one (mix of x and eta for XTheta, shift along (-theta, 0) for
// the stable families). EtaTheta/XTheta need t < pi/4, the others t = pi/4.
std::pair<Coeffs7, Coeffs7> family_plane(Family f, double phi, double lambda);

// Family plane at (theta, t) in the HorizontalBasis there. For t = pi/4 the stable families sit at theta = 0 and
// are carried to theta by right multiplication with diag(e^{alpha theta}, e^{-alpha theta}), an isometry of every
// metric in use that maps R_0 Q0(pi/4) to R_theta Q0(pi/4).
std::pair<Coeffs7, Coeffs7> family_plane_at(Family f, double theta, double t, const MetricParams& params, double phi,
                                            double lambda);
// Coefficients of a split-horizontal vector over the HorizontalBasis (least squares in lie coordinates).
Coeffs7 horizontal_coords(const HorizontalBasis& B, const TangentVec& V);

// Sectional curvature of E20 for a plane given in HorizontalBasis coefficients (exact engine).
double e20_sectional(double theta, double t, const MetricParams& params, const Coeffs7& a, const Coeffs7& b);

// Solve for the (0, vartheta)-combination v_{w,z} with curv(z + lambda w, w + v) = 0 in Sp(2) for the split
// metric, t = pi/4, theta = 0. z = cos(phi_z) x + sin(phi_z) y, w = -(cos(phi_w) vartheta1 + sin(phi_w) vartheta2)/nu1^2
// placed in the first column. Returns coefficients (c1, c2) of v = (0, (c1 vartheta1 + c2 vartheta2)/nu2^2).
struct VwzSolution {
  Eigen::Vector2d coeffs;
  double residual = 0;  // largest |curv| over a few lambda values, relative
};
VwzSolution solve_v_wz(const MetricParams& params, double phi_z, double phi_w);

// ---------------------------------------------------------------- scans

struct ScanConfig {
  int theta_steps = 16;  // theta_i = i pi / theta_steps
  int t_steps = 16;      // t_j = j (pi/4) / (t_steps - 1)
  int restarts = 20;
  std::uint64_t seed = 42;
  int max_iter = 2000;
  bool fd_confirm = true;  // finite-difference O'Neill value of every minimizing plane
  int threads = 0;         // 0: hardware concurrency
};

struct ScanPoint {
  int i = 0, j = 0;
  double theta = 0, t = 0;
  double min_sec = 0;
  double fd_sec = 0;  // finite-difference value on the minimizing plane (0 when not requested)
  Eigen::Matrix<double, 7, 1> u, v;  // minimizing plane over the orthonormal E20 basis
  bool converged = true;
  bool on_zero_locus = false;
  PlaneTag tag = PlaneTag::Positive;
};

struct ScanReport {
  MetricParams params;
  ScanConfig config;
  std::vector<ScanPoint> points;
  double threshold = 0;       // positivity threshold from proven-zero planes
  double max_zero_noise = 0;  // max |sec| on proven-zero planes, exact and finite-difference
  double global_min = 0;
  std::map<std::string, int> histogram;  // tags of flat minimizers
};

// Minimum of sec over Gr(2, 7) of E20 at one point: alternating smallest-eigenvector updates from seeded restarts.
ScanPoint minimize_at(double theta, double t, const MetricParams& params, int restarts, std::uint64_t seed,
                      int max_iter = 2000);
// Finite-difference O'Neill value of a minimizing plane.
double fd_confirm_minimizer(const ScanPoint& p, const MetricParams& params);
ScanReport scan_min_curvature(const MetricParams& params, const ScanConfig& config);
// Classify a scan minimizer (expressed over ExactModel::tangent_basis) in HorizontalBasis terms.
PlaneClassification classify_minimizer(const ScanPoint& p, const MetricParams& params);

// ---------------------------------------------------------------- flat torus

struct TorusReport {
  double t0 = 0;
  int samples = 0;
  double max_abs_sec = 0;           // over the sampled torus points, deformed metric
  double max_abs_sec_split = 0;     // same planes for the split metric
  double closure_gap = 0;           // distance in E20 of the r-circle endpoint from its start
  bool closure_tested = false;      // only for nu1 = nu2; otherwise the r-line does not close up
  double control_sec = 0;           // perturbed plane under the split metric (should be positive)
  double control_full_sec = 0;      // family plane at theta = pi/8 under the deformed metric (should be positive)
  int fd_samples = 0;
  double max_abs_sec_fd = 0;        // fd O'Neill value at the first fd_samples torus points
};

// Torus s, r -> Q0(t0 + s) exp(r Y) swept by the x flow and the vartheta1 flow; Y is the vartheta1^{2,0} generator.
TorusReport verify_flat_torus(const MetricParams& params, int samples = 64, double t0 = 0.3, int fd_samples = 0);

// ---------------------------------------------------------------- orbit-projection identities

struct IdentityResult {
  std::string name;
  double scale = 0;          // measured / predicted on the support of the prediction (0 when prediction is 0)
  double scale_spread = 0;   // spread of that ratio across the grid
  double zero_mismatch = 0;  // largest |measured| where predicted = 0, or |predicted| where measured = 0
  bool pass = false;
};

// Evaluates each closed-form orbit projection along a theta x t grid (t < pi/4) with nu1 = nu2 = 1/sqrt(2).
std::vector<IdentityResult> check_orbit_identities(int theta_steps = 8, int t_steps = 8);

}  // namespace sp2lab
