#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "sp2lab/metric.hpp"
#include "sp2lab/sp2.hpp"

namespace sp2lab {

enum class Method { ClosedForm, LieTheoretic, FiniteDifference };
const char* method_name(Method m);

struct CurvatureComponents {
  double value = 0;
  Method method = Method::FiniteDifference;
};

// Two tangent vectors at a common point, orthonormal for the metric they were built with.
struct Plane {
  TangentVec u, v;
};
// Gram-Schmidt of (x, y) under the metric; throws if they are dependent.
Plane make_plane(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& x, const TangentVec& y);

// ---------------------------------------------------------------- finite differences

// Metric components g(x) of a chart centred at x = 0.
using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct FdOptions {
  double step = 1e-3;
  bool richardson = true;
  // Largest tolerated difference between the extrapolated and the finer second derivatives.
  double gap_tol = 1e-5;
};

// Riemann tensor at the chart centre from central differences of the metric.
// R(X,Y,Z,W) = <R(X,Y)Z, W>, with the sign fixed so that curv(u,v) = R(u,v,v,u) is positive on round spheres.
class FdCurvature {
 public:
  FdCurvature(const MetricField& g, int n, const FdOptions& opt = {});

  int dim() const { return n_; }
  const Eigen::MatrixXd& metric() const { return g_; }
  double riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                 const Eigen::VectorXd& W) const;
  double curv(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return riemann(u, v, v, u); }
  double sectional(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  // Gamma(X, Y) = nabla_X Y for coordinate-constant fields, in coordinates.
  Eigen::VectorXd christoffel(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  double richardson_gap() const { return gap_; }
  // Largest violation of the pair symmetries and of the first Bianchi identity.
  double symmetry_residual() const;
  double bianchi_residual() const;
  // Entry R_{ijkl}.
  double at(int i, int j, int k, int l) const { return R_[((i * n_ + j) * n_ + k) * n_ + l]; }

 private:
  int n_;
  Eigen::MatrixXd g_, ginv_;
  std::vector<double> R_;
  std::vector<double> gamma_;  // Gamma^k_{ij} at index (k*n + i)*n + j
  double gap_ = 0;
};

// Sign applied to the raw tensor; computed once from a unit-sphere chart. Throws if the calibration fails.
double fd_curvature_sign();

// Derivative of a vector-valued function at 0 along a coordinate direction, central differences with Richardson.
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, int n,
                            const FdOptions& opt = {});

// Chart metric field of a MetricEvaluator on exp_chart(Q, .).
MetricField sp2_metric_field(const MetricEvaluator& g, const Sp2Point& Q);

// Finite-difference tensor of one metric at one point, taking tangent vectors.
class Sp2Fd {
 public:
  Sp2Fd(const MetricEvaluator& g, const Sp2Point& Q, const FdOptions& opt = {});
  double riemann(const TangentVec& X, const TangentVec& Y, const TangentVec& Z, const TangentVec& W) const;
  double curv(const TangentVec& u, const TangentVec& v) const { return riemann(u, v, v, u); }
  double sectional(const TangentVec& u, const TangentVec& v) const;
  const FdCurvature& core() const { return fd_; }
  const Sp2Point& point() const { return Q_; }

 private:
  Sp2Point Q_;
  FdCurvature fd_;
};

double fd_riemann(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& X, const TangentVec& Y,
                  const TangentVec& Z, const TangentVec& W, const FdOptions& opt = {});

// ---------------------------------------------------------------- S^7 and the Hopf fibration

// Unit sphere with the Hopf fibres (N beta) scaled by t.
double berger_inner(const QVec2& N, double t, const QVec2& U, const QVec2& W);
// Orthonormal basis of T_N S^7 (euclidean), first three vertical N i, N j, N k.
std::array<QVec2, 7> s7_tangent_basis(const QVec2& N);
// Chart N + sum x_i e_i, normalised, with the Berger metric of fibre scale t.
MetricField berger_metric_field(const QVec2& N, double t);

// A^h_z (N beta) = z beta; throws std::invalid_argument if z is not horizontal at N.
QVec2 hopf_A(const QVec2& z, const Quat& beta, const QVec2& N);
// Same tensor from the finite-difference connection of the round chart: horizontal part of nabla_z (N beta).
QVec2 numerical_hopf_A(const QVec2& z, const Quat& beta, const QVec2& N, const FdOptions& opt = {});
// Vertical part of nabla_x y for horizontal x, y on the unit sphere: sum_beta <y, x beta> N beta.
double hopf_A_norm2(const QVec2& x, const QVec2& y);

// ---------------------------------------------------------------- Lie-theoretic engine

// -1/4 b([X,Y],[Z,W]) for the biinvariant metric, so that sec(X,Y) = |[X,Y]|^2/4.
double biinvariant_riemann(const QMat& X, const QMat& Y, const QMat& Z, const QMat& W);

// Left-invariant metric on S^3 x ... x S^3 x Sp(2); S^3 factors use coordinates over i, j, k
// and carry l^2 times the unit metric, the Sp(2) block uses lie_coords.
class LieAlgebraMetric {
 public:
  LieAlgebraMetric(std::vector<double> s3_scale2, const Eigen::Matrix<double, 10, 10>& sp2_metric);

  int dim() const { return dim_; }
  int factors() const { return r_; }
  const Eigen::MatrixXd& M() const { return M_; }
  Eigen::VectorXd bracket(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  double inner(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const { return X.dot(M_ * Y); }
  // Levi-Civita connection on left-invariant fields.
  Eigen::VectorXd nabla(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  Eigen::VectorXd curvature(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z) const;
  double riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                 const Eigen::VectorXd& W) const;

 private:
  int r_, dim_;
  Eigen::MatrixXd M_, Minv_;
  std::vector<Eigen::VectorXd> C_;  // [e_a, e_b] at a*dim + b
  std::vector<Eigen::VectorXd> N_;  // nabla(e_a, e_b)
};

// Killing field of a left action: right-invariant part generated by `right`, plus left-invariant `left`.
struct KillingGenerator {
  Eigen::VectorXd right;
  Eigen::VectorXd left;
};

// Riemannian submersion of a left-invariant metric by the isometric action generating the given fields,
// evaluated at p = (1, ..., 1, Q).
class QuotientCurvature {
 public:
  QuotientCurvature(std::shared_ptr<const LieAlgebraMetric> G, const Sp2Point& Q, std::vector<KillingGenerator> fields);

  const LieAlgebraMetric& group() const { return *G_; }
  int vertical_dim() const { return static_cast<int>(V_.size()); }
  const std::vector<Eigen::VectorXd>& vertical() const { return V_; }
  Eigen::VectorXd horizontal_part(const Eigen::VectorXd& X) const;
  // nabla_X of the a-th vertical Killing field.
  Eigen::VectorXd nabla_vertical(const Eigen::VectorXd& X, int a) const;
  // Coefficients of A_X Y on the vertical fields.
  Eigen::VectorXd a_coeffs(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const;
  double a_inner(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                 const Eigen::VectorXd& W) const;
  // Base curvature tensor of horizontal vectors.
  double base_riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                      const Eigen::VectorXd& W) const;
  // Full base tensor on horizontal vectors h_0..h_{n-1}; entry ((i*n+j)*n+k)*n+l.
  std::vector<double> base_tensor(const std::vector<Eigen::VectorXd>& h) const;

 private:
  Eigen::VectorXd ad_inv(const Eigen::VectorXd& X) const;  // Ad_{p^{-1}}
  std::shared_ptr<const LieAlgebraMetric> G_;
  Sp2Point Q_;
  std::vector<KillingGenerator> fields_;
  std::vector<Eigen::VectorXd> V_;  // vertical values at p
  std::vector<Eigen::MatrixXd> NV_;  // X -> nabla_X V_a
  Eigen::MatrixXd GV_;
  Eigen::LDLT<Eigen::MatrixXd> GVfac_;
};

enum class Space { Sp2, E20 };

// Exact curvature of Sp(2) or E_{2,0} carrying the split metric deformed along A^u x A^d, realised as a
// quotient of S^3 x S^3 x Sp(2) (factors with infinite scale omitted). No range check on nu, so nu = 1
// is allowed for the connection-metric rescaling identities.
class ExactModel {
 public:
  ExactModel(double nu1, double nu2, Scale l1u, Scale l1d, Space space, const Sp2Point& Q);
  ExactModel(const MetricParams& p, Space space, const Sp2Point& Q) : ExactModel(p.nu1, p.nu2, p.l1u, p.l1d, space, Q) {}

  Space space() const { return space_; }
  const Sp2Point& point() const { return Q_; }
  // Horizontal lift to the total group of a tangent vector at Q (for E20 this also drops the A_{2,0} part).
  Eigen::VectorXd lift(const TangentVec& V) const;
  double inner(const TangentVec& X, const TangentVec& Y) const;
  double riemann(const TangentVec& X, const TangentVec& Y, const TangentVec& Z, const TangentVec& W) const;
  double curv(const TangentVec& u, const TangentVec& v) const { return riemann(u, v, v, u); }
  double sectional(const TangentVec& u, const TangentVec& v) const;
  // |A|^2 of the submersion onto the space, for the lifts of u, v.
  double a_norm2(const TangentVec& u, const TangentVec& v) const;
  // Orthonormal basis of the space's tangent space at the image of Q, as vectors at Q
  // (10 for Sp2, 7 for E20 horizontal for q20) in the deformed metric on Sp(2).
  std::vector<TangentVec> tangent_basis() const;
  const QuotientCurvature& quotient() const { return *quot_; }

 private:
  Space space_;
  Sp2Point Q_;
  int r_;
  std::unique_ptr<QuotientCurvature> quot_;
};

// ---------------------------------------------------------------- closed forms for the split metric

// Planes inside V1 (or V2) spanned by Q diag(beta1, 0), Q diag(beta2, 0): nu^2 |beta1 x beta2|^2.
double closed_fiber_curv(double nu, const Quat& beta1, const Quat& beta2);
// Planes inside H via the connection-metric formula for the first-column projection.
double closed_horizontal_curv(const Sp2Point& Q, const TangentVec& z1, const TangentVec& z2, double nu1, double nu2);
// |A^1_z v1 + A^2_z v2|^2 with both terms built from hopf_A; throws if the inputs are in the wrong subspaces.
double vertizontal_curv(const Sp2Point& Q, const TangentVec& z, const TangentVec& v1, const TangentVec& v2, double nu1,
                        double nu2);
// The two A-tensor vectors of vertizontal_curv, as tangent vectors in H.
TangentVec vertizontal_A1(const Sp2Point& Q, const TangentVec& z, const TangentVec& v1, double nu1);
TangentVec vertizontal_A2(const Sp2Point& Q, const TangentVec& z, const TangentVec& v2, double nu2);
// <R(e1, e2) e3, sigma> for e1, e3 in H, e2 in V1, sigma in V2: -<A^1_{e3} e2, A^2_{e1} sigma>.
double closed_mixed_component(const Sp2Point& Q, const TangentVec& e1, const TangentVec& e2, const TangentVec& e3,
                              const TangentVec& sigma, double nu1, double nu2);

// Rescaling rules for a principal bundle with fibre scale t.
enum class ConnectionRule { Untagged, HorizontalIII, VerticalIV, VertizontalV, MixedVI, ScalingVII };

struct ConnectionArgs {
  double base_value = 0;  // base curvature of the projected horizontal plane (rule iii)
  double a_norm2 = 0;     // |A|^2 at unit fibre scale (rules iii, v)
  double unit_value = 0;  // the same component at unit fibre scale (rules iv, vii)
};

double connection_metric_component(double t, ConnectionRule rule, const ConnectionArgs& args);

}  // namespace sp2lab
