#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "sp2lab/curvature.hpp"
#include "sp2lab/metric.hpp"
#include "sp2lab/sp2.hpp"

namespace sp2lab {

// h: S^7 -> S^4 (Hopf), p21 / p2_2: Sp(2) -> S^7 onto the first / second column,
// q20: Sp(2) -> E20 = Sp(2)/A_{2,0}, p20: E20 -> S^4 (quotient by the induced A^r).
enum class SubmersionKind { H, P21, P2_2, Q20, P20 };

struct SubmersionDescriptor {
  SubmersionKind kind;
  std::string name() const;
  // Action whose orbits are the fibres on Sp(2); throws for h and p20.
  ActionDescriptor fibre_action() const;
};

SubmersionDescriptor submersion(SubmersionKind kind);
SubmersionDescriptor parse_submersion(const std::string& name);

// Fibre directions N i, N j, N k of the Hopf map at N.
std::array<QVec2, 3> hopf_vertical(const QVec2& N);

// Vertical space at Q as three tangent vectors. For p20 these are the A^r killing fields made
// horizontal for q20 under `metric` (required); h is not defined on Sp(2) and throws.
std::vector<TangentVec> vertical_space(const SubmersionDescriptor& sub, const Sp2Point& Q,
                                       const MetricEvaluator* metric = nullptr);

// Finite-difference A- and T-tensors of p21, p2_2 or q20 at Q for a metric on Sp(2).
// Vertical vectors are extended as constant combinations of killing fields.
class SubmersionFd {
 public:
  SubmersionFd(const SubmersionDescriptor& sub, MetricPtr metric, const Sp2Point& Q, const FdOptions& opt = {});

  const std::vector<TangentVec>& vertical() const { return K_; }
  TangentVec vertical_part(const TangentVec& V) const;
  TangentVec horizontal_part(const TangentVec& V) const { return V - vertical_part(V); }
  // Largest |<X, K_a>| / (|X| |K_a|).
  double horizontality_residual(const TangentVec& X) const;
  // nabla_X of the a-th killing field.
  TangentVec nabla_killing(const TangentVec& X, int a) const;
  // A_X Y for X horizontal: vertical part of nabla_X Y for Y horizontal, horizontal part for Y vertical.
  // Throws std::invalid_argument if X is not horizontal.
  TangentVec A(const TangentVec& X, const TangentVec& Y) const;
  // T_U V = horizontal part of nabla_U V for vertical U, V.
  TangentVec T(const TangentVec& U, const TangentVec& V) const;
  double a_norm2(const TangentVec& X, const TangentVec& Y) const;
  // Total-space sectional curvature plus 3 |A_u v|^2 over the area form; plane must be horizontal.
  double base_sectional(const TangentVec& u, const TangentVec& v) const;
  double total_sectional(const TangentVec& u, const TangentVec& v) const { return fd_.sectional(u, v); }
  const Sp2Fd& fd() const { return fd_; }

 private:
  Eigen::VectorXd killing_coords(int a, const Eigen::VectorXd& x) const;
  TangentVec from_coords(const Eigen::VectorXd& c) const;

  SubmersionDescriptor sub_;
  MetricPtr g_;
  Sp2Point Q_;
  Sp2Fd fd_;
  std::vector<TangentVec> K_;
  Eigen::MatrixXd GK_;
  std::vector<Eigen::MatrixXd> dK_;  // chart jacobian of each killing field
  std::vector<Eigen::VectorXd> K0_;  // chart coordinates at Q
};

TangentVec numerical_A(const SubmersionDescriptor& sub, MetricPtr metric, const TangentVec& X, const TangentVec& Y,
                       const Sp2Point& Q);
double oneill_base_sectional(const SubmersionDescriptor& sub, MetricPtr metric, const TangentVec& u,
                             const TangentVec& v, const Sp2Point& Q);

// Vectors at the orbit point R_theta Q0(t), built from the diagonal-t point and rotated.
// x, y, eta1, eta2 lie in H; first[i] = Q diag(beta_i, 0), second[i] = Q diag(0, beta_i)
// for beta = (alpha, gamma1, gamma2), i.e. the pieces of frakv, vartheta1, vartheta2.
struct OrbitFrame {
  Sp2Point at;
  double theta = 0, t = 0;
  Frame frame;
  TangentVec x, y, eta1, eta2;
  std::array<TangentVec, 3> first, second;
};

OrbitFrame orbit_frame(double theta, double t, const Frame& frame = {});

// q20-horizontal vectors for the split metric, ordered x, y, eta1, eta2, frakv, vartheta1, vartheta2.
struct HorizontalBasis {
  TangentVec x20, y20, eta1, eta2, frakv, theta1, theta2;
  Sp2Point at;
  MetricParams params;
  double theta = 0, t = 0;
  bool degenerate = false;  // t = pi/4 family

  std::array<TangentVec, 7> all() const { return {x20, y20, eta1, eta2, frakv, theta1, theta2}; }
};

// Throws std::runtime_error when a vector fails orthogonality to the A_{2,0} orbit (residual above 1e-8).
HorizontalBasis q20_horizontal_basis(double t, const MetricParams& params, double theta = 0.0,
                                     const Frame& frame = {});

// Largest normalised inner product with the A_{2,0} killing fields under the split metric.
double q20_orthogonality_residual(const HorizontalBasis& B);

// Image of a vector horizontal for the split metric in the horizontal space of the deformed metric.
TangentVec to_deformed(const MetricParams& params, const Sp2Point& Q, const TangentVec& V);

struct OrbitProjection {
  Eigen::Matrix<double, 2, 3> gram;
  int rank = 0;
};

// Biinvariant inner products of (u, v) against the orbit's killing basis, with its numerical rank.
OrbitProjection orbit_projection_gram(const TangentVec& u, const TangentVec& v, const ActionDescriptor& action,
                                      const Sp2Point& Q, double rel_tol = 1e-9);
// Same, measured with the split metric g_{nu1,nu2} at Q (the base metric of the Cheeger deformation).
// Agrees with the biinvariant version up to a positive factor only when nu1 = nu2 = 1/sqrt(2).
OrbitProjection orbit_projection_gram_split(double nu1, double nu2, const TangentVec& u, const TangentVec& v,
                                            const ActionDescriptor& action, const Sp2Point& Q,
                                            double rel_tol = 1e-9);

}  // namespace sp2lab
