#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "sp2lab/sp2.hpp"

namespace sp2lab {

// Deformation scale l; Infinite means the deformation is skipped.
struct Scale {
  double value = 1.0;
  bool infinite = false;

  static Scale inf() { return {0.0, true}; }
  static Scale of(double v) { return {v, false}; }
};

std::string to_string(const Scale& s);
// Accepts a positive number or "inf".
Scale parse_scale(const std::string& text);

struct MetricParams {
  double nu1 = 0.5;
  double nu2 = 0.5;
  Scale l1u = Scale::of(1.0);
  Scale l1d = Scale::of(1.0);

  // Throws std::invalid_argument unless 0 < nu <= 1/sqrt(2) and finite scales are positive.
  void validate() const;
};

inline constexpr double kNuMax = 0.70710678118654752440;

class MetricEvaluator {
 public:
  virtual ~MetricEvaluator() = default;
  // Gram matrix of the given tangent vectors at Q.
  virtual Eigen::MatrixXd gram(const Sp2Point& Q, const std::vector<TangentVec>& V) const = 0;
  virtual std::string describe() const = 0;

  double inner(const Sp2Point& Q, const TangentVec& X, const TangentVec& Y) const;
  double norm2(const Sp2Point& Q, const TangentVec& X) const { return inner(Q, X, X); }
};

using MetricPtr = std::shared_ptr<const MetricEvaluator>;

// Half the euclidean product of the column pairs.
double biinvariant_inner(const TangentVec& X, const TangentVec& Y);
// V1 scaled by 2 nu1^2, V2 by 2 nu2^2, H unchanged.
double split_inner(double nu1, double nu2, const Sp2Point& Q, const TangentVec& X, const TangentVec& Y);
// The split metric on sp(2) in lie_coords: diag(nu1^2 x3, nu2^2 x3, 1 x4).
Eigen::Matrix<double, 10, 10> split_lie_metric(double nu1, double nu2);

MetricPtr biinvariant_metric();
MetricPtr split_metric(double nu1, double nu2);

// Cheeger deformation of base by a product of S^3 actions, one scale per factor.
// Factors with an infinite scale are dropped.
MetricPtr cheeger_deform(MetricPtr base, const std::vector<ActionDescriptor>& actions, const std::vector<Scale>& scales);
MetricPtr cheeger_deform(MetricPtr base, const ActionDescriptor& action, Scale l);

// Split metric deformed jointly by A^u x A^d.
MetricPtr full_metric(const MetricParams& params);

// Fiber scale produced by deforming the biinvariant metric with scale l along A^l or A^r.
double nu_of_scale(Scale l);
// Inverse of nu_of_scale; 1/sqrt(2) maps to Infinite.
Scale scale_of_nu(double nu);

// Killing fields K_{a} of the listed actions for generators i, j, k of each factor, in order.
std::vector<TangentVec> killing_basis(const Sp2Point& Q, const std::vector<ActionDescriptor>& actions);

struct CheegerLift {
  Eigen::VectorXd a;  // S^3-factor coefficients over i, j, k per action
  TangentVec X;       // Z - K_a, orthogonal to the orbit in the base metric
  double lambda1 = 0;  // deformation scale of the first factor
  double lambda2 = 0;  // base length of the unit-generator killing field of the first factor
};

CheegerLift cheeger_horizontal_correspondence(const MetricEvaluator& base, const Sp2Point& Q, const TangentVec& Z,
                                              const std::vector<ActionDescriptor>& actions,
                                              const std::vector<Scale>& scales);

// Image under the quotient map of the horizontal lift of Z: Z + K_{(l^2)^{-1} m(Z)}.
// Sends planes horizontal for an isometric action commuting with the deformation in the base metric
// to planes horizontal in the deformed metric.
TangentVec cheeger_transport(const MetricEvaluator& base, const Sp2Point& Q, const TangentVec& Z,
                             const std::vector<ActionDescriptor>& actions, const std::vector<Scale>& scales);

}  // namespace sp2lab
