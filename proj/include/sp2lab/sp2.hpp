#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "sp2lab/quat.hpp"

namespace sp2lab {

// 2x2 quaternionic matrix, e[row][col].
struct QMat {
  Quat e[2][2];

  static QMat zero() { return {}; }
  static QMat identity() {
    QMat m;
    m.e[0][0] = Quat::one();
    m.e[1][1] = Quat::one();
    return m;
  }
  static QMat diag(const Quat& p, const Quat& q) {
    QMat m;
    m.e[0][0] = p;
    m.e[1][1] = q;
    return m;
  }
  // Off-diagonal Lie algebra element (0, -conj(q); q, 0).
  static QMat offdiag(const Quat& q) {
    QMat m;
    m.e[0][1] = -q.conj();
    m.e[1][0] = q;
    return m;
  }
  QMat adjoint() const;
  double norm2() const;
};

QMat operator*(const QMat& A, const QMat& B);
QMat operator+(const QMat& A, const QMat& B);
QMat operator-(const QMat& A, const QMat& B);
QMat operator*(double s, const QMat& A);
QMat bracket(const QMat& A, const QMat& B);
// Biinvariant inner product on sp(2): half the sum of entrywise euclidean products.
double b_lie(const QMat& X, const QMat& Y);
double max_abs_diff(const QMat& A, const QMat& B);

// Point of Sp(2): entries of the matrix, columns N1 = (a, c) and N2 = (b, d).
struct Sp2Point {
  Quat a, b, c, d;

  static Sp2Point identity() { return {Quat::one(), Quat{}, Quat{}, Quat::one()}; }
  static Sp2Point from(const QMat& m) { return {m.e[0][0], m.e[0][1], m.e[1][0], m.e[1][1]}; }
  QMat mat() const;
  QVec2 col1() const { return {a, c}; }
  QVec2 col2() const { return {b, d}; }
};

// Largest violation of unit columns and column orthogonality.
double constraint_residual(const Sp2Point& Q);
double max_abs_diff(const Sp2Point& P, const Sp2Point& Q);

// Tangent vector stored as the pair of column derivatives.
struct TangentVec {
  QVec2 c1{}, c2{};

  static TangentVec from(const QMat& m) { return {{m.e[0][0], m.e[1][0]}, {m.e[0][1], m.e[1][1]}}; }
  QMat mat() const;
};

TangentVec operator+(const TangentVec& X, const TangentVec& Y);
TangentVec operator-(const TangentVec& X, const TangentVec& Y);
TangentVec operator-(const TangentVec& X);
TangentVec operator*(double s, const TangentVec& X);
// Sum of Re<c, c'> over both columns (euclidean product on H^2 x H^2).
double re_dot(const TangentVec& X, const TangentVec& Y);
double max_abs(const TangentVec& X);

// Residual of the tangency conditions of X at Q.
double tangent_residual(const Sp2Point& Q, const TangentVec& X);
// Throws std::invalid_argument when X is not tangent at Q.
void require_tangent(const Sp2Point& Q, const TangentVec& X, double tol = 1e-8);

// Left translation Q * X of a Lie algebra element and its inverse Q^* V.
TangentVec left_translate(const Sp2Point& Q, const QMat& X);
QMat to_lie(const Sp2Point& Q, const TangentVec& V);

// Coordinates on sp(2) against the basis diag(i,j,k; 0), diag(0; i,j,k), offdiag(1,i,j,k).
using LieCoords = Eigen::Matrix<double, 10, 1>;
const std::array<QMat, 10>& lie_basis();
LieCoords lie_coords(const QMat& X);
QMat lie_from_coords(const LieCoords& x);

// Imaginary frame (alpha, gamma1, gamma2) with gamma1 gamma2 = alpha.
struct Frame {
  Quat alpha = Quat::i();
  Quat gamma1 = Quat::j();
  Quat gamma2 = Quat::k();
  // Throws if the units are not orthonormal imaginary or gamma1 gamma2 != alpha.
  void validate() const;
};

// The rotation by theta applied to the diagonal-t point, without range checks.
Sp2Point orbit_point(double theta, double t, const Quat& alpha);
// Same point, rejecting t outside [0, pi/4], theta outside [0, pi) or a non-unit-imaginary alpha.
Sp2Point representative_point(double theta, double t, const Quat& alpha);

// V1, V2 and H at a point.
struct Splitting {
  std::array<TangentVec, 3> basisV1;
  std::array<TangentVec, 3> basisV2;
  std::array<TangentVec, 4> basisH;
  Sp2Point at;
};
Splitting splitting_at(const Sp2Point& Q);

struct SplitParts {
  TangentVec h, v1, v2;
};
SplitParts split(const Sp2Point& Q, const TangentVec& V);

enum class ActionKind { Up, Down, Left, Right, Diag20 };
enum class Side { Left, Right };

struct ActionDescriptor {
  ActionKind kind;
  Side side;
  int block;  // 0 or 1 for the multiplied diagonal slot, -1 for both
  std::string name() const;
};

ActionDescriptor action_of(ActionKind kind);
// The left or right factor by which g acts.
QMat action_matrix(const ActionDescriptor& act, const Quat& g);
Sp2Point act(const ActionDescriptor& a, const Quat& g, const Sp2Point& Q);
// Differential of act(a, g, .) applied to a tangent vector.
TangentVec push_forward(const ActionDescriptor& a, const Quat& g, const TangentVec& V);
// d/dt act(a, exp(t k), Q) at t = 0.
TangentVec killing_field(const ActionDescriptor& a, const Quat& k, const Sp2Point& Q);

// Complex 2x2-block embedding of quaternionic matrices.
using CMat = Eigen::MatrixXcd;
CMat embed(const QMat& X);
QMat unembed(const CMat& M);
// Matrix exponential by scaling and squaring of a Taylor series with a tail bound.
CMat expm(const CMat& A, double tol = 1e-16);
QMat qexp(const QMat& X);
// d/ds exp(X + s E) at s = 0, from the block exponential of [[X, E], [0, X]].
QMat qexp_derivative(const QMat& X, const QMat& E);

using ChartCoords = Eigen::Matrix<double, 10, 1>;
// Basis orthonormal for the biinvariant metric, Gram-Schmidt at the identity, ordered V1, V2, H.
const std::array<QMat, 10>& chart_basis();
// Q exp(sum x_i E_i); throws if |x| exceeds radius.
Sp2Point exp_chart(const Sp2Point& Q, const ChartCoords& x, double radius = 0.5);
// Coordinate vectors of the chart at exp_chart(Q, x).
std::array<TangentVec, 10> chart_frame(const Sp2Point& Q, const ChartCoords& x);
// Chart coordinates at x = 0 of a tangent vector at Q.
ChartCoords chart_coords(const Sp2Point& Q, const TangentVec& V);

}  // namespace sp2lab
