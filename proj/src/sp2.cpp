#include "sp2lab/sp2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sp2lab {

QMat QMat::adjoint() const {
  QMat m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.e[r][c] = e[c][r].conj();
  return m;
}

double QMat::norm2() const {
  double s = 0;
  for (const auto& row : e)
    for (const auto& q : row) s += q.norm2();
  return s;
}

QMat operator*(const QMat& A, const QMat& B) {
  QMat m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.e[r][c] = A.e[r][0] * B.e[0][c] + A.e[r][1] * B.e[1][c];
  return m;
}

QMat operator+(const QMat& A, const QMat& B) {
  QMat m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.e[r][c] = A.e[r][c] + B.e[r][c];
  return m;
}

QMat operator-(const QMat& A, const QMat& B) {
  QMat m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.e[r][c] = A.e[r][c] - B.e[r][c];
  return m;
}

QMat operator*(double s, const QMat& A) {
  QMat m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m.e[r][c] = s * A.e[r][c];
  return m;
}

QMat bracket(const QMat& A, const QMat& B) { return A * B - B * A; }

double b_lie(const QMat& X, const QMat& Y) {
  double s = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s += dot(X.e[r][c], Y.e[r][c]);
  return 0.5 * s;
}

double max_abs_diff(const QMat& A, const QMat& B) {
  double m = 0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(A.e[r][c][k] - B.e[r][c][k]));
  return m;
}

QMat Sp2Point::mat() const {
  QMat m;
  m.e[0][0] = a;
  m.e[0][1] = b;
  m.e[1][0] = c;
  m.e[1][1] = d;
  return m;
}

double constraint_residual(const Sp2Point& Q) {
  const Quat o = herm(Q.col1(), Q.col2());
  double r = std::abs(norm2(Q.col1()) - 1.0);
  r = std::max(r, std::abs(norm2(Q.col2()) - 1.0));
  for (int k = 0; k < 4; ++k) r = std::max(r, std::abs(o[k]));
  return r;
}

double max_abs_diff(const Sp2Point& P, const Sp2Point& Q) { return max_abs_diff(P.mat(), Q.mat()); }

QMat TangentVec::mat() const {
  QMat m;
  m.e[0][0] = c1[0];
  m.e[1][0] = c1[1];
  m.e[0][1] = c2[0];
  m.e[1][1] = c2[1];
  return m;
}

TangentVec operator+(const TangentVec& X, const TangentVec& Y) { return {X.c1 + Y.c1, X.c2 + Y.c2}; }
TangentVec operator-(const TangentVec& X, const TangentVec& Y) { return {X.c1 - Y.c1, X.c2 - Y.c2}; }
TangentVec operator-(const TangentVec& X) { return {-X.c1, -X.c2}; }
TangentVec operator*(double s, const TangentVec& X) { return {s * X.c1, s * X.c2}; }

double re_dot(const TangentVec& X, const TangentVec& Y) { return dot(X.c1, Y.c1) + dot(X.c2, Y.c2); }

double max_abs(const TangentVec& X) {
  double m = 0;
  for (const auto* col : {&X.c1, &X.c2})
    for (const auto& q : *col)
      for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(q[k]));
  return m;
}

double tangent_residual(const Sp2Point& Q, const TangentVec& X) {
  double r = std::abs(dot(Q.col1(), X.c1));
  r = std::max(r, std::abs(dot(Q.col2(), X.c2)));
  const Quat o = herm(X.c1, Q.col2()) + herm(Q.col1(), X.c2);
  for (int k = 0; k < 4; ++k) r = std::max(r, std::abs(o[k]));
  return r;
}

void require_tangent(const Sp2Point& Q, const TangentVec& X, double tol) {
  if (tangent_residual(Q, X) > tol) throw std::invalid_argument("vector is not tangent to Sp(2) at the given point");
}

TangentVec left_translate(const Sp2Point& Q, const QMat& X) { return TangentVec::from(Q.mat() * X); }

QMat to_lie(const Sp2Point& Q, const TangentVec& V) { return Q.mat().adjoint() * V.mat(); }

const std::array<QMat, 10>& lie_basis() {
  static const std::array<QMat, 10> basis = [] {
    std::array<QMat, 10> b;
    for (int k = 0; k < 3; ++k) {
      b[k] = QMat::diag(kImagUnits[k], Quat{});
      b[3 + k] = QMat::diag(Quat{}, kImagUnits[k]);
    }
    b[6] = QMat::offdiag(Quat::one());
    for (int k = 0; k < 3; ++k) b[7 + k] = QMat::offdiag(kImagUnits[k]);
    return b;
  }();
  return basis;
}

LieCoords lie_coords(const QMat& X) {
  LieCoords x;
  const Quat q = 0.5 * (X.e[1][0] - X.e[0][1].conj());
  for (int k = 0; k < 3; ++k) {
    x[k] = X.e[0][0][k + 1];
    x[3 + k] = X.e[1][1][k + 1];
  }
  for (int k = 0; k < 4; ++k) x[6 + k] = q[k];
  return x;
}

QMat lie_from_coords(const LieCoords& x) {
  QMat m;
  const auto& b = lie_basis();
  for (int i = 0; i < 10; ++i) m = m + x[i] * b[i];
  return m;
}

void Frame::validate() const {
  const double tol = 1e-12;
  for (const Quat* q : {&alpha, &gamma1, &gamma2})
    if (std::abs(q->w) > tol || std::abs(q->norm2() - 1.0) > tol)
      throw std::invalid_argument("frame units must be unit imaginary quaternions");
  const Quat p = gamma1 * gamma2 - alpha;
  if (p.norm() > 1e-10) throw std::invalid_argument("frame must satisfy gamma1 gamma2 = alpha");
}

Sp2Point orbit_point(double theta, double t, const Quat& alpha) {
  const double ct = std::cos(theta), st = std::sin(theta);
  QMat R;
  R.e[0][0] = Quat(ct);
  R.e[0][1] = Quat(st);
  R.e[1][0] = Quat(-st);
  R.e[1][1] = Quat(ct);
  QMat P;
  P.e[0][0] = Quat(std::cos(t));
  P.e[1][1] = Quat(std::cos(t));
  P.e[0][1] = std::sin(t) * alpha;
  P.e[1][0] = std::sin(t) * alpha;
  return Sp2Point::from(R * P);
}

Sp2Point representative_point(double theta, double t, const Quat& alpha) {
  const double eps = 1e-12;
  if (!(t >= -eps && t <= std::numbers::pi / 4 + eps))
    throw std::invalid_argument("representative_point: t must lie in [0, pi/4]");
  if (!(theta >= -eps && theta < std::numbers::pi))
    throw std::invalid_argument("representative_point: theta must lie in [0, pi)");
  if (std::abs(alpha.w) > eps || std::abs(alpha.norm2() - 1.0) > 1e-10)
    throw std::invalid_argument("representative_point: alpha must be a unit imaginary quaternion");
  return orbit_point(theta, t, alpha);
}

Splitting splitting_at(const Sp2Point& Q) {
  Splitting s;
  s.at = Q;
  for (int k = 0; k < 3; ++k) {
    s.basisV1[k] = left_translate(Q, QMat::diag(kImagUnits[k], Quat{}));
    s.basisV2[k] = left_translate(Q, QMat::diag(Quat{}, kImagUnits[k]));
  }
  s.basisH[0] = left_translate(Q, QMat::offdiag(Quat::one()));
  for (int k = 0; k < 3; ++k) s.basisH[1 + k] = left_translate(Q, QMat::offdiag(kImagUnits[k]));
  return s;
}

SplitParts split(const Sp2Point& Q, const TangentVec& V) {
  const QMat X = to_lie(Q, V);
  const Quat q = 0.5 * (X.e[1][0] - X.e[0][1].conj());
  return {left_translate(Q, QMat::offdiag(q)), left_translate(Q, QMat::diag(X.e[0][0].im(), Quat{})),
          left_translate(Q, QMat::diag(Quat{}, X.e[1][1].im()))};
}

std::string ActionDescriptor::name() const {
  switch (kind) {
    case ActionKind::Up: return "A^u";
    case ActionKind::Down: return "A^d";
    case ActionKind::Left: return "A^l";
    case ActionKind::Right: return "A^r";
    case ActionKind::Diag20: return "A_20";
  }
  return "?";
}

ActionDescriptor action_of(ActionKind kind) {
  switch (kind) {
    case ActionKind::Up: return {kind, Side::Left, 0};
    case ActionKind::Down: return {kind, Side::Left, 1};
    case ActionKind::Left: return {kind, Side::Right, 0};
    case ActionKind::Right: return {kind, Side::Right, 1};
    case ActionKind::Diag20: return {kind, Side::Left, -1};
  }
  throw std::invalid_argument("unknown action");
}

QMat action_matrix(const ActionDescriptor& a, const Quat& g) {
  const Quat p = a.side == Side::Left ? g : g.conj();
  switch (a.block) {
    case 0: return QMat::diag(p, Quat::one());
    case 1: return QMat::diag(Quat::one(), p);
    default: return QMat::diag(p, p);
  }
}

Sp2Point act(const ActionDescriptor& a, const Quat& g, const Sp2Point& Q) {
  const QMat M = action_matrix(a, g);
  return Sp2Point::from(a.side == Side::Left ? M * Q.mat() : Q.mat() * M);
}

TangentVec push_forward(const ActionDescriptor& a, const Quat& g, const TangentVec& V) {
  const QMat M = action_matrix(a, g);
  return TangentVec::from(a.side == Side::Left ? M * V.mat() : V.mat() * M);
}

TangentVec killing_field(const ActionDescriptor& a, const Quat& k, const Sp2Point& Q) {
  if (std::abs(k.w) > 1e-12) throw std::invalid_argument("killing_field: generator must be imaginary");
  // d/dt of diag(exp(tk), .) on the left, or of diag(exp(-tk), .) on the right.
  QMat D;
  if (a.block != 1) D.e[0][0] = k;
  if (a.block != 0) D.e[1][1] = k;
  if (a.side == Side::Left) return TangentVec::from(D * Q.mat());
  return TangentVec::from(Q.mat() * (-1.0 * D));
}

CMat embed(const QMat& X) {
  CMat M(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const Quat& q = X.e[r][c];
      M(2 * r, 2 * c) = {q.w, q.x};
      M(2 * r, 2 * c + 1) = {q.y, q.z};
      M(2 * r + 1, 2 * c) = {-q.y, q.z};
      M(2 * r + 1, 2 * c + 1) = {q.w, -q.x};
    }
  return M;
}

QMat unembed(const CMat& M) {
  QMat X;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const auto p = M(2 * r, 2 * c), q = M(2 * r, 2 * c + 1);
      X.e[r][c] = {p.real(), p.imag(), q.real(), q.imag()};
    }
  return X;
}

CMat expm(const CMat& A, double tol) {
  const double n1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (n1 > 0.5) s = static_cast<int>(std::ceil(std::log2(n1 / 0.5)));
  const CMat B = A / std::ldexp(1.0, s);
  const double nb = n1 / std::ldexp(1.0, s);
  CMat sum = CMat::Identity(A.rows(), A.cols());
  CMat term = sum;
  for (int k = 1; k < 60; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
    // Remaining terms are bounded by a geometric series with ratio nb/(k+1).
    const double r = nb / (k + 1);
    const double tn = term.cwiseAbs().colwise().sum().maxCoeff();
    if (r < 1 && tn * r / (1 - r) <= tol) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

QMat qexp(const QMat& X) { return unembed(expm(embed(X))); }

QMat qexp_derivative(const QMat& X, const QMat& E) {
  const CMat x = embed(X), e = embed(E);
  CMat big = CMat::Zero(8, 8);
  big.block(0, 0, 4, 4) = x;
  big.block(4, 4, 4, 4) = x;
  big.block(0, 4, 4, 4) = e;
  const CMat ex = expm(big);
  return unembed(ex.block(0, 4, 4, 4));
}

const std::array<QMat, 10>& chart_basis() {
  static const std::array<QMat, 10> basis = [] {
    std::array<QMat, 10> out;
    const auto& raw = lie_basis();
    for (int i = 0; i < 10; ++i) {
      QMat v = raw[i];
      for (int j = 0; j < i; ++j) v = v - b_lie(v, out[j]) * out[j];
      out[i] = (1.0 / std::sqrt(b_lie(v, v))) * v;
    }
    return out;
  }();
  return basis;
}

namespace {
QMat chart_lie(const ChartCoords& x) {
  QMat X;
  const auto& E = chart_basis();
  for (int i = 0; i < 10; ++i) X = X + x[i] * E[i];
  return X;
}
}  // namespace

Sp2Point exp_chart(const Sp2Point& Q, const ChartCoords& x, double radius) {
  if (x.norm() > radius) throw std::invalid_argument("exp_chart: coordinates outside chart radius");
  return Sp2Point::from(Q.mat() * qexp(chart_lie(x)));
}

std::array<TangentVec, 10> chart_frame(const Sp2Point& Q, const ChartCoords& x) {
  const QMat X = chart_lie(x);
  const auto& E = chart_basis();
  std::array<TangentVec, 10> out;
  for (int i = 0; i < 10; ++i) out[i] = TangentVec::from(Q.mat() * qexp_derivative(X, E[i]));
  return out;
}

ChartCoords chart_coords(const Sp2Point& Q, const TangentVec& V) {
  const QMat X = to_lie(Q, V);
  const auto& E = chart_basis();
  ChartCoords c;
  for (int i = 0; i < 10; ++i) c[i] = b_lie(X, E[i]);
  return c;
}

}  // namespace sp2lab
