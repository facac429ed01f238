#include "sp2lab/curvature.hpp"

#include <cmath>
#include <stdexcept>

namespace sp2lab {

const char* method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::LieTheoretic: return "lie-theoretic";
    case Method::FiniteDifference: return "finite-difference";
  }
  return "?";
}

Plane make_plane(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& x, const TangentVec& y) {
  const Eigen::MatrixXd G = g.gram(Q, {x, y});
  const double nx = std::sqrt(G(0, 0));
  const double perp = G(1, 1) - G(0, 1) * G(0, 1) / G(0, 0);
  if (!(nx > 0) || !(perp > 1e-14 * G(1, 1))) throw std::invalid_argument("make_plane: vectors are dependent");
  Plane P;
  P.u = (1.0 / nx) * x;
  P.v = (1.0 / std::sqrt(perp)) * (y - (G(0, 1) / G(0, 0)) * x);
  return P;
}

// ---------------------------------------------------------------- finite differences

namespace {

struct Jet {
  Eigen::MatrixXd g;
  std::vector<Eigen::MatrixXd> d1;   // d_k g
  std::vector<Eigen::MatrixXd> d2;   // d_k d_l g at k*n + l
};

Jet metric_jet(const MetricField& f, int n, double h) {
  Jet J;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  J.g = f(zero);
  J.d1.resize(n);
  J.d2.resize(static_cast<std::size_t>(n * n));
  std::vector<Eigen::MatrixXd> plus(n), minus(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd x = zero;
    x[k] = h;
    plus[k] = f(x);
    x[k] = -h;
    minus[k] = f(x);
    J.d1[k] = (plus[k] - minus[k]) / (2 * h);
    J.d2[k * n + k] = (plus[k] - 2 * J.g + minus[k]) / (h * h);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Eigen::VectorXd x = zero;
      x[k] = h;
      x[l] = h;
      const Eigen::MatrixXd pp = f(x);
      x[l] = -h;
      const Eigen::MatrixXd pm = f(x);
      x[k] = -h;
      const Eigen::MatrixXd mm = f(x);
      x[l] = h;
      const Eigen::MatrixXd mp = f(x);
      J.d2[k * n + l] = (pp - pm - mp + mm) / (4 * h * h);
      J.d2[l * n + k] = J.d2[k * n + l];
    }
  return J;
}

double max_abs(const Eigen::MatrixXd& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

double raw_fd_sectional_on_sphere() {
  // Unit S^2 in R^3 around the north pole.
  const MetricField f = [](const Eigen::VectorXd& x) {
    Eigen::Vector3d p(x[0], x[1], 1.0);
    const double r = p.norm();
    const Eigen::Vector3d ph = p / r;
    Eigen::Matrix<double, 3, 2> F;
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[i] = 1;
      F.col(i) = (e - ph.dot(e) * ph) / r;
    }
    return Eigen::MatrixXd(F.transpose() * F);
  };
  const Jet J = metric_jet(f, 2, 1e-3);
  // R_{0110} from the second-derivative part of the tensor formula; first derivatives vanish at the pole.
  const double r = 0.5 * (J.d2[0 * 2 + 1](1, 0) - J.d2[0 * 2 + 0](1, 1) - J.d2[1 * 2 + 1](0, 0) + J.d2[1 * 2 + 0](0, 1));
  return r / (J.g(0, 0) * J.g(1, 1) - J.g(0, 1) * J.g(0, 1));
}

}  // namespace

double fd_curvature_sign() {
  static const double sign = [] {
    const double s = raw_fd_sectional_on_sphere();
    if (std::abs(std::abs(s) - 1.0) > 1e-4) throw std::runtime_error("fd sign calibration on the unit sphere failed");
    return s > 0 ? 1.0 : -1.0;
  }();
  return sign;
}

FdCurvature::FdCurvature(const MetricField& f, int n, const FdOptions& opt) : n_(n) {
  Jet J = metric_jet(f, n, opt.step);
  if (opt.richardson) {
    const Jet H = metric_jet(f, n, opt.step / 2);
    double scale = 1e-300, gap = 0;
    for (int k = 0; k < n; ++k) {
      const Eigen::MatrixXd d = (4 * H.d1[k] - J.d1[k]) / 3;
      gap = std::max(gap, max_abs(d - H.d1[k]));
      scale = std::max(scale, max_abs(d));
      J.d1[k] = d;
    }
    for (std::size_t k = 0; k < J.d2.size(); ++k) {
      const Eigen::MatrixXd d = (4 * H.d2[k] - J.d2[k]) / 3;
      gap = std::max(gap, max_abs(d - H.d2[k]));
      scale = std::max(scale, max_abs(d));
      J.d2[k] = d;
    }
    gap_ = gap / std::max(1.0, scale);
    if (gap_ > opt.gap_tol) throw std::runtime_error("fd_riemann: Richardson levels disagree, step size failure");
  }
  g_ = J.g;
  ginv_ = g_.inverse();
  // First-kind symbols Gamma_{m;ij} = (d_i g_jm + d_j g_im - d_m g_ij)/2.
  std::vector<double> G1(static_cast<std::size_t>(n * n * n));
  auto g1 = [&](int m, int i, int j) -> double& { return G1[static_cast<std::size_t>((m * n + i) * n + j)]; };
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g1(m, i, j) = 0.5 * (J.d1[i](j, m) + J.d1[j](i, m) - J.d1[m](i, j));
  gamma_.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int m = 0; m < n; ++m) s += ginv_(k, m) * g1(m, i, j);
        gamma_[static_cast<std::size_t>((k * n + i) * n + j)] = s;
      }
  auto gam = [&](int k, int i, int j) { return gamma_[static_cast<std::size_t>((k * n + i) * n + j)]; };
  auto dd = [&](int a, int b, int c, int d) { return J.d2[c * n + d](a, b); };  // d_c d_d g_ab
  const double sign = fd_curvature_sign();
  R_.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double r = 0.5 * (dd(j, l, i, k) - dd(j, k, i, l) - dd(i, l, j, k) + dd(i, k, j, l));
          for (int m = 0; m < n; ++m) r += g1(m, j, l) * gam(m, i, k) - g1(m, i, l) * gam(m, j, k);
          R_[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = sign * r;
        }
}

double FdCurvature::riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                            const Eigen::VectorXd& W) const {
  double s = 0;
  std::size_t idx = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double xy = X[i] * Y[j];
      if (xy == 0) {
        idx += static_cast<std::size_t>(n_ * n_);
        continue;
      }
      for (int k = 0; k < n_; ++k) {
        const double xyz = xy * Z[k];
        for (int l = 0; l < n_; ++l, ++idx) s += xyz * W[l] * R_[idx];
      }
    }
  return s;
}

double FdCurvature::sectional(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const double uu = u.dot(g_ * u), vv = v.dot(g_ * v), uv = u.dot(g_ * v);
  return curv(u, v) / (uu * vv - uv * uv);
}

Eigen::VectorXd FdCurvature::christoffel(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[k] += gamma_[static_cast<std::size_t>((k * n_ + i) * n_ + j)] * X[i] * Y[j];
  return out;
}

double FdCurvature::symmetry_residual() const {
  double r = 0, s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          const double v = at(i, j, k, l);
          s = std::max(s, std::abs(v));
          r = std::max(r, std::abs(v + at(j, i, k, l)));
          r = std::max(r, std::abs(v + at(i, j, l, k)));
          r = std::max(r, std::abs(v - at(k, l, i, j)));
        }
  return r / std::max(1.0, s);
}

double FdCurvature::bianchi_residual() const {
  double r = 0, s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
          s = std::max(s, std::abs(at(i, j, k, l)));
          r = std::max(r, std::abs(at(i, j, k, l) + at(j, k, i, l) + at(k, i, j, l)));
        }
  return r / std::max(1.0, s);
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, int n,
                            const FdOptions& opt) {
  auto level = [&](double h) {
    Eigen::MatrixXd J;
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x[k] = h;
      const Eigen::VectorXd p = f(x);
      x[k] = -h;
      const Eigen::VectorXd m = f(x);
      if (k == 0) J.resize(p.size(), n);
      J.col(k) = (p - m) / (2 * h);
    }
    return J;
  };
  const Eigen::MatrixXd A = level(opt.step);
  if (!opt.richardson) return A;
  const Eigen::MatrixXd B = level(opt.step / 2);
  return (4 * B - A) / 3;
}

MetricField sp2_metric_field(const MetricEvaluator& g, const Sp2Point& Q) {
  return [&g, Q](const Eigen::VectorXd& x) {
    const ChartCoords c = x;
    const Sp2Point P = exp_chart(Q, c);
    const auto F = chart_frame(Q, c);
    return g.gram(P, std::vector<TangentVec>(F.begin(), F.end()));
  };
}

Sp2Fd::Sp2Fd(const MetricEvaluator& g, const Sp2Point& Q, const FdOptions& opt)
    : Q_(Q), fd_(sp2_metric_field(g, Q), 10, opt) {}

double Sp2Fd::riemann(const TangentVec& X, const TangentVec& Y, const TangentVec& Z, const TangentVec& W) const {
  return fd_.riemann(chart_coords(Q_, X), chart_coords(Q_, Y), chart_coords(Q_, Z), chart_coords(Q_, W));
}

double Sp2Fd::sectional(const TangentVec& u, const TangentVec& v) const {
  return fd_.sectional(chart_coords(Q_, u), chart_coords(Q_, v));
}

double fd_riemann(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& X, const TangentVec& Y,
                  const TangentVec& Z, const TangentVec& W, const FdOptions& opt) {
  return Sp2Fd(g, Q, opt).riemann(X, Y, Z, W);
}

// ---------------------------------------------------------------- S^7 and the Hopf fibration

double berger_inner(const QVec2& N, double t, const QVec2& U, const QVec2& W) {
  double s = dot(U, W);
  for (const auto& b : kImagUnits) {
    const QVec2 Nb = N * b;
    s += (t * t - 1.0) * dot(U, Nb) * dot(W, Nb);
  }
  return s;
}

namespace {

using R8 = Eigen::Matrix<double, 8, 1>;

R8 to_r8(const QVec2& v) {
  R8 r;
  for (int k = 0; k < 4; ++k) {
    r[k] = v[0][k];
    r[4 + k] = v[1][k];
  }
  return r;
}

QVec2 from_r8(const R8& r) { return {Quat{r[0], r[1], r[2], r[3]}, Quat{r[4], r[5], r[6], r[7]}}; }

// Chart point and frame of N + sum x_i e_i, normalised.
void s7_chart(const QVec2& N, const std::array<QVec2, 7>& e, const Eigen::VectorXd& x, R8& p,
              std::array<R8, 7>& frame) {
  R8 q = to_r8(N);
  for (int i = 0; i < 7; ++i) q += x[i] * to_r8(e[static_cast<std::size_t>(i)]);
  const double r = q.norm();
  p = q / r;
  for (int i = 0; i < 7; ++i) {
    const R8 ei = to_r8(e[static_cast<std::size_t>(i)]);
    frame[static_cast<std::size_t>(i)] = (ei - p.dot(ei) * p) / r;
  }
}

}  // namespace

std::array<QVec2, 7> s7_tangent_basis(const QVec2& N) {
  std::array<QVec2, 7> out;
  std::vector<R8> span;
  span.push_back(to_r8(N));
  for (int k = 0; k < 3; ++k) {
    out[static_cast<std::size_t>(k)] = N * kImagUnits[static_cast<std::size_t>(k)];
    span.push_back(to_r8(out[static_cast<std::size_t>(k)]));
  }
  int filled = 3;
  for (int c = 0; c < 8 && filled < 7; ++c) {
    R8 v = R8::Zero();
    v[c] = 1;
    for (const auto& s : span) v -= v.dot(s) * s;
    for (const auto& s : span) v -= v.dot(s) * s;
    if (v.norm() < 1e-6) continue;
    v.normalize();
    span.push_back(v);
    out[static_cast<std::size_t>(filled++)] = from_r8(v);
  }
  return out;
}

MetricField berger_metric_field(const QVec2& N, double t) {
  const auto e = s7_tangent_basis(N);
  return [N, t, e](const Eigen::VectorXd& x) {
    R8 p;
    std::array<R8, 7> F;
    s7_chart(N, e, x, p, F);
    const QVec2 P = from_r8(p);
    Eigen::MatrixXd G(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = i; j < 7; ++j)
        G(i, j) = G(j, i) = berger_inner(P, t, from_r8(F[static_cast<std::size_t>(i)]), from_r8(F[static_cast<std::size_t>(j)]));
    return G;
  };
}

QVec2 hopf_A(const QVec2& z, const Quat& beta, const QVec2& N) {
  const Quat h = herm(N, z);
  if (h.norm() > 1e-9 * std::max(1.0, std::sqrt(norm2(z))))
    throw std::invalid_argument("hopf_A: z is not horizontal for the Hopf fibration at N");
  return z * beta;
}

double hopf_A_norm2(const QVec2& x, const QVec2& y) {
  double s = 0;
  for (const auto& b : kImagUnits) {
    const double c = dot(y, x * b);
    s += c * c;
  }
  return s;
}

QVec2 numerical_hopf_A(const QVec2& z, const Quat& beta, const QVec2& N, const FdOptions& opt) {
  const auto e = s7_tangent_basis(N);
  const FdCurvature fd(berger_metric_field(N, 1.0), 7, opt);
  // Coefficients of the field p beta in the chart frame.
  auto coeffs = [&](const Eigen::VectorXd& x) {
    R8 p;
    std::array<R8, 7> F;
    s7_chart(N, e, x, p, F);
    Eigen::Matrix<double, 8, 7> A;
    for (int i = 0; i < 7; ++i) A.col(i) = F[static_cast<std::size_t>(i)];
    const R8 V = to_r8(from_r8(p) * beta);
    return Eigen::VectorXd((A.transpose() * A).ldlt().solve(A.transpose() * V));
  };
  Eigen::VectorXd zc(7);
  for (int i = 0; i < 7; ++i) zc[i] = dot(z, e[static_cast<std::size_t>(i)]);
  const Eigen::VectorXd c0 = coeffs(Eigen::VectorXd::Zero(7));
  const Eigen::MatrixXd J = fd_jacobian(coeffs, 7, opt);
  const Eigen::VectorXd nab = J * zc + fd.christoffel(zc, c0);
  // Horizontal part: drop the vertical coordinates (the first three frame vectors are N i, N j, N k).
  QVec2 out{};
  for (int i = 3; i < 7; ++i) out = out + nab[i] * e[static_cast<std::size_t>(i)];
  return out;
}

// ---------------------------------------------------------------- Lie-theoretic engine

double biinvariant_riemann(const QMat& X, const QMat& Y, const QMat& Z, const QMat& W) {
  return -0.25 * b_lie(bracket(X, Y), bracket(Z, W));
}

namespace {

Quat im_quat(const Eigen::VectorXd& x, int off) { return {0, x[off], x[off + 1], x[off + 2]}; }

}  // namespace

LieAlgebraMetric::LieAlgebraMetric(std::vector<double> s3_scale2, const Eigen::Matrix<double, 10, 10>& sp2_metric)
    : r_(static_cast<int>(s3_scale2.size())), dim_(3 * r_ + 10) {
  M_ = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int f = 0; f < r_; ++f) M_.block(3 * f, 3 * f, 3, 3) = s3_scale2[static_cast<std::size_t>(f)] * Eigen::Matrix3d::Identity();
  M_.bottomRightCorner(10, 10) = sp2_metric;
  Minv_ = M_.inverse();
  C_.resize(static_cast<std::size_t>(dim_ * dim_));
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      C_[static_cast<std::size_t>(a * dim_ + b)] =
          bracket(Eigen::VectorXd::Unit(dim_, a), Eigen::VectorXd::Unit(dim_, b));
  // nabla(e_a, e_b) = ([e_a,e_b] - ad*_{e_a} e_b - ad*_{e_b} e_a)/2 with (ad*_X Y)_c = <[X, e_c], Y>.
  N_.resize(static_cast<std::size_t>(dim_ * dim_));
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) {
      Eigen::VectorXd sa(dim_), sb(dim_);
      for (int c = 0; c < dim_; ++c) {
        sa[c] = C_[static_cast<std::size_t>(a * dim_ + c)].dot(M_.col(b));
        sb[c] = C_[static_cast<std::size_t>(b * dim_ + c)].dot(M_.col(a));
      }
      N_[static_cast<std::size_t>(a * dim_ + b)] =
          0.5 * (C_[static_cast<std::size_t>(a * dim_ + b)] - Minv_ * sa - Minv_ * sb);
    }
}

Eigen::VectorXd LieAlgebraMetric::bracket(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int f = 0; f < r_; ++f) {
    const Quat p = im_quat(X, 3 * f), q = im_quat(Y, 3 * f);
    const Quat c = p * q - q * p;
    out.segment(3 * f, 3) << c.x, c.y, c.z;
  }
  const LieCoords x = X.tail(10), y = Y.tail(10);
  out.tail(10) = lie_coords(sp2lab::bracket(lie_from_coords(x), lie_from_coords(y)));
  return out;
}

Eigen::VectorXd LieAlgebraMetric::nabla(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int a = 0; a < dim_; ++a) {
    if (X[a] == 0) continue;
    for (int b = 0; b < dim_; ++b)
      if (Y[b] != 0) out += (X[a] * Y[b]) * N_[static_cast<std::size_t>(a * dim_ + b)];
  }
  return out;
}

Eigen::VectorXd LieAlgebraMetric::curvature(const Eigen::VectorXd& X, const Eigen::VectorXd& Y,
                                            const Eigen::VectorXd& Z) const {
  return nabla(X, nabla(Y, Z)) - nabla(Y, nabla(X, Z)) - nabla(bracket(X, Y), Z);
}

double LieAlgebraMetric::riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                                 const Eigen::VectorXd& W) const {
  return inner(curvature(X, Y, Z), W);
}

QuotientCurvature::QuotientCurvature(std::shared_ptr<const LieAlgebraMetric> G, const Sp2Point& Q,
                                     std::vector<KillingGenerator> fields)
    : G_(std::move(G)), Q_(Q), fields_(std::move(fields)) {
  const int n = G_->dim();
  for (const auto& f : fields_) {
    const Eigen::VectorXd zeta = ad_inv(f.right);
    V_.push_back(zeta + f.left);
    Eigen::MatrixXd NV(n, n);
    for (int c = 0; c < n; ++c) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, c);
      NV.col(c) = -G_->bracket(e, zeta) + G_->nabla(e, zeta) + G_->nabla(e, f.left);
    }
    NV_.push_back(NV);
  }
  const auto m = static_cast<Eigen::Index>(V_.size());
  GV_.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) GV_(a, b) = G_->inner(V_[static_cast<std::size_t>(a)], V_[static_cast<std::size_t>(b)]);
  if (m > 0) GVfac_.compute(GV_);
}

Eigen::VectorXd QuotientCurvature::ad_inv(const Eigen::VectorXd& X) const {
  Eigen::VectorXd out = X;
  const LieCoords x = X.tail(10);
  const QMat A = Q_.mat();
  out.tail(10) = lie_coords(A.adjoint() * lie_from_coords(x) * A);
  return out;
}

Eigen::VectorXd QuotientCurvature::horizontal_part(const Eigen::VectorXd& X) const {
  if (V_.empty()) return X;
  Eigen::VectorXd m(static_cast<Eigen::Index>(V_.size()));
  for (std::size_t a = 0; a < V_.size(); ++a) m[static_cast<Eigen::Index>(a)] = G_->inner(V_[a], X);
  const Eigen::VectorXd c = GVfac_.solve(m);
  Eigen::VectorXd out = X;
  for (std::size_t a = 0; a < V_.size(); ++a) out -= c[static_cast<Eigen::Index>(a)] * V_[a];
  return out;
}

Eigen::VectorXd QuotientCurvature::nabla_vertical(const Eigen::VectorXd& X, int a) const {
  return NV_[static_cast<std::size_t>(a)] * X;
}

namespace {
Eigen::VectorXd a_moments(const QuotientCurvature& qc, const LieAlgebraMetric& G, const Eigen::VectorXd& X,
                          const Eigen::VectorXd& Y) {
  Eigen::VectorXd m(qc.vertical_dim());
  for (int a = 0; a < qc.vertical_dim(); ++a) m[a] = -G.inner(Y, qc.nabla_vertical(X, a));
  return m;
}
}  // namespace

Eigen::VectorXd QuotientCurvature::a_coeffs(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
  if (V_.empty()) return {};
  return GVfac_.solve(a_moments(*this, *G_, X, Y));
}

double QuotientCurvature::a_inner(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                                  const Eigen::VectorXd& W) const {
  if (V_.empty()) return 0;
  return a_moments(*this, *G_, X, Y).dot(GVfac_.solve(a_moments(*this, *G_, Z, W)));
}

double QuotientCurvature::base_riemann(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& Z,
                                       const Eigen::VectorXd& W) const {
  return G_->riemann(X, Y, Z, W) - 2 * a_inner(X, Y, Z, W) + a_inner(Y, Z, X, W) - a_inner(X, Z, Y, W);
}

std::vector<double> QuotientCurvature::base_tensor(const std::vector<Eigen::VectorXd>& h) const {
  const int n = static_cast<int>(h.size());
  const int m = vertical_dim();
  auto at = [n](int i, int j, int k, int l) { return static_cast<std::size_t>(((i * n + j) * n + k) * n + l); };
  std::vector<double> T(static_cast<std::size_t>(n * n * n * n), 0.0);
  // Total-space tensor.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd RZ = G_->M() * G_->curvature(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)],
                                                            h[static_cast<std::size_t>(k)]);
        for (int l = 0; l < n; ++l) {
          const double v = RZ.dot(h[static_cast<std::size_t>(l)]);
          T[at(i, j, k, l)] = v;
          T[at(j, i, k, l)] = -v;
        }
      }
  if (m == 0) return T;
  // A-tensor moments and their Gram pairing.
  std::vector<Eigen::VectorXd> mom(static_cast<std::size_t>(n * n)), sol(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mom[static_cast<std::size_t>(i * n + j)] = a_moments(*this, *G_, h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)]);
      sol[static_cast<std::size_t>(i * n + j)] = GVfac_.solve(mom[static_cast<std::size_t>(i * n + j)]);
    }
  auto A = [&](int i, int j, int k, int l) {
    return mom[static_cast<std::size_t>(i * n + j)].dot(sol[static_cast<std::size_t>(k * n + l)]);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) T[at(i, j, k, l)] += -2 * A(i, j, k, l) + A(j, k, i, l) - A(i, k, j, l);
  return T;
}

ExactModel::ExactModel(double nu1, double nu2, Scale l1u, Scale l1d, Space space, const Sp2Point& Q)
    : space_(space), Q_(Q) {
  std::vector<double> l2;
  std::vector<QMat (*)(const Quat&)> embeds;
  auto up = +[](const Quat& k) { return QMat::diag(k, Quat{}); };
  auto down = +[](const Quat& k) { return QMat::diag(Quat{}, k); };
  if (!l1u.infinite) {
    l2.push_back(l1u.value * l1u.value);
    embeds.push_back(up);
  }
  if (!l1d.infinite) {
    l2.push_back(l1d.value * l1d.value);
    embeds.push_back(down);
  }
  r_ = static_cast<int>(l2.size());
  auto G = std::make_shared<LieAlgebraMetric>(l2, split_lie_metric(nu1, nu2));
  const int n = G->dim();
  std::vector<KillingGenerator> fields;
  for (int f = 0; f < r_; ++f)
    for (int k = 0; k < 3; ++k) {
      KillingGenerator kg{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
      kg.right[3 * f + k] = 1;
      kg.right.tail(10) = lie_coords(embeds[static_cast<std::size_t>(f)](kImagUnits[static_cast<std::size_t>(k)]));
      fields.push_back(kg);
    }
  if (space == Space::E20)
    for (int k = 0; k < 3; ++k) {
      KillingGenerator kg{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
      for (int f = 0; f < r_; ++f) {
        kg.right[3 * f + k] = 1;
        kg.left[3 * f + k] = -1;
      }
      const Quat q = kImagUnits[static_cast<std::size_t>(k)];
      kg.right.tail(10) = lie_coords(QMat::diag(q, q));
      fields.push_back(kg);
    }
  quot_ = std::make_unique<QuotientCurvature>(G, Q, std::move(fields));
}

Eigen::VectorXd ExactModel::lift(const TangentVec& V) const {
  Eigen::VectorXd X = Eigen::VectorXd::Zero(quot_->group().dim());
  X.tail(10) = lie_coords(to_lie(Q_, V));
  return quot_->horizontal_part(X);
}

double ExactModel::inner(const TangentVec& X, const TangentVec& Y) const {
  return quot_->group().inner(lift(X), lift(Y));
}

double ExactModel::riemann(const TangentVec& X, const TangentVec& Y, const TangentVec& Z, const TangentVec& W) const {
  return quot_->base_riemann(lift(X), lift(Y), lift(Z), lift(W));
}

double ExactModel::sectional(const TangentVec& u, const TangentVec& v) const {
  const Eigen::VectorXd a = lift(u), b = lift(v);
  const auto& G = quot_->group();
  const double d = G.inner(a, a) * G.inner(b, b) - G.inner(a, b) * G.inner(a, b);
  return quot_->base_riemann(a, b, b, a) / d;
}

double ExactModel::a_norm2(const TangentVec& u, const TangentVec& v) const {
  const Eigen::VectorXd a = lift(u), b = lift(v);
  return quot_->a_inner(a, b, a, b);
}

std::vector<TangentVec> ExactModel::tangent_basis() const {
  const auto& G = quot_->group();
  const auto& V = quot_->vertical();
  const std::size_t nk = static_cast<std::size_t>(3 * r_);
  // Inner product on Sp(2): lifts orthogonal to the deformation orbits only.
  Eigen::MatrixXd GK(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  for (std::size_t a = 0; a < nk; ++a)
    for (std::size_t b = 0; b < nk; ++b) GK(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = G.inner(V[a], V[b]);
  auto sp2_lift = [&](const TangentVec& T) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(G.dim());
    X.tail(10) = lie_coords(to_lie(Q_, T));
    if (nk == 0) return X;
    Eigen::VectorXd m(static_cast<Eigen::Index>(nk));
    for (std::size_t a = 0; a < nk; ++a) m[static_cast<Eigen::Index>(a)] = G.inner(V[a], X);
    const Eigen::VectorXd c = GK.ldlt().solve(m);
    for (std::size_t a = 0; a < nk; ++a) X -= c[static_cast<Eigen::Index>(a)] * V[a];
    return X;
  };
  std::vector<TangentVec> cand;
  if (space_ == Space::E20)
    for (const auto& k : kImagUnits) cand.push_back(killing_field(action_of(ActionKind::Diag20), k, Q_));
  const auto& E = chart_basis();
  for (const auto& e : E) cand.push_back(left_translate(Q_, e));
  std::vector<TangentVec> basis;
  std::vector<Eigen::VectorXd> lifts;
  for (const auto& c : cand) {
    TangentVec v = c;
    Eigen::VectorXd lv = sp2_lift(v);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const double p = G.inner(lifts[b], lv);
        v = v - p * basis[b];
        lv -= p * lifts[b];
      }
    const double nn = G.inner(lv, lv);
    if (nn < 1e-10) continue;
    const double s = 1.0 / std::sqrt(nn);
    basis.push_back(s * v);
    lifts.push_back(s * lv);
  }
  if (space_ == Space::E20) basis.erase(basis.begin(), basis.begin() + 3);
  return basis;
}

// ---------------------------------------------------------------- closed forms

double closed_fiber_curv(double nu, const Quat& b1, const Quat& b2) {
  const double d = dot(b1, b2);
  return nu * nu * (b1.norm2() * b2.norm2() - d * d);
}

namespace {

void require_subspace(const Sp2Point& Q, const TangentVec& V, int which, const char* who) {
  const SplitParts s = split(Q, V);
  const TangentVec* off[2];
  int n = 0;
  if (which != 0) off[n++] = &s.h;
  if (which != 1) off[n++] = &s.v1;
  const TangentVec* off2 = which != 2 ? &s.v2 : nullptr;
  double r = 0;
  for (int i = 0; i < n; ++i) r = std::max(r, max_abs(*off[i]));
  if (off2) r = std::max(r, max_abs(*off2));
  if (r > 1e-9 * std::max(1.0, max_abs(V))) throw std::invalid_argument(std::string(who) + ": input in the wrong subspace");
}

}  // namespace

double closed_horizontal_curv(const Sp2Point& Q, const TangentVec& z1, const TangentVec& z2, double nu1, double nu2) {
  require_subspace(Q, z1, 0, "closed_horizontal_curv");
  require_subspace(Q, z2, 0, "closed_horizontal_curv");
  const QVec2 y1 = z1.c1, y2 = z2.c1;
  const double d = dot(y1, y2);
  const double wedge = norm2(y1) * norm2(y2) - d * d;
  return wedge + 3 * (1 - nu1 * nu1) * hopf_A_norm2(y1, y2) - 3 * nu2 * nu2 * hopf_A_norm2(z1.c2, z2.c2);
}

TangentVec vertizontal_A1(const Sp2Point& Q, const TangentVec& z, const TangentVec& v1, double nu1) {
  require_subspace(Q, z, 0, "vertizontal_A1");
  require_subspace(Q, v1, 1, "vertizontal_A1");
  const Quat beta = herm(Q.col1(), v1.c1);
  const QVec2 y = hopf_A(z.c1, beta, Q.col1());
  // The H vector whose first column is y.
  const Quat q = herm(Q.col2(), y);
  return nu1 * nu1 * left_translate(Q, QMat::offdiag(q));
}

TangentVec vertizontal_A2(const Sp2Point& Q, const TangentVec& z, const TangentVec& v2, double nu2) {
  require_subspace(Q, z, 0, "vertizontal_A2");
  require_subspace(Q, v2, 2, "vertizontal_A2");
  const Quat beta = herm(Q.col2(), v2.c2);
  const QVec2 y = hopf_A(z.c2, beta, Q.col2());
  // The H vector whose second column is y.
  const Quat q = -herm(Q.col1(), y).conj();
  return nu2 * nu2 * left_translate(Q, QMat::offdiag(q));
}

double vertizontal_curv(const Sp2Point& Q, const TangentVec& z, const TangentVec& v1, const TangentVec& v2, double nu1,
                        double nu2) {
  const TangentVec a = vertizontal_A1(Q, z, v1, nu1) + vertizontal_A2(Q, z, v2, nu2);
  return split_inner(nu1, nu2, Q, a, a);
}

double closed_mixed_component(const Sp2Point& Q, const TangentVec& e1, const TangentVec& e2, const TangentVec& e3,
                              const TangentVec& sigma, double nu1, double nu2) {
  const TangentVec a = vertizontal_A1(Q, e3, e2, nu1);
  const TangentVec b = vertizontal_A2(Q, e1, sigma, nu2);
  return -split_inner(nu1, nu2, Q, a, b);
}

double connection_metric_component(double t, ConnectionRule rule, const ConnectionArgs& args) {
  switch (rule) {
    case ConnectionRule::HorizontalIII: return args.base_value - 3 * t * t * args.a_norm2;
    case ConnectionRule::VerticalIV: return t * t * args.unit_value;
    case ConnectionRule::VertizontalV: return t * t * t * t * args.a_norm2;
    case ConnectionRule::MixedVI: return 0.0;
    case ConnectionRule::ScalingVII: return t * t * args.unit_value;
    case ConnectionRule::Untagged: break;
  }
  throw std::invalid_argument("connection_metric_component: inputs must be tagged with a rescaling rule");
}

}  // namespace sp2lab
