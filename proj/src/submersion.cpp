#include "sp2lab/submersion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sp2lab {

std::string SubmersionDescriptor::name() const {
  switch (kind) {
    case SubmersionKind::H: return "h";
    case SubmersionKind::P21: return "p21";
    case SubmersionKind::P2_2: return "p2_2";
    case SubmersionKind::Q20: return "q20";
    case SubmersionKind::P20: return "p20";
  }
  return "?";
}

ActionDescriptor SubmersionDescriptor::fibre_action() const {
  switch (kind) {
    case SubmersionKind::P21: return action_of(ActionKind::Right);
    case SubmersionKind::P2_2: return action_of(ActionKind::Left);
    case SubmersionKind::Q20: return action_of(ActionKind::Diag20);
    default: break;
  }
  throw std::invalid_argument("submersion " + name() + " has no fibre action on Sp(2)");
}

SubmersionDescriptor submersion(SubmersionKind kind) { return {kind}; }

SubmersionDescriptor parse_submersion(const std::string& name) {
  for (auto k : {SubmersionKind::H, SubmersionKind::P21, SubmersionKind::P2_2, SubmersionKind::Q20, SubmersionKind::P20})
    if (submersion(k).name() == name) return {k};
  throw std::invalid_argument("unknown submersion '" + name + "'");
}

std::array<QVec2, 3> hopf_vertical(const QVec2& N) {
  return {N * kImagUnits[0], N * kImagUnits[1], N * kImagUnits[2]};
}

namespace {

std::vector<TangentVec> killing_triple(const ActionDescriptor& a, const Sp2Point& Q) {
  std::vector<TangentVec> K;
  for (const auto& k : kImagUnits) K.push_back(killing_field(a, k, Q));
  return K;
}

// Component of V orthogonal to span(K) under G.
TangentVec remove_span(const MetricEvaluator& g, const Sp2Point& Q, const std::vector<TangentVec>& K, const TangentVec& V) {
  std::vector<TangentVec> all = K;
  all.push_back(V);
  const Eigen::MatrixXd G = g.gram(Q, all);
  const auto r = static_cast<Eigen::Index>(K.size());
  const Eigen::VectorXd c = G.topLeftCorner(r, r).ldlt().solve(G.col(r).head(r));
  TangentVec out = V;
  for (Eigen::Index a = 0; a < r; ++a) out = out - c[a] * K[static_cast<std::size_t>(a)];
  return out;
}

}  // namespace

std::vector<TangentVec> vertical_space(const SubmersionDescriptor& sub, const Sp2Point& Q, const MetricEvaluator* metric) {
  switch (sub.kind) {
    case SubmersionKind::H: throw std::invalid_argument("h is a map on S^7; use hopf_vertical");
    case SubmersionKind::P20: {
      if (!metric) throw std::invalid_argument("vertical_space(p20) needs a metric");
      const auto K = killing_triple(action_of(ActionKind::Diag20), Q);
      std::vector<TangentVec> out;
      for (const auto& R : killing_triple(action_of(ActionKind::Right), Q)) out.push_back(remove_span(*metric, Q, K, R));
      return out;
    }
    default: return killing_triple(sub.fibre_action(), Q);
  }
}

// ---------------------------------------------------------------- finite-difference A and T

SubmersionFd::SubmersionFd(const SubmersionDescriptor& sub, MetricPtr metric, const Sp2Point& Q, const FdOptions& opt)
    : sub_(sub), g_(std::move(metric)), Q_(Q), fd_(*g_, Q, opt) {
  const ActionDescriptor act = sub.fibre_action();
  K_ = killing_triple(act, Q);
  GK_ = g_->gram(Q, K_);
  for (int a = 0; a < 3; ++a) {
    K0_.push_back(killing_coords(a, Eigen::VectorXd::Zero(10)));
    dK_.push_back(fd_jacobian([this, a](const Eigen::VectorXd& x) { return killing_coords(a, x); }, 10, opt));
  }
}

Eigen::VectorXd SubmersionFd::killing_coords(int a, const Eigen::VectorXd& x) const {
  const ChartCoords c = x;
  const Sp2Point P = exp_chart(Q_, c);
  const auto F = chart_frame(Q_, c);
  Eigen::Matrix<double, 10, 10> M;
  for (int j = 0; j < 10; ++j) M.col(j) = lie_coords(to_lie(P, F[static_cast<std::size_t>(j)]));
  const TangentVec K = killing_field(sub_.fibre_action(), kImagUnits[static_cast<std::size_t>(a)], P);
  return M.partialPivLu().solve(lie_coords(to_lie(P, K)));
}

TangentVec SubmersionFd::from_coords(const Eigen::VectorXd& c) const {
  const auto& E = chart_basis();
  QMat X;
  for (int i = 0; i < 10; ++i) X = X + c[i] * E[static_cast<std::size_t>(i)];
  return left_translate(Q_, X);
}

TangentVec SubmersionFd::vertical_part(const TangentVec& V) const {
  std::vector<TangentVec> all = K_;
  all.push_back(V);
  const Eigen::MatrixXd G = g_->gram(Q_, all);
  const Eigen::Vector3d c = GK_.ldlt().solve(G.col(3).head(3));
  return c[0] * K_[0] + c[1] * K_[1] + c[2] * K_[2];
}

double SubmersionFd::horizontality_residual(const TangentVec& X) const {
  std::vector<TangentVec> all = K_;
  all.push_back(X);
  const Eigen::MatrixXd G = g_->gram(Q_, all);
  double r = 0;
  for (int a = 0; a < 3; ++a) r = std::max(r, std::abs(G(a, 3)) / std::sqrt(G(a, a) * std::max(G(3, 3), 1e-300)));
  return r;
}

TangentVec SubmersionFd::nabla_killing(const TangentVec& X, int a) const {
  const Eigen::VectorXd x = chart_coords(Q_, X);
  const auto ua = static_cast<std::size_t>(a);
  return from_coords(dK_[ua] * x + fd_.core().christoffel(x, K0_[ua]));
}

TangentVec SubmersionFd::A(const TangentVec& X, const TangentVec& Y) const {
  if (horizontality_residual(X) > 1e-8) throw std::invalid_argument("numerical_A: X is not horizontal");
  const TangentVec Yv = vertical_part(Y);
  const TangentVec Yh = Y - Yv;
  // Vertical input: constant killing extension, take the horizontal part.
  std::vector<TangentVec> all = K_;
  all.push_back(Yv);
  const Eigen::Vector3d y = GK_.ldlt().solve(g_->gram(Q_, all).col(3).head(3));
  TangentVec out;
  TangentVec nv;
  for (int a = 0; a < 3; ++a) nv = nv + y[a] * nabla_killing(X, a);
  out = horizontal_part(nv);
  // Horizontal input: <nabla_X Y, K_a> = -<Y, nabla_X K_a>.
  if (max_abs(Yh) > 0) {
    std::vector<TangentVec> v = {Yh};
    for (int a = 0; a < 3; ++a) v.push_back(nabla_killing(X, a));
    const Eigen::MatrixXd G = g_->gram(Q_, v);
    const Eigen::Vector3d m = -G.row(0).tail(3).transpose();
    const Eigen::Vector3d c = GK_.ldlt().solve(m);
    out = out + (c[0] * K_[0] + c[1] * K_[1] + c[2] * K_[2]);
  }
  return out;
}

TangentVec SubmersionFd::T(const TangentVec& U, const TangentVec& V) const {
  const TangentVec Uv = vertical_part(U), Vv = vertical_part(V);
  if (max_abs(U - Uv) > 1e-8 * std::max(1.0, max_abs(U)) || max_abs(V - Vv) > 1e-8 * std::max(1.0, max_abs(V)))
    throw std::invalid_argument("T-tensor: inputs must be vertical");
  std::vector<TangentVec> all = K_;
  all.push_back(V);
  const Eigen::Vector3d y = GK_.ldlt().solve(g_->gram(Q_, all).col(3).head(3));
  TangentVec nv;
  for (int a = 0; a < 3; ++a) nv = nv + y[a] * nabla_killing(U, a);
  return horizontal_part(nv);
}

double SubmersionFd::a_norm2(const TangentVec& X, const TangentVec& Y) const {
  const TangentVec a = A(X, Y);
  return g_->norm2(Q_, a);
}

double SubmersionFd::base_sectional(const TangentVec& u, const TangentVec& v) const {
  if (horizontality_residual(u) > 1e-8 || horizontality_residual(v) > 1e-8)
    throw std::invalid_argument("oneill_base_sectional: plane is not horizontal");
  const Eigen::MatrixXd G = g_->gram(Q_, {u, v});
  const double area = G(0, 0) * G(1, 1) - G(0, 1) * G(0, 1);
  return fd_.sectional(u, v) + 3 * a_norm2(u, v) / area;
}

TangentVec numerical_A(const SubmersionDescriptor& sub, MetricPtr metric, const TangentVec& X, const TangentVec& Y,
                       const Sp2Point& Q) {
  return SubmersionFd(sub, std::move(metric), Q).A(X, Y);
}

double oneill_base_sectional(const SubmersionDescriptor& sub, MetricPtr metric, const TangentVec& u,
                             const TangentVec& v, const Sp2Point& Q) {
  return SubmersionFd(sub, std::move(metric), Q).base_sectional(u, v);
}

// ---------------------------------------------------------------- frames along the SO(2) orbit

OrbitFrame orbit_frame(double theta, double t, const Frame& frame) {
  frame.validate();
  OrbitFrame F;
  F.theta = theta;
  F.t = t;
  F.frame = frame;
  F.at = orbit_point(theta, t, frame.alpha);
  const Sp2Point Q0 = orbit_point(0.0, t, frame.alpha);
  QMat Rot;
  Rot.e[0][0] = Quat{std::cos(theta), 0, 0, 0};
  Rot.e[0][1] = Quat{std::sin(theta), 0, 0, 0};
  Rot.e[1][0] = Quat{-std::sin(theta), 0, 0, 0};
  Rot.e[1][1] = Quat{std::cos(theta), 0, 0, 0};
  auto at = [&](const QMat& X) { return TangentVec::from(Rot * left_translate(Q0, X).mat()); };
  F.x = at(QMat::offdiag(frame.alpha));
  F.y = at(QMat::offdiag(Quat::one()));
  F.eta1 = at(QMat::offdiag(frame.gamma2));
  F.eta2 = at(QMat::offdiag(-frame.gamma1));
  const std::array<Quat, 3> beta = {frame.alpha, frame.gamma1, frame.gamma2};
  for (std::size_t i = 0; i < 3; ++i) {
    F.first[i] = at(QMat::diag(beta[i], Quat{}));
    F.second[i] = at(QMat::diag(Quat{}, beta[i]));
  }
  return F;
}

double q20_orthogonality_residual(const HorizontalBasis& B) {
  const auto g = split_metric(B.params.nu1, B.params.nu2);
  const auto K = killing_triple(action_of(ActionKind::Diag20), B.at);
  double r = 0;
  for (const auto& v : B.all()) {
    std::vector<TangentVec> all = K;
    all.push_back(v);
    const Eigen::MatrixXd G = g->gram(B.at, all);
    for (int a = 0; a < 3; ++a) r = std::max(r, std::abs(G(a, 3)) / std::sqrt(G(a, a) * G(3, 3)));
  }
  return r;
}

HorizontalBasis q20_horizontal_basis(double t, const MetricParams& params, double theta, const Frame& frame) {
  params.validate();
  constexpr double quarter = std::numbers::pi / 4;
  if (!(t >= 0 && t <= quarter + 1e-12)) throw std::invalid_argument("q20_horizontal_basis: t must lie in [0, pi/4]");
  const OrbitFrame F = orbit_frame(theta, t, frame);
  const double w1 = 1.0 / (params.nu1 * params.nu1), w2 = 1.0 / (params.nu2 * params.nu2);
  HorizontalBasis B;
  B.at = F.at;
  B.params = params;
  B.theta = theta;
  B.t = t;
  B.degenerate = std::abs(t - quarter) < 1e-12;
  B.x20 = F.x;
  B.y20 = F.y;
  if (B.degenerate) {
    B.eta1 = w2 * F.second[1];
    B.eta2 = w2 * F.second[2];
  } else {
    const double k = std::tan(2 * t) * w2;
    B.eta1 = F.eta1 + k * F.second[1];
    B.eta2 = F.eta2 + k * F.second[2];
  }
  B.frakv = -w1 * F.first[0] + w2 * F.second[0];
  B.theta1 = -w1 * F.first[1] + w2 * F.second[1];
  B.theta2 = -w1 * F.first[2] + w2 * F.second[2];
  const double res = q20_orthogonality_residual(B);
  if (res > 1e-8) throw std::runtime_error("q20_horizontal_basis: frame is not horizontal (residual " + std::to_string(res) + ")");
  return B;
}

TangentVec to_deformed(const MetricParams& params, const Sp2Point& Q, const TangentVec& V) {
  const auto base = split_metric(params.nu1, params.nu2);
  return cheeger_transport(*base, Q, V, {action_of(ActionKind::Up), action_of(ActionKind::Down)},
                           {params.l1u, params.l1d});
}

namespace {

template <class Inner>
OrbitProjection orbit_gram(const TangentVec& u, const TangentVec& v, const ActionDescriptor& action,
                           const Sp2Point& Q, double rel_tol, Inner ip) {
  OrbitProjection P;
  const auto K = killing_triple(action, Q);
  for (int j = 0; j < 3; ++j) {
    P.gram(0, j) = ip(u, K[static_cast<std::size_t>(j)]);
    P.gram(1, j) = ip(v, K[static_cast<std::size_t>(j)]);
  }
  const Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(P.gram);
  const auto s = svd.singularValues();
  double kn = 0;
  for (const auto& k : K) kn = std::max(kn, ip(k, k));
  const double scale = std::sqrt(ip(u, u) * kn) + std::sqrt(ip(v, v) * kn);
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * std::max(scale, 1e-300)) ++P.rank;
  return P;
}

}  // namespace

OrbitProjection orbit_projection_gram(const TangentVec& u, const TangentVec& v, const ActionDescriptor& action,
                                      const Sp2Point& Q, double rel_tol) {
  return orbit_gram(u, v, action, Q, rel_tol, biinvariant_inner);
}

OrbitProjection orbit_projection_gram_split(double nu1, double nu2, const TangentVec& u, const TangentVec& v,
                                            const ActionDescriptor& action, const Sp2Point& Q, double rel_tol) {
  return orbit_gram(u, v, action, Q, rel_tol,
                    [&](const TangentVec& X, const TangentVec& Y) { return split_inner(nu1, nu2, Q, X, Y); });
}

}  // namespace sp2lab
