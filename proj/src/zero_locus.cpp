#include "sp2lab/zero_locus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sp2lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuarter = kPi / 4;

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Numerical rank of a pair of vectors: singular values of the stacked lie coordinates above 1e-9 sqrt(scale2).
int pair_rank(const TangentVec& a, const TangentVec& b, double scale2) {
  Eigen::Matrix<double, 16, 2> M;
  const auto flat = [](const TangentVec& v) {
    Eigen::Matrix<double, 16, 1> x;
    int k = 0;
    for (const auto& col : {v.c1, v.c2})
      for (const auto& q : col) {
        x.segment<4>(k) << q.w, q.x, q.y, q.z;
        k += 4;
      }
    return x;
  };
  M.col(0) = flat(a);
  M.col(1) = flat(b);
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 16, 2>>(M).singularValues();
  const double tol = 1e-9 * std::sqrt(std::max(scale2, 1e-300));
  return (sv[0] > tol) + (sv[1] > tol);
}

TangentVec combo(const std::array<TangentVec, 7>& B, const Coeffs7& c) {
  TangentVec out;
  for (int i = 0; i < 7; ++i) out = out + c[i] * B[static_cast<std::size_t>(i)];
  return out;
}

// V diag(e^{alpha s}, e^{-alpha s}) on both columns' entries.
TangentVec right_rotate(const TangentVec& V, const Quat& alpha, double s) {
  const Quat e = Quat{std::cos(s), 0, 0, 0} + std::sin(s) * alpha;
  return {V.c1 * e, V.c2 * e.conj()};
}

bool finite_scales(const MetricParams& p) { return !p.l1u.infinite || !p.l1d.infinite; }

// Fit of a plane (a, b) into span{first, eta^c, vartheta^c} with one c for both eta and vartheta.
// `first` is index 0 (x) or 1 (y); the other of x, y and frakv must vanish.
struct FamilyFit {
  bool ok = false;
  double residual = 0;
  Eigen::Vector3d pa, pb;  // (first, eta^c, vartheta^c) scalars
};

FamilyFit fit_family(const Coeffs7& a0, const Coeffs7& b0, int first, double tol) {
  FamilyFit f;
  const Coeffs7 a = a0 / a0.cwiseAbs().maxCoeff(), b = b0 / b0.cwiseAbs().maxCoeff();
  const int other = 1 - first;
  f.residual = std::max({std::abs(a[other]), std::abs(b[other]), std::abs(a[4]), std::abs(b[4])});
  Eigen::Matrix<double, 4, 2> S;
  S << a[2], a[3], b[2], b[3], a[5], a[6], b[5], b[6];
  const Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(S, Eigen::ComputeFullV);
  const Eigen::Vector2d s = svd.singularValues();
  if (s[0] <= tol) return f;
  f.residual = std::max(f.residual, s[1] / s[0]);
  const Eigen::Vector2d c = svd.matrixV().col(0);
  f.pa << a[first], a.segment<2>(2).dot(c), a.segment<2>(5).dot(c);
  f.pb << b[first], b.segment<2>(2).dot(c), b.segment<2>(5).dot(c);
  f.ok = f.residual <= tol;
  return f;
}

// At t = 0 the point does not depend on alpha, so the x-eta-vartheta family holds for every frame:
// span{offdiag(q), (-beta/nu1^2, beta/nu2^2)} with q, beta imaginary and q orthogonal to beta.
// In basis coordinates q = (x, -eta2, eta1) and beta = (frakv, vartheta1, vartheta2) over (alpha, gamma1, gamma2).
bool t0_family(const Coeffs7& a0, const Coeffs7& b0, double tol) {
  const Coeffs7 a = a0 / a0.cwiseAbs().maxCoeff(), b = b0 / b0.cwiseAbs().maxCoeff();
  if (std::max(std::abs(a[1]), std::abs(b[1])) > tol) return false;
  auto hq = [](const Coeffs7& c) { return Eigen::Vector3d(c[0], -c[3], c[2]); };
  auto vb = [](const Coeffs7& c) { return Eigen::Vector3d(c[4], c[5], c[6]); };
  Eigen::Matrix<double, 2, 3> H, V;
  H << hq(a).transpose(), hq(b).transpose();
  V << vb(a).transpose(), vb(b).transpose();
  const Eigen::Vector2d sh = H.jacobiSvd().singularValues(), sv = V.jacobiSvd().singularValues();
  if (sh[0] <= tol || sv[0] <= tol || sh[1] > tol * sh[0] || sv[1] > tol * sv[0]) return false;
  // one vector with no H part: dominant directions of both parts
  const Eigen::Vector3d q = H.jacobiSvd(Eigen::ComputeFullV).matrixV().col(0);
  const Eigen::Vector3d beta = V.jacobiSvd(Eigen::ComputeFullV).matrixV().col(0);
  return std::abs(q.dot(beta)) <= tol;
}

}  // namespace

bool zero_locus_membership(double theta, double t) {
  if (!(theta >= -1e-12 && theta < kPi + 1e-12)) throw std::invalid_argument("zero_locus_membership: theta outside [0, pi)");
  if (!(t >= -1e-12 && t <= kQuarter + 1e-12)) throw std::invalid_argument("zero_locus_membership: t outside [0, pi/4]");
  if (near(t, kQuarter)) return true;
  for (int k = 0; k < 4; ++k)
    if (near(theta, k * kQuarter)) return true;
  return near(theta, kPi);  // theta = pi is theta = 0 on the orbit circle
}

const char* tag_name(PlaneTag tag) {
  switch (tag) {
    case PlaneTag::Positive: return "Positive";
    case PlaneTag::ZeroThm51: return "ZeroThm51";
    case PlaneTag::ZeroProp71i: return "ZeroProp71i";
    case PlaneTag::ZeroProp71ii: return "ZeroProp71ii";
    case PlaneTag::ZeroProp74: return "ZeroProp74";
    case PlaneTag::ZeroProp75x: return "ZeroProp75x";
    case PlaneTag::ZeroProp75y: return "ZeroProp75y";
    case PlaneTag::NumericallyFlatUnclassified: return "NumericallyFlatUnclassified";
  }
  return "?";
}

bool predicts_zero(PlaneTag tag) { return tag != PlaneTag::Positive; }

// ---------------------------------------------------------------- split metric on Sp(2)

PlaneClassification classify_plane_g_nu(const Sp2Point& Q, const TangentVec& u, const TangentVec& v, double nu1,
                                        double nu2) {
  PlaneClassification out;
  const SplitParts pu = split(Q, u), pv = split(Q, v);
  const double s2 = re_dot(u, u) + re_dot(v, v);
  out.ranks << pair_rank(pu.h, pv.h, s2), pair_rank(pu.v1, pv.v1, s2), pair_rank(pu.v2, pv.v2, s2);
  const char* names[3] = {"H", "V1", "V2"};
  for (int i = 0; i < 3; ++i)
    if (out.ranks[i] == 2) {
      out.tag = PlaneTag::Positive;
      out.rule = std::string("projection onto ") + names[i] + " is two dimensional";
      return out;
    }
  if (out.ranks[0] == 0) {
    out.tag = PlaneTag::ZeroThm51;
    out.rule = "no H component";
    return out;
  }
  // Reduce to span{z + w1, v1 + v2}: e1 carries the H part, e2 none.
  SplitParts e1 = pu, e2 = pv;
  if (re_dot(pv.h, pv.h) > re_dot(pu.h, pu.h)) std::swap(e1, e2);
  {
    const double c = re_dot(e2.h, e1.h) / re_dot(e1.h, e1.h);
    e2 = {e2.h - c * e1.h, e2.v1 - c * e1.v1, e2.v2 - c * e1.v2};
  }
  const double z2 = re_dot(e1.h, e1.h);
  const double v2n = re_dot(e2.v1, e2.v1) + re_dot(e2.v2, e2.v2);
  if (!(v2n > 0)) throw std::logic_error("classify_plane_g_nu: reduction lost the plane");
  const TangentVec z = e1.h;
  const TangentVec A = vertizontal_A1(Q, z, e2.v1, nu1) + vertizontal_A2(Q, z, e2.v2, nu2);
  // relative to |z|^2 |v|^2 in the split metric
  const double zn = split_inner(nu1, nu2, Q, z, z);
  const double vn = split_inner(nu1, nu2, Q, e2.v1 + e2.v2, e2.v1 + e2.v2);
  out.a_residual = split_inner(nu1, nu2, Q, A, A) / (zn * vn);
  (void)z2;
  if (out.a_residual <= 1e-20) {
    out.tag = PlaneTag::ZeroThm51;
    out.rule = "A1_z v1 + A2_z v2 = 0";
  } else {
    out.tag = PlaneTag::Positive;
    out.rule = "A1_z v1 + A2_z v2 != 0";
  }
  return out;
}

// ---------------------------------------------------------------- E20 planes

double e20_sectional(double theta, double t, const MetricParams& params, const Coeffs7& a, const Coeffs7& b) {
  const HorizontalBasis B = q20_horizontal_basis(t, params, theta);
  const auto all = B.all();
  const TangentVec u = to_deformed(params, B.at, combo(all, a)), v = to_deformed(params, B.at, combo(all, b));
  return ExactModel(params, Space::E20, B.at).sectional(u, v);
}

PlaneClassification classify_plane_full(double theta, double t, const MetricParams& params, const Coeffs7& a,
                                        const Coeffs7& b, const FullClassifyOptions& opt) {
  PlaneClassification out;
  const HorizontalBasis B = q20_horizontal_basis(t, params, theta);
  const auto all = B.all();
  const TangentVec u = combo(all, a), v = combo(all, b);
  MetricParams split_only = params;
  split_only.l1u = Scale::inf();
  split_only.l1d = Scale::inf();
  // families are matched in the theta = 0 picture
  Coeffs7 fa = a, fb = b;
  if (!(t < kQuarter - 1e-12) && !near(theta, 0.0)) {
    const HorizontalBasis B0 = q20_horizontal_basis(t, params, 0.0);
    const Quat alpha = Frame{}.alpha;
    fa = horizontal_coords(B0, right_rotate(u, alpha, -theta));
    fb = horizontal_coords(B0, right_rotate(v, alpha, -theta));
  }
  out.sec_split = ExactModel(split_only, Space::E20, B.at).sectional(u, v);
  out.sec_full = finite_scales(params)
                     ? ExactModel(params, Space::E20, B.at)
                           .sectional(to_deformed(params, B.at, u), to_deformed(params, B.at, v))
                     : out.sec_split;
  if (out.sec_split > opt.flat_tol) {
    out.tag = PlaneTag::Positive;
    out.rule = "positive for the split metric";
    return out;
  }
  if (finite_scales(params)) {
    out.orbit_rank_up =
        orbit_projection_gram_split(params.nu1, params.nu2, u, v, action_of(ActionKind::Up), B.at, opt.rank_tol).rank;
    out.orbit_rank_down =
        orbit_projection_gram_split(params.nu1, params.nu2, u, v, action_of(ActionKind::Down), B.at, opt.rank_tol).rank;
    if (out.orbit_rank_up == 2 || out.orbit_rank_down == 2) {
      out.tag = PlaneTag::Positive;
      out.rule = "nondegenerate projection onto the A^u or A^d orbit";
      return out;
    }
  }
  const FamilyFit fx = fit_family(fa, fb, 0, opt.fit_tol);
  const FamilyFit fy = fit_family(fa, fb, 1, opt.fit_tol);
  out.a_residual = std::min(fx.residual, fy.residual);
  // plane contains vartheta^c: the (x, eta) minor vanishes
  const double dx = fx.pa[0] * fx.pb[1] - fx.pa[1] * fx.pb[0];
  const bool xfam = fx.ok && std::abs(dx) <= opt.fit_tol * fx.pa.norm() * fx.pb.norm();
  if (t < kQuarter - 1e-12) {
    if (xfam) {
      out.tag = PlaneTag::ZeroProp71i;
      out.rule = "span{zeta in span{x, eta}, vartheta} with one combination";
    } else if (near(t, 0.0) && t0_family(fa, fb, opt.fit_tol)) {
      out.tag = PlaneTag::ZeroProp71i;
      out.rule = "t = 0: span{zeta, vartheta} in a rotated frame";
    }
  } else {
    const bool xzero = std::abs(fx.pa[0]) <= opt.fit_tol && std::abs(fx.pb[0]) <= opt.fit_tol;
    Eigen::Matrix3d M;
    M.row(0) = fy.pa.transpose();
    M.row(1) = fy.pb.transpose();
    M.row(2) << 0, -2, 1;
    const bool yfam = fy.ok && std::abs(M.determinant()) <= opt.fit_tol * fy.pa.norm() * fy.pb.norm() * std::sqrt(5.0);
    if (xfam && xzero) {
      out.tag = PlaneTag::ZeroProp74;
      out.rule = "span{(vartheta, 0), (0, vartheta)}";
    } else if (xfam) {
      out.tag = PlaneTag::ZeroProp75x;
      out.rule = "span{x + lambda (-vartheta, 0), vartheta^{2,0}}";
    } else if (yfam) {
      out.tag = PlaneTag::ZeroProp75y;
      out.rule = "span{y + lambda (-vartheta, 0), (-vartheta, -vartheta)}";
    } else if (!finite_scales(params) && std::abs(fa[4]) + std::abs(fb[4]) <= opt.fit_tol * (fa.norm() + fb.norm())) {
      out.tag = PlaneTag::ZeroProp71ii;
      out.rule = "split-metric zero at t = pi/4 without frakv";
    }
  }
  if (out.tag != PlaneTag::Positive) return out;
  if (std::abs(out.sec_full) <= opt.flat_tol) {
    out.tag = PlaneTag::NumericallyFlatUnclassified;
    out.rule = "flat, no family matched";
  } else {
    out.rule = "degenerate orbit projections, curvature evaluated";
  }
  return out;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::EtaTheta: return "eta-vartheta";
    case Family::XTheta: return "x-vartheta";
    case Family::ThetaPair: return "vartheta-pair";
    case Family::XStable: return "x-stable";
    case Family::YStable: return "y-stable";
  }
  return "?";
}

std::pair<Coeffs7, Coeffs7> family_plane(Family f, double phi, double lambda) {
  Coeffs7 eta = Coeffs7::Zero(), th = Coeffs7::Zero(), x = Coeffs7::Zero(), y = Coeffs7::Zero();
  eta[2] = std::cos(phi);
  eta[3] = std::sin(phi);
  th[5] = std::cos(phi);
  th[6] = std::sin(phi);
  x[0] = 1;
  y[1] = 1;
  // at t = pi/4, eta_i = (0, vartheta_i)/nu2^2, so (-vartheta/nu1^2, 0) = vartheta^{2,0} - eta
  const Coeffs7 first_slot = th - eta;
  switch (f) {
    case Family::EtaTheta: return {eta, th};
    case Family::XTheta: return {x + lambda * eta, th};
    case Family::ThetaPair: return {first_slot, eta};
    case Family::XStable: return {x + lambda * first_slot, th};
    case Family::YStable: return {y + lambda * first_slot, th - 2 * eta};
  }
  throw std::invalid_argument("family_plane: unknown family");
}

Coeffs7 horizontal_coords(const HorizontalBasis& B, const TangentVec& V) {
  Eigen::Matrix<double, 10, 7> D;
  const auto all = B.all();
  for (int k = 0; k < 7; ++k) D.col(k) = lie_coords(to_lie(B.at, all[static_cast<std::size_t>(k)]));
  return D.colPivHouseholderQr().solve(lie_coords(to_lie(B.at, V)));
}

std::pair<Coeffs7, Coeffs7> family_plane_at(Family f, double theta, double t, const MetricParams& params, double phi,
                                            double lambda) {
  const auto ab = family_plane(f, phi, lambda);
  if (t < kQuarter - 1e-12 || near(theta, 0.0)) return ab;
  const HorizontalBasis B0 = q20_horizontal_basis(t, params, 0.0), B = q20_horizontal_basis(t, params, theta);
  const auto all = B0.all();
  const Quat alpha = Frame{}.alpha;
  return {horizontal_coords(B, right_rotate(combo(all, ab.first), alpha, theta)),
          horizontal_coords(B, right_rotate(combo(all, ab.second), alpha, theta))};
}

VwzSolution solve_v_wz(const MetricParams& params, double phi_z, double phi_w) {
  params.validate();
  const OrbitFrame F = orbit_frame(0.0, kQuarter);
  const double w1 = 1 / (params.nu1 * params.nu1), w2 = 1 / (params.nu2 * params.nu2);
  const TangentVec z = std::cos(phi_z) * F.x + std::sin(phi_z) * F.y;
  const TangentVec w = -w1 * (std::cos(phi_w) * F.first[1] + std::sin(phi_w) * F.first[2]);
  const std::array<TangentVec, 2> V = {w2 * F.second[1], w2 * F.second[2]};
  const ExactModel M(params.nu1, params.nu2, Scale::inf(), Scale::inf(), Space::Sp2, F.at);
  // curv(z, w + v) is quadratic in v; its minimum is the zero.
  Eigen::Matrix2d H;
  Eigen::Vector2d g;
  for (int i = 0; i < 2; ++i) {
    g[i] = M.riemann(z, w, V[static_cast<std::size_t>(i)], z);
    for (int j = 0; j < 2; ++j) H(i, j) = M.riemann(z, V[static_cast<std::size_t>(i)], V[static_cast<std::size_t>(j)], z);
  }
  VwzSolution s;
  s.coeffs = -H.ldlt().solve(g);
  const TangentVec v = s.coeffs[0] * V[0] + s.coeffs[1] * V[1];
  for (double lambda : {0.0, 1.0, -2.0, 0.5}) s.residual = std::max(s.residual, std::abs(M.sectional(z + lambda * w, w + v)));
  return s;
}

// ---------------------------------------------------------------- scans

namespace {

struct PlaneObjective {
  int n;
  std::vector<double> T;

  // M(j, k) = sum_il T_ijkl p_i p_l, i.e. the form v -> R(p, v, v, p)
  Eigen::MatrixXd outer_form(const Eigen::VectorXd& p) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) M(j, k) += T[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] * p[i] * p[l];
    return 0.5 * (M + M.transpose());
  }
  double value(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return v.dot(outer_form(u) * v); }
};

// Smallest value of the form on unit vectors orthogonal to p.
Eigen::VectorXd min_orthogonal(const Eigen::MatrixXd& M, const Eigen::VectorXd& p) {
  const auto n = M.rows();
  const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - p * p.transpose();
  Eigen::MatrixXd S = P * M * P;
  const double shift = 1.0 + M.cwiseAbs().sum();
  S += shift * p * p.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  return es.eigenvectors().col(0);
}

}  // namespace

ScanPoint minimize_at(double theta, double t, const MetricParams& params, int restarts, std::uint64_t seed,
                      int max_iter) {
  if (restarts < 1) throw std::invalid_argument("minimize_at: restarts must be positive");
  ScanPoint out;
  out.theta = theta;
  out.t = t;
  out.on_zero_locus = zero_locus_membership(theta, t);
  const Sp2Point Q = orbit_point(theta, t, Frame{}.alpha);
  const ExactModel M(params, Space::E20, Q);
  const auto basis = M.tangent_basis();
  std::vector<Eigen::VectorXd> h;
  for (const auto& b : basis) h.push_back(M.lift(b));
  PlaneObjective f{static_cast<int>(h.size()), M.quotient().base_tensor(h)};
  const int n = f.n;

  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(ss);
  std::normal_distribution<double> N01(0.0, 1.0);
  out.min_sec = std::numeric_limits<double>::infinity();
  out.converged = false;
  // alternating sweeps until the value stops moving; false if the budget ran out
  auto descend = [&](Eigen::VectorXd& u, Eigen::VectorXd& v, double& val, int budget) {
    for (int it = 0; it < budget; ++it) {
      v = min_orthogonal(f.outer_form(u), u);
      u = min_orthogonal(f.outer_form(v), v);
      const double nv = f.value(u, v);
      const bool done = std::abs(val - nv) <= 1e-15 * (1 + std::abs(nv));
      val = nv;
      if (done) return true;
    }
    return false;
  };
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd u(n), v(n);
    for (int i = 0; i < n; ++i) u[i] = N01(rng);
    for (int i = 0; i < n; ++i) v[i] = N01(rng);
    u.normalize();
    v -= v.dot(u) * u;
    v.normalize();
    double val = f.value(u, v);
    const bool conv = descend(u, v, val, max_iter);
    if (val < out.min_sec) {
      out.min_sec = val;
      out.u = u;
      out.v = v;
      out.converged = conv;
    }
  }
  // off the zero locus the minimum sits in a shallow valley where the sweeps converge slowly;
  // keep going on the best restart only
  if (!out.converged) {
    Eigen::VectorXd u = out.u, v = out.v;
    double val = out.min_sec;
    out.converged = descend(u, v, val, 50 * max_iter);
    out.u = u;
    out.v = v;
    out.min_sec = val;
  }
  return out;
}

PlaneClassification classify_minimizer(const ScanPoint& p, const MetricParams& params) {
  const HorizontalBasis B = q20_horizontal_basis(p.t, params, p.theta);
  const ExactModel M(params, Space::E20, B.at);
  const auto basis = M.tangent_basis();
  Eigen::Matrix<double, 10, 7> D;
  const auto all = B.all();
  for (int k = 0; k < 7; ++k)
    D.col(k) = lie_coords(to_lie(B.at, to_deformed(params, B.at, all[static_cast<std::size_t>(k)])));
  auto coords_of = [&](const Eigen::Matrix<double, 7, 1>& c) {
    TangentVec U;
    for (int i = 0; i < 7; ++i) U = U + c[i] * basis[static_cast<std::size_t>(i)];
    const LieCoords x = lie_coords(to_lie(B.at, U));
    return Coeffs7(D.colPivHouseholderQr().solve(x));
  };
  // A minimizing plane is only accurate to about sqrt(noise / lambda), lambda the softest direction of the
  // curvature form around it; near t = 0 and t = pi/4 that is ~1e-6.
  FullClassifyOptions opt;
  opt.fit_tol = 1e-4;
  opt.rank_tol = 1e-4;
  return classify_plane_full(p.theta, p.t, params, coords_of(p.u), coords_of(p.v), opt);
}

double fd_confirm_minimizer(const ScanPoint& p, const MetricParams& params) {
  const Sp2Point Q = orbit_point(p.theta, p.t, Frame{}.alpha);
  const auto basis = ExactModel(params, Space::E20, Q).tangent_basis();
  TangentVec U, V;
  for (int i = 0; i < 7; ++i) {
    U = U + p.u[i] * basis[static_cast<std::size_t>(i)];
    V = V + p.v[i] * basis[static_cast<std::size_t>(i)];
  }
  return SubmersionFd(submersion(SubmersionKind::Q20), full_metric(params), Q).base_sectional(U, V);
}

namespace {

double fd_family_sectional(double theta, double t, const MetricParams& params, const Coeffs7& a, const Coeffs7& b) {
  const HorizontalBasis B = q20_horizontal_basis(t, params, theta);
  const auto all = B.all();
  const TangentVec u = to_deformed(params, B.at, combo(all, a)), v = to_deformed(params, B.at, combo(all, b));
  return SubmersionFd(submersion(SubmersionKind::Q20), full_metric(params), B.at).base_sectional(u, v);
}

}  // namespace

ScanReport scan_min_curvature(const MetricParams& params, const ScanConfig& config) {
  params.validate();
  if (config.theta_steps < 2 || config.t_steps < 2 || config.restarts < 1)
    throw std::invalid_argument("scan_min_curvature: grid resolutions must be >= 2 and restarts >= 1");
  ScanReport R;
  R.params = params;
  R.config = config;
  const int nt = config.theta_steps, ns = config.t_steps;
  R.points.resize(static_cast<std::size_t>(nt * ns));
  auto scan_one = [&](int idx) {
    const int i = idx / ns, j = idx % ns;
    const double theta = i * kPi / nt;
    const double t = (j == ns - 1) ? kQuarter : j * kQuarter / (ns - 1);
    const std::uint64_t s = config.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(idx);
    ScanPoint p = minimize_at(theta, t, params, config.restarts, s, config.max_iter);
    if (config.fd_confirm) p.fd_sec = fd_confirm_minimizer(p, params);
    p.i = i;
    p.j = j;
    R.points[static_cast<std::size_t>(idx)] = p;
  };
  // points are independent; results land at their grid index, so the thread count does not matter
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int idx = next++; idx < nt * ns; idx = next++) {
      try {
        scan_one(idx);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::max(1, std::min(config.threads > 0 ? config.threads
                                                                 : static_cast<int>(std::thread::hardware_concurrency()),
                                            nt * ns));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  // Calibration on planes that are zero by construction at on-locus grid points.
  for (const auto& p : R.points) {
    if (!p.on_zero_locus) continue;
    std::vector<std::pair<Coeffs7, Coeffs7>> planes;
    if (near(p.t, kQuarter)) {
      planes = {family_plane_at(Family::ThetaPair, p.theta, p.t, params, 0.4, 0),
                family_plane_at(Family::XStable, p.theta, p.t, params, 0.4, 0.7),
                family_plane_at(Family::YStable, p.theta, p.t, params, 0.4, -1.3)};
    } else if (finite_scales(params)) {
      // theta on the special set, x-vartheta plane
      planes = {family_plane(Family::XTheta, 0.0, 0.0)};
    } else {
      planes = {family_plane(Family::XTheta, 0.4, 0.6), family_plane(Family::EtaTheta, 1.1, 0)};
    }
    for (const auto& [a, b] : planes) {
      R.max_zero_noise = std::max(R.max_zero_noise, std::abs(e20_sectional(p.theta, p.t, params, a, b)));
      if (config.fd_confirm)
        R.max_zero_noise = std::max(R.max_zero_noise, std::abs(fd_family_sectional(p.theta, p.t, params, a, b)));
    }
  }
  R.threshold = 10 * R.max_zero_noise;
  R.global_min = std::numeric_limits<double>::infinity();
  for (auto& p : R.points) {
    R.global_min = std::min(R.global_min, p.min_sec);
    if (p.min_sec <= 1e-8) {
      p.tag = classify_minimizer(p, params).tag;
      ++R.histogram[tag_name(p.tag)];
    }
  }
  return R;
}

// ---------------------------------------------------------------- flat torus

TorusReport verify_flat_torus(const MetricParams& params, int samples, double t0, int fd_samples) {
  params.validate();
  if (samples < 1) throw std::invalid_argument("verify_flat_torus: samples must be positive");
  TorusReport rep;
  rep.t0 = t0;
  rep.samples = samples;
  const Frame fr;
  const double w1 = 1 / (params.nu1 * params.nu1), w2 = 1 / (params.nu2 * params.nu2);
  const QMat X = QMat::offdiag(fr.alpha);
  const QMat Y = QMat::diag(-w1 * fr.gamma1, w2 * fr.gamma1);
  // Right translation by exp(r Y) commutes with A_{2,0}, A^u and A^d, so the r-circle closes in E20 once the
  // two diagonal rotations differ by an element of the A_{2,0} orbit: period 2 pi / (w1 + w2).
  const double r_period = 2 * kPi / (w1 + w2);
  const int side = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples)))));
  MetricParams split_only = params;
  split_only.l1u = Scale::inf();
  split_only.l1d = Scale::inf();
  int done = 0;
  for (int a = 0; a < side && done < samples; ++a)
    for (int b = 0; b < side && done < samples; ++b, ++done) {
      const double s = 2 * kPi * a / side, r = r_period * b / side;
      const QMat P0 = orbit_point(0.0, t0 + s, fr.alpha).mat();
      const QMat E = qexp(r * Y);
      const Sp2Point P = Sp2Point::from(P0 * E);
      // coordinate fields of (s, r) -> Q0(t0 + s) exp(r Y): P Ad_{exp(-rY)} X and P Y
      const QMat Einv = E.adjoint();
      const TangentVec ds = left_translate(P, Einv * X * E), dr = left_translate(P, Y);
      const double full = ExactModel(params, Space::E20, P)
                              .sectional(to_deformed(params, P, ds), to_deformed(params, P, dr));
      const double split_sec = ExactModel(split_only, Space::E20, P).sectional(ds, dr);
      rep.max_abs_sec = std::max(rep.max_abs_sec, std::abs(full));
      rep.max_abs_sec_split = std::max(rep.max_abs_sec_split, std::abs(split_sec));
      if (done < fd_samples) {
        const SubmersionFd S(submersion(SubmersionKind::Q20), full_metric(params), P);
        const double fd = S.base_sectional(to_deformed(params, P, ds), to_deformed(params, P, dr));
        rep.max_abs_sec_fd = std::max(rep.max_abs_sec_fd, std::abs(fd));
        ++rep.fd_samples;
      }
    }
  if (std::abs(params.nu1 - params.nu2) < 1e-12) {
    rep.closure_tested = true;
    // E20 distance: P exp(period Y) = diag(g, g) P for some unit g
    const Sp2Point P0 = orbit_point(0.0, t0, fr.alpha);
    const QMat end = P0.mat() * qexp(r_period * Y);
    const QMat start = P0.mat();
    // g = end * start^* restricted to the diagonal; residual of the off-diagonal and of g being the same twice
    const QMat G = end * start.adjoint();
    rep.closure_gap = std::max({G.e[0][1].norm(), G.e[1][0].norm(), (G.e[0][0] - G.e[1][1]).norm()});
  }
  {
    // Same plane for the split metric, spanning vectors perturbed inside the horizontal space.
    const HorizontalBasis B = q20_horizontal_basis(t0, split_only, 0.0);
    const double eps = 0.3;
    const TangentVec u = B.x20 + eps * B.eta1, v = B.theta1 + eps * B.theta2;
    rep.control_sec = ExactModel(split_only, Space::E20, B.at).sectional(u, v);
    const auto [a, b] = family_plane(Family::XTheta, 0.0, 0.0);
    rep.control_full_sec = e20_sectional(kPi / 8, t0, params, a, b);
  }
  return rep;
}

// ---------------------------------------------------------------- orbit-projection identities

std::vector<IdentityResult> check_orbit_identities(int theta_steps, int t_steps) {
  const double nu = 1 / std::sqrt(2.0);
  const MetricParams p{nu, nu, Scale::inf(), Scale::inf()};
  struct Identity {
    std::string name;
    std::function<double(const OrbitFrame&, const HorizontalBasis&, const std::array<TangentVec, 3>&)> measured;
    std::function<double(double, double)> predicted;
  };
  // U = (U_alpha, U_gamma1, U_gamma2): A^u killing fields diag(beta, 0) Q
  const auto ip = biinvariant_inner;
  std::vector<Identity> ids = {
      {"<(eta1,eta1),U_gamma1> = -sin(2t)/2", [&](auto& F, auto&, auto& U) { return ip(F.eta1, U[1]); },
       [](double, double t) { return -0.5 * std::sin(2 * t); }},
      {"<(-vartheta1,vartheta1),U_gamma1> = -cos(2theta)",
       [&](auto& F, auto&, auto& U) { return ip(F.second[1] - F.first[1], U[1]); },
       [](double th, double) { return -std::cos(2 * th); }},
      {"<(-vartheta1,vartheta1),U_gamma2> = 0",
       [&](auto& F, auto&, auto& U) { return ip(F.second[1] - F.first[1], U[2]); }, [](double, double) { return 0.0; }},
      {"<U_alpha,x20> = sin(2theta)/2", [&](auto&, auto& B, auto& U) { return ip(B.x20, U[0]); },
       [](double th, double) { return 0.5 * std::sin(2 * th); }},
      {"<U_alpha,y20> = sin(2t)cos(2theta)/2", [&](auto&, auto& B, auto& U) { return ip(B.y20, U[0]); },
       [](double th, double t) { return 0.5 * std::sin(2 * t) * std::cos(2 * th); }},
      {"<U_gamma2,eta1_20> = sin(2theta)(cos(2t) + tan(2t)sin(2t))/2",
       [&](auto&, auto& B, auto& U) { return ip(B.eta1, U[2]); },
       [](double th, double t) { return 0.5 * std::sin(2 * th) * (std::cos(2 * t) + std::tan(2 * t) * std::sin(2 * t)); }},
      {"<U_gamma1,eta1_20> = -sin(2t)/2 + tan(2t)(sin^2(theta)cos^2(t) - cos^2(theta)sin^2(t))",
       [&](auto&, auto& B, auto& U) { return ip(B.eta1, U[1]); },
       [](double th, double t) {
         const double c = std::cos(th), s = std::sin(th), ct = std::cos(t), st = std::sin(t);
         return -0.5 * std::sin(2 * t) + std::tan(2 * t) * (s * s * ct * ct - c * c * st * st);
       }},
      {"<U_gamma_i,x20> = 0", [&](auto&, auto& B, auto& U) { return std::abs(ip(B.x20, U[1])) + std::abs(ip(B.x20, U[2])); },
       [](double, double) { return 0.0; }},
      {"<U_gamma_i,y20> = 0", [&](auto&, auto& B, auto& U) { return std::abs(ip(B.y20, U[1])) + std::abs(ip(B.y20, U[2])); },
       [](double, double) { return 0.0; }},
      {"<U_alpha,eta1_20> = <U_alpha,vartheta1_20> = 0",
       [&](auto&, auto& B, auto& U) { return std::abs(ip(B.eta1, U[0])) + std::abs(ip(B.theta1, U[0])); },
       [](double, double) { return 0.0; }},
      {"<U_alpha,(vartheta,0)> = <U_alpha,(0,vartheta)> = 0",
       [&](auto& F, auto&, auto& U) {
         double s = 0;
         for (int i = 1; i < 3; ++i) s += std::abs(ip(F.first[static_cast<std::size_t>(i)], U[0])) + std::abs(ip(F.second[static_cast<std::size_t>(i)], U[0]));
         return s;
       },
       [](double, double) { return 0.0; }},
      {"<(0,vartheta1),U_gamma1> = sin^2(theta)cos^2(t) - cos^2(theta)sin^2(t)",
       [&](auto& F, auto&, auto& U) { return ip(F.second[1], U[1]); },
       [](double th, double t) {
         const double c = std::cos(th), s = std::sin(th), ct = std::cos(t), st = std::sin(t);
         return s * s * ct * ct - c * c * st * st;
       }},
      {"<(-vartheta1,0),U_gamma1> = sin^2(theta)sin^2(t) - cos^2(theta)cos^2(t)",
       [&](auto& F, auto&, auto& U) { return ip(-F.first[1], U[1]); },
       [](double th, double t) {
         const double c = std::cos(th), s = std::sin(th), ct = std::cos(t), st = std::sin(t);
         return s * s * st * st - c * c * ct * ct;
       }},
      {"<U_gamma2,(eta1,eta1)> = sin(2theta)cos(2t)/2", [&](auto& F, auto&, auto& U) { return ip(F.eta1, U[2]); },
       [](double th, double t) { return 0.5 * std::sin(2 * th) * std::cos(2 * t); }},
      {"<U_gamma2,(0,vartheta1)> = sin(2theta)sin(2t)/2", [&](auto& F, auto&, auto& U) { return ip(F.second[1], U[2]); },
       [](double th, double t) { return 0.5 * std::sin(2 * th) * std::sin(2 * t); }},
  };
  std::vector<IdentityResult> out;
  for (const auto& id : ids) {
    IdentityResult r;
    r.name = id.name;
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    for (int i = 0; i < theta_steps; ++i)
      for (int j = 0; j < t_steps; ++j) {
        const double th = i * kPi / theta_steps, t = j * kQuarter / t_steps;
        const OrbitFrame F = orbit_frame(th, t);
        const HorizontalBasis B = q20_horizontal_basis(t, p, th);
        const std::array<TangentVec, 3> U = {killing_field(action_of(ActionKind::Up), F.frame.alpha, F.at),
                                             killing_field(action_of(ActionKind::Up), F.frame.gamma1, F.at),
                                             killing_field(action_of(ActionKind::Up), F.frame.gamma2, F.at)};
        const double m = id.measured(F, B, U), pr = id.predicted(th, t);
        const bool pz = std::abs(pr) <= 1e-9, mz = std::abs(m) <= 1e-9;
        if (pz) r.zero_mismatch = std::max(r.zero_mismatch, std::abs(m));
        if (mz) r.zero_mismatch = std::max(r.zero_mismatch, std::abs(pr));
        if (!pz && !mz) {
          rmin = std::min(rmin, m / pr);
          rmax = std::max(rmax, m / pr);
        } else if (pz != mz) {
          r.zero_mismatch = std::max(r.zero_mismatch, std::max(std::abs(m), std::abs(pr)));
        }
      }
    if (rmax >= rmin) {
      r.scale = 0.5 * (rmin + rmax);
      r.scale_spread = rmax - rmin;
    }
    bool scale_ok = rmax < rmin;  // identically zero prediction
    if (!scale_ok)
      for (double c : {1.0, 2.0, 0.5})
        if (std::abs(r.scale - c) <= 1e-9 && r.scale_spread <= 1e-9) scale_ok = true;
    r.pass = scale_ok && r.zero_mismatch <= 1e-9;
    out.push_back(r);
  }
  return out;
}

}  // namespace sp2lab
