#include "sp2lab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sp2lab/submersion.hpp"
#include "sp2lab/topology.hpp"

namespace sp2lab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuarter = kPi / 4;

using Rng = std::mt19937_64;

double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

QMat random_lie(Rng& rng, double s = 1.0) {
  LieCoords x;
  for (int i = 0; i < 10; ++i) x[i] = s * gauss(rng);
  return lie_from_coords(x);
}
Sp2Point random_point(Rng& rng) { return Sp2Point::from(qexp(random_lie(rng))); }
Quat random_quat(Rng& rng) { return {gauss(rng), gauss(rng), gauss(rng), gauss(rng)}; }
Quat random_imag(Rng& rng) { return {0, gauss(rng), gauss(rng), gauss(rng)}; }
Quat random_unit(Rng& rng) { return random_quat(rng).normalized(); }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

TangentVec combo(const std::array<TangentVec, 7>& B, const Coeffs7& c) {
  TangentVec out;
  for (int i = 0; i < 7; ++i) out = out + c[i] * B[static_cast<std::size_t>(i)];
  return out;
}

CheckResult make_check(std::string id, double residual, double tol, long samples, std::string detail = {}) {
  CheckResult c;
  c.id = std::move(id);
  c.residual = residual;
  c.tolerance = tol;
  c.pass = residual <= tol;
  c.samples = samples;
  c.detail = std::move(detail);
  return c;
}

CheckResult make_flag(std::string id, bool ok, long samples, std::string detail = {}) {
  CheckResult c;
  c.id = std::move(id);
  c.pass = ok;
  c.residual = ok ? 0 : 1;
  c.samples = samples;
  c.detail = std::move(detail);
  return c;
}

int scaled(double scale, int n) { return std::max(1, static_cast<int>(std::lround(scale * n))); }

double gram_gap(const MetricEvaluator& a, const MetricEvaluator& b, const Sp2Point& Q,
                const std::vector<TangentVec>& V) {
  const Eigen::MatrixXd A = a.gram(Q, V), B = b.gram(Q, V);
  return (A - B).cwiseAbs().maxCoeff() / B.cwiseAbs().maxCoeff();
}

std::vector<TangentVec> random_tangents(Rng& rng, const Sp2Point& Q, int n) {
  std::vector<TangentVec> V;
  for (int i = 0; i < n; ++i) V.push_back(left_translate(Q, random_lie(rng)));
  return V;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"cheeger", "curvature3", "hopf4", "zeros5", "basis6", "locus7", "topo8"};
  return names;
}

// ---------------------------------------------------------------- closed forms against fd

ConcordanceReport closed_form_concordance(double nu1, double nu2, int tuples, int points_per_tuple, std::uint64_t seed,
                                          const FdOptions& fdopt) {
  ConcordanceReport rep;
  rep.tuples = tuples;
  Rng rng(seed);
  for (int k = 0; k < tuples; ++k) {
    const double n1 = k == 0 ? nu1 : uniform(rng, 0.15, 0.69);
    const double n2 = k == 0 ? nu2 : uniform(rng, 0.15, 0.69);
    rep.nus.emplace_back(n1, n2);
    const auto g = split_metric(n1, n2);
    for (int p = 0; p < points_per_tuple; ++p) {
      const Sp2Point Q = random_point(rng);
      const Sp2Fd fd(*g, Q, fdopt);
      auto H = [&](const Quat& q) { return left_translate(Q, QMat::offdiag(q)); };
      auto V1 = [&](const Quat& b) { return left_translate(Q, QMat::diag(b, Quat{})); };
      auto V2 = [&](const Quat& b) { return left_translate(Q, QMat::diag(Quat{}, b)); };
      auto len = [&](const TangentVec& X) { return std::sqrt(g->norm2(Q, X)); };
      auto record = [&](const std::string& kind, double closed, double numeric, double scale) {
        const double r = std::abs(closed - numeric) / std::max(std::abs(closed), 1e-2 * scale);
        ++rep.samples;
        double& worst = rep.by_component[kind];
        worst = std::max(worst, r);
        if (r > rep.max_residual) {
          rep.max_residual = r;
          rep.worst = kind + " nu=(" + num(n1) + "," + num(n2) + ") closed=" + num(closed) + " fd=" + num(numeric);
        }
      };
      const Quat b1 = random_imag(rng), b2 = random_imag(rng), b3 = random_imag(rng);
      const Quat q1 = random_quat(rng), q2 = random_quat(rng);
      const TangentVec z = H(q1), zeta = H(q2), v1 = V1(b1), w1 = V1(b2), v2 = V2(b3);
      record("fiber V1", closed_fiber_curv(n1, b1, b2), fd.curv(V1(b1), V1(b2)), std::pow(len(v1) * len(w1), 2));
      record("fiber V2", closed_fiber_curv(n2, b3, b1), fd.curv(V2(b3), V2(b1)), std::pow(len(v2) * len(V2(b1)), 2));
      record("horizontal", closed_horizontal_curv(Q, z, zeta, n1, n2), fd.curv(z, zeta), std::pow(len(z) * len(zeta), 2));
      record("vertizontal", vertizontal_curv(Q, z, v1, v2, n1, n2), fd.curv(z, v1 + v2),
             std::pow(len(z) * len(v1 + v2), 2));
      record("vertizontal V1", vertizontal_curv(Q, zeta, w1, TangentVec{}, n1, n2), fd.curv(zeta, w1),
             std::pow(len(zeta) * len(w1), 2));
      record("mixed", closed_mixed_component(Q, z, v1, zeta, v2, n1, n2), fd.riemann(z, v1, zeta, v2),
             len(z) * len(v1) * len(zeta) * len(v2));
      // components that vanish for the split metric
      record("zero R(V1,V1,H,V2)", 0.0, fd.riemann(v1, w1, z, v2), len(v1) * len(w1) * len(z) * len(v2));
      record("zero R(H,H,V1,V2)", 0.0, fd.riemann(z, zeta, v1, v2), len(z) * len(zeta) * len(v1) * len(v2));
      record("zero V1 x V2", 0.0, fd.curv(v1, v2), std::pow(len(v1) * len(v2), 2));
      if (p < 3) {
        // biinvariant formula on its own fd tensor
        const auto b = biinvariant_metric();
        const Sp2Fd fb(*b, Q, fdopt);
        for (int s = 0; s < 4; ++s) {
          const QMat X = random_lie(rng), Y = random_lie(rng), Z = random_lie(rng), W = random_lie(rng);
          const double scale = std::sqrt(b_lie(X, X) * b_lie(Y, Y) * b_lie(Z, Z) * b_lie(W, W));
          record("biinvariant", biinvariant_riemann(X, Y, Z, W),
                 fb.riemann(left_translate(Q, X), left_translate(Q, Y), left_translate(Q, Z), left_translate(Q, W)),
                 scale);
        }
      }
      {
        // connection-metric rules on the Hopf fibration with fibre scale t
        const double t = uniform(rng, 0.4, 1.5);
        const QVec2 N = Q.col1();
        const auto e = s7_tangent_basis(N);
        const FdCurvature fs(berger_metric_field(N, t), 7, fdopt);
        auto coords = [&](const QVec2& X) {
          Eigen::VectorXd c(7);
          for (int i = 0; i < 7; ++i) c[i] = dot(X, e[static_cast<std::size_t>(i)]);
          return c;
        };
        QVec2 e2 = gauss(rng) * e[4] + gauss(rng) * e[5] + gauss(rng) * e[6];
        e2 = (1 / std::sqrt(norm2(e2))) * e2;
        const QVec2 e1 = e[3];
        const double a = hopf_A_norm2(e1, e2);
        record("connection iii", connection_metric_component(t, ConnectionRule::HorizontalIII, {1 + 3 * a, a, 0}),
               fs.curv(coords(e1), coords(e2)), 1.0);
        record("connection iv", connection_metric_component(t, ConnectionRule::VerticalIV, {0, 0, 1}),
               fs.curv(coords(e[0]), coords(e[1])), 1.0);
        const Quat beta = Quat::i();
        const double an = norm2(hopf_A(e1, beta, N));
        record("connection v", connection_metric_component(t, ConnectionRule::VertizontalV, {0, an, 0}),
               fs.curv(coords(e1), coords(N * beta)), 1.0);
        record("connection vi", connection_metric_component(t, ConnectionRule::MixedVI, {}),
               fs.riemann(coords(e[0]), coords(e[1]), coords(e[2]), coords(e2)), 1.0);
      }
    }
  }
  return rep;
}

HopfReport hopf_concordance(int samples, std::uint64_t seed) {
  HopfReport rep;
  rep.samples = samples;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    QVec2 N = {random_quat(rng), random_quat(rng)};
    N = (1 / std::sqrt(norm2(N))) * N;
    QVec2 z = {random_quat(rng), random_quat(rng)};
    z = z - N * herm(N, z);
    const Quat beta = random_imag(rng);
    const QVec2 a = hopf_A(z, beta, N), b = numerical_hopf_A(z, beta, N);
    rep.max_error = std::max(rep.max_error, std::sqrt(norm2(a - b) / norm2(a)));
    const double expect = std::sqrt(norm2(z)) * beta.norm();
    rep.max_norm_error = std::max(rep.max_norm_error, std::abs(std::sqrt(norm2(a)) - expect) / expect);
  }
  return rep;
}

// ---------------------------------------------------------------- classification soundness

namespace {

struct Outcome {
  PlaneTag tag;
  double fd;
  double split_exact;  // exact split-metric value where available, NaN otherwise
  std::string where;
};

SoundnessReport tally(const std::vector<Outcome>& out, double flat) {
  SoundnessReport R;
  R.min_positive_fd = std::numeric_limits<double>::infinity();
  for (const auto& o : out) {
    ++R.planes;
    ++R.histogram[tag_name(o.tag)];
    if (o.tag == PlaneTag::NumericallyFlatUnclassified) {
      ++R.unclassified;
      continue;
    }
    if (predicts_zero(o.tag)) {
      ++R.zero_predicted;
      R.max_zero_fd = std::max(R.max_zero_fd, std::abs(o.fd));
    } else {
      ++R.positive_predicted;
      R.min_positive_fd = std::min(R.min_positive_fd, o.fd);
    }
  }
  R.threshold = 10 * R.max_zero_fd;
  for (const auto& o : out) {
    bool bad = false;
    if (o.tag == PlaneTag::NumericallyFlatUnclassified) bad = true;
    else if (predicts_zero(o.tag)) bad = std::abs(o.fd) > flat;
    else bad = o.fd < R.threshold;
    if (std::abs(o.fd) <= flat && !std::isnan(o.split_exact) && o.split_exact > flat) ++R.subset_violations;
    if (bad) {
      ++R.mismatches;
      if (R.counterexample.empty())
        R.counterexample = std::string(tag_name(o.tag)) + " fd=" + num(o.fd) + " at " + o.where;
    }
  }
  return R;
}

}  // namespace

void merge_into(SoundnessReport& into, const SoundnessReport& from) {
  if (into.planes == 0) {
    into = from;
    return;
  }
  into.planes += from.planes;
  into.zero_predicted += from.zero_predicted;
  into.positive_predicted += from.positive_predicted;
  into.mismatches += from.mismatches;
  into.unclassified += from.unclassified;
  into.subset_violations += from.subset_violations;
  into.threshold = std::max(into.threshold, from.threshold);
  into.max_zero_fd = std::max(into.max_zero_fd, from.max_zero_fd);
  into.min_positive_fd = std::min(into.min_positive_fd, from.min_positive_fd);
  for (const auto& [k, v] : from.histogram) into.histogram[k] += v;
  if (into.counterexample.empty()) into.counterexample = from.counterexample;
}

SoundnessReport sp2_classification_sweep(double nu1, double nu2, int points, int planes_per_point, std::uint64_t seed,
                                         const FdOptions& fdopt, double flat) {
  Rng rng(seed);
  const auto g = split_metric(nu1, nu2);
  std::vector<Outcome> out;
  for (int p = 0; p < points; ++p) {
    const Sp2Point Q = random_point(rng);
    const Sp2Fd fd(*g, Q, fdopt);
    const Splitting S = splitting_at(Q);
    auto rand_in = [&](const auto& basis) {
      TangentVec v;
      for (const auto& b : basis) v = v + gauss(rng) * b;
      return v;
    };
    // kernel of (v1, v2) -> A1_z v1 + A2_z v2 for a given z
    auto kernel_pair = [&](const TangentVec& z, TangentVec& v1, TangentVec& v2) {
      Eigen::Matrix<double, 10, 6> M;
      for (int i = 0; i < 3; ++i) {
        M.col(i) = lie_coords(to_lie(Q, vertizontal_A1(Q, z, S.basisV1[static_cast<std::size_t>(i)], nu1)));
        M.col(3 + i) = lie_coords(to_lie(Q, vertizontal_A2(Q, z, S.basisV2[static_cast<std::size_t>(i)], nu2)));
      }
      const Eigen::JacobiSVD<Eigen::Matrix<double, 10, 6>> svd(M, Eigen::ComputeFullV);
      const auto sv = svd.singularValues();
      if (sv[4] > 1e-12 * sv[0]) return false;
      const Eigen::Matrix<double, 6, 1> c = gauss(rng) * svd.matrixV().col(4) + gauss(rng) * svd.matrixV().col(5);
      v1 = TangentVec{};
      v2 = TangentVec{};
      for (int i = 0; i < 3; ++i) {
        v1 = v1 + c[i] * S.basisV1[static_cast<std::size_t>(i)];
        v2 = v2 + c[3 + i] * S.basisV2[static_cast<std::size_t>(i)];
      }
      return true;
    };
    for (int k = 0; k < planes_per_point; ++k) {
      TangentVec u, v;
      switch (k % 7) {
        case 0:  // generic
          u = left_translate(Q, random_lie(rng));
          v = left_translate(Q, random_lie(rng));
          break;
        case 1:  // no H component
          u = rand_in(S.basisV1);
          v = rand_in(S.basisV2);
          if (k % 2) u = u + gauss(rng) * v;
          break;
        case 2:
        case 3: {  // z + a v1 + b v2, v1 + v2 with A1_z v1 + A2_z v2 = 0 (case 2) or not (case 3)
          const TangentVec z = rand_in(S.basisH);
          TangentVec v1, v2;
          if (k % 7 == 2) {
            if (!kernel_pair(z, v1, v2)) continue;
          } else {
            v1 = rand_in(S.basisV1);
            v2 = rand_in(S.basisV2);
          }
          const TangentVec e1 = z + gauss(rng) * v1 + gauss(rng) * v2, e2 = v1 + v2;
          const double c = std::cos(gauss(rng)), s = std::sin(gauss(rng));
          u = c * e1 + s * e2;
          v = -s * e1 + c * e2;
          break;
        }
        case 4:  // z, v1
          u = rand_in(S.basisH);
          v = rand_in(S.basisV1);
          break;
        case 5:  // two-dimensional V1 projection
          u = rand_in(S.basisV1) + rand_in(S.basisV2);
          v = rand_in(S.basisV1) + gauss(rng) * rand_in(S.basisV2);
          break;
        default:  // horizontal plane
          u = rand_in(S.basisH);
          v = rand_in(S.basisH);
          break;
      }
      const PlaneClassification c = classify_plane_g_nu(Q, u, v, nu1, nu2);
      out.push_back({c.tag, fd.sectional(u, v), std::numeric_limits<double>::quiet_NaN(),
                     "sp(2) point " + std::to_string(p) + " plane kind " + std::to_string(k % 7)});
    }
  }
  return tally(out, flat);
}

SoundnessReport e20_classification_sweep(const MetricParams& params, int points, int planes_per_point,
                                         std::uint64_t seed, const FdOptions& fdopt, double flat) {
  params.validate();
  Rng rng(seed);
  const auto g = full_metric(params);
  const double special[4] = {0, kPi / 4, kPi / 2, 3 * kPi / 4};
  std::vector<Outcome> out;
  for (int p = 0; p < points; ++p) {
    double theta = 0, t = 0;
    switch (p % 4) {
      case 0: theta = special[(p / 4) % 4]; t = uniform(rng, 0.02, kQuarter - 0.02); break;
      case 1: theta = uniform(rng, 0, kPi); t = kQuarter; break;
      case 2: theta = uniform(rng, 0, kPi); t = uniform(rng, 0, kQuarter); break;
      default: theta = special[(p / 4) % 4]; t = 0; break;
    }
    const HorizontalBasis B = q20_horizontal_basis(t, params, theta);
    const auto all = B.all();
    const SubmersionFd S(submersion(SubmersionKind::Q20), g, B.at, fdopt);
    const bool end = p % 4 == 1;
    for (int k = 0; k < planes_per_point; ++k) {
      Coeffs7 a, b;
      const double phi = uniform(rng, 0, 2 * kPi), lambda = 2 * gauss(rng);
      const int kind = k % 5;
      if (kind == 0) {
        for (int i = 0; i < 7; ++i) {
          a[i] = gauss(rng);
          b[i] = gauss(rng);
        }
      } else {
        Family f;
        if (end) f = kind == 1 ? Family::ThetaPair : (kind == 2 || kind == 4) ? Family::XStable : Family::YStable;
        else f = (kind == 1 || kind == 3) ? Family::XTheta : Family::EtaTheta;
        std::tie(a, b) = family_plane_at(f, theta, t, params, phi, lambda);
        if (kind == 4) {
          // off the family
          for (int i = 0; i < 7; ++i) b[i] += 0.05 * gauss(rng);
        }
      }
      const PlaneClassification c = classify_plane_full(theta, t, params, a, b);
      const double fd = S.base_sectional(to_deformed(params, B.at, combo(all, a)), to_deformed(params, B.at, combo(all, b)));
      out.push_back({c.tag, fd, c.sec_split,
                     "e20 theta=" + num(theta) + " t=" + num(t) + " plane kind " + std::to_string(kind)});
    }
  }
  return tally(out, flat);
}

// ---------------------------------------------------------------- horizontal bases

BasisReport horizontal_basis_report(const MetricParams& params, int t_steps) {
  BasisReport R;
  const auto g = split_metric(params.nu1, params.nu2);
  for (double theta : {0.0, 0.3, 1.2, 2.9})
    for (int j = 0; j < t_steps; ++j) {
      const double t = (j == t_steps - 1) ? kQuarter : j * kQuarter / (t_steps - 1);
      R.max_orthogonality = std::max(R.max_orthogonality, q20_orthogonality_residual(q20_horizontal_basis(t, params, theta)));
      ++R.samples;
    }
  for (double theta : {0.0, 0.7}) {
    const HorizontalBasis end = q20_horizontal_basis(kQuarter, params, theta);
    const HorizontalBasis near = q20_horizontal_basis(kQuarter - 1e-7, params, theta);
    const auto a = near.all(), b = end.all();
    for (std::size_t i = 0; i < 7; ++i) {
      const TangentVec na = (1 / std::sqrt(g->norm2(near.at, a[i]))) * a[i];
      const TangentVec nb = (1 / std::sqrt(g->norm2(end.at, b[i]))) * b[i];
      R.max_limit_gap = std::max(R.max_limit_gap, max_abs(na - nb));
    }
    const OrbitFrame F = orbit_frame(theta, kQuarter);
    const double w1 = 1 / (params.nu1 * params.nu1), w2 = 1 / (params.nu2 * params.nu2);
    R.limit_identity = std::max({R.limit_identity, max_abs(end.eta1 - w2 * F.second[1]), max_abs(end.eta2 - w2 * F.second[2]),
                                 max_abs((end.theta1 - end.eta1) + w1 * F.first[1]),
                                 max_abs((end.theta2 - end.eta2) + w1 * F.first[2])});
  }
  R.ok = R.max_orthogonality <= 1e-10 && R.max_limit_gap <= 1e-5 && R.limit_identity <= 1e-12;
  return R;
}

// ---------------------------------------------------------------- scans

LocusReport locus_report(const ScanReport& R, bool expect_locus, double flat) {
  LocusReport L;
  L.global_min = R.global_min;
  L.min_off_locus = std::numeric_limits<double>::infinity();
  for (const auto& p : R.points) {
    if (!p.converged) ++L.unconverged;
    if (p.tag == PlaneTag::NumericallyFlatUnclassified) ++L.unclassified;
    if (R.config.fd_confirm) L.max_fd_gap = std::max(L.max_fd_gap, std::abs(p.fd_sec - p.min_sec));
    if (p.on_zero_locus) {
      L.max_on_locus = std::max(L.max_on_locus, p.min_sec);
      if (expect_locus && p.min_sec > flat) ++L.misplaced;
    } else {
      L.min_off_locus = std::min(L.min_off_locus, p.min_sec);
      if (expect_locus && (p.min_sec <= flat || p.min_sec < R.threshold)) ++L.misplaced;
    }
  }
  return L;
}

// ---------------------------------------------------------------- suites

namespace {

SuiteResult suite_cheeger(const VerifyOptions& o) {
  SuiteResult S{"cheeger", {}};
  Rng rng(o.seed);
  const MetricParams& p = o.params;
  const auto base = split_metric(p.nu1, p.nu2);
  const auto up = action_of(ActionKind::Up), down = action_of(ActionKind::Down);
  const int n = scaled(o.scale, 50);
  {
    double worst = 0;
    for (const auto& [lu, ld] : {std::pair{p.l1u, p.l1d}, std::pair{Scale::of(0.7), Scale::of(1.9)}}) {
      const auto ud = cheeger_deform(cheeger_deform(base, up, lu), down, ld);
      const auto du = cheeger_deform(cheeger_deform(base, down, ld), up, lu);
      MetricParams q = p;
      q.l1u = lu;
      q.l1d = ld;
      const auto joint = full_metric(q);
      for (int s = 0; s < n; ++s) {
        const Sp2Point Q = random_point(rng);
        const auto V = random_tangents(rng, Q, 6);
        worst = std::max({worst, gram_gap(*ud, *du, Q, V), gram_gap(*ud, *joint, Q, V)});
      }
    }
    S.checks.push_back(make_check("cheeger.order_independence", worst, 1e-10, 2L * n,
                                  "A^u then A^d, A^d then A^u and the joint deformation"));
  }
  {
    double worst = 0, exact = 0;
    for (const auto& act : {up, down, action_of(ActionKind::Left), action_of(ActionKind::Right)}) {
      const auto big = cheeger_deform(base, act, Scale::of(1e6));
      const auto none = cheeger_deform(base, act, Scale::inf());
      for (int s = 0; s < n; ++s) {
        const Sp2Point Q = random_point(rng);
        const auto V = random_tangents(rng, Q, 6);
        worst = std::max(worst, gram_gap(*big, *base, Q, V));
        exact = std::max(exact, gram_gap(*none, *base, Q, V));
      }
    }
    S.checks.push_back(make_check("cheeger.large_scale_limit", worst, 1e-10, 4L * n, "l = 1e6 against the base metric"));
    S.checks.push_back(make_check("cheeger.infinite_scale_identity", exact, 0.0, 4L * n));
  }
  {
    // biinvariant metric deformed along A^l and A^r with the scales of nu1, nu2 is the split metric
    const auto lr = cheeger_deform(biinvariant_metric(), {action_of(ActionKind::Left), action_of(ActionKind::Right)},
                                   {scale_of_nu(p.nu1), scale_of_nu(p.nu2)});
    double worst = 0;
    for (int s = 0; s < n; ++s) {
      const Sp2Point Q = random_point(rng);
      worst = std::max(worst, gram_gap(*lr, *base, Q, random_tangents(rng, Q, 6)));
    }
    S.checks.push_back(make_check("cheeger.split_from_biinvariant", worst, 1e-10, n, "scale map nu(l) round trip"));
  }
  {
    // killing lengths grow with l toward the base value
    const Sp2Point Q = random_point(rng);
    const TangentVec K = killing_field(up, Quat::i(), Q);
    double prev = 0;
    bool mono = true;
    for (double l : {0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
      const double len = cheeger_deform(base, up, Scale::of(l))->norm2(Q, K);
      mono = mono && len > prev;
      prev = len;
    }
    mono = mono && prev < base->norm2(Q, K);
    S.checks.push_back(make_flag("cheeger.monotone_in_scale", mono, 6));
  }
  {
    const auto g = full_metric(p);
    for (auto kind : {ActionKind::Up, ActionKind::Down, ActionKind::Left, ActionKind::Right, ActionKind::Diag20}) {
      const auto a = action_of(kind);
      double worst = 0;
      for (int s = 0; s < n; ++s) {
        const Sp2Point Q = random_point(rng);
        const Quat h = random_unit(rng);
        const TangentVec X = left_translate(Q, random_lie(rng)), Y = left_translate(Q, random_lie(rng));
        const double before = g->inner(Q, X, Y);
        const double after = g->inner(act(a, h, Q), push_forward(a, h, X), push_forward(a, h, Y));
        worst = std::max(worst, std::abs(after - before) / std::sqrt(g->norm2(Q, X) * g->norm2(Q, Y)));
      }
      S.checks.push_back(make_check("cheeger.isometry." + a.name(), worst, 1e-9, n));
    }
  }
  {
    double smallest = std::numeric_limits<double>::infinity();
    const int tuples = 10, pts = scaled(o.scale, 100);
    for (int k = 0; k < tuples; ++k) {
      MetricParams q{uniform(rng, 0.1, kNuMax), uniform(rng, 0.1, kNuMax), Scale::of(uniform(rng, 0.2, 5)),
                     Scale::of(uniform(rng, 0.2, 5))};
      const auto g = full_metric(q);
      for (int s = 0; s < pts; ++s) {
        const Sp2Point Q = random_point(rng);
        std::vector<TangentVec> V;
        for (const auto& E : lie_basis()) V.push_back(left_translate(Q, E));
        smallest = std::min(smallest, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g->gram(Q, V)).eigenvalues().minCoeff());
      }
    }
    auto c = make_flag("cheeger.positive_definite", smallest > 0, static_cast<long>(tuples) * pts,
                       "smallest gram eigenvalue " + num(smallest));
    c.residual = smallest;
    S.checks.push_back(c);
  }
  return S;
}

SuiteResult suite_curvature3(const VerifyOptions& o) {
  SuiteResult S{"curvature3", {}};
  {
    const double sign = fd_curvature_sign();
    S.checks.push_back(make_flag("curvature3.sign_calibration", sign == 1.0 || sign == -1.0, 1));
  }
  const ConcordanceReport C = closed_form_concordance(o.params.nu1, o.params.nu2, 5, scaled(o.scale, 12), o.seed, o.fd);
  auto c = make_check("curvature3.closed_form_vs_fd", C.max_residual, 1e-4, C.samples, C.worst);
  S.checks.push_back(c);
  {
    Rng rng(o.seed + 1);
    const Sp2Point Q = random_point(rng);
    const Sp2Fd fd(*full_metric(o.params), Q, o.fd);
    const double res = std::max(fd.core().symmetry_residual(), fd.core().bianchi_residual());
    S.checks.push_back(make_check("curvature3.fd_symmetries", res, 1e-5, 1));
  }
  return S;
}

SuiteResult suite_hopf4(const VerifyOptions& o) {
  SuiteResult S{"hopf4", {}};
  const HopfReport H = hopf_concordance(scaled(o.scale, 100), o.seed);
  S.checks.push_back(make_check("hopf4.A_tensor_vs_numerical", H.max_error, 1e-8, H.samples));
  S.checks.push_back(make_check("hopf4.A_norm", H.max_norm_error, 1e-12, H.samples, "|A_z N beta| = |z||beta|"));
  return S;
}

SuiteResult suite_zeros5(const VerifyOptions& o) {
  SuiteResult S{"zeros5", {}};
  const SoundnessReport R = sp2_classification_sweep(o.params.nu1, o.params.nu2, scaled(o.scale, 10),
                                                     o.planes_per_point > 0 ? o.planes_per_point : 70, o.seed, o.fd,
                                                     o.flat_threshold);
  std::ostringstream d;
  d << "zero " << R.zero_predicted << " positive " << R.positive_predicted << " threshold " << num(R.threshold)
    << " min positive fd " << num(R.min_positive_fd);
  auto c = make_check("zeros5.classification_vs_fd", static_cast<double>(R.mismatches + R.unclassified), 0, R.planes, d.str());
  c.counterexample = R.counterexample;
  S.checks.push_back(c);
  S.checks.push_back(make_check("zeros5.zero_planes_flat", R.max_zero_fd, o.flat_threshold, R.zero_predicted));
  {
    // known cases: V1 x V2 is flat, a plane with two-dimensional V1 projection is not
    const Sp2Point Q = orbit_point(0.4, 0.3, Quat::i());
    const TangentVec v1 = left_translate(Q, QMat::diag(Quat::i(), Quat{})), w1 = left_translate(Q, QMat::diag(Quat::j(), Quat{}));
    const TangentVec w2 = left_translate(Q, QMat::diag(Quat{}, Quat::k()));
    const bool ok = classify_plane_g_nu(Q, v1, w2, o.params.nu1, o.params.nu2).tag == PlaneTag::ZeroThm51 &&
                    classify_plane_g_nu(Q, v1, w1, o.params.nu1, o.params.nu2).tag == PlaneTag::Positive;
    S.checks.push_back(make_flag("zeros5.examples", ok, 2));
  }
  return S;
}

SuiteResult suite_basis6(const VerifyOptions& o) {
  SuiteResult S{"basis6", {}};
  const BasisReport B = horizontal_basis_report(o.params, 16);
  S.checks.push_back(make_check("basis6.orthogonality", B.max_orthogonality, 1e-10, B.samples));
  S.checks.push_back(make_check("basis6.limit_continuity", B.max_limit_gap, 1e-5, 14));
  S.checks.push_back(make_check("basis6.limit_identities", B.limit_identity, 1e-12, 8));
  return S;
}

SuiteResult suite_locus7(const VerifyOptions& o) {
  SuiteResult S{"locus7", {}};
  const MetricParams& p = o.params;
  {
    const bool ok = zero_locus_membership(0, 0.3) && zero_locus_membership(kPi / 8, kQuarter) &&
                    !zero_locus_membership(kPi / 8, kPi / 8) && zero_locus_membership(kPi / 2, 0.1);
    S.checks.push_back(make_flag("locus7.membership_examples", ok, 4));
  }
  {
    const auto [ea, eb] = family_plane(Family::EtaTheta, 0.3, 0);
    bool ok = classify_plane_full(kPi / 8, 0.3, p, ea, eb).tag == PlaneTag::Positive;
    const auto [pa, pb] = family_plane(Family::ThetaPair, 0.0, 0);
    ok = ok && classify_plane_full(0, kQuarter, p, pa, pb).tag == PlaneTag::ZeroProp74;
    for (double lambda : {0.0, 1.0, -2.0}) {
      const auto [xa, xb] = family_plane(Family::XStable, 0.0, lambda);
      ok = ok && classify_plane_full(0, kQuarter, p, xa, xb).tag == PlaneTag::ZeroProp75x;
    }
    S.checks.push_back(make_flag("locus7.classifier_examples", ok, 5));
  }
  {
    const int ppp = o.planes_per_point > 0 ? o.planes_per_point : 40;
    SoundnessReport R = e20_classification_sweep(p, scaled(o.scale, 16), ppp, o.seed, o.fd, o.flat_threshold);
    MetricParams split = p;
    split.l1u = Scale::inf();
    split.l1d = Scale::inf();
    merge_into(R, e20_classification_sweep(split, scaled(o.scale, 8), ppp, o.seed + 7, o.fd, o.flat_threshold));
    std::ostringstream d;
    d << "zero " << R.zero_predicted << " positive " << R.positive_predicted << " threshold " << num(R.threshold);
    for (const auto& [k, v] : R.histogram) d << " " << k << "=" << v;
    auto c = make_check("locus7.classification_vs_fd", static_cast<double>(R.mismatches + R.unclassified), 0, R.planes,
                        d.str());
    c.counterexample = R.counterexample;
    S.checks.push_back(c);
    S.checks.push_back(make_check("locus7.flat_subset_of_split_flat", static_cast<double>(R.subset_violations), 0, R.planes));
  }
  {
    const VwzSolution x = solve_v_wz(p, 0, 0), y = solve_v_wz(p, kPi / 2, 0);
    const double err = std::max({(x.coeffs - Eigen::Vector2d(1, 0)).norm(), (y.coeffs - Eigen::Vector2d(-1, 0)).norm(),
                                 x.residual, y.residual});
    S.checks.push_back(make_check("locus7.v_wz_explicit", err, 1e-10, 2));
    double res = 0;
    for (double pz : {0.3, 1.1}) res = std::max(res, solve_v_wz(p, pz, 0.7).residual);
    S.checks.push_back(make_check("locus7.v_wz_solved", res, 1e-10, 2));
  }
  {
    const auto ids = check_orbit_identities(8, 8);
    double worst = 0;
    bool ok = true;
    std::string bad;
    for (const auto& r : ids) {
      worst = std::max(worst, r.zero_mismatch);
      if (!r.pass) {
        ok = false;
        if (bad.empty()) bad = r.name;
      }
    }
    auto c = make_flag("locus7.orbit_identities", ok, static_cast<long>(ids.size()) * 64);
    c.residual = worst;
    c.tolerance = 1e-9;
    c.counterexample = bad;
    S.checks.push_back(c);
  }
  {
    const TorusReport T = verify_flat_torus(p, 64, 0.3, 4);
    auto c = make_check("locus7.flat_torus", std::max({T.max_abs_sec, T.max_abs_sec_fd, T.closure_gap}), o.flat_threshold,
                        T.samples);
    if (!T.closure_tested) c.detail = "closure not tested (nu1 != nu2)";
    S.checks.push_back(c);
    auto c2 = make_flag("locus7.flat_torus_controls", T.control_sec > 1e-6 && T.control_full_sec > 1e-6, 2,
                       "control " + num(T.control_sec) + " control_full " + num(T.control_full_sec));
    S.checks.push_back(c2);
  }
  if (o.run_scans) {
    MetricParams split = p;
    split.l1u = Scale::inf();
    split.l1d = Scale::inf();
    for (const auto& [name, q, locus] : {std::tuple{"full", p, true}, std::tuple{"split", split, false}}) {
      const ScanReport R = scan_min_curvature(q, o.scan);
      const LocusReport L = locus_report(R, locus, o.flat_threshold);
      std::ostringstream d;
      d << "global min " << num(L.global_min) << " threshold " << num(R.threshold);
      for (const auto& [k, v] : R.histogram) d << " " << k << "=" << v;
      S.checks.push_back(make_check(std::string("locus7.scan_") + name + "_nonnegative", -L.global_min, 1e-6,
                                    static_cast<long>(R.points.size()), d.str()));
      if (locus)
        S.checks.push_back(make_check("locus7.scan_full_locus_exact", L.misplaced, 0, static_cast<long>(R.points.size()),
                                      "min off locus " + num(L.min_off_locus) + " max on locus " + num(L.max_on_locus)));
      S.checks.push_back(make_check(std::string("locus7.scan_") + name + "_unclassified", L.unclassified, 0,
                                    static_cast<long>(R.points.size())));
    }
  }
  return S;
}

SuiteResult suite_topo8(const VerifyOptions& o) {
  SuiteResult S{"topo8", {}};
  {
    const HomologyReport R = homology_E(2, 0);
    bool ok = R.H[3].str() == "Z/2" && R.H[0].str() == "Z" && R.H[7].str() == "Z" && R.pi3.str() == "Z/2";
    for (int q : {1, 2, 4, 5, 6}) ok = ok && R.H[static_cast<std::size_t>(q)].str() == "0";
    S.checks.push_back(make_flag("topo8.homology_E20", ok, 1, "H3 = " + R.H[3].str()));
    const auto [m, n] = homology_indexing({1, 1});
    const HomologyReport T = homology_E(m, n);
    S.checks.push_back(make_flag("topo8.type_1_1", T.H[3].str() == "Z/2", 1, "E_{1,-1}: H3 = " + T.H[3].str()));
    const HomologyReport Z = homology_E(0, 0);
    S.checks.push_back(make_flag("topo8.trivial_bundle", Z.H[3].str() == "Z" && !Z.hypothesis_holds, 1));
  }
  {
    bool ok = true;
    std::string bad;
    for (long long k = -12; k <= 12; ++k) {
      const HomologyReport R = homology_E(k, 0);
      const auto e = cokernel_by_enumeration(k);
      if (R.smith != e || !R.poincare_ranks) {
        ok = false;
        if (bad.empty()) bad = "m - n = " + std::to_string(k);
      }
    }
    auto c = make_flag("topo8.smith_vs_enumeration", ok, 25);
    c.counterexample = bad;
    S.checks.push_back(c);
  }
  {
    Rng rng(o.seed);
    double worst = 0;
    for (int s = 0; s < 1000; ++s) {
      const Quat u = random_quat(rng), v = random_unit(rng);
      for (auto [m, n] : {std::pair{0LL, 0LL}, std::pair{1LL, 1LL}, std::pair{2LL, -1LL}, std::pair{-3LL, 2LL}})
        worst = std::max(worst, std::abs(gluing_map(m, n, u, v).second.norm() - 1));
      const auto [a, b] = gluing_map(0, 0, u, v);
      worst = std::max({worst, (a - u / u.norm2()).norm(), (b - v).norm()});
    }
    S.checks.push_back(make_check("topo8.gluing_map", worst, 1e-12, 1000));
  }
  {
    const TransitionCheck T = transition_identity_check(scaled(o.scale, 10000), o.seed);
    auto c = make_check("topo8.transition_identity", std::max({T.max_error, T.max_orbit_error, T.max_sp2_residual}), 1e-12,
                        T.samples);
    c.pass = c.pass && T.ok;
    if (T.counterexample) {
      std::ostringstream os;
      os << "u = " << T.counterexample->first << ", q = " << T.counterexample->second;
      c.counterexample = os.str();
    }
    S.checks.push_back(c);
  }
  return S;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
  opt.params.validate();
  if (name == "cheeger") return suite_cheeger(opt);
  if (name == "curvature3") return suite_curvature3(opt);
  if (name == "hopf4") return suite_hopf4(opt);
  if (name == "zeros5") return suite_zeros5(opt);
  if (name == "basis6") return suite_basis6(opt);
  if (name == "locus7") return suite_locus7(opt);
  if (name == "topo8") return suite_topo8(opt);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace sp2lab
