#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sp2lab/submersion.hpp"
#include "test_util.hpp"

using namespace sp2lab;

namespace {
constexpr double kQuarter = std::numbers::pi / 4;

double rel_norm(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& a, const TangentVec& b) {
  return std::sqrt(g.norm2(Q, a - b) / std::max(g.norm2(Q, b), 1e-300));
}
}  // namespace

TEST_CASE("vertical spaces") {
  std::mt19937_64 rng(21);
  const Sp2Point Q = testutil::random_point(rng);
  for (const auto& v : vertical_space(submersion(SubmersionKind::P21), Q)) {
    const SplitParts s = split(Q, v);
    CHECK(max_abs(s.h) + max_abs(s.v1) < 1e-12);
  }
  for (const auto& v : vertical_space(submersion(SubmersionKind::P2_2), Q)) {
    const SplitParts s = split(Q, v);
    CHECK(max_abs(s.h) + max_abs(s.v2) < 1e-12);
  }
  const auto q = vertical_space(submersion(SubmersionKind::Q20), Sp2Point::identity());
  CHECK(max_abs(q[0] - left_translate(Sp2Point::identity(), QMat::diag(Quat::i(), Quat::i()))) < 1e-14);
  const auto g = split_metric(0.5, 0.6);
  const auto p = vertical_space(submersion(SubmersionKind::P20), Q, g.get());
  REQUIRE(p.size() == 3);
  for (const auto& k : vertical_space(submersion(SubmersionKind::Q20), Q))
    for (const auto& v : p) CHECK(std::abs(g->inner(Q, k, v)) < 1e-12);
  CHECK_THROWS(vertical_space(submersion(SubmersionKind::H), Q));
  CHECK(parse_submersion("p2_2").kind == SubmersionKind::P2_2);
}

TEST_CASE("p21 tensors for the split metric") {
  std::mt19937_64 rng(22);
  const Sp2Point Q = testutil::random_point(rng);
  const double nu1 = 0.45, nu2 = 0.6;
  const auto g = split_metric(nu1, nu2);
  const SubmersionFd S(submersion(SubmersionKind::P21), g, Q);
  const TangentVec v1 = left_translate(Q, QMat::diag(testutil::random_imag(rng), Quat{}));
  const TangentVec z = left_translate(Q, QMat::offdiag(testutil::random_quat(rng)));
  const TangentVec z2 = left_translate(Q, QMat::offdiag(testutil::random_quat(rng)));
  const TangentVec v2 = left_translate(Q, QMat::diag(Quat{}, testutil::random_imag(rng)));
  const TangentVec w2 = left_translate(Q, QMat::diag(Quat{}, testutil::random_imag(rng)));
  // V1 is in the kernel.
  CHECK(g->norm2(Q, S.A(v1, z)) < 1e-14 * g->norm2(Q, z));
  CHECK(g->norm2(Q, S.A(v1, v2)) < 1e-14 * g->norm2(Q, v2));
  // Totally geodesic fibres.
  CHECK(g->norm2(Q, S.T(v2, w2)) < 1e-14 * g->norm2(Q, v2) * g->norm2(Q, w2));
  // Vertizontal A against the closed form.
  const TangentVec a = S.A(z, v2);
  const TangentVec c = vertizontal_A2(Q, z, v2, nu2);
  CHECK(rel_norm(*g, Q, a, c) < 1e-7);
  // Skew symmetry on horizontal pairs.
  CHECK(rel_norm(*g, Q, S.A(z, z2), -1.0 * S.A(z2, z)) < 1e-7);
  CHECK_THROWS_AS(S.A(v2, z), std::invalid_argument);
}

TEST_CASE("q20 base curvature: fd O'Neill against the exact quotient") {
  std::mt19937_64 rng(23);
  const Sp2Point Q = testutil::random_point(rng);
  const MetricParams p{0.5, 0.6, Scale::of(1.0), Scale::of(0.7)};
  const auto g = full_metric(p);
  const SubmersionFd S(submersion(SubmersionKind::Q20), g, Q);
  const ExactModel ex(p, Space::E20, Q);
  const auto B = ex.tangent_basis();
  for (int trial = 0; trial < 4; ++trial) {
    TangentVec u, v;
    std::normal_distribution<double> n(0, 1);
    for (const auto& b : B) {
      u = u + n(rng) * b;
      v = v + n(rng) * b;
    }
    CHECK(S.base_sectional(u, v) == doctest::Approx(ex.sectional(u, v)).epsilon(1e-6));
  }
}

TEST_CASE("q20 horizontal bases along t") {
  const MetricParams p{0.5, 0.6, Scale::of(1.0), Scale::of(0.7)};
  for (int j = 0; j <= 15; ++j) {
    const double t = j * kQuarter / 15;
    for (double theta : {0.0, 0.3, 1.2}) {
      const HorizontalBasis B = q20_horizontal_basis(t, p, theta);
      CHECK(q20_orthogonality_residual(B) < 1e-10);
      CHECK(B.degenerate == (j == 15));
      // Seven independent vectors.
      const auto all = B.all();
      const auto G = split_metric(p.nu1, p.nu2)->gram(B.at, std::vector<TangentVec>(all.begin(), all.end()));
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff() > 1e-6);
    }
  }
  // Normalised eta1 tends to the degenerate direction.
  const auto g = split_metric(p.nu1, p.nu2);
  const HorizontalBasis end = q20_horizontal_basis(kQuarter, p);
  const HorizontalBasis near = q20_horizontal_basis(kQuarter - 1e-6, p);
  const TangentVec a = (1.0 / std::sqrt(g->norm2(near.at, near.eta1))) * near.eta1;
  const TangentVec b = (1.0 / std::sqrt(g->norm2(end.at, end.eta1))) * end.eta1;
  CHECK(max_abs(a - b) < 1e-5);
  // (vartheta_i / nu1^2, 0) is horizontal at t = pi/4.
  const OrbitFrame F = orbit_frame(0, kQuarter);
  const SubmersionFd S(submersion(SubmersionKind::Q20), g, F.at);
  CHECK(S.horizontality_residual(F.first[1]) < 1e-12);
  CHECK(S.horizontality_residual(F.first[2]) < 1e-12);
  CHECK_THROWS(q20_horizontal_basis(1.0, p));
}

TEST_CASE("deformation carries q20-horizontal vectors to q20-horizontal vectors") {
  const MetricParams p{0.5, 0.6, Scale::of(1.0), Scale::of(0.7)};
  const auto g = full_metric(p);
  for (double theta : {0.0, 0.4, 2.0})
    for (double t : {0.0, 0.3, kQuarter}) {
      const HorizontalBasis B = q20_horizontal_basis(t, p, theta);
      const SubmersionFd S(submersion(SubmersionKind::Q20), g, B.at, FdOptions{1e-3, false, 1.0});
      for (const auto& v : B.all()) CHECK(S.horizontality_residual(to_deformed(p, B.at, v)) < 1e-10);
    }
}

TEST_CASE("orbit projection ranks") {
  std::mt19937_64 rng(24);
  const Sp2Point Q = testutil::random_point(rng);
  const auto up = action_of(ActionKind::Up);
  const auto K1 = killing_field(up, Quat::i(), Q), K2 = killing_field(up, Quat::j(), Q);
  CHECK(orbit_projection_gram(K1, K2, up, Q).rank == 2);
  CHECK(orbit_projection_gram(K1, 2.0 * K1, up, Q).rank == 1);
}
