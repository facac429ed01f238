#include <cmath>

#include "doctest.h"
#include "sp2lab/curvature.hpp"
#include "test_util.hpp"

using namespace sp2lab;

namespace {

double wedge2(const MetricEvaluator& g, const Sp2Point& Q, const TangentVec& u, const TangentVec& v) {
  const auto G = g.gram(Q, {u, v});
  return G(0, 0) * G(1, 1) - G(0, 1) * G(0, 1);
}

}  // namespace

TEST_CASE("fd sign calibration is positive on the round sphere") {
  CHECK(std::abs(fd_curvature_sign()) == 1.0);
}

TEST_CASE("fd biinvariant curvature is a quarter of the bracket") {
  std::mt19937_64 rng(11);
  const Sp2Point Q = testutil::random_point(rng);
  const auto g = biinvariant_metric();
  const Sp2Fd fd(*g, Q);
  CHECK(fd.core().symmetry_residual() < 1e-7);
  CHECK(fd.core().bianchi_residual() < 1e-7);
  for (int trial = 0; trial < 4; ++trial) {
    const QMat X = testutil::random_lie(rng), Y = testutil::random_lie(rng);
    const TangentVec u = left_translate(Q, X), v = left_translate(Q, Y);
    const double expect = 0.25 * b_lie(bracket(X, Y), bracket(X, Y));
    CHECK(fd.curv(u, v) == doctest::Approx(expect).epsilon(1e-7));
    CHECK(biinvariant_riemann(X, Y, Y, X) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("exact model reproduces the deformed metric and its fd curvature") {
  std::mt19937_64 rng(12);
  const Sp2Point Q = testutil::random_point(rng);
  for (const MetricParams p : {MetricParams{0.5, 0.6, Scale::of(1.0), Scale::of(0.7)},
                               MetricParams{0.4, 0.3, Scale::inf(), Scale::inf()},
                               MetricParams{0.65, 0.2, Scale::of(2.0), Scale::inf()}}) {
    const auto g = full_metric(p);
    const ExactModel ex(p, Space::Sp2, Q);
    const Sp2Fd fd(*g, Q);
    for (int trial = 0; trial < 3; ++trial) {
      const TangentVec u = testutil::random_tangent(rng, Q), v = testutil::random_tangent(rng, Q),
                       w = testutil::random_tangent(rng, Q), z = testutil::random_tangent(rng, Q);
      CHECK(ex.inner(u, v) == doctest::Approx(g->inner(Q, u, v)).epsilon(1e-11));
      const double scale = std::sqrt(wedge2(*g, Q, u, v) * wedge2(*g, Q, w, z));
      CHECK(std::abs(ex.riemann(u, v, w, z) - fd.riemann(u, v, w, z)) < 1e-7 * scale);
      CHECK(std::abs(ex.curv(u, v) - fd.curv(u, v)) < 1e-7 * wedge2(*g, Q, u, v));
    }
  }
}

TEST_CASE("orthonormal bases of the exact model") {
  std::mt19937_64 rng(13);
  const Sp2Point Q = testutil::random_point(rng);
  const MetricParams p{0.5, 0.6, Scale::of(1.0), Scale::of(0.7)};
  const ExactModel sp(p, Space::Sp2, Q), e20(p, Space::E20, Q);
  const auto B = sp.tangent_basis();
  REQUIRE(B.size() == 10);
  const auto H = e20.tangent_basis();
  REQUIRE(H.size() == 7);
  const auto g = full_metric(p);
  const auto G = g->gram(Q, H);
  CHECK((G - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& k : kImagUnits) {
    const TangentVec K = killing_field(action_of(ActionKind::Diag20), k, Q);
    for (const auto& h : H) CHECK(std::abs(g->inner(Q, K, h)) < 1e-10);
  }
  // On q20-horizontal vectors the E20 metric is the Sp(2) one.
  CHECK(e20.inner(H[0], H[3]) == doctest::Approx(g->inner(Q, H[0], H[3])).epsilon(1e-10));
  CHECK(e20.inner(H[2], H[2]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("closed forms match fd for the split metric") {
  std::mt19937_64 rng(14);
  const Sp2Point Q = testutil::random_point(rng);
  const double nu1 = 0.45, nu2 = 0.6;
  const auto g = split_metric(nu1, nu2);
  const Sp2Fd fd(*g, Q);
  auto H = [&](const Quat& q) { return left_translate(Q, QMat::offdiag(q)); };
  auto V1 = [&](const Quat& b) { return left_translate(Q, QMat::diag(b, Quat{})); };
  auto V2 = [&](const Quat& b) { return left_translate(Q, QMat::diag(Quat{}, b)); };
  for (int trial = 0; trial < 3; ++trial) {
    const Quat b1 = testutil::random_imag(rng), b2 = testutil::random_imag(rng);
    CHECK(closed_fiber_curv(nu1, b1, b2) == doctest::Approx(fd.curv(V1(b1), V1(b2))).epsilon(1e-7));
    CHECK(closed_fiber_curv(nu2, b1, b2) == doctest::Approx(fd.curv(V2(b1), V2(b2))).epsilon(1e-7));
    CHECK(std::abs(fd.curv(V1(b1), V2(b2))) < 1e-8);
    const Quat q1 = testutil::random_quat(rng), q2 = testutil::random_quat(rng);
    CHECK(closed_horizontal_curv(Q, H(q1), H(q2), nu1, nu2) == doctest::Approx(fd.curv(H(q1), H(q2))).epsilon(1e-7));
    const TangentVec z = H(q1), v1 = V1(b1), v2 = V2(b2);
    CHECK(vertizontal_curv(Q, z, v1, v2, nu1, nu2) == doctest::Approx(fd.curv(z, v1 + v2)).epsilon(1e-7));
    const TangentVec e3 = H(q2), sigma = V2(testutil::random_imag(rng));
    CHECK(closed_mixed_component(Q, z, v1, e3, sigma, nu1, nu2) ==
          doctest::Approx(fd.riemann(z, v1, e3, sigma)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(vertizontal_curv(Q, V1(Quat::i()), V1(Quat::j()), V2(Quat::k()), nu1, nu2), std::invalid_argument);
}

TEST_CASE("hopf A tensor against the fd connection") {
  std::mt19937_64 rng(15);
  const Sp2Point Q = testutil::random_point(rng);
  const QVec2 N = Q.col1();
  const QVec2 z = Q.col2() * testutil::random_quat(rng);
  const Quat beta = testutil::random_imag(rng);
  const QVec2 a = hopf_A(z, beta, N), b = numerical_hopf_A(z, beta, N);
  CHECK(norm2(a - b) < 1e-14 * norm2(a));
  CHECK_THROWS_AS(hopf_A(N * Quat::i(), beta, N), std::invalid_argument);
}

TEST_CASE("connection metric rules") {
  const ConnectionArgs a{2.0, 0.5, 1.5};
  CHECK(connection_metric_component(0.5, ConnectionRule::HorizontalIII, a) == doctest::Approx(2.0 - 0.375));
  CHECK(connection_metric_component(0.5, ConnectionRule::VertizontalV, a) == doctest::Approx(0.5 / 16));
  CHECK(connection_metric_component(0.5, ConnectionRule::MixedVI, a) == 0.0);
  CHECK_THROWS_AS(connection_metric_component(0.5, ConnectionRule::Untagged, a), std::invalid_argument);
}
