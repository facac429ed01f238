#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sp2lab/metric.hpp"
#include "test_util.hpp"

using namespace sp2lab;

TEST_CASE("quaternion algebra") {
  CHECK(max_abs_diff(QMat::diag(Quat::i() * Quat::j(), Quat{}), QMat::diag(Quat::k(), Quat{})) == 0);
  CHECK(max_abs_diff(QMat::diag(Quat::j() * Quat::i(), Quat{}), QMat::diag(-Quat::k(), Quat{})) == 0);
  std::mt19937_64 rng(3);
  for (int s = 0; s < 20; ++s) {
    const Quat p = testutil::random_quat(rng), q = testutil::random_quat(rng);
    CHECK(std::abs((p * q).norm() - p.norm() * q.norm()) < 1e-12 * (1 + p.norm() * q.norm()));
    CHECK(((p * q).conj() - q.conj() * p.conj()).norm() < 1e-12 * (1 + p.norm() * q.norm()));
    CHECK((p * p.inverse() - Quat::one()).norm() < 1e-12);
    const Quat v = testutil::random_imag(rng);
    CHECK(std::abs(quat_exp(v).norm() - 1) < 1e-14);
  }
  // exp(pi/2 i) = i
  CHECK((quat_exp(Quat::i() * (std::numbers::pi / 2)) - Quat::i()).norm() < 1e-15);
  CHECK_THROWS_AS(quat_exp(Quat{0.5, 1, 0, 0}), std::invalid_argument);
}

TEST_CASE("points and the Lie algebra") {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 10; ++s) {
    const Sp2Point Q = testutil::random_point(rng);
    CHECK(constraint_residual(Q) < 1e-13);
    const QMat X = testutil::random_lie(rng);
    CHECK(max_abs_diff(lie_from_coords(lie_coords(X)), X) < 1e-15);
    const QMat Y = testutil::random_lie(rng);
    CHECK(max_abs_diff(bracket(X, Y), -1.0 * bracket(Y, X)) < 1e-14);
    // tangent vectors round trip through the left translation
    const TangentVec V = left_translate(Q, X);
    CHECK(tangent_residual(Q, V) < 1e-13);
    CHECK(max_abs_diff(to_lie(Q, V), X) < 1e-13);
  }
  const auto& E = chart_basis();
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      CHECK(std::abs(b_lie(E[static_cast<std::size_t>(i)], E[static_cast<std::size_t>(j)]) - (i == j ? 1.0 : 0.0)) <
            1e-14);
  CHECK_THROWS(representative_point(0.3, 1.0, Quat::i()));
  CHECK_THROWS(representative_point(-0.1, 0.3, Quat::i()));
  CHECK(constraint_residual(orbit_point(0.7, 0.5, Quat::j())) < 1e-15);
}

TEST_CASE("actions preserve Sp(2) and killing fields are their derivatives") {
  std::mt19937_64 rng(8);
  const Sp2Point Q = testutil::random_point(rng);
  const Quat k = testutil::random_imag(rng);
  for (ActionKind kind : {ActionKind::Up, ActionKind::Down, ActionKind::Left, ActionKind::Right, ActionKind::Diag20}) {
    const ActionDescriptor a = action_of(kind);
    const Quat g = testutil::random_quat(rng).normalized();
    CHECK(constraint_residual(act(a, g, Q)) < 1e-13);
    const double h = 1e-6;
    const Sp2Point p = act(a, quat_exp(h * k), Q), m = act(a, quat_exp(-h * k), Q);
    const TangentVec K = killing_field(a, k, Q);
    const QMat diff = (1 / (2 * h)) * (p.mat() - m.mat());
    CHECK(max_abs_diff(diff, K.mat()) < 1e-8);
  }
}

TEST_CASE("metric parameters and scales") {
  CHECK_NOTHROW(MetricParams{}.validate());
  CHECK_THROWS_AS((MetricParams{0.75, 0.5, Scale::of(1), Scale::of(1)}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MetricParams{0.5, 0.0, Scale::of(1), Scale::of(1)}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MetricParams{0.5, 0.5, Scale::of(-1), Scale::of(1)}.validate()), std::invalid_argument);
  CHECK(parse_scale("inf").infinite);
  CHECK(parse_scale("0.25").value == 0.25);
  CHECK_THROWS(parse_scale("abc"));
  CHECK_THROWS(parse_scale("0"));
  CHECK(parse_scale(to_string(Scale::of(0.1))).value == 0.1);
  for (double nu : {0.1, 0.3, 0.5, 0.7}) CHECK(std::abs(nu_of_scale(scale_of_nu(nu)) - nu) < 1e-14);
  CHECK(scale_of_nu(kNuMax).infinite);
}

TEST_CASE("split metric: block scaling of V1, V2 and H") {
  std::mt19937_64 rng(13);
  const Sp2Point Q = testutil::random_point(rng);
  const double nu1 = 0.4, nu2 = 0.6;
  const auto g = split_metric(nu1, nu2);
  const TangentVec v1 = left_translate(Q, QMat::diag(Quat::i(), Quat{}));
  const TangentVec v2 = left_translate(Q, QMat::diag(Quat{}, Quat::j()));
  const TangentVec h = left_translate(Q, QMat::offdiag(Quat::one()));
  // |diag(i, 0)|_b^2 = 1/2
  CHECK(std::abs(g->norm2(Q, v1) - nu1 * nu1) < 1e-14);
  CHECK(std::abs(g->norm2(Q, v2) - nu2 * nu2) < 1e-14);
  CHECK(std::abs(g->norm2(Q, h) - 1.0) < 1e-14);
  CHECK(std::abs(g->inner(Q, v1, h)) < 1e-14);
  CHECK(std::abs(biinvariant_metric()->norm2(Q, v1) - 0.5) < 1e-14);
  const TangentVec X = testutil::random_tangent(rng, Q), Y = testutil::random_tangent(rng, Q);
  CHECK(std::abs(g->inner(Q, X, Y) - split_inner(nu1, nu2, Q, X, Y)) < 1e-13);
}

TEST_CASE("deformed metrics are positive definite and shrink orbit directions") {
  std::mt19937_64 rng(17);
  const MetricParams p{0.45, 0.55, Scale::of(0.8), Scale::of(1.3)};
  const auto g = full_metric(p);
  const auto base = split_metric(p.nu1, p.nu2);
  for (int s = 0; s < 5; ++s) {
    const Sp2Point Q = testutil::random_point(rng);
    std::vector<TangentVec> V;
    for (int i = 0; i < 10; ++i) V.push_back(left_translate(Q, lie_from_coords(LieCoords::Unit(i))));
    const Eigen::MatrixXd G = g->gram(Q, V);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff() > 0);
    // deformation never lengthens a vector
    const TangentVec X = testutil::random_tangent(rng, Q);
    CHECK(g->norm2(Q, X) <= base->norm2(Q, X) * (1 + 1e-14));
    // and leaves vectors orthogonal to the orbits alone
    const auto K = killing_basis(Q, {action_of(ActionKind::Up), action_of(ActionKind::Down)});
    Eigen::MatrixXd A(6, 10);
    for (int a = 0; a < 6; ++a)
      for (int i = 0; i < 10; ++i) A(a, i) = base->inner(Q, K[static_cast<std::size_t>(a)], V[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd N = Eigen::FullPivLU<Eigen::MatrixXd>(A).kernel();
    for (int c = 0; c < N.cols(); ++c) {
      TangentVec W{};
      for (int i = 0; i < 10; ++i) W = W + N(i, c) * V[static_cast<std::size_t>(i)];
      CHECK(std::abs(g->norm2(Q, W) - base->norm2(Q, W)) < 1e-12 * base->norm2(Q, W));
    }
  }
}
