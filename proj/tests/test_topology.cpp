#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sp2lab/topology.hpp"

using namespace sp2lab;

TEST_CASE("homology of E_{2,0}") {
  const HomologyReport R = homology_E(2, 0);
  CHECK(R.H[0].str() == "Z");
  CHECK(R.H[3].str() == "Z/2");
  CHECK(R.H[7].str() == "Z");
  for (int q : {1, 2, 4, 5, 6}) CHECK(R.H[static_cast<std::size_t>(q)].str() == "0");
  CHECK(R.pi3.str() == "Z/2");
  CHECK(R.hypothesis_holds);
  CHECK(R.poincare_ranks);
}

TEST_CASE("gluing type translates to the homology indexing") {
  const auto [m, n] = homology_indexing({1, 1});
  CHECK(m == 1);
  CHECK(n == -1);
  CHECK(homology_E(m, n).H[3].str() == "Z/2");
  CHECK(homology_E(3, 3).H[3].str() == "Z");
  CHECK(homology_E(3, 3).H[4].str() == "Z");
  CHECK_FALSE(homology_E(3, 3).hypothesis_holds);
  CHECK(homology_E(5, -2).H[3].str() == "Z/7");
}

TEST_CASE("smith normal form against enumeration") {
  for (long long k = -12; k <= 12; ++k) {
    CAPTURE(k);
    CHECK(smith_normal_form({{0, 1}, {k, 1}}) == cokernel_by_enumeration(k));
  }
  CHECK(smith_normal_form({{2, 4}, {6, 8}}) == std::vector<long long>{2, 4});
  CHECK(smith_normal_form({{0, 0}, {0, 0}}) == std::vector<long long>{0, 0});
  // each invariant factor divides the next
  const auto d = smith_normal_form({{12, 18, 6}, {4, 8, 2}, {6, 3, 9}});
  for (std::size_t i = 0; i + 1 < d.size(); ++i)
    if (d[i] != 0) CHECK(d[i + 1] % d[i] == 0);
  // product of the factors is |det| = 144
  CHECK(std::accumulate(d.begin(), d.end(), 1LL, std::multiplies<>()) == 144);
}

TEST_CASE("gluing map") {
  const auto [a, b] = gluing_map(1, 1, Quat::one(), Quat::one());
  CHECK((a - Quat::one()).norm() < 1e-15);
  CHECK((b - Quat::one()).norm() < 1e-15);
  CHECK_THROWS_AS(gluing_map(1, 1, Quat{}, Quat::one()), std::invalid_argument);
  CHECK_THROWS_AS(gluing_map(1, 1, Quat::one(), Quat{2, 0, 0, 0}), std::invalid_argument);
  const Quat u{0.3, -1.2, 0.5, 2.0}, v = Quat{1, 2, 3, 4}.normalized();
  const auto [x, y] = gluing_map(2, -1, u, v);
  CHECK(std::abs(y.norm() - 1) < 1e-14);
  CHECK((x - u / u.norm2()).norm() < 1e-15);
  CHECK((qpow(u, -3) * qpow(u, 3) - Quat::one()).norm() < 1e-12);
}

TEST_CASE("chart transition is the type (1,1) gluing") {
  const TransitionCheck T = transition_identity_check(2000, 7);
  CHECK(T.ok);
  CHECK(T.max_error < 1e-12);
  CHECK(T.max_orbit_error < 1e-12);
  CHECK(T.max_sp2_residual < 1e-12);
  CHECK_FALSE(T.counterexample.has_value());
  const auto [v, r] = chart_h2_inverse(chart_h1(Quat::one(), Quat::one()));
  CHECK((v - Quat::one()).norm() < 1e-15);
  CHECK((r - Quat::one()).norm() < 1e-15);
}
