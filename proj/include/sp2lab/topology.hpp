#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sp2lab/quat.hpp"
#include "sp2lab/sp2.hpp"

namespace sp2lab {

// S^3-bundle over S^4 glued by (u, v) -> (u/|u|^2, u^m v u^n / |u|^{n+m}).
struct BundleType {
  long long m = 0, n = 0;
};

// Throws std::invalid_argument for u = 0 or |v| != 1.
std::pair<Quat, Quat> gluing_map(long long m, long long n, const Quat& u, const Quat& v);
// u^k for any integer k (negative powers through the inverse); u != 0.
Quat qpow(const Quat& u, long long k);

// The homology computation below is indexed as E_{m,-n}: gluing type (a, b) is homology_E(a, -b).
std::pair<long long, long long> homology_indexing(const BundleType& b);

using IntMatrix = std::vector<std::vector<long long>>;
// Diagonal of the Smith normal form (nonnegative, each dividing the next; zeros last).
std::vector<long long> smith_normal_form(IntMatrix A);
// Invariant factors of coker [[0,1],[k,1]] by enumerating Z^2 modulo the image (k != 0), or from the
// gcd of the entries when k = 0. Independent of smith_normal_form.
std::vector<long long> cokernel_by_enumeration(long long k);

struct AbelianGroup {
  int rank = 0;
  std::vector<long long> torsion;  // orders > 1
  std::string str() const;
  bool operator==(const AbelianGroup& o) const { return rank == o.rank && torsion == o.torsion; }
};

struct HomologyReport {
  long long m = 0, n = 0;
  std::array<AbelianGroup, 8> H;
  AbelianGroup pi1, pi2, pi3;
  std::vector<long long> smith;  // Smith form of the degree-3 Mayer-Vietoris matrix
  bool hypothesis_holds = true;  // m != n; with m = n the torsion statement does not apply
  bool poincare_ranks = true;    // rank H_q = rank H_{7-q}
};

HomologyReport homology_E(long long m, long long n);

struct TransitionCheck {
  bool ok = true;
  int samples = 0;
  double max_error = 0;        // |h2^{-1} h1 (u, q) - gluing_map(1, 1, u, q)|
  double max_sp2_residual = 0; // chart outputs as points of Sp(2)
  double max_orbit_error = 0;  // inverses constant on A_{2,0} orbits, h_i^{-1} h_i = id, h2 h2^{-1} h1 ~ h1
  std::optional<std::pair<Quat, Quat>> counterexample;
};

Sp2Point chart_h1(const Quat& u, const Quat& q);
Sp2Point chart_h2(const Quat& v, const Quat& r);
std::pair<Quat, Quat> chart_h1_inverse(const Sp2Point& P);
std::pair<Quat, Quat> chart_h2_inverse(const Sp2Point& P);

TransitionCheck transition_identity_check(int samples, std::uint64_t seed = 1, double tol = 1e-12);

}  // namespace sp2lab
