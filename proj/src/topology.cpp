#include "sp2lab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sp2lab {

Quat qpow(const Quat& u, long long k) {
  if (u.norm2() == 0) throw std::invalid_argument("qpow: zero quaternion");
  Quat base = k < 0 ? u.inverse() : u;
  unsigned long long e = static_cast<unsigned long long>(k < 0 ? -k : k);
  Quat out = Quat::one();
  while (e) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

std::pair<Quat, Quat> gluing_map(long long m, long long n, const Quat& u, const Quat& v) {
  const double r2 = u.norm2();
  if (r2 == 0) throw std::invalid_argument("gluing_map: u must be nonzero");
  if (std::abs(v.norm() - 1) > 1e-9) throw std::invalid_argument("gluing_map: v must be a unit quaternion");
  const double r = std::sqrt(r2);
  return {u / r2, qpow(u, m) * v * qpow(u, n) / std::pow(r, static_cast<double>(n + m))};
}

std::pair<long long, long long> homology_indexing(const BundleType& b) { return {b.m, -b.n}; }

std::vector<long long> smith_normal_form(IntMatrix A) {
  const std::size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  const std::size_t r = std::min(rows, cols);
  for (std::size_t k = 0; k < r; ++k) {
    // pivot: smallest nonzero |entry| in the remaining block
    for (;;) {
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = k; i < rows; ++i)
        for (std::size_t j = k; j < cols; ++j)
          if (A[i][j] != 0 && (pi == rows || std::llabs(A[i][j]) < std::llabs(A[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) break;  // remaining block is zero
      std::swap(A[k], A[pi]);
      for (auto& row : A) std::swap(row[k], row[pj]);
      bool clean = true;
      for (std::size_t i = k + 1; i < rows; ++i) {
        const long long q = A[i][k] / A[k][k];
        for (std::size_t j = k; j < cols; ++j) A[i][j] -= q * A[k][j];
        if (A[i][k] != 0) clean = false;
      }
      for (std::size_t j = k + 1; j < cols; ++j) {
        const long long q = A[k][j] / A[k][k];
        for (std::size_t i = k; i < rows; ++i) A[i][j] -= q * A[i][k];
        if (A[k][j] != 0) clean = false;
      }
      if (!clean) continue;
      // pivot must divide the rest of the block
      bool divides = true;
      for (std::size_t i = k + 1; i < rows && divides; ++i)
        for (std::size_t j = k + 1; j < cols; ++j)
          if (A[i][j] % A[k][k] != 0) {
            for (std::size_t jj = k; jj < cols; ++jj) A[k][jj] += A[i][jj];
            divides = false;
            break;
          }
      if (divides) break;
    }
  }
  std::vector<long long> d(r);
  for (std::size_t k = 0; k < r; ++k) d[k] = std::llabs(A[k][k]);
  std::stable_partition(d.begin(), d.end(), [](long long x) { return x != 0; });
  return d;
}

std::vector<long long> cokernel_by_enumeration(long long k) {
  // image of [[0,1],[k,1]] is spanned by the columns (0, k) and (1, 1)
  if (k == 0) return {1, 0};  // gcd of the entries 0, 1, 0, 1; the second factor is free
  const long long d = std::llabs(k);
  // class of (x, y) is determined by y - x mod d since (1,1) and (0,k) generate the image
  std::set<long long> classes;
  long long exponent = 1;
  for (long long x = 0; x < d; ++x)
    for (long long y = 0; y < d; ++y) {
      classes.insert(((y - x) % d + d) % d);
      // order of (x, y): smallest s with s (y - x) = 0 mod d
      long long s = 1;
      while ((s * (y - x)) % d != 0) ++s;
      exponent = std::lcm(exponent, s);
    }
  const long long order = static_cast<long long>(classes.size());
  return {order / exponent, exponent};
}

std::string AbelianGroup::str() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < rank; ++i) {
    os << (first ? "" : " + ") << "Z";
    first = false;
  }
  for (long long t : torsion) {
    os << (first ? "" : " + ") << "Z/" << t;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

HomologyReport homology_E(long long m, long long n) {
  HomologyReport R;
  R.m = m;
  R.n = n;
  const long long k = m - n;
  R.hypothesis_holds = k != 0;
  R.smith = smith_normal_form({{0, 1}, {k, 1}});
  AbelianGroup H3;
  int kernel_rank = 0;
  for (long long d : R.smith) {
    if (d == 0) {
      ++H3.rank;
      ++kernel_rank;
    } else if (d > 1) {
      H3.torsion.push_back(d);
    }
  }
  R.H[0].rank = 1;
  R.H[3] = H3;
  R.H[4].rank = kernel_rank;  // kernel of the degree-3 map
  R.H[7].rank = 1;
  R.pi1 = {};
  R.pi2 = {};
  R.pi3 = H3;
  for (int q = 0; q < 8; ++q)
    if (R.H[static_cast<std::size_t>(q)].rank != R.H[static_cast<std::size_t>(7 - q)].rank) R.poincare_ranks = false;
  return R;
}

Sp2Point chart_h1(const Quat& u, const Quat& q) {
  const double phi = 1 / std::sqrt(1 + u.norm2());
  return {-q * phi, q * u * phi, u.conj() * phi, Quat::one() * phi};
}

Sp2Point chart_h2(const Quat& v, const Quat& r) {
  const double phi = 1 / std::sqrt(1 + v.norm2());
  return {-(r * v.conj()) * phi, r * phi, Quat::one() * phi, v * phi};
}

std::pair<Quat, Quat> chart_h1_inverse(const Sp2Point& P) {
  return {P.c.conj() * P.d / P.d.norm2(), -(P.d.conj() * P.a) / (P.d.norm() * P.a.norm())};
}

std::pair<Quat, Quat> chart_h2_inverse(const Sp2Point& P) {
  return {P.c.conj() * P.d / P.c.norm2(), P.c.conj() * P.b / (P.c.norm() * P.b.norm())};
}

namespace {

double qdist(const Quat& a, const Quat& b) { return (a - b).norm(); }

Sp2Point left_diag(const Quat& g, const Sp2Point& P) { return {g * P.a, g * P.b, g * P.c, g * P.d}; }

}  // namespace

TransitionCheck transition_identity_check(int samples, std::uint64_t seed, double tol) {
  TransitionCheck out;
  out.samples = samples;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto rq = [&] { return Quat{N(rng), N(rng), N(rng), N(rng)}; };
  for (int s = 0; s < samples; ++s) {
    Quat u = rq();
    // spread |u| over several decades; stay away from u = 0, where h2^{-1} h1 is undefined
    u = u * std::exp(N(rng));
    if (u.norm() < 1e-3) u = u.normalized() * 1e-3;
    const Quat q = rq().normalized();
    const Quat g = rq().normalized();
    const Sp2Point P1 = chart_h1(u, q);
    const auto [v, r] = chart_h2_inverse(P1);
    const auto [gu, gq] = gluing_map(1, 1, u, q);
    // relative to the size of u / |u|^2 so that large and small |u| are judged alike
    const double err = std::max(qdist(v, gu) / std::max(1.0, gu.norm()), qdist(r, gq));
    const auto [u1, q1] = chart_h1_inverse(left_diag(g, P1));
    const Sp2Point P2 = chart_h2(v, r);
    // P1 and P2 lie on one A_{2,0} orbit: diag(h, h) P2 = P1 with h = P1.c / P2.c
    const Quat h = P1.c * P2.c.inverse();
    const Sp2Point hP2 = left_diag(h, P2);
    const double orbit = std::max({qdist(u1, u) / std::max(1.0, u.norm()), qdist(q1, q), qdist(hP2.a, P1.a),
                                   qdist(hP2.b, P1.b), qdist(hP2.c, P1.c), qdist(hP2.d, P1.d),
                                   std::abs(h.norm() - 1)});
    const double sp2 = std::max(constraint_residual(P1), constraint_residual(P2));
    out.max_error = std::max(out.max_error, err);
    out.max_orbit_error = std::max(out.max_orbit_error, orbit);
    out.max_sp2_residual = std::max(out.max_sp2_residual, sp2);
    if ((err > tol || orbit > tol || sp2 > tol) && !out.counterexample) {
      out.ok = false;
      out.counterexample = std::make_pair(u, q);
    }
  }
  return out;
}

}  // namespace sp2lab
