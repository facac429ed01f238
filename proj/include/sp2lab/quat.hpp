#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

namespace sp2lab {

// Quaternion w + x i + y j + z k.
struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  constexpr explicit Quat(double real) : w(real) {}

  static constexpr Quat one() { return {1, 0, 0, 0}; }
  static constexpr Quat i() { return {0, 1, 0, 0}; }
  static constexpr Quat j() { return {0, 0, 1, 0}; }
  static constexpr Quat k() { return {0, 0, 0, 1}; }

  constexpr Quat conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  constexpr double re() const { return w; }
  constexpr Quat im() const { return {0, x, y, z}; }
  Quat inverse() const {
    const double n = norm2();
    return {w / n, -x / n, -y / n, -z / n};
  }
  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  constexpr double operator[](int c) const { return c == 0 ? w : c == 1 ? x : c == 2 ? y : z; }
  constexpr double& operator[](int c) { return c == 0 ? w : c == 1 ? x : c == 2 ? y : z; }

  constexpr Quat& operator+=(const Quat& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quat& operator-=(const Quat& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quat& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
};

constexpr Quat operator+(Quat a, const Quat& b) { return a += b; }
constexpr Quat operator-(Quat a, const Quat& b) { return a -= b; }
constexpr Quat operator-(const Quat& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quat operator*(Quat a, double s) { return a *= s; }
constexpr Quat operator*(double s, Quat a) { return a *= s; }
constexpr Quat operator/(Quat a, double s) { return a *= 1.0 / s; }

constexpr Quat operator*(const Quat& p, const Quat& q) {
  return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
          p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
          p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
          p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
}

// Re(conj(p) q), the euclidean inner product on R^4.
constexpr double dot(const Quat& p, const Quat& q) {
  return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z;
}

std::ostream& operator<<(std::ostream& os, const Quat& q);

// exp of a purely imaginary quaternion; throws if Re(v) != 0.
Quat quat_exp(const Quat& v);

// The three imaginary units, in order i, j, k.
inline constexpr std::array<Quat, 3> kImagUnits = {Quat::i(), Quat::j(), Quat::k()};

// A column of a 2x2 quaternionic matrix, i.e. a point or vector in H^2.
using QVec2 = std::array<Quat, 2>;

inline QVec2 operator+(const QVec2& a, const QVec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline QVec2 operator-(const QVec2& a, const QVec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline QVec2 operator-(const QVec2& a) { return {-a[0], -a[1]}; }
inline QVec2 operator*(double s, const QVec2& a) { return {s * a[0], s * a[1]}; }
inline QVec2 operator*(const QVec2& a, const Quat& q) { return {a[0] * q, a[1] * q}; }
inline QVec2 operator*(const Quat& q, const QVec2& a) { return {q * a[0], q * a[1]}; }
inline double dot(const QVec2& a, const QVec2& b) { return dot(a[0], b[0]) + dot(a[1], b[1]); }
inline double norm2(const QVec2& a) { return dot(a, a); }
// Quaternionic hermitian product conj(a)^T b.
inline Quat herm(const QVec2& a, const QVec2& b) { return a[0].conj() * b[0] + a[1].conj() * b[1]; }

}  // namespace sp2lab
