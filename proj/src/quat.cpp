#include "sp2lab/quat.hpp"

#include <ostream>
#include <stdexcept>

namespace sp2lab {

std::ostream& operator<<(std::ostream& os, const Quat& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

Quat quat_exp(const Quat& v) {
  if (std::abs(v.w) > 1e-12) throw std::invalid_argument("quat_exp: argument must be purely imaginary");
  const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  if (n == 0.0) return Quat::one();
  const double s = std::sin(n) / n;
  return {std::cos(n), s * v.x, s * v.y, s * v.z};
}

}  // namespace sp2lab
