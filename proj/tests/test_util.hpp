#pragma once

#include <random>

#include "sp2lab/sp2.hpp"

namespace testutil {

inline sp2lab::QMat random_lie(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  sp2lab::LieCoords x;
  for (int i = 0; i < 10; ++i) x[i] = n(rng);
  return sp2lab::lie_from_coords(x);
}

inline sp2lab::Sp2Point random_point(std::mt19937_64& rng) {
  return sp2lab::Sp2Point::from(sp2lab::qexp(random_lie(rng, 1.0)));
}

inline sp2lab::TangentVec random_tangent(std::mt19937_64& rng, const sp2lab::Sp2Point& Q) {
  return sp2lab::left_translate(Q, random_lie(rng));
}

inline sp2lab::Quat random_imag(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {0, n(rng), n(rng), n(rng)};
}

inline sp2lab::Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng), n(rng), n(rng)};
}

}  // namespace testutil
