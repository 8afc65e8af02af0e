#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ylab/linalg.hpp"

namespace ylab {

using Rng = std::mt19937_64;

/// Independent stream for item `index` of an experiment seeded with `seed`,
/// so sampled results do not depend on evaluation order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vector gaussian_vector(Eigen::Index n, Rng& rng) { return gaussian_matrix(n, 1, rng); }

inline Vector unit_sphere_point(Eigen::Index n, Rng& rng) {
  Vector v = gaussian_vector(n, rng);
  const double nv = v.norm();
  return nv > 0 ? Vector(v / nv) : Vector(Vector::Unit(n, 0));
}

/// Uniform sample from the euclidean ball of the given radius.
inline Vector ball_point(Eigen::Index n, double radius, Rng& rng) {
  const double r = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(n));
  return r * unit_sphere_point(n, rng);
}

}  // namespace ylab
