#pragma once

#include <random>

#include "film/film_a.hpp"
#include "film/geometry.hpp"
#include "film/types.hpp"

namespace testutil {

using film::Index;
using film::Matrix;
using film::Vector;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline film::WeightVector random_weights(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = u(rng);
  return film::WeightVector(w / w.sum());
}

// Centred columns, orthonormal under w: a standardized block whose columns
// form an exact weighted orthonormal family.
inline Matrix orthonormal_cols(Index n, Index k, const film::WeightVector& w,
                               std::mt19937_64& rng) {
  Matrix raw = gaussian(n, k, rng);
  Matrix out(n, k);
  for (Index j = 0; j < k; ++j) {
    Vector v = raw.col(j);
    v.array() -= w.values().dot(v);
    for (Index i = 0; i < j; ++i)
      v -= film::weighted_inner(v, out.col(i), w) * out.col(i);
    out.col(j) = v / film::weighted_norm(v, w);
  }
  return out;
}

inline film::DataBlock random_standardized_block(Index n, Index cols,
                                                 const film::WeightVector& w,
                                                 std::mt19937_64& rng,
                                                 film::Metric metric =
                                                     film::Metric::identity()) {
  return film::standardize(
      film::DataBlock(gaussian(n, cols, rng), w, metric));
}

// Max-abs difference up to a global sign flip.
inline double sign_free_delta(const Vector& a, const Vector& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

}  // namespace testutil
