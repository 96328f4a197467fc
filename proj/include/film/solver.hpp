#pragma once

#include <utility>
#include <vector>

#include "film/geometry.hpp"
#include "film/types.hpp"

namespace film {

// Leading solution of the rank-1 covariance program
//   max <Z | XMu (YNv)'>_R  over  u'Mu = 1, v'Nv = 1.
// f and g are the weight-normed score vectors, u and v the metric-normed
// loadings, eta the top eigenvalue of the composed score equations; the
// achieved criterion equals sqrt(eta).
struct Rank1Solution {
  Vector f;  // P-normed subject scores
  Vector g;  // Q-normed object scores
  Vector u;  // M-normed subject loading, f proportional to X M u
  Vector v;  // N-normed object loading
  double eta = 0.0;
  double criterion = 0.0;
  double strength_x = 0.0;  // ||X M u||_P
  double strength_y = 0.0;  // ||Y N v||_Q
  bool degenerate_tie = false;
};

// Throws DegenerateError when Z is R-orthogonal to the candidate cone
// (operator numerically zero), DimensionError / ValidationError on bad input.
Rank1Solution solve_rank1(const Matrix& z, const DataBlock& xblock,
                          const DataBlock& yblock);

// All eigenpairs (eta, f) of the composed operator with eta above
// 1e-12 times the leading one, eta decreasing; f vectors are P-normed
// subject-side scores regardless of which side was decomposed.
std::vector<std::pair<double, Vector>> composed_spectrum(
    const Matrix& z, const DataBlock& xblock, const DataBlock& yblock);

}  // namespace film
