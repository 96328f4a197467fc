#pragma once

#include <cstdint>
#include <vector>

#include "film/film_a.hpp"

namespace film {

// Eigen-triplets of the composed score equations, eta nonincreasing. These
// are the classical three-table ordination (RLQ) solutions; they agree with
// the sequential fitter at rank 1 only.
struct Triplet {
  Vector f;
  Vector g;
  double eta = 0.0;
};

struct TripletSet {
  std::vector<Triplet> triplets;
};

TripletSet rlq_triplets(const InteractionBlock& zb, const DataBlock& xblock,
                        const DataBlock& yblock);

// Leading solution of the two-group covariance program
//   max <XMu | YNv>_P over metric-unit loadings
// (canonical analysis under inverse-covariance metrics, inter-battery
// analysis under identity metrics). Degenerate instead of throwing when the
// column spans are P-orthogonal.
struct TwoGroupSolution {
  Vector f;
  Vector g;
  double eta = 0.0;
  bool degenerate = false;
};

TwoGroupSolution two_group_solve(const DataBlock& xblock, const DataBlock& yblock);

// Weighted principal components of the interaction table itself, obtained by
// substituting identity descriptor blocks with inverse-weight metrics.
TripletSet pca_special_case(const InteractionBlock& zb);

// Randomised lower bound for the rank-1 program: sampled metric-unit loading
// pairs polished by alternating closed-form best responses. Intended as a
// test oracle on small instances.
struct BruteForceResult {
  Vector u;
  Vector v;
  double value = 0.0;
};

BruteForceResult brute_force_rank1(const InteractionBlock& zb,
                                   const DataBlock& xblock,
                                   const DataBlock& yblock, int n_samples,
                                   std::uint64_t seed);

}  // namespace film
