#pragma once

#include <vector>

#include "film/film_a.hpp"

namespace film {

// A normalised two-way frequency table (entries sum to one, margins cached).
struct ContingencyTable {
  Matrix freq;
  Vector row_margins;
  Vector col_margins;

  // Accepts raw counts and normalises by the grand total. Zero rows/columns
  // are rejected unless drop_zero is set, in which case they are removed and
  // their indices reported through dropped_rows / dropped_cols.
  static ContingencyTable from_counts(const Matrix& counts, bool drop_zero = false,
                                      std::vector<Index>* dropped_rows = nullptr,
                                      std::vector<Index>* dropped_cols = nullptr);
};

// Entrywise dependence ratios of a contingency table; the squared R-norm of
// the table is the mean-square contingency.
struct PhiTable {
  Matrix phi;  // f_im / (f_i. f_.m) - 1
  WeightVector row_weights;
  WeightVector col_weights;
  double phi2 = 0.0;
};

PhiTable build_phi(const ContingencyTable& ct);

// Standardises the descriptor blocks under the marginal weights and fits the
// dependence table. Term contributions in the model are shares of phi2.
InteractionModel film_contingency(const ContingencyTable& ct, const Matrix& xraw,
                                  const Matrix& yraw, const FitConfig& cfg);

}  // namespace film
