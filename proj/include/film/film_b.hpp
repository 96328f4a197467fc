#pragma once

#include <optional>

#include "film/film_a.hpp"

namespace film {

// Unique orthogonal split of an arbitrary interaction table into
// grand mean + subject margin + object margin + row/column centred core.
struct MarginalDecomposition {
  double grand_mean = 0.0;
  Vector subject_margin;  // P-centred, margin table is subject_margin * ep'
  Vector object_margin;   // Q-centred
  Matrix zstar;           // row/column centred
};

MarginalDecomposition decompose_margins(const InteractionBlock& zb);

// Weighted univariate PLS (or a collapsed least-squares fit, see
// MarginRegression): components are weight-orthonormal score vectors, the
// residual is weight-orthogonal to all of them.
struct MarginModel {
  Matrix components;    // n x t, P-orthonormal columns
  Vector coefficients;  // projection of the response on each component
  Vector residual;
  double fit_norm2 = 0.0;       // sum of squared coefficients
  double residual_norm2 = 0.0;  // ||residual||_P^2
  bool early_stop = false;      // covariance vanished before n_comp components
};

MarginModel pls1_fit(const Vector& y, const DataBlock& block, int n_comp);
MarginModel ols1_fit(const Vector& y, const DataBlock& block);

// FILM-B1: the three parts of the margin decomposition are modelled
// separately; nothing ties the margin components to the interaction ones.
struct B1Model {
  MarginalDecomposition margins;
  MarginModel subject_margin_model;
  MarginModel object_margin_model;
  std::optional<InteractionModel> interaction_model;  // absent when the core is zero

  double total_variance = 0.0;  // ||Z - zbar en ep'||_R^2
  double subject_margin_norm2 = 0.0;
  double object_margin_norm2 = 0.0;
  double interaction_norm2 = 0.0;
  double interaction_fit2 = 0.0;
  double interaction_residual2 = 0.0;

  // Correlations between margin-model components and interaction components
  // on each side, for judging whether a shared-component (B2) refit is
  // worthwhile.
  Matrix subject_component_corr;
  Matrix object_component_corr;
};

B1Model film_b1_fit(const InteractionBlock& zb, const DataBlock& xblock,
                    const DataBlock& yblock, const FitConfig& cfg);

// FILM-B2: one shared component pair per rank carries the margin effects and
// every interaction term, including cross terms with earlier ranks.
struct B2Model {
  double grand_mean = 0.0;
  ComponentBasis subject_basis;
  ComponentBasis object_basis;
  Vector subject_effects;  // coefficient of f^t ep' per rank
  Vector object_effects;   // coefficient of en g^t' per rank
  Matrix interaction;      // T x T coefficients on the component grid
  double total_variance = 0.0;
  double residual_norm2 = 0.0;
  std::vector<int> iterations_per_rank;
  bool truncated = false;
};

B2Model film_b2_fit(const InteractionBlock& zb, const DataBlock& xblock,
                    const DataBlock& yblock, const FitConfig& cfg);

}  // namespace film
