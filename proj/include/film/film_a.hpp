#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "film/solver.hpp"
#include "film/types.hpp"

namespace film {

enum class Side { Subject, Object };

// One extracted latent direction: metric-normed loading axis and the
// weight-normed score vector it generates (scores proportional to X M u).
struct Component {
  Vector loading;
  Vector scores;
  double eigenvalue = 0.0;
  int rank = 0;
};

struct ComponentBasis {
  std::vector<Component> components;
  Side side = Side::Subject;

  Index count() const { return static_cast<Index>(components.size()); }
  // Scores stacked as columns, n x T.
  Matrix score_matrix() const;
};

enum class MarginRegression { Pls1, Ols1 };

struct FitConfig {
  int n_ranks = 1;
  double tol = 1e-9;
  int max_iter = 500;
  // Metric regime: true keeps the identity metric so component inertia counts
  // in the criterion; false switches to the inverse-covariance metric where
  // the blocks act through their column spans only. Custom block metrics are
  // left untouched.
  bool structural_strength = false;
  std::optional<std::uint64_t> seed;  // fallback init for deflated ranks
  // FILM-B1 margin regressions.
  MarginRegression margin_regression = MarginRegression::Pls1;

  void validate() const;
};

struct InteractionModel {
  Matrix omega;  // T x T regression coefficients on the component grid
  ComponentBasis subject_basis;
  ComponentBasis object_basis;
  double r2 = 0.0;
  Matrix term_contributions;  // omega_st^2 / ||Z||_R^2
  double residual_norm2 = 0.0;
  double z_norm2 = 0.0;  // row/column centred table norm
  std::vector<double> subject_variance_shares;  // share of tr(X'PX) per rank
  std::vector<double> object_variance_shares;
  std::vector<int> iterations_per_rank;
  bool truncated = false;       // requested rank exceeded the effective rank
  bool degenerate_tie = false;  // an eigenvalue tie was broken deterministically
};

// Residual of the block after removing the component's P-direction:
// X <- (I - f f' P) X. Idempotent for a weight-normed component.
DataBlock deflate(const DataBlock& block, const Component& comp);
DataBlock deflate(const DataBlock& block, const Vector& scores);

// Sequential extraction with deflation and cross-interaction terms. Z is
// row/column centred defensively before fitting (a no-op on centred input
// when the blocks are column-centred).
InteractionModel film_a_fit(const InteractionBlock& zb, const DataBlock& xblock,
                            const DataBlock& yblock, const FitConfig& cfg);

// omega_st = f^s' P Z Q g^t. Both bases must be orthonormal under their
// weights (checked at 1e-6); the entries are then the OLS coefficients of Z
// on the orthonormal component grid.
Matrix compute_omega(const InteractionBlock& zb, const ComponentBasis& fbasis,
                     const ComponentBasis& gbasis);

struct DiagnosticsReport {
  double r2 = 0.0;
  double residual_share = 0.0;
  Matrix term_shares;
  std::vector<double> subject_variance_shares;
  std::vector<double> object_variance_shares;
  std::vector<int> iterations_per_rank;
};

DiagnosticsReport diagnostics(const InteractionModel& model,
                              const InteractionBlock& zb,
                              const DataBlock& xblock, const DataBlock& yblock);

}  // namespace film
