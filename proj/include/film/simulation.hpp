#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "film/film_a.hpp"

namespace film {

// Orthogonal-bundle descriptor pattern: one latent factor per bundle, each
// bundle column is its factor plus independent noise. The last bundle is a
// parasite (structurally strong, absent from the interaction signal) whose
// noise level is set from the target within-bundle correlation; pure-noise
// columns are appended after the bundles.
struct BundleSpec {
  std::vector<int> sizes{3, 2, 1, 4};  // last entry = parasite bundle
  double within_noise_sd = 0.1;
  double parasite_correlation = 0.99;
  int n_noise_cols = 5;

  void validate() const;
  int n_factors() const { return static_cast<int>(sizes.size()); }
  int n_explicative() const { return n_factors() - 1; }
  int n_columns() const;
};

struct SimConfig {
  int n_subjects = 50;
  int n_objects = 40;
  std::vector<double> interaction_weights{0.49, 0.69, 0.53};
  std::vector<double> noise_fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                      0.6, 0.7, 0.8, 0.9, 1.0};
  int n_replicates = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeneratedBlock {
  DataBlock block;     // standardized under uniform weights
  Matrix factors;      // n x n_factors, centred orthonormal planted factors
};

GeneratedBlock generate_blocks(const BundleSpec& spec, int n, std::uint64_t side_seed);

// Z = sum_k w_k f^k g^k' plus i.i.d. noise whose variance is noise_fraction
// times the signal's weighted mean square; uniform weights on both sides.
InteractionBlock generate_z(const Matrix& fx, const Matrix& gy,
                            const std::vector<double>& weights,
                            double noise_fraction, std::uint64_t seed);

struct CellResult {
  int replicate = 0;
  double noise_fraction = 0.0;
  bool structural = false;
  double r2 = 0.0;
  Matrix omega;
  Matrix rho_f;  // planted (rows) x estimated (cols) score correlations
  Matrix rho_g;
  std::vector<int> match;  // planted factor index per rank, greedy max-|rho|
  std::vector<int> iterations;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct Aggregate {
  double noise_fraction = 0.0;
  bool structural = false;
  int n_cells = 0;
  int n_failed = 0;
  double r2_mean = 0.0;
  double r2_sd = 0.0;
  std::vector<double> matched_rho_f_mean;  // per planted factor
  std::vector<double> matched_rho_g_mean;
  double max_iterations_mean = 0.0;
};

struct SimResult {
  BundleSpec spec;
  SimConfig cfg;
  std::vector<CellResult> cells;
  std::vector<Aggregate> aggregates;
};

// Per-cell seeds derive from (seed, replicate, level), so the result does not
// depend on evaluation order. Fit errors are recorded per cell, not fatal.
SimResult run_experiment(const BundleSpec& spec, const SimConfig& cfg);

void write_cells_csv(const SimResult& result, std::ostream& os);
void write_aggregates_csv(const SimResult& result, std::ostream& os);

// Deterministic seed derivation for independent work items.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

}  // namespace film
