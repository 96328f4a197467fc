#include "film/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "film/csv.hpp"
#include "film/geometry.hpp"

namespace film {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x8f1bbcdcbfa53e0bull;
  for (std::uint64_t v : parts) state = splitmix64(state ^ v);
  return state;
}

void BundleSpec::validate() const {
  if (sizes.empty()) throw ValidationError("bundle sizes must be nonempty");
  for (int s : sizes)
    if (s < 1) throw ValidationError("bundle sizes must be >= 1");
  if (!(within_noise_sd > 0.0))
    throw ValidationError("within_noise_sd must be positive");
  if (!(parasite_correlation > 0.0 && parasite_correlation < 1.0))
    throw ValidationError("parasite_correlation must be in (0, 1)");
  if (n_noise_cols < 0) throw ValidationError("n_noise_cols must be >= 0");
}

int BundleSpec::n_columns() const {
  int total = n_noise_cols;
  for (int s : sizes) total += s;
  return total;
}

void SimConfig::validate() const {
  if (n_subjects < 2 || n_objects < 2)
    throw ValidationError("simulation needs at least two subjects and objects");
  if (interaction_weights.empty())
    throw ValidationError("interaction weights must be nonempty");
  for (double w : interaction_weights)
    if (!(w > 0.0)) throw ValidationError("interaction weights must be positive");
  for (double f : noise_fractions)
    if (f < 0.0 || f > 1.0)
      throw ValidationError("noise fractions must lie in [0, 1]");
  if (noise_fractions.empty())
    throw ValidationError("noise fraction grid must be nonempty");
  if (n_replicates < 1) throw ValidationError("n_replicates must be >= 1");
}

GeneratedBlock generate_blocks(const BundleSpec& spec, int n,
                               std::uint64_t side_seed) {
  spec.validate();
  const int nf = spec.n_factors();
  if (n <= nf + 1)
    throw ValidationError("generate_blocks: need more observations than factors");

  std::mt19937_64 rng(side_seed);
  const WeightVector w = WeightVector::uniform(n);

  // Centred orthonormal factors under the uniform weights.
  Matrix factors = gaussian_matrix(n, nf, rng);
  for (Index k = 0; k < nf; ++k) {
    factors.col(k).array() -= factors.col(k).mean();
    for (Index j = 0; j < k; ++j)
      factors.col(k) -=
          weighted_inner(factors.col(k), factors.col(j), w) * factors.col(j);
    const double norm = weighted_norm(factors.col(k), w);
    if (norm <= 1e-10)
      throw ValidationError("generate_blocks: factors could not be orthonormalised");
    factors.col(k) /= norm;
  }

  const double parasite_sd =
      std::sqrt(1.0 / spec.parasite_correlation - 1.0);
  Matrix data(n, spec.n_columns());
  Index col = 0;
  for (int k = 0; k < nf; ++k) {
    const double sd = (k == nf - 1) ? parasite_sd : spec.within_noise_sd;
    for (int c = 0; c < spec.sizes[static_cast<std::size_t>(k)]; ++c)
      data.col(col++) = factors.col(k) + sd * gaussian_matrix(n, 1, rng).col(0);
  }
  for (int c = 0; c < spec.n_noise_cols; ++c)
    data.col(col++) = gaussian_matrix(n, 1, rng).col(0);

  return GeneratedBlock{standardize(DataBlock(std::move(data), w, Metric::identity())),
                        std::move(factors)};
}

InteractionBlock generate_z(const Matrix& fx, const Matrix& gy,
                            const std::vector<double>& weights,
                            double noise_fraction, std::uint64_t seed) {
  const Index k = static_cast<Index>(weights.size());
  if (fx.cols() < k || gy.cols() < k)
    throw DimensionError("generate_z: fewer planted factors than weights");
  Matrix z = Matrix::Zero(fx.rows(), gy.rows());
  for (Index i = 0; i < k; ++i)
    z += weights[static_cast<std::size_t>(i)] * fx.col(i) * gy.col(i).transpose();
  const WeightVector p = WeightVector::uniform(fx.rows());
  const WeightVector q = WeightVector::uniform(gy.rows());
  if (noise_fraction > 0.0) {
    std::mt19937_64 rng(seed);
    const double sd = std::sqrt(noise_fraction * r_norm2(z, p, q));
    z += sd * gaussian_matrix(z.rows(), z.cols(), rng);
  }
  return InteractionBlock(std::move(z), p, q);
}

namespace {

std::vector<int> greedy_match(const Matrix& rho) {
  const Index nk = rho.rows(), nt = rho.cols();
  std::vector<int> match(static_cast<std::size_t>(nt), -1);
  std::vector<bool> used_k(static_cast<std::size_t>(nk), false);
  std::vector<bool> used_t(static_cast<std::size_t>(nt), false);
  for (Index step = 0; step < std::min(nk, nt); ++step) {
    double best = -1.0;
    Index bk = -1, bt = -1;
    for (Index k = 0; k < nk; ++k) {
      if (used_k[static_cast<std::size_t>(k)]) continue;
      for (Index t = 0; t < nt; ++t) {
        if (used_t[static_cast<std::size_t>(t)]) continue;
        if (std::abs(rho(k, t)) > best) {
          best = std::abs(rho(k, t));
          bk = k;
          bt = t;
        }
      }
    }
    if (bk < 0) break;
    used_k[static_cast<std::size_t>(bk)] = true;
    used_t[static_cast<std::size_t>(bt)] = true;
    match[static_cast<std::size_t>(bt)] = static_cast<int>(bk);
  }
  return match;
}

CellResult run_cell(const BundleSpec& spec, const SimConfig& cfg, int replicate,
                    std::size_t level, bool structural) {
  CellResult cell;
  cell.replicate = replicate;
  cell.noise_fraction = cfg.noise_fractions[level];
  cell.structural = structural;
  try {
    const auto r = static_cast<std::uint64_t>(replicate);
    const auto l = static_cast<std::uint64_t>(level);
    GeneratedBlock xg =
        generate_blocks(spec, cfg.n_subjects, mix_seed({cfg.seed, r, l, 0}));
    GeneratedBlock yg =
        generate_blocks(spec, cfg.n_objects, mix_seed({cfg.seed, r, l, 1}));
    InteractionBlock zb =
        generate_z(xg.factors, yg.factors, cfg.interaction_weights,
                   cell.noise_fraction, mix_seed({cfg.seed, r, l, 2}));

    FitConfig fit;
    fit.n_ranks = static_cast<int>(cfg.interaction_weights.size());
    fit.structural_strength = structural;
    InteractionModel model = film_a_fit(zb, xg.block, yg.block, fit);

    cell.r2 = model.r2;
    cell.omega = model.omega;
    cell.iterations = model.iterations_per_rank;
    const Matrix F = model.subject_basis.score_matrix();
    const Matrix G = model.object_basis.score_matrix();
    const Index nk = static_cast<Index>(cfg.interaction_weights.size());
    cell.rho_f.resize(nk, F.cols());
    cell.rho_g.resize(nk, G.cols());
    const WeightVector p = WeightVector::uniform(cfg.n_subjects);
    const WeightVector q = WeightVector::uniform(cfg.n_objects);
    for (Index k = 0; k < nk; ++k) {
      for (Index t = 0; t < F.cols(); ++t) {
        cell.rho_f(k, t) = weighted_inner(xg.factors.col(k), F.col(t), p);
        cell.rho_g(k, t) = weighted_inner(yg.factors.col(k), G.col(t), q);
      }
    }
    cell.match = greedy_match(cell.rho_f);
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

SimResult run_experiment(const BundleSpec& spec, const SimConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (cfg.interaction_weights.size() >
      static_cast<std::size_t>(spec.n_explicative()))
    throw ValidationError("run_experiment: more interaction weights than "
                          "explicative bundles");

  SimResult result;
  result.spec = spec;
  result.cfg = cfg;
  for (std::size_t level = 0; level < cfg.noise_fractions.size(); ++level)
    for (int rep = 0; rep < cfg.n_replicates; ++rep)
      for (bool structural : {false, true})
        result.cells.push_back(run_cell(spec, cfg, rep, level, structural));

  const auto nk = static_cast<Index>(cfg.interaction_weights.size());
  for (std::size_t level = 0; level < cfg.noise_fractions.size(); ++level) {
    for (bool structural : {false, true}) {
      Aggregate agg;
      agg.noise_fraction = cfg.noise_fractions[level];
      agg.structural = structural;
      agg.matched_rho_f_mean.assign(static_cast<std::size_t>(nk), 0.0);
      agg.matched_rho_g_mean.assign(static_cast<std::size_t>(nk), 0.0);
      double r2_sum = 0.0, r2_sq = 0.0, iter_sum = 0.0;
      for (const CellResult& cell : result.cells) {
        if (cell.noise_fraction != cfg.noise_fractions[level] ||
            cell.structural != structural)
          continue;
        ++agg.n_cells;
        if (!cell.ok()) {
          ++agg.n_failed;
          continue;
        }
        r2_sum += cell.r2;
        r2_sq += cell.r2 * cell.r2;
        int max_it = 0;
        for (int it : cell.iterations) max_it = std::max(max_it, it);
        iter_sum += max_it;
        for (Index t = 0; t < static_cast<Index>(cell.match.size()); ++t) {
          const int k = cell.match[static_cast<std::size_t>(t)];
          if (k < 0 || k >= nk) continue;
          agg.matched_rho_f_mean[static_cast<std::size_t>(k)] +=
              std::abs(cell.rho_f(k, t));
          agg.matched_rho_g_mean[static_cast<std::size_t>(k)] +=
              std::abs(cell.rho_g(k, t));
        }
      }
      const int ok = agg.n_cells - agg.n_failed;
      if (ok > 0) {
        agg.r2_mean = r2_sum / ok;
        const double var = std::max(0.0, r2_sq / ok - agg.r2_mean * agg.r2_mean);
        agg.r2_sd = std::sqrt(var);
        agg.max_iterations_mean = iter_sum / ok;
        for (auto& v : agg.matched_rho_f_mean) v /= ok;
        for (auto& v : agg.matched_rho_g_mean) v /= ok;
      }
      result.aggregates.push_back(std::move(agg));
    }
  }
  return result;
}

void write_cells_csv(const SimResult& result, std::ostream& os) {
  const auto nk = static_cast<Index>(result.cfg.interaction_weights.size());
  os << "cell,replicate,noise_fraction,structural,status,r2,max_iterations";
  for (Index s = 0; s < nk; ++s)
    for (Index t = 0; t < nk; ++t) os << ",omega_" << s + 1 << t + 1;
  for (Index k = 0; k < nk; ++k)
    for (Index t = 0; t < nk; ++t) os << ",rho_f_" << k + 1 << t + 1;
  for (Index k = 0; k < nk; ++k)
    for (Index t = 0; t < nk; ++t) os << ",rho_g_" << k + 1 << t + 1;
  for (Index t = 0; t < nk; ++t) os << ",match_" << t + 1;
  os << "\n";
  int id = 0;
  for (const CellResult& cell : result.cells) {
    os << id++ << "," << cell.replicate << ","
       << format_double(cell.noise_fraction) << ","
       << (cell.structural ? "on" : "off") << ","
       << (cell.ok() ? "ok" : "error") << ",";
    if (!cell.ok()) {
      os << ",";
      for (Index i = 0; i < 3 * nk * nk + nk; ++i) os << ",";
      os << "\n";
      continue;
    }
    int max_it = 0;
    for (int it : cell.iterations) max_it = std::max(max_it, it);
    os << format_double(cell.r2) << "," << max_it;
    auto dump = [&](const Matrix& m, Index rows, Index cols) {
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
          os << "," << (i < m.rows() && j < m.cols() ? format_double(m(i, j)) : "");
    };
    dump(cell.omega, nk, nk);
    dump(cell.rho_f, nk, nk);
    dump(cell.rho_g, nk, nk);
    for (Index t = 0; t < nk; ++t) {
      os << ",";
      if (t < static_cast<Index>(cell.match.size()))
        os << cell.match[static_cast<std::size_t>(t)] + 1;
    }
    os << "\n";
  }
}

void write_aggregates_csv(const SimResult& result, std::ostream& os) {
  const auto nk = static_cast<Index>(result.cfg.interaction_weights.size());
  os << "row,noise_fraction,structural,n_cells,n_failed,r2_mean,r2_sd,"
        "max_iterations_mean";
  for (Index k = 0; k < nk; ++k) os << ",rho_f_" << k + 1 << "_mean";
  for (Index k = 0; k < nk; ++k) os << ",rho_g_" << k + 1 << "_mean";
  os << "\n";
  int id = 0;
  for (const Aggregate& a : result.aggregates) {
    os << id++ << "," << format_double(a.noise_fraction) << ","
       << (a.structural ? "on" : "off") << "," << a.n_cells << "," << a.n_failed
       << "," << format_double(a.r2_mean) << "," << format_double(a.r2_sd) << ","
       << format_double(a.max_iterations_mean);
    for (double v : a.matched_rho_f_mean) os << "," << format_double(v);
    for (double v : a.matched_rho_g_mean) os << "," << format_double(v);
    os << "\n";
  }
}

}  // namespace film
