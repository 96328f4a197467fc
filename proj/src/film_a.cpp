#include "film/film_a.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace film {

namespace {

Metric effective_metric(const Metric& native, bool structural_strength) {
  if (native.mode() == MetricMode::Custom) return native;
  return structural_strength ? Metric::identity() : Metric::inverse_covariance();
}

DataBlock with_metric(const DataBlock& block, const Metric& metric) {
  return DataBlock(block.data, block.weights, metric, block.standardized);
}

DataBlock basis_block(const std::vector<Component>& comps, const Vector& extra,
                      const WeightVector& weights) {
  Matrix m(weights.size(), static_cast<Index>(comps.size()) + 1);
  for (Index j = 0; j < static_cast<Index>(comps.size()); ++j)
    m.col(j) = comps[static_cast<std::size_t>(j)].scores;
  m.col(m.cols() - 1) = extra;
  return DataBlock(std::move(m), weights, Metric::identity(), false);
}

void apply_sign_rule(Vector& f, Vector& g, Vector& u, Vector& v, const Matrix& z,
                     const WeightVector& p, const WeightVector& q) {
  Index imax = 0;
  f.cwiseAbs().maxCoeff(&imax);
  bool flip_f = f(imax) < 0;
  if (flip_f) f = -f;
  const Vector zqg = z * (q.values().asDiagonal() * g);
  bool flip_g = weighted_inner(f, zqg, p) < 0;
  if (flip_g) g = -g;
  if (flip_f && u.size() > 0) u = -u;
  if (flip_g && v.size() > 0) v = -v;
}

Vector seeded_object_init(const DataBlock& ydefl, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector coef(ydefl.cols());
  for (Index j = 0; j < coef.size(); ++j) coef(j) = gauss(rng);
  Vector g = ydefl.data * coef;
  const double n = weighted_norm(g, ydefl.weights);
  if (!(n > 0.0)) throw DegenerateError("film-a: random init produced a zero vector");
  return g / n;
}

}  // namespace

Matrix ComponentBasis::score_matrix() const {
  if (components.empty()) return Matrix();
  Matrix m(components.front().scores.size(), count());
  for (Index j = 0; j < count(); ++j)
    m.col(j) = components[static_cast<std::size_t>(j)].scores;
  return m;
}

void FitConfig::validate() const {
  if (n_ranks < 1) throw ValidationError("n_ranks must be >= 1");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
}

DataBlock deflate(const DataBlock& block, const Vector& scores) {
  if (scores.size() != block.rows())
    throw DimensionError("deflate: component length does not match block rows");
  Matrix out = block.data -
               scores * (scores.transpose() *
                         (block.weights.values().asDiagonal() * block.data));
  return DataBlock(std::move(out), block.weights, block.metric,
                   block.standardized);
}

DataBlock deflate(const DataBlock& block, const Component& comp) {
  return deflate(block, comp.scores);
}

InteractionModel film_a_fit(const InteractionBlock& zb, const DataBlock& xblock,
                            const DataBlock& yblock, const FitConfig& cfg) {
  cfg.validate();
  if (xblock.rows() != zb.rows() || yblock.rows() != zb.cols())
    throw DimensionError("film-a: block row counts do not match the interaction table");
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;

  const Matrix z = double_center(zb.z, p, q);
  DataBlock xw = with_metric(xblock, effective_metric(xblock.metric, cfg.structural_strength));
  DataBlock yw = with_metric(yblock, effective_metric(yblock.metric, cfg.structural_strength));

  InteractionModel model;
  model.subject_basis.side = Side::Subject;
  model.object_basis.side = Side::Object;
  auto& fs = model.subject_basis.components;
  auto& gs = model.object_basis.components;

  for (int t = 0; t < cfg.n_ranks; ++t) {
    Rank1Solution init;
    try {
      init = solve_rank1(z, xw, yw);
    } catch (const DegenerateError&) {
      if (t == 0) throw;
      model.truncated = true;
      break;
    }
    model.degenerate_tie = model.degenerate_tie || init.degenerate_tie;

    Vector f = init.f, g = init.g, u = init.u, v = init.v;
    double eta = init.eta;
    int iterations = 0;

    if (t > 0) {
      // Alternate the two component-grid programs: the candidate couples with
      // every previously extracted partner component, so cross terms steer
      // the update away from the plain deflated rank-1 direction.
      bool ok = true;
      bool converged = false;
      bool retried = false;
      double last_delta = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= cfg.max_iter; ++k) {
        Rank1Solution fs_step;
        try {
          fs_step = solve_rank1(z, xw, basis_block(gs, g, q));
        } catch (const DegenerateError&) {
          if (cfg.seed && !retried) {
            retried = true;
            g = seeded_object_init(yw, *cfg.seed + static_cast<std::uint64_t>(t));
            continue;
          }
          ok = false;
          break;
        }
        Vector fn = fs_step.f;
        Vector un = fs_step.u;
        if (weighted_inner(fn, f, p) < 0) {
          fn = -fn;
          un = -un;
        }
        Rank1Solution gs_step;
        try {
          gs_step = solve_rank1(z, basis_block(fs, fn, p), yw);
        } catch (const DegenerateError&) {
          ok = false;
          break;
        }
        Vector gn = gs_step.g;
        Vector vn = gs_step.v;
        if (weighted_inner(gn, g, q) < 0) {
          gn = -gn;
          vn = -vn;
        }
        last_delta = std::max((fn - f).cwiseAbs().maxCoeff(),
                              (gn - g).cwiseAbs().maxCoeff());
        f = fn;
        g = gn;
        u = un;
        v = vn;
        eta = gs_step.eta;
        iterations = k;
        if (last_delta < cfg.tol) {
          converged = true;
          break;
        }
      }
      if (!ok) {
        model.truncated = true;
        break;
      }
      if (!converged)
        throw ConvergenceError("film-a: rank " + std::to_string(t + 1) +
                                   " did not converge in " +
                                   std::to_string(cfg.max_iter) +
                                   " iterations (last delta " +
                                   std::to_string(last_delta) + ")",
                               t + 1, last_delta);
    }

    apply_sign_rule(f, g, u, v, z, p, q);
    fs.push_back(Component{u, f, eta, t + 1});
    gs.push_back(Component{v, g, eta, t + 1});
    model.iterations_per_rank.push_back(iterations);

    xw = deflate(xw, f);
    yw = deflate(yw, g);
  }

  const Index T = model.subject_basis.count();
  const Matrix F = model.subject_basis.score_matrix();
  const Matrix G = model.object_basis.score_matrix();
  model.omega = F.transpose() * (p.values().asDiagonal() * z) *
                (q.values().asDiagonal() * G);
  model.z_norm2 = r_norm2(z, p, q);
  const Matrix zhat = F * model.omega * G.transpose();
  model.residual_norm2 = r_norm2(z - zhat, p, q);
  model.r2 = model.z_norm2 > 0.0 ? model.omega.squaredNorm() / model.z_norm2 : 0.0;
  model.term_contributions =
      model.z_norm2 > 0.0 ? Matrix(model.omega.array().square() / model.z_norm2)
                          : Matrix::Zero(T, T);

  const double trx = (xblock.weights.values().asDiagonal() * xblock.data)
                         .cwiseProduct(xblock.data)
                         .sum();
  const double try_ = (yblock.weights.values().asDiagonal() * yblock.data)
                          .cwiseProduct(yblock.data)
                          .sum();
  for (Index s = 0; s < T; ++s) {
    const Vector xf = xblock.data.transpose() *
                      (p.values().asDiagonal() * F.col(s));
    model.subject_variance_shares.push_back(trx > 0 ? xf.squaredNorm() / trx : 0.0);
    const Vector yg = yblock.data.transpose() *
                      (q.values().asDiagonal() * G.col(s));
    model.object_variance_shares.push_back(try_ > 0 ? yg.squaredNorm() / try_ : 0.0);
  }
  return model;
}

Matrix compute_omega(const InteractionBlock& zb, const ComponentBasis& fbasis,
                     const ComponentBasis& gbasis) {
  const Matrix F = fbasis.score_matrix();
  const Matrix G = gbasis.score_matrix();
  if (F.size() == 0 || G.size() == 0)
    throw ValidationError("compute_omega: empty basis");
  if (F.rows() != zb.rows() || G.rows() != zb.cols())
    throw DimensionError("compute_omega: basis does not match the interaction table");
  const Matrix fgram =
      F.transpose() * (zb.row_weights.values().asDiagonal() * F);
  const Matrix ggram =
      G.transpose() * (zb.col_weights.values().asDiagonal() * G);
  const double fdev =
      (fgram - Matrix::Identity(F.cols(), F.cols())).cwiseAbs().maxCoeff();
  const double gdev =
      (ggram - Matrix::Identity(G.cols(), G.cols())).cwiseAbs().maxCoeff();
  if (fdev > 1e-6 || gdev > 1e-6)
    throw ValidationError("compute_omega: basis is not orthonormal under its weights");
  return F.transpose() * (zb.row_weights.values().asDiagonal() * zb.z) *
         (zb.col_weights.values().asDiagonal() * G);
}

DiagnosticsReport diagnostics(const InteractionModel& model,
                              const InteractionBlock& zb,
                              const DataBlock& xblock, const DataBlock& yblock) {
  // Recomputed from the inputs rather than echoed from the model, so the
  // report doubles as a consistency check on a deserialised or hand-built fit.
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;
  const Matrix z = double_center(zb.z, p, q);
  const Matrix F = model.subject_basis.score_matrix();
  const Matrix G = model.object_basis.score_matrix();
  if (F.rows() != z.rows() || G.rows() != z.cols())
    throw DimensionError("diagnostics: model does not match the interaction table");

  DiagnosticsReport rep;
  const double z2 = r_norm2(z, p, q);
  const Matrix zhat = F * model.omega * G.transpose();
  const double resid2 = r_norm2(z - zhat, p, q);
  rep.r2 = z2 > 0.0 ? model.omega.squaredNorm() / z2 : 0.0;
  rep.residual_share = z2 > 0.0 ? resid2 / z2 : 1.0;
  rep.term_shares = z2 > 0.0 ? Matrix(model.omega.array().square() / z2)
                             : Matrix::Zero(model.omega.rows(), model.omega.cols());

  const double trx = (xblock.weights.values().asDiagonal() * xblock.data)
                         .cwiseProduct(xblock.data)
                         .sum();
  const double try_ = (yblock.weights.values().asDiagonal() * yblock.data)
                          .cwiseProduct(yblock.data)
                          .sum();
  for (Index s = 0; s < F.cols(); ++s) {
    const Vector xf =
        xblock.data.transpose() * (p.values().asDiagonal() * F.col(s));
    rep.subject_variance_shares.push_back(trx > 0 ? xf.squaredNorm() / trx : 0.0);
    const Vector yg =
        yblock.data.transpose() * (q.values().asDiagonal() * G.col(s));
    rep.object_variance_shares.push_back(try_ > 0 ? yg.squaredNorm() / try_ : 0.0);
  }
  rep.iterations_per_rank = model.iterations_per_rank;
  return rep;
}

}  // namespace film
