#include "film/film_b.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace film {

namespace {

Metric effective_metric(const Metric& native, bool structural_strength) {
  if (native.mode() == MetricMode::Custom) return native;
  return structural_strength ? Metric::identity() : Metric::inverse_covariance();
}

void require_standardized(const DataBlock& b, const char* side) {
  if (!b.standardized)
    throw ValidationError(std::string("film-b: ") + side +
                          " block must be standardized");
}

// <T | u v'>_R = u' P T Q v
double table_proj(const Matrix& t, const Vector& u, const Vector& v,
                  const WeightVector& p, const WeightVector& q) {
  return u.dot(p.values().asDiagonal() * t * (q.values().asDiagonal() * v));
}

// Columns of prior components plus the constant direction, re-orthonormalised
// under the weights before each half-step.
Matrix augmented_basis(const std::vector<Component>& comps, const Vector& current,
                       const WeightVector& w) {
  const Index n = w.size();
  Matrix m(n, static_cast<Index>(comps.size()) + 2);
  m.col(0) = Vector::Ones(n);  // already weight-normed: sum of weights is 1
  for (std::size_t j = 0; j < comps.size(); ++j)
    m.col(static_cast<Index>(j) + 1) = comps[j].scores;
  m.col(m.cols() - 1) = current;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < j; ++i)
      m.col(j) -= weighted_inner(m.col(j), m.col(i), w) * m.col(i);
    const double norm = weighted_norm(m.col(j), w);
    if (norm <= 1e-12)
      throw DegenerateError("film-b2: augmented basis lost rank");
    m.col(j) /= norm;
  }
  return m;
}

}  // namespace

MarginalDecomposition decompose_margins(const InteractionBlock& zb) {
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;
  MarginalDecomposition d;
  d.grand_mean = p.values().dot(zb.z * q.values());
  d.subject_margin = zb.z * q.values();
  d.subject_margin.array() -= d.grand_mean;
  d.object_margin = zb.z.transpose() * p.values();
  d.object_margin.array() -= d.grand_mean;
  d.zstar = double_center(zb.z, p, q);
  return d;
}

MarginModel pls1_fit(const Vector& y, const DataBlock& block, int n_comp) {
  if (y.size() != block.rows())
    throw DimensionError("pls1_fit: response length does not match block rows");
  if (n_comp < 1) throw ValidationError("pls1_fit: n_comp must be >= 1");
  const WeightVector& w = block.weights;

  MarginModel m;
  m.residual = y;
  DataBlock xd = block;
  const double scale =
      std::max(1.0, (block.data.transpose() * (w.values().asDiagonal() * y)).norm());
  std::vector<Vector> comps;
  std::vector<double> coefs;
  for (int t = 0; t < n_comp; ++t) {
    Vector wt = xd.data.transpose() * (w.values().asDiagonal() * m.residual);
    if (wt.norm() <= 1e-12 * scale) {
      m.early_stop = true;
      break;
    }
    wt /= wt.norm();
    Vector comp = xd.data * wt;
    const double cn = weighted_norm(comp, w);
    if (cn <= 1e-13) {
      m.early_stop = true;
      break;
    }
    comp /= cn;
    const double alpha = weighted_inner(m.residual, comp, w);
    m.residual -= alpha * comp;
    xd = deflate(xd, comp);
    comps.push_back(std::move(comp));
    coefs.push_back(alpha);
  }
  m.components.resize(y.size(), static_cast<Index>(comps.size()));
  m.coefficients.resize(static_cast<Index>(coefs.size()));
  for (std::size_t j = 0; j < comps.size(); ++j) {
    m.components.col(static_cast<Index>(j)) = comps[j];
    m.coefficients(static_cast<Index>(j)) = coefs[j];
  }
  m.fit_norm2 = m.coefficients.squaredNorm();
  m.residual_norm2 = weighted_inner(m.residual, m.residual, w);
  return m;
}

MarginModel ols1_fit(const Vector& y, const DataBlock& block) {
  if (y.size() != block.rows())
    throw DimensionError("ols1_fit: response length does not match block rows");
  const WeightVector& w = block.weights;
  MarginModel m;
  Vector fitted = metric_projector_apply(block, y);
  const double fn = weighted_norm(fitted, w);
  if (fn <= 1e-13 * std::max(1.0, weighted_norm(y, w))) {
    m.components.resize(y.size(), 0);
    m.coefficients.resize(0);
    m.residual = y;
    m.early_stop = true;
  } else {
    m.components = fitted / fn;
    m.coefficients = Vector::Constant(1, fn);
    m.residual = y - fitted;
  }
  m.fit_norm2 = m.coefficients.squaredNorm();
  m.residual_norm2 = weighted_inner(m.residual, m.residual, w);
  return m;
}

B1Model film_b1_fit(const InteractionBlock& zb, const DataBlock& xblock,
                    const DataBlock& yblock, const FitConfig& cfg) {
  cfg.validate();
  require_standardized(xblock, "subject");
  require_standardized(yblock, "object");
  if (xblock.rows() != zb.rows() || yblock.rows() != zb.cols())
    throw DimensionError("film-b1: block row counts do not match the interaction table");
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;

  B1Model b;
  b.margins = decompose_margins(zb);
  b.subject_margin_norm2 =
      weighted_inner(b.margins.subject_margin, b.margins.subject_margin, p);
  b.object_margin_norm2 =
      weighted_inner(b.margins.object_margin, b.margins.object_margin, q);
  b.interaction_norm2 = r_norm2(b.margins.zstar, p, q);
  b.total_variance =
      b.subject_margin_norm2 + b.object_margin_norm2 + b.interaction_norm2;

  if (cfg.margin_regression == MarginRegression::Pls1) {
    b.subject_margin_model = pls1_fit(b.margins.subject_margin, xblock, cfg.n_ranks);
    b.object_margin_model = pls1_fit(b.margins.object_margin, yblock, cfg.n_ranks);
  } else {
    b.subject_margin_model = ols1_fit(b.margins.subject_margin, xblock);
    b.object_margin_model = ols1_fit(b.margins.object_margin, yblock);
  }

  if (b.interaction_norm2 > 1e-24 * std::max(1.0, b.total_variance)) {
    b.interaction_model = film_a_fit(InteractionBlock(b.margins.zstar, p, q),
                                     xblock, yblock, cfg);
    b.interaction_fit2 = b.interaction_model->omega.squaredNorm();
    b.interaction_residual2 = b.interaction_model->residual_norm2;

    const Matrix fi = b.interaction_model->subject_basis.score_matrix();
    const Matrix gi = b.interaction_model->object_basis.score_matrix();
    // Component correlations across sub-models; all vectors are centred and
    // weight-normed, so the weighted inner product is the correlation.
    b.subject_component_corr = b.subject_margin_model.components.transpose() *
                               (p.values().asDiagonal() * fi);
    b.object_component_corr = b.object_margin_model.components.transpose() *
                              (q.values().asDiagonal() * gi);
  } else {
    b.interaction_residual2 = b.interaction_norm2;
  }
  return b;
}

B2Model film_b2_fit(const InteractionBlock& zb, const DataBlock& xblock,
                    const DataBlock& yblock, const FitConfig& cfg) {
  cfg.validate();
  require_standardized(xblock, "subject");
  require_standardized(yblock, "object");
  if (xblock.rows() != zb.rows() || yblock.rows() != zb.cols())
    throw DimensionError("film-b2: block row counts do not match the interaction table");
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;
  const Index n = zb.rows(), np = zb.cols();
  const Vector en = Vector::Ones(n), ep = Vector::Ones(np);

  B2Model b;
  b.subject_basis.side = Side::Subject;
  b.object_basis.side = Side::Object;
  b.grand_mean = p.values().dot(zb.z * q.values());
  const Matrix z1 = zb.z.array() - b.grand_mean;
  b.total_variance = r_norm2(z1, p, q);

  DataBlock xw = DataBlock(xblock.data, p,
                           effective_metric(xblock.metric, cfg.structural_strength),
                           xblock.standardized);
  DataBlock yw = DataBlock(yblock.data, q,
                           effective_metric(yblock.metric, cfg.structural_strength),
                           yblock.standardized);

  auto& fs = b.subject_basis.components;
  auto& gs = b.object_basis.components;
  Matrix zres = z1;

  for (int t = 0; t < cfg.n_ranks; ++t) {
    Rank1Solution init;
    try {
      init = solve_rank1(double_center(zres, p, q), xw, yw);
    } catch (const DegenerateError&) {
      b.truncated = true;
      break;
    }
    Vector f = init.f, g = init.g, u = init.u, v = init.v;

    bool ok = true;
    bool converged = false;
    double last_delta = std::numeric_limits<double>::infinity();
    int iterations = 0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
      // Object half-step: strip the terms that do not couple with the object
      // candidate, then fit (beta en + cross f^s + delta f) g' jointly.
      Matrix target = zres - table_proj(zres, f, ep, p, q) * (f * ep.transpose());
      for (const auto& c : gs)
        target -= table_proj(zres, f, c.scores, p, q) * (f * c.scores.transpose());
      DataBlock hblock(augmented_basis(fs, f, p), p, Metric::identity(), false);
      Rank1Solution ostep;
      try {
        ostep = solve_rank1(target, hblock, yw);
      } catch (const DegenerateError&) {
        ok = false;
        break;
      }
      Vector gn = ostep.g;
      Vector vn = ostep.v;
      if (weighted_inner(gn, g, q) < 0) {
        gn = -gn;
        vn = -vn;
      }
      v = vn;

      target = zres - table_proj(zres, en, gn, p, q) * (en * gn.transpose());
      for (const auto& c : fs)
        target -= table_proj(zres, c.scores, gn, p, q) * (c.scores * gn.transpose());
      DataBlock kblock(augmented_basis(gs, gn, q), q, Metric::identity(), false);
      Rank1Solution sstep;
      try {
        sstep = solve_rank1(target, xw, kblock);
      } catch (const DegenerateError&) {
        ok = false;
        break;
      }
      Vector fn = sstep.f;
      Vector un = sstep.u;
      if (weighted_inner(fn, f, p) < 0) {
        fn = -fn;
        un = -un;
      }
      u = un;

      last_delta = std::max((fn - f).cwiseAbs().maxCoeff(),
                            (gn - g).cwiseAbs().maxCoeff());
      f = fn;
      g = gn;
      iterations = k;
      if (last_delta < cfg.tol) {
        converged = true;
        break;
      }
    }
    if (!ok) {
      b.truncated = true;
      break;
    }
    if (!converged)
      throw ConvergenceError("film-b2: rank " + std::to_string(t + 1) +
                                 " did not converge in " +
                                 std::to_string(cfg.max_iter) +
                                 " iterations (last delta " +
                                 std::to_string(last_delta) + ")",
                             t + 1, last_delta);

    // Deterministic signs: subject component largest coordinate positive,
    // object sign makes the own-rank interaction coefficient nonnegative.
    Index imax = 0;
    f.cwiseAbs().maxCoeff(&imax);
    if (f(imax) < 0) {
      f = -f;
      u = -u;
    }
    if (table_proj(zres, f, g, p, q) < 0) {
      g = -g;
      v = -v;
    }

    // Remove every rank-t term from the running residual. The terms are
    // mutually R-orthogonal, so the projections can be taken upfront.
    const double c_f = table_proj(zres, f, ep, p, q);
    const double c_g = table_proj(zres, en, g, p, q);
    const double c_fg = table_proj(zres, f, g, p, q);
    std::vector<double> c_sg, c_fg2;
    for (const auto& c : fs) c_sg.push_back(table_proj(zres, c.scores, g, p, q));
    for (const auto& c : gs) c_fg2.push_back(table_proj(zres, f, c.scores, p, q));
    zres -= c_f * (f * ep.transpose()) + c_g * (en * g.transpose()) +
            c_fg * (f * g.transpose());
    for (std::size_t s = 0; s < fs.size(); ++s)
      zres -= c_sg[s] * (fs[s].scores * g.transpose());
    for (std::size_t s = 0; s < gs.size(); ++s)
      zres -= c_fg2[s] * (f * gs[s].scores.transpose());

    fs.push_back(Component{u, f, init.eta, t + 1});
    gs.push_back(Component{v, g, init.eta, t + 1});
    b.iterations_per_rank.push_back(iterations);
    xw = deflate(xw, f);
    yw = deflate(yw, g);
  }

  const Index T = b.subject_basis.count();
  const Matrix F = b.subject_basis.score_matrix();
  const Matrix G = b.object_basis.score_matrix();
  b.subject_effects.resize(T);
  b.object_effects.resize(T);
  for (Index t = 0; t < T; ++t) {
    b.subject_effects(t) = table_proj(z1, F.col(t), ep, p, q);
    b.object_effects(t) = table_proj(z1, en, G.col(t), p, q);
  }
  b.interaction = T > 0 ? Matrix(F.transpose() * (p.values().asDiagonal() * z1) *
                                 (q.values().asDiagonal() * G))
                        : Matrix::Zero(0, 0);
  b.residual_norm2 = r_norm2(zres, p, q);
  return b;
}

}  // namespace film
