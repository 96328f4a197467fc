#include "film/baselines.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "film/geometry.hpp"
#include "film/solver.hpp"

namespace film {

TripletSet rlq_triplets(const InteractionBlock& zb, const DataBlock& xblock,
                        const DataBlock& yblock) {
  const WeightVector& p = zb.row_weights;
  const WeightVector& q = zb.col_weights;
  const auto Pd = p.values().asDiagonal();
  const auto Qd = q.values().asDiagonal();
  const Matrix ry = r_operator(yblock);

  TripletSet out;
  for (auto& [eta, f] : composed_spectrum(zb.z, xblock, yblock)) {
    Triplet tr;
    tr.eta = eta;
    tr.f = f;
    Vector g = ry * (Qd * (zb.z.transpose() * (Pd * tr.f)));
    const double ng = weighted_norm(g, q);
    if (!(ng > 0.0)) continue;
    tr.g = g / ng;
    Index imax = 0;
    tr.f.cwiseAbs().maxCoeff(&imax);
    if (tr.f(imax) < 0) tr.f = -tr.f;
    if (weighted_inner(tr.f, zb.z * (Qd * tr.g), p) < 0) tr.g = -tr.g;
    out.triplets.push_back(std::move(tr));
  }
  return out;
}

TwoGroupSolution two_group_solve(const DataBlock& xblock, const DataBlock& yblock) {
  if (xblock.rows() != yblock.rows())
    throw DimensionError("two_group_solve: blocks must share the observation set");
  if ((xblock.weights.values() - yblock.weights.values()).cwiseAbs().maxCoeff() >
      1e-12)
    throw DimensionError("two_group_solve: blocks must share the weight system");
  const WeightVector& p = xblock.weights;
  const Vector sp = p.sqrt();

  // R_X P R_Y P f = eta f, whitened to S_X^1/2 S_Y S_X^1/2.
  const Matrix sx = sp.asDiagonal() * r_operator(xblock) * sp.asDiagonal();
  const Matrix sy = sp.asDiagonal() * r_operator(yblock) * sp.asDiagonal();
  const Matrix sxh = psd_sqrt(sx);
  Matrix c = sxh * sy * sxh;
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  const Index n = es.eigenvalues().size();
  const double eta = es.eigenvalues()(n - 1);

  TwoGroupSolution out;
  // cut above the numerical noise floor of the whitened products
  const double bound = sx.trace() * sy.trace();
  if (!(eta > 0.0) || eta <= 1e-13 * bound || bound == 0.0) {
    out.degenerate = true;
    out.f = Vector::Zero(xblock.rows());
    out.g = Vector::Zero(xblock.rows());
    return out;
  }
  out.eta = eta;
  Vector f = (sxh * es.eigenvectors().col(n - 1)).cwiseQuotient(sp);
  const double nf = weighted_norm(f, p);
  if (!(nf > 0.0)) {
    out.degenerate = true;
    out.f = Vector::Zero(xblock.rows());
    out.g = Vector::Zero(xblock.rows());
    return out;
  }
  out.f = f / nf;
  Vector g = r_operator(yblock) * (p.values().asDiagonal() * out.f);
  const double ng = weighted_norm(g, p);
  if (!(ng > 0.0)) {
    out.degenerate = true;
    out.g = Vector::Zero(xblock.rows());
    return out;
  }
  out.g = g / ng;
  Index imax = 0;
  out.f.cwiseAbs().maxCoeff(&imax);
  if (out.f(imax) < 0) out.f = -out.f;
  if (weighted_inner(out.f, out.g, p) < 0) out.g = -out.g;
  return out;
}

TripletSet pca_special_case(const InteractionBlock& zb) {
  const Index n = zb.rows(), np = zb.cols();
  const Matrix pinv_metric =
      zb.row_weights.values().cwiseInverse().asDiagonal();
  const Matrix qinv_metric =
      zb.col_weights.values().cwiseInverse().asDiagonal();
  const DataBlock xb(Matrix::Identity(n, n), zb.row_weights,
                     Metric::custom(pinv_metric));
  const DataBlock yb(Matrix::Identity(np, np), zb.col_weights,
                     Metric::custom(qinv_metric));
  return rlq_triplets(zb, xb, yb);
}

BruteForceResult brute_force_rank1(const InteractionBlock& zb,
                                   const DataBlock& xblock,
                                   const DataBlock& yblock, int n_samples,
                                   std::uint64_t seed) {
  if (xblock.rows() != zb.rows() || yblock.rows() != zb.cols())
    throw DimensionError("brute_force_rank1: block rows do not match the table");
  if (n_samples < 1) throw ValidationError("brute_force_rank1: n_samples must be >= 1");
  const auto Pd = zb.row_weights.values().asDiagonal();
  const auto Qd = zb.col_weights.values().asDiagonal();
  const Matrix mx = metric_matrix(xblock);
  const Matrix ny = metric_matrix(yblock);
  const Index J = xblock.cols(), K = yblock.cols();

  // Best response from the stationarity conditions: at fixed v the optimal
  // direction is X'PZQYNv, metric-normalised (and symmetrically for v).
  const Matrix xt_pzq = xblock.data.transpose() * Pd * zb.z * Qd;
  const Matrix yt_qztp = yblock.data.transpose() * Qd * zb.z.transpose() * Pd;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  BruteForceResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int s = 0; s < n_samples; ++s) {
    Vector u(J), v(K);
    for (Index j = 0; j < J; ++j) u(j) = gauss(rng);
    for (Index k = 0; k < K; ++k) v(k) = gauss(rng);
    double un = std::sqrt(u.dot(mx * u));
    double vn = std::sqrt(v.dot(ny * v));
    if (!(un > 0.0) || !(vn > 0.0)) continue;
    u /= un;
    v /= vn;
    for (int it = 0; it < 25; ++it) {
      Vector su = xt_pzq * (yblock.data * (ny * v));
      const double sn = std::sqrt(su.dot(mx * su));
      if (!(sn > 0.0)) break;
      u = su / sn;
      Vector sv = yt_qztp * (xblock.data * (mx * u));
      const double tn = std::sqrt(sv.dot(ny * sv));
      if (!(tn > 0.0)) break;
      v = sv / tn;
    }
    const double value =
        (yblock.data * (ny * v)).dot(Qd * (zb.z.transpose() * (Pd * (xblock.data * (mx * u)))));
    const double mag = std::abs(value);
    if (mag > best.value) {
      best.value = mag;
      best.u = value >= 0 ? u : Vector(-u);
      best.v = v;
    }
  }
  if (!std::isfinite(best.value)) {
    best.value = 0.0;
    best.u = Vector::Zero(J);
    best.v = Vector::Zero(K);
  }
  return best;
}

}  // namespace film
