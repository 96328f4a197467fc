#include "film/geometry.hpp"

#include <cmath>
#include <string>

namespace film {

double weighted_inner(const Vector& x, const Vector& y, const WeightVector& w) {
  if (x.size() != y.size() || x.size() != w.size())
    throw DimensionError("weighted_inner: length mismatch");
  return (w.values().array() * x.array() * y.array()).sum();
}

double weighted_norm(const Vector& x, const WeightVector& w) {
  return std::sqrt(weighted_inner(x, x, w));
}

double r_inner(const Matrix& w_tab, const Matrix& v_tab, const WeightVector& p,
               const WeightVector& q) {
  if (w_tab.rows() != v_tab.rows() || w_tab.cols() != v_tab.cols())
    throw DimensionError("r_inner: shape mismatch");
  if (w_tab.rows() != p.size() || w_tab.cols() != q.size())
    throw DimensionError("r_inner: table shape does not match weights");
  // tr(Q W' P V) = sum_{i,m} p_i q_m W_im V_im
  return ((p.values().asDiagonal() * w_tab).cwiseProduct(
              v_tab * q.values().asDiagonal()))
      .sum();
}

double r_norm2(const Matrix& w_tab, const WeightVector& p, const WeightVector& q) {
  return r_inner(w_tab, w_tab, p, q);
}

Matrix psd_pseudo_inverse(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Vector lam = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(lam.maxCoeff(), 0.0);
  Vector inv = Vector::Zero(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cutoff) inv(i) = 1.0 / lam(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix metric_matrix(const DataBlock& block) {
  switch (block.metric.mode()) {
    case MetricMode::Identity:
      return Matrix::Identity(block.cols(), block.cols());
    case MetricMode::InverseCovariance: {
      const Matrix gram = block.data.transpose() *
                          block.weights.values().asDiagonal() * block.data;
      return psd_pseudo_inverse(gram);
    }
    case MetricMode::Custom:
      return block.metric.matrix();
  }
  throw ValidationError("unknown metric mode");
}

Matrix r_operator(const DataBlock& block) {
  switch (block.metric.mode()) {
    case MetricMode::Identity:
      return block.data * block.data.transpose();
    default:
      return block.data * metric_matrix(block) * block.data.transpose();
  }
}

Matrix metric_projector_apply(const DataBlock& block, const Matrix& target) {
  if (block.rows() != target.rows())
    throw DimensionError("metric_projector_apply: row count mismatch");
  const auto P = block.weights.values().asDiagonal();
  const Matrix gram = block.data.transpose() * P * block.data;
  return block.data * (psd_pseudo_inverse(gram) *
                       (block.data.transpose() * (P * target)));
}

DataBlock standardize(const DataBlock& block) {
  const Vector& w = block.weights.values();
  Matrix out = block.data;
  for (Index j = 0; j < out.cols(); ++j) {
    const double mean = w.dot(out.col(j));
    out.col(j).array() -= mean;
    const double var = w.dot(out.col(j).cwiseAbs2());
    const double scale = std::max(1.0, std::abs(mean));
    if (std::sqrt(var) <= 1e-13 * scale)
      throw ValidationError("standardize: column " + std::to_string(j) +
                            " is constant");
    out.col(j) /= std::sqrt(var);
  }
  return DataBlock(std::move(out), block.weights, block.metric, true);
}

DataBlock center(const DataBlock& block) {
  const Vector& w = block.weights.values();
  Matrix out = block.data;
  for (Index j = 0; j < out.cols(); ++j) out.col(j).array() -= w.dot(out.col(j));
  return DataBlock(std::move(out), block.weights, block.metric,
                   block.standardized);
}

Matrix double_center(const Matrix& z, const WeightVector& p, const WeightVector& q) {
  if (z.rows() != p.size() || z.cols() != q.size())
    throw DimensionError("double_center: shape does not match weights");
  const Vector row_means = z * q.values();          // under Q
  const Vector col_means = z.transpose() * p.values();  // under P
  const double grand = p.values().dot(z * q.values());
  Matrix out = z;
  out.colwise() -= row_means;
  out.rowwise() -= col_means.transpose();
  out.array() += grand;
  return out;
}

InteractionBlock double_center(const InteractionBlock& zb) {
  return InteractionBlock(double_center(zb.z, zb.row_weights, zb.col_weights),
                          zb.row_weights, zb.col_weights);
}

}  // namespace film
