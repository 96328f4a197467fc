#include "film/types.hpp"

#include <cmath>
#include <string>

namespace film {

WeightVector::WeightVector(Vector w, bool renormalize) : w_(std::move(w)) {
  if (w_.size() == 0) throw ValidationError("weight vector is empty");
  if (!w_.allFinite()) throw ValidationError("weight vector has non-finite entries");
  if ((w_.array() <= 0.0).any())
    throw ValidationError("weight vector entries must be strictly positive");
  const double sum = w_.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    if (!renormalize)
      throw ValidationError("weights sum to " + std::to_string(sum) +
                            ", expected 1 (pass renormalize to rescale)");
    w_ /= sum;
  }
}

WeightVector WeightVector::uniform(Index n) {
  if (n <= 0) throw ValidationError("weight vector length must be positive");
  return WeightVector(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Metric Metric::custom(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionError("custom metric must be square");
  if (!m.allFinite()) throw ValidationError("custom metric has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ValidationError("custom metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ValidationError("custom metric is not positive definite");
  Metric out(MetricMode::Custom);
  out.m_ = std::move(m);
  return out;
}

DataBlock::DataBlock(Matrix data_, WeightVector weights_, Metric metric_,
                     bool standardized_)
    : data(std::move(data_)),
      weights(std::move(weights_)),
      metric(std::move(metric_)),
      standardized(standardized_) {
  if (data.rows() != weights.size())
    throw DimensionError("data block has " + std::to_string(data.rows()) +
                         " rows but " + std::to_string(weights.size()) + " weights");
  if (metric.mode() == MetricMode::Custom && metric.matrix().rows() != data.cols())
    throw DimensionError("custom metric size does not match column count");
}

InteractionBlock::InteractionBlock(Matrix z_, WeightVector row_weights_,
                                   WeightVector col_weights_)
    : z(std::move(z_)),
      row_weights(std::move(row_weights_)),
      col_weights(std::move(col_weights_)) {
  if (z.rows() != row_weights.size() || z.cols() != col_weights.size())
    throw DimensionError("interaction table shape does not match weight vectors");
}

}  // namespace film
