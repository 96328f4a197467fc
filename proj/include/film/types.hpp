#pragma once

#include <Eigen/Dense>

#include "film/errors.hpp"

namespace film {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Statistical weights over one observation set. Entries are strictly
// positive and sum to one (within 1e-12 unless renormalize is requested).
class WeightVector {
 public:
  explicit WeightVector(Vector w, bool renormalize = false);
  static WeightVector uniform(Index n);

  const Vector& values() const { return w_; }
  Index size() const { return w_.size(); }
  double operator[](Index i) const { return w_(i); }

  Vector sqrt() const { return w_.array().sqrt().matrix(); }

 private:
  Vector w_;
};

enum class MetricMode { Identity, InverseCovariance, Custom };

// Column-space metric of a descriptor block. Identity and InverseCovariance
// are resolved against the block they are attached to; InverseCovariance is a
// pseudo-inverse of X'PX restricted to the block's column space.
class Metric {
 public:
  static Metric identity() { return Metric(MetricMode::Identity); }
  static Metric inverse_covariance() { return Metric(MetricMode::InverseCovariance); }
  static Metric custom(Matrix m);

  MetricMode mode() const { return mode_; }
  const Matrix& matrix() const { return m_; }  // Custom mode only

 private:
  explicit Metric(MetricMode mode) : mode_(mode) {}
  MetricMode mode_;
  Matrix m_;
};

// A descriptor table: rows are observations carrying weights, columns are
// variables living in a metric space.
struct DataBlock {
  Matrix data;
  WeightVector weights;
  Metric metric;
  bool standardized = false;

  DataBlock(Matrix data_, WeightVector weights_, Metric metric_,
            bool standardized_ = false);

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }
};

// The n x p interaction table with both weight systems.
struct InteractionBlock {
  Matrix z;
  WeightVector row_weights;
  WeightVector col_weights;

  InteractionBlock(Matrix z_, WeightVector row_weights_, WeightVector col_weights_);

  Index rows() const { return z.rows(); }
  Index cols() const { return z.cols(); }
};

}  // namespace film
