#pragma once

#include "film/types.hpp"

namespace film {

// <x|y>_W = sum_i w_i x_i y_i
double weighted_inner(const Vector& x, const Vector& y, const WeightVector& w);
double weighted_norm(const Vector& x, const WeightVector& w);

// <W|V>_R = tr(Q W' P V), evaluated entry-wise.
double r_inner(const Matrix& w_tab, const Matrix& v_tab, const WeightVector& p,
               const WeightVector& q);
double r_norm2(const Matrix& w_tab, const WeightVector& p, const WeightVector& q);

// Pseudo-inverse of a symmetric PSD matrix, dropping eigenvalues below
// 1e-10 times the largest one.
Matrix psd_pseudo_inverse(const Matrix& s);
Matrix psd_sqrt(const Matrix& s);

// The metric matrix of a block, materialised (Identity and InverseCovariance
// are resolved against the block's data and weights).
Matrix metric_matrix(const DataBlock& block);

// R = X M X', the block's reproducing operator on observation space.
Matrix r_operator(const DataBlock& block);

// P-orthogonal projection of each target column onto the block's column span.
Matrix metric_projector_apply(const DataBlock& block, const Matrix& target);

// Weighted mean 0 / variance 1 per column; errors name the offending column.
DataBlock standardize(const DataBlock& block);

// Weighted column centering only (mean 0 per column).
DataBlock center(const DataBlock& block);

Matrix double_center(const Matrix& z, const WeightVector& p, const WeightVector& q);
InteractionBlock double_center(const InteractionBlock& zb);

}  // namespace film
