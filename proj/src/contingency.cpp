#include "film/contingency.hpp"

#include <string>

#include "film/geometry.hpp"

namespace film {

ContingencyTable ContingencyTable::from_counts(const Matrix& counts, bool drop_zero,
                                               std::vector<Index>* dropped_rows,
                                               std::vector<Index>* dropped_cols) {
  if (counts.size() == 0) throw ValidationError("contingency table is empty");
  if (!counts.allFinite())
    throw ValidationError("contingency table has non-finite entries");
  if ((counts.array() < 0.0).any())
    throw ValidationError("contingency table entries must be nonnegative");

  Matrix kept = counts;
  if (drop_zero) {
    std::vector<Index> rows, cols;
    for (Index i = 0; i < counts.rows(); ++i)
      if (counts.row(i).sum() > 0.0) rows.push_back(i);
      else if (dropped_rows) dropped_rows->push_back(i);
    for (Index m = 0; m < counts.cols(); ++m)
      if (counts.col(m).sum() > 0.0) cols.push_back(m);
      else if (dropped_cols) dropped_cols->push_back(m);
    kept.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index i = 0; i < kept.rows(); ++i)
      for (Index m = 0; m < kept.cols(); ++m)
        kept(i, m) = counts(rows[static_cast<std::size_t>(i)],
                            cols[static_cast<std::size_t>(m)]);
    if (kept.size() == 0)
      throw ValidationError("contingency table is empty after dropping zero margins");
  }

  const double total = kept.sum();
  if (!(total > 0.0)) throw ValidationError("contingency table sums to zero");

  ContingencyTable ct;
  ct.freq = kept / total;
  ct.row_margins = ct.freq.rowwise().sum();
  ct.col_margins = ct.freq.colwise().sum();
  for (Index i = 0; i < ct.row_margins.size(); ++i)
    if (!(ct.row_margins(i) > 0.0))
      throw ValidationError("contingency table row " + std::to_string(i) +
                            " has zero margin");
  for (Index m = 0; m < ct.col_margins.size(); ++m)
    if (!(ct.col_margins(m) > 0.0))
      throw ValidationError("contingency table column " + std::to_string(m) +
                            " has zero margin");
  return ct;
}

PhiTable build_phi(const ContingencyTable& ct) {
  const Matrix expected = ct.row_margins * ct.col_margins.transpose();
  PhiTable out{Matrix(ct.freq.cwiseQuotient(expected).array() - 1.0),
               WeightVector(ct.row_margins, true),
               WeightVector(ct.col_margins, true), 0.0};
  out.phi2 = r_norm2(out.phi, out.row_weights, out.col_weights);
  return out;
}

InteractionModel film_contingency(const ContingencyTable& ct, const Matrix& xraw,
                                  const Matrix& yraw, const FitConfig& cfg) {
  if (xraw.rows() != ct.freq.rows())
    throw DimensionError("film_contingency: subject descriptors do not match rows");
  if (yraw.rows() != ct.freq.cols())
    throw DimensionError("film_contingency: object descriptors do not match columns");
  PhiTable pt = build_phi(ct);
  const DataBlock xb = standardize(
      DataBlock(xraw, pt.row_weights, Metric::identity()));
  const DataBlock yb = standardize(
      DataBlock(yraw, pt.col_weights, Metric::identity()));
  return film_a_fit(InteractionBlock(pt.phi, pt.row_weights, pt.col_weights), xb,
                    yb, cfg);
}

}  // namespace film
