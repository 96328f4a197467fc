#include "film/solver.hpp"

#include <cmath>
#include <string>

namespace film {

namespace {

void check_shapes(const Matrix& z, const DataBlock& x, const DataBlock& y) {
  if (x.rows() != z.rows())
    throw DimensionError("solver: subject block has " + std::to_string(x.rows()) +
                         " rows, interaction table has " + std::to_string(z.rows()));
  if (y.rows() != z.cols())
    throw DimensionError("solver: object block has " + std::to_string(y.rows()) +
                         " rows, interaction table has " + std::to_string(z.cols()) +
                         " columns");
  if (!z.allFinite() || !x.data.allFinite() || !y.data.allFinite())
    throw ValidationError("solver: non-finite input");
}

// Canonical sign: first coordinate of magnitude above tolerance positive.
Vector canonical(const Vector& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) > 1e-14) return y(i) > 0 ? y : Vector(-y);
  }
  return y;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

struct SideSolve {
  Vector score;  // weight-normed leading score on the solved side
  double eta = 0.0;
  bool tie = false;
};

// Leading eigenpair of R_X P Z Q R_Y Q Z' P on the subject side, computed in
// whitened coordinates: with S1 = P^1/2 R_X P^1/2 and
// S2 = P^1/2 (Z Q R_Y Q Z') P^1/2 the spectrum of S1 S2 equals that of the
// symmetric S1^1/2 S2 S1^1/2, and f = P^-1/2 S1^1/2 y recovers the score.
SideSolve solve_side(const Matrix& z, const DataBlock& x, const DataBlock& y) {
  const Vector sp = x.weights.sqrt();
  const Vector& q = y.weights.values();
  const Matrix rx = r_operator(x);
  const Matrix ry = r_operator(y);
  const Matrix zq = z * q.asDiagonal();
  const Matrix s1 = sp.asDiagonal() * rx * sp.asDiagonal();
  const Matrix s2 = sp.asDiagonal() * (zq * ry * zq.transpose()) * sp.asDiagonal();
  const Matrix s1h = psd_sqrt(s1);
  Matrix c = s1h * s2 * s1h;
  c = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  const Vector& lam = es.eigenvalues();  // ascending
  const Index n = lam.size();
  const double eta = lam(n - 1);

  // eta <= tr(S1) * tr(Q^1/2 R_Y Q^1/2) * ||Z||_R^2. A leading eigenvalue at
  // the precision floor of that input-side bound means Z is orthogonal to the
  // candidate cone. The cut sits above the O(n eps) noise floor of the
  // whitened matrix products.
  const Vector sq = y.weights.sqrt();
  const double scale = s1.trace() *
                       (sq.asDiagonal() * ry * sq.asDiagonal()).trace() *
                       r_norm2(z, x.weights, y.weights);
  if (!(eta > 0.0) || !(scale > 0.0) || eta <= 1e-13 * scale)
    throw DegenerateError("rank-1 program is degenerate: interaction table is "
                          "orthogonal to the candidate cone");

  SideSolve out;
  Vector ybest = canonical(es.eigenvectors().col(n - 1));
  if (n >= 2 && eta - lam(n - 2) <= 1e-10 * eta) {
    out.tie = true;
    for (Index i = n - 2; i >= 0 && eta - lam(i) <= 1e-10 * eta; --i) {
      Vector cand = canonical(es.eigenvectors().col(i));
      if (lex_less(ybest, cand)) ybest = cand;
    }
  }

  Vector ft = s1h * ybest;
  Vector f = ft.cwiseQuotient(sp);
  const double nf = std::sqrt((x.weights.values().array() * f.array().square()).sum());
  if (!(nf > 0.0) || nf <= 1e-14 * std::max(1.0, ft.norm()))
    throw DegenerateError("rank-1 program: leading score vector vanished");
  out.score = f / nf;
  out.eta = eta;
  return out;
}

Vector metric_normed(const Vector& raw, const Matrix& metric) {
  const double n2 = raw.dot(metric * raw);
  if (!(n2 > 0.0))
    throw DegenerateError("rank-1 program: loading has zero metric norm");
  return raw / std::sqrt(n2);
}

}  // namespace

Rank1Solution solve_rank1(const Matrix& z, const DataBlock& xblock,
                          const DataBlock& yblock) {
  check_shapes(z, xblock, yblock);
  const WeightVector& p = xblock.weights;
  const WeightVector& q = yblock.weights;

  Rank1Solution sol;
  // Solve the smaller of the two composed eigenproblems, recover the partner
  // score through the coupled first-order equations.
  if (z.rows() <= z.cols()) {
    SideSolve s = solve_side(z, xblock, yblock);
    sol.f = s.score;
    sol.eta = s.eta;
    sol.degenerate_tie = s.tie;
    Vector graw = r_operator(yblock) *
                  (q.values().asDiagonal() *
                   (z.transpose() * (p.values().asDiagonal() * sol.f)));
    const double ng = weighted_norm(graw, q);
    if (!(ng > 0.0)) throw DegenerateError("rank-1 program: object score vanished");
    sol.g = graw / ng;
  } else {
    SideSolve s = solve_side(z.transpose(), yblock, xblock);
    sol.g = s.score;
    sol.eta = s.eta;
    sol.degenerate_tie = s.tie;
    Vector fraw = r_operator(xblock) *
                  (p.values().asDiagonal() *
                   (z * (q.values().asDiagonal() * sol.g)));
    const double nf = weighted_norm(fraw, p);
    if (!(nf > 0.0)) throw DegenerateError("rank-1 program: subject score vanished");
    sol.f = fraw / nf;
  }

  // Deterministic signs: largest-magnitude subject coordinate positive, then
  // the object sign makes the criterion nonnegative.
  Index imax = 0;
  sol.f.cwiseAbs().maxCoeff(&imax);
  if (sol.f(imax) < 0) sol.f = -sol.f;
  const Vector pzq_g = z * (q.values().asDiagonal() * sol.g);
  if (weighted_inner(sol.f, pzq_g, p) < 0) sol.g = -sol.g;

  // Loadings from the stationarity conditions: u ~ X'PZQg, v ~ Y'QZ'Pf.
  const Matrix mx = metric_matrix(xblock);
  const Matrix ny = metric_matrix(yblock);
  sol.u = metric_normed(
      xblock.data.transpose() * (p.values().asDiagonal() * (z * (q.values().asDiagonal() * sol.g))),
      mx);
  sol.v = metric_normed(
      yblock.data.transpose() * (q.values().asDiagonal() * (z.transpose() * (p.values().asDiagonal() * sol.f))),
      ny);
  Vector f0 = xblock.data * (mx * sol.u);
  Vector g0 = yblock.data * (ny * sol.v);
  if (weighted_inner(f0, sol.f, p) < 0) {
    sol.u = -sol.u;
    f0 = -f0;
  }
  if (weighted_inner(g0, sol.g, q) < 0) {
    sol.v = -sol.v;
    g0 = -g0;
  }
  sol.strength_x = weighted_norm(f0, p);
  sol.strength_y = weighted_norm(g0, q);
  sol.criterion = std::sqrt(sol.eta);
  return sol;
}

std::vector<std::pair<double, Vector>> composed_spectrum(
    const Matrix& z, const DataBlock& xblock, const DataBlock& yblock) {
  check_shapes(z, xblock, yblock);
  const bool subject_side = z.rows() <= z.cols();
  const DataBlock& a = subject_side ? xblock : yblock;
  const DataBlock& b = subject_side ? yblock : xblock;
  const Matrix za = subject_side ? z : Matrix(z.transpose());

  const Vector sp = a.weights.sqrt();
  const Matrix ra = r_operator(a);
  const Matrix rb = r_operator(b);
  const Matrix zq = za * b.weights.values().asDiagonal();
  const Matrix s1 = sp.asDiagonal() * ra * sp.asDiagonal();
  const Matrix s2 = sp.asDiagonal() * (zq * rb * zq.transpose()) * sp.asDiagonal();
  const Matrix s1h = psd_sqrt(s1);
  Matrix c = s1h * s2 * s1h;
  c = 0.5 * (c + c.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  const Vector& lam = es.eigenvalues();
  const double top = lam.maxCoeff();
  std::vector<std::pair<double, Vector>> out;
  if (!(top > 0.0)) return out;
  const auto Pd = xblock.weights.values().asDiagonal();
  const auto Qd = yblock.weights.values().asDiagonal();
  const Matrix rx = subject_side ? Matrix() : r_operator(xblock);
  for (Index i = lam.size() - 1; i >= 0; --i) {
    if (lam(i) <= 1e-12 * top) break;
    Vector ft = s1h * es.eigenvectors().col(i);
    Vector score = ft.cwiseQuotient(sp);
    double norm = weighted_norm(score, a.weights);
    if (norm <= 1e-14 * std::max(1.0, ft.norm())) continue;
    score /= norm;
    if (!subject_side) {
      // Solved on the object side; map back via f ~ R_X P Z Q g.
      Vector f = rx * (Pd * (z * (Qd * score)));
      const double nf = weighted_norm(f, xblock.weights);
      if (nf <= 0.0) continue;
      score = f / nf;
    }
    out.emplace_back(lam(i), std::move(score));
  }
  return out;
}

}  // namespace film
