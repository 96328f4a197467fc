// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "film/baselines.hpp"
#include "film/contingency.hpp"
#include "film/film_a.hpp"
#include "film/film_b.hpp"
#include "film/geometry.hpp"
#include "film/simulation.hpp"
#include "helpers.hpp"

using namespace film;
using testutil::gaussian;
using testutil::orthonormal_cols;
using testutil::random_weights;

namespace {

struct Harness {
  int failures = 0;
  std::vector<double> pythagoras_gaps;  // relative gaps of every fitted model

  void record_model(const InteractionModel& m) {
    if (m.z_norm2 <= 0.0) return;
    const double gap =
        std::abs(m.z_norm2 - m.omega.squaredNorm() - m.residual_norm2) /
        m.z_norm2;
    pythagoras_gaps.push_back(gap);
  }

  void run(int number, const std::string& label,
           const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s  %2d. %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number,
                label.c_str(), secs, detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++failures;
  }
};

std::vector<double> sorted_desc(const Vector& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

struct SimSummary {
  Vector mean_sorted_diag = Vector::Zero(3);
  double max_offdiag = 0.0;
  bool one_var_bundle_last = true;
  int cells = 0;
};

SimSummary run_zero_noise(Harness& h, bool structural, int replicates,
                          std::uint64_t seed) {
  BundleSpec spec;
  SimSummary s;
  for (int rep = 0; rep < replicates; ++rep) {
    GeneratedBlock xg =
        generate_blocks(spec, 50, mix_seed({seed, (std::uint64_t)rep, 0}));
    GeneratedBlock yg =
        generate_blocks(spec, 40, mix_seed({seed, (std::uint64_t)rep, 1}));
    InteractionBlock zb = generate_z(xg.factors, yg.factors, {0.49, 0.69, 0.53},
                                     0.0, mix_seed({seed, (std::uint64_t)rep, 2}));
    FitConfig cfg;
    cfg.n_ranks = 3;
    cfg.structural_strength = structural;
    InteractionModel m = film_a_fit(zb, xg.block, yg.block, cfg);
    h.record_model(m);

    const auto diag = sorted_desc(m.omega.diagonal());
    for (int i = 0; i < 3; ++i) s.mean_sorted_diag(i) += diag[(std::size_t)i];
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b)
        if (a != b) s.max_offdiag = std::max(s.max_offdiag, std::abs(m.omega(a, b)));

    // which planted factor pairs with the last rank
    const WeightVector up = WeightVector::uniform(50);
    const Matrix F = m.subject_basis.score_matrix();
    Index best_k = 0;
    double best = -1.0;
    for (Index k = 0; k < 3; ++k) {
      const double rho =
          std::abs(weighted_inner(xg.factors.col(k), F.col(2), up));
      if (rho > best) {
        best = rho;
        best_k = k;
      }
    }
    if (best_k != 2) s.one_var_bundle_last = false;
    ++s.cells;
  }
  s.mean_sorted_diag /= s.cells;
  return s;
}

}  // namespace

int main() {
  Harness h;

  h.run(1, "zero-noise recovery, structural regime off", [&](std::string& d) {
    SimSummary s = run_zero_noise(h, false, 24, 1001);
    const double targets[3] = {0.691, 0.531, 0.491};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mean diag (%.3f, %.3f, %.3f), max |offdiag| %.1e",
                  s.mean_sorted_diag(0), s.mean_sorted_diag(1),
                  s.mean_sorted_diag(2), s.max_offdiag);
    d = buf;
    for (int i = 0; i < 3; ++i)
      if (std::abs(s.mean_sorted_diag(i) - targets[i]) > 0.05) return false;
    return s.max_offdiag < 5e-3;
  });

  h.run(2, "zero-noise recovery, structural regime on", [&](std::string& d) {
    SimSummary s = run_zero_noise(h, true, 24, 2002);
    // paper values sorted by size; extraction order of the two leading
    // bundles is a near-tie, the anchored condition is the relegated
    // one-variable bundle
    const double targets[3] = {0.618, 0.460, 0.449};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mean sorted diag (%.3f, %.3f, %.3f), 1-var bundle last: %s",
                  s.mean_sorted_diag(0), s.mean_sorted_diag(1),
                  s.mean_sorted_diag(2), s.one_var_bundle_last ? "yes" : "no");
    d = buf;
    for (int i = 0; i < 3; ++i)
      if (std::abs(s.mean_sorted_diag(i) - targets[i]) > 0.08) return false;
    return s.one_var_bundle_last;
  });

  h.run(3, "rank-1 solver matches the randomized oracle on 100 instances",
        [&](std::string& d) {
          std::mt19937_64 rng(3003);
          double worst_rel = 0.0;
          for (int i = 0; i < 100; ++i) {
            const Index n = 4 + (Index)(rng() % 5), p = 4 + (Index)(rng() % 5);
            const Index J = 2 + (Index)(rng() % 3), K = 2 + (Index)(rng() % 3);
            WeightVector pw = random_weights(n, rng);
            WeightVector qw = random_weights(p, rng);
            const Metric metric = i % 3 == 0 ? Metric::inverse_covariance()
                                             : Metric::identity();
            DataBlock x(gaussian(n, J, rng), pw, metric);
            DataBlock y(gaussian(p, K, rng), qw, metric);
            InteractionBlock zb(gaussian(n, p, rng), pw, qw);
            Rank1Solution s = solve_rank1(zb.z, x, y);
            BruteForceResult bf = brute_force_rank1(zb, x, y, 300, 7000 + i);
            if (s.criterion < bf.value - 1e-6) {
              d = "solver fell below the oracle bound";
              return false;
            }
            worst_rel = std::max(worst_rel,
                                 std::abs(s.criterion - bf.value) /
                                     std::max(1e-300, s.criterion));
          }
          char buf[80];
          std::snprintf(buf, sizeof(buf), "worst relative gap %.2e", worst_rel);
          d = buf;
          return worst_rel <= 1e-4;
        });

  h.run(4, "row/column centring equivalence on 50 instances", [&](std::string& d) {
    std::mt19937_64 rng(4004);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Index n = 7 + (Index)(rng() % 3), p = 6 + (Index)(rng() % 3);
      WeightVector pw = random_weights(n, rng), qw = random_weights(p, rng);
      const bool structural = i % 2 == 1;
      const Metric metric = structural ? Metric::identity()
                                       : Metric::inverse_covariance();
      DataBlock x = standardize(DataBlock(gaussian(n, 4, rng), pw, metric));
      DataBlock y = standardize(DataBlock(gaussian(p, 3, rng), qw, metric));
      InteractionBlock zb(gaussian(n, p, rng), pw, qw);
      FitConfig cfg;
      cfg.n_ranks = 2;
      cfg.structural_strength = structural;
      InteractionModel a = film_a_fit(zb, x, y, cfg);
      InteractionModel b = film_a_fit(double_center(zb), x, y, cfg);
      h.record_model(a);
      worst = std::max(worst, (a.omega - b.omega).cwiseAbs().maxCoeff());
      worst = std::max(worst, (a.subject_basis.score_matrix() -
                               b.subject_basis.score_matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
      worst = std::max(worst, (a.object_basis.score_matrix() -
                               b.object_basis.score_matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst delta %.2e", worst);
    d = buf;
    return worst < 1e-9;
  });

  h.run(5, "no cross terms under subspace metrics; ordination subspace match",
        [&](std::string& d) {
          std::mt19937_64 rng(5005);
          double worst_cross = 0.0, worst_angle_gap = 0.0;
          for (int i = 0; i < 50; ++i) {
            const Index n = 8 + (Index)(rng() % 3), p = 7 + (Index)(rng() % 3);
            WeightVector pw = random_weights(n, rng), qw = random_weights(p, rng);
            DataBlock x = standardize(DataBlock(gaussian(n, 4, rng), pw,
                                                Metric::inverse_covariance()));
            DataBlock y = standardize(DataBlock(gaussian(p, 3, rng), qw,
                                                Metric::inverse_covariance()));
            InteractionBlock zb(gaussian(n, p, rng), pw, qw);
            FitConfig cfg;
            cfg.n_ranks = 3;
            InteractionModel m = film_a_fit(zb, x, y, cfg);
            h.record_model(m);
            for (Index s = 0; s < 3; ++s)
              for (Index t = 0; t < 3; ++t)
                if (s != t)
                  worst_cross = std::max(worst_cross, std::abs(m.omega(s, t)));
            TripletSet ts = rlq_triplets(double_center(zb), x, y);
            if (ts.triplets.size() < 3) {
              d = "ordination returned fewer than three triplets";
              return false;
            }
            const Vector sp = pw.sqrt();
            Matrix a(n, 3), b(n, 3);
            for (Index t = 0; t < 3; ++t) {
              a.col(t) = sp.asDiagonal() * m.subject_basis.components[(std::size_t)t].scores;
              b.col(t) = sp.asDiagonal() * ts.triplets[(std::size_t)t].f;
            }
            Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
            // principal angle below 1e-6 radians: 1 - cos > ~5e-13
            worst_angle_gap = std::max(worst_angle_gap,
                                       1.0 - svd.singularValues().minCoeff());
          }
          char buf[96];
          std::snprintf(buf, sizeof(buf), "worst cross %.1e, worst 1-cos %.1e",
                        worst_cross, worst_angle_gap);
          d = buf;
          return worst_cross < 1e-8 && worst_angle_gap < 5e-13;
        });

  h.run(6, "orthonormal-expansion Pythagoras on every fitted model",
        [&](std::string& d) {
          double worst = 0.0;
          for (double gap : h.pythagoras_gaps) worst = std::max(worst, gap);
          char buf[96];
          std::snprintf(buf, sizeof(buf), "%zu models, worst relative gap %.1e",
                        h.pythagoras_gaps.size(), worst);
          d = buf;
          return !h.pythagoras_gaps.empty() && worst <= 1e-8;
        });

  h.run(7, "classical reductions: weighted PCA and inter-battery directions",
        [&](std::string& d) {
          std::mt19937_64 rng(7007);
          double worst = 0.0;
          for (int i = 0; i < 20; ++i) {
            const Index n = 5 + (Index)(rng() % 3), p = 4 + (Index)(rng() % 3);
            WeightVector pw = random_weights(n, rng), qw = random_weights(p, rng);
            Matrix z = gaussian(n, p, rng);
            TripletSet ts = pca_special_case(InteractionBlock(z, pw, qw));
            const Vector sp = pw.sqrt();
            Matrix sym = sp.asDiagonal() * z * qw.values().asDiagonal() *
                         z.transpose() * sp.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
            for (std::size_t t = 0; t < ts.triplets.size(); ++t) {
              const Index k = es.eigenvalues().size() - 1 - (Index)t;
              Vector score = es.eigenvectors().col(k).cwiseQuotient(sp);
              score /= weighted_norm(score, pw);
              worst = std::max(worst,
                               testutil::sign_free_delta(ts.triplets[t].f, score));
            }
            // two-group program with identity metrics
            WeightVector w = random_weights(n, rng);
            Matrix xd = gaussian(n, 3, rng), yd = gaussian(n, 2, rng);
            TwoGroupSolution s =
                two_group_solve(DataBlock(xd, w, Metric::identity()),
                                DataBlock(yd, w, Metric::identity()));
            Eigen::JacobiSVD<Matrix> svd(
                xd.transpose() * w.values().asDiagonal() * yd,
                Eigen::ComputeFullU | Eigen::ComputeFullV);
            Vector f_svd = xd * svd.matrixU().col(0);
            f_svd /= weighted_norm(f_svd, w);
            Vector g_svd = yd * svd.matrixV().col(0);
            g_svd /= weighted_norm(g_svd, w);
            worst = std::max(worst, testutil::sign_free_delta(s.f, f_svd));
            worst = std::max(worst, testutil::sign_free_delta(s.g, g_svd));
          }
          char buf[64];
          std::snprintf(buf, sizeof(buf), "worst delta %.1e", worst);
          d = buf;
          return worst < 1e-8;
        });

  h.run(8, "mean-square contingency and planted dependence recovery",
        [&](std::string& d) {
          std::mt19937_64 rng(8008);
          std::uniform_real_distribution<double> u(0.2, 2.0);
          double worst_phi = 0.0;
          for (int i = 0; i < 20; ++i) {
            const Index n = 4 + (Index)(rng() % 3), p = 3 + (Index)(rng() % 3);
            Matrix counts(n, p);
            for (Index a = 0; a < n; ++a)
              for (Index b = 0; b < p; ++b) counts(a, b) = u(rng);
            ContingencyTable ct = ContingencyTable::from_counts(counts);
            PhiTable pt = build_phi(ct);
            double chi = 0.0;
            for (Index a = 0; a < n; ++a)
              for (Index b = 0; b < p; ++b) {
                const double e = ct.row_margins(a) * ct.col_margins(b);
                chi += (ct.freq(a, b) - e) * (ct.freq(a, b) - e) / e;
              }
            worst_phi = std::max(worst_phi, std::abs(pt.phi2 - chi));
          }

          // planted dependence
          const Index n = 6, m = 5;
          Vector fi(n), fm(m);
          for (Index i = 0; i < n; ++i) fi(i) = u(rng);
          for (Index j = 0; j < m; ++j) fm(j) = u(rng);
          fi /= fi.sum();
          fm /= fm.sum();
          WeightVector p(fi), q(fm);
          Vector f0 = gaussian(n, 1, rng);
          f0.array() -= p.values().dot(f0);
          f0 /= weighted_norm(f0, p);
          Vector g0 = gaussian(m, 1, rng);
          g0.array() -= q.values().dot(g0);
          g0 /= weighted_norm(g0, q);
          Matrix freq = fi * fm.transpose();
          freq.array() *= (1.0 + 0.04 * (f0 * g0.transpose()).array());
          ContingencyTable ct = ContingencyTable::from_counts(freq);
          Matrix xraw(n, 2), yraw(m, 2);
          xraw.col(0) = f0;
          xraw.col(1) = gaussian(n, 1, rng);
          yraw.col(0) = g0;
          yraw.col(1) = gaussian(m, 1, rng);
          FitConfig cfg;
          cfg.n_ranks = 1;
          InteractionModel model = film_contingency(ct, xraw, yraw, cfg);
          h.record_model(model);
          const double omega_gap = std::abs(std::abs(model.omega(0, 0)) - 0.04);
          const double f_gap = testutil::sign_free_delta(
              model.subject_basis.components[0].scores, f0);
          char buf[112];
          std::snprintf(buf, sizeof(buf),
                        "worst |phi2 - chi2| %.1e, omega gap %.1e, f gap %.1e",
                        worst_phi, omega_gap, f_gap);
          d = buf;
          return worst_phi < 1e-10 && omega_gap < 1e-6 && f_gap < 1e-6;
        });

  h.run(9, "margin and shared-component fits recover planted coefficients",
        [&](std::string& d) {
          std::mt19937_64 rng(9009);
          double worst = 0.0;
          {  // separate-margins fixture
            const Index n = 14, m = 11;
            WeightVector p = random_weights(n, rng), q = random_weights(m, rng);
            DataBlock x(orthonormal_cols(n, 3, p, rng), p,
                        Metric::inverse_covariance(), true);
            DataBlock y(orthonormal_cols(m, 2, q, rng), q,
                        Metric::inverse_covariance(), true);
            Vector f = x.data * Vector{{0.6, -0.8, 0.0}};
            f /= weighted_norm(f, p);
            Vector g = y.data * Vector{{1.0, 0.5}};
            g /= weighted_norm(g, q);
            Matrix z = 0.5 * f * Eigen::RowVectorXd::Ones(m) +
                       0.7 * Vector::Ones(n) * g.transpose() +
                       0.9 * f * g.transpose();
            FitConfig cfg;
            cfg.n_ranks = 1;
            B1Model b = film_b1_fit(InteractionBlock(z, p, q), x, y, cfg);
            worst = std::max(worst,
                             std::abs(b.subject_margin_model.coefficients(0) - 0.5));
            worst = std::max(worst,
                             std::abs(b.object_margin_model.coefficients(0) - 0.7));
            worst = std::max(
                worst, std::abs(std::abs(b.interaction_model->omega(0, 0)) - 0.9));
          }
          {  // shared-component rank-1 fixture
            const Index n = 12, m = 10;
            WeightVector p = random_weights(n, rng), q = random_weights(m, rng);
            DataBlock x(orthonormal_cols(n, 4, p, rng), p,
                        Metric::inverse_covariance(), true);
            DataBlock y(orthonormal_cols(m, 3, q, rng), q,
                        Metric::inverse_covariance(), true);
            Vector f0 = x.data * gaussian(4, 1, rng);
            f0 /= weighted_norm(f0, p);
            Vector g0 = y.data * gaussian(3, 1, rng);
            g0 /= weighted_norm(g0, q);
            Matrix z = Matrix::Constant(n, m, 2.5) +
                       0.5 * f0 * Eigen::RowVectorXd::Ones(m) +
                       0.7 * Vector::Ones(n) * g0.transpose() +
                       0.9 * f0 * g0.transpose();
            FitConfig cfg;
            cfg.n_ranks = 1;
            B2Model b = film_b2_fit(InteractionBlock(z, p, q), x, y, cfg);
            const double sf =
                weighted_inner(b.subject_basis.components[0].scores, f0, p) > 0
                    ? 1.0
                    : -1.0;
            const double sg =
                weighted_inner(b.object_basis.components[0].scores, g0, q) > 0
                    ? 1.0
                    : -1.0;
            worst = std::max(worst, std::abs(sf * b.subject_effects(0) - 0.5));
            worst = std::max(worst, std::abs(sg * b.object_effects(0) - 0.7));
            worst = std::max(worst, std::abs(sf * sg * b.interaction(0, 0) - 0.9));
          }
          {  // shared-component rank-2 fixture with cross terms
            const Index n = 14, m = 11;
            WeightVector p = random_weights(n, rng), q = random_weights(m, rng);
            DataBlock x(orthonormal_cols(n, 4, p, rng), p,
                        Metric::inverse_covariance(), true);
            DataBlock y(orthonormal_cols(m, 3, q, rng), q,
                        Metric::inverse_covariance(), true);
            const Vector f1 = x.data.col(0), f2 = x.data.col(1);
            const Vector g1 = y.data.col(0), g2 = y.data.col(1);
            const double b1 = 0.5, d11 = 0.9, d21 = 0.1, d12 = 0.15, d22 = 0.6,
                         c1 = 0.7;
            const double b2v = -d11 * d21 / b1, c2v = -d11 * d12 / c1;
            Matrix z = Matrix::Constant(n, m, 3.0);
            z += b1 * f1 * Eigen::RowVectorXd::Ones(m) +
                 b2v * f2 * Eigen::RowVectorXd::Ones(m) +
                 c1 * Vector::Ones(n) * g1.transpose() +
                 c2v * Vector::Ones(n) * g2.transpose() +
                 d11 * f1 * g1.transpose() + d12 * f1 * g2.transpose() +
                 d21 * f2 * g1.transpose() + d22 * f2 * g2.transpose();
            FitConfig cfg;
            cfg.n_ranks = 2;
            B2Model b = film_b2_fit(InteractionBlock(z, p, q), x, y, cfg);
            if (b.subject_basis.count() != 2) {
              d = "rank-2 shared fit truncated unexpectedly";
              return false;
            }
            auto sgn = [](double v) { return v >= 0 ? 1.0 : -1.0; };
            const double s1 =
                sgn(weighted_inner(b.subject_basis.components[0].scores, f1, p));
            const double s2 =
                sgn(weighted_inner(b.subject_basis.components[1].scores, f2, p));
            const double r1 =
                sgn(weighted_inner(b.object_basis.components[0].scores, g1, q));
            const double r2 =
                sgn(weighted_inner(b.object_basis.components[1].scores, g2, q));
            const double expect[8] = {b1, b2v, c1, c2v, d11, d12, d21, d22};
            const double got[8] = {s1 * b.subject_effects(0),
                                   s2 * b.subject_effects(1),
                                   r1 * b.object_effects(0),
                                   r2 * b.object_effects(1),
                                   s1 * r1 * b.interaction(0, 0),
                                   s1 * r2 * b.interaction(0, 1),
                                   s2 * r1 * b.interaction(1, 0),
                                   s2 * r2 * b.interaction(1, 1)};
            for (int i = 0; i < 8; ++i)
              worst = std::max(worst, std::abs(got[i] - expect[i]));
          }
          char buf[64];
          std::snprintf(buf, sizeof(buf), "worst coefficient gap %.1e", worst);
          d = buf;
          return worst < 1e-5;
        });

  h.run(10, "inner-loop convergence within 50 iterations up to 50% noise",
        [&](std::string& d) {
          BundleSpec spec;
          SimConfig cfg;
          cfg.n_replicates = 12;
          cfg.noise_fractions = {0.0, 0.25, 0.5};
          cfg.seed = 1010;
          SimResult r = run_experiment(spec, cfg);
          int total = 0, good = 0, worst_it = 0;
          for (const CellResult& cell : r.cells) {
            ++total;
            if (!cell.ok()) continue;
            int max_it = 0;
            for (int it : cell.iterations) max_it = std::max(max_it, it);
            worst_it = std::max(worst_it, max_it);
            if (max_it <= 50) ++good;
          }
          char buf[96];
          std::snprintf(buf, sizeof(buf), "%d/%d cells converged, worst %d "
                        "iterations", good, total, worst_it);
          d = buf;
          return total > 0 && static_cast<double>(good) / total >= 0.99;
        });

  std::printf("%s: %d criterion(s) failed\n", h.failures == 0 ? "OK" : "FAILED",
              h.failures);
  return h.failures;
}
