// Command-line front end: CSV ingestion, the fit subcommands, report files,
// and the simulation experiment runner.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "film/baselines.hpp"
#include "film/contingency.hpp"
#include "film/csv.hpp"
#include "film/film_a.hpp"
#include "film/film_b.hpp"
#include "film/geometry.hpp"
#include "film/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct FitArgs {
  std::string x_path, y_path, z_path, table_path, px_path, qy_path;
  std::string out_dir = ".";
  int ranks = 1;
  double tol = 1e-9;
  int max_iter = 500;
  std::string structural = "off";
  std::string margin_regression = "pls1";
  bool renormalize_weights = false;
  bool drop_zero_margins = false;
  std::optional<std::uint64_t> seed;
};

film::FitConfig make_config(const FitArgs& a) {
  film::FitConfig cfg;
  cfg.n_ranks = a.ranks;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.structural_strength = a.structural == "on";
  cfg.seed = a.seed;
  cfg.margin_regression = a.margin_regression == "ols1"
                              ? film::MarginRegression::Ols1
                              : film::MarginRegression::Pls1;
  return cfg;
}

film::WeightVector load_weights(const std::string& path, film::Index n,
                                bool renormalize, const char* what) {
  if (path.empty()) return film::WeightVector::uniform(n);
  film::Vector w = film::read_weight_file(path);
  if (w.size() != n)
    throw film::DimensionError(std::string(what) + " weight file has " +
                               std::to_string(w.size()) + " entries, expected " +
                               std::to_string(n));
  return film::WeightVector(std::move(w), renormalize);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw film::ParseError(path.string() + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

json manifest_base(const std::string& command, const FitArgs& a) {
  json inputs;
  if (!a.x_path.empty()) inputs["x"] = a.x_path;
  if (!a.y_path.empty()) inputs["y"] = a.y_path;
  if (!a.z_path.empty()) inputs["z"] = a.z_path;
  if (!a.table_path.empty()) inputs["table"] = a.table_path;
  if (!a.px_path.empty()) inputs["px"] = a.px_path;
  if (!a.qy_path.empty()) inputs["qy"] = a.qy_path;
  json config{{"ranks", a.ranks},
              {"tol", a.tol},
              {"max_iter", a.max_iter},
              {"structural", a.structural},
              {"margin_regression", a.margin_regression},
              {"renormalize_weights", a.renormalize_weights},
              {"drop_zero_margins", a.drop_zero_margins}};
  json m{{"command", command},
         {"inputs", inputs},
         {"config", config},
         {"version", kVersion},
         {"timestamp_utc", iso_timestamp()}};
  if (a.seed) m["seed"] = *a.seed;
  else m["seed"] = nullptr;
  return m;
}

json to_json(const film::Matrix& m) {
  json rows = json::array();
  for (film::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (film::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const film::Vector& v) {
  json out = json::array();
  for (film::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// Long-format component file: composite row id "<side>:<kind>:r<rank>:<name>"
// and a single numeric value column, so the file round-trips through
// read_table at full precision.
class ComponentWriter {
 public:
  void add(const std::string& side, const std::string& kind, int rank,
           const std::vector<std::string>& names, const film::Vector& values) {
    for (film::Index i = 0; i < values.size(); ++i) {
      ids_.push_back(side + ":" + kind + ":r" + std::to_string(rank) + ":" +
                     names[static_cast<std::size_t>(i)]);
      values_.push_back(values(i));
    }
  }

  void add_basis(const std::string& side, const film::ComponentBasis& basis,
                 const std::vector<std::string>& score_names,
                 const std::vector<std::string>& loading_names) {
    for (const auto& c : basis.components) {
      add(side, "score", c.rank, score_names, c.scores);
      if (c.loading.size() == static_cast<film::Index>(loading_names.size()))
        add(side, "loading", c.rank, loading_names, c.loading);
    }
  }

  void write(const fs::path& path) const {
    film::Table t;
    t.id_label = "component";
    t.columns = {"value"};
    t.row_ids = ids_;
    t.values.resize(static_cast<film::Index>(values_.size()), 1);
    for (std::size_t i = 0; i < values_.size(); ++i)
      t.values(static_cast<film::Index>(i), 0) = values_[i];
    film::write_table(path, t);
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

void write_omega_csv(const fs::path& path, const film::Matrix& omega) {
  film::Table t;
  t.id_label = "component";
  for (film::Index j = 0; j < omega.cols(); ++j)
    t.columns.push_back("g" + std::to_string(j + 1));
  for (film::Index i = 0; i < omega.rows(); ++i)
    t.row_ids.push_back("f" + std::to_string(i + 1));
  t.values = omega;
  film::write_table(path, t);
}

json model_diagnostics(const film::InteractionModel& model) {
  return json{{"r2", model.r2},
              {"z_norm2", model.z_norm2},
              {"residual_norm2", model.residual_norm2},
              {"residual_share",
               model.z_norm2 > 0 ? model.residual_norm2 / model.z_norm2 : 1.0},
              {"omega", to_json(model.omega)},
              {"term_shares", to_json(model.term_contributions)},
              {"subject_variance_shares", model.subject_variance_shares},
              {"object_variance_shares", model.object_variance_shares},
              {"iterations_per_rank", model.iterations_per_rank},
              {"truncated", model.truncated},
              {"degenerate_tie", model.degenerate_tie}};
}

struct LoadedFit {
  film::Table zt;
  film::InteractionBlock zb;
  film::DataBlock xb;
  film::DataBlock yb;
  std::vector<std::string> x_vars, y_vars;
};

LoadedFit load_fit_inputs(const FitArgs& a) {
  film::Table zt = film::read_table(a.z_path);
  film::Table xt = film::read_table(a.x_path);
  film::Table yt = film::read_table(a.y_path);
  film::WeightVector p =
      load_weights(a.px_path, zt.rows(), a.renormalize_weights, "subject");
  film::WeightVector q =
      load_weights(a.qy_path, zt.cols(), a.renormalize_weights, "object");
  if (xt.rows() != zt.rows())
    throw film::DimensionError("subject descriptors have " +
                               std::to_string(xt.rows()) + " rows, interaction "
                               "table has " + std::to_string(zt.rows()));
  if (yt.rows() != zt.cols())
    throw film::DimensionError("object descriptors have " +
                               std::to_string(yt.rows()) + " rows, interaction "
                               "table has " + std::to_string(zt.cols()) +
                               " columns");
  film::DataBlock xb =
      film::standardize(film::DataBlock(xt.values, p, film::Metric::identity()));
  film::DataBlock yb =
      film::standardize(film::DataBlock(yt.values, q, film::Metric::identity()));
  return LoadedFit{zt, film::InteractionBlock(zt.values, p, q), std::move(xb),
                   std::move(yb), xt.columns, yt.columns};
}

int cmd_fit_a(const FitArgs& a) {
  LoadedFit in = load_fit_inputs(a);
  const film::FitConfig cfg = make_config(a);
  film::InteractionModel model = film::film_a_fit(in.zb, in.xb, in.yb, cfg);

  fs::create_directories(a.out_dir);
  ComponentWriter cw;
  cw.add_basis("subject", model.subject_basis, in.zt.row_ids, in.x_vars);
  cw.add_basis("object", model.object_basis, in.zt.columns, in.y_vars);
  cw.write(fs::path(a.out_dir) / "components.csv");
  write_omega_csv(fs::path(a.out_dir) / "omega.csv", model.omega);
  write_json(fs::path(a.out_dir) / "diagnostics.json", model_diagnostics(model));
  json manifest = manifest_base("fit a", a);
  manifest["outputs"] = {"components.csv", "omega.csv", "diagnostics.json"};
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

int cmd_fit_rlq(const FitArgs& a) {
  LoadedFit in = load_fit_inputs(a);
  const bool structural = a.structural == "on";
  const film::Metric metric = structural ? film::Metric::identity()
                                         : film::Metric::inverse_covariance();
  film::DataBlock xb(in.xb.data, in.xb.weights, metric, true);
  film::DataBlock yb(in.yb.data, in.yb.weights, metric, true);
  film::TripletSet ts = film::rlq_triplets(in.zb, xb, yb);

  fs::create_directories(a.out_dir);
  ComponentWriter cw;
  json etas = json::array();
  int rank = 1;
  for (const auto& tr : ts.triplets) {
    cw.add("subject", "score", rank, in.zt.row_ids, tr.f);
    cw.add("object", "score", rank, in.zt.columns, tr.g);
    etas.push_back(tr.eta);
    ++rank;
  }
  cw.write(fs::path(a.out_dir) / "components.csv");
  write_json(fs::path(a.out_dir) / "diagnostics.json",
             json{{"eta", etas}, {"n_triplets", ts.triplets.size()}});
  json manifest = manifest_base("fit rlq", a);
  manifest["outputs"] = {"components.csv", "diagnostics.json"};
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

int cmd_fit_b1(const FitArgs& a) {
  LoadedFit in = load_fit_inputs(a);
  const film::FitConfig cfg = make_config(a);
  film::B1Model b = film::film_b1_fit(in.zb, in.xb, in.yb, cfg);

  fs::create_directories(a.out_dir);
  ComponentWriter cw;
  for (film::Index t = 0; t < b.subject_margin_model.components.cols(); ++t)
    cw.add("subject_margin", "score", static_cast<int>(t) + 1, in.zt.row_ids,
           b.subject_margin_model.components.col(t));
  for (film::Index t = 0; t < b.object_margin_model.components.cols(); ++t)
    cw.add("object_margin", "score", static_cast<int>(t) + 1, in.zt.columns,
           b.object_margin_model.components.col(t));
  json diag{{"grand_mean", b.margins.grand_mean},
            {"total_variance", b.total_variance},
            {"variance_table",
             {{"subject_margin_norm2", b.subject_margin_norm2},
              {"subject_margin_fit2", b.subject_margin_model.fit_norm2},
              {"subject_margin_residual2", b.subject_margin_model.residual_norm2},
              {"object_margin_norm2", b.object_margin_norm2},
              {"object_margin_fit2", b.object_margin_model.fit_norm2},
              {"object_margin_residual2", b.object_margin_model.residual_norm2},
              {"interaction_norm2", b.interaction_norm2},
              {"interaction_fit2", b.interaction_fit2},
              {"interaction_residual2", b.interaction_residual2}}},
            {"subject_margin_coefficients", to_json(b.subject_margin_model.coefficients)},
            {"object_margin_coefficients", to_json(b.object_margin_model.coefficients)},
            {"subject_margin_early_stop", b.subject_margin_model.early_stop},
            {"object_margin_early_stop", b.object_margin_model.early_stop}};
  if (b.interaction_model) {
    cw.add_basis("subject", b.interaction_model->subject_basis, in.zt.row_ids,
                 in.x_vars);
    cw.add_basis("object", b.interaction_model->object_basis, in.zt.columns,
                 in.y_vars);
    write_omega_csv(fs::path(a.out_dir) / "omega.csv",
                    b.interaction_model->omega);
    diag["interaction_model"] = model_diagnostics(*b.interaction_model);
    diag["subject_component_corr"] = to_json(b.subject_component_corr);
    diag["object_component_corr"] = to_json(b.object_component_corr);
  }
  cw.write(fs::path(a.out_dir) / "components.csv");
  write_json(fs::path(a.out_dir) / "diagnostics.json", diag);
  json manifest = manifest_base("fit b1", a);
  manifest["outputs"] = json::array({"components.csv", "diagnostics.json"});
  if (b.interaction_model) manifest["outputs"].push_back("omega.csv");
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

int cmd_fit_b2(const FitArgs& a) {
  LoadedFit in = load_fit_inputs(a);
  const film::FitConfig cfg = make_config(a);
  film::B2Model b = film::film_b2_fit(in.zb, in.xb, in.yb, cfg);

  fs::create_directories(a.out_dir);
  ComponentWriter cw;
  cw.add_basis("subject", b.subject_basis, in.zt.row_ids, in.x_vars);
  cw.add_basis("object", b.object_basis, in.zt.columns, in.y_vars);
  cw.write(fs::path(a.out_dir) / "components.csv");
  if (b.interaction.size() > 0)
    write_omega_csv(fs::path(a.out_dir) / "omega.csv", b.interaction);
  const double fitted2 = b.subject_effects.squaredNorm() +
                         b.object_effects.squaredNorm() +
                         b.interaction.squaredNorm();
  write_json(
      fs::path(a.out_dir) / "diagnostics.json",
      json{{"grand_mean", b.grand_mean},
           {"total_variance", b.total_variance},
           {"fitted_norm2", fitted2},
           {"residual_norm2", b.residual_norm2},
           {"r2", b.total_variance > 0 ? fitted2 / b.total_variance : 0.0},
           {"subject_effects", to_json(b.subject_effects)},
           {"object_effects", to_json(b.object_effects)},
           {"interaction", to_json(b.interaction)},
           {"iterations_per_rank", b.iterations_per_rank},
           {"truncated", b.truncated}});
  json manifest = manifest_base("fit b2", a);
  manifest["outputs"] = json::array({"components.csv", "diagnostics.json"});
  if (b.interaction.size() > 0) manifest["outputs"].push_back("omega.csv");
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

// Remove the listed rows from a descriptor table (used when zero-margin
// rows/columns of the contingency table were dropped).
void drop_table_rows(film::Table& t, const std::vector<film::Index>& rows,
                     const char* what) {
  if (rows.empty()) return;
  std::string listed;
  for (film::Index r : rows) {
    if (!listed.empty()) listed += ", ";
    listed += t.row_ids.size() > static_cast<std::size_t>(r)
                  ? t.row_ids[static_cast<std::size_t>(r)]
                  : std::to_string(r);
  }
  std::cerr << "warning: dropping zero-margin " << what << " " << listed
            << "\n";
  film::Matrix kept(t.values.rows() - static_cast<film::Index>(rows.size()),
                    t.values.cols());
  std::vector<std::string> kept_ids;
  film::Index out = 0;
  std::size_t next = 0;
  for (film::Index i = 0; i < t.values.rows(); ++i) {
    if (next < rows.size() && rows[next] == i) {
      ++next;
      continue;
    }
    kept.row(out++) = t.values.row(i);
    kept_ids.push_back(t.row_ids[static_cast<std::size_t>(i)]);
  }
  t.values = std::move(kept);
  t.row_ids = std::move(kept_ids);
}

int cmd_fit_contingency(const FitArgs& a) {
  film::Table tt = film::read_table(a.table_path);
  film::Table xt = film::read_table(a.x_path);
  film::Table yt = film::read_table(a.y_path);
  std::vector<film::Index> dropped_rows, dropped_cols;
  film::ContingencyTable ct = film::ContingencyTable::from_counts(
      tt.values, a.drop_zero_margins, &dropped_rows, &dropped_cols);
  if (!dropped_rows.empty()) {
    drop_table_rows(xt, dropped_rows, "subjects");
    std::vector<std::string> kept;
    std::size_t next = 0;
    for (std::size_t i = 0; i < tt.row_ids.size(); ++i) {
      if (next < dropped_rows.size() &&
          dropped_rows[next] == static_cast<film::Index>(i)) {
        ++next;
        continue;
      }
      kept.push_back(tt.row_ids[i]);
    }
    tt.row_ids = std::move(kept);
  }
  if (!dropped_cols.empty()) {
    drop_table_rows(yt, dropped_cols, "objects");
    std::vector<std::string> kept;
    std::size_t next = 0;
    for (std::size_t i = 0; i < tt.columns.size(); ++i) {
      if (next < dropped_cols.size() &&
          dropped_cols[next] == static_cast<film::Index>(i)) {
        ++next;
        continue;
      }
      kept.push_back(tt.columns[i]);
    }
    tt.columns = std::move(kept);
  }
  if (xt.rows() != ct.freq.rows() || yt.rows() != ct.freq.cols())
    throw film::DimensionError("descriptor row counts do not match the table");

  film::PhiTable pt = film::build_phi(ct);
  const film::FitConfig cfg = make_config(a);
  film::InteractionModel model =
      film::film_contingency(ct, xt.values, yt.values, cfg);

  fs::create_directories(a.out_dir);
  ComponentWriter cw;
  cw.add_basis("subject", model.subject_basis, tt.row_ids, xt.columns);
  cw.add_basis("object", model.object_basis, tt.columns, yt.columns);
  cw.write(fs::path(a.out_dir) / "components.csv");
  write_omega_csv(fs::path(a.out_dir) / "omega.csv", model.omega);
  json diag = model_diagnostics(model);
  diag["phi2"] = pt.phi2;
  diag["row_weights"] = to_json(pt.row_weights.values());
  diag["col_weights"] = to_json(pt.col_weights.values());
  write_json(fs::path(a.out_dir) / "diagnostics.json", diag);
  json manifest = manifest_base("fit contingency", a);
  manifest["outputs"] = {"components.csv", "omega.csv", "diagnostics.json"};
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

struct SimArgs {
  int replicates = 100;
  std::string noise_grid;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int n_subjects = 50;
  int n_objects = 40;
  double within_noise_sd = 0.1;
  double parasite_correlation = 0.99;
  int n_noise_cols = 5;
  std::vector<int> bundle_sizes;
  std::vector<double> weights;
};

int cmd_simulate(const SimArgs& a) {
  film::BundleSpec spec;
  if (!a.bundle_sizes.empty()) spec.sizes = a.bundle_sizes;
  spec.within_noise_sd = a.within_noise_sd;
  spec.parasite_correlation = a.parasite_correlation;
  spec.n_noise_cols = a.n_noise_cols;

  film::SimConfig cfg;
  cfg.n_subjects = a.n_subjects;
  cfg.n_objects = a.n_objects;
  cfg.n_replicates = a.replicates;
  cfg.seed = a.seed;
  if (!a.weights.empty()) cfg.interaction_weights = a.weights;
  if (!a.noise_grid.empty()) {
    cfg.noise_fractions.clear();
    std::stringstream ss(a.noise_grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        cfg.noise_fractions.push_back(v);
      } catch (const std::exception&) {
        throw film::ValidationError("cannot parse noise grid value '" + tok + "'");
      }
    }
  }

  film::SimResult result = film::run_experiment(spec, cfg);

  fs::create_directories(a.out_dir);
  {
    std::ofstream out(fs::path(a.out_dir) / "cells.csv");
    film::write_cells_csv(result, out);
  }
  {
    std::ofstream out(fs::path(a.out_dir) / "aggregates.csv");
    film::write_aggregates_csv(result, out);
  }
  json manifest{{"command", "simulate"},
                {"config",
                 {{"replicates", cfg.n_replicates},
                  {"noise_fractions", cfg.noise_fractions},
                  {"n_subjects", cfg.n_subjects},
                  {"n_objects", cfg.n_objects},
                  {"bundle_sizes", spec.sizes},
                  {"within_noise_sd", spec.within_noise_sd},
                  {"parasite_correlation", spec.parasite_correlation},
                  {"n_noise_cols", spec.n_noise_cols},
                  {"interaction_weights", cfg.interaction_weights}}},
                {"seed", cfg.seed},
                {"version", kVersion},
                {"timestamp_utc", iso_timestamp()},
                {"outputs", {"cells.csv", "aggregates.csv"}}};
  write_json(fs::path(a.out_dir) / "manifest.json", manifest);
  return 0;
}

void add_fit_options(CLI::App* sub, FitArgs& args, bool contingency) {
  if (contingency)
    sub->add_option("--table", args.table_path, "contingency table CSV (counts)")
        ->required();
  else
    sub->add_option("--z", args.z_path, "interaction table CSV")->required();
  sub->add_option("--x", args.x_path, "subject descriptor CSV")->required();
  sub->add_option("--y", args.y_path, "object descriptor CSV")->required();
  if (!contingency) {
    sub->add_option("--px", args.px_path, "subject weight file (one value per line)");
    sub->add_option("--qy", args.qy_path, "object weight file (one value per line)");
    sub->add_flag("--renormalize-weights", args.renormalize_weights,
                  "rescale weight files to sum to one");
  } else {
    sub->add_flag("--drop-zero-margins", args.drop_zero_margins,
                  "drop all-zero rows/columns instead of rejecting the table");
  }
  sub->add_option("--ranks", args.ranks, "number of component pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tol", args.tol, "component convergence threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-iter", args.max_iter, "iteration budget per rank")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--structural", args.structural,
                  "structural-strength regime (metric choice)")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--out", args.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seed", args.seed, "fallback initialisation seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PLS-FILM: factor interaction linear modelling of a subjects x "
               "objects table from descriptor blocks"};
  app.require_subcommand(1);

  FitArgs fit_args[5];
  SimArgs sim_args;

  CLI::App* fit = app.add_subcommand("fit", "fit an interaction model");
  fit->require_subcommand(1);
  CLI::App* fit_a = fit->add_subcommand("a", "interaction-only model on a centred table");
  add_fit_options(fit_a, fit_args[0], false);
  CLI::App* fit_b1 = fit->add_subcommand("b1", "separate margin and interaction models");
  add_fit_options(fit_b1, fit_args[1], false);
  fit_b1->add_option("--margin-regression", fit_args[1].margin_regression,
                     "margin model family")
      ->check(CLI::IsMember({"pls1", "ols1"}))
      ->capture_default_str();
  CLI::App* fit_b2 = fit->add_subcommand("b2", "shared-component margin and interaction model");
  add_fit_options(fit_b2, fit_args[2], false);
  CLI::App* fit_ct = fit->add_subcommand("contingency", "dependence model of a contingency table");
  add_fit_options(fit_ct, fit_args[3], true);
  CLI::App* fit_rlq = fit->add_subcommand("rlq", "three-table ordination triplets");
  add_fit_options(fit_rlq, fit_args[4], false);

  CLI::App* sim = app.add_subcommand("simulate", "orthogonal-bundle recovery experiment");
  sim->add_option("--replicates", sim_args.replicates)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--noise-grid", sim_args.noise_grid,
                  "comma-separated noise fractions in [0,1]");
  sim->add_option("--seed", sim_args.seed)->capture_default_str();
  sim->add_option("--out", sim_args.out_dir)->capture_default_str();
  sim->add_option("--n-subjects", sim_args.n_subjects)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--n-objects", sim_args.n_objects)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--within-noise-sd", sim_args.within_noise_sd)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--parasite-correlation", sim_args.parasite_correlation)->capture_default_str();
  sim->add_option("--noise-cols", sim_args.n_noise_cols)->check(CLI::NonNegativeNumber)->capture_default_str();
  sim->add_option("--bundle-sizes", sim_args.bundle_sizes,
                  "variables per bundle, last bundle is the parasite");
  sim->add_option("--weights", sim_args.weights, "planted interaction weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (fit_a->parsed()) return cmd_fit_a(fit_args[0]);
    if (fit_b1->parsed()) return cmd_fit_b1(fit_args[1]);
    if (fit_b2->parsed()) return cmd_fit_b2(fit_args[2]);
    if (fit_ct->parsed()) return cmd_fit_contingency(fit_args[3]);
    if (fit_rlq->parsed()) return cmd_fit_rlq(fit_args[4]);
    if (sim->parsed()) return cmd_simulate(sim_args);
  } catch (const film::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const film::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const film::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const film::DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const film::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
