#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dclbm/edgelist.hpp"
#include "dclbm/spectral.hpp"
#include "dclbm/synth.hpp"
#include "dclbm/vem.hpp"

namespace dclbm {

enum class InitMode { spectral, random, given };

struct RunSpec {
  int k = 2;
  int l = 2;
  InitMode init = InitMode::spectral;
  std::uint64_t seed = 0;
  FitConfig fit;
  SpectralConfig spectral;  // seed is derived from `seed`
  int restarts = 1;
  std::filesystem::path out_dir;  // empty: do not write files
  std::filesystem::path given_qz;
  std::filesystem::path given_qw;
};

struct RunOutput {
  FitResult result;
  int winning_restart = 0;
  double best_objective = 0.0;
};

// Uniformly random hard labels, one-hot encoded with smoothing.
Posteriors random_init(Index m, Index n, int k, int l, std::uint64_t seed, double smoothing);

// Fit with restarts (restart 0 honors spec.init; later restarts are random
// since the spectral initializer is deterministic) and keep the run with the
// highest final objective. Writes labels/posteriors/params/trace and the id
// maps when spec.out_dir is set.
RunOutput run_fit(const BipartiteGraph& g, const std::vector<std::string>& row_ids,
                  const std::vector<std::string>& col_ids, const RunSpec& spec);

struct HarnessDesign {
  std::vector<double> r_grid{0.4, 0.6, 0.8, 1.0};
  int replicates = 20;
  bool degree_corrected = true;  // false: theta = lambda = 1 (classical truth)
  std::uint64_t seed = 0;
  FitConfig fit;
};

struct HarnessRow {
  std::string variant;
  double r = 0.0;
  int replicate = 0;
  std::string side;    // "row" | "col"
  std::string method;  // "dclbm" | "spectral"
  double ari = 0.0;
};

// Simulation-design sweep: per (r, replicate), sample a network, fit from
// spectral init, and record ARI for the fit and for the spectral baseline
// (same initialization, so the comparison is paired).
std::vector<HarnessRow> run_simulation_harness(const HarnessDesign& design);

void write_harness_csv(const std::filesystem::path& path, const std::vector<HarnessRow>& rows);

struct MovieLensOptions {
  std::filesystem::path ratings;  // u.data: user, item, rating, timestamp
  std::filesystem::path items;    // u.item-style pipe-separated genre flags
  int k = 3;
  int l = 4;
  std::uint64_t seed = 0;
  int restarts = 1;
  FitConfig fit;
  std::filesystem::path out_dir;  // empty: do not write files
};

struct MovieLensReport {
  Index users = 0;
  Index movies = 0;
  Count total_ones = 0;
  int single_category_movies = 0;
  double chi2_statistic = 0.0;
  int chi2_dof = 0;
  double p_value = 1.0;
  Eigen::MatrixXd contingency;          // movie clusters x kept categories
  std::vector<int> category_columns;    // original flag indices kept
  std::vector<int> user_cluster_sizes;  // length K
  std::vector<int> movie_cluster_sizes; // length L
  Eigen::MatrixXd rating_share;         // K x L, rows sum to 100
  std::vector<std::vector<Count>> user_degrees_by_cluster;
  std::vector<std::vector<Count>> movie_degrees_by_cluster;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Binary MovieLens workflow: ingest, fit, cross-tabulate estimated movie
// clusters against single-category genres, chi-square test, and summary
// plot data. Writes summary.json plus fit outputs when out_dir is set.
MovieLensReport run_movielens_analysis(const MovieLensOptions& opts);

}  // namespace dclbm
