#pragma once

#include <Eigen/Core>

#include <vector>

#include "dclbm/bigraph.hpp"
#include "dclbm/model.hpp"

namespace dclbm {

struct FitConfig {
  int max_iter = 200;
  double tol = 1e-8;       // relative change of the objective
  double min_pi = 1e-10;   // floor for pi/rho before renormalization
  double mu_lo = kMuClampLo;
  double mu_hi = kMuClampHi;
  bool track_trace = true;
};

struct FitDiagnostics {
  int empty_soft_blocks = 0;          // mu denominators that hit zero
  std::vector<int> emptied_row_clusters;  // clusters whose mass fell below min_pi
  std::vector<int> emptied_col_clusters;
};

struct FitResult {
  Posteriors posteriors;
  BlockParams params;  // theta/lambda are the scaled degrees, fixed
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  FitDiagnostics diagnostics;
};

// J(q^z, q^w, Phi): the full variational objective, including the
// sum_ij A_ij (log theta_i + log lambda_j) term and both entropies,
// under the 0 log 0 = 0 convention.
double objective_full(const BipartiteGraph& g, const Posteriors& p, const BlockParams& params);

// J-hat: same objective with theta/lambda fixed at the scaled degrees and
// the sum_ij A_ij (log theta_i + log lambda_j) constant dropped.
double objective_hat(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& pi,
                     const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu);
double objective_hat(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& pi,
                     const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu,
                     const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat);

struct MStepResult {
  Eigen::VectorXd pi;
  Eigen::VectorXd rho;
  Eigen::MatrixXd mu;
  int empty_soft_blocks = 0;
  std::vector<int> emptied_row_clusters;
  std::vector<int> emptied_col_clusters;
};

// Closed-form M step: pi/rho are posterior means floored at min_pi and
// renormalized; mu_kl = sum A q q / sum theta lambda q q, clamped.
MStepResult m_step(const BipartiteGraph& g, const Posteriors& p, const FitConfig& cfg);
MStepResult m_step(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& theta_hat,
                   const Eigen::VectorXd& lambda_hat, const FitConfig& cfg);

// Factorized E step for rows: qz_ik proportional to exp(g1(k)), normalized
// per row by log-sum-exp. Each row costs O(d_i^r L + K L).
Eigen::MatrixXd e_step_rows(const BipartiteGraph& g, const Eigen::MatrixXd& qw,
                            const Eigen::VectorXd& pi, const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat);

// Mirror for columns.
Eigen::MatrixXd e_step_cols(const BipartiteGraph& g, const Eigen::MatrixXd& qz,
                            const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat);

// Full driver: theta/lambda fixed once from the degrees, then M step and E
// step (rows, then columns) until the relative change of J-hat drops below
// tol or max_iter is reached.
FitResult fit(const BipartiteGraph& g, int k, int l, const Posteriors& init,
              const FitConfig& cfg);

}  // namespace dclbm
