#pragma once

#include <Eigen/Core>

#include <vector>

#include "dclbm/model.hpp"

namespace dclbm {

// R_kk' = (1/m) sum_i p_ik pt_ik'. With one-hot inputs this is the classical
// normalized confusion matrix; entries sum to 1 for row-stochastic inputs.
Eigen::MatrixXd soft_confusion(const Eigen::MatrixXd& p, const Eigen::MatrixXd& pt);

// d(p, pt) = 1 - Tr(R(p, pt)); requires equal cluster counts.
double partition_distance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& pt);

// Triple distance: d(qz, qz') + d(qw, qw') + sum |mu - mu'|.
double triple_distance(const Eigen::MatrixXd& qz, const Eigen::MatrixXd& qw,
                       const Eigen::MatrixXd& mu, const Eigen::MatrixXd& qz2,
                       const Eigen::MatrixXd& qw2, const Eigen::MatrixXd& mu2);

// Poisson KL divergence a log(a/b) - (a - b); requires a, b > 0.
double kl_poisson(double a, double b);

// Separation functional: confusion-weighted sum of Poisson KL terms between
// the true block means mu_star and a candidate mu. Zero exactly on the
// permutation-equivalence class of the truth.
double separation_G(const Labels& z_true, const Labels& w_true, const Eigen::MatrixXd& qz,
                    const Eigen::MatrixXd& qw, const Eigen::MatrixXd& mu_star,
                    const Eigen::MatrixXd& mu);

// Population objective J-bar evaluated at canonical (theta*, lambda*) and
// conditional means.
double population_objective(const Eigen::VectorXd& theta_star, const Eigen::VectorXd& lambda_star,
                            const Eigen::MatrixXd& rates, const Eigen::MatrixXd& qz,
                            const Eigen::MatrixXd& qw, const Eigen::MatrixXd& mu);

// Permutation-model adjusted Rand index. When the adjustment denominator is
// zero the value is 1 for identical partitions and 0 otherwise.
double adjusted_rand_index(const Labels& a, const Labels& b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson chi-square test of independence on a contingency table.
// All row and column margins must be positive.
ChiSquareResult chi_square_independence(const Eigen::MatrixXd& table);

// Permutation sigma maximizing the confusion trace: sigma[k] is the
// candidate cluster matched to reference cluster k (Hungarian assignment).
std::vector<int> align_labels(const Labels& reference, const Labels& candidate, int k);
std::vector<int> align_labels(const Labels& reference, const Eigen::MatrixXd& candidate_q);

// Rewrites candidate labels into the reference frame given the alignment.
Labels relabel_to_reference(const Labels& candidate, const std::vector<int>& sigma);

}  // namespace dclbm
