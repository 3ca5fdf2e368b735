#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "dclbm/bigraph.hpp"

namespace dclbm {

// Cluster labels, 0-based internally. All file I/O is 1-based; the
// conversion lives in the edge-list/runner layer.
using Labels = std::vector<int>;

// Parameter bundle (pi, rho, theta, lambda, mu).
struct BlockParams {
  Eigen::VectorXd pi;
  Eigen::VectorXd rho;
  Eigen::VectorXd theta;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd mu;  // K x L, strictly positive after clamping
};

// Row-stochastic membership probabilities: qz is m x K, qw is n x L.
struct Posteriors {
  Eigen::MatrixXd qz;
  Eigen::MatrixXd qw;
};

// mu entries are clamped into [kMuClampLo, kMuClampHi] whenever they are
// produced by fitting code; the compact-domain assumption has no projection
// step in the algorithm itself, so the clamp is what keeps log(mu) finite.
inline constexpr double kMuClampLo = 1e-10;
inline constexpr double kMuClampHi = 1e10;

// Throws unless every row is non-negative and sums to 1 within tol.
void validate_posteriors(const Posteriors& p, double tol = 1e-12);

// One-hot encoding with optional smoothing: row = (1 - eps*K) * e_label + eps.
Eigen::MatrixXd one_hot(const Labels& labels, int k, double eps = 0.0);

// log(a!) via lgamma, cached for small counts.
double log_factorial(Count a);

// log P(z, w, A; params). Returns -inf when a labeling has zero prior mass;
// throws "zero rate with positive count" when theta_i lambda_j mu = 0 meets
// A_ij > 0.
double complete_log_likelihood(const BipartiteGraph& g, const Labels& z, const Labels& w,
                               const BlockParams& params);

// log sum over all labelings of exp(complete_log_likelihood), via streaming
// log-sum-exp. Only usable when K^m * L^n <= 1e7.
double marginal_log_likelihood_bruteforce(const BipartiteGraph& g, const BlockParams& params);

struct CanonicalParams {
  Eigen::VectorXd theta;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd mu;  // K x L
};

// Canonical (theta*, lambda*, mu*) of a conditional-mean matrix:
//   theta*_i = row mean / sqrt(grand mean), lambda*_j analogous,
//   mu*_kl   = rates_ij / (theta*_i lambda*_j) on block (k, l).
// Verifies that the ratio is constant within each block to `tol` and throws
// "rates not block-rank-one" otherwise.
CanonicalParams canonicalize(const Labels& z, const Labels& w, const Eigen::MatrixXd& rates,
                             int k, int l, double tol = 1e-9);

// Per-row argmax with ties broken toward the smallest cluster index.
std::pair<Labels, Labels> hard_labels(const Posteriors& p);

}  // namespace dclbm
