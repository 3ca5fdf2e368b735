#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "dclbm/bigraph.hpp"
#include "dclbm/model.hpp"

namespace dclbm {

// Degree-parameter law: constant 1 or Uniform(lo, hi).
struct DegreeLaw {
  enum class Kind { constant_one, uniform };
  Kind kind = Kind::constant_one;
  double lo = 0.5;
  double hi = 1.5;

  static DegreeLaw constant() { return {}; }
  static DegreeLaw uniform(double lo, double hi) {
    return {Kind::uniform, lo, hi};
  }
};

struct SynthConfig {
  Index m = 0, n = 0;
  int k = 1, l = 1;
  Eigen::VectorXd pi;
  Eigen::VectorXd rho;
  DegreeLaw theta_dist;
  DegreeLaw lambda_dist;
  Eigen::MatrixXd mu_base;  // K x L, positive
  double r = 1.0;           // density factor multiplying mu_base
  std::uint64_t seed = 0;
};

struct SynthSample {
  BipartiteGraph graph;
  Labels z;
  Labels w;
  Eigen::VectorXd theta;
  Eigen::VectorXd lambda;
};

// z_i ~ Multi(pi), w_j ~ Multi(rho), theta/lambda per law, then
// A_ij ~ Poisson(theta_i lambda_j r mu_base[z_i, w_j]) with an independent
// counter-based stream per entry, so a fixed seed is bitwise reproducible.
SynthSample sample(const SynthConfig& cfg);

// The 3 x 4 block-mean matrix of the simulation design, scaled by r.
Eigen::MatrixXd paper_mu(double r);

// Simulation-design config: m=800, n=1000, K=3, L=4, uniform priors,
// degrees from Uniform(0.5, 1.5) (or constant 1), mu = paper_mu(r).
SynthConfig paper_design(double r, std::uint64_t seed, bool degree_corrected = true);

// Conditional means theta_i lambda_j r mu_base[z_i, w_j] as a dense matrix.
Eigen::MatrixXd expected_rates(const SynthConfig& cfg, const Labels& z, const Labels& w,
                               const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda);
Eigen::MatrixXd expected_rates(const SynthSample& s, const SynthConfig& cfg);

}  // namespace dclbm
