#include "dclbm/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "dclbm/rng.hpp"

namespace dclbm {

namespace {

constexpr std::uint64_t kRowLabelTag = 0x7a6c6162ULL;
constexpr std::uint64_t kColLabelTag = 0x776c6162ULL;
constexpr std::uint64_t kThetaTag = 0x7468657461ULL;
constexpr std::uint64_t kLambdaTag = 0x6c616d626441ULL;
constexpr std::uint64_t kEntryTag = 0x656e747279ULL;

int draw_categorical(SplitMix64& rng, const Eigen::VectorXd& probs) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (Index k = 0; k < probs.size(); ++k) {
    cum += probs[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

double draw_degree(SplitMix64& rng, const DegreeLaw& law) {
  switch (law.kind) {
    case DegreeLaw::Kind::constant_one:
      return 1.0;
    case DegreeLaw::Kind::uniform:
      return rng.uniform(law.lo, law.hi);
  }
  return 1.0;
}

// Knuth inversion; expected cost grows with the mean, so only for mean < 10.
Count poisson_inversion(SplitMix64& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = 1.0;
  Count k = 0;
  do {
    ++k;
    prod *= rng.next_double();
  } while (prod > limit);
  return k - 1;
}

// Hormann's PTRS transformed-rejection sampler for mean >= 10.
Count poisson_ptrs(SplitMix64& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<Count>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mean - mean - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<Count>(kf);
  }
}

Count draw_poisson(SplitMix64& rng, double mean) {
  if (mean <= 0.0) return 0;
  return mean < 10.0 ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

void validate_config(const SynthConfig& cfg) {
  if (cfg.m <= 0 || cfg.n <= 0) throw std::invalid_argument("m and n must be positive");
  if (cfg.k < 1 || cfg.l < 1) throw std::invalid_argument("K and L must be positive");
  if (cfg.pi.size() != cfg.k || cfg.rho.size() != cfg.l) {
    throw std::invalid_argument("pi/rho lengths must match K/L");
  }
  if (std::abs(cfg.pi.sum() - 1.0) > 1e-9 || std::abs(cfg.rho.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("pi and rho must sum to 1");
  }
  if (cfg.mu_base.rows() != cfg.k || cfg.mu_base.cols() != cfg.l) {
    throw std::invalid_argument("mu_base must be K x L");
  }
  if ((cfg.mu_base.array() <= 0.0).any()) throw std::invalid_argument("mu_base must be positive");
  if (!(cfg.r > 0.0)) throw std::invalid_argument("density factor r must be positive");
}

}  // namespace

SynthSample sample(const SynthConfig& cfg) {
  validate_config(cfg);

  Labels z(static_cast<std::size_t>(cfg.m));
  Labels w(static_cast<std::size_t>(cfg.n));
  {
    SplitMix64 rng(hash_mix(cfg.seed, kRowLabelTag));
    for (auto& lab : z) lab = draw_categorical(rng, cfg.pi);
  }
  {
    SplitMix64 rng(hash_mix(cfg.seed, kColLabelTag));
    for (auto& lab : w) lab = draw_categorical(rng, cfg.rho);
  }

  Eigen::VectorXd theta(cfg.m);
  Eigen::VectorXd lambda(cfg.n);
  {
    SplitMix64 rng(hash_mix(cfg.seed, kThetaTag));
    for (Index i = 0; i < cfg.m; ++i) theta[i] = draw_degree(rng, cfg.theta_dist);
  }
  {
    SplitMix64 rng(hash_mix(cfg.seed, kLambdaTag));
    for (Index j = 0; j < cfg.n; ++j) lambda[j] = draw_degree(rng, cfg.lambda_dist);
  }

  const Eigen::MatrixXd mu = cfg.r * cfg.mu_base;
  const std::uint64_t entry_seed = hash_mix(cfg.seed, kEntryTag);
  std::vector<Triple> triples;
  for (Index i = 0; i < cfg.m; ++i) {
    const double theta_i = theta[i];
    const int zi = z[static_cast<std::size_t>(i)];
    for (Index j = 0; j < cfg.n; ++j) {
      SplitMix64 rng(hash_mix(entry_seed, static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(j)));
      const Count a = draw_poisson(rng, theta_i * lambda[j] * mu(zi, w[static_cast<std::size_t>(j)]));
      if (a > 0) triples.push_back(Triple{i, j, a});
    }
  }

  return SynthSample{BipartiteGraph(cfg.m, cfg.n, std::move(triples)), std::move(z), std::move(w),
                     std::move(theta), std::move(lambda)};
}

Eigen::MatrixXd paper_mu(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("density factor r must be positive");
  Eigen::MatrixXd base(3, 4);
  base << 0.15, 0.05, 0.05, 0.06,
          0.05, 0.15, 0.05, 0.08,
          0.05, 0.05, 0.15, 0.10;
  return r * base;
}

SynthConfig paper_design(double r, std::uint64_t seed, bool degree_corrected) {
  SynthConfig cfg;
  cfg.m = 800;
  cfg.n = 1000;
  cfg.k = 3;
  cfg.l = 4;
  cfg.pi = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  cfg.rho = Eigen::VectorXd::Constant(4, 1.0 / 4.0);
  cfg.theta_dist = degree_corrected ? DegreeLaw::uniform(0.5, 1.5) : DegreeLaw::constant();
  cfg.lambda_dist = cfg.theta_dist;
  cfg.mu_base = paper_mu(1.0);
  cfg.r = r;
  cfg.seed = seed;
  return cfg;
}

Eigen::MatrixXd expected_rates(const SynthConfig& cfg, const Labels& z, const Labels& w,
                               const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda) {
  Eigen::MatrixXd rates(theta.size(), lambda.size());
  const Eigen::MatrixXd mu = cfg.r * cfg.mu_base;
  for (Index i = 0; i < theta.size(); ++i) {
    for (Index j = 0; j < lambda.size(); ++j) {
      rates(i, j) = theta[i] * lambda[j] * mu(z[static_cast<std::size_t>(i)],
                                              w[static_cast<std::size_t>(j)]);
    }
  }
  return rates;
}

Eigen::MatrixXd expected_rates(const SynthSample& s, const SynthConfig& cfg) {
  return expected_rates(cfg, s.z, s.w, s.theta, s.lambda);
}

}  // namespace dclbm
