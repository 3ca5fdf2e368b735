#include "dclbm/vem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dclbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// sum_k colmass_k log(param_k); throws when a parameter with positive mass
// is not positive.
double weighted_log(const Eigen::VectorXd& colmass, const Eigen::VectorXd& param,
                    const char* name) {
  double acc = 0.0;
  for (Index k = 0; k < colmass.size(); ++k) {
    if (colmass[k] > 0.0) {
      if (!(param[k] > 0.0)) {
        throw std::domain_error(std::string("log of zero ") + name + " with positive weight");
      }
      acc += colmass[k] * std::log(param[k]);
    }
  }
  return acc;
}

double entropy(const Eigen::MatrixXd& q) {
  double acc = 0.0;
  for (Index i = 0; i < q.rows(); ++i) {
    for (Index k = 0; k < q.cols(); ++k) {
      const double v = q(i, k);
      if (v > 0.0) acc -= v * std::log(v);
    }
  }
  return acc;
}

Eigen::MatrixXd log_mu(const Eigen::MatrixXd& mu) {
  if ((mu.array() <= 0.0).any()) {
    throw std::domain_error("log of zero mu with positive weight");
  }
  return mu.array().log();
}

// Shared core: the five q-dependent terms of the objective. The caller adds
// the sum A_ij (log theta + log lambda) constant when it applies.
double objective_core(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& pi,
                      const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu,
                      const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda) {
  const Eigen::MatrixXd lmu = log_mu(mu);

  // -sum_ij theta_i lambda_j (qz mu qw) via cluster sums.
  const Eigen::VectorXd u = p.qz.transpose() * theta;
  const Eigen::VectorXd v = p.qw.transpose() * lambda;
  double value = -u.dot(mu * v);

  // + sum over non-zeros A_ij (qz_i log-mu qw_j).
  for (Index i = 0; i < g.rows(); ++i) {
    const auto entries = g.row(i);
    if (entries.empty()) continue;
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(p.qw.cols());
    for (const Entry& e : entries) s += static_cast<double>(e.weight) * p.qw.row(e.index);
    value += p.qz.row(i).dot((lmu * s.transpose()).transpose());
  }

  value += weighted_log(p.qz.colwise().sum(), pi, "pi");
  value += weighted_log(p.qw.colwise().sum(), rho, "rho");
  value += entropy(p.qz);
  value += entropy(p.qw);
  return value;
}

double degree_log_term(const BipartiteGraph& g, const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& lambda) {
  double acc = 0.0;
  for (Index i = 0; i < g.rows(); ++i) {
    const auto d = g.row_degrees()[static_cast<std::size_t>(i)];
    if (d == 0) continue;
    if (!(theta[i] > 0.0)) throw std::domain_error("log of zero theta with positive weight");
    acc += static_cast<double>(d) * std::log(theta[i]);
  }
  for (Index j = 0; j < g.cols(); ++j) {
    const auto d = g.col_degrees()[static_cast<std::size_t>(j)];
    if (d == 0) continue;
    if (!(lambda[j] > 0.0)) throw std::domain_error("log of zero lambda with positive weight");
    acc += static_cast<double>(d) * std::log(lambda[j]);
  }
  return acc;
}

void check_shapes(const BipartiteGraph& g, const Posteriors& p) {
  if (p.qz.rows() != g.rows() || p.qw.rows() != g.cols()) {
    throw std::invalid_argument("posterior shapes do not match graph");
  }
}

}  // namespace

double objective_full(const BipartiteGraph& g, const Posteriors& p, const BlockParams& params) {
  check_shapes(g, p);
  return objective_core(g, p, params.pi, params.rho, params.mu, params.theta, params.lambda) +
         degree_log_term(g, params.theta, params.lambda);
}

double objective_hat(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& pi,
                     const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu,
                     const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat) {
  check_shapes(g, p);
  return objective_core(g, p, pi, rho, mu, theta_hat, lambda_hat);
}

double objective_hat(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& pi,
                     const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu) {
  const auto [theta_hat, lambda_hat] = scaled_degree_params(g);
  return objective_hat(g, p, pi, rho, mu, theta_hat, lambda_hat);
}

MStepResult m_step(const BipartiteGraph& g, const Posteriors& p, const Eigen::VectorXd& theta_hat,
                   const Eigen::VectorXd& lambda_hat, const FitConfig& cfg) {
  check_shapes(g, p);
  const Index num_k = p.qz.cols();
  const Index num_l = p.qw.cols();

  MStepResult out;
  out.pi = p.qz.colwise().mean();
  out.rho = p.qw.colwise().mean();
  for (Index k = 0; k < num_k; ++k) {
    if (out.pi[k] < cfg.min_pi) {
      out.emptied_row_clusters.push_back(static_cast<int>(k));
      out.pi[k] = cfg.min_pi;
    }
  }
  for (Index l = 0; l < num_l; ++l) {
    if (out.rho[l] < cfg.min_pi) {
      out.emptied_col_clusters.push_back(static_cast<int>(l));
      out.rho[l] = cfg.min_pi;
    }
  }
  out.pi /= out.pi.sum();
  out.rho /= out.rho.sum();

  Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(num_k, num_l);
  for (Index i = 0; i < g.rows(); ++i) {
    const auto entries = g.row(i);
    if (entries.empty()) continue;
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(num_l);
    for (const Entry& e : entries) s += static_cast<double>(e.weight) * p.qw.row(e.index);
    numer += p.qz.row(i).transpose() * s;
  }
  const Eigen::VectorXd u = p.qz.transpose() * theta_hat;
  const Eigen::VectorXd v = p.qw.transpose() * lambda_hat;

  out.mu.resize(num_k, num_l);
  for (Index k = 0; k < num_k; ++k) {
    for (Index l = 0; l < num_l; ++l) {
      const double denom = u[k] * v[l];
      if (denom > 0.0) {
        out.mu(k, l) = std::clamp(numer(k, l) / denom, cfg.mu_lo, cfg.mu_hi);
      } else {
        out.mu(k, l) = cfg.mu_lo;
        out.empty_soft_blocks++;
      }
    }
  }
  return out;
}

MStepResult m_step(const BipartiteGraph& g, const Posteriors& p, const FitConfig& cfg) {
  const auto [theta_hat, lambda_hat] = scaled_degree_params(g);
  return m_step(g, p, theta_hat, lambda_hat, cfg);
}

namespace {

// Shared E-step sweep. For the row orientation: for each i,
//   g1(k) = -theta_i sum_l t_l mu_kl + sum_l s_l(i) log mu_kl + log prior_k
// with t_l = sum_j lambda_j qw_jl precomputed and s_l(i) the A-weighted
// posterior mass of row i's neighbors.
Eigen::MatrixXd e_step_sweep(const BipartiteGraph& g, bool rows, const Eigen::MatrixXd& q_other,
                             const Eigen::VectorXd& prior, const Eigen::MatrixXd& mu,
                             const Eigen::VectorXd& own_scale, const Eigen::VectorXd& other_scale) {
  const Index count = rows ? g.rows() : g.cols();
  const Index num_own = mu.rows();  // caller passes mu oriented own x other
  const Eigen::MatrixXd lmu = log_mu(mu);

  if (q_other.cols() != mu.cols()) throw std::invalid_argument("mu and posterior shapes disagree");
  if (prior.size() != num_own) throw std::invalid_argument("prior has wrong length");

  const Eigen::VectorXd t = q_other.transpose() * other_scale;  // length L'
  const Eigen::VectorXd mu_t = mu * t;                          // length K'

  Eigen::VectorXd log_prior(num_own);
  for (Index k = 0; k < num_own; ++k) {
    log_prior[k] = prior[k] > 0.0 ? std::log(prior[k]) : kNegInf;
  }

  Eigen::MatrixXd q(count, num_own);
  Eigen::VectorXd score(num_own);
  Eigen::RowVectorXd s(q_other.cols());
  for (Index i = 0; i < count; ++i) {
    const auto entries = rows ? g.row(i) : g.col(i);
    s.setZero();
    for (const Entry& e : entries) s += static_cast<double>(e.weight) * q_other.row(e.index);
    score = -own_scale[i] * mu_t + lmu * s.transpose() + log_prior;

    const double peak = score.maxCoeff();
    if (peak == kNegInf) {
      throw std::domain_error(std::string(rows ? "row " : "column ") + std::to_string(i) +
                              " has no admissible cluster");
    }
    const Eigen::ArrayXd shifted = (score.array() - peak).exp();
    q.row(i) = (shifted / shifted.sum()).transpose();
  }
  return q;
}

}  // namespace

Eigen::MatrixXd e_step_rows(const BipartiteGraph& g, const Eigen::MatrixXd& qw,
                            const Eigen::VectorXd& pi, const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat) {
  if (qw.rows() != g.cols()) throw std::invalid_argument("qw shape does not match graph");
  return e_step_sweep(g, true, qw, pi, mu, theta_hat, lambda_hat);
}

Eigen::MatrixXd e_step_cols(const BipartiteGraph& g, const Eigen::MatrixXd& qz,
                            const Eigen::VectorXd& rho, const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& lambda_hat) {
  if (qz.rows() != g.rows()) throw std::invalid_argument("qz shape does not match graph");
  return e_step_sweep(g, false, qz, rho, mu.transpose(), lambda_hat, theta_hat);
}

FitResult fit(const BipartiteGraph& g, int k, int l, const Posteriors& init,
              const FitConfig& cfg) {
  if (init.qz.rows() != g.rows() || init.qz.cols() != k || init.qw.rows() != g.cols() ||
      init.qw.cols() != l) {
    throw std::invalid_argument("init posteriors have wrong shape");
  }
  validate_posteriors(init, 1e-9);

  const auto [theta_hat, lambda_hat] = scaled_degree_params(g);

  FitResult result;
  result.posteriors = init;
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    MStepResult ms = m_step(g, result.posteriors, theta_hat, lambda_hat, cfg);
    result.diagnostics.empty_soft_blocks += ms.empty_soft_blocks;
    result.diagnostics.emptied_row_clusters = ms.emptied_row_clusters;
    result.diagnostics.emptied_col_clusters = ms.emptied_col_clusters;

    result.posteriors.qz =
        e_step_rows(g, result.posteriors.qw, ms.pi, ms.mu, theta_hat, lambda_hat);
    result.posteriors.qw =
        e_step_cols(g, result.posteriors.qz, ms.rho, ms.mu, theta_hat, lambda_hat);

    const double objective =
        objective_hat(g, result.posteriors, ms.pi, ms.rho, ms.mu, theta_hat, lambda_hat);
    if (!std::isfinite(objective)) {
      throw std::runtime_error("non-finite objective at iteration " + std::to_string(iter));
    }
    if (cfg.track_trace) result.objective_trace.push_back(objective);

    result.iterations = iter;
    result.params = BlockParams{ms.pi, ms.rho, theta_hat, lambda_hat, ms.mu};
    if (iter > 1 && std::abs(objective - prev) <= cfg.tol * (std::abs(prev) + 1.0)) {
      result.converged = true;
      break;
    }
    prev = objective;
  }
  return result;
}

}  // namespace dclbm
