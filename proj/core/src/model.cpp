#include "dclbm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dclbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

void check_labels(const Labels& labels, std::size_t expected, int k, const char* what) {
  if (labels.size() != expected) {
    throw std::invalid_argument(std::string(what) + " label vector has wrong length");
  }
  for (int lab : labels) {
    if (lab < 0 || lab >= k) {
      throw std::out_of_range(std::string(what) + " label out of range");
    }
  }
}

// Streaming log-sum-exp accumulator.
struct LogSumExp {
  double max = kNegInf;
  double sum = 0.0;

  void add(double v) {
    if (v == kNegInf) return;
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }

  double value() const { return max == kNegInf ? kNegInf : max + std::log(sum); }
};

bool advance_odometer(Labels& digits, int base) {
  for (std::size_t pos = 0; pos < digits.size(); ++pos) {
    if (++digits[pos] < base) return true;
    digits[pos] = 0;
  }
  return false;
}

}  // namespace

void validate_posteriors(const Posteriors& p, double tol) {
  for (const Eigen::MatrixXd* q : {&p.qz, &p.qw}) {
    for (Index i = 0; i < q->rows(); ++i) {
      double sum = 0.0;
      for (Index k = 0; k < q->cols(); ++k) {
        const double v = (*q)(i, k);
        if (v < -tol) throw std::invalid_argument("posterior entry is negative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw std::invalid_argument("posterior row does not sum to 1");
      }
    }
  }
}

Eigen::MatrixXd one_hot(const Labels& labels, int k, double eps) {
  if (k < 1) throw std::invalid_argument("cluster count must be positive");
  if (eps < 0.0 || eps * k > 1.0) throw std::invalid_argument("invalid smoothing");
  Eigen::MatrixXd out(static_cast<Index>(labels.size()), k);
  out.setConstant(eps);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw std::out_of_range("label out of range");
    out(static_cast<Index>(i), labels[i]) = 1.0 - eps * k + eps;
  }
  return out;
}

double log_factorial(Count a) {
  if (a < 0) throw std::invalid_argument("negative count");
  static constexpr Count kCached = 4096;
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kCached));
    for (Count v = 0; v < kCached; ++v) {
      t[static_cast<std::size_t>(v)] = std::lgamma(static_cast<double>(v) + 1.0);
    }
    return t;
  }();
  if (a < kCached) return table[static_cast<std::size_t>(a)];
  return std::lgamma(static_cast<double>(a) + 1.0);
}

double complete_log_likelihood(const BipartiteGraph& g, const Labels& z, const Labels& w,
                               const BlockParams& params) {
  const int k = static_cast<int>(params.pi.size());
  const int l = static_cast<int>(params.rho.size());
  check_labels(z, static_cast<std::size_t>(g.rows()), k, "row");
  check_labels(w, static_cast<std::size_t>(g.cols()), l, "column");
  if (params.theta.size() != g.rows() || params.lambda.size() != g.cols() ||
      params.mu.rows() != k || params.mu.cols() != l) {
    throw std::invalid_argument("parameter dimensions do not match graph");
  }

  double ll = 0.0;
  for (Index i = 0; i < g.rows(); ++i) ll += safe_log(params.pi[z[static_cast<std::size_t>(i)]]);
  for (Index j = 0; j < g.cols(); ++j) ll += safe_log(params.rho[w[static_cast<std::size_t>(j)]]);

  // sum_ij theta_i lambda_j mu_{z_i w_j} collapses to block sums.
  Eigen::VectorXd theta_by_cluster = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd lambda_by_cluster = Eigen::VectorXd::Zero(l);
  for (Index i = 0; i < g.rows(); ++i) {
    theta_by_cluster[z[static_cast<std::size_t>(i)]] += params.theta[i];
  }
  for (Index j = 0; j < g.cols(); ++j) {
    lambda_by_cluster[w[static_cast<std::size_t>(j)]] += params.lambda[j];
  }
  ll -= theta_by_cluster.transpose() * params.mu * lambda_by_cluster;

  for (Index i = 0; i < g.rows(); ++i) {
    for (const Entry& e : g.row(i)) {
      const double rate = params.theta[i] * params.lambda[e.index] *
                          params.mu(z[static_cast<std::size_t>(i)],
                                    w[static_cast<std::size_t>(e.index)]);
      if (rate <= 0.0) {
        throw std::domain_error("zero rate with positive count at (" + std::to_string(i) + "," +
                                std::to_string(e.index) + ")");
      }
      ll += static_cast<double>(e.weight) * std::log(rate) - log_factorial(e.weight);
    }
  }
  return ll;
}

double marginal_log_likelihood_bruteforce(const BipartiteGraph& g, const BlockParams& params) {
  const int k = static_cast<int>(params.pi.size());
  const int l = static_cast<int>(params.rho.size());
  const double log_terms = static_cast<double>(g.rows()) * std::log(static_cast<double>(k)) +
                           static_cast<double>(g.cols()) * std::log(static_cast<double>(l));
  if (log_terms > std::log(1e7) + 1e-12) {
    throw std::invalid_argument("instance too large for enumeration: K^m * L^n exceeds 1e7");
  }

  LogSumExp lse;
  Labels z(static_cast<std::size_t>(g.rows()), 0);
  do {
    Labels w(static_cast<std::size_t>(g.cols()), 0);
    do {
      lse.add(complete_log_likelihood(g, z, w, params));
    } while (advance_odometer(w, l));
  } while (advance_odometer(z, k));
  return lse.value();
}

CanonicalParams canonicalize(const Labels& z, const Labels& w, const Eigen::MatrixXd& rates,
                             int k, int l, double tol) {
  const Index m = rates.rows();
  const Index n = rates.cols();
  check_labels(z, static_cast<std::size_t>(m), k, "row");
  check_labels(w, static_cast<std::size_t>(n), l, "column");

  const double grand_mean = rates.mean();
  if (!(grand_mean > 0.0)) throw std::domain_error("rates have non-positive grand mean");
  const double scale = std::sqrt(grand_mean);

  CanonicalParams out;
  out.theta = rates.rowwise().mean() / scale;
  out.lambda = rates.colwise().mean().transpose() / scale;
  if ((out.theta.array() <= 0.0).any() || (out.lambda.array() <= 0.0).any()) {
    throw std::domain_error("rates must be positive on average in every row and column");
  }

  Eigen::MatrixXd block_sum = Eigen::MatrixXd::Zero(k, l);
  Eigen::MatrixXd block_count = Eigen::MatrixXd::Zero(k, l);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const int a = z[static_cast<std::size_t>(i)];
      const int b = w[static_cast<std::size_t>(j)];
      block_sum(a, b) += rates(i, j) / (out.theta[i] * out.lambda[j]);
      block_count(a, b) += 1.0;
    }
  }
  if ((block_count.array() == 0.0).any()) {
    throw std::invalid_argument("every (row, column) cluster pair must be non-empty");
  }
  out.mu = block_sum.array() / block_count.array();

  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double ratio = rates(i, j) / (out.theta[i] * out.lambda[j]);
      const double ref = out.mu(z[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)]);
      if (std::abs(ratio - ref) > tol * std::max(1.0, std::abs(ref))) {
        throw std::domain_error("rates not block-rank-one");
      }
    }
  }
  return out;
}

std::pair<Labels, Labels> hard_labels(const Posteriors& p) {
  auto argmax_rows = [](const Eigen::MatrixXd& q) {
    Labels out(static_cast<std::size_t>(q.rows()), 0);
    for (Index i = 0; i < q.rows(); ++i) {
      int best = 0;
      for (Index k = 1; k < q.cols(); ++k) {
        if (q(i, k) > q(i, best)) best = static_cast<int>(k);
      }
      out[static_cast<std::size_t>(i)] = best;
    }
    return out;
  };
  return {argmax_rows(p.qz), argmax_rows(p.qw)};
}

}  // namespace dclbm
