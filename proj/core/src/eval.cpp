#include "dclbm/eval.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace dclbm {

Eigen::MatrixXd soft_confusion(const Eigen::MatrixXd& p, const Eigen::MatrixXd& pt) {
  if (p.rows() != pt.rows()) throw std::invalid_argument("row counts differ");
  if (p.rows() == 0) throw std::invalid_argument("empty input");
  return (p.transpose() * pt) / static_cast<double>(p.rows());
}

double partition_distance(const Eigen::MatrixXd& p, const Eigen::MatrixXd& pt) {
  if (p.cols() != pt.cols()) throw std::invalid_argument("cluster counts differ");
  return 1.0 - soft_confusion(p, pt).trace();
}

double triple_distance(const Eigen::MatrixXd& qz, const Eigen::MatrixXd& qw,
                       const Eigen::MatrixXd& mu, const Eigen::MatrixXd& qz2,
                       const Eigen::MatrixXd& qw2, const Eigen::MatrixXd& mu2) {
  if (mu.rows() != mu2.rows() || mu.cols() != mu2.cols()) {
    throw std::invalid_argument("mu shapes differ");
  }
  return partition_distance(qz, qz2) + partition_distance(qw, qw2) +
         (mu - mu2).cwiseAbs().sum();
}

double kl_poisson(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("kl_poisson requires positive inputs");
  return a * std::log(a / b) - (a - b);
}

double separation_G(const Labels& z_true, const Labels& w_true, const Eigen::MatrixXd& qz,
                    const Eigen::MatrixXd& qw, const Eigen::MatrixXd& mu_star,
                    const Eigen::MatrixXd& mu) {
  const int k_true = static_cast<int>(mu_star.rows());
  const int l_true = static_cast<int>(mu_star.cols());
  const Eigen::MatrixXd rz = soft_confusion(one_hot(z_true, k_true), qz);
  const Eigen::MatrixXd rw = soft_confusion(one_hot(w_true, l_true), qw);

  double g = 0.0;
  for (int k = 0; k < k_true; ++k) {
    for (int l = 0; l < l_true; ++l) {
      for (Index kp = 0; kp < mu.rows(); ++kp) {
        for (Index lp = 0; lp < mu.cols(); ++lp) {
          g += rz(k, kp) * rw(l, lp) * kl_poisson(mu_star(k, l), mu(kp, lp));
        }
      }
    }
  }
  return g;
}

double population_objective(const Eigen::VectorXd& theta_star, const Eigen::VectorXd& lambda_star,
                            const Eigen::MatrixXd& rates, const Eigen::MatrixXd& qz,
                            const Eigen::MatrixXd& qw, const Eigen::MatrixXd& mu) {
  if (rates.rows() != qz.rows() || rates.cols() != qw.rows() ||
      theta_star.size() != qz.rows() || lambda_star.size() != qw.rows()) {
    throw std::invalid_argument("dimension mismatch");
  }
  if ((mu.array() <= 0.0).any()) throw std::domain_error("mu must be positive");

  const Eigen::VectorXd u = qz.transpose() * theta_star;
  const Eigen::VectorXd v = qw.transpose() * lambda_star;
  const double linear_term = -u.dot(mu * v);

  const Eigen::MatrixXd weights = qz.transpose() * rates * qw;  // K x L
  const double log_term = (weights.array() * mu.array().log()).sum();
  return linear_term + log_term;
}

namespace {

// Dense contingency table with labels mapped to first-appearance indices.
Eigen::MatrixXd contingency(const Labels& a, const Labels& b) {
  auto index_of = [](std::unordered_map<int, int>& map, int value) {
    auto [it, inserted] = map.try_emplace(value, static_cast<int>(map.size()));
    return it->second;
  };
  std::unordered_map<int, int> amap, bmap;
  std::vector<std::pair<int, int>> cells(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[i] = {index_of(amap, a[i]), index_of(bmap, b[i])};
  }
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Index>(amap.size()),
                                                static_cast<Index>(bmap.size()));
  for (const auto& [i, j] : cells) table(i, j) += 1.0;
  return table;
}

bool same_partition(const Labels& a, const Labels& b) {
  std::unordered_map<int, int> fwd;
  std::unordered_map<int, int> rev;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto [fit, fnew] = fwd.try_emplace(a[i], b[i]);
    if (!fnew && fit->second != b[i]) return false;
    const auto [rit, rnew] = rev.try_emplace(b[i], a[i]);
    if (!rnew && rit->second != a[i]) return false;
  }
  return true;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

// Classic O(n^3) Hungarian assignment, minimizing cost.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (match[static_cast<std::size_t>(j)] > 0) {
      assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(j)]) - 1] = j - 1;
    }
  }
  return assignment;
}

}  // namespace

double adjusted_rand_index(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions have different lengths");
  if (a.empty()) throw std::invalid_argument("empty partitions");

  const Eigen::MatrixXd table = contingency(a, b);
  const double total = static_cast<double>(a.size());

  double index = 0.0;
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) index += choose2(table(i, j));
  }
  double row_pairs = 0.0, col_pairs = 0.0;
  for (Index i = 0; i < table.rows(); ++i) row_pairs += choose2(table.row(i).sum());
  for (Index j = 0; j < table.cols(); ++j) col_pairs += choose2(table.col(j).sum());

  const double expected = row_pairs * col_pairs / choose2(total);
  const double max_index = 0.5 * (row_pairs + col_pairs);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12 * std::max(1.0, max_index)) {
    return same_partition(a, b) ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

ChiSquareResult chi_square_independence(const Eigen::MatrixXd& table) {
  if (table.rows() < 1 || table.cols() < 1) throw std::invalid_argument("empty table");
  if ((table.array() < 0.0).any()) throw std::invalid_argument("negative cell count");

  const Eigen::VectorXd row_tot = table.rowwise().sum();
  const Eigen::VectorXd col_tot = table.colwise().sum();
  if ((row_tot.array() <= 0.0).any() || (col_tot.array() <= 0.0).any()) {
    throw std::domain_error("zero margin in contingency table");
  }
  const double total = row_tot.sum();

  ChiSquareResult out;
  out.dof = static_cast<int>((table.rows() - 1) * (table.cols() - 1));
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      const double expected = row_tot[i] * col_tot[j] / total;
      const double diff = table(i, j) - expected;
      out.statistic += diff * diff / expected;
    }
  }
  out.p_value = out.dof == 0
                    ? 1.0
                    : boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic);
  return out;
}

std::vector<int> align_labels(const Labels& reference, const Eigen::MatrixXd& candidate_q) {
  const int k = static_cast<int>(candidate_q.cols());
  int max_ref = -1;
  for (int lab : reference) max_ref = std::max(max_ref, lab);
  if (max_ref >= k) throw std::invalid_argument("cluster counts differ");
  const Eigen::MatrixXd r = soft_confusion(one_hot(reference, k), candidate_q);
  return hungarian_min(-r);
}

std::vector<int> align_labels(const Labels& reference, const Labels& candidate, int k) {
  if (reference.size() != candidate.size()) throw std::invalid_argument("length mismatch");
  return align_labels(reference, one_hot(candidate, k));
}

Labels relabel_to_reference(const Labels& candidate, const std::vector<int>& sigma) {
  std::vector<int> inverse(sigma.size(), -1);
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    inverse[static_cast<std::size_t>(sigma[k])] = static_cast<int>(k);
  }
  Labels out(candidate.size());
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    out[i] = inverse[static_cast<std::size_t>(candidate[i])];
  }
  return out;
}

}  // namespace dclbm
