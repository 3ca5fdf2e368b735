#include "dclbm/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dclbm/rng.hpp"

namespace dclbm {

Eigen::VectorXd SymmetricOperator::row_sums() const {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim());
  Eigen::VectorXd out(dim());
  apply(ones, out);
  return out;
}

Eigen::MatrixXd SymmetricOperator::dense() const {
  Eigen::MatrixXd out(dim(), dim());
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim());
  Eigen::VectorXd col(dim());
  for (Index j = 0; j < dim(); ++j) {
    unit[j] = 1.0;
    apply(unit, col);
    out.col(j) = col;
    unit[j] = 0.0;
  }
  return out;
}

Index GramOperator::dim() const { return side_ == Side::rows ? g_->rows() : g_->cols(); }

void GramOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (side_ == Side::rows) {
    // y = A (A^T x)
    Eigen::VectorXd u = Eigen::VectorXd::Zero(g_->cols());
    for (Index j = 0; j < g_->cols(); ++j) {
      double acc = 0.0;
      for (const Entry& e : g_->col(j)) acc += static_cast<double>(e.weight) * x[e.index];
      u[j] = acc;
    }
    y.resize(g_->rows());
    for (Index i = 0; i < g_->rows(); ++i) {
      double acc = 0.0;
      for (const Entry& e : g_->row(i)) acc += static_cast<double>(e.weight) * u[e.index];
      y[i] = acc;
    }
  } else {
    // y = A^T (A x)
    Eigen::VectorXd u = Eigen::VectorXd::Zero(g_->rows());
    for (Index i = 0; i < g_->rows(); ++i) {
      double acc = 0.0;
      for (const Entry& e : g_->row(i)) acc += static_cast<double>(e.weight) * x[e.index];
      u[i] = acc;
    }
    y.resize(g_->cols());
    for (Index j = 0; j < g_->cols(); ++j) {
      double acc = 0.0;
      for (const Entry& e : g_->col(j)) acc += static_cast<double>(e.weight) * u[e.index];
      y[j] = acc;
    }
  }
}

Eigen::VectorXd GramOperator::row_sums() const {
  // Row sums of AA^T: s_i = sum_j A_ij d_j^c, and symmetrically for A^T A.
  Eigen::VectorXd out(dim());
  if (side_ == Side::rows) {
    for (Index i = 0; i < g_->rows(); ++i) {
      double acc = 0.0;
      for (const Entry& e : g_->row(i)) {
        acc += static_cast<double>(e.weight) *
               static_cast<double>(g_->col_degrees()[static_cast<std::size_t>(e.index)]);
      }
      out[i] = acc;
    }
  } else {
    for (Index j = 0; j < g_->cols(); ++j) {
      double acc = 0.0;
      for (const Entry& e : g_->col(j)) {
        acc += static_cast<double>(e.weight) *
               static_cast<double>(g_->row_degrees()[static_cast<std::size_t>(e.index)]);
      }
      out[j] = acc;
    }
  }
  return out;
}

DenseSymmetricOperator::DenseSymmetricOperator(Eigen::MatrixXd s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols()) throw std::invalid_argument("similarity matrix must be square");
  if (!s_.isApprox(s_.transpose(), 1e-12)) {
    throw std::invalid_argument("similarity matrix must be symmetric");
  }
}

EigenPairs top_eigenpairs_normalized(const SymmetricOperator& s, int k, double tol, int max_iter,
                                     std::uint64_t seed) {
  const Index dim = s.dim();
  if (k < 1) throw std::invalid_argument("k must be positive");
  const Index kk = std::min<Index>(k, dim);

  const Eigen::VectorXd sums = s.row_sums();
  Eigen::VectorXd dinv_sqrt(dim);
  for (Index i = 0; i < dim; ++i) dinv_sqrt[i] = sums[i] > 0.0 ? 1.0 / std::sqrt(sums[i]) : 0.0;

  Eigen::VectorXd scratch(dim);
  auto apply_normalized = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    scratch = dinv_sqrt.cwiseProduct(x);
    s.apply(scratch, y);
    y = dinv_sqrt.cwiseProduct(y);
  };

  SplitMix64 rng(hash_mix(seed, 0x0e16e25ULL));
  Eigen::MatrixXd basis(dim, kk);
  for (Index c = 0; c < kk; ++c) {
    for (Index i = 0; i < dim; ++i) basis(i, c) = rng.next_double() - 0.5;
  }
  basis = Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ() *
          Eigen::MatrixXd::Identity(dim, kk);

  Eigen::MatrixXd image(dim, kk);
  Eigen::VectorXd ritz = Eigen::VectorXd::Zero(kk);
  Eigen::VectorXd prev_ritz = ritz;
  Eigen::VectorXd in(dim), out(dim);

  int iter = 0;
  bool converged = false;
  for (iter = 1; iter <= max_iter; ++iter) {
    for (Index c = 0; c < kk; ++c) {
      in = basis.col(c);
      apply_normalized(in, out);
      image.col(c) = out;
      ritz[c] = in.dot(out);
    }
    if (iter > 1) {
      const double scale = std::max(1.0, ritz.cwiseAbs().maxCoeff());
      if ((ritz - prev_ritz).cwiseAbs().maxCoeff() <= tol * scale) {
        converged = true;
        break;
      }
    }
    prev_ritz = ritz;
    basis = Eigen::HouseholderQR<Eigen::MatrixXd>(image).householderQ() *
            Eigen::MatrixXd::Identity(dim, kk);
  }
  if (!converged) {
    throw std::runtime_error("eigensolver did not converge after " + std::to_string(max_iter) +
                             " iterations");
  }

  // Rayleigh-Ritz rotation of the converged subspace.
  Eigen::MatrixXd projected(kk, kk);
  for (Index c = 0; c < kk; ++c) {
    in = basis.col(c);
    apply_normalized(in, out);
    projected.col(c) = basis.transpose() * out;
  }
  projected = 0.5 * (projected + projected.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected);

  EigenPairs result;
  result.iterations = iter;
  result.values.resize(kk);
  result.vectors.resize(dim, kk);
  // SelfAdjointEigenSolver sorts ascending; flip to descending.
  for (Index c = 0; c < kk; ++c) {
    result.values[c] = es.eigenvalues()[kk - 1 - c];
    result.vectors.col(c) = basis * es.eigenvectors().col(kk - 1 - c);
  }
  return result;
}

namespace {

double squared_distance(const Eigen::MatrixXd& pts, Index i, const Eigen::RowVectorXd& center) {
  return (pts.row(i) - center).squaredNorm();
}

}  // namespace

Labels kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
              std::uint64_t seed, double* wcss_out) {
  const Index n = points.rows();
  if (k < 1 || restarts < 1) throw std::invalid_argument("k and restarts must be positive");
  if (n == 0) return {};
  if (k == 1 || n <= 1) {
    if (wcss_out) {
      Eigen::RowVectorXd c = points.colwise().mean();
      double w = 0.0;
      for (Index i = 0; i < n; ++i) w += squared_distance(points, i, c);
      *wcss_out = w;
    }
    return Labels(static_cast<std::size_t>(n), 0);
  }

  Labels best(static_cast<std::size_t>(n), 0);
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < restarts; ++restart) {
    SplitMix64 rng(hash_mix(seed, 0x6b6d65616e73ULL, static_cast<std::uint64_t>(restart)));

    // k-means++ seeding.
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd d2(n);
    for (Index i = 0; i < n; ++i) d2[i] = squared_distance(points, i, centers.row(0));
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Index pick = 0;
      if (total > 0.0) {
        double target = rng.next_double() * total;
        for (Index i = 0; i < n; ++i) {
          target -= d2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      }
      centers.row(c) = points.row(pick);
      for (Index i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], squared_distance(points, i, centers.row(c)));
      }
    }

    Labels labels(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < max_iter; ++iter) {
      bool changed = false;
      for (Index i = 0; i < n; ++i) {
        int arg = 0;
        double best_d = squared_distance(points, i, centers.row(0));
        for (int c = 1; c < k; ++c) {
          const double d = squared_distance(points, i, centers.row(c));
          if (d < best_d) {
            best_d = d;
            arg = c;
          }
        }
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        counts[labels[static_cast<std::size_t>(i)]] += 1.0;
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0.0) {
          centers.row(c) = sums.row(c) / counts[c];
        } else {
          // Re-seed an empty cluster with the point farthest from its center.
          Index farthest = 0;
          double far_d = -1.0;
          for (Index i = 0; i < n; ++i) {
            const double d =
                squared_distance(points, i, centers.row(labels[static_cast<std::size_t>(i)]));
            if (d > far_d) {
              far_d = d;
              farthest = i;
            }
          }
          centers.row(c) = points.row(farthest);
          labels[static_cast<std::size_t>(farthest)] = c;
          changed = true;
        }
      }
      if (!changed && iter > 0) break;
    }

    double wcss = 0.0;
    for (Index i = 0; i < n; ++i) {
      wcss += squared_distance(points, i, centers.row(labels[static_cast<std::size_t>(i)]));
    }
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best = labels;
    }
  }

  if (wcss_out) *wcss_out = best_wcss;
  return best;
}

SpectralOutcome spectral_cluster(const SymmetricOperator& s, const SpectralConfig& cfg) {
  const Index dim = s.dim();
  if (cfg.k < 1) throw std::invalid_argument("cluster count must be positive");

  SpectralOutcome out;
  const Eigen::VectorXd sums = s.row_sums();
  for (Index i = 0; i < dim; ++i) {
    if (!(sums[i] > 0.0)) out.isolated.push_back(i);
  }
  out.labels.assign(static_cast<std::size_t>(dim), 0);
  if (cfg.k == 1) return out;

  EigenPairs pairs = top_eigenpairs_normalized(s, cfg.k, cfg.eig_tol, cfg.eig_max_iter, cfg.seed);
  out.eig_iterations = pairs.iterations;

  // Row-normalize; exact-zero rows (isolated nodes) stay zero and skip k-means.
  Eigen::MatrixXd embedding = pairs.vectors;
  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0 && sums[i] > 0.0) {
      embedding.row(i) /= norm;
      active.push_back(i);
    }
  }

  if (active.empty()) return out;
  Eigen::MatrixXd pts(static_cast<Index>(active.size()), embedding.cols());
  for (std::size_t r = 0; r < active.size(); ++r) {
    pts.row(static_cast<Index>(r)) = embedding.row(active[r]);
  }
  const Labels sub =
      kmeans(pts, cfg.k, cfg.kmeans_restarts, cfg.kmeans_max_iter, hash_mix(cfg.seed, 0x6bULL));
  for (std::size_t r = 0; r < active.size(); ++r) {
    out.labels[static_cast<std::size_t>(active[r])] = sub[r];
  }
  return out;
}

Posteriors init_posteriors(const BipartiteGraph& g, int k, int l, const SpectralConfig& cfg) {
  SpectralConfig row_cfg = cfg;
  row_cfg.k = k;
  row_cfg.seed = hash_mix(cfg.seed, 0x726f7773ULL);
  SpectralConfig col_cfg = cfg;
  col_cfg.k = l;
  col_cfg.seed = hash_mix(cfg.seed, 0x636f6c73ULL);

  GramOperator row_gram(g, Side::rows);
  GramOperator col_gram(g, Side::cols);
  const Labels z = spectral_cluster(row_gram, row_cfg).labels;
  const Labels w = spectral_cluster(col_gram, col_cfg).labels;
  return Posteriors{one_hot(z, k, cfg.smoothing), one_hot(w, l, cfg.smoothing)};
}

}  // namespace dclbm
