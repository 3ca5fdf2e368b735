#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "dclbm/bigraph.hpp"
#include "dclbm/model.hpp"

namespace dclbm {

struct SpectralConfig {
  int k = 2;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 100;
  std::uint64_t seed = 0;
  double eig_tol = 1e-10;
  int eig_max_iter = 2000;
  double smoothing = 1e-6;  // one-hot smoothing for init_posteriors
};

enum class Side { rows, cols };

// Symmetric PSD similarity, abstracted so AA^T / A^T A never have to be
// materialized: the eigensolver only needs y = S x.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;
  virtual Index dim() const = 0;
  virtual void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
  virtual Eigen::VectorXd row_sums() const;
  Eigen::MatrixXd dense() const;
};

// S = A A^T (rows) or A^T A (cols); each apply is two sparse passes.
class GramOperator final : public SymmetricOperator {
 public:
  GramOperator(const BipartiteGraph& g, Side side) : g_(&g), side_(side) {}
  Index dim() const override;
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  Eigen::VectorXd row_sums() const override;

 private:
  const BipartiteGraph* g_;
  Side side_;
};

class DenseSymmetricOperator final : public SymmetricOperator {
 public:
  explicit DenseSymmetricOperator(Eigen::MatrixXd s);
  Index dim() const override { return s_.rows(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y = s_ * x; }

 private:
  Eigen::MatrixXd s_;
};

struct EigenPairs {
  Eigen::MatrixXd vectors;  // dim x k, orthonormal columns
  Eigen::VectorXd values;   // descending
  int iterations = 0;
};

// Top-k eigenpairs of D^{-1/2} S D^{-1/2} (D = diag of row sums of S, zero
// rows stay zero) by seeded orthogonal iteration with a Rayleigh-Ritz
// finish. Throws with the iteration count on non-convergence.
EigenPairs top_eigenpairs_normalized(const SymmetricOperator& s, int k, double tol, int max_iter,
                                     std::uint64_t seed);

// Seeded k-means with k-means++ starts; returns labels of the best restart
// by within-cluster sum of squares (ties to the earlier restart).
Labels kmeans(const Eigen::MatrixXd& points, int k, int restarts, int max_iter,
              std::uint64_t seed, double* wcss_out = nullptr);

struct SpectralOutcome {
  Labels labels;
  int eig_iterations = 0;
  std::vector<Index> isolated;  // zero-similarity nodes, assigned cluster 0
};

// Normalized-Laplacian spectral clustering: top-k eigenvectors of the
// normalized similarity, row-normalized, then k-means.
SpectralOutcome spectral_cluster(const SymmetricOperator& s, const SpectralConfig& cfg);

// Spectral labels on AA^T and A^T A, one-hot encoded with smoothing so no
// initial pi_k is exactly zero.
Posteriors init_posteriors(const BipartiteGraph& g, int k, int l, const SpectralConfig& cfg);

}  // namespace dclbm
