#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dclbm {

using Index = Eigen::Index;
using Count = std::int64_t;

// One stored cell, seen from a row or column view. `index` is the column
// index in a row view and the row index in a column view.
struct Entry {
  Index index = 0;
  Count weight = 0;
};

struct Triple {
  Index i = 0;
  Index j = 0;
  Count weight = 0;
};

// Sparse bipartite adjacency with cached degrees. Stored twice (row-major
// and column-major) so both E-step orientations sweep contiguously.
// Immutable after construction; duplicate (i, j) triples are summed and
// entries that sum to zero are dropped.
class BipartiteGraph {
 public:
  BipartiteGraph(Index m, Index n, std::vector<Triple> triples);

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index nnz() const { return static_cast<Index>(row_entries_.size()); }
  Count total_weight() const { return total_; }

  const std::vector<Count>& row_degrees() const { return row_deg_; }
  const std::vector<Count>& col_degrees() const { return col_deg_; }

  std::span<const Entry> row(Index i) const;
  std::span<const Entry> col(Index j) const;

  Count weight_at(Index i, Index j) const;

  // D = sum_ij A_ij / (m n). Throws on an all-zero graph.
  double density() const;

 private:
  Index m_ = 0, n_ = 0;
  Count total_ = 0;
  std::vector<Count> row_deg_, col_deg_;
  std::vector<Index> row_ptr_, col_ptr_;
  std::vector<Entry> row_entries_, col_entries_;
};

// theta_hat_i = d_i^r / (n sqrt(D)), lambda_hat_j = d_j^c / (m sqrt(D)).
// The normalization forces sum(theta_hat) * sum(lambda_hat) = total weight.
std::pair<Eigen::VectorXd, Eigen::VectorXd> scaled_degree_params(const BipartiteGraph& g);

}  // namespace dclbm
