#include "dclbm/bigraph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dclbm {

BipartiteGraph::BipartiteGraph(Index m, Index n, std::vector<Triple> triples) : m_(m), n_(n) {
  if (m <= 0 || n <= 0) {
    throw std::invalid_argument("graph dimensions must be positive");
  }
  for (const Triple& t : triples) {
    if (t.i < 0 || t.i >= m || t.j < 0 || t.j >= n) {
      throw std::out_of_range("edge index (" + std::to_string(t.i) + "," + std::to_string(t.j) +
                              ") outside " + std::to_string(m) + "x" + std::to_string(n));
    }
    if (t.weight < 0) {
      throw std::invalid_argument("negative edge weight at (" + std::to_string(t.i) + "," +
                                  std::to_string(t.j) + ")");
    }
  }

  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  row_deg_.assign(static_cast<std::size_t>(m), 0);
  col_deg_.assign(static_cast<std::size_t>(n), 0);
  row_ptr_.assign(static_cast<std::size_t>(m) + 1, 0);
  col_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);

  std::vector<Triple> coalesced;
  coalesced.reserve(triples.size());
  for (const Triple& t : triples) {
    if (!coalesced.empty() && coalesced.back().i == t.i && coalesced.back().j == t.j) {
      coalesced.back().weight += t.weight;
    } else {
      coalesced.push_back(t);
    }
  }
  std::erase_if(coalesced, [](const Triple& t) { return t.weight == 0; });

  row_entries_.reserve(coalesced.size());
  for (const Triple& t : coalesced) {
    row_entries_.push_back(Entry{t.j, t.weight});
    row_ptr_[static_cast<std::size_t>(t.i) + 1]++;
    row_deg_[static_cast<std::size_t>(t.i)] += t.weight;
    col_deg_[static_cast<std::size_t>(t.j)] += t.weight;
    col_ptr_[static_cast<std::size_t>(t.j) + 1]++;
    total_ += t.weight;
  }
  for (Index i = 0; i < m; ++i) row_ptr_[i + 1] += row_ptr_[i];
  for (Index j = 0; j < n; ++j) col_ptr_[j + 1] += col_ptr_[j];

  // Column view, filled in (j, i)-sorted order.
  col_entries_.resize(coalesced.size());
  std::vector<Index> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (const Triple& t : coalesced) {
    col_entries_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(t.j)]++)] =
        Entry{t.i, t.weight};
  }
}

std::span<const Entry> BipartiteGraph::row(Index i) const {
  const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
  const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
  return {row_entries_.data() + b, e - b};
}

std::span<const Entry> BipartiteGraph::col(Index j) const {
  const auto b = static_cast<std::size_t>(col_ptr_[static_cast<std::size_t>(j)]);
  const auto e = static_cast<std::size_t>(col_ptr_[static_cast<std::size_t>(j) + 1]);
  return {col_entries_.data() + b, e - b};
}

Count BipartiteGraph::weight_at(Index i, Index j) const {
  const auto r = row(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const Entry& e, Index col) { return e.index < col; });
  return (it != r.end() && it->index == j) ? it->weight : 0;
}

double BipartiteGraph::density() const {
  if (total_ == 0) {
    throw std::domain_error("degenerate graph: zero density");
  }
  return static_cast<double>(total_) / (static_cast<double>(m_) * static_cast<double>(n_));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> scaled_degree_params(const BipartiteGraph& g) {
  const double sqrt_d = std::sqrt(g.density());
  Eigen::VectorXd theta(g.rows());
  Eigen::VectorXd lambda(g.cols());
  for (Index i = 0; i < g.rows(); ++i) {
    theta[i] = static_cast<double>(g.row_degrees()[static_cast<std::size_t>(i)]) /
               (static_cast<double>(g.cols()) * sqrt_d);
  }
  for (Index j = 0; j < g.cols(); ++j) {
    lambda[j] = static_cast<double>(g.col_degrees()[static_cast<std::size_t>(j)]) /
                (static_cast<double>(g.rows()) * sqrt_d);
  }
  return {std::move(theta), std::move(lambda)};
}

}  // namespace dclbm
