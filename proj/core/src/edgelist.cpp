#include "dclbm/edgelist.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dclbm {

namespace {

Count parse_weight(const std::string& token, std::size_t line_no) {
  Count value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("non-integer weight '" + token + "' at line " +
                                std::to_string(line_no));
  }
  if (value < 0) {
    throw std::invalid_argument("negative weight at line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

IngestResult ingest_edge_list(const std::filesystem::path& path, IngestMode mode) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path.string());

  std::unordered_map<std::string, Index> row_map, col_map;
  std::vector<std::string> row_ids, col_ids;
  std::vector<Triple> triples;

  auto intern = [](std::unordered_map<std::string, Index>& map, std::vector<std::string>& ids,
                   const std::string& id) {
    const auto [it, inserted] = map.try_emplace(id, static_cast<Index>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string row_id, col_id, weight_tok;
    if (!(fields >> row_id)) continue;  // blank line
    if (!(fields >> col_id)) {
      throw std::invalid_argument("malformed line " + std::to_string(line_no) +
                                  ": expected 'row_id col_id [weight]'");
    }
    Count weight = 1;
    if (fields >> weight_tok) {
      weight = mode == IngestMode::counts ? parse_weight(weight_tok, line_no) : 1;
    }
    triples.push_back(Triple{intern(row_map, row_ids, row_id), intern(col_map, col_ids, col_id),
                             weight});
  }
  if (triples.empty()) throw std::runtime_error("empty edge list: " + path.string());

  BipartiteGraph summed(static_cast<Index>(row_ids.size()), static_cast<Index>(col_ids.size()),
                        std::move(triples));
  if (mode == IngestMode::counts) {
    return IngestResult{std::move(summed), std::move(row_ids), std::move(col_ids)};
  }

  // Binary: collapse every summed positive entry to 1.
  std::vector<Triple> ones;
  ones.reserve(static_cast<std::size_t>(summed.nnz()));
  for (Index i = 0; i < summed.rows(); ++i) {
    for (const Entry& e : summed.row(i)) ones.push_back(Triple{i, e.index, 1});
  }
  return IngestResult{BipartiteGraph(summed.rows(), summed.cols(), std::move(ones)),
                      std::move(row_ids), std::move(col_ids)};
}

void write_edge_list(const std::filesystem::path& path, const BipartiteGraph& g,
                     const std::vector<std::string>& row_ids,
                     const std::vector<std::string>& col_ids) {
  if (static_cast<Index>(row_ids.size()) != g.rows() ||
      static_cast<Index>(col_ids.size()) != g.cols()) {
    throw std::invalid_argument("id vectors do not match graph dimensions");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path.string());
  for (Index i = 0; i < g.rows(); ++i) {
    for (const Entry& e : g.row(i)) {
      out << row_ids[static_cast<std::size_t>(i)] << '\t'
          << col_ids[static_cast<std::size_t>(e.index)] << '\t' << e.weight << '\n';
    }
  }
}

}  // namespace dclbm
