#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dclbm/bigraph.hpp"

namespace dclbm {

enum class IngestMode { counts, binary };

// Graph plus the original string ids, dense-indexed in first-appearance
// order. Needed to join fitted clusters back to external tables.
struct IngestResult {
  BipartiteGraph graph;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

// Whitespace-separated lines "row_id col_id [weight ...]". A missing weight
// defaults to 1; extra columns (e.g. a ratings timestamp) are ignored. In
// binary mode any positive accumulated weight collapses to 1.
IngestResult ingest_edge_list(const std::filesystem::path& path, IngestMode mode);

// Inverse of ingest (counts mode): one "row_id<TAB>col_id<TAB>weight" line
// per stored entry, in row-major order.
void write_edge_list(const std::filesystem::path& path, const BipartiteGraph& g,
                     const std::vector<std::string>& row_ids,
                     const std::vector<std::string>& col_ids);

}  // namespace dclbm
