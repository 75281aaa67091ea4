#pragma once

#include <cstdint>
#include <vector>

#include "stopset/bitmatrix.hpp"

namespace stopset {

// Bipartite adjacency between variable nodes and check nodes. An edge (i,j)
// is present iff H(i,j) = 1; duplicate edges between the same node pair are
// never stored.
struct TannerGraph {
    std::size_t var_count = 0;
    std::size_t check_count = 0;
    std::vector<std::vector<std::uint32_t>> check_neighbors;  // per check, ascending var indices
    std::vector<std::vector<std::uint32_t>> var_neighbors;    // per variable, ascending check indices

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& nb : check_neighbors) e += nb.size();
        return e;
    }
};

// Adjacency exactly matching the nonzero entries of H.
TannerGraph tanner_graph(const BitMatrix& h);

// Inverse construction; rebuilds the parity-check matrix from the graph.
BitMatrix to_matrix(const TannerGraph& graph);

}  // namespace stopset
