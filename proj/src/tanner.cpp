#include "stopset/tanner.hpp"

namespace stopset {

TannerGraph tanner_graph(const BitMatrix& h) {
    TannerGraph g;
    g.var_count = h.cols();
    g.check_count = h.rows();
    g.check_neighbors.resize(g.check_count);
    g.var_neighbors.resize(g.var_count);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t c = 0; c < h.cols(); ++c) {
            if (h.get(r, c)) {
                g.check_neighbors[r].push_back(static_cast<std::uint32_t>(c));
                g.var_neighbors[c].push_back(static_cast<std::uint32_t>(r));
            }
        }
    }
    return g;
}

BitMatrix to_matrix(const TannerGraph& graph) {
    BitMatrix h(graph.check_count, graph.var_count);
    for (std::size_t r = 0; r < graph.check_count; ++r)
        for (auto v : graph.check_neighbors[r]) h.set(r, v, true);
    return h;
}

}  // namespace stopset
