#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "stopset/errors.hpp"
#include "stopset/ldpc.hpp"

using namespace stopset;

namespace {

std::map<unsigned, double> var_edge_fractions(const TannerGraph& g) {
    std::map<unsigned, std::size_t> edges_by_degree;
    std::size_t total = 0;
    for (const auto& nb : g.var_neighbors) {
        edges_by_degree[static_cast<unsigned>(nb.size())] += nb.size();
        total += nb.size();
    }
    std::map<unsigned, double> fr;
    for (auto& [d, e] : edges_by_degree) fr[d] = static_cast<double>(e) / static_cast<double>(total);
    return fr;
}

std::map<unsigned, double> check_edge_fractions(const TannerGraph& g) {
    std::map<unsigned, std::size_t> edges_by_degree;
    std::size_t total = 0;
    for (const auto& nb : g.check_neighbors) {
        edges_by_degree[static_cast<unsigned>(nb.size())] += nb.size();
        total += nb.size();
    }
    std::map<unsigned, double> fr;
    for (auto& [d, e] : edges_by_degree) fr[d] = static_cast<double>(e) / static_cast<double>(total);
    return fr;
}

}  // namespace

TEST_CASE("regular construction hits exact weight histograms") {
    LdpcCode code = build_regular(1000, 4, 8, 7);
    CHECK(code.h.rows() == 500);
    CHECK(code.h.cols() == 1000);
    CHECK(code.dimension == 500);
    for (const auto& nb : code.graph.var_neighbors) CHECK(nb.size() == 4);
    for (const auto& nb : code.graph.check_neighbors) CHECK(nb.size() == 8);
}

TEST_CASE("small regular construction") {
    LdpcCode code = build_regular(8, 2, 4, 3);
    CHECK(code.h.rows() == 4);
    CHECK(code.h.cols() == 8);
    for (const auto& nb : code.graph.var_neighbors) CHECK(nb.size() == 2);
    for (const auto& nb : code.graph.check_neighbors) CHECK(nb.size() == 4);
}

TEST_CASE("regular construction rejects infeasible parameters") {
    CHECK_THROWS_AS(build_regular(12, 3, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_regular(4, 1, 8, 1), std::invalid_argument);
}

TEST_CASE("construction is deterministic in the seed") {
    CHECK(build_regular(200, 3, 6, 5).h == build_regular(200, 3, 6, 5).h);
    CHECK(build_regular(200, 3, 6, 5).h != build_regular(200, 3, 6, 6).h);
    DegreeDistribution d = DegreeDistribution::example1();
    CHECK(build_irregular(500, d, 9).h == build_irregular(500, d, 9).h);
}

TEST_CASE("no duplicate edges in constructed graphs") {
    LdpcCode code = build_regular(120, 4, 8, 11);
    for (const auto& nb : code.graph.check_neighbors) {
        std::set<std::uint32_t> uniq(nb.begin(), nb.end());
        CHECK(uniq.size() == nb.size());
    }
}

TEST_CASE("irregular ensemble matches its degree distribution") {
    DegreeDistribution dist = DegreeDistribution::example1();
    LdpcCode code = build_irregular(1000, dist, 42);
    CHECK(code.h.rows() == 500);
    CHECK(code.h.cols() == 1000);

    auto vf = var_edge_fractions(code.graph);
    for (const auto& [degree, fraction] : dist.var_fractions)
        CHECK(std::abs(vf[degree] - fraction) < 0.02);
    auto cf = check_edge_fractions(code.graph);
    for (const auto& [degree, fraction] : dist.check_fractions)
        CHECK(std::abs(cf[degree] - fraction) < 0.02);

    // socket totals agree between the two sides
    std::size_t var_edges = 0, check_edges = 0;
    for (const auto& nb : code.graph.var_neighbors) var_edges += nb.size();
    for (const auto& nb : code.graph.check_neighbors) check_edges += nb.size();
    CHECK(var_edges == check_edges);
}

TEST_CASE("single-coefficient distributions give a 2-regular graph") {
    DegreeDistribution dist;
    dist.var_fractions = {{2, 1.0}};
    dist.check_fractions = {{2, 1.0}};
    LdpcCode code = build_irregular(4, dist, 17);
    CHECK(code.graph.var_count == 4);
    CHECK(code.graph.check_count == 4);
    for (const auto& nb : code.graph.var_neighbors) CHECK(nb.size() == 2);
    for (const auto& nb : code.graph.check_neighbors) CHECK(nb.size() == 2);
}

TEST_CASE("degree distribution validation") {
    DegreeDistribution bad;
    bad.var_fractions = {{2, 0.6}, {3, 0.3}};  // sums to 0.9
    bad.check_fractions = {{6, 1.0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("systematic generator for the toy code") {
    BitMatrix h = oracles::toy7_matrix();
    SystematicGenerator gen = derive_systematic_generator(h);
    CHECK(gen.g.rows() == 4);
    CHECK(gen.g.cols() == 7);

    BitMatrix zero(4, 3);
    CHECK(multiply(gen.g, h.transpose()) == zero);

    REQUIRE(gen.systematic_positions.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(gen.g.get(i, gen.systematic_positions[j]) == (i == j));
}

TEST_CASE("trivial single-check code") {
    SystematicGenerator gen = derive_systematic_generator(oracles::make_matrix({{1, 1}}));
    CHECK(gen.g.rows() == 1);
    CHECK(gen.g.get(0, 0));
    CHECK(gen.g.get(0, 1));
}

TEST_CASE("rank-deficient H is rejected with the deficiency named") {
    BitMatrix h = oracles::make_matrix({{1, 0, 1}, {1, 0, 1}});
    try {
        derive_systematic_generator(h);
        FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
        CHECK(e.rank == 1);
        CHECK(e.rows == 2);
    }
}

TEST_CASE("all messages encode to distinct codewords satisfying H") {
    LdpcCode code = build_regular(16, 3, 6, 21);
    const SystematicGenerator& gen = ensure_generator(code);
    const std::size_t k = gen.g.rows();
    REQUIRE(k == 8);
    std::set<std::vector<std::uint64_t>> words;
    for (std::uint32_t msg = 0; msg < (1u << k); ++msg) {
        BitVec m(k);
        for (std::size_t i = 0; i < k; ++i) m.set(i, (msg >> i) & 1);
        BitVec b = multiply(m, gen.g);
        for (std::size_t r = 0; r < code.h.rows(); ++r) CHECK_FALSE(code.h.row_vec(r).dot(b));
        words.insert(b.words());
    }
    CHECK(words.size() == (std::size_t{1} << k));
}

TEST_CASE("tanner graph adjacency matches nonzero entries") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());
    CHECK(g.check_neighbors[0] == std::vector<std::uint32_t>{0, 2, 4, 6});
    CHECK(g.check_neighbors[1] == std::vector<std::uint32_t>{1, 2, 4});
    CHECK(g.check_neighbors[2] == std::vector<std::uint32_t>{3, 5, 6});
    CHECK(g.var_neighbors[2] == std::vector<std::uint32_t>{0, 1});

    TannerGraph empty = tanner_graph(BitMatrix(3, 5));
    CHECK(empty.edge_count() == 0);

    CHECK(to_matrix(g) == oracles::toy7_matrix());
}

TEST_CASE("alist round trip") {
    LdpcCode code = build_regular(48, 3, 6, 4);
    std::stringstream ss;
    save_alist(ss, code.h);
    BitMatrix back = load_alist(ss);
    CHECK(back == code.h);
}

TEST_CASE("alist loader rejects malformed input") {
    std::stringstream truncated("8 4\n2 4\n2 2 2");
    CHECK_THROWS(load_alist(truncated));

    // weight line claims 2 but adjacency lists only one check
    std::stringstream lying("2 1\n2 2\n2 1\n2\n1 0\n1 0\n1 2\n");
    CHECK_THROWS(load_alist(lying));
}
