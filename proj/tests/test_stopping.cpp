#include <doctest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "stopset/erasure.hpp"
#include "stopset/stopping.hpp"

using namespace stopset;

namespace {

std::uint32_t to_mask(const std::vector<std::uint32_t>& set) {
    std::uint32_t mask = 0;
    for (auto v : set) mask |= (1u << v);
    return mask;
}

}  // namespace

TEST_CASE("the {v3,v5} pair is its own maximal stopping set") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());
    std::vector<std::uint32_t> a{2, 4};
    CHECK(find_maximal(g, a) == a);

    CHECK(find_maximal(g, std::vector<std::uint32_t>{}).empty());

    std::vector<std::uint32_t> single{0};
    CHECK(find_maximal(g, single).empty());
}

TEST_CASE("find_maximal agrees with subset enumeration on the toy graph") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());
    auto table = oracles::maximal_stopping_table(g);
    for (std::uint32_t mask = 0; mask < (1u << 7); ++mask) {
        std::vector<std::uint32_t> subset;
        for (std::uint32_t v = 0; v < 7; ++v)
            if ((mask >> v) & 1) subset.push_back(v);
        CHECK(to_mask(find_maximal(g, subset)) == table[mask]);
    }
}

TEST_CASE("find_maximal output is a stopping set contained in its input") {
    Rng rng(808);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 8 + rng.below(8);
        const std::size_t m = 3 + rng.below(n - 3);
        TannerGraph g = tanner_graph(oracles::random_sparse_matrix(n, m, rng));
        std::vector<std::uint32_t> a;
        for (std::uint32_t v = 0; v < n; ++v)
            if (rng.bernoulli(0.5)) a.push_back(v);
        auto s = find_maximal(g, a);
        CHECK(std::includes(a.begin(), a.end(), s.begin(), s.end()));
        // Definition audit: every neighboring check touches the set >= twice
        std::set<std::uint32_t> in_s(s.begin(), s.end());
        for (std::size_t c = 0; c < g.check_count; ++c) {
            int touched = 0;
            for (auto v : g.check_neighbors[c]) touched += in_s.count(v) ? 1 : 0;
            CHECK(touched != 1);
        }
    }
}

TEST_CASE("maximal stopping sets are union-closed") {
    Rng rng(909);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 8 + rng.below(8);
        const std::size_t m = 3 + rng.below(n - 3);
        TannerGraph g = tanner_graph(oracles::random_sparse_matrix(n, m, rng));
        std::vector<std::uint32_t> a, b;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (rng.bernoulli(0.4)) a.push_back(v);
            if (rng.bernoulli(0.4)) b.push_back(v);
        }
        std::vector<std::uint32_t> both(a);
        both.insert(both.end(), b.begin(), b.end());
        const std::uint32_t united = to_mask(find_maximal(g, both));
        const std::uint32_t parts = to_mask(find_maximal(g, a)) | to_mask(find_maximal(g, b));
        CHECK((united & parts) == parts);
    }
}

TEST_CASE("pattern search output is always acceptable") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        PuncturePattern p = find_acceptable_pattern(g, seed);
        CHECK(p.punctured.size() + p.transmitted.size() == 7);
        CHECK(p.n == p.transmitted.size());
        auto report = verify_acceptable(g, p);
        CHECK(report.acceptable);
    }
}

TEST_CASE("pattern search is acceptable on random codes and deterministic per seed") {
    Rng rng(321);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 10 + rng.below(10);
        const std::size_t m = 4 + rng.below(n - 4);
        TannerGraph g = tanner_graph(oracles::random_sparse_matrix(n, m, rng));
        PuncturePattern p = find_acceptable_pattern(g, trial);
        CHECK(verify_acceptable(g, p).acceptable);
        CHECK(find_acceptable_pattern(g, trial).punctured == p.punctured);
    }
}

TEST_CASE("verify_acceptable flags bad patterns with the offending node") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());

    PuncturePattern empty_r;
    for (std::uint32_t v = 0; v < 7; ++v) empty_r.transmitted.push_back(v);
    empty_r.n = 7;
    auto rep = verify_acceptable(g, empty_r);
    CHECK_FALSE(rep.acceptable);
    REQUIRE(rep.offending_node.has_value());

    PuncturePattern with_ss;
    with_ss.punctured = {2, 4};
    for (std::uint32_t v : {0u, 1u, 3u, 5u, 6u}) with_ss.transmitted.push_back(v);
    with_ss.n = 5;
    rep = verify_acceptable(g, with_ss);
    CHECK_FALSE(rep.acceptable);
    CHECK(rep.reason == "stopping set inside R");

    PuncturePattern not_partition;
    not_partition.punctured = {0, 0};
    rep = verify_acceptable(g, not_partition);
    CHECK_FALSE(rep.acceptable);
}

TEST_CASE("puncturing to the decoding threshold: one extra erasure stalls peeling") {
    Rng rng(606);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 10 + rng.below(8);
        const std::size_t m = 4 + rng.below(n - 4);
        BitMatrix h = oracles::random_sparse_matrix(n, m, rng);
        TannerGraph g = tanner_graph(h);
        PuncturePattern p = find_acceptable_pattern(g, 1000 + trial);
        BitVec codeword = oracles::random_codeword(h, rng);

        ErasureWord base(n);
        for (std::size_t i = 0; i < n; ++i) base.set_bit(i, codeword.get(i));
        for (auto v : p.punctured) base.erase(v);
        CHECK(mp_decode(g, base).resolved);

        for (auto q : p.transmitted) {
            ErasureWord y = base;
            y.erase(q);
            CHECK_FALSE(mp_decode(g, y).resolved);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("pattern JSON round trip") {
    TannerGraph g = tanner_graph(oracles::toy7_matrix());
    PuncturePattern p = find_acceptable_pattern(g, 77);
    p.code_ref = "toy7.alist";
    std::stringstream ss;
    save_pattern(ss, p);
    PuncturePattern back = load_pattern(ss, 7);
    CHECK(back.punctured == p.punctured);
    CHECK(back.transmitted == p.transmitted);
    CHECK(back.n == p.n);
    CHECK(back.seed == p.seed);
    CHECK(back.code_ref == p.code_ref);

    std::stringstream bad("{\"code_ref\":\"x\",\"seed\":1,\"R\":[0,1],\"n\":9}");
    CHECK_THROWS(load_pattern(bad, 7));
}
