#include <doctest.h>

#include <cmath>

#include "stopset/analytics.hpp"
#include "stopset/channel.hpp"
#include "stopset/rng.hpp"

using namespace stopset;

namespace {

// direct binomial tail for small eta, no stabilization tricks
double naive_pr_d_geq(std::size_t beta, std::size_t alpha, std::size_t eta, double p) {
    const std::size_t c = (beta + alpha - 1) / alpha;
    auto binom = [](std::size_t n, std::size_t k) {
        double b = 1.0;
        for (std::size_t i = 0; i < k; ++i)
            b *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        return b;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < c; ++i)
        sum += binom(eta, i) * std::pow(1.0 - p, static_cast<double>(i)) *
               std::pow(p, static_cast<double>(eta - i));
    return 1.0 - sum;
}

}  // namespace

TEST_CASE("single-pair packet capture probability") {
    CHECK(pr_ref_single(0.3, 0.0) == 1.0);
    CHECK(pr_ref_single(0.5, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(pr_ref_single(0.0, 0.25) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(pr_ref_single(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pr_ref_single(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("receiver inclusion-exclusion with the epsilon-consistent final term") {
    // single receiver reduces to the simple form
    for (double d : {0.1, 0.5, 0.9})
        for (double e : {0.2, 0.7})
            CHECK(pr_ref_receivers({d}, e) == doctest::Approx(pr_ref_single(d, e)).epsilon(1e-12));

    // hand-expanded three-term sum: 2*(0.5/0.75) - 0.5/0.875 = 16/21
    CHECK(pr_ref_receivers({0.5, 0.5}, 0.5) == doctest::Approx(16.0 / 21.0).epsilon(1e-12));

    CHECK(pr_ref_receivers({0.0}, 0.25) == doctest::Approx(0.75).epsilon(1e-12));

    std::vector<double> too_many(21, 0.5);
    CHECK_THROWS_AS(pr_ref_receivers(too_many, 0.5), std::invalid_argument);

    // monotone: a better receiver channel (smaller delta) hurts the coalition
    double prev = pr_ref_receivers({0.1, 0.5}, 0.5);
    for (double d : {0.3, 0.5, 0.7, 0.9}) {
        double cur = pr_ref_receivers({d, 0.5}, 0.5);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("collaborating eavesdroppers") {
    for (double d : {0.2, 0.8})
        CHECK(pr_ref_collab(d, {0.4}) == doctest::Approx(pr_ref_single(d, 0.4)).epsilon(1e-12));
    CHECK(pr_ref_collab(0.9, {0.3, 0.0, 0.8}) == 1.0);
    CHECK(pr_ref_collab(0.5, {0.5, 0.5}) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("general case reduces correctly") {
    CHECK(pr_ref_general({0.5}, {0.5}) == doctest::Approx(pr_ref_single(0.5, 0.5)).epsilon(1e-12));
    CHECK(pr_ref_general({0.4, 0.6}, {0.7}) ==
          doctest::Approx(pr_ref_receivers({0.4, 0.6}, 0.7)).epsilon(1e-12));
    CHECK(pr_ref_general({0.5, 0.5}, {0.5, 0.5}) ==
          doctest::Approx(pr_ref_receivers({0.5, 0.5}, 0.25)).epsilon(1e-12));
}

TEST_CASE("binomial tail closed forms") {
    for (double p : {0.1, 0.5, 0.9})
        for (std::size_t eta : {std::size_t{10}, std::size_t{200}}) {
            CHECK(pr_d_geq(1, 3, eta, p) ==
                  doctest::Approx(1.0 - std::pow(p, static_cast<double>(eta))).epsilon(1e-10));
            CHECK(pr_d_geq(3 * eta, 3, eta, p) ==
                  doctest::Approx(std::pow(1.0 - p, static_cast<double>(eta))).epsilon(1e-10));
        }

    // the spot value used throughout: eta=100, beta=1, p=2/3
    const double spot = pr_d_geq(1, 1, 100, 2.0 / 3.0);
    const double truth = 1.0 - std::pow(2.0 / 3.0, 100.0);
    CHECK(std::abs(spot - truth) <= 1e-9 * truth);

    CHECK(pr_d_geq(5, 1, 10, 0.0) == 1.0);
    CHECK(pr_d_geq(5, 1, 10, 1.0) == 0.0);
    CHECK_THROWS_AS(pr_d_geq(0, 1, 10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(pr_d_geq(11, 1, 10, 0.5), std::invalid_argument);
}

TEST_CASE("binomial tail matches direct summation") {
    Rng rng(2718);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t eta = 1 + rng.below(60);
        const std::size_t alpha = 1 + rng.below(4);
        const std::size_t beta = 1 + rng.below(alpha * eta);
        const double p = rng.uniform01() * 0.98 + 0.01;
        const double fast = pr_d_geq(beta, alpha, eta, p);
        const double slow = naive_pr_d_geq(beta, alpha, eta, p);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
}

TEST_CASE("binomial tail is monotone in beta and pr_ref") {
    double prev = 1.0;
    for (std::size_t beta = 1; beta <= 50; ++beta) {
        const double cur = pr_d_geq(beta, 1, 50, 0.6);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
    prev = 1.0;
    for (double p : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double cur = pr_d_geq(10, 1, 50, p);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("expected degrees of freedom") {
    CHECK(expected_d(1.0, 1000) == 0.0);
    CHECK(expected_d(2.0 / 3.0, 999) == doctest::Approx(333.0).epsilon(1e-12));

    // simulation cross-check at a modest size
    ChannelTopology topology({0.5}, {0.5});
    const std::size_t eta = 500, sessions = 400;
    double mean = 0.0;
    for (std::size_t s = 0; s < sessions; ++s)
        mean += static_cast<double>(run_session(topology, eta, 1, substream(271, {s})).dof);
    mean /= sessions;
    const double expect = expected_d(2.0 / 3.0, eta);
    const double sigma = std::sqrt(eta * (1.0 / 3.0) * (2.0 / 3.0) / sessions);
    CHECK(std::abs(mean - expect) < 4.0 * sigma);
}

TEST_CASE("pmf of the maximum of geometrics") {
    // m = 1 reduces to the plain geometric
    for (std::uint64_t t = 1; t <= 6; ++t)
        CHECK(geometric_max_pmf({0.3}, t) ==
              doctest::Approx(0.3 * std::pow(0.7, static_cast<double>(t - 1))).epsilon(1e-12));

    CHECK(geometric_max_pmf({0.5, 0.5}, 1) == doctest::Approx(0.25).epsilon(1e-12));

    // normalization with a truncated tail
    double sum = 0.0;
    for (std::uint64_t t = 1; t < 500; ++t) {
        const double term = geometric_max_pmf({0.5, 0.25, 0.8}, t);
        sum += term;
        if (term < 1e-15 && t > 10) break;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(geometric_max_pmf({0.5}, 0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_max_pmf({0.0}, 1), std::invalid_argument);
}

TEST_CASE("attack complexity bounds") {
    // L = 1: both bounds meet at 2^{E[D]-1} C_A
    auto b = attack_bounds(10.0, 1, 4.0);
    CHECK(b.log2_lower == doctest::Approx(10.0 - 1.0 + 2.0).epsilon(1e-12));
    CHECK(b.log2_upper == doctest::Approx(b.log2_lower).epsilon(1e-12));

    // E[D] = 0, L = 1, C_A = 1: half a guess on average
    auto tiny = attack_bounds(0.0, 1, 1.0);
    CHECK(std::exp2(tiny.log2_lower) == doctest::Approx(0.5).epsilon(1e-12));

    // lower bound decreases in L and approaches 2^{E[D]} ln2 / L
    double prev = attack_bounds(20.0, 1, 1.0).log2_lower;
    for (std::size_t l : {2, 4, 16, 128, 4096}) {
        auto cur = attack_bounds(20.0, l, 1.0);
        CHECK(cur.log2_lower < prev);
        CHECK(cur.log2_lower <= cur.log2_upper);
        prev = cur.log2_lower;
    }
    const std::size_t large = 1u << 20;
    auto asym = attack_bounds(20.0, large, 1.0);
    CHECK(asym.log2_lower ==
          doctest::Approx(20.0 + std::log2(std::log(2.0)) - std::log2(large)).epsilon(1e-3));
}

TEST_CASE("security grid skips the undefined corner") {
    std::vector<double> axis{0.0, 0.5, 1.0};
    auto rows = security_grid(1, 1, 100, 100, axis, axis);
    CHECK(rows.size() == 8);  // 9 lattice points minus (1,1)
    for (const auto& row : rows) CHECK_FALSE((row.delta == 1.0 && row.epsilon == 1.0));
}

TEST_CASE("threshold contour hugs the axes for beta=1 at large eta") {
    std::vector<double> deltas, epsilons;
    for (int i = 0; i <= 18; ++i) deltas.push_back(i * 0.05);
    for (int i = 0; i <= 400; ++i) epsilons.push_back(i * 0.0025);
    auto contour = threshold_contour(1, 1, 5000, deltas, epsilons);
    CHECK(contour.skipped_deltas.empty());
    for (const auto& pt : contour.points) CHECK(pt.epsilon < 0.01);

    // contour epsilon grows with delta: the eavesdropper must be noisier to
    // stay blocked when retransmissions multiply
    for (std::size_t i = 1; i < contour.points.size(); ++i)
        CHECK(contour.points[i].epsilon >= contour.points[i - 1].epsilon - 1e-12);
}

TEST_CASE("columns without a crossing are flagged") {
    // Pr(D >= beta) stays ~0 for epsilon in [0, 0.05] at beta = 50, eta = 100
    std::vector<double> deltas{0.0, 0.5};
    std::vector<double> epsilons{0.0, 0.02, 0.05};
    auto contour = threshold_contour(50, 1, 100, deltas, epsilons);
    CHECK(contour.points.empty());
    CHECK(contour.skipped_deltas.size() == 2);
}
