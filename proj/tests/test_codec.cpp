#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "stopset/codec.hpp"
#include "stopset/errors.hpp"

using namespace stopset;

namespace {

std::vector<BitVec> random_blocks(std::size_t count, std::size_t k, Rng& rng) {
    std::vector<BitVec> blocks;
    for (std::size_t i = 0; i < count; ++i) blocks.push_back(BitVec::random(k, rng));
    return blocks;
}

// Example-1 style code with a generator, plus an acceptable pattern.
struct Fixture {
    LdpcCode code;
    PuncturePattern pattern;
    Scrambler scr;
};

Fixture make_fixture(std::size_t n, std::uint64_t seed) {
    Fixture f;
    for (std::uint64_t attempt = 0;; ++attempt) {
        f.code = build_irregular(n, DegreeDistribution::example1(), substream(seed, {1, attempt}));
        try {
            ensure_generator(f.code);
            break;
        } catch (const RankDeficientError&) {
            continue;
        }
    }
    f.pattern = find_acceptable_pattern(f.code.graph, substream(seed, {2}));
    f.scr = gen_scrambler(f.code.gen->g.rows(), substream(seed, {3}));
    return f;
}

// Search for an instance in the |R| = N - k regime.
Fixture make_full_pattern_fixture(std::size_t n, std::uint64_t seed) {
    for (std::uint64_t attempt = 0; attempt < 400; ++attempt) {
        Fixture f;
        f.code = build_irregular(n, DegreeDistribution::example1(), substream(seed, {4, attempt}));
        f.pattern = find_acceptable_pattern(f.code.graph, substream(seed, {5, attempt}));
        if (f.pattern.punctured.size() != f.code.h.rows()) continue;
        ensure_generator(f.code);  // full-size R implies full row rank
        f.scr = gen_scrambler(f.code.gen->g.rows(), substream(seed, {6}));
        return f;
    }
    REQUIRE(false);
    return {};
}

}  // namespace

TEST_CASE("scrambler basics") {
    Scrambler one = gen_scrambler(1, 3);
    CHECK(one.s.get(0, 0));
    CHECK(one.s_inv.get(0, 0));

    Scrambler scr = gen_scrambler(40, 7);
    CHECK(multiply(scr.s, scr.s_inv) == BitMatrix::identity(40));

    CHECK_THROWS_AS(gen_scrambler(0, 1), std::invalid_argument);
}

TEST_CASE("inverse density is close to one half at k=500") {
    Scrambler scr = gen_scrambler(500, 11);
    std::size_t ones = 0;
    for (std::size_t r = 0; r < 500; ++r)
        for (std::size_t c = 0; c < 500; ++c) ones += scr.s_inv.get(r, c) ? 1 : 0;
    const double density = static_cast<double>(ones) / (500.0 * 500.0);
    CHECK(density > 0.48);
    CHECK(density < 0.52);
}

TEST_CASE("scramble/descramble round trip") {
    Scrambler scr = gen_scrambler(8, 21);
    Rng rng(5);
    BitVec zero(8);
    CHECK(scramble(zero, scr) == zero);
    for (int i = 0; i < 20; ++i) {
        BitVec m = BitVec::random(8, rng);
        CHECK(descramble(scramble(m, scr), scr) == m);
    }
    CHECK_THROWS_AS(scramble(BitVec(9), scr), std::invalid_argument);
}

TEST_CASE("a single pre-descramble bit error spreads to about half the message") {
    Rng rng(31);
    const std::size_t k = 101;
    double total = 0.0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        Scrambler scr = gen_scrambler(k, 1000 + t);
        BitVec m = BitVec::random(k, rng);
        BitVec m_prime = scramble(m, scr);
        m_prime.flip(rng.below(k));
        BitVec m_bad = descramble(m_prime, scr);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < k; ++i) errors += (m_bad.get(i) != m.get(i)) ? 1 : 0;
        CHECK(errors > 0);
        total += static_cast<double>(errors) / k;
    }
    CHECK(total / trials > 0.42);
    CHECK(total / trials < 0.58);
}

TEST_CASE("interleaver lays packets out exactly as specified") {
    LdpcCode code;
    code.h = oracles::toy7_matrix();
    code.graph = tanner_graph(code.h);
    code.block_length = 7;
    code.dimension = 4;
    ensure_generator(code);
    Scrambler scr = gen_scrambler(4, 9);

    PuncturePattern pattern;  // acceptability is irrelevant to the layout
    pattern.punctured = {2, 4, 6};
    pattern.transmitted = {0, 1, 3, 5};
    pattern.n = 4;

    Rng rng(77);
    auto blocks = random_blocks(2, 4, rng);
    PacketBatch batch = encode_batch(blocks, code, scr, pattern, 2);
    CHECK(batch.eta == 2);
    CHECK(batch.packet_bits == 4);

    // recompute the punctured blocks directly
    std::vector<BitVec> p;
    for (const auto& m : blocks) {
        BitVec cw = multiply(scramble(m, scr), code.gen->g);
        BitVec pb(4);
        for (std::size_t j = 0; j < 4; ++j) pb.set(j, cw.get(pattern.transmitted[j]));
        p.push_back(pb);
    }
    // packet 0 = (p1_1, p1_2, p2_1, p2_2); packet 1 = (p1_3, p1_4, p2_3, p2_4)
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t t = 0; t < 2; ++t) {
            CHECK(batch.packets[0]->get(b * 2 + t) == p[b].get(t));
            CHECK(batch.packets[1]->get(b * 2 + t) == p[b].get(2 + t));
        }

    CHECK(deinterleave(batch) == p);

    // single block, alpha = n: one packet equal to the punctured block
    PacketBatch whole = encode_batch({blocks[0]}, code, scr, pattern, 4);
    CHECK(whole.eta == 1);
    CHECK(*whole.packets[0] == p[0]);

    CHECK_THROWS_AS(encode_batch(blocks, code, scr, pattern, 3), std::invalid_argument);
}

TEST_CASE("bob decodes exactly; a withheld packet is not decodable") {
    Fixture f = make_fixture(100, 42);
    const std::size_t k = f.code.gen->g.rows();
    Rng rng(4);
    for (std::size_t alpha : {std::size_t{1}, std::size_t{2}}) {
        if (f.pattern.n % alpha != 0) continue;
        auto blocks = random_blocks(3, k, rng);
        PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, alpha);
        auto decode = bob_decode(batch, f.code, f.scr, f.pattern);
        REQUIRE(decode.decodable);
        CHECK(decode.blocks == blocks);

        PacketBatch damaged = batch;
        damaged.packets[1].reset();
        auto failed = bob_decode(damaged, f.code, f.scr, f.pattern);
        CHECK_FALSE(failed.decodable);
        CHECK(failed.missing_packets == std::vector<std::uint32_t>{1});
    }
}

TEST_CASE("bob round trip across many random parameter tuples") {
    Rng rng(88);
    for (int trial = 0; trial < 10; ++trial) {
        Fixture f = make_fixture(60 + 4 * trial, 500 + trial);
        const std::size_t k = f.code.gen->g.rows();
        std::vector<std::size_t> alphas;
        for (std::size_t a = 1; a <= f.pattern.n; ++a)
            if (f.pattern.n % a == 0) alphas.push_back(a);
        const std::size_t alpha = alphas[rng.below(alphas.size())];
        const std::size_t blocks_count = 1 + rng.below(4);
        auto blocks = random_blocks(blocks_count, k, rng);
        PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, alpha);
        auto decode = bob_decode(batch, f.code, f.scr, f.pattern);
        REQUIRE(decode.decodable);
        CHECK(decode.blocks == blocks);
    }
}

TEST_CASE("correct guesses recover the message on both completion paths") {
    Fixture f = make_full_pattern_fixture(100, 7);
    const std::size_t k = f.code.gen->g.rows();
    Rng rng(9);
    auto blocks = random_blocks(2, k, rng);
    PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, 1);

    // remember the true codewords to read off correct guesses
    std::vector<BitVec> codewords;
    for (const auto& m : blocks)
        codewords.push_back(multiply(scramble(m, f.scr), f.code.gen->g));

    PacketBatch received = batch;
    received.packets[3].reset();
    received.packets[10].reset();

    auto report = eve_dof_report(received, f.code, f.pattern);
    for (const auto& blk : report.blocks) {
        CHECK(blk.ml_dof == 2);
        CHECK(blk.mp_supply == 2);
        CHECK(blk.mp_supply_exact);
    }

    // ML path: free variables of each block's system
    auto words = to_erasure_words(received, f.pattern);
    std::vector<BitVec> ml_guesses;
    for (std::size_t b = 0; b < 2; ++b) {
        auto ml = ml_decode(f.code.h, words[b]);
        BitVec g(ml.dof);
        for (std::size_t i = 0; i < ml.dof; ++i)
            g.set(i, codewords[b].get(ml.residual_set[i]));
        ml_guesses.push_back(g);
    }
    auto ml_result =
        eve_guess_attack(received, f.code, f.scr, f.pattern, ml_guesses, blocks, CompletionPath::ml);
    CHECK(ml_result.overall_ber == 0.0);
    CHECK(ml_result.blocks == blocks);

    // MP path: channel-erased transmitted positions
    auto positions = mp_guess_positions(received, f.pattern);
    std::vector<BitVec> mp_guesses;
    for (std::size_t b = 0; b < 2; ++b) {
        BitVec g(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i)
            g.set(i, codewords[b].get(positions[i]));
        mp_guesses.push_back(g);
    }
    auto mp_result =
        eve_guess_attack(received, f.code, f.scr, f.pattern, mp_guesses, blocks, CompletionPath::mp);
    CHECK(mp_result.overall_ber == 0.0);
}

TEST_CASE("wrong guesses descramble to roughly half errors") {
    Fixture f = make_fixture(120, 64);
    const std::size_t k = f.code.gen->g.rows();
    Rng rng(12);
    double total = 0.0;
    int count = 0;
    for (int trial = 0; trial < 30; ++trial) {
        auto blocks = random_blocks(1, k, rng);
        PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, 1);
        PacketBatch received = batch;
        const std::size_t gap = f.code.h.rows() - f.pattern.punctured.size();
        std::vector<std::uint32_t> order(received.eta);
        for (std::size_t i = 0; i < received.eta; ++i) order[i] = static_cast<std::uint32_t>(i);
        rng.shuffle(order);
        for (std::size_t i = 0; i <= gap + 1; ++i) received.packets[order[i]].reset();
        auto words = to_erasure_words(received, f.pattern);
        auto ml = ml_decode(f.code.h, words[0]);
        if (ml.dof == 0) continue;
        BitVec codeword = multiply(scramble(blocks[0], f.scr), f.code.gen->g);
        BitVec guess(ml.dof);
        for (std::size_t i = 0; i < ml.dof; ++i) guess.set(i, codeword.get(ml.residual_set[i]));
        guess.flip(rng.below(ml.dof));  // one deliberately wrong bit
        auto result = eve_guess_attack(received, f.code, f.scr, f.pattern, {guess}, blocks,
                                       CompletionPath::ml);
        total += result.overall_ber;
        CHECK(result.overall_ber > 0.2);
        CHECK(result.overall_ber < 0.8);
        ++count;
    }
    REQUIRE(count >= 20);
    CHECK(total / count > 0.42);
    CHECK(total / count < 0.58);
}

TEST_CASE("full-size patterns give dof = alpha * erased packets on every block") {
    Fixture f = make_full_pattern_fixture(100, 21);
    const std::size_t k = f.code.gen->g.rows();
    const std::size_t nk = f.code.h.rows();
    CHECK(f.pattern.punctured.size() == nk);
    CHECK(f.pattern.n == k);  // |R| = N - k forces rate k/n = 1
    Rng rng(33);
    for (std::size_t alpha : {std::size_t{1}, std::size_t{2}}) {
        if (f.pattern.n % alpha != 0) continue;
        auto blocks = random_blocks(2, k, rng);
        PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, alpha);
        for (int trial = 0; trial < 20; ++trial) {
            PacketBatch received = batch;
            const std::size_t erase = 1 + rng.below(4);
            std::vector<std::uint32_t> order(batch.eta);
            for (std::size_t i = 0; i < batch.eta; ++i) order[i] = static_cast<std::uint32_t>(i);
            rng.shuffle(order);
            for (std::size_t i = 0; i < erase; ++i) received.packets[order[i]].reset();

            auto report = eve_dof_report(received, f.code, f.pattern);
            for (const auto& blk : report.blocks) {
                CHECK(blk.ml_dof == alpha * erase);
                CHECK(blk.mp_supply == alpha * erase);
                CHECK(blk.mp_supply_exact);
            }
            // constructive check: supplying the channel-erased bits peels the rest
            auto words = to_erasure_words(received, f.pattern);
            auto positions = mp_guess_positions(received, f.pattern);
            ErasureWord supplied = words[0];
            BitVec cw = multiply(scramble(blocks[0], f.scr), f.code.gen->g);
            for (auto p : positions) supplied.set_bit(p, cw.get(p));
            auto mp = mp_decode(f.code.graph, supplied);
            CHECK(mp.resolved);
        }
    }
}

TEST_CASE("batch file round trip with missing packets") {
    Fixture f = make_fixture(80, 99);
    const std::size_t k = f.code.gen->g.rows();
    Rng rng(6);
    auto blocks = random_blocks(3, k, rng);
    std::size_t alpha = f.pattern.n % 2 == 0 ? 2 : 1;
    PacketBatch batch = encode_batch(blocks, f.code, f.scr, f.pattern, alpha);
    batch.meta.code_ref = "code.alist";
    batch.meta.pattern_ref = "pattern.json";
    batch.packets[0].reset();
    batch.packets[4].reset();

    std::stringstream ss;
    save_batch(ss, batch);
    PacketBatch back = load_batch(ss);
    CHECK(back.alpha == batch.alpha);
    CHECK(back.eta == batch.eta);
    CHECK(back.block_count == batch.block_count);
    CHECK(back.missing() == batch.missing());
    CHECK(back.meta.code_ref == batch.meta.code_ref);
    CHECK(back.meta.pattern_ref == batch.meta.pattern_ref);
    CHECK(back.meta.scrambler_seed == batch.meta.scrambler_seed);
    for (std::size_t i = 0; i < batch.packets.size(); ++i) {
        REQUIRE(batch.packets[i].has_value() == back.packets[i].has_value());
        if (batch.packets[i]) CHECK(*batch.packets[i] == *back.packets[i]);
    }

    std::stringstream bad("{\"N\":10,\"k\":5,\"n\":4,\"alpha\":3,\"eta\":2,\"L\":1,"
                          "\"code_ref\":\"\",\"pattern_ref\":\"\",\"scrambler_seed\":0}\n");
    CHECK_THROWS(load_batch(bad));
}
