#include "stopset/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "stopset/errors.hpp"
#include "stopset/rng.hpp"
#include "stopset/util.hpp"

namespace stopset::experiments {

namespace {

// Shortest representation that parses back exactly; keeps CSV output
// byte-identical run to run.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = std::strtod(buf, nullptr);
    if (parsed == v) {
        for (int precision = 1; precision < 17; ++precision) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", precision, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

std::vector<BitVec> random_blocks(std::size_t count, std::size_t k, Rng& rng) {
    std::vector<BitVec> blocks;
    blocks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) blocks.push_back(BitVec::random(k, rng));
    return blocks;
}

}  // namespace

IrregularSpec example1_spec(std::size_t n) {
    IrregularSpec spec;
    spec.n = n;
    spec.name = "example1";
    spec.dist = DegreeDistribution::example1();
    return spec;
}

DegreeDistribution load_distribution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open distribution file: " + path);
    nlohmann::json j;
    in >> j;
    DegreeDistribution dist;
    for (auto& [key, value] : j.at("var").items())
        dist.var_fractions.push_back({static_cast<unsigned>(std::stoul(key)), value.get<double>()});
    for (auto& [key, value] : j.at("check").items())
        dist.check_fractions.push_back(
            {static_cast<unsigned>(std::stoul(key)), value.get<double>()});
    std::sort(dist.var_fractions.begin(), dist.var_fractions.end());
    std::sort(dist.check_fractions.begin(), dist.check_fractions.end());
    dist.validate();
    return dist;
}

LdpcCode make_code(const CodeSpec& spec, std::uint64_t seed) {
    if (const auto* regular = std::get_if<RegularSpec>(&spec))
        return build_regular(regular->n, regular->wc, regular->wr, seed);
    if (const auto* irregular = std::get_if<IrregularSpec>(&spec))
        return build_irregular(irregular->n, irregular->dist, seed);
    const auto& file = std::get<FileSpec>(spec);
    LdpcCode code;
    code.h = load_alist_file(file.path);
    code.graph = tanner_graph(code.h);
    code.block_length = code.h.cols();
    code.dimension = code.h.cols() - code.h.rows();
    code.seed = seed;
    return code;
}

LdpcCode make_encodable_code(const CodeSpec& spec, std::uint64_t seed) {
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        LdpcCode code = make_code(spec, substream(seed, {0xc0de, attempt}));
        try {
            ensure_generator(code);
            return code;
        } catch (const RankDeficientError& e) {
            logging::info("resampling rank-deficient instance (attempt " +
                          std::to_string(attempt) + "): " + e.what());
        }
    }
    throw ConstructionError("make_encodable_code: no full-rank instance in 64 attempts");
}

nlohmann::json code_spec_json(const CodeSpec& spec) {
    nlohmann::json j;
    if (const auto* regular = std::get_if<RegularSpec>(&spec)) {
        j["type"] = "regular";
        j["n"] = regular->n;
        j["wc"] = regular->wc;
        j["wr"] = regular->wr;
    } else if (const auto* irregular = std::get_if<IrregularSpec>(&spec)) {
        j["type"] = "irregular";
        j["n"] = irregular->n;
        j["name"] = irregular->name;
    } else {
        j["type"] = "file";
        j["path"] = std::get<FileSpec>(spec).path;
    }
    return j;
}

std::optional<PuncturePattern> find_pattern_at_least(const TannerGraph& graph,
                                                     std::uint64_t seed, std::size_t min_size,
                                                     int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        PuncturePattern pattern =
            find_acceptable_pattern(graph, substream(seed, {0xbe7, static_cast<std::uint64_t>(attempt)}));
        if (pattern.punctured.size() >= min_size) return pattern;
    }
    return std::nullopt;
}

FullPatternInstance find_full_pattern_instance(const CodeSpec& spec, std::uint64_t seed,
                                               int max_tries) {
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        LdpcCode code = make_code(spec, substream(seed, {0xf11, static_cast<std::uint64_t>(attempt)}));
        PuncturePattern pattern =
            find_acceptable_pattern(code.graph, substream(seed, {0xf12, static_cast<std::uint64_t>(attempt)}));
        if (pattern.punctured.size() != code.h.rows()) continue;
        ensure_generator(code);  // |R| = N-k certifies full row rank
        FullPatternInstance instance;
        instance.code = std::move(code);
        instance.pattern = std::move(pattern);
        return instance;
    }
    throw ConstructionError("find_full_pattern_instance: no |R| = N-k instance in " +
                            std::to_string(max_tries) + " attempts");
}

PatternStats pattern_stats(const PatternStatsConfig& config) {
    if (config.samples < 1) throw std::invalid_argument("pattern_stats: samples >= 1");
    const std::size_t every = std::max<std::size_t>(1, config.new_code_every);

    PatternStats stats;
    stats.sizes.assign(config.samples, 0);
    parallel_for(config.samples, config.threads, [&](std::size_t i) {
        LdpcCode code = make_code(config.spec, substream(config.seed, {0x9a1, i / every}));
        PuncturePattern pattern =
            find_acceptable_pattern(code.graph, substream(config.seed, {0x9a2, i}));
        stats.sizes[i] = pattern.punctured.size();
    });

    double sum = 0.0;
    for (auto s : stats.sizes) {
        stats.histogram[s]++;
        sum += static_cast<double>(s);
    }
    stats.mean = sum / static_cast<double>(config.samples);
    double var = 0.0;
    for (auto s : stats.sizes) {
        const double d = static_cast<double>(s) - stats.mean;
        var += d * d;
    }
    stats.variance = config.samples > 1 ? var / static_cast<double>(config.samples - 1) : 0.0;
    std::size_t best = 0;
    for (const auto& [size, count] : stats.histogram) {
        if (count >= best) {
            best = count;
            stats.mode = size;
        }
    }
    return stats;
}

void write_pattern_stats_csv(std::ostream& out, const PatternStats& stats,
                             const std::string& config_hash) {
    out << "pattern_size,count\n";
    for (const auto& [size, count] : stats.histogram) out << size << ',' << count << '\n';
    out << "# config_hash=" << config_hash << " mean=" << fmt(stats.mean)
        << " variance=" << fmt(stats.variance) << " mode=" << stats.mode << '\n';
}

SurfaceResult surface(const SurfaceConfig& config) {
    if (config.grid < 2) throw std::invalid_argument("surface: grid resolution >= 2");
    std::vector<double> axis(config.grid);
    for (std::size_t i = 0; i < config.grid; ++i)
        axis[i] = static_cast<double>(i) / static_cast<double>(config.grid - 1);
    const std::size_t n = config.n ? config.n : config.alpha * config.eta;

    SurfaceResult result;
    result.rows = security_grid(config.beta, config.alpha, config.eta, n, axis, axis);
    if (config.with_contour)
        result.contour = threshold_contour(config.beta, config.alpha, config.eta, axis, axis);
    return result;
}

void write_surface_csv(std::ostream& out, const SurfaceResult& result,
                       const std::string& config_hash) {
    out << "delta,epsilon,pr_ref,pr_d_geq,expected_d\n";
    for (const auto& row : result.rows)
        out << fmt(row.delta) << ',' << fmt(row.epsilon) << ',' << fmt(row.pr_ref) << ','
            << fmt(row.pr_d_geq) << ',' << fmt(row.expected_d) << '\n';
    out << "# config_hash=" << config_hash << '\n';
}

void write_contour_csv(std::ostream& out, const ContourResult& contour,
                       const std::string& config_hash) {
    out << "delta,epsilon\n";
    for (const auto& pt : contour.points) out << fmt(pt.delta) << ',' << fmt(pt.epsilon) << '\n';
    out << "# config_hash=" << config_hash << " skipped=" << contour.skipped_deltas.size() << '\n';
}

std::vector<std::size_t> paper_gamma_list() {
    return {1, 2, 3, 4, 5, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100, 200, 300, 400};
}

AttackSimResult attack_sim(const AttackSimConfig& config) {
    const std::vector<std::size_t> gammas =
        config.gammas.empty() ? paper_gamma_list() : config.gammas;
    if (config.trials < 1 || config.blocks < 1)
        throw std::invalid_argument("attack_sim: trials and blocks must be positive");

    const IrregularSpec spec = example1_spec(config.n);
    std::vector<std::vector<AttackTrial>> per_gamma(gammas.size());
    std::vector<std::size_t> resamples(gammas.size(), 0);

    parallel_for(gammas.size(), config.threads, [&](std::size_t gi) {
        const std::size_t gamma = gammas[gi];
        LdpcCode code;
        Scrambler scrambler;
        PuncturePattern pattern;
        std::size_t k = 0;

        for (std::size_t t = 0; t < config.trials; ++t) {
            if (t % config.code_every == 0) {
                const std::uint64_t code_round = t / config.code_every;
                code = make_encodable_code(CodeSpec{spec},
                                           substream(config.seed, {0xa7c, gamma, code_round}));
                k = code.gen->g.rows();
                scrambler = gen_scrambler(k, substream(config.seed, {0xa7d, gamma, code_round}));
                pattern = PuncturePattern{};
            }
            if (t % config.pattern_every == 0 || pattern.transmitted.empty()) {
                auto found = find_pattern_at_least(
                    code.graph, substream(config.seed, {0xa7e, gamma, t / config.pattern_every}),
                    config.min_pattern, 400);
                if (!found) {
                    // hopeless instance; swap in a fresh code
                    code = make_encodable_code(
                        CodeSpec{spec}, substream(config.seed, {0xa7f, gamma, t}));
                    k = code.gen->g.rows();
                    scrambler = gen_scrambler(k, substream(config.seed, {0xa80, gamma, t}));
                    found = find_pattern_at_least(
                        code.graph, substream(config.seed, {0xa81, gamma, t}), config.min_pattern,
                        400);
                    if (!found)
                        throw ConstructionError("attack_sim: cannot reach the pattern-size floor");
                }
                pattern = *found;
            }
            if (pattern.n % config.alpha != 0)
                throw std::invalid_argument("attack_sim: alpha does not divide n=" +
                                            std::to_string(pattern.n));

            Rng rng(substream(config.seed, {0xa82, gamma, t}));
            auto messages = random_blocks(config.blocks, k, rng);
            PacketBatch batch = encode_batch(messages, code, scrambler, pattern, config.alpha);

            std::vector<BitVec> codewords;
            for (const auto& m : messages)
                codewords.push_back(multiply(scramble(m, scrambler), code.gen->g));

            // erase enough packets that the ML system has >= gamma freedoms
            std::vector<std::uint32_t> order(batch.eta);
            std::iota(order.begin(), order.end(), 0);
            std::size_t target = std::max<std::size_t>(
                1, (gamma + config.alpha - 1) / config.alpha);
            PacketBatch received;
            DecodeResult ml;
            for (;; ++target) {
                if (target > batch.eta)
                    throw ConstructionError("attack_sim: gamma exceeds the erasable budget");
                rng.shuffle(order);
                received = batch;
                for (std::size_t i = 0; i < target; ++i) received.packets[order[i]].reset();
                ml = ml_decode(code.h, to_erasure_words(received, pattern)[0]);
                if (ml.dof >= gamma) break;
                ++resamples[gi];
                logging::debug("attack_sim: dof " + std::to_string(ml.dof) + " < gamma " +
                               std::to_string(gamma) + ", widening erasures");
            }

            // correct guesses with exactly gamma flipped bits; flip positions
            // are drawn per block
            auto flip_some = [&](BitVec& guess) {
                std::vector<std::uint32_t> idx(guess.size());
                std::iota(idx.begin(), idx.end(), 0);
                rng.shuffle(idx);
                for (std::size_t i = 0; i < gamma; ++i) guess.flip(idx[i]);
            };

            std::vector<BitVec> ml_guesses;
            for (std::size_t b = 0; b < config.blocks; ++b) {
                BitVec guess(ml.dof);
                for (std::size_t i = 0; i < ml.dof; ++i)
                    guess.set(i, codewords[b].get(ml.residual_set[i]));
                flip_some(guess);
                ml_guesses.push_back(std::move(guess));
            }
            const auto mp_positions = mp_guess_positions(received, pattern);
            std::vector<BitVec> mp_guesses;
            for (std::size_t b = 0; b < config.blocks; ++b) {
                BitVec guess(mp_positions.size());
                for (std::size_t i = 0; i < mp_positions.size(); ++i)
                    guess.set(i, codewords[b].get(mp_positions[i]));
                flip_some(guess);
                mp_guesses.push_back(std::move(guess));
            }

            AttackTrial trial;
            trial.gamma = gamma;
            trial.trial = t;
            trial.dof = ml.dof;
            trial.ber_ml = eve_guess_attack(received, code, scrambler, pattern, ml_guesses,
                                            messages, CompletionPath::ml)
                               .overall_ber;
            trial.ber_mp = eve_guess_attack(received, code, scrambler, pattern, mp_guesses,
                                            messages, CompletionPath::mp)
                               .overall_ber;
            per_gamma[gi].push_back(trial);
        }
    });

    AttackSimResult result;
    double sum_mp = 0.0, sum_ml = 0.0;
    std::size_t counted = 0;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        result.erasure_resamples += resamples[gi];
        double gsum_mp = 0.0, gsum_ml = 0.0;
        for (const auto& trial : per_gamma[gi]) {
            result.trials.push_back(trial);
            gsum_mp += trial.ber_mp;
            gsum_ml += trial.ber_ml;
            if (trial.gamma >= 1) {
                sum_mp += trial.ber_mp;
                sum_ml += trial.ber_ml;
                ++counted;
                result.min_ber = std::min({result.min_ber, trial.ber_mp, trial.ber_ml});
                result.max_ber = std::max({result.max_ber, trial.ber_mp, trial.ber_ml});
            }
        }
        result.mean_mp[gammas[gi]] = gsum_mp / static_cast<double>(per_gamma[gi].size());
        result.mean_ml[gammas[gi]] = gsum_ml / static_cast<double>(per_gamma[gi].size());
    }
    if (counted > 0) {
        result.grand_mean_mp = sum_mp / static_cast<double>(counted);
        result.grand_mean_ml = sum_ml / static_cast<double>(counted);
    }
    return result;
}

void write_attack_csv(std::ostream& out, const AttackSimResult& result,
                      const std::string& config_hash) {
    out << "gamma,trial,dof,ber_mp,ber_ml\n";
    for (const auto& trial : result.trials)
        out << trial.gamma << ',' << trial.trial << ',' << trial.dof << ',' << fmt(trial.ber_mp)
            << ',' << fmt(trial.ber_ml) << '\n';
    out << "# config_hash=" << config_hash << " grand_mean_mp=" << fmt(result.grand_mean_mp)
        << " grand_mean_ml=" << fmt(result.grand_mean_ml)
        << " erasure_resamples=" << result.erasure_resamples << '\n';
}

ValidateResult validate_grid(const ValidateConfig& config) {
    if (config.packets < 1) throw std::invalid_argument("validate: packets >= 1");
    struct Scenario {
        std::string name;
        std::size_t m, l;
    };
    std::vector<Scenario> scenarios;
    if (config.scenario_single) scenarios.push_back({"single", 1, 1});
    if (config.scenario_receivers) scenarios.push_back({"receivers", 2, 1});
    if (config.scenario_collab) scenarios.push_back({"collab", 1, 2});
    if (config.scenario_general) scenarios.push_back({"general", 2, 2});

    struct Point {
        std::size_t scenario;
        double delta, epsilon;
    };
    std::vector<Point> points;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
        for (double d : config.grid)
            for (double e : config.grid) points.push_back({s, d, e});

    ValidateResult result;
    result.rows.assign(points.size(), {});
    parallel_for(points.size(), config.threads, [&](std::size_t i) {
        const auto& pt = points[i];
        const auto& scenario = scenarios[pt.scenario];
        std::vector<double> deltas(scenario.m, pt.delta);
        std::vector<double> epsilons(scenario.l, pt.epsilon);
        ChannelTopology topology(deltas, epsilons);

        std::size_t received = 0;
        for (std::size_t p = 0; p < config.packets; ++p)
            received += transmit_packet(topology,
                                        substream(config.seed, {0x7a1, pt.scenario, i, p}))
                            .eve_received
                            ? 1
                            : 0;
        const double empirical =
            static_cast<double>(received) / static_cast<double>(config.packets);

        double closed = 0.0;
        if (scenario.name == "single") closed = pr_ref_single(pt.delta, pt.epsilon);
        if (scenario.name == "receivers") closed = pr_ref_receivers(deltas, pt.epsilon);
        if (scenario.name == "collab") closed = pr_ref_collab(pt.delta, epsilons);
        if (scenario.name == "general") closed = pr_ref_general(deltas, epsilons);

        const double se = std::sqrt(closed * (1.0 - closed) / static_cast<double>(config.packets));
        ValidateRow row;
        row.scenario = scenario.name;
        row.m = scenario.m;
        row.l = scenario.l;
        row.delta = pt.delta;
        row.epsilon = pt.epsilon;
        row.empirical = empirical;
        row.closed = closed;
        row.z = se > 0.0 ? (empirical - closed) / se : 0.0;
        result.rows[i] = row;
    });
    for (const auto& row : result.rows)
        result.worst_abs_z = std::max(result.worst_abs_z, std::abs(row.z));
    return result;
}

void write_validate_csv(std::ostream& out, const ValidateResult& result,
                        const std::string& config_hash) {
    out << "scenario,m,l,delta,epsilon,pr_ref_empirical,pr_ref_closed,z\n";
    for (const auto& row : result.rows)
        out << row.scenario << ',' << row.m << ',' << row.l << ',' << fmt(row.delta) << ','
            << fmt(row.epsilon) << ',' << fmt(row.empirical) << ',' << fmt(row.closed) << ','
            << fmt(row.z) << '\n';
    out << "# config_hash=" << config_hash << " worst_abs_z=" << fmt(result.worst_abs_z) << '\n';
}

nlohmann::json e2e_report(const E2eConfig& config) {
    LdpcCode code;
    PuncturePattern pattern;
    if (config.require_full_pattern) {
        auto instance = find_full_pattern_instance(config.spec, config.seed, 600);
        code = std::move(instance.code);
        pattern = std::move(instance.pattern);
    } else {
        code = make_encodable_code(config.spec, substream(config.seed, {0xe2e, 1}));
        pattern = find_acceptable_pattern(code.graph, substream(config.seed, {0xe2e, 2}));
    }
    ensure_generator(code);
    const std::size_t k = code.gen->g.rows();
    if (pattern.n % config.alpha != 0)
        throw std::invalid_argument("e2e: alpha does not divide n=" + std::to_string(pattern.n));

    Scrambler scrambler = gen_scrambler(k, substream(config.seed, {0xe2e, 3}));
    Rng rng(substream(config.seed, {0xe2e, 4}));
    auto messages = random_blocks(config.blocks, k, rng);

    ChannelTopology topology(config.deltas, config.epsilons);
    E2eOutcome outcome = run_e2e(topology, messages, code, scrambler, pattern, config.alpha,
                                 substream(config.seed, {0xe2e, 5}));

    nlohmann::json report;
    report["config"] = {{"code", code_spec_json(config.spec)},
                        {"deltas", config.deltas},
                        {"epsilons", config.epsilons},
                        {"blocks", config.blocks},
                        {"alpha", config.alpha},
                        {"attack_gamma", config.attack_gamma},
                        {"require_full_pattern", config.require_full_pattern},
                        {"seed", config.seed}};
    report["code"] = {{"N", code.block_length},
                      {"k", k},
                      {"checks", code.h.rows()},
                      {"seed", code.seed}};
    report["pattern"] = {{"size", pattern.punctured.size()},
                         {"n", pattern.n},
                         {"full", pattern.punctured.size() == code.h.rows()}};
    report["session"] = {{"eta", outcome.trace.packets.size()},
                         {"erased_packets", outcome.trace.erased_packets},
                         {"D", outcome.trace.dof}};
    report["receivers_exact"] = outcome.receiver_ok;

    const double pr = pr_ref_general(config.deltas, config.epsilons);
    report["closed_form"] = {{"pr_ref", pr}, {"expected_d", expected_d(pr, pattern.n)}};

    nlohmann::json eve;
    eve["complete"] = outcome.eve_complete;
    if (outcome.eve_complete) {
        eve["exact"] = outcome.eve_exact;
    } else {
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& blk : outcome.eve_dof.blocks)
            blocks.push_back({{"ml_dof", blk.ml_dof},
                              {"mp_residual", blk.mp_residual},
                              {"mp_supply", blk.mp_supply},
                              {"mp_supply_exact", blk.mp_supply_exact},
                              {"systematic_missing", blk.systematic_missing},
                              {"effective_dof", blk.effective_dof}});
        eve["blocks"] = blocks;
        eve["alpha_times_erased"] = outcome.eve_dof.channel_erased_per_block;

        if (config.attack_gamma > 0) {
            PacketBatch batch = encode_batch(messages, code, scrambler, pattern, config.alpha);
            PacketBatch received = batch;
            for (auto p : outcome.trace.erased_packets) received.packets[p].reset();
            auto words = to_erasure_words(received, pattern);
            auto ml = ml_decode(code.h, words[0]);
            if (ml.dof >= config.attack_gamma) {
                std::vector<BitVec> guesses;
                for (std::size_t b = 0; b < config.blocks; ++b) {
                    BitVec cw = multiply(scramble(messages[b], scrambler), code.gen->g);
                    BitVec guess(ml.dof);
                    for (std::size_t i = 0; i < ml.dof; ++i)
                        guess.set(i, cw.get(ml.residual_set[i]));
                    std::vector<std::uint32_t> idx(guess.size());
                    std::iota(idx.begin(), idx.end(), 0);
                    rng.shuffle(idx);
                    for (std::size_t i = 0; i < config.attack_gamma; ++i) guess.flip(idx[i]);
                    guesses.push_back(std::move(guess));
                }
                auto attack = eve_guess_attack(received, code, scrambler, pattern, guesses,
                                               messages, CompletionPath::ml);
                eve["attack"] = {{"gamma", config.attack_gamma},
                                 {"block_ber", attack.block_ber},
                                 {"overall_ber", attack.overall_ber}};
            } else {
                eve["attack"] = {{"skipped", "dof below gamma"}, {"dof", ml.dof}};
            }
        }
    }
    report["eve"] = eve;
    return report;
}

std::string config_hash(const nlohmann::json& config) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

}  // namespace stopset::experiments
