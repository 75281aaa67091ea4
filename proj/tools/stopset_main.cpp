#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <string>

#include "stopset/errors.hpp"
#include "stopset/experiments.hpp"
#include "stopset/rng.hpp"
#include "stopset/util.hpp"

using namespace stopset;
namespace ex = stopset::experiments;

namespace {

// Nonzero exit when a validation sweep fails its statistical gate.
struct ValidationFailure : std::runtime_error {
    explicit ValidationFailure(const std::string& what) : std::runtime_error(what) {}
};

// JSON config files: top-level keys are global options, one object per
// subcommand holds its options.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        input >> j;
        return collect(j, {});
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    }
    static std::vector<CLI::ConfigItem> collect(const nlohmann::json& j,
                                                std::vector<std::string> parents) {
        std::vector<CLI::ConfigItem> items;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_object()) {
                auto sub = parents;
                sub.push_back(it.key());
                auto nested = collect(*it, sub);
                items.insert(items.end(), nested.begin(), nested.end());
            } else {
                CLI::ConfigItem item;
                item.parents = parents;
                item.name = it.key();
                if (it->is_array())
                    for (const auto& v : *it) item.inputs.push_back(scalar(v));
                else
                    item.inputs.push_back(scalar(*it));
                items.push_back(item);
            }
        }
        return items;
    }
};

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
           static_cast<std::uint64_t>(std::time(nullptr));
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

// Code-family options shared by several subcommands.
struct CodeSpecArgs {
    bool regular = false;
    std::string irregular;
    std::string code_file;
    std::size_t n = 1000;
    unsigned wc = 4;
    unsigned wr = 8;

    void attach(CLI::App* cmd, bool allow_file) {
        cmd->add_flag("--regular", regular, "regular ensemble (uses --wc/--wr)");
        cmd->add_option("--irregular", irregular,
                        "irregular ensemble: 'example1' or a distribution JSON file");
        if (allow_file) cmd->add_option("--code", code_file, "load the code from an alist file");
        cmd->add_option("--n", n, "blocklength N");
        cmd->add_option("--wc", wc, "column weight (regular)");
        cmd->add_option("--wr", wr, "row weight (regular)");
    }

    ex::CodeSpec resolve() const {
        if (!code_file.empty()) return ex::FileSpec{code_file};
        if (regular && !irregular.empty())
            throw std::invalid_argument("choose one of --regular / --irregular");
        if (regular) return ex::RegularSpec{n, wc, wr};
        if (!irregular.empty()) {
            if (irregular == "example1") return ex::example1_spec(n);
            ex::IrregularSpec spec;
            spec.n = n;
            spec.name = irregular;
            spec.dist = ex::load_distribution_file(irregular);
            return spec;
        }
        throw std::invalid_argument("specify --regular, --irregular, or --code");
    }
};

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const std::string tok =
            csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty list: " + csv);
    return out;
}

std::vector<std::size_t> parse_gammas(const std::string& csv) {
    if (csv == "paper") return ex::paper_gamma_list();
    std::vector<std::size_t> out;
    for (double v : parse_doubles(csv)) out.push_back(static_cast<std::size_t>(v));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stopping-set secrecy toolkit: LDPC construction, puncturing, ARQ wiretap "
                 "simulation, and closed-form security analysis"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file");

    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (omitted: drawn from entropy)");
    std::size_t threads = 1;
    app.add_option("--threads", threads, "worker threads (0 = hardware count)");
    std::string out_prefix;
    app.add_option("--out", out_prefix, "output path prefix");

    auto effective_seed = [&]() {
        if (seed_opt->count() == 0) {
            seed = entropy_seed();
            logging::info("auto-seeded from entropy: " + std::to_string(seed));
        }
        return seed;
    };
    auto out_or = [&](const std::string& fallback) {
        return out_prefix.empty() ? fallback : out_prefix;
    };

    // ------------------------------------------------------------ gen-code
    auto* gen_cmd = app.add_subcommand("gen-code", "construct a code and write alist + metadata");
    auto gen_args = std::make_shared<CodeSpecArgs>();
    gen_args->attach(gen_cmd, false);
    gen_cmd->callback([&, gen_args] {
        const std::uint64_t s = effective_seed();
        const ex::CodeSpec spec = gen_args->resolve();
        LdpcCode code = ex::make_code(spec, s);
        const std::string base = out_or("code");

        auto alist = open_out(base + ".alist");
        save_alist(alist, code.h);

        nlohmann::json meta;
        meta["seed"] = s;
        meta["distribution"] = ex::code_spec_json(spec);
        meta["N"] = code.block_length;
        meta["k"] = code.dimension;
        meta["checks"] = code.h.rows();
        auto mf = open_out(base + ".json");
        mf << meta.dump(2) << '\n';
        std::printf("wrote %s.alist (%zux%zu) and %s.json (seed %llu)\n", base.c_str(),
                    code.h.rows(), code.h.cols(), base.c_str(),
                    static_cast<unsigned long long>(s));
    });

    // -------------------------------------------------------- find-pattern
    auto* pat_cmd = app.add_subcommand("find-pattern", "acceptable puncturing pattern for a code");
    auto pat_code = std::make_shared<std::string>();
    pat_cmd->add_option("--code", *pat_code, "alist file")->required();
    pat_cmd->callback([&, pat_code] {
        const std::uint64_t s = effective_seed();
        BitMatrix h = load_alist_file(*pat_code);
        TannerGraph graph = tanner_graph(h);
        PuncturePattern pattern = find_acceptable_pattern(graph, s);
        pattern.code_ref = *pat_code;
        auto report = verify_acceptable(graph, pattern);
        if (!report.acceptable) throw std::runtime_error("internal: pattern failed verification");
        const std::string base = out_or("pattern");
        auto pf = open_out(base + ".json");
        save_pattern(pf, pattern);
        std::printf("wrote %s.json: |R| = %zu, n = %zu (seed %llu)\n", base.c_str(),
                    pattern.punctured.size(), pattern.n, static_cast<unsigned long long>(s));
    });

    // ------------------------------------------------------- pattern-stats
    auto* stats_cmd = app.add_subcommand("pattern-stats", "histogram of |R| over pattern searches");
    auto stats_args = std::make_shared<CodeSpecArgs>();
    stats_args->attach(stats_cmd, true);
    auto stats_samples = std::make_shared<std::size_t>(100);
    auto stats_new_every = std::make_shared<std::size_t>(1);
    stats_cmd->add_option("--samples", *stats_samples, "number of pattern searches");
    stats_cmd->add_option("--new-code-every", *stats_new_every,
                          "fresh code instance every this many samples");
    stats_cmd->callback([&, stats_args, stats_samples, stats_new_every] {
        ex::PatternStatsConfig config;
        config.spec = stats_args->resolve();
        config.samples = *stats_samples;
        config.seed = effective_seed();
        config.new_code_every = *stats_new_every;
        config.threads = threads;

        nlohmann::json cj;
        cj["cmd"] = "pattern-stats";
        cj["code"] = ex::code_spec_json(config.spec);
        cj["samples"] = config.samples;
        cj["new_code_every"] = config.new_code_every;
        cj["seed"] = config.seed;

        ex::PatternStats stats = ex::pattern_stats(config);
        auto csv = open_out(out_or("pattern_stats") + ".csv");
        ex::write_pattern_stats_csv(csv, stats, ex::config_hash(cj));
        std::printf("samples %zu: mean |R| = %.3f, variance = %.3f, mode = %zu\n",
                    config.samples, stats.mean, stats.variance, stats.mode);
    });

    // ------------------------------------------------------------- surface
    auto* surf_cmd = app.add_subcommand("surface", "Pr(D >= beta) over the (delta,epsilon) grid");
    auto surf = std::make_shared<ex::SurfaceConfig>();
    surf_cmd->add_option("--beta", surf->beta, "degrees-of-freedom threshold");
    surf_cmd->add_option("--alpha", surf->alpha, "bits per block per packet");
    surf_cmd->add_option("--eta", surf->eta, "packet count");
    surf_cmd->add_option("--grid", surf->grid, "lattice points per axis");
    surf_cmd->add_option("--blocklen", surf->n, "codeword length for E[D] (default alpha*eta)");
    auto surf_contour = std::make_shared<bool>(false);
    surf_cmd->add_flag("--contour", *surf_contour, "also extract the 0.5 threshold contour");
    surf_cmd->callback([&, surf, surf_contour] {
        surf->with_contour = *surf_contour;
        surf->threads = threads;
        nlohmann::json cj;
        cj["cmd"] = "surface";
        cj["beta"] = surf->beta;
        cj["alpha"] = surf->alpha;
        cj["eta"] = surf->eta;
        cj["grid"] = surf->grid;
        cj["blocklen"] = surf->n;
        const std::string hash = ex::config_hash(cj);

        ex::SurfaceResult result = ex::surface(*surf);
        const std::string base = out_or("surface");
        auto csv = open_out(base + ".csv");
        ex::write_surface_csv(csv, result, hash);
        if (surf->with_contour) {
            auto cf = open_out(base + "_contour.csv");
            ex::write_contour_csv(cf, result.contour, hash);
        }
        std::printf("wrote %s.csv (%zu rows)%s\n", base.c_str(), result.rows.size(),
                    surf->with_contour ? " and contour" : "");
    });

    // ---------------------------------------------------------- attack-sim
    auto* atk_cmd = app.add_subcommand("attack-sim", "guessing-attack error amplification sweep");
    auto atk = std::make_shared<ex::AttackSimConfig>();
    auto atk_gammas = std::make_shared<std::string>("paper");
    atk_cmd->add_option("--n", atk->n, "blocklength of the irregular codes");
    atk_cmd->add_option("--gammas", *atk_gammas, "'paper' or a comma list of wrong-bit counts");
    atk_cmd->add_option("--trials", atk->trials, "trials per gamma");
    atk_cmd->add_option("--alpha", atk->alpha, "bits per block per packet");
    atk_cmd->add_option("--pattern-every", atk->pattern_every,
                        "new pattern every this many trials");
    atk_cmd->add_option("--code-every", atk->code_every, "new code every this many trials");
    atk_cmd->add_option("--min-r", atk->min_pattern, "pattern-size floor");
    atk_cmd->add_option("--blocks", atk->blocks, "blocks per trial (L)");
    atk_cmd->callback([&, atk, atk_gammas] {
        atk->gammas = parse_gammas(*atk_gammas);
        atk->seed = effective_seed();
        atk->threads = threads;

        nlohmann::json cj;
        cj["cmd"] = "attack-sim";
        cj["n"] = atk->n;
        cj["gammas"] = atk->gammas;
        cj["trials"] = atk->trials;
        cj["alpha"] = atk->alpha;
        cj["pattern_every"] = atk->pattern_every;
        cj["code_every"] = atk->code_every;
        cj["min_r"] = atk->min_pattern;
        cj["blocks"] = atk->blocks;
        cj["seed"] = atk->seed;

        ex::AttackSimResult result = ex::attack_sim(*atk);
        auto csv = open_out(out_or("attack") + ".csv");
        ex::write_attack_csv(csv, result, ex::config_hash(cj));
        std::printf("gamma means (mp/ml):\n");
        for (const auto& [gamma, mean] : result.mean_mp)
            std::printf("  gamma %4zu: %.4f / %.4f\n", gamma, mean, result.mean_ml.at(gamma));
        std::printf("grand mean mp %.5f ml %.5f | ber range [%.4f, %.4f] | resamples %zu\n",
                    result.grand_mean_mp, result.grand_mean_ml, result.min_ber, result.max_ber,
                    result.erasure_resamples);
    });

    // ------------------------------------------------------------ validate
    auto* val_cmd = app.add_subcommand("validate", "Monte Carlo vs closed forms; exit 2 on |z|>4");
    auto val = std::make_shared<ex::ValidateConfig>();
    auto val_grid = std::make_shared<std::string>("0.1,0.3,0.5,0.7,0.9");
    auto val_cases = std::make_shared<std::string>("single,receivers,collab,general");
    val_cmd->add_option("--packets", val->packets, "packets per grid point");
    val_cmd->add_option("--grid", *val_grid, "comma list of probabilities for both axes");
    val_cmd->add_option("--cases", *val_cases, "subset of single,receivers,collab,general");
    val_cmd->callback([&, val, val_grid, val_cases] {
        val->grid = parse_doubles(*val_grid);
        val->seed = effective_seed();
        val->threads = threads;
        val->scenario_single = val_cases->find("single") != std::string::npos;
        val->scenario_receivers = val_cases->find("receivers") != std::string::npos;
        val->scenario_collab = val_cases->find("collab") != std::string::npos;
        val->scenario_general = val_cases->find("general") != std::string::npos;

        nlohmann::json cj;
        cj["cmd"] = "validate";
        cj["packets"] = val->packets;
        cj["grid"] = val->grid;
        cj["cases"] = *val_cases;
        cj["seed"] = val->seed;

        ex::ValidateResult result = ex::validate_grid(*val);
        auto csv = open_out(out_or("validate") + ".csv");
        ex::write_validate_csv(csv, result, ex::config_hash(cj));
        std::printf("%zu grid points, worst |z| = %.3f\n", result.rows.size(),
                    result.worst_abs_z);
        if (result.worst_abs_z > 4.0)
            throw ValidationFailure("closed forms rejected: worst |z| = " +
                                    std::to_string(result.worst_abs_z));
    });

    // ----------------------------------------------------------------- e2e
    auto* e2e_cmd = app.add_subcommand("e2e", "full encode/ARQ/decode session report");
    auto e2e_args = std::make_shared<CodeSpecArgs>();
    e2e_args->attach(e2e_cmd, true);
    auto e2e = std::make_shared<ex::E2eConfig>();
    auto e2e_deltas = std::make_shared<std::string>("0.1");
    auto e2e_epsilons = std::make_shared<std::string>("0.5");
    e2e_cmd->add_option("--deltas", *e2e_deltas, "receiver erasure probabilities (comma list)");
    e2e_cmd->add_option("--epsilons", *e2e_epsilons, "eavesdropper erasure probabilities");
    e2e_cmd->add_option("--blocks", e2e->blocks, "message blocks (L)");
    e2e_cmd->add_option("--alpha", e2e->alpha, "bits per block per packet");
    e2e_cmd->add_flag("--require-full-r", e2e->require_full_pattern,
                      "insist on a |R| = N-k pattern");
    e2e_cmd->add_option("--attack-gamma", e2e->attack_gamma,
                        "run the guess attack with this many wrong bits");
    e2e_cmd->callback([&, e2e, e2e_args, e2e_deltas, e2e_epsilons] {
        e2e->spec = e2e_args->resolve();
        e2e->deltas = parse_doubles(*e2e_deltas);
        e2e->epsilons = parse_doubles(*e2e_epsilons);
        e2e->seed = effective_seed();
        nlohmann::json report = ex::e2e_report(*e2e);
        auto jf = open_out(out_or("e2e") + ".json");
        jf << report.dump(2) << '\n';
        std::string eve_state;
        if (report["eve"]["complete"].get<bool>())
            eve_state = report["eve"]["exact"].get<bool>() ? "decoded exactly" : "complete";
        else
            eve_state = "missing " + std::to_string(report["session"]["erased_packets"].size()) +
                        " packets, D = " + report["session"]["D"].dump();
        std::printf("receivers exact: %s; eve: %s\n", report["receivers_exact"].dump().c_str(),
                    eve_state.c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationFailure& e) {
        std::fprintf(stderr, "validation failure: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
