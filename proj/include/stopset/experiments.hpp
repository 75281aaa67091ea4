#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stopset/analytics.hpp"
#include "stopset/channel.hpp"
#include "stopset/codec.hpp"
#include "stopset/ldpc.hpp"
#include "stopset/stopping.hpp"

// Experiment drivers behind the CLI subcommands. Everything here is
// deterministic given (config, seed) regardless of thread count: work is
// assigned by index and every sample derives its own substream.
namespace stopset::experiments {

struct RegularSpec {
    std::size_t n = 0;
    unsigned wc = 0, wr = 0;
};
struct IrregularSpec {
    std::size_t n = 0;
    std::string name;  // "example1" or a path to a distribution JSON
    DegreeDistribution dist;
};
struct FileSpec {
    std::string path;  // alist
};
using CodeSpec = std::variant<RegularSpec, IrregularSpec, FileSpec>;

IrregularSpec example1_spec(std::size_t n);
// Distribution JSON: {"var": {"2": f2, ...}, "check": {"6": f6, ...}}.
DegreeDistribution load_distribution_file(const std::string& path);

LdpcCode make_code(const CodeSpec& spec, std::uint64_t seed);
// As make_code but guarantees a derived generator, resampling the seed on
// rank-deficient instances (logged).
LdpcCode make_encodable_code(const CodeSpec& spec, std::uint64_t seed);
nlohmann::json code_spec_json(const CodeSpec& spec);

// Pattern with |R| >= min_size, retrying pattern seeds.
std::optional<PuncturePattern> find_pattern_at_least(const TannerGraph& graph, std::uint64_t seed,
                                                     std::size_t min_size, int max_tries);

// (code, pattern) with |R| = N - k exactly (the rate-one regime).
struct FullPatternInstance {
    LdpcCode code;
    PuncturePattern pattern;
};
FullPatternInstance find_full_pattern_instance(const CodeSpec& spec, std::uint64_t seed,
                                               int max_tries);

// ---------------------------------------------------------------- patterns
struct PatternStatsConfig {
    CodeSpec spec;
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    std::size_t new_code_every = 1;  // fresh code instance every this many samples
    std::size_t threads = 1;
};
struct PatternStats {
    std::vector<std::size_t> sizes;  // |R| per sample, in sample order
    std::map<std::size_t, std::size_t> histogram;
    double mean = 0.0;
    double variance = 0.0;
    std::size_t mode = 0;
};
PatternStats pattern_stats(const PatternStatsConfig& config);
void write_pattern_stats_csv(std::ostream& out, const PatternStats& stats,
                             const std::string& config_hash);

// ----------------------------------------------------------------- surface
struct SurfaceConfig {
    std::size_t beta = 1, alpha = 1, eta = 100;
    std::size_t grid = 101;  // lattice points per axis over [0,1]
    std::size_t n = 0;       // codeword length for E[D]; 0 means alpha*eta
    bool with_contour = false;
    std::size_t threads = 1;
};
struct SurfaceResult {
    std::vector<GridRow> rows;
    ContourResult contour;
};
SurfaceResult surface(const SurfaceConfig& config);
void write_surface_csv(std::ostream& out, const SurfaceResult& result,
                       const std::string& config_hash);
void write_contour_csv(std::ostream& out, const ContourResult& contour,
                       const std::string& config_hash);

// -------------------------------------------------------------- attack sim
struct AttackSimConfig {
    std::size_t n = 1000;  // Example-1 irregular blocklength
    std::vector<std::size_t> gammas;  // empty -> paper_gamma_list()
    std::size_t trials = 300;
    std::size_t pattern_every = 10;
    std::size_t code_every = 30;
    std::size_t alpha = 1;
    std::size_t min_pattern = 498;  // |R| >= N-k-2 regime
    std::size_t blocks = 1;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};
struct AttackTrial {
    std::size_t gamma = 0;
    std::size_t trial = 0;
    std::size_t dof = 0;  // ML free count of the trial's erasure system
    double ber_mp = 0.0;
    double ber_ml = 0.0;
};
struct AttackSimResult {
    std::vector<AttackTrial> trials;  // ordered by (gamma, trial)
    std::map<std::size_t, double> mean_mp;  // per gamma
    std::map<std::size_t, double> mean_ml;
    double grand_mean_mp = 0.0, grand_mean_ml = 0.0;
    double min_ber = 1.0, max_ber = 0.0;  // over both paths, gamma >= 1 trials
    std::size_t erasure_resamples = 0;    // dof < gamma events
};
std::vector<std::size_t> paper_gamma_list();
AttackSimResult attack_sim(const AttackSimConfig& config);
void write_attack_csv(std::ostream& out, const AttackSimResult& result,
                      const std::string& config_hash);

// ---------------------------------------------------------------- validate
struct ValidateConfig {
    std::vector<double> grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    std::size_t packets = 100000;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool scenario_single = true;     // m=1, l=1 vs the simple closed form
    bool scenario_receivers = true;  // m=2 vs inclusion-exclusion
    bool scenario_collab = true;     // l=2 vs the product form
    bool scenario_general = true;    // m=2, l=2
};
struct ValidateRow {
    std::string scenario;
    std::size_t m = 1, l = 1;
    double delta = 0.0, epsilon = 0.0;
    double empirical = 0.0, closed = 0.0, z = 0.0;
};
struct ValidateResult {
    std::vector<ValidateRow> rows;
    double worst_abs_z = 0.0;
};
ValidateResult validate_grid(const ValidateConfig& config);
void write_validate_csv(std::ostream& out, const ValidateResult& result,
                        const std::string& config_hash);

// --------------------------------------------------------------------- e2e
struct E2eConfig {
    CodeSpec spec;
    std::vector<double> deltas = {0.1};
    std::vector<double> epsilons = {0.5};
    std::size_t blocks = 10;
    std::size_t alpha = 1;
    bool require_full_pattern = false;  // insist on |R| = N - k
    std::size_t attack_gamma = 0;       // >0: run the guess attack with gamma wrong bits
    std::uint64_t seed = 0;
};
nlohmann::json e2e_report(const E2eConfig& config);

// Canonical config hash used in CSV metadata lines.
std::string config_hash(const nlohmann::json& config);

}  // namespace stopset::experiments
