#include "stopset/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "stopset/errors.hpp"
#include "stopset/rng.hpp"

namespace stopset {

namespace {

constexpr int kRepairSweeps = 100;
constexpr int kMatchingRestarts = 50;

// Random perfect matching between variable and check sockets; duplicate
// edges are repaired by swapping the offending check socket with a uniformly
// chosen one and re-checking. Returns false if duplicates survive.
bool socket_match(const std::vector<unsigned>& var_deg, const std::vector<unsigned>& check_deg,
                  Rng& rng, TannerGraph& out) {
    std::vector<std::uint32_t> var_sockets;
    std::vector<std::uint32_t> check_sockets;
    for (std::uint32_t v = 0; v < var_deg.size(); ++v)
        var_sockets.insert(var_sockets.end(), var_deg[v], v);
    for (std::uint32_t c = 0; c < check_deg.size(); ++c)
        check_sockets.insert(check_sockets.end(), check_deg[c], c);
    if (var_sockets.size() != check_sockets.size())
        throw ConstructionError("socket totals differ between variable and check side");
    const std::size_t edges = var_sockets.size();

    rng.shuffle(check_sockets);

    const std::uint64_t checks = check_deg.size();
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges * 2);
    std::vector<std::size_t> bad;
    for (int sweep = 0; sweep < kRepairSweeps; ++sweep) {
        seen.clear();
        bad.clear();
        for (std::size_t i = 0; i < edges; ++i) {
            const std::uint64_t key = std::uint64_t{var_sockets[i]} * checks + check_sockets[i];
            if (!seen.insert(key).second) bad.push_back(i);
        }
        if (bad.empty()) {
            out = TannerGraph{};
            out.var_count = var_deg.size();
            out.check_count = check_deg.size();
            out.check_neighbors.resize(out.check_count);
            out.var_neighbors.resize(out.var_count);
            for (std::size_t i = 0; i < edges; ++i) {
                out.check_neighbors[check_sockets[i]].push_back(var_sockets[i]);
                out.var_neighbors[var_sockets[i]].push_back(check_sockets[i]);
            }
            for (auto& nb : out.check_neighbors) std::sort(nb.begin(), nb.end());
            for (auto& nb : out.var_neighbors) std::sort(nb.begin(), nb.end());
            return true;
        }
        for (auto i : bad) {
            const std::size_t j = static_cast<std::size_t>(rng.below(edges));
            std::swap(check_sockets[i], check_sockets[j]);
        }
    }
    return false;
}

TannerGraph build_graph(const std::vector<unsigned>& var_deg,
                        const std::vector<unsigned>& check_deg, std::uint64_t seed) {
    for (int restart = 0; restart < kMatchingRestarts; ++restart) {
        Rng rng(substream(seed, {0x50c7e7, static_cast<std::uint64_t>(restart)}));
        TannerGraph g;
        if (socket_match(var_deg, check_deg, rng, g)) return g;
    }
    throw ConstructionError("socket matching failed to remove duplicate edges");
}

// Raw configuration-model matching with edge multiplicities folded mod 2
// into H. Parallel edges between a pair cancel, so a handful of columns end
// up with effective degree below their socket degree; those low-degree
// columns are what allows Algorithm-2 puncturing patterns to reach
// |R| = N - k at all (with all degrees >= 2 a stopping-set-free set of that
// size cannot exist: in a full peeling each check resolves exactly one
// member, and the last member's second check would have had to resolve a
// later one).
BitMatrix mod2_configuration_matrix(const std::vector<unsigned>& var_deg,
                                    const std::vector<unsigned>& check_deg, std::uint64_t seed) {
    std::vector<std::uint32_t> var_sockets;
    std::vector<std::uint32_t> check_sockets;
    for (std::uint32_t v = 0; v < var_deg.size(); ++v)
        var_sockets.insert(var_sockets.end(), var_deg[v], v);
    for (std::uint32_t c = 0; c < check_deg.size(); ++c)
        check_sockets.insert(check_sockets.end(), check_deg[c], c);
    if (var_sockets.size() != check_sockets.size())
        throw ConstructionError("socket totals differ between variable and check side");
    Rng rng(substream(seed, {0x50c7e8}));
    rng.shuffle(check_sockets);
    BitMatrix h(check_deg.size(), var_deg.size());
    for (std::size_t i = 0; i < var_sockets.size(); ++i)
        h.set(check_sockets[i], var_sockets[i], !h.get(check_sockets[i], var_sockets[i]));
    return h;
}

// Largest-remainder apportionment of `total` items proportional to weights.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> counts(weights.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double ideal = static_cast<double>(total) * weights[i] / wsum;
        counts[i] = static_cast<std::size_t>(std::floor(ideal));
        assigned += counts[i];
        remainders.push_back({ideal - std::floor(ideal), i});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) counts[remainders[i % remainders.size()].second]++;
    return counts;
}

LdpcCode finish_code(TannerGraph graph, std::uint64_t seed) {
    LdpcCode code;
    code.h = to_matrix(graph);
    code.graph = std::move(graph);
    code.block_length = code.h.cols();
    code.dimension = code.h.cols() - code.h.rows();
    code.seed = seed;
    return code;
}

}  // namespace

void DegreeDistribution::validate() const {
    auto check_side = [](const std::vector<std::pair<unsigned, double>>& side, const char* name) {
        if (side.empty()) throw std::invalid_argument(std::string(name) + " distribution is empty");
        double sum = 0.0;
        std::unordered_set<unsigned> degrees;
        for (const auto& [degree, fraction] : side) {
            if (degree == 0) throw std::invalid_argument(std::string(name) + " degree 0 not allowed");
            if (fraction < 0.0) throw std::invalid_argument(std::string(name) + " fraction negative");
            if (!degrees.insert(degree).second)
                throw std::invalid_argument(std::string(name) + " degree repeated");
            sum += fraction;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument(std::string(name) + " fractions do not sum to 1");
    };
    check_side(var_fractions, "variable");
    check_side(check_fractions, "check");
}

DegreeDistribution DegreeDistribution::example1() {
    DegreeDistribution d;
    // The published variable-side coefficients total 1.00001; normalize so the
    // sum-to-one invariant holds exactly.
    d.var_fractions = {{2, 0.32660}, {3, 0.11960}, {4, 0.18393}, {5, 0.36988}};
    double sum = 0.0;
    for (const auto& [degree, fraction] : d.var_fractions) sum += fraction;
    for (auto& [degree, fraction] : d.var_fractions) fraction /= sum;
    d.check_fractions = {{6, 0.78555}, {7, 0.21445}};
    return d;
}

LdpcCode build_regular(std::size_t n, unsigned wc, unsigned wr, std::uint64_t seed) {
    if (n == 0 || wc == 0 || wr == 0) throw std::invalid_argument("build_regular: zero parameter");
    if ((n * wc) % wr != 0)
        throw std::invalid_argument("build_regular: N*wc not divisible by wr");
    const std::size_t checks = n * wc / wr;
    if (checks == 0) throw std::invalid_argument("build_regular: no check nodes");
    if (wr > n || wc > checks)
        throw std::invalid_argument("build_regular: node weight exceeds opposite side size");
    std::vector<unsigned> var_deg(n, wc);
    std::vector<unsigned> check_deg(checks, wr);
    return finish_code(build_graph(var_deg, check_deg, seed), seed);
}

LdpcCode build_irregular(std::size_t n, const DegreeDistribution& dist, std::uint64_t seed) {
    dist.validate();
    if (n == 0) throw std::invalid_argument("build_irregular: N is zero");

    // Edge fraction f on degree-d nodes means node share proportional to f/d.
    std::vector<double> var_weights;
    for (const auto& [degree, fraction] : dist.var_fractions)
        var_weights.push_back(fraction / degree);
    const auto var_counts = apportion(n, var_weights);

    std::vector<unsigned> var_deg;
    var_deg.reserve(n);
    std::size_t edges = 0;
    for (std::size_t i = 0; i < var_counts.size(); ++i) {
        var_deg.insert(var_deg.end(), var_counts[i], dist.var_fractions[i].first);
        edges += var_counts[i] * dist.var_fractions[i].first;
    }
    if (edges == 0) throw std::invalid_argument("build_irregular: no edges implied");

    double inv_mean_check = 0.0;
    std::vector<double> check_weights;
    for (const auto& [degree, fraction] : dist.check_fractions) {
        check_weights.push_back(fraction / degree);
        inv_mean_check += fraction / degree;
    }
    const auto checks =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(edges * inv_mean_check)));
    const auto check_counts = apportion(checks, check_weights);

    std::vector<unsigned> check_deg;
    check_deg.reserve(checks);
    std::size_t check_edges = 0;
    for (std::size_t i = 0; i < check_counts.size(); ++i) {
        check_deg.insert(check_deg.end(), check_counts[i], dist.check_fractions[i].first);
        check_edges += check_counts[i] * dist.check_fractions[i].first;
    }

    // Repair the integer-rounding edge mismatch one edge at a time on the
    // lowest-degree (resp. highest-degree) checks.
    long long delta = static_cast<long long>(edges) - static_cast<long long>(check_edges);
    while (delta > 0) {
        auto it = std::min_element(check_deg.begin(), check_deg.end());
        ++*it;
        --delta;
    }
    while (delta < 0) {
        auto it = std::max_element(check_deg.begin(), check_deg.end());
        if (*it <= 1)
            throw ConstructionError("inconsistent distribution: cannot balance edge totals");
        --*it;
        ++delta;
    }
    for (unsigned d : check_deg)
        if (d > n) throw std::invalid_argument("build_irregular: check degree exceeds N");

    BitMatrix h = mod2_configuration_matrix(var_deg, check_deg, seed);
    LdpcCode code;
    code.graph = tanner_graph(h);
    code.h = std::move(h);
    code.block_length = code.h.cols();
    code.dimension = code.h.cols() - code.h.rows();
    code.seed = seed;
    return code;
}

SystematicGenerator derive_systematic_generator(const BitMatrix& h) {
    Gf2Solution sol = solve(h, BitVec(h.rows()));
    if (sol.pivot_cols.size() < h.rows())
        throw RankDeficientError(sol.pivot_cols.size(), h.rows());
    const std::size_t k = sol.free_count();
    SystematicGenerator gen;
    gen.g = BitMatrix(k, h.cols());
    gen.systematic_positions = sol.free_cols;
    gen.column_permutation.resize(h.cols());
    std::iota(gen.column_permutation.begin(), gen.column_permutation.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        BitVec free_vals(k);
        free_vals.set(i, true);
        BitVec word = sol.assignment(free_vals);
        auto row = gen.g.row(i);
        for (std::size_t w = 0; w < row.size(); ++w) row[w] = word.words()[w];
    }
    return gen;
}

const SystematicGenerator& ensure_generator(LdpcCode& code) {
    if (!code.gen) code.gen = derive_systematic_generator(code.h);
    return *code.gen;
}

void save_alist(std::ostream& out, const BitMatrix& h) {
    const auto graph = tanner_graph(h);
    std::size_t max_col = 0, max_row = 0;
    for (const auto& nb : graph.var_neighbors) max_col = std::max(max_col, nb.size());
    for (const auto& nb : graph.check_neighbors) max_row = std::max(max_row, nb.size());

    out << graph.var_count << ' ' << graph.check_count << '\n';
    out << max_col << ' ' << max_row << '\n';
    for (std::size_t v = 0; v < graph.var_count; ++v)
        out << graph.var_neighbors[v].size() << (v + 1 < graph.var_count ? ' ' : '\n');
    for (std::size_t c = 0; c < graph.check_count; ++c)
        out << graph.check_neighbors[c].size() << (c + 1 < graph.check_count ? ' ' : '\n');
    for (const auto& nb : graph.var_neighbors) {
        for (std::size_t i = 0; i < max_col; ++i)
            out << (i < nb.size() ? nb[i] + 1 : 0) << (i + 1 < max_col ? ' ' : '\n');
    }
    for (const auto& nb : graph.check_neighbors) {
        for (std::size_t i = 0; i < max_row; ++i)
            out << (i < nb.size() ? nb[i] + 1 : 0) << (i + 1 < max_row ? ' ' : '\n');
    }
}

BitMatrix load_alist(std::istream& in) {
    auto next = [&in]() {
        long long v;
        if (!(in >> v)) throw std::runtime_error("alist: truncated file");
        return v;
    };
    const long long n = next();
    const long long m = next();
    if (n <= 0 || m <= 0) throw std::runtime_error("alist: bad dimensions");
    const long long max_col = next();
    const long long max_row = next();
    std::vector<long long> col_w(n), row_w(m);
    for (auto& w : col_w) w = next();
    for (auto& w : row_w) w = next();
    for (long long w : col_w)
        if (w < 0 || w > max_col) throw std::runtime_error("alist: column weight out of range");
    for (long long w : row_w)
        if (w < 0 || w > max_row) throw std::runtime_error("alist: row weight out of range");

    BitMatrix h(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    for (long long v = 0; v < n; ++v) {
        long long listed = 0;
        for (long long i = 0; i < max_col; ++i) {
            const long long c = next();
            if (c == 0) continue;
            if (c < 1 || c > m) throw std::runtime_error("alist: check index out of range");
            if (h.get(static_cast<std::size_t>(c - 1), static_cast<std::size_t>(v)))
                throw std::runtime_error("alist: duplicate edge");
            h.set(static_cast<std::size_t>(c - 1), static_cast<std::size_t>(v), true);
            ++listed;
        }
        if (listed != col_w[static_cast<std::size_t>(v)])
            throw std::runtime_error("alist: column weight mismatch");
    }
    for (long long c = 0; c < m; ++c) {
        long long listed = 0;
        for (long long i = 0; i < max_row; ++i) {
            const long long v = next();
            if (v == 0) continue;
            if (v < 1 || v > n) throw std::runtime_error("alist: variable index out of range");
            if (!h.get(static_cast<std::size_t>(c), static_cast<std::size_t>(v - 1)))
                throw std::runtime_error("alist: adjacency lists disagree");
            ++listed;
        }
        if (listed != row_w[static_cast<std::size_t>(c)])
            throw std::runtime_error("alist: row weight mismatch");
    }
    return h;
}

void save_alist_file(const std::string& path, const BitMatrix& h) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_alist(out, h);
}

BitMatrix load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return load_alist(in);
}

}  // namespace stopset
