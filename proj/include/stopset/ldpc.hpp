#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stopset/bitmatrix.hpp"
#include "stopset/tanner.hpp"

namespace stopset {

// Edge-perspective degree distribution pair: fraction of edges attached to
// nodes of each degree, on the variable side and on the check side.
struct DegreeDistribution {
    std::vector<std::pair<unsigned, double>> var_fractions;    // (degree, edge fraction)
    std::vector<std::pair<unsigned, double>> check_fractions;  // (degree, edge fraction)

    // Throws std::invalid_argument unless fractions are nonnegative, degrees
    // positive and unique, and each side sums to 1 within 1e-9.
    void validate() const;

    // The rate-1/2 irregular ensemble used for the headline experiments:
    // variable side 0.32660 x + 0.11960 x^2 + 0.18393 x^3 + 0.36988 x^4,
    // check side 0.78555 x^5 + 0.21445 x^6.
    static DegreeDistribution example1();
};

// Systematic encoder derived from H. Message bit i occupies codeword
// position systematic_positions[i]; restricting G to those columns gives the
// identity.
struct SystematicGenerator {
    BitMatrix g;  // k x N
    std::vector<std::uint32_t> systematic_positions;  // ascending, size k
    // Construction-to-encoding column map. Pivots are chosen greedily during
    // elimination instead of physically reordering columns, so this is the
    // identity and all downstream indexing stays in construction coordinates.
    std::vector<std::uint32_t> column_permutation;
};

struct LdpcCode {
    BitMatrix h;         // (N - k) x N
    TannerGraph graph;
    std::size_t block_length = 0;  // N
    std::size_t dimension = 0;     // k = N - rows(H), the design dimension
    std::uint64_t seed = 0;
    std::optional<SystematicGenerator> gen;  // populated by ensure_generator
};

// Regular Gallager-style code via socket matching: wc sockets per variable,
// wr per check, a random perfect matching, and local socket swaps to repair
// duplicate edges. Deterministic given the seed.
LdpcCode build_regular(std::size_t n, unsigned wc, unsigned wr, std::uint64_t seed);

// Irregular ensemble instance via the raw configuration model: node counts
// per degree come from largest-remainder apportionment of the
// edge-perspective fractions (residual edge-count mismatch repaired on the
// lowest-degree check class), sockets are matched by one random permutation,
// and edge multiplicities fold mod 2 into H. Parallel edges therefore
// cancel; the occasional column of effective degree 0 or 1 this produces is
// what lets puncturing patterns reach |R| = N - k.
LdpcCode build_irregular(std::size_t n, const DegreeDistribution& dist, std::uint64_t seed);

// Systematic generator for H. Throws RankDeficientError when H does not have
// full row rank.
SystematicGenerator derive_systematic_generator(const BitMatrix& h);

// Derive-and-cache; returns the cached generator on later calls.
const SystematicGenerator& ensure_generator(LdpcCode& code);

// alist text interchange (1-indexed adjacency, zero-padded degree rows).
void save_alist(std::ostream& out, const BitMatrix& h);
BitMatrix load_alist(std::istream& in);
void save_alist_file(const std::string& path, const BitMatrix& h);
BitMatrix load_alist_file(const std::string& path);

}  // namespace stopset
