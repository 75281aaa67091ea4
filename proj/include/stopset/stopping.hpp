#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stopset/tanner.hpp"

namespace stopset {

// Puncturing pattern: R (punctured variable nodes) and its complement Q
// (transmitted). An acceptable pattern has no stopping set inside R while
// R plus any single transmitted node contains one.
struct PuncturePattern {
    std::vector<std::uint32_t> punctured;    // R, ascending
    std::vector<std::uint32_t> transmitted;  // Q, ascending
    std::size_t n = 0;                       // |Q|, the post-puncturing blocklength
    std::uint64_t seed = 0;
    std::string code_ref;
};

// The unique maximal stopping set contained in `subset`, found by peeling
// the induced subgraph: members adjacent to induced-degree-one checks are
// deleted until none remain. Empty result means no nonempty stopping set.
std::vector<std::uint32_t> find_maximal(const TannerGraph& graph,
                                        std::span<const std::uint32_t> subset);

// Random-order greedy pattern construction: visit the variables in a seeded
// uniform shuffle, move each into R when R plus the node stays
// stopping-set-free and into Q otherwise. The output is always acceptable.
PuncturePattern find_acceptable_pattern(const TannerGraph& graph, std::uint64_t seed);

struct AcceptabilityReport {
    bool acceptable = false;
    std::optional<std::uint32_t> offending_node;
    std::string reason;
};

// Definition check: no stopping set inside R, and every transmitted node
// creates one when added. Reports the first violation found.
AcceptabilityReport verify_acceptable(const TannerGraph& graph, const PuncturePattern& pattern);

// Pattern file: JSON object {code_ref, seed, R, n}.
void save_pattern(std::ostream& out, const PuncturePattern& pattern);
PuncturePattern load_pattern(std::istream& in, std::size_t var_count);

}  // namespace stopset
