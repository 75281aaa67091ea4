#pragma once

#include <stdexcept>
#include <string>

namespace stopset {

// Graph construction could not be completed (infeasible parameters after
// validation passed, or repair/retry budgets exhausted).
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// A parity-check matrix without full row rank cannot be put in systematic
// form at the design dimension.
struct RankDeficientError : std::runtime_error {
    RankDeficientError(std::size_t rank, std::size_t rows)
        : std::runtime_error("parity-check matrix is rank deficient: rank " +
                             std::to_string(rank) + " of " + std::to_string(rows) + " rows"),
          rank(rank),
          rows(rows) {}
    std::size_t rank;
    std::size_t rows;
};

// Received data violates the code constraints: bits were corrupted rather
// than erased. Erasure decoders treat this as a hard error.
struct DecodeError : std::runtime_error {
    explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// ARQ simulation safety cap tripped.
struct ChannelError : std::runtime_error {
    explicit ChannelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stopset
