#pragma once

#include <cstdint>
#include <vector>

#include "stopset/bitmatrix.hpp"
#include "stopset/tanner.hpp"

namespace stopset {

// Symbol alphabet {0, 1, erased}.
inline constexpr std::uint8_t kErased = 2;

// Length-N received word over {0, 1, erased}. Known and erased positions
// partition the index range.
struct ErasureWord {
    std::vector<std::uint8_t> symbols;

    ErasureWord() = default;
    explicit ErasureWord(std::size_t n, std::uint8_t fill = kErased) : symbols(n, fill) {}

    std::size_t size() const { return symbols.size(); }
    bool is_erased(std::size_t i) const { return symbols[i] == kErased; }
    bool bit(std::size_t i) const { return symbols[i] == 1; }
    void set_bit(std::size_t i, bool v) { symbols[i] = v ? 1 : 0; }
    void erase(std::size_t i) { symbols[i] = kErased; }

    std::vector<std::uint32_t> erased_positions() const {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < symbols.size(); ++i)
            if (symbols[i] == kErased) out.push_back(static_cast<std::uint32_t>(i));
        return out;
    }
    std::size_t erased_count() const {
        std::size_t c = 0;
        for (auto s : symbols) c += (s == kErased);
        return c;
    }
};

struct DecodeResult {
    ErasureWord word;  // possibly partial; originally known symbols unchanged
    bool resolved = false;
    std::size_t dof = 0;
    // For MP decoding: the residual erasures, i.e. the unique maximal
    // stopping set within the erased positions. For ML decoding: the free
    // (non-pivot) variable positions of the linear system, in elimination
    // order; guesses index into this set.
    std::vector<std::uint32_t> residual_set;
};

// Iterative peeling decoder. Batch rounds: all checks with exactly one
// erased neighbor resolve it, resolutions are applied simultaneously, repeat
// until stalled. Throws DecodeError when the known bits violate a fully
// known check or two checks force different values (corrupted input rather
// than erasure).
DecodeResult mp_decode(const TannerGraph& graph, const ErasureWord& y);

// Peeling without consistency enforcement: conflicting resolutions take the
// first value in check order and final parity is not validated. Used to
// complete a word from guessed bits that need not be globally consistent.
ErasureWord mp_complete(const TannerGraph& graph, const ErasureWord& y);

// Maximum-likelihood erasure decoder: solves H_Kbar x = z where z collects
// the known-bit contributions. dof is the free count |Kbar| - rank(H_Kbar).
// Throws DecodeError when the system is inconsistent.
DecodeResult ml_decode(const BitMatrix& h, const ErasureWord& y);

// Complete a word by assigning `guess` to the free variables of the ML
// system (one bit per entry of ml_decode's residual_set, same order) and
// forward-substituting the pivots. The all-correct guess reproduces the
// transmitted codeword.
ErasureWord guess_complete(const BitMatrix& h, const ErasureWord& y, const BitVec& guess);

// Smallest number of bit values that must be supplied for MP decoding to
// finish, by exhausting subsets of the residual stopping set. Exponential;
// guarded to graphs with at most 20 variables.
std::size_t minimal_supply_exhaustive(const TannerGraph& graph, const ErasureWord& y);

}  // namespace stopset
