#include "stopset/erasure.hpp"

#include <algorithm>
#include <stdexcept>

#include "stopset/errors.hpp"
#include "stopset/stopping.hpp"

namespace stopset {

namespace {

DecodeResult peel(const TannerGraph& graph, const ErasureWord& y, bool validate) {
    if (y.size() != graph.var_count)
        throw std::invalid_argument("mp_decode: word length does not match graph");

    DecodeResult res;
    res.word = y;

    std::vector<std::uint32_t> erased_count(graph.check_count, 0);
    std::vector<std::uint8_t> acc(graph.check_count, 0);  // xor of known neighbors
    for (std::size_t c = 0; c < graph.check_count; ++c) {
        for (auto v : graph.check_neighbors[c]) {
            if (res.word.is_erased(v))
                ++erased_count[c];
            else
                acc[c] ^= res.word.bit(v) ? 1 : 0;
        }
    }

    std::vector<std::pair<std::uint32_t, std::uint8_t>> round;  // (variable, value)
    std::vector<std::uint8_t> pending(graph.var_count, 0);
    for (;;) {
        round.clear();
        for (std::size_t c = 0; c < graph.check_count; ++c) {
            if (erased_count[c] != 1) continue;
            std::uint32_t var = 0;
            for (auto v : graph.check_neighbors[c]) {
                if (res.word.is_erased(v)) {
                    var = v;
                    break;
                }
            }
            if (pending[var]) {
                if (validate) {
                    for (auto& [pv, pval] : round) {
                        if (pv == var && pval != acc[c])
                            throw DecodeError("conflicting resolutions for variable " +
                                              std::to_string(var));
                    }
                }
                continue;  // first resolution wins
            }
            pending[var] = 1;
            round.push_back({var, acc[c]});
        }
        if (round.empty()) break;
        for (auto& [var, val] : round) {
            pending[var] = 0;
            res.word.set_bit(var, val != 0);
            for (auto c : graph.var_neighbors[var]) {
                --erased_count[c];
                acc[c] ^= val;
            }
        }
    }

    if (validate) {
        for (std::size_t c = 0; c < graph.check_count; ++c) {
            if (erased_count[c] == 0 && acc[c] != 0)
                throw DecodeError("parity violation at check " + std::to_string(c));
        }
    }

    res.residual_set = res.word.erased_positions();
    res.dof = res.residual_set.size();
    res.resolved = res.residual_set.empty();
    return res;
}

}  // namespace

DecodeResult mp_decode(const TannerGraph& graph, const ErasureWord& y) {
    return peel(graph, y, true);
}

ErasureWord mp_complete(const TannerGraph& graph, const ErasureWord& y) {
    return peel(graph, y, false).word;
}

namespace {

// The system H_Kbar x_Kbar^T = z^T of Eq.-style erasure decoding: columns of
// H at the erased positions, right-hand side from the known bits.
Gf2Solution erased_system(const BitMatrix& h, const ErasureWord& y,
                          const std::vector<std::uint32_t>& erased) {
    BitVec values(h.cols());
    for (std::size_t i = 0; i < h.cols(); ++i)
        if (!y.is_erased(i) && y.bit(i)) values.set(i, true);

    BitVec rhs(h.rows());
    for (std::size_t r = 0; r < h.rows(); ++r) rhs.set(r, h.row_vec(r).dot(values));

    BitMatrix sub(h.rows(), erased.size());
    for (std::size_t j = 0; j < erased.size(); ++j)
        for (std::size_t r = 0; r < h.rows(); ++r)
            if (h.get(r, erased[j])) sub.set(r, j, true);

    return solve(sub, rhs);
}

}  // namespace

DecodeResult ml_decode(const BitMatrix& h, const ErasureWord& y) {
    if (y.size() != h.cols()) throw std::invalid_argument("ml_decode: word length != H columns");

    const auto erased = y.erased_positions();
    Gf2Solution sol = erased_system(h, y, erased);
    if (!sol.consistent) throw DecodeError("ml_decode: inconsistent system, input corrupted");

    DecodeResult res;
    res.word = y;
    res.dof = sol.free_count();
    res.resolved = (res.dof == 0);
    for (auto fc : sol.free_cols) res.residual_set.push_back(erased[fc]);
    if (res.resolved) {
        BitVec x = sol.particular();
        for (std::size_t j = 0; j < erased.size(); ++j) res.word.set_bit(erased[j], x.get(j));
    }
    return res;
}

ErasureWord guess_complete(const BitMatrix& h, const ErasureWord& y, const BitVec& guess) {
    if (y.size() != h.cols())
        throw std::invalid_argument("guess_complete: word length != H columns");
    const auto erased = y.erased_positions();
    Gf2Solution sol = erased_system(h, y, erased);
    if (!sol.consistent) throw DecodeError("guess_complete: inconsistent system, input corrupted");
    if (guess.size() != sol.free_count())
        throw std::invalid_argument("guess_complete: guess has " + std::to_string(guess.size()) +
                                    " bits, system has " + std::to_string(sol.free_count()) +
                                    " free variables");

    BitVec x = sol.assignment(guess);
    ErasureWord out = y;
    for (std::size_t j = 0; j < erased.size(); ++j) out.set_bit(erased[j], x.get(j));
    return out;
}

std::size_t minimal_supply_exhaustive(const TannerGraph& graph, const ErasureWord& y) {
    if (graph.var_count > 20)
        throw std::invalid_argument("minimal_supply_exhaustive: graph too large (N > 20)");
    const auto residual = mp_decode(graph, y).residual_set;
    if (residual.empty()) return 0;

    // Decodability depends on positions only: supplying S finishes MP decoding
    // iff the residual minus S contains no stopping set.
    const std::uint32_t n = static_cast<std::uint32_t>(residual.size());
    std::vector<std::uint32_t> remaining;
    for (std::size_t size = 1; size < n; ++size) {
        std::vector<std::uint32_t> pick(size, 0);
        // enumerate size-subsets of the residual by odometer
        for (std::size_t i = 0; i < size; ++i) pick[i] = static_cast<std::uint32_t>(i);
        for (;;) {
            remaining.clear();
            std::size_t next = 0;
            for (std::uint32_t i = 0; i < n; ++i) {
                if (next < size && pick[next] == i)
                    ++next;
                else
                    remaining.push_back(residual[i]);
            }
            if (find_maximal(graph, remaining).empty()) return size;
            // advance odometer
            std::size_t j = size;
            while (j > 0 && pick[j - 1] == n - (size - (j - 1))) --j;
            if (j == 0) break;
            ++pick[j - 1];
            for (std::size_t t = j; t < size; ++t) pick[t] = pick[t - 1] + 1;
        }
    }
    return n;
}

}  // namespace stopset
