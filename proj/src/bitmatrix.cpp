#include "stopset/bitmatrix.hpp"

#include <stdexcept>

namespace stopset {

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = m.row(r);
        for (auto& w : row) w = rng.u64();
    }
    // clear bits past cols in each row
    if (cols % 64 != 0 && m.row_words_ > 0) {
        const std::uint64_t mask = (std::uint64_t{1} << (cols % 64)) - 1;
        for (std::size_t r = 0; r < rows; ++r) m.row(r)[m.row_words_ - 1] &= mask;
    }
    return m;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = row(r);
        for (std::size_t w = 0; w < row_words_; ++w) {
            std::uint64_t word = src[w];
            while (word) {
                const int b = std::countr_zero(word);
                word &= word - 1;
                t.set(w * 64 + static_cast<std::size_t>(b), r, true);
            }
        }
    }
    return t;
}

BitMatrix multiply(const BitMatrix& a, const BitMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: a.cols != b.rows");
    BitMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto arow = a.row(r);
        auto orow = out.row(r);
        for (std::size_t w = 0; w < a.row_words(); ++w) {
            std::uint64_t word = arow[w];
            while (word) {
                const int bit = std::countr_zero(word);
                word &= word - 1;
                auto brow = b.row(w * 64 + static_cast<std::size_t>(bit));
                for (std::size_t ww = 0; ww < out.row_words(); ++ww) orow[ww] ^= brow[ww];
            }
        }
    }
    return out;
}

BitVec multiply(const BitVec& v, const BitMatrix& a) {
    if (v.size() != a.rows()) throw std::invalid_argument("multiply: v.size != a.rows");
    BitVec out(a.cols());
    const auto& words = v.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t word = words[w];
        while (word) {
            const int bit = std::countr_zero(word);
            word &= word - 1;
            auto arow = a.row(w * 64 + static_cast<std::size_t>(bit));
            for (std::size_t ww = 0; ww < out.words().size(); ++ww) out.words()[ww] ^= arow[ww];
        }
    }
    return out;
}

std::size_t rank(const BitMatrix& a) {
    BitMatrix m = a;
    std::size_t pivots = 0;
    for (std::size_t col = 0; col < m.cols() && pivots < m.rows(); ++col) {
        std::size_t pivot_row = pivots;
        while (pivot_row < m.rows() && !m.get(pivot_row, col)) ++pivot_row;
        if (pivot_row == m.rows()) continue;
        m.swap_rows(pivots, pivot_row);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r != pivots && m.get(r, col)) m.xor_row_into(pivots, r);
        }
        ++pivots;
    }
    return pivots;
}

Gf2Solution solve(const BitMatrix& coeff, const BitVec& rhs) {
    if (coeff.rows() != rhs.size()) throw std::invalid_argument("solve: coeff.rows != rhs.size");
    BitMatrix m = coeff;
    BitVec b = rhs;

    std::vector<std::uint32_t> pivot_cols;
    std::size_t pivots = 0;
    for (std::size_t col = 0; col < m.cols() && pivots < m.rows(); ++col) {
        std::size_t pivot_row = pivots;
        while (pivot_row < m.rows() && !m.get(pivot_row, col)) ++pivot_row;
        if (pivot_row == m.rows()) continue;
        m.swap_rows(pivots, pivot_row);
        if (pivot_row != pivots) {
            const bool t = b.get(pivots);
            b.set(pivots, b.get(pivot_row));
            b.set(pivot_row, t);
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r != pivots && m.get(r, col)) {
                m.xor_row_into(pivots, r);
                if (b.get(pivots)) b.flip(r);
            }
        }
        pivot_cols.push_back(static_cast<std::uint32_t>(col));
        ++pivots;
    }

    Gf2Solution sol;
    sol.unknowns = m.cols();
    sol.pivot_cols = pivot_cols;
    sol.consistent = true;
    for (std::size_t r = pivots; r < m.rows(); ++r) {
        if (b.get(r) && m.row_is_zero(r)) {
            sol.consistent = false;
            break;
        }
    }
    if (!sol.consistent) return sol;

    std::size_t next_pivot = 0;
    for (std::uint32_t c = 0; c < m.cols(); ++c) {
        if (next_pivot < pivot_cols.size() && pivot_cols[next_pivot] == c)
            ++next_pivot;
        else
            sol.free_cols.push_back(c);
    }
    sol.reduced_rows.reserve(pivots);
    sol.reduced_rhs = BitVec(pivots);
    for (std::size_t r = 0; r < pivots; ++r) {
        sol.reduced_rows.push_back(m.row_vec(r));
        sol.reduced_rhs.set(r, b.get(r));
    }
    return sol;
}

BitVec Gf2Solution::assignment(const BitVec& free_values) const {
    if (!consistent) throw std::logic_error("Gf2Solution::assignment on inconsistent system");
    if (free_values.size() != free_cols.size())
        throw std::invalid_argument("assignment: free value count mismatch");
    BitVec x(unknowns);
    for (std::size_t i = 0; i < free_cols.size(); ++i)
        if (free_values.get(i)) x.set(free_cols[i], true);
    // Pivot entries of x are still zero here and reduced rows vanish on the
    // other pivot columns, so the dot picks up free contributions only.
    for (std::size_t r = 0; r < pivot_cols.size(); ++r)
        x.set(pivot_cols[r], reduced_rhs.get(r) ^ reduced_rows[r].dot(x));
    return x;
}

std::optional<BitMatrix> invert(const BitMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("invert: matrix not square");
    const std::size_t n = a.rows();
    BitMatrix m = a;
    BitMatrix inv = BitMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot_row = col;
        while (pivot_row < n && !m.get(pivot_row, col)) ++pivot_row;
        if (pivot_row == n) return std::nullopt;
        m.swap_rows(col, pivot_row);
        inv.swap_rows(col, pivot_row);
        for (std::size_t r = 0; r < n; ++r) {
            if (r != col && m.get(r, col)) {
                m.xor_row_into(col, r);
                inv.xor_row_into(col, r);
            }
        }
    }
    return inv;
}

}  // namespace stopset
