#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stopset/bitvec.hpp"
#include "stopset/rng.hpp"

namespace stopset {

// Dense binary matrix over GF(2) with 64-bit packed rows. Dimensions are
// fixed at construction; all arithmetic is mod 2.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), row_words_((cols + 63) / 64), data_(rows * row_words_, 0) {}

    static BitMatrix identity(std::size_t n);
    static BitMatrix random(std::size_t rows, std::size_t cols, Rng& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t row_words() const { return row_words_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * row_words_ + (c >> 6)] >> (c & 63)) & 1;
    }
    void set(std::size_t r, std::size_t c, bool value) {
        const std::uint64_t bit = std::uint64_t{1} << (c & 63);
        if (value)
            data_[r * row_words_ + (c >> 6)] |= bit;
        else
            data_[r * row_words_ + (c >> 6)] &= ~bit;
    }

    std::span<std::uint64_t> row(std::size_t r) {
        return {data_.data() + r * row_words_, row_words_};
    }
    std::span<const std::uint64_t> row(std::size_t r) const {
        return {data_.data() + r * row_words_, row_words_};
    }

    void xor_row_into(std::size_t src, std::size_t dst) {
        auto* s = data_.data() + src * row_words_;
        auto* d = data_.data() + dst * row_words_;
        for (std::size_t w = 0; w < row_words_; ++w) d[w] ^= s[w];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        auto* pa = data_.data() + a * row_words_;
        auto* pb = data_.data() + b * row_words_;
        for (std::size_t w = 0; w < row_words_; ++w) std::swap(pa[w], pb[w]);
    }

    BitVec row_vec(std::size_t r) const {
        BitVec v(cols_);
        auto src = row(r);
        for (std::size_t w = 0; w < row_words_; ++w) v.words()[w] = src[w];
        return v;
    }

    bool row_is_zero(std::size_t r) const {
        auto src = row(r);
        for (auto w : src)
            if (w) return false;
        return true;
    }

    BitMatrix transpose() const;

    bool operator==(const BitMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }
    bool operator!=(const BitMatrix& other) const { return !(*this == other); }

private:
    std::size_t rows_ = 0, cols_ = 0, row_words_ = 0;
    std::vector<std::uint64_t> data_;
};

// Parametrized solution of a GF(2) linear system in reduced row-echelon
// form. Pivot variables are stored as affine functions of the free
// variables, so extracting one assignment or enumerating all of them is
// O(free_count * cols).
struct Gf2Solution {
    bool consistent = false;
    std::size_t unknowns = 0;
    std::vector<std::uint32_t> pivot_cols;  // ascending
    std::vector<std::uint32_t> free_cols;   // ascending
    // reduced_rows[r] is the RREF row whose pivot is pivot_cols[r]; entries at
    // other pivot columns are zero, so only free-column coefficients remain.
    std::vector<BitVec> reduced_rows;
    BitVec reduced_rhs;

    std::size_t free_count() const { return free_cols.size(); }

    // Full assignment given values for the free variables, listed in
    // free_cols order. Requires consistent.
    BitVec assignment(const BitVec& free_values) const;

    // Shorthand for the all-zero free assignment.
    BitVec particular() const { return assignment(BitVec(free_cols.size())); }
};

// a * b mod 2; throws std::invalid_argument on inner-dimension mismatch.
BitMatrix multiply(const BitMatrix& a, const BitMatrix& b);

// Row vector times matrix: v * a, with v.size() == a.rows().
BitVec multiply(const BitVec& v, const BitMatrix& a);

// Number of pivots under Gauss-Jordan elimination.
std::size_t rank(const BitMatrix& a);

// Solve coeff * x = rhs. Inconsistency is reported in the result, not
// thrown; throws only on dimension mismatch.
Gf2Solution solve(const BitMatrix& coeff, const BitVec& rhs);

// Inverse of a square matrix, or nullopt when singular.
std::optional<BitMatrix> invert(const BitMatrix& a);

}  // namespace stopset
