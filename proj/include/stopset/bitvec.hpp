#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stopset/rng.hpp"

namespace stopset {

// Packed vector over GF(2). Bit i lives in word i/64, position i%64.
// Trailing bits of the last word are kept zero so that popcount and
// equality work on whole words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    static BitVec random(std::size_t n, Rng& rng) {
        BitVec v(n);
        for (auto& w : v.words_) w = rng.u64();
        v.mask_tail();
        return v;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(std::size_t i, bool value) {
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= bit;
        else
            words_[i >> 6] &= ~bit;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVec& operator^=(const BitVec& other) {
        if (other.size_ != size_) throw std::invalid_argument("BitVec xor: size mismatch");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    // Parity of the AND with another vector: <this, other> over GF(2).
    bool dot(const BitVec& other) const {
        if (other.size_ != size_) throw std::invalid_argument("BitVec dot: size mismatch");
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
        return (std::popcount(acc) & 1) != 0;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    bool operator==(const BitVec& other) const {
        return size_ == other.size_ && words_ == other.words_;
    }
    bool operator!=(const BitVec& other) const { return !(*this == other); }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    void mask_tail() {
        if (size_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace stopset
