#pragma once

#include "hpart/scalar.hpp"

#include <cstdint>
#include <vector>

namespace hpart {

/// Bitset over a declared universe 0..universe-1 with fast AND/OR/NOT and
/// popcount cardinality. NOT is taken against the universe.
class Bitmap {
public:
    Bitmap() = default;
    explicit Bitmap(std::size_t universe)
        : universe_(universe), words_((universe + 63) / 64, 0) {}

    std::size_t universe() const { return universe_; }

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    std::size_t cardinality() const;
    bool empty() const { return cardinality() == 0; }

    Bitmap operator&(const Bitmap &o) const;
    Bitmap operator|(const Bitmap &o) const;
    Bitmap operator~() const;

    bool operator==(const Bitmap &o) const;

    /// In-place AND, the hot path of fragment derivation.
    void intersect_with(const Bitmap &o);
    void intersect_with_complement(const Bitmap &o);

    std::vector<std::size_t> members() const;

    const std::vector<std::uint64_t> &words() const { return words_; }
    std::vector<std::uint64_t> &mutable_words() { return words_; }

    static Bitmap full(std::size_t universe);

private:
    void check_universe(const Bitmap &o) const {
        if (universe_ != o.universe_)
            throw Error("bitmap universe size mismatch");
    }
    void clear_tail();

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace hpart
