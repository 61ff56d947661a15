#include "hpart/bitmap.hpp"

#include <bit>

namespace hpart {

void Bitmap::clear_tail() {
    if (universe_ % 64 && !words_.empty())
        words_.back() &= (std::uint64_t(1) << (universe_ % 64)) - 1;
}

std::size_t Bitmap::cardinality() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

Bitmap Bitmap::operator&(const Bitmap &o) const {
    check_universe(o);
    Bitmap r = *this;
    r.intersect_with(o);
    return r;
}

Bitmap Bitmap::operator|(const Bitmap &o) const {
    check_universe(o);
    Bitmap r = *this;
    for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
}

Bitmap Bitmap::operator~() const {
    Bitmap r = *this;
    for (auto &w : r.words_) w = ~w;
    r.clear_tail();
    return r;
}

bool Bitmap::operator==(const Bitmap &o) const {
    return universe_ == o.universe_ && words_ == o.words_;
}

void Bitmap::intersect_with(const Bitmap &o) {
    check_universe(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
}

void Bitmap::intersect_with_complement(const Bitmap &o) {
    check_universe(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    clear_tail();
}

std::vector<std::size_t> Bitmap::members() const {
    std::vector<std::size_t> out;
    out.reserve(cardinality());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = words_[w];
        while (word) {
            int b = std::countr_zero(word);
            out.push_back(w * 64 + static_cast<std::size_t>(b));
            word &= word - 1;
        }
    }
    return out;
}

Bitmap Bitmap::full(std::size_t universe) {
    Bitmap b(universe);
    for (auto &w : b.words_) w = ~std::uint64_t(0);
    b.clear_tail();
    return b;
}

} // namespace hpart
