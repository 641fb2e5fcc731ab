#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rarerules {

/// Fixed-length bit vector packed into 64-bit words. One BitRow per item
/// holds that item's indicator across all transactions, so support counting
/// reduces to word-wise AND + popcount.
class BitRow {
 public:
  BitRow() = default;

  explicit BitRow(std::size_t n_bits, bool value = false)
      : size_(n_bits), words_((n_bits + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    trim();
  }

  std::size_t size() const { return size_; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  BitRow& operator&=(const BitRow& other) {
    check_same_size(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }

  BitRow& operator|=(const BitRow& other) {
    check_same_size(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  /// popcount(*this & other) without materializing the intersection.
  std::size_t and_count(const BitRow& other) const {
    check_same_size(other);
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & other.words_[i]);
    return c;
  }

  /// popcount(*this & ~other).
  std::size_t andnot_count(const BitRow& other) const {
    check_same_size(other);
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += std::popcount(words_[i] & ~other.words_[i]);
    return c;
  }

  /// Reinitializes to a copy of `other` reusing existing storage.
  void assign(const BitRow& other) {
    size_ = other.size_;
    words_ = other.words_;
  }

  bool operator==(const BitRow& other) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void check_same_size(const BitRow& other) const {
    if (size_ != other.size_) throw std::logic_error("BitRow size mismatch");
  }

  // Bits past size_ stay zero so count() is exact.
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline BitRow operator&(BitRow lhs, const BitRow& rhs) {
  lhs &= rhs;
  return lhs;
}

inline BitRow operator|(BitRow lhs, const BitRow& rhs) {
  lhs |= rhs;
  return lhs;
}

}  // namespace rarerules
