#ifndef PCOR_CONTEXT_HPP
#define PCOR_CONTEXT_HPP

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pcor {

/// A context: a fixed-length bit vector over all attribute-domain values,
/// grouped by attribute in schema order. Bit i set means the i-th domain value
/// (in canonical schema order) participates in the disjunction of its
/// attribute. Two contexts are connected in the context graph when they differ
/// in exactly one bit.
///
/// Bits are packed most-significant-first inside 64-bit words so that word-wise
/// unsigned comparison equals both lexicographic order of the 0/1 string and
/// ascending order of its integer interpretation.
class Context {
 public:
  Context() = default;

  /// All-zeros context of the given bit length.
  explicit Context(std::uint32_t size) : size_(size), words_((size + 63) / 64, 0) {}

  static Context all_ones(std::uint32_t size) {
    Context c(size);
    for (std::uint32_t i = 0; i < size; ++i) c.set(i, true);
    return c;
  }

  /// Context whose 0/1 string is the binary representation of `index`,
  /// left-padded to `size` bits. Requires size <= 63.
  static Context from_index(std::uint32_t size, std::uint64_t index);

  /// Parse a 0/1 string (canonical serialization).
  static Context from_string(std::string_view bits);

  std::uint32_t size() const { return size_; }

  bool test(std::uint32_t i) const {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1ULL;
  }

  void set(std::uint32_t i, bool value = true) {
    const std::uint64_t mask = 1ULL << (63 - (i & 63));
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void flip(std::uint32_t i) { words_[i >> 6] ^= 1ULL << (63 - (i & 63)); }

  Context flipped(std::uint32_t i) const {
    Context c(*this);
    c.flip(i);
    return c;
  }

  /// Hamming weight.
  std::uint32_t popcount() const {
    std::uint32_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::uint32_t>(std::popcount(w));
    return n;
  }

  /// Integer interpretation of the bit string (requires size <= 63).
  std::uint64_t to_index() const;

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::uint32_t i = 0; i < size_; ++i)
      if (test(i)) s[i] = '1';
    return s;
  }

  /// The t contexts at Hamming distance 1, in bit order.
  std::vector<Context> neighbors() const {
    std::vector<Context> out;
    out.reserve(size_);
    for (std::uint32_t i = 0; i < size_; ++i) out.push_back(flipped(i));
    return out;
  }

  bool operator==(const Context& other) const = default;

  std::strong_ordering operator<=>(const Context& other) const {
    if (auto c = size_ <=> other.size_; c != 0) return c;
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (auto c = words_[w] <=> other.words_[w]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::uint32_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ContextHash {
  std::size_t operator()(const Context& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ c.size();
    for (std::uint64_t w : c.words()) {
      h ^= w;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace pcor

#endif  // PCOR_CONTEXT_HPP
