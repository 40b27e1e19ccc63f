#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace olb {

/// Finite binary string. Bits are addressed from 1, so bit(1) is the first
/// character of the textual form. The empty string serializes as "".
class BitString {
 public:
  static constexpr std::size_t kMaxLength = std::size_t{1} << 16;

  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses ASCII '0'/'1'. Throws std::invalid_argument on any other byte.
  static BitString parse(std::string_view text);
  static BitString zeros(std::size_t n);
  static BitString ones(std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  /// 1-based access; throws std::out_of_range.
  std::uint8_t bit(std::size_t i) const;

  /// First i−1 bits kept, bit i flipped, the rest dropped.
  BitString flip_cut(std::size_t i) const;
  BitString prefix(std::size_t l) const;
  BitString append(std::uint8_t b) const;
  BitString with_bit(std::size_t i, std::uint8_t b) const;

  bool is_prefix_of(const BitString& other) const noexcept;

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::string str() const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class Relation { PrefixOfSecond, PrefixOfFirst, Equal, Parallel };

Relation relate(const BitString& s, const BitString& t) noexcept;

const char* to_string(Relation r) noexcept;

/// All strings of length n in lexicographic order (n ≤ 20).
std::vector<BitString> all_strings(std::size_t n);

/// Bit string from the low n bits of `code`, most significant first.
BitString from_code(std::uint64_t code, std::size_t n);

}  // namespace olb
