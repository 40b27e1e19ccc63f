#include "olb/bitstr.hpp"

#include <stdexcept>

namespace olb {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.size() > kMaxLength) throw std::invalid_argument("BitString: too long");
  for (auto b : bits_)
    if (b > 1) throw std::invalid_argument("BitString: bits must be 0 or 1");
}

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("BitString: unexpected character '" + std::string(1, c) + "'");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitString(std::move(bits));
}

BitString BitString::zeros(std::size_t n) { return BitString(std::vector<std::uint8_t>(n, 0)); }
BitString BitString::ones(std::size_t n) { return BitString(std::vector<std::uint8_t>(n, 1)); }

std::uint8_t BitString::bit(std::size_t i) const {
  if (i < 1 || i > bits_.size()) throw std::out_of_range("BitString::bit: index out of range");
  return bits_[i - 1];
}

BitString BitString::flip_cut(std::size_t i) const {
  if (i < 1 || i > bits_.size())
    throw std::invalid_argument("flip_cut: index " + std::to_string(i) + " outside [1, " +
                                std::to_string(bits_.size()) + "]");
  std::vector<std::uint8_t> out(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(i));
  out.back() ^= 1u;
  return BitString(std::move(out));
}

BitString BitString::prefix(std::size_t l) const {
  if (l > bits_.size())
    throw std::invalid_argument("prefix: length " + std::to_string(l) + " exceeds " +
                                std::to_string(bits_.size()));
  return BitString(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(l)));
}

BitString BitString::append(std::uint8_t b) const {
  auto out = bits_;
  out.push_back(b);
  return BitString(std::move(out));
}

BitString BitString::with_bit(std::size_t i, std::uint8_t b) const {
  if (i < 1 || i > bits_.size()) throw std::out_of_range("BitString::with_bit: index out of range");
  auto out = bits_;
  out[i - 1] = b;
  return BitString(std::move(out));
}

bool BitString::is_prefix_of(const BitString& other) const noexcept {
  if (bits_.size() > other.bits_.size()) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] != other.bits_[i]) return false;
  return true;
}

std::string BitString::str() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = static_cast<char>('0' + bits_[i]);
  return out;
}

Relation relate(const BitString& s, const BitString& t) noexcept {
  const bool st = s.is_prefix_of(t);
  const bool ts = t.is_prefix_of(s);
  if (st && ts) return Relation::Equal;
  if (st) return Relation::PrefixOfSecond;
  if (ts) return Relation::PrefixOfFirst;
  return Relation::Parallel;
}

const char* to_string(Relation r) noexcept {
  switch (r) {
    case Relation::PrefixOfSecond: return "PrefixOfSecond";
    case Relation::PrefixOfFirst: return "PrefixOfFirst";
    case Relation::Equal: return "Equal";
    case Relation::Parallel: return "Parallel";
  }
  return "?";
}

BitString from_code(std::uint64_t code, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
  return BitString(std::move(bits));
}

std::vector<BitString> all_strings(std::size_t n) {
  if (n > 20) throw std::invalid_argument("all_strings: n too large to enumerate");
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) out.push_back(from_code(c, n));
  return out;
}

}  // namespace olb
