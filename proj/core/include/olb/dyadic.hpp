#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace olb {

/// Exact dyadic rational mantissa·2^exponent. Canonical form keeps the
/// mantissa odd, or zero with exponent 0, so equality is structural.
class Dyadic {
 public:
  using Int = boost::multiprecision::cpp_int;

  Dyadic() = default;
  Dyadic(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Dyadic(Int mantissa, std::int64_t exponent);

  /// num / 2^k.
  static Dyadic ratio(std::int64_t num, unsigned k);
  static Dyadic pow2(std::int64_t e) { return Dyadic(Int(1), e); }
  /// Every finite binary64 value is dyadic; throws on NaN/inf.
  static Dyadic from_double(double v);

  /// Accepts "m*2^e", "a/b" with b a power of two, integers, and decimals
  /// whose value has a power-of-two denominator. Throws std::invalid_argument.
  static Dyadic parse(std::string_view text);

  const Int& mantissa() const noexcept { return mantissa_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  int sign() const noexcept { return mantissa_.sign(); }
  bool is_zero() const noexcept { return mantissa_.is_zero(); }

  Dyadic operator-() const;
  Dyadic& operator+=(const Dyadic& o);
  Dyadic& operator-=(const Dyadic& o);
  Dyadic& operator*=(const Dyadic& o);
  /// Exact multiplication by 2^k.
  Dyadic scaled(std::int64_t k) const;

  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  double to_double() const;
  /// "m*2^e".
  std::string str() const;
  /// Exact decimal expansion (always terminates for dyadics).
  std::string decimal() const;

 private:
  void normalize();

  Int mantissa_ = 0;
  std::int64_t exponent_ = 0;
};

Dyadic abs(const Dyadic& d);
Dyadic min(const Dyadic& a, const Dyadic& b);
Dyadic max(const Dyadic& a, const Dyadic& b);
/// Midpoint (a+b)/2, exact.
Dyadic midpoint(const Dyadic& a, const Dyadic& b);

}  // namespace olb
