#include "olb/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace olb {

namespace mp = boost::multiprecision;

Dyadic::Dyadic(std::int64_t value) : mantissa_(value) { normalize(); }

Dyadic::Dyadic(Int mantissa, std::int64_t exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  normalize();
}

Dyadic Dyadic::ratio(std::int64_t num, unsigned k) { return Dyadic(Int(num), -static_cast<std::int64_t>(k)); }

Dyadic Dyadic::from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("Dyadic::from_double: non-finite value");
  if (v == 0.0) return Dyadic();
  int e = 0;
  const double f = std::frexp(v, &e);
  const auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
  return Dyadic(Int(m), static_cast<std::int64_t>(e) - 53);
}

void Dyadic::normalize() {
  if (mantissa_.is_zero()) {
    exponent_ = 0;
    return;
  }
  const bool neg = mantissa_.sign() < 0;
  Int mag = neg ? Int(-mantissa_) : mantissa_;
  const auto tz = mp::lsb(mag);
  if (tz > 0) {
    mag >>= tz;
    exponent_ += static_cast<std::int64_t>(tz);
  }
  mantissa_ = neg ? Int(-mag) : mag;
}

Dyadic Dyadic::operator-() const {
  Dyadic out = *this;
  out.mantissa_ = -out.mantissa_;
  return out;
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (exponent_ == o.exponent_) {
    mantissa_ += o.mantissa_;
  } else if (exponent_ > o.exponent_) {
    mantissa_ <<= static_cast<unsigned>(exponent_ - o.exponent_);
    mantissa_ += o.mantissa_;
    exponent_ = o.exponent_;
  } else {
    Int shifted = o.mantissa_ << static_cast<unsigned>(o.exponent_ - exponent_);
    mantissa_ += shifted;
  }
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& o) { return *this += -o; }

Dyadic& Dyadic::operator*=(const Dyadic& o) {
  mantissa_ *= o.mantissa_;
  exponent_ += o.exponent_;
  if (mantissa_.is_zero()) exponent_ = 0;
  return *this;
}

Dyadic Dyadic::scaled(std::int64_t k) const {
  Dyadic out = *this;
  if (!out.is_zero()) out.exponent_ += k;
  return out;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  if (a.exponent_ == b.exponent_) return a.mantissa_.compare(b.mantissa_) <=> 0;
  if (a.exponent_ > b.exponent_) {
    Dyadic::Int am = a.mantissa_ << static_cast<unsigned>(a.exponent_ - b.exponent_);
    return am.compare(b.mantissa_) <=> 0;
  }
  Dyadic::Int bm = b.mantissa_ << static_cast<unsigned>(b.exponent_ - a.exponent_);
  return a.mantissa_.compare(bm) <=> 0;
}

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  const auto bits = static_cast<std::int64_t>(mp::msb(mp::abs(mantissa_)));
  if (bits > 60) {
    // Keep the top 61 bits so the conversion stays within int64.
    const auto drop = static_cast<unsigned>(bits - 60);
    const Int top = mantissa_ >> drop;
    return std::ldexp(static_cast<double>(top.convert_to<std::int64_t>()),
                      static_cast<int>(exponent_ + static_cast<std::int64_t>(drop)));
  }
  return std::ldexp(static_cast<double>(mantissa_.convert_to<std::int64_t>()), static_cast<int>(exponent_));
}

std::string Dyadic::str() const { return mantissa_.str() + "*2^" + std::to_string(exponent_); }

std::string Dyadic::decimal() const {
  if (exponent_ >= 0) return Int(mantissa_ << static_cast<unsigned>(exponent_)).str();
  const auto k = static_cast<unsigned>(-exponent_);
  Int mag = mp::abs(mantissa_) * mp::pow(Int(5), k);
  std::string digits = mag.str();
  if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
  digits.insert(digits.size() - k, ".");
  return (sign() < 0 ? "-" : "") + digits;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

Dyadic::Int decimal_int(std::string digits) {
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  return Dyadic::Int(digits);
}

Dyadic::Int parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw std::invalid_argument("Dyadic::parse: empty integer");
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') i = 1;
  if (i == s.size()) throw std::invalid_argument("Dyadic::parse: bad integer");
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') throw std::invalid_argument("Dyadic::parse: bad integer '" + std::string(s) + "'");
  const Dyadic::Int v = decimal_int(std::string(s.substr(i)));
  return s[0] == '-' ? Dyadic::Int(-v) : v;
}

std::int64_t parse_small(std::string_view s) {
  const auto v = parse_int(s);
  if (mp::abs(v) > 1'000'000'000) throw std::invalid_argument("Dyadic::parse: exponent out of range");
  return v.convert_to<std::int64_t>();
}

}  // namespace

Dyadic Dyadic::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("Dyadic::parse: empty input");

  if (auto star = text.find("*2^"); star != std::string_view::npos)
    return Dyadic(parse_int(text.substr(0, star)), parse_small(text.substr(star + 3)));

  if (text.rfind("2^", 0) == 0) return pow2(parse_small(text.substr(2)));

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Int num = parse_int(text.substr(0, slash));
    const Int den = parse_int(text.substr(slash + 1));
    if (den <= 0) throw std::invalid_argument("Dyadic::parse: denominator must be positive");
    const auto e = mp::lsb(den);
    if ((den >> e) != 1) throw std::invalid_argument("Dyadic::parse: denominator is not a power of two");
    return Dyadic(num, -static_cast<std::int64_t>(e));
  }

  const bool neg = text[0] == '-';
  std::string_view body = (text[0] == '-' || text[0] == '+') ? text.substr(1) : text;
  const auto dot = body.find('.');
  std::string digits(body.substr(0, dot));
  std::string frac = dot == std::string_view::npos ? std::string() : std::string(body.substr(dot + 1));
  if (digits.empty() && frac.empty()) throw std::invalid_argument("Dyadic::parse: no digits");
  for (char c : digits + frac)
    if (c < '0' || c > '9') throw std::invalid_argument("Dyadic::parse: bad number '" + std::string(text) + "'");
  const auto k = static_cast<unsigned>(frac.size());
  const Int whole = decimal_int(digits + frac);
  const Int five_k = mp::pow(Int(5), k);
  if (whole % five_k != 0)
    throw std::invalid_argument("Dyadic::parse: '" + std::string(text) + "' is not a dyadic rational");
  Int m = whole / five_k;
  if (neg) m = -m;
  return Dyadic(m, -static_cast<std::int64_t>(k));
}

Dyadic abs(const Dyadic& d) { return d.sign() < 0 ? -d : d; }
Dyadic min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }
Dyadic midpoint(const Dyadic& a, const Dyadic& b) { return (a + b).scaled(-1); }

}  // namespace olb
