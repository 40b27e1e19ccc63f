#include "olb/family_1d.hpp"

#include <stdexcept>

namespace olb {

void to_json(nlohmann::json& j, const Dyadic& d) { j = d.str(); }
void from_json(const nlohmann::json& j, Dyadic& d) { d = Dyadic::parse(j.get<std::string>()); }
void to_json(nlohmann::json& j, const FirstOrderAnswer<Dyadic>& a) {
  j = {{"value", a.value.str()}, {"axis", a.axis}, {"slope", a.slope.str()}};
}

namespace f1d {
namespace {

// Center and half-length of the intervals along s, level by level.
struct Level {
  Dyadic center;
  Dyadic half;
};

void check_domain(const Dyadic& x) {
  if (abs(x) > Dyadic(1)) throw DomainError("1D family: query " + x.decimal() + " outside [-1, 1]");
}

int sign_of(const Dyadic& d) { return d.sign() > 0 ? 1 : (d.sign() < 0 ? -1 : 0); }

// Deepest level j ≤ |s| whose patch region contains x, with that level's
// center; level 0 means f_s(x) = |x|.
std::pair<std::size_t, Dyadic> active_level(const BitString& s, const Dyadic& x) {
  std::size_t deepest = 0;
  Dyadic deepest_center(0);
  Dyadic c(0);
  Dyadic h(1);
  for (std::size_t j = 1; j <= s.size(); ++j) {
    const bool right = s.bit(j) == 0;  // bit 0 puts the patch on I_s[−1/2, 1]
    const Dyadic lo = right ? c - h.scaled(-1) : c - h;
    const Dyadic hi = right ? c + h : c + h.scaled(-1);
    const Dyadic quarter = h.scaled(-2);
    c = right ? c - quarter : c + quarter;
    h = quarter;
    if (lo <= x && x <= hi) {
      deepest = j;
      deepest_center = c;
    }
  }
  return {deepest, deepest_center};
}

}  // namespace

Dyadic Interval1D::point_at(const Dyadic& t) const { return lo + (Dyadic(1) + t) * (hi - lo).scaled(-1); }

std::string Interval1D::str() const { return "[" + lo.decimal() + ", " + hi.decimal() + "]"; }

Family1D::Family1D(std::size_t depth) : M(depth) {
  if (M < 1) throw std::invalid_argument("Family1D: depth must be ≥ 1");
}

Family1D Family1D::from_eps(const Dyadic& eps) {
  if (eps.sign() <= 0) throw std::invalid_argument("Family1D: ε must be positive");
  std::size_t m = 0;
  while (eps <= Dyadic::pow2(-3 * static_cast<std::int64_t>(m + 1))) ++m;
  if (m < 1) throw std::invalid_argument("Family1D: ε = " + eps.decimal() + " too coarse (need ε ≤ 1/8)");
  return Family1D(m);
}

void Family1D::check(const BitString& s) const {
  if (s.size() > M)
    throw std::invalid_argument("Family1D: string length " + std::to_string(s.size()) + " exceeds depth " +
                                std::to_string(M));
}

Interval1D interval_of(const BitString& s) {
  Dyadic c(0);
  Dyadic h(1);
  for (std::size_t j = 1; j <= s.size(); ++j) {
    h = h.scaled(-2);
    c = s.bit(j) == 0 ? c - h : c + h;
  }
  return {c - h, c + h};
}

Interval1D interval_of(const BitString& s, const Family1D& fam) {
  fam.check(s);
  return interval_of(s);
}

Dyadic breakpoint(std::size_t k) {
  Dyadic b(1);
  for (std::size_t j = 0; j < k; ++j) b -= Dyadic::pow2(-3 * static_cast<std::int64_t>(j) - 1);
  return b;
}

Dyadic canonical_form(const BitString& s, const Dyadic& x) {
  const auto L = static_cast<std::int64_t>(s.size());
  return breakpoint(s.size()) - Dyadic::pow2(-3 * L) + abs(x - interval_of(s).center()).scaled(-L);
}

Dyadic eval(const BitString& s, const Dyadic& x) {
  check_domain(x);
  const auto [level, center] = active_level(s, x);
  if (level == 0) return abs(x);
  const auto j = static_cast<std::int64_t>(level);
  return breakpoint(level) - Dyadic::pow2(-3 * j) + abs(x - center).scaled(-j);
}

Dyadic subgradient_1d(const BitString& s, const Dyadic& x) {
  check_domain(x);
  const auto [level, center] = active_level(s, x);
  if (level == 0) return Dyadic(sign_of(x));
  return Dyadic(sign_of(x - center)).scaled(-static_cast<std::int64_t>(level));
}

BitString query_string(const Dyadic& x, std::size_t M) {
  check_domain(x);
  if (M < 1) throw std::invalid_argument("query_string: M must be ≥ 1");
  BitString s0;
  while (s0.size() + 1 < M) {
    const auto zero = s0.append(0);
    const auto one = s0.append(1);
    if (interval_of(zero).interior_contains(x))
      s0 = zero;
    else if (interval_of(one).interior_contains(x))
      s0 = one;
    else
      break;
  }
  const auto zero = s0.append(0);
  const auto one = s0.append(1);
  return eval(one, x) < eval(zero, x) ? one : zero;
}

sgp::Query sgp_query(const Dyadic& x, std::size_t M) {
  sgp::Query q;
  q.guess = query_string(x, M);
  q.sigma.resize(q.guess.size());
  for (std::size_t i = 0; i < q.sigma.size(); ++i) q.sigma[i] = i + 1;
  return q;
}

BitString answered_prefix(const BitString& s, const sgp::Answer& a) { return a.equal ? s : s.flip_cut(a.k); }

Emulated1D emulate_first_order(const Dyadic& x, const sgp::Answer& a, const BitString& s) {
  Emulated1D out;
  out.prefix = answered_prefix(s, a);
  out.answer = {eval(out.prefix, x), 1, subgradient_1d(out.prefix, x)};
  return out;
}

BitString revealed_prefix(const BitString& S, const BitString& s) {
  for (std::size_t k = 1; k <= s.size(); ++k)
    if (S.bit(k) != s.bit(k)) return s.flip_cut(k);
  return s;
}

FirstOrderAnswer<Dyadic> reference_oracle(const BitString& S, const Dyadic& x) {
  const auto P = revealed_prefix(S, query_string(x, S.size()));
  return {eval(S, x), 1, subgradient_1d(P, x)};
}

Dyadic minimum_value(std::size_t M) {
  return breakpoint(M) - Dyadic::pow2(-3 * static_cast<std::int64_t>(M));
}

Interval1D eps_minima(const BitString& s, const Dyadic& eps) {
  const auto M = static_cast<std::int64_t>(s.size());
  if (eps.sign() <= 0 || eps > Dyadic::pow2(-3 * M))
    throw std::invalid_argument("eps_minima: need 0 < ε ≤ 2^{-3M}, got ε = " + eps.decimal());
  const Dyadic c = interval_of(s).center();
  const Dyadic r = eps.scaled(M);
  return {c - r, c + r};
}

}  // namespace f1d
}  // namespace olb
