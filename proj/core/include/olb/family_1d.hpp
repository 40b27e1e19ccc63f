#pragma once

#include "olb/bitstr.hpp"
#include "olb/dyadic.hpp"
#include "olb/first_order.hpp"
#include "olb/sgp.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>

namespace olb {

void to_json(nlohmann::json& j, const Dyadic& d);
void from_json(const nlohmann::json& j, Dyadic& d);
void to_json(nlohmann::json& j, const FirstOrderAnswer<Dyadic>& a);

namespace f1d {

/// Closed interval [lo, hi] with lo < hi.
struct Interval1D {
  Dyadic lo, hi;

  /// lo + (1+t)(hi−lo)/2, so −1 ↦ lo, 0 ↦ midpoint, +1 ↦ hi.
  Dyadic point_at(const Dyadic& t) const;
  Dyadic center() const { return midpoint(lo, hi); }
  Dyadic length() const { return hi - lo; }
  bool contains(const Dyadic& x) const { return lo <= x && x <= hi; }
  bool interior_contains(const Dyadic& x) const { return lo < x && x < hi; }
  std::string str() const;

  friend bool operator==(const Interval1D&, const Interval1D&) = default;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The depth-M family {f_s : |s| ≤ M} on [−1, 1].
struct Family1D {
  std::size_t M = 1;

  explicit Family1D(std::size_t depth);
  /// Largest M with ε ≤ 2^{−3M}; throws std::invalid_argument if M would be 0.
  static Family1D from_eps(const Dyadic& eps);

  void check(const BitString& s) const;
};

Interval1D interval_of(const BitString& s);
Interval1D interval_of(const BitString& s, const Family1D& fam);

/// b_k, with b_0 = 1 and b_{k+1} = b_k − (1/2)·8^{−k}.
Dyadic breakpoint(std::size_t k);

/// f_s(x), exact. Throws DomainError if |x| > 1.
Dyadic eval(const BitString& s, const Dyadic& x);
/// Slope of the linear piece of f_s active at x; 0 at a kink.
Dyadic subgradient_1d(const BitString& s, const Dyadic& x);
/// Canonical form on I_s: b_{|s|} − 8^{−|s|} + 2^{−|s|}|x − I_s(0)|.
Dyadic canonical_form(const BitString& s, const Dyadic& x);

/// Query string of length |s₀|+1 ≤ M for the point x.
BitString query_string(const Dyadic& x, std::size_t M);
/// (query_string(x, M), identity σ) as an SGP query.
sgp::Query sgp_query(const Dyadic& x, std::size_t M);

/// Prefix selected by an SGP answer to the query string s.
BitString answered_prefix(const BitString& s, const sgp::Answer& a);

struct Emulated1D {
  BitString prefix;
  FirstOrderAnswer<Dyadic> answer;
};

Emulated1D emulate_first_order(const Dyadic& x, const sgp::Answer& a, const BitString& s);

/// Prefix revealed about S by querying s: s^{(k)} at the first disagreement k, else s.
BitString revealed_prefix(const BitString& S, const BitString& s);

/// First-order answer of the hidden f_S at x computed without the SGP oracle.
FirstOrderAnswer<Dyadic> reference_oracle(const BitString& S, const Dyadic& x);

/// Minimum value of any depth-M instance.
Dyadic minimum_value(std::size_t M);

/// Open interval {x : f_s(x) < f_s* + ε}; requires 0 < ε ≤ 2^{−3|s|}.
Interval1D eps_minima(const BitString& s, const Dyadic& eps);

}  // namespace f1d
}  // namespace olb
