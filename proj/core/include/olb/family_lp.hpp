#pragma once

#include "olb/bitstr.hpp"
#include "olb/first_order.hpp"
#include "olb/oracle.hpp"
#include "olb/sgp.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace olb::lp {

using Vec = std::vector<double>;
/// value = sign·c_axis; slope is the sign (±1) in working coordinates.
using Answer = FirstOrderAnswer<double>;

enum class BasisMode { Standard, Tensor };

const char* to_string(BasisMode m) noexcept;
BasisMode parse_mode(const std::string& name);

/// Coordinates used by the family. Standard: c_i(x) = x_i. Tensor (M = 2^l):
/// c_i(x) = ⟨ν_i, x⟩ / M^{1/q} with ν_i(k) = (−1)^{popcount(i∧k)} (0-based).
/// The ambient space is R^M.
struct WorkingBasis {
  double p = 2.0;
  std::size_t M = 1;
  BasisMode mode = BasisMode::Standard;

  WorkingBasis() = default;
  WorkingBasis(double p, std::size_t M);

  double q_inverse() const { return 1.0 - 1.0 / p; }  // 1/q
  double r() const { return p < 2.0 ? 2.0 : p; }
  std::size_t dimension() const { return M; }

  /// ν_i(k), 1-based i and k.
  int nu(std::size_t i, std::size_t k) const;
  Vec working_coordinates(const Vec& x) const;
  double working_coordinate(std::size_t i, const Vec& x) const;
  /// Ambient vector whose working coordinates are c.
  Vec from_working(const Vec& c) const;
  /// Ambient subgradient of c_i: e_i or ξ_i = ν_i / M^{1/q}.
  Vec coordinate_gradient(std::size_t i) const;
};

double lp_norm(const Vec& x, double p);

class AccuracyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// p ≥ 2: ⌊1/ε^p⌋ − 1. p < 2: 2^l with l the largest integer with 1/ε² > 2^l.
std::size_t choose_M(double p, double eps);

struct LpInstance {
  WorkingBasis basis;
  std::vector<int> signs;  // ±1

  void validate() const;
  /// +1 ↦ 1, −1 ↦ 0.
  BitString bits() const;
  static LpInstance from_bits(const WorkingBasis& basis, const BitString& s);
};

void to_json(nlohmann::json& j, const LpInstance& inst);
void from_json(const nlohmann::json& j, LpInstance& inst);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Throws DomainError unless ‖x‖_p ≤ 1 + 10^{−12}.
void check_domain(const WorkingBasis& basis, const Vec& x);

double eval_lp(const LpInstance& inst, const Vec& x);
/// Indices (1-based) sorted by (−|c_i|, i).
std::vector<std::size_t> confidence_order(const Vec& c);

Answer reference_oracle(const LpInstance& inst, const Vec& x);
Oracle<Vec, Answer> reference_oracle_for(LpInstance inst);
Vec ambient_subgradient(const WorkingBasis& basis, const Answer& a);

sgp::Query lp_sgp_query(const WorkingBasis& basis, const Vec& x);
Answer lp_emulate(const WorkingBasis& basis, const Vec& x, const sgp::Answer& a);
Emulation<Vec, Answer, sgp::Query, sgp::Answer> emulation(WorkingBasis basis);

/// x* with working coordinates −s_i·M^{−1/r}.
Vec packing_witness(const LpInstance& inst);
/// f(x*) = −M^{−1/r}.
double witness_value(const WorkingBasis& basis);

/// Recovers s from an ε-minimum (f(x) < −M^{−1/r} + ε with M < 1/ε^r).
std::vector<int> identify_from_eps_min(const LpInstance& inst, const Vec& x, double eps);

}  // namespace olb::lp
