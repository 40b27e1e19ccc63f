#pragma once

#include "olb/bitstr.hpp"
#include "olb/family_lp.hpp"
#include "olb/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <variant>
#include <vector>

namespace olb::perturbed {

inline constexpr double kDefaultK = 100.0;
inline constexpr double kNearTie = 1e-12;

// --- L^p -------------------------------------------------------------------

/// f_{s,δ}(x) = max_i s_i(c_i(x) + δ_i), 0 ≤ δ_i ≤ δ̄ = ε/(K·M).
struct PerturbedLpInstance {
  lp::LpInstance base;
  std::vector<double> delta;
  double eps = 0.0;
  double K = kDefaultK;
  std::uint64_t seed = 0;

  double delta_bar() const { return eps / (K * static_cast<double>(base.basis.M)); }
  void validate() const;
};

PerturbedLpInstance random_perturbed_lp(const lp::LpInstance& base, double eps, double K, Rng& rng);

void to_json(nlohmann::json& j, const PerturbedLpInstance& inst);
void from_json(const nlohmann::json& j, PerturbedLpInstance& inst);

double eval_perturbed_lp(const PerturbedLpInstance& inst, const lp::Vec& x);

struct MaximizerSet {
  double value = 0.0;
  std::vector<std::size_t> indices;  // exact ties, 1-based
  std::size_t near_ties = 0;         // indices within kNearTie of the value but not equal
};

MaximizerSet maximizer_set(const PerturbedLpInstance& inst, const lp::Vec& x);

/// Equivalence class {f_{r,γ} : r_j = s_j, γ_j = δ_j} of the true instance.
struct Descriptor {
  std::size_t j = 0;
  int sign = 0;
  double delta = 0.0;
};
struct Degenerate {
  std::vector<std::size_t> maximizers;
};
using MaximalAnswer = std::variant<Descriptor, Degenerate>;

MaximalAnswer maximal_oracle_lp(const PerturbedLpInstance& inst, const lp::Vec& x);

/// Single-coordinate answer (value, axis, sign) of the perturbed instance.
lp::Answer single_coordinate_lp(const PerturbedLpInstance& inst, const lp::Vec& x);
/// Maximal-oracle descriptor recovered from the single-coordinate answer and x.
Descriptor descriptor_from_answer(const lp::WorkingBasis& basis, const lp::Vec& x, const lp::Answer& a);

struct AuditStep {
  std::size_t t = 0;
  std::vector<std::size_t> maximizers;  // I^t (or J^t encoded as (i−1)(M+1)+l+1 for the box)
  std::size_t new_count = 0;
  std::size_t near_ties = 0;
  bool inside_active = true;
  bool violation = false;
};

struct AuditReport {
  bool pass = true;
  std::size_t steps = 0;
  std::size_t violations = 0;
  std::size_t multi_new_steps = 0;  // steps adding ≥ 2 new coordinates / labels
  std::size_t outside_active = 0;
  std::size_t near_ties = 0;
  std::optional<std::size_t> first_violation;
  std::vector<AuditStep> events;

  void write_jsonl(std::ostream& os) const;
};

/// Flags every step whose maximizer set adds two or more unseen coordinates.
AuditReport unpredictability_audit_lp(const std::vector<lp::Vec>& trajectory, const PerturbedLpInstance& inst);

// --- Box -------------------------------------------------------------------

/// α, M, δ̄ for the perturbed box family. M and α are solved as a fixed point
/// unless M is given explicitly.
struct PerturbedBoxParams {
  double eps = 0.0;
  double K = kDefaultK;
  double alpha = 1.0;
  std::size_t M = 1;
  double delta_bar = 0.0;
  std::size_t iterations = 0;

  static PerturbedBoxParams from_eps(double eps, double K = kDefaultK);
  static PerturbedBoxParams with_depth(double eps, std::size_t M, double K = kDefaultK);
};

/// Per-level perturbations δ_1..δ_M in (0, δ̄].
using Levels = std::vector<double>;

Levels random_levels(const PerturbedBoxParams& params, Rng& rng);

/// b_{l,δ}: b_0 = 1, b_{l+1} = b_l − (α/2)(α/8)^l − δ_{l+1}.
double perturbed_breakpoint(std::size_t l, const Levels& delta, const PerturbedBoxParams& params);

/// f_{s,δ}(x) on [−1, 1] by the recursive max construction.
double eval_perturbed_1d(const BitString& s, const Levels& delta, double x, const PerturbedBoxParams& params);
/// The extension g_{s b,δ}(x) of f_{s,δ} for next bit b.
double extension_g(const BitString& s, std::uint8_t bit, const Levels& delta, double x,
                   const PerturbedBoxParams& params);
/// Closed form on I_s: b_{|s|,δ} − (α/8)^{|s|} + (α/2)^{|s|}|x − I_s(0)|.
double perturbed_canonical_form(const BitString& s, const Levels& delta, double x, const PerturbedBoxParams& params);

struct IntervalD {
  double lo = 0.0, hi = 0.0;
  bool interior_contains(double x) const { return lo < x && x < hi; }
};

IntervalD interval_d(const BitString& s);
/// I^δ_u: the part of I_u where the next extension (bit b = s_{|u|+1}) is
/// strictly above f_{u,δ}.
IntervalD active_interval(const BitString& u, std::uint8_t next_bit, const Levels& delta,
                          const PerturbedBoxParams& params);

struct PerturbedBoxInstance {
  PerturbedBoxParams params;
  std::size_t n = 1;
  std::vector<BitString> strings;
  std::vector<Levels> delta;
  std::uint64_t seed = 0;

  void validate() const;
};

PerturbedBoxInstance random_perturbed_box(std::size_t n, const PerturbedBoxParams& params, Rng& rng);

void to_json(nlohmann::json& j, const PerturbedBoxInstance& inst);
void from_json(const nlohmann::json& j, PerturbedBoxInstance& inst);

double eval_perturbed_box(const PerturbedBoxInstance& inst, const std::vector<double>& x);

/// J = {(i, l) : coordinate i attains the max and b_{l+1,δ_i} < f ≤ b_{l,δ_i}}.
std::set<std::pair<std::size_t, std::size_t>> maximizer_labels(const PerturbedBoxInstance& inst,
                                                               const std::vector<double>& x);

/// Violation: the query lies in the active set and |J| ≥ 2. The depth l_i
/// per coordinate is the deepest label revealed so far.
AuditReport unpredictability_audit_box(const std::vector<std::vector<double>>& trajectory,
                                       const PerturbedBoxInstance& inst);

/// Random query points sampled in nested intervals of the hidden strings.
std::vector<std::vector<double>> sample_box_trajectory(const PerturbedBoxInstance& inst, std::size_t steps, Rng& rng);
/// Random queries in the unit ball whose unperturbed working coordinates tie often.
std::vector<lp::Vec> sample_lp_trajectory(const lp::WorkingBasis& basis, std::size_t steps, Rng& rng);

}  // namespace olb::perturbed
