#pragma once

#include "olb/bitstr.hpp"
#include "olb/dyadic.hpp"
#include "olb/family_1d.hpp"
#include "olb/first_order.hpp"
#include "olb/oracle.hpp"
#include "olb/sgp.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace olb::box {

using Point = std::vector<Dyadic>;
using Answer = FirstOrderAnswer<Dyadic>;

/// f(x) = max_i f_{s_i}(x_i) on [−1, 1]^n with every s_i of length M.
struct BoxInstance {
  std::size_t n = 0;
  std::size_t M = 0;
  std::vector<BitString> strings;

  void validate() const;
  /// Hidden string for the oracle: s_1 s_2 … s_n, coordinate i at flat
  /// indices (i−1)M+1 … iM.
  BitString concatenated() const;
  static BoxInstance from_concatenated(const BitString& S, std::size_t n, std::size_t M);

  friend bool operator==(const BoxInstance&, const BoxInstance&) = default;
};

void to_json(nlohmann::json& j, const BoxInstance& b);
void from_json(const nlohmann::json& j, BoxInstance& b);

Dyadic eval_box(const BoxInstance& inst, const Point& x);

/// Label (i, h): the flip-cut s_i^{(h)} of coordinate i's query string.
struct Label {
  std::size_t i = 0;
  std::size_t h = 0;
  Dyadic value;  // f_{s_i^{(h)}}(x_i)

  friend bool operator==(const Label&, const Label&) = default;
};

/// Everything the query side knows at x: per-coordinate query strings,
/// candidate maximum τ = max_i f_{s_i}(x_i), the surviving labels in
/// confidence order, and the SGP query built from them.
struct QueryPlan {
  std::vector<BitString> strings;
  std::vector<Dyadic> string_values;
  Dyadic tau;
  std::vector<Label> labels;
  sgp::Query query;
};

/// Surviving labels (value ≥ τ) sorted by (−value, i, h).
std::vector<Label> confidence_order(const Point& x, const std::vector<BitString>& strings);

QueryPlan plan_query(const Point& x, std::size_t M);
sgp::Query box_sgp_query(const Point& x, std::size_t M);

/// The rule for an EQUAL answer. Corrected answers through the least
/// coordinate attaining τ with its full query string; Literal takes the last
/// label (i_k, h_k), which can report a value below the true maximum.
enum class EqualRule { Corrected, Literal };

Answer box_emulate(const QueryPlan& plan, const Point& x, const sgp::Answer& a,
                   EqualRule rule = EqualRule::Corrected);
Answer box_emulate(const Point& x, std::size_t M, const sgp::Answer& a);

/// Direct single-coordinate answer from the instance: value by evaluation;
/// axis the least maximizing coordinate whose revealed prefix is a flip-cut
/// (else the least maximizer); slope from that prefix.
Answer reference_oracle(const BoxInstance& inst, const Point& x);

Oracle<Point, Answer> reference_oracle_for(BoxInstance inst);
Emulation<Point, Answer, sgp::Query, sgp::Answer> emulation(std::size_t n, std::size_t M,
                                                            EqualRule rule = EqualRule::Corrected);

/// All 2^{nM} instances in the order of their concatenated strings.
std::vector<BoxInstance> all_instances(std::size_t n, std::size_t M);

struct PackingReport {
  bool pass = true;
  std::size_t instances = 0;
  std::size_t pairs = 0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Exhaustive pairwise disjointness of (open) ε-minima boxes; requires
/// ε ≤ 2^{−3M} and nM ≤ 16.
PackingReport packing_check_box(std::size_t n, std::size_t M, const Dyadic& eps);

/// ε-minima box of an instance: product of the coordinate intervals.
std::vector<f1d::Interval1D> eps_minima(const BoxInstance& inst, const Dyadic& eps);

/// Box family rescaled into the unit L^p ball: y ↦ n^{−1/p} f(n^{1/p} y) on
/// [−n^{−1/p}, n^{−1/p}]^n.
struct ScaledBox {
  double p = 2.0;
  std::size_t n = 1;
  double eps = 0.0;
  double effective_eps = 0.0;  // ε·n^{1/p}
  std::size_t M = 1;
  double input_scale = 1.0;   // n^{1/p}
  double output_scale = 1.0;  // n^{−1/p}

  double eval(const BoxInstance& inst, const std::vector<double>& y) const;
  double half_width() const { return output_scale; }
};

ScaledBox inscribe_in_lp_ball(double p, std::size_t n, double eps);

}  // namespace olb::box
