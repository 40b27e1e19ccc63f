#pragma once

#include "olb/bitstr.hpp"
#include "olb/family_box.hpp"
#include "olb/family_lp.hpp"
#include "olb/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace olb::opt {

struct RunResult {
  std::size_t queries_used = 0;
  std::vector<double> final_point;
  std::optional<BitString> identified;
  bool success = false;
};

/// Value plus an ambient subgradient.
struct FirstOrderSample {
  double value = 0.0;
  std::vector<double> grad;
};
using GenericOracle = std::function<FirstOrderSample(const std::vector<double>&)>;
/// Harness-side test for f(x) < f* + ε; algorithms never see the instance.
using Judge = std::function<bool(const std::vector<double>&)>;

GenericOracle adapt_box(Oracle<box::Point, box::Answer> oracle);
GenericOracle adapt_lp(Oracle<lp::Vec, lp::Answer> oracle, lp::WorkingBasis basis);

struct Domain {
  enum class Kind { Box, LpBall } kind = Kind::Box;
  std::size_t n = 1;
  double p = 2.0;

  static Domain box(std::size_t n) { return {Kind::Box, n, INFINITY}; }
  static Domain lp_ball(std::size_t n, double p) { return {Kind::LpBall, n, p}; }

  /// Radius of the Euclidean ball used for projection (the whole box for Box).
  double l2_radius() const;
  std::vector<double> project(std::vector<double> x) const;
  std::vector<double> sample(Rng& rng) const;
};

struct SubgradientOptions {
  std::size_t steps = 1000;
  /// η_t = scale·R/(G√t) with R the domain radius and G = 1.
  double scale = 1.0;
  bool stop_on_success = true;
};

/// x_{t+1} = Proj(x_t − η_t g_t) from the origin. queries_used counts the
/// oracle calls up to and including the first ε-minimum when stopping early.
RunResult projected_subgradient(const GenericOracle& oracle, const Domain& domain, const SubgradientOptions& options,
                                const Judge& judge);

/// Uniformly random queries; the best point seen is returned.
RunResult random_search(const GenericOracle& oracle, const Domain& domain, std::size_t budget, std::uint64_t seed,
                        const Judge& judge);

/// Learns every coordinate's string one bit per query by querying the
/// midpoint of each known prefix interval; ends at the identified minimizer.
RunResult tailored_box_learner(const Oracle<box::Point, box::Answer>& oracle, std::size_t n, std::size_t M,
                               const Judge& judge = nullptr);

/// Learns the signs with queries whose working coordinates have distinct
/// magnitudes; ends at the packing witness of the identified signs.
RunResult tailored_lp_learner(const Oracle<lp::Vec, lp::Answer>& oracle, const lp::WorkingBasis& basis,
                              const Judge& judge = nullptr);

struct RunRow {
  std::string algo;
  std::string family;
  std::size_t n = 0;
  std::size_t M = 0;
  double p = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  RunResult result;
};

std::string csv_header();
std::string csv_row(const RunRow& row);

}  // namespace olb::opt
