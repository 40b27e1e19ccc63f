#pragma once

#include "olb/bitstr.hpp"
#include "olb/oracle.hpp"
#include "olb/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace olb::sgp {

/// A guess together with its order of preference: position ℓ of `guess`
/// claims that hidden bit sigma[ℓ-1] equals guess.bit(ℓ). Indices are 1-based.
struct Query {
  BitString guess;
  std::vector<std::size_t> sigma;

  /// Throws std::invalid_argument unless 1 ≤ |guess| ≤ M, |sigma| = |guess|,
  /// sigma injective with images in [M].
  void validate(std::size_t M) const;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Answer {
  bool equal = true;
  std::size_t k = 0;  // first mismatch position when !equal

  static Answer Equal() { return {true, 0}; }
  static Answer Mismatch(std::size_t k) { return {false, k}; }

  friend bool operator==(const Answer&, const Answer&) = default;
};

/// Oracle answer for hidden string S.
Answer answer(const BitString& S, const Query& q);

Oracle<Query, Answer> oracle_for(BitString S);

/// Knowledge state: some bits fixed, the rest uniform and independent.
class Posterior {
 public:
  explicit Posterior(std::size_t M) : bits_(M, kUnknown) {}

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t determined_count() const noexcept;
  std::size_t undetermined_count() const noexcept { return size() - determined_count(); }
  bool fully_determined() const noexcept { return determined_count() == size(); }
  /// Entropy in bits of the uniform remainder.
  double entropy() const noexcept { return static_cast<double>(undetermined_count()); }

  bool known(std::size_t i) const { return bits_.at(i - 1) != kUnknown; }
  std::uint8_t value(std::size_t i) const;
  std::optional<std::uint8_t> get(std::size_t i) const;

  /// Indices (1-based, increasing) of undetermined coordinates.
  std::vector<std::size_t> undetermined() const;

  bool consistent_with(const BitString& S) const;
  /// Determined bits, undetermined bits set to `fill`.
  BitString mode(std::uint8_t fill = 0) const;

  /// Returns (updated posterior, number of newly determined bits K).
  /// Throws ContractViolation if the answer contradicts determined bits.
  std::pair<Posterior, std::size_t> update(const Query& q, const Answer& a) const;

  friend bool operator==(const Posterior&, const Posterior&) = default;

 private:
  static constexpr std::uint8_t kUnknown = 2;
  std::vector<std::uint8_t> bits_;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Distribution of K for a fixed (posterior, query) under the uniform prior on
/// undetermined bits: entry k is P(K = k).
struct KDistribution {
  std::vector<double> pmf;

  double expectation() const;
  /// P(K ≥ k).
  double tail(std::size_t k) const;
  /// Largest excess of P(K ≥ k) over 2^{1−k}, k ≥ 1 (≤ 0 when the bound holds).
  double max_tail_excess() const;
};

/// Closed form from the bit-by-bit walk along sigma.
KDistribution k_distribution(const Posterior& p, const Query& q);
/// Exhaustive sum over all completions of the undetermined bits (≤ 20 of them).
KDistribution k_distribution_enumerated(const Posterior& p, const Query& q);

enum class Strategy { GuessFull, GuessOne, RandomGuess };

const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(const std::string& name);
std::vector<Strategy> all_strategies();

struct StrategyOptions {
  /// Bit guessed for undetermined coordinates by the deterministic strategies.
  std::uint8_t fill = 0;
  /// Bounded-error mode: stop after this many queries and answer the mode.
  std::optional<std::size_t> budget;
};

struct StrategyRun {
  std::size_t T = 0;
  Transcript<Query, Answer> transcript;
  std::vector<Posterior> posteriors;  // posteriors[t] after t answers
  BitString identified;
  bool correct = false;
};

/// Next query of a strategy from the current posterior (rng used by RandomGuess).
Query next_query(Strategy s, const Posterior& p, Rng& rng, const StrategyOptions& opt = {});

StrategyRun run_strategy(Strategy s, const BitString& S, Rng& rng, const StrategyOptions& opt = {});
StrategyRun run_strategy(Strategy s, const BitString& S, std::uint64_t seed, const StrategyOptions& opt = {});

/// Distribution of the number of undetermined bits after t queries, t = 0..,
/// for a strategy run on a uniform string of length M. Exact Markov chain.
std::vector<std::vector<double>> undetermined_chain(Strategy s, std::size_t M, std::size_t steps);

/// Smallest budget whose truncation error (mode answer on the remaining
/// undetermined bits) is at most Pe.
std::size_t truncation_budget(Strategy s, std::size_t M, double Pe);

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t T = 0;
  bool correct = false;
};

struct QueryEstimate {
  Strategy strategy = Strategy::GuessFull;
  std::size_t M = 0;
  double Pe = 0.0;
  std::size_t trials = 0;
  std::optional<std::size_t> budget;
  double mean = 0.0;
  double stderr_ = 0.0;
  double error_rate = 0.0;
  /// tail[t] = empirical P(T < t), t = 0..max T + 1.
  std::vector<double> tail;
  std::vector<TrialRecord> records;
  /// ((1 − Pe)M − 1)/2.
  double bound() const;
};

QueryEstimate estimate_queries(Strategy s, std::size_t M, std::size_t trials, std::uint64_t seed, double Pe,
                               unsigned jobs = 1);

void to_json(nlohmann::json& j, const Query& q);
void to_json(nlohmann::json& j, const Answer& a);
void from_json(const nlohmann::json& j, Query& q);
void from_json(const nlohmann::json& j, Answer& a);
nlohmann::json summary_json(const QueryEstimate& e);
/// Rows "strategy,M,Pe,trial,T".
std::string trials_csv(const QueryEstimate& e, bool header = true);

}  // namespace olb::sgp
