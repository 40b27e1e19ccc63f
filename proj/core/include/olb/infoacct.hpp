#pragma once

#include "olb/bitstr.hpp"
#include "olb/rng.hpp"
#include "olb/sgp.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace olb::info {

/// −p log₂ p − (1−p) log₂(1−p); throws std::invalid_argument outside [0, 1].
double binary_entropy(double p);

/// (H(F) − h(P_e) − P_e log₂|F|)/C.
double fano_expectation_bound(double H_F, double Pe, double log2_size, double C);
/// min(1, max(0, (h(P_e) + P_e log₂|F| + C t)/H(F))).
double tail_bound(double H_F, double Pe, double log2_size, double C, double t);

struct LedgerRecord {
  std::size_t t = 0;
  double H_before = 0.0;
  double H_after = 0.0;
  std::size_t K = 0;
  double expected_K = 0.0;          // exact E[K | posterior, query]
  double tail_excess = 0.0;         // max_k P(K ≥ k) − 2^{1−k}
  bool violation = false;
};

struct InfoLedger {
  std::vector<LedgerRecord> records;
  double Pe = 0.0;
  double log2_family_size = 0.0;
  std::size_t violations = 0;

  /// Rows "t,H_before,H_after,K".
  std::string csv(bool header = true) const;
  nlohmann::json summary_json() const;
};

/// Per-step ledger from a transcript and the posterior after each answer
/// (posteriors[0] is the prior). Throws sgp::ContractViolation when the
/// sequence does not follow from the transcript.
InfoLedger audit_run(const Transcript<sgp::Query, sgp::Answer>& transcript, const std::vector<sgp::Posterior>& posteriors,
                     double Pe = 0.0);

struct SplitIdentity {
  std::size_t M = 0;
  double H_F = 0.0;
  double H_F_given_Pi = 0.0;
  /// information[t−1] = H(F | Π_{<t}) − H(F | Π_{≤t}) from transcript counting.
  std::vector<double> information;
  /// weighted_K[t−1] = E[K_t | T ≥ t]·P(T ≥ t) from the posterior updates.
  std::vector<double> weighted_K;
  double sum_weighted_K = 0.0;
  double residual = 0.0;  // H(F) − H(F|Π) − Σ_t weighted_K
  double max_step_gap = 0.0;
};

/// Exhaustive over all 2^M strings for a deterministic strategy, M ≤ 12.
SplitIdentity split_identity(sgp::Strategy strategy, std::size_t M);

struct DistributionalEstimate {
  std::size_t trials = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<std::size_t> T;
  /// tail[t] = empirical P(T < t), t = 0..max T + 1.
  std::vector<double> tail;
};

/// Monte Carlo estimate of E[T] over instances from the sampler, trial i
/// using Rng(seed, i). Requires trials ≥ 30.
DistributionalEstimate distributional_estimate(const std::function<std::size_t(const BitString&, Rng&)>& algorithm,
                                               const std::function<BitString(Rng&)>& sampler, std::size_t trials,
                                               std::uint64_t seed, unsigned jobs = 1);

/// Mean, standard error and empirical tail of a sample of query counts.
DistributionalEstimate summarize(std::vector<std::size_t> T);

}  // namespace olb::info
