#include "olb/infoacct.hpp"

#include "olb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace olb::info {

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binary_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double fano_expectation_bound(double H_F, double Pe, double log2_size, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("fano_expectation_bound: C must be positive");
  return (H_F - binary_entropy(Pe) - Pe * log2_size) / C;
}

double tail_bound(double H_F, double Pe, double log2_size, double C, double t) {
  if (!(H_F > 0.0)) throw std::invalid_argument("tail_bound: H(F) must be positive");
  const double v = (binary_entropy(Pe) + Pe * log2_size + C * t) / H_F;
  return std::clamp(v, 0.0, 1.0);
}

std::string InfoLedger::csv(bool header) const {
  std::ostringstream os;
  if (header) os << "t,H_before,H_after,K\n";
  for (const auto& r : records) os << r.t << ',' << r.H_before << ',' << r.H_after << ',' << r.K << '\n';
  return os.str();
}

nlohmann::json InfoLedger::summary_json() const {
  double max_e = 0.0;
  double max_excess = -1.0;
  std::size_t total_K = 0;
  for (const auto& r : records) {
    max_e = std::max(max_e, r.expected_K);
    max_excess = std::max(max_excess, r.tail_excess);
    total_K += r.K;
  }
  return {{"steps", records.size()},     {"total_K", total_K},       {"max_expected_K", max_e},
          {"max_tail_excess", max_excess}, {"violations", violations}, {"Pe", Pe},
          {"log2_family_size", log2_family_size}};
}

InfoLedger audit_run(const Transcript<sgp::Query, sgp::Answer>& transcript, const std::vector<sgp::Posterior>& posteriors,
                     double Pe) {
  if (posteriors.size() != transcript.size() + 1)
    throw sgp::ContractViolation("audit_run: need one posterior per answer plus the prior");
  InfoLedger ledger;
  ledger.Pe = Pe;
  ledger.log2_family_size = static_cast<double>(posteriors.front().size());
  for (std::size_t t = 1; t <= transcript.size(); ++t) {
    const auto& before = posteriors[t - 1];
    const auto& e = transcript.at(t);
    const auto [after, K] = before.update(e.query, e.answer);
    if (!(after == posteriors[t])) throw sgp::ContractViolation("audit_run: posterior " + std::to_string(t) + " does not follow");
    const auto dist = before.undetermined_count() <= 20 ? sgp::k_distribution_enumerated(before, e.query)
                                                       : sgp::k_distribution(before, e.query);
    LedgerRecord r;
    r.t = t;
    r.H_before = before.entropy();
    r.H_after = after.entropy();
    r.K = K;
    r.expected_K = dist.expectation();
    r.tail_excess = dist.max_tail_excess();
    r.violation = r.expected_K > 2.0 + 1e-12 || r.tail_excess > 1e-12 || r.H_after > r.H_before;
    if (r.violation) ++ledger.violations;
    ledger.records.push_back(r);
  }
  return ledger;
}

namespace {

std::string entry_key(const sgp::Query& q, const sgp::Answer& a) {
  std::string k = q.guess.str();
  for (auto s : q.sigma) k += ',' + std::to_string(s);
  k += a.equal ? "|E;" : "|" + std::to_string(a.k) + ";";
  return k;
}

// H(F | classes) for the uniform prior: Σ_c (|c|/N) log₂|c|.
double conditional_entropy(const std::map<std::string, std::size_t>& classes, double N) {
  double h = 0.0;
  for (const auto& [key, count] : classes) {
    const double c = static_cast<double>(count);
    h += c / N * std::log2(c);
  }
  return h;
}

}  // namespace

SplitIdentity split_identity(sgp::Strategy strategy, std::size_t M) {
  if (M < 1 || M > 12) throw std::invalid_argument("split_identity: need 1 ≤ M ≤ 12");
  if (strategy == sgp::Strategy::RandomGuess) throw std::invalid_argument("split_identity: strategy must be deterministic");
  const auto strings = all_strings(M);
  const double N = static_cast<double>(strings.size());
  std::vector<sgp::StrategyRun> runs;
  std::size_t T_max = 0;
  for (const auto& S : strings) {
    runs.push_back(sgp::run_strategy(strategy, S, 0));
    T_max = std::max(T_max, runs.back().T);
  }
  SplitIdentity out;
  out.M = M;
  out.H_F = static_cast<double>(M);
  std::vector<std::string> keys(strings.size());
  double previous = out.H_F;
  for (std::size_t t = 1; t <= T_max; ++t) {
    std::map<std::string, std::size_t> classes;
    double weighted = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& run = runs[r];
      if (t <= run.T) {
        const auto& e = run.transcript.at(t);
        keys[r] += entry_key(e.query, e.answer);
        weighted += static_cast<double>(run.posteriors[t - 1].update(e.query, e.answer).second) / N;
      } else if (t == run.T + 1) {
        keys[r] += "#";
      }
      ++classes[keys[r]];
    }
    const double h = conditional_entropy(classes, N);
    out.information.push_back(previous - h);
    out.weighted_K.push_back(weighted);
    out.sum_weighted_K += weighted;
    out.max_step_gap = std::max(out.max_step_gap, std::abs((previous - h) - weighted));
    previous = h;
  }
  std::map<std::string, std::size_t> final_classes;
  for (const auto& k : keys) ++final_classes[k];
  out.H_F_given_Pi = conditional_entropy(final_classes, N);
  out.residual = out.H_F - out.H_F_given_Pi - out.sum_weighted_K;
  return out;
}

DistributionalEstimate summarize(std::vector<std::size_t> T) {
  DistributionalEstimate e;
  e.trials = T.size();
  if (T.empty()) return e;
  const double n = static_cast<double>(T.size());
  double sum = 0.0;
  std::size_t max_t = 0;
  for (auto t : T) {
    sum += static_cast<double>(t);
    max_t = std::max(max_t, t);
  }
  e.mean = sum / n;
  double ss = 0.0;
  for (auto t : T) ss += (static_cast<double>(t) - e.mean) * (static_cast<double>(t) - e.mean);
  e.stderr_ = T.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  std::vector<std::size_t> hist(max_t + 2, 0);
  for (auto t : T) ++hist[t];
  e.tail.assign(max_t + 2, 0.0);
  std::size_t below = 0;
  for (std::size_t t = 0; t < e.tail.size(); ++t) {
    e.tail[t] = static_cast<double>(below) / n;
    below += hist[t];
  }
  e.T = std::move(T);
  return e;
}

DistributionalEstimate distributional_estimate(const std::function<std::size_t(const BitString&, Rng&)>& algorithm,
                                               const std::function<BitString(Rng&)>& sampler, std::size_t trials,
                                               std::uint64_t seed, unsigned jobs) {
  if (trials < 30) throw std::invalid_argument("distributional_estimate: need at least 30 trials");
  std::vector<std::size_t> T(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    Rng rng(seed, i);
    const auto S = sampler(rng);
    T[i] = algorithm(S, rng);
  });
  return summarize(std::move(T));
}

}  // namespace olb::info
