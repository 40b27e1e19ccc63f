#include "olb/sgp.hpp"

#include "olb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace olb::sgp {

void Query::validate(std::size_t M) const {
  if (guess.empty() || guess.size() > M)
    throw std::invalid_argument("sgp query: guess length " + std::to_string(guess.size()) + " outside [1, " +
                                std::to_string(M) + "]");
  if (sigma.size() != guess.size()) throw std::invalid_argument("sgp query: sigma length differs from guess length");
  std::vector<bool> seen(M + 1, false);
  for (auto s : sigma) {
    if (s < 1 || s > M) throw std::invalid_argument("sgp query: sigma image " + std::to_string(s) + " outside [M]");
    if (seen[s]) throw std::invalid_argument("sgp query: sigma is not injective");
    seen[s] = true;
  }
}

Answer answer(const BitString& S, const Query& q) {
  q.validate(S.size());
  for (std::size_t k = 1; k <= q.guess.size(); ++k)
    if (S.bit(q.sigma[k - 1]) != q.guess.bit(k)) return Answer::Mismatch(k);
  return Answer::Equal();
}

Oracle<Query, Answer> oracle_for(BitString S) {
  return [S = std::move(S)](const Query& q) { return answer(S, q); };
}

// --- Posterior -------------------------------------------------------------

std::size_t Posterior::determined_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b != kUnknown; }));
}

std::uint8_t Posterior::value(std::size_t i) const {
  const auto b = bits_.at(i - 1);
  if (b == kUnknown) throw std::logic_error("Posterior::value: bit " + std::to_string(i) + " is undetermined");
  return b;
}

std::optional<std::uint8_t> Posterior::get(std::size_t i) const {
  const auto b = bits_.at(i - 1);
  if (b == kUnknown) return std::nullopt;
  return b;
}

std::vector<std::size_t> Posterior::undetermined() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] == kUnknown) out.push_back(i + 1);
  return out;
}

bool Posterior::consistent_with(const BitString& S) const {
  if (S.size() != bits_.size()) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] != kUnknown && bits_[i] != S.bits()[i]) return false;
  return true;
}

BitString Posterior::mode(std::uint8_t fill) const {
  std::vector<std::uint8_t> out(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] == kUnknown ? fill : bits_[i];
  return BitString(std::move(out));
}

std::pair<Posterior, std::size_t> Posterior::update(const Query& q, const Answer& a) const {
  q.validate(size());
  const std::size_t revealed = a.equal ? q.guess.size() : a.k;
  if (!a.equal && (a.k < 1 || a.k > q.guess.size()))
    throw ContractViolation("posterior update: mismatch index " + std::to_string(a.k) + " out of range");
  Posterior next = *this;
  std::size_t K = 0;
  for (std::size_t l = 1; l <= revealed; ++l) {
    const std::size_t coord = q.sigma[l - 1];
    std::uint8_t b = q.guess.bit(l);
    if (!a.equal && l == a.k) b ^= 1u;
    auto& slot = next.bits_[coord - 1];
    if (slot == kUnknown) {
      slot = b;
      ++K;
    } else if (slot != b) {
      throw ContractViolation("posterior update: answer contradicts determined bit " + std::to_string(coord));
    }
  }
  return {std::move(next), K};
}

// --- K distribution --------------------------------------------------------

double KDistribution::expectation() const {
  double e = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) e += static_cast<double>(k) * pmf[k];
  return e;
}

double KDistribution::tail(std::size_t k) const {
  double t = 0.0;
  for (std::size_t i = k; i < pmf.size(); ++i) t += pmf[i];
  return t;
}

double KDistribution::max_tail_excess() const {
  double worst = -1.0;
  for (std::size_t k = 1; k <= pmf.size(); ++k) worst = std::max(worst, tail(k) - std::ldexp(1.0, 1 - static_cast<int>(k)));
  return worst;
}

KDistribution k_distribution(const Posterior& p, const Query& q) {
  q.validate(p.size());
  KDistribution d;
  d.pmf.assign(q.guess.size() + 1, 0.0);
  double alive = 1.0;
  std::size_t k = 0;
  for (std::size_t l = 1; l <= q.guess.size(); ++l) {
    const auto known = p.get(q.sigma[l - 1]);
    if (known) {
      if (*known != q.guess.bit(l)) {
        d.pmf[k] += alive;
        return d;
      }
      continue;
    }
    ++k;
    d.pmf[k] += alive / 2;  // mismatch here
    alive /= 2;
  }
  d.pmf[k] += alive;  // EQUAL
  return d;
}

KDistribution k_distribution_enumerated(const Posterior& p, const Query& q) {
  q.validate(p.size());
  const auto free = p.undetermined();
  if (free.size() > 20) throw std::invalid_argument("k_distribution_enumerated: too many undetermined bits");
  KDistribution d;
  d.pmf.assign(q.guess.size() + 1, 0.0);
  const BitString base = p.mode(0);
  const double weight = std::ldexp(1.0, -static_cast<int>(free.size()));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
    std::vector<std::uint8_t> bits = base.bits();
    for (std::size_t j = 0; j < free.size(); ++j) bits[free[j] - 1] = static_cast<std::uint8_t>((mask >> j) & 1u);
    const BitString S(std::move(bits));
    const auto [next, K] = p.update(q, answer(S, q));
    d.pmf.at(K) += weight;
  }
  return d;
}

// --- Strategies ------------------------------------------------------------

const char* to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::GuessFull: return "guess-full";
    case Strategy::GuessOne: return "guess-one";
    case Strategy::RandomGuess: return "random-guess";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  for (auto s : all_strategies())
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown SGP strategy '" + name + "'");
}

std::vector<Strategy> all_strategies() { return {Strategy::GuessFull, Strategy::GuessOne, Strategy::RandomGuess}; }

Query next_query(Strategy s, const Posterior& p, Rng& rng, const StrategyOptions& opt) {
  const auto free = p.undetermined();
  if (free.empty()) throw std::logic_error("next_query: posterior already determines the string");
  Query q;
  std::vector<std::uint8_t> guess;
  switch (s) {
    case Strategy::GuessOne:
      q.sigma = {free.front()};
      guess = {opt.fill};
      break;
    case Strategy::GuessFull:
      q.sigma = free;
      guess.assign(free.size(), opt.fill);
      for (std::size_t i = 1; i <= p.size(); ++i) {
        if (!p.known(i)) continue;
        q.sigma.push_back(i);
        guess.push_back(p.value(i));
      }
      break;
    case Strategy::RandomGuess: {
      q.sigma.resize(p.size());
      std::iota(q.sigma.begin(), q.sigma.end(), std::size_t{1});
      for (std::size_t i = q.sigma.size(); i > 1; --i) std::swap(q.sigma[i - 1], q.sigma[rng.below(i)]);
      guess.resize(p.size());
      for (std::size_t l = 0; l < q.sigma.size(); ++l) {
        const auto known = p.get(q.sigma[l]);
        guess[l] = known ? *known : rng.bit();
      }
      break;
    }
  }
  q.guess = BitString(std::move(guess));
  return q;
}

StrategyRun run_strategy(Strategy s, const BitString& S, Rng& rng, const StrategyOptions& opt) {
  StrategyRun run;
  Posterior post(S.size());
  run.posteriors.push_back(post);
  while (!post.fully_determined() && (!opt.budget || run.T < *opt.budget)) {
    Query q = next_query(s, post, rng, opt);
    Answer a = answer(S, q);
    post = post.update(q, a).first;
    run.transcript.append(std::move(q), a);
    run.posteriors.push_back(post);
    ++run.T;
  }
  run.identified = post.mode(0);
  run.correct = run.identified == S;
  return run;
}

StrategyRun run_strategy(Strategy s, const BitString& S, std::uint64_t seed, const StrategyOptions& opt) {
  Rng rng(seed);
  return run_strategy(s, S, rng, opt);
}

std::vector<std::vector<double>> undetermined_chain(Strategy s, std::size_t M, std::size_t steps) {
  std::vector<std::vector<double>> dist(steps + 1, std::vector<double>(M + 1, 0.0));
  dist[0][M] = 1.0;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t m = 0; m <= M; ++m) {
      const double w = dist[t][m];
      if (w == 0.0) continue;
      if (m == 0) {
        dist[t + 1][0] += w;
        continue;
      }
      if (s == Strategy::GuessOne) {
        dist[t + 1][m - 1] += w;
        continue;
      }
      for (std::size_t k = 1; k < m; ++k) dist[t + 1][m - k] += w * std::ldexp(1.0, -static_cast<int>(k));
      dist[t + 1][0] += w * std::ldexp(1.0, 1 - static_cast<int>(m));
    }
  }
  return dist;
}

std::size_t truncation_budget(Strategy s, std::size_t M, double Pe) {
  if (Pe >= 1.0) return 0;
  const std::size_t horizon = 64 * M + 64;
  const auto chain = undetermined_chain(s, M, horizon);
  for (std::size_t b = 0; b <= horizon; ++b) {
    double err = 0.0;
    for (std::size_t m = 1; m <= M; ++m) err += chain[b][m] * (1.0 - std::ldexp(1.0, -static_cast<int>(m)));
    if (err <= Pe) return b;
  }
  return horizon;
}

double QueryEstimate::bound() const { return ((1.0 - Pe) * static_cast<double>(M) - 1.0) / 2.0; }

QueryEstimate estimate_queries(Strategy s, std::size_t M, std::size_t trials, std::uint64_t seed, double Pe,
                               unsigned jobs) {
  if (trials < 1) throw std::invalid_argument("estimate_queries: trials must be ≥ 1");
  if (M < 1) throw std::invalid_argument("estimate_queries: M must be ≥ 1");
  QueryEstimate e;
  e.strategy = s;
  e.M = M;
  e.Pe = Pe;
  e.trials = trials;
  StrategyOptions opt;
  if (Pe > 0.0) {
    e.budget = truncation_budget(s, M, Pe);
    opt.budget = e.budget;
  }
  e.records.resize(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    Rng rng(seed, i);
    std::vector<std::uint8_t> bits(M);
    for (auto& b : bits) b = rng.bit();
    const BitString S(std::move(bits));
    const auto run = run_strategy(s, S, rng, opt);
    e.records[i] = TrialRecord{i, run.T, run.correct};
  });
  double sum = 0.0;
  std::size_t max_t = 0;
  std::size_t wrong = 0;
  for (const auto& r : e.records) {
    sum += static_cast<double>(r.T);
    max_t = std::max(max_t, r.T);
    wrong += r.correct ? 0 : 1;
  }
  const double n = static_cast<double>(trials);
  e.mean = sum / n;
  double ss = 0.0;
  for (const auto& r : e.records) ss += (static_cast<double>(r.T) - e.mean) * (static_cast<double>(r.T) - e.mean);
  e.stderr_ = trials > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  e.error_rate = static_cast<double>(wrong) / n;
  std::vector<std::size_t> hist(max_t + 2, 0);
  for (const auto& r : e.records) ++hist[r.T];
  e.tail.assign(max_t + 2, 0.0);
  std::size_t below = 0;
  for (std::size_t t = 0; t < e.tail.size(); ++t) {
    e.tail[t] = static_cast<double>(below) / n;
    below += hist[t];
  }
  return e;
}

// --- Serialization ---------------------------------------------------------

void to_json(nlohmann::json& j, const Query& q) { j = {{"guess", q.guess.str()}, {"sigma", q.sigma}}; }

void to_json(nlohmann::json& j, const Answer& a) {
  if (a.equal)
    j = "EQUAL";
  else
    j = a.k;
}

void from_json(const nlohmann::json& j, Query& q) {
  q.guess = BitString::parse(j.at("guess").get<std::string>());
  q.sigma = j.at("sigma").get<std::vector<std::size_t>>();
}

void from_json(const nlohmann::json& j, Answer& a) {
  if (j.is_string()) {
    if (j.get<std::string>() != "EQUAL") throw std::invalid_argument("sgp answer: expected EQUAL or an index");
    a = Answer::Equal();
  } else {
    a = Answer::Mismatch(j.get<std::size_t>());
  }
}

nlohmann::json summary_json(const QueryEstimate& e) {
  nlohmann::json j;
  j["strategy"] = to_string(e.strategy);
  j["M"] = e.M;
  j["Pe"] = e.Pe;
  j["trials"] = e.trials;
  j["budget"] = e.budget ? nlohmann::json(*e.budget) : nlohmann::json(nullptr);
  j["mean"] = e.mean;
  j["stderr"] = e.stderr_;
  j["error_rate"] = e.error_rate;
  j["bound"] = e.bound();
  j["tail"] = e.tail;
  return j;
}

std::string trials_csv(const QueryEstimate& e, bool header) {
  std::ostringstream os;
  if (header) os << "strategy,M,Pe,trial,T\n";
  for (const auto& r : e.records) os << to_string(e.strategy) << ',' << e.M << ',' << e.Pe << ',' << r.trial << ',' << r.T << '\n';
  return os.str();
}

}  // namespace olb::sgp
