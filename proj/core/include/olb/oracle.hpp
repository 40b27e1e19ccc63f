#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace olb {

/// Oracles are deterministic functions of the query for a fixed instance.
template <class Query, class Answer>
using Oracle = std::function<Answer(const Query&)>;

template <class Query, class Answer>
struct TranscriptEntry {
  std::size_t t;  // 1-based
  Query query;
  Answer answer;
};

/// Append-only record Π of query/answer pairs.
template <class Query, class Answer>
class Transcript {
 public:
  using Entry = TranscriptEntry<Query, Answer>;

  void append(Query q, Answer a) { entries_.push_back(Entry{entries_.size() + 1, std::move(q), std::move(a)}); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entry& at(std::size_t t) const { return entries_.at(t - 1); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Π_{<t}: the first t−1 entries.
  Transcript before(std::size_t t) const {
    Transcript out;
    for (std::size_t i = 0; i + 1 < t && i < entries_.size(); ++i) out.entries_.push_back(entries_[i]);
    return out;
  }

  void write_jsonl(std::ostream& os) const {
    for (const auto& e : entries_) {
      nlohmann::json j;
      j["t"] = e.t;
      j["query"] = e.query;
      j["answer"] = e.answer;
      os << j.dump() << '\n';
    }
  }

 private:
  std::vector<Entry> entries_;
};

/// Forwards to an inner oracle and records every exchange. Copies share the
/// same transcript.
template <class Query, class Answer>
class RecordingOracle {
 public:
  explicit RecordingOracle(Oracle<Query, Answer> inner)
      : inner_(std::move(inner)), transcript_(std::make_shared<Transcript<Query, Answer>>()) {}

  Answer operator()(const Query& q) const {
    Answer a = inner_(q);
    transcript_->append(q, a);
    return a;
  }

  const Transcript<Query, Answer>& transcript() const noexcept { return *transcript_; }
  std::size_t queries() const noexcept { return transcript_->size(); }

  Oracle<Query, Answer> as_oracle() const {
    return [self = *this](const Query& q) { return self(q); };
  }

 private:
  Oracle<Query, Answer> inner_;
  std::shared_ptr<Transcript<Query, Answer>> transcript_;
};

template <class Query, class Answer>
RecordingOracle<Query, Answer> wrap_with_transcript(Oracle<Query, Answer> inner) {
  return RecordingOracle<Query, Answer>(std::move(inner));
}

/// Emulation of an oracle Q1 → R1 through an oracle Q2 → R2:
/// O1(x) = answer_map(x, O2(query_map(x))).
template <class Q1, class R1, class Q2, class R2>
struct Emulation {
  std::function<Q2(const Q1&)> query_map;
  std::function<R1(const Q1&, const R2&)> answer_map;
};

template <class Q, class R>
Emulation<Q, R, Q, R> identity_emulation() {
  return {[](const Q& q) { return q; }, [](const Q&, const R& r) { return r; }};
}

/// Emulation of O1 by O3 from emulations of O1 by O2 and O2 by O3.
template <class Q1, class R1, class Q2, class R2, class Q3, class R3>
Emulation<Q1, R1, Q3, R3> compose(Emulation<Q1, R1, Q2, R2> outer, Emulation<Q2, R2, Q3, R3> inner) {
  Emulation<Q1, R1, Q3, R3> out;
  out.query_map = [outer, inner](const Q1& x) { return inner.query_map(outer.query_map(x)); };
  out.answer_map = [outer, inner](const Q1& x, const R3& r) {
    const Q2 y = outer.query_map(x);
    return outer.answer_map(x, inner.answer_map(y, r));
  };
  return out;
}

class QueryCountMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The simulated algorithm's oracle: each outer query costs exactly one inner
/// query, checked on every call.
template <class Q1, class R1, class Q2, class R2>
class EmulatedOracle {
 public:
  EmulatedOracle(Emulation<Q1, R1, Q2, R2> e, Oracle<Q2, R2> inner)
      : emulation_(std::move(e)),
        inner_(std::move(inner)),
        outer_(std::make_shared<Transcript<Q1, R1>>()) {}

  R1 operator()(const Q1& x) const {
    const Q2 q = emulation_.query_map(x);
    const R2 r = inner_(q);
    R1 a = emulation_.answer_map(x, r);
    outer_->append(x, a);
    if (outer_->size() != inner_.queries())
      throw QueryCountMismatch("emulated oracle: outer/inner query counts diverged (" +
                               std::to_string(outer_->size()) + " vs " + std::to_string(inner_.queries()) + ")");
    return a;
  }

  std::size_t outer_queries() const noexcept { return outer_->size(); }
  std::size_t inner_queries() const noexcept { return inner_.queries(); }
  const Transcript<Q1, R1>& outer_transcript() const noexcept { return *outer_; }
  const Transcript<Q2, R2>& inner_transcript() const noexcept { return inner_.transcript(); }

  Oracle<Q1, R1> as_oracle() const {
    return [self = *this](const Q1& x) { return self(x); };
  }

 private:
  Emulation<Q1, R1, Q2, R2> emulation_;
  RecordingOracle<Q2, R2> inner_;
  std::shared_ptr<Transcript<Q1, R1>> outer_;
};

template <class Q1, class R1, class Q2, class R2>
EmulatedOracle<Q1, R1, Q2, R2> emulated_oracle(Emulation<Q1, R1, Q2, R2> e, Oracle<Q2, R2> inner) {
  return EmulatedOracle<Q1, R1, Q2, R2>(std::move(e), std::move(inner));
}

struct LocalityReport {
  bool pass = true;
  std::size_t pairs_compared = 0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // offending instance indices
};

/// For every pair of instances that the family declares equal near x, the
/// oracle must answer identically.
template <class Instance, class Query, class Answer, class OracleFor, class AgreeNear>
LocalityReport locality_check(OracleFor&& oracle_for, const std::vector<Instance>& family, const Query& x,
                              AgreeNear&& agree_near) {
  LocalityReport report;
  std::vector<Answer> answers;
  answers.reserve(family.size());
  for (const auto& f : family) answers.push_back(oracle_for(f)(x));
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (!agree_near(family[i], family[j], x)) continue;
      ++report.pairs_compared;
      if (!(answers[i] == answers[j])) {
        report.pass = false;
        report.witness = std::make_pair(i, j);
        return report;
      }
    }
  }
  return report;
}

}  // namespace olb
