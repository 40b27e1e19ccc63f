#include "olb/family_box.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace olb::box {
namespace {

void check_point(const Point& x, std::size_t n) {
  if (x.size() != n)
    throw std::invalid_argument("box family: query has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(n));
  for (const auto& xi : x)
    if (abs(xi) > Dyadic(1)) throw f1d::DomainError("box family: query coordinate " + xi.decimal() + " outside [-1, 1]");
}

}  // namespace

void BoxInstance::validate() const {
  if (n < 1 || M < 1) throw std::invalid_argument("BoxInstance: n and M must be ≥ 1");
  if (strings.size() != n) throw std::invalid_argument("BoxInstance: expected n strings");
  for (const auto& s : strings)
    if (s.size() != M) throw std::invalid_argument("BoxInstance: string '" + s.str() + "' does not have length M");
}

BitString BoxInstance::concatenated() const {
  std::vector<std::uint8_t> bits;
  bits.reserve(n * M);
  for (const auto& s : strings) bits.insert(bits.end(), s.bits().begin(), s.bits().end());
  return BitString(std::move(bits));
}

BoxInstance BoxInstance::from_concatenated(const BitString& S, std::size_t n, std::size_t M) {
  if (S.size() != n * M) throw std::invalid_argument("BoxInstance: concatenated string has wrong length");
  BoxInstance b{n, M, {}};
  for (std::size_t i = 0; i < n; ++i)
    b.strings.emplace_back(std::vector<std::uint8_t>(S.bits().begin() + static_cast<std::ptrdiff_t>(i * M),
                                                     S.bits().begin() + static_cast<std::ptrdiff_t>((i + 1) * M)));
  return b;
}

void to_json(nlohmann::json& j, const BoxInstance& b) {
  std::vector<std::string> s;
  for (const auto& t : b.strings) s.push_back(t.str());
  j = {{"n", b.n}, {"M", b.M}, {"strings", s}};
}

void from_json(const nlohmann::json& j, BoxInstance& b) {
  b.n = j.at("n").get<std::size_t>();
  b.M = j.at("M").get<std::size_t>();
  b.strings.clear();
  for (const auto& s : j.at("strings")) b.strings.push_back(BitString::parse(s.get<std::string>()));
  b.validate();
}

Dyadic eval_box(const BoxInstance& inst, const Point& x) {
  check_point(x, inst.n);
  Dyadic best = f1d::eval(inst.strings[0], x[0]);
  for (std::size_t i = 1; i < inst.n; ++i) best = max(best, f1d::eval(inst.strings[i], x[i]));
  return best;
}

std::vector<Label> confidence_order(const Point& x, const std::vector<BitString>& strings) {
  if (x.size() != strings.size()) throw std::invalid_argument("confidence_order: dimension mismatch");
  Dyadic tau = f1d::eval(strings[0], x[0]);
  for (std::size_t i = 1; i < strings.size(); ++i) tau = max(tau, f1d::eval(strings[i], x[i]));
  std::vector<Label> labels;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    for (std::size_t h = 1; h <= strings[i].size(); ++h) {
      Dyadic v = f1d::eval(strings[i].flip_cut(h), x[i]);
      if (v >= tau) labels.push_back(Label{i + 1, h, std::move(v)});
    }
  }
  std::sort(labels.begin(), labels.end(), [](const Label& a, const Label& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i != b.i) return a.i < b.i;
    return a.h < b.h;
  });
  return labels;
}

QueryPlan plan_query(const Point& x, std::size_t M) {
  if (x.empty()) throw std::invalid_argument("box family: empty query");
  check_point(x, x.size());
  QueryPlan plan;
  for (const auto& xi : x) {
    plan.strings.push_back(f1d::query_string(xi, M));
    plan.string_values.push_back(f1d::eval(plan.strings.back(), xi));
  }
  plan.tau = *std::max_element(plan.string_values.begin(), plan.string_values.end());
  plan.labels = confidence_order(x, plan.strings);
  std::vector<std::uint8_t> guess;
  for (const auto& l : plan.labels) {
    guess.push_back(plan.strings[l.i - 1].bit(l.h));
    plan.query.sigma.push_back((l.i - 1) * M + l.h);
  }
  plan.query.guess = BitString(std::move(guess));
  return plan;
}

sgp::Query box_sgp_query(const Point& x, std::size_t M) { return plan_query(x, M).query; }

Answer box_emulate(const QueryPlan& plan, const Point& x, const sgp::Answer& a, EqualRule rule) {
  std::size_t j = 0;
  BitString p;
  if (!a.equal) {
    const auto& l = plan.labels.at(a.k - 1);
    j = l.i;
    p = plan.strings[j - 1].flip_cut(l.h);
  } else if (rule == EqualRule::Literal) {
    const auto& l = plan.labels.back();
    j = l.i;
    p = plan.strings[j - 1].prefix(l.h);
  } else {
    for (j = 1; plan.string_values[j - 1] != plan.tau; ++j) {
    }
    p = plan.strings[j - 1];
  }
  return {f1d::eval(p, x[j - 1]), j, f1d::subgradient_1d(p, x[j - 1])};
}

Answer box_emulate(const Point& x, std::size_t M, const sgp::Answer& a) { return box_emulate(plan_query(x, M), x, a); }

Answer reference_oracle(const BoxInstance& inst, const Point& x) {
  check_point(x, inst.n);
  std::vector<Dyadic> values;
  for (std::size_t i = 0; i < inst.n; ++i) values.push_back(f1d::eval(inst.strings[i], x[i]));
  const Dyadic best = *std::max_element(values.begin(), values.end());
  std::optional<std::size_t> axis;
  BitString prefix;
  for (std::size_t i = 0; i < inst.n && !axis; ++i) {
    if (values[i] != best) continue;
    const auto s = f1d::query_string(x[i], inst.M);
    const auto P = f1d::revealed_prefix(inst.strings[i], s);
    if (P != s) {
      axis = i + 1;
      prefix = P;
    }
  }
  if (!axis) {
    std::size_t i = 0;
    while (values[i] != best) ++i;
    axis = i + 1;
    prefix = f1d::query_string(x[i], inst.M);
  }
  return {best, *axis, f1d::subgradient_1d(prefix, x[*axis - 1])};
}

Oracle<Point, Answer> reference_oracle_for(BoxInstance inst) {
  return [inst = std::move(inst)](const Point& x) { return reference_oracle(inst, x); };
}

Emulation<Point, Answer, sgp::Query, sgp::Answer> emulation(std::size_t n, std::size_t M, EqualRule rule) {
  Emulation<Point, Answer, sgp::Query, sgp::Answer> e;
  e.query_map = [n, M](const Point& x) {
    check_point(x, n);
    return box_sgp_query(x, M);
  };
  e.answer_map = [M, rule](const Point& x, const sgp::Answer& a) { return box_emulate(plan_query(x, M), x, a, rule); };
  return e;
}

std::vector<BoxInstance> all_instances(std::size_t n, std::size_t M) {
  if (n * M > 20) throw std::invalid_argument("all_instances: nM too large to enumerate");
  std::vector<BoxInstance> out;
  for (const auto& S : all_strings(n * M)) out.push_back(BoxInstance::from_concatenated(S, n, M));
  return out;
}

std::vector<f1d::Interval1D> eps_minima(const BoxInstance& inst, const Dyadic& eps) {
  std::vector<f1d::Interval1D> out;
  for (const auto& s : inst.strings) out.push_back(f1d::eps_minima(s, eps));
  return out;
}

PackingReport packing_check_box(std::size_t n, std::size_t M, const Dyadic& eps) {
  if (n * M > 16) throw std::invalid_argument("packing_check_box: nM must be ≤ 16");
  if (eps.sign() <= 0 || eps > Dyadic::pow2(-3 * static_cast<std::int64_t>(M)))
    throw std::invalid_argument("packing_check_box: need 0 < ε ≤ 2^{-3M}");
  const auto family = all_instances(n, M);
  std::vector<std::vector<f1d::Interval1D>> boxes;
  for (const auto& inst : family) boxes.push_back(eps_minima(inst, eps));
  PackingReport r;
  r.instances = family.size();
  for (std::size_t a = 0; a < boxes.size(); ++a) {
    for (std::size_t b = a + 1; b < boxes.size(); ++b) {
      ++r.pairs;
      bool disjoint = false;
      for (std::size_t i = 0; i < n && !disjoint; ++i)
        disjoint = boxes[a][i].hi <= boxes[b][i].lo || boxes[b][i].hi <= boxes[a][i].lo;
      if (!disjoint && r.pass) {
        r.pass = false;
        r.witness = std::make_pair(a, b);
      }
    }
  }
  return r;
}

double ScaledBox::eval(const BoxInstance& inst, const std::vector<double>& y) const {
  Point x;
  for (double yi : y) {
    const double u = std::clamp(yi * input_scale, -1.0, 1.0);
    if (std::abs(yi) > output_scale * (1.0 + 1e-12))
      throw f1d::DomainError("scaled box: coordinate outside the inscribed box");
    x.push_back(Dyadic::from_double(u));
  }
  return output_scale * eval_box(inst, x).to_double();
}

ScaledBox inscribe_in_lp_ball(double p, std::size_t n, double eps) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("inscribe_in_lp_ball: need 1 ≤ p < ∞");
  if (n < 1) throw std::invalid_argument("inscribe_in_lp_ball: n must be ≥ 1");
  ScaledBox s;
  s.p = p;
  s.n = n;
  s.eps = eps;
  s.input_scale = std::pow(static_cast<double>(n), 1.0 / p);
  s.output_scale = 1.0 / s.input_scale;
  s.effective_eps = eps * s.input_scale;
  if (!(eps > 0.0) || s.effective_eps >= 1.0)
    throw std::invalid_argument("inscribe_in_lp_ball: accuracy too coarse (ε·n^{1/p} = " +
                                std::to_string(s.effective_eps) + ")");
  std::size_t m = 0;
  while (s.effective_eps <= std::ldexp(1.0, -3 * static_cast<int>(m + 1))) ++m;
  if (m < 1)
    throw std::invalid_argument("inscribe_in_lp_ball: accuracy too coarse for depth 1 (ε·n^{1/p} = " +
                                std::to_string(s.effective_eps) + ")");
  s.M = m;
  return s;
}

}  // namespace olb::box
