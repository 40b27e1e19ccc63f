#include "olb/perturbed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace olb::perturbed {

// --- L^p -------------------------------------------------------------------

void PerturbedLpInstance::validate() const {
  base.validate();
  if (!(eps > 0.0) || !(K > 0.0)) throw std::invalid_argument("PerturbedLpInstance: ε and K must be positive");
  if (delta.size() != base.basis.M) throw std::invalid_argument("PerturbedLpInstance: expected M perturbations");
  const double bar = delta_bar();
  for (double d : delta)
    if (!(d >= 0.0 && d <= bar)) throw std::invalid_argument("PerturbedLpInstance: δ outside [0, δ̄]");
}

PerturbedLpInstance random_perturbed_lp(const lp::LpInstance& base, double eps, double K, Rng& rng) {
  PerturbedLpInstance inst{base, {}, eps, K, rng.seed()};
  const double bar = inst.delta_bar();
  for (std::size_t i = 0; i < base.basis.M; ++i) inst.delta.push_back(rng.uniform(0.0, bar));
  inst.validate();
  return inst;
}

void to_json(nlohmann::json& j, const PerturbedLpInstance& inst) {
  j = {{"base", inst.base}, {"delta", inst.delta}, {"eps", inst.eps}, {"K", inst.K}, {"seed", inst.seed}};
}

void from_json(const nlohmann::json& j, PerturbedLpInstance& inst) {
  inst.base = j.at("base").get<lp::LpInstance>();
  inst.delta = j.at("delta").get<std::vector<double>>();
  inst.eps = j.at("eps").get<double>();
  inst.K = j.value("K", kDefaultK);
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.validate();
}

namespace {

std::vector<double> shifted_values(const PerturbedLpInstance& inst, const lp::Vec& x) {
  lp::check_domain(inst.base.basis, x);
  auto c = inst.base.basis.working_coordinates(x);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = inst.base.signs[i] * (c[i] + inst.delta[i]);
  return c;
}

}  // namespace

double eval_perturbed_lp(const PerturbedLpInstance& inst, const lp::Vec& x) {
  const auto v = shifted_values(inst, x);
  return *std::max_element(v.begin(), v.end());
}

MaximizerSet maximizer_set(const PerturbedLpInstance& inst, const lp::Vec& x) {
  const auto v = shifted_values(inst, x);
  MaximizerSet out;
  out.value = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == out.value)
      out.indices.push_back(i + 1);
    else if (out.value - v[i] <= kNearTie)
      ++out.near_ties;
  }
  return out;
}

MaximalAnswer maximal_oracle_lp(const PerturbedLpInstance& inst, const lp::Vec& x) {
  const auto m = maximizer_set(inst, x);
  if (m.indices.size() != 1) return Degenerate{m.indices};
  const std::size_t j = m.indices.front();
  return Descriptor{j, inst.base.signs[j - 1], inst.delta[j - 1]};
}

lp::Answer single_coordinate_lp(const PerturbedLpInstance& inst, const lp::Vec& x) {
  lp::check_domain(inst.base.basis, x);
  auto c = inst.base.basis.working_coordinates(x);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += inst.delta[i];
  lp::Answer best{-INFINITY, 0, 0.0};
  for (std::size_t i : lp::confidence_order(c)) {
    const double v = inst.base.signs[i - 1] * c[i - 1];
    if (v > best.value) best = {v, i, static_cast<double>(inst.base.signs[i - 1])};
  }
  return best;
}

Descriptor descriptor_from_answer(const lp::WorkingBasis& basis, const lp::Vec& x, const lp::Answer& a) {
  const double c = basis.working_coordinate(a.axis, x);
  const int sign = a.slope > 0 ? 1 : -1;
  return Descriptor{a.axis, sign, sign * a.value - c};
}

void AuditReport::write_jsonl(std::ostream& os) const {
  for (const auto& e : events) {
    nlohmann::json j = {{"t", e.t},         {"maximizers", e.maximizers},   {"new", e.new_count},
                        {"near_ties", e.near_ties}, {"inside_active", e.inside_active}, {"violation", e.violation}};
    os << j.dump() << '\n';
  }
}

AuditReport unpredictability_audit_lp(const std::vector<lp::Vec>& trajectory, const PerturbedLpInstance& inst) {
  AuditReport r;
  std::vector<bool> seen(inst.base.basis.M + 1, false);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto m = maximizer_set(inst, trajectory[t]);
    AuditStep step{t + 1, m.indices, 0, m.near_ties, true, false};
    for (auto i : m.indices)
      if (!seen[i]) ++step.new_count;
    for (auto i : m.indices) seen[i] = true;
    step.violation = step.new_count >= 2;
    ++r.steps;
    r.near_ties += m.near_ties;
    if (step.new_count >= 2) ++r.multi_new_steps;
    if (step.violation) {
      ++r.violations;
      if (!r.first_violation) r.first_violation = step.t;
    }
    r.events.push_back(std::move(step));
  }
  r.pass = r.violations == 0;
  return r;
}

// --- Box -------------------------------------------------------------------

namespace {

PerturbedBoxParams finish_params(double eps, std::size_t M, double K) {
  PerturbedBoxParams p;
  p.eps = eps;
  p.K = K;
  p.M = M;
  p.alpha = 1.0 - 8.0 * eps / (5.0 * K * static_cast<double>(M));
  if (!(p.alpha > std::exp(-1.0))) throw std::invalid_argument("perturbed box: α ≤ 1/e; increase K");
  p.delta_bar = (1.0 - p.alpha) / 4.0 * std::pow(p.alpha / 8.0, static_cast<double>(M));
  return p;
}

}  // namespace

PerturbedBoxParams PerturbedBoxParams::from_eps(double eps, double K) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("perturbed box: need 0 < ε ≤ 1");
  if (!(K > 0.0)) throw std::invalid_argument("perturbed box: K must be positive");
  double alpha = 1.0;
  std::size_t M = 0;
  for (std::size_t it = 1; it <= 100; ++it) {
    const double m = std::floor(std::log(1.0 / eps) / (3.0 - std::log(alpha)));
    if (m < 1.0) throw std::invalid_argument("perturbed box: ε too coarse for depth 1");
    const auto next = static_cast<std::size_t>(m);
    const double next_alpha = 1.0 - 8.0 * eps / (5.0 * K * m);
    if (next == M && next_alpha == alpha) {
      auto p = finish_params(eps, M, K);
      p.iterations = it;
      return p;
    }
    M = next;
    alpha = next_alpha;
  }
  throw std::runtime_error("perturbed box: (α, M) iteration did not converge");
}

PerturbedBoxParams PerturbedBoxParams::with_depth(double eps, std::size_t M, double K) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("perturbed box: need 0 < ε ≤ 1");
  if (M < 1) throw std::invalid_argument("perturbed box: M must be ≥ 1");
  return finish_params(eps, M, K);
}

Levels random_levels(const PerturbedBoxParams& params, Rng& rng) {
  Levels d(params.M);
  for (auto& v : d) v = params.delta_bar * (1.0 - rng.uniform01());
  return d;
}

double perturbed_breakpoint(std::size_t l, const Levels& delta, const PerturbedBoxParams& params) {
  if (l > params.M || delta.size() < l) throw std::invalid_argument("perturbed_breakpoint: level out of range");
  double b = 1.0;
  for (std::size_t j = 0; j < l; ++j)
    b -= params.alpha / 2.0 * std::pow(params.alpha / 8.0, static_cast<double>(j)) + delta[j];
  return b;
}

namespace {

void check_1d(const BitString& s, const Levels& delta, double x, const PerturbedBoxParams& params) {
  if (!(std::abs(x) <= 1.0)) throw std::domain_error("perturbed 1D family: query outside [-1, 1]");
  if (s.size() > params.M || delta.size() < s.size())
    throw std::invalid_argument("perturbed 1D family: string longer than depth or δ");
}

// One extension step from level l (center c, half-length h, value v = f_{s,δ}(x), breakpoint b).
double g_step(std::uint8_t bit, double c, double h, double v, double b, double d, std::size_t l, double x,
              const PerturbedBoxParams& params) {
  const double a = params.alpha;
  const double next_b = b - a / 2.0 * std::pow(a / 8.0, static_cast<double>(l)) - d;
  const bool zero = bit == 0;
  const double lo = zero ? c - h / 2.0 : c - h;
  const double hi = zero ? c + h : c + h / 2.0;
  const double kink = zero ? c - h / 4.0 : c + h / 4.0;
  if (lo <= x && x <= hi)
    return next_b - std::pow(a / 8.0, static_cast<double>(l + 1)) +
           std::pow(a / 2.0, static_cast<double>(l + 1)) * std::abs(x - kink);
  return b + a * (v - b) - d;
}

}  // namespace

double eval_perturbed_1d(const BitString& s, const Levels& delta, double x, const PerturbedBoxParams& params) {
  check_1d(s, delta, x, params);
  double v = std::abs(x);
  double c = 0.0;
  double h = 1.0;
  double b = 1.0;
  for (std::size_t j = 1; j <= s.size(); ++j) {
    const std::size_t l = j - 1;
    const double g = g_step(s.bit(j), c, h, v, b, delta[l], l, x, params);
    v = std::max(g, v);
    b -= params.alpha / 2.0 * std::pow(params.alpha / 8.0, static_cast<double>(l)) + delta[l];
    h /= 4.0;
    c = s.bit(j) == 0 ? c - h : c + h;
  }
  return v;
}

double extension_g(const BitString& s, std::uint8_t bit, const Levels& delta, double x,
                   const PerturbedBoxParams& params) {
  check_1d(s.append(bit), delta, x, params);
  const auto I = interval_d(s);
  const double c = (I.lo + I.hi) / 2.0;
  const double h = (I.hi - I.lo) / 2.0;
  return g_step(bit, c, h, eval_perturbed_1d(s, delta, x, params), perturbed_breakpoint(s.size(), delta, params),
                delta[s.size()], s.size(), x, params);
}

double perturbed_canonical_form(const BitString& s, const Levels& delta, double x, const PerturbedBoxParams& params) {
  const auto I = interval_d(s);
  const double l = static_cast<double>(s.size());
  return perturbed_breakpoint(s.size(), delta, params) - std::pow(params.alpha / 8.0, l) +
         std::pow(params.alpha / 2.0, l) * std::abs(x - (I.lo + I.hi) / 2.0);
}

IntervalD interval_d(const BitString& s) {
  double c = 0.0;
  double h = 1.0;
  for (std::size_t j = 1; j <= s.size(); ++j) {
    h /= 4.0;
    c = s.bit(j) == 0 ? c - h : c + h;
  }
  return {c - h, c + h};
}

IntervalD active_interval(const BitString& u, std::uint8_t next_bit, const Levels& delta,
                          const PerturbedBoxParams& params) {
  const auto I = interval_d(u);
  const std::size_t l = u.size();
  if (l >= params.M) return I;
  const double scale = std::pow(2.0 / params.alpha, static_cast<double>(l)) * delta.at(l);
  const double outer = scale / (1.0 - params.alpha);        // side handled by the shifted branch
  const double inner = scale / (1.0 - params.alpha / 2.0);  // side handled by the kinked branch
  return next_bit == 0 ? IntervalD{I.lo + outer, I.hi - inner} : IntervalD{I.lo + inner, I.hi - outer};
}

void PerturbedBoxInstance::validate() const {
  if (n < 1 || strings.size() != n || delta.size() != n)
    throw std::invalid_argument("PerturbedBoxInstance: need n strings and n perturbation vectors");
  for (std::size_t i = 0; i < n; ++i) {
    if (strings[i].size() != params.M) throw std::invalid_argument("PerturbedBoxInstance: strings must have length M");
    if (delta[i].size() != params.M) throw std::invalid_argument("PerturbedBoxInstance: δ must have M entries");
    for (double d : delta[i])
      if (!(d > 0.0 && d <= params.delta_bar)) throw std::invalid_argument("PerturbedBoxInstance: δ outside (0, δ̄]");
  }
}

PerturbedBoxInstance random_perturbed_box(std::size_t n, const PerturbedBoxParams& params, Rng& rng) {
  PerturbedBoxInstance inst;
  inst.params = params;
  inst.n = n;
  inst.seed = rng.seed();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> bits(params.M);
    for (auto& b : bits) b = rng.bit();
    inst.strings.emplace_back(std::move(bits));
    inst.delta.push_back(random_levels(params, rng));
  }
  inst.validate();
  return inst;
}

void to_json(nlohmann::json& j, const PerturbedBoxInstance& inst) {
  std::vector<std::string> s;
  for (const auto& t : inst.strings) s.push_back(t.str());
  j = {{"n", inst.n},          {"M", inst.params.M},         {"eps", inst.params.eps},
       {"K", inst.params.K},   {"alpha", inst.params.alpha}, {"delta_bar", inst.params.delta_bar},
       {"strings", s},         {"delta", inst.delta},        {"seed", inst.seed}};
}

void from_json(const nlohmann::json& j, PerturbedBoxInstance& inst) {
  inst.params = PerturbedBoxParams::with_depth(j.at("eps").get<double>(), j.at("M").get<std::size_t>(),
                                               j.value("K", kDefaultK));
  inst.n = j.at("n").get<std::size_t>();
  inst.strings.clear();
  for (const auto& s : j.at("strings")) inst.strings.push_back(BitString::parse(s.get<std::string>()));
  inst.delta = j.at("delta").get<std::vector<Levels>>();
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.validate();
}

double eval_perturbed_box(const PerturbedBoxInstance& inst, const std::vector<double>& x) {
  if (x.size() != inst.n) throw std::invalid_argument("perturbed box: query dimension mismatch");
  double best = -INFINITY;
  for (std::size_t i = 0; i < inst.n; ++i)
    best = std::max(best, eval_perturbed_1d(inst.strings[i], inst.delta[i], x[i], inst.params));
  return best;
}

std::set<std::pair<std::size_t, std::size_t>> maximizer_labels(const PerturbedBoxInstance& inst,
                                                               const std::vector<double>& x) {
  if (x.size() != inst.n) throw std::invalid_argument("perturbed box: query dimension mismatch");
  std::vector<double> v(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) v[i] = eval_perturbed_1d(inst.strings[i], inst.delta[i], x[i], inst.params);
  const double best = *std::max_element(v.begin(), v.end());
  std::set<std::pair<std::size_t, std::size_t>> J;
  for (std::size_t i = 0; i < inst.n; ++i) {
    if (v[i] != best) continue;
    for (std::size_t l = 0; l <= inst.params.M; ++l) {
      const double upper = perturbed_breakpoint(l, inst.delta[i], inst.params);
      const double lower = l < inst.params.M ? perturbed_breakpoint(l + 1, inst.delta[i], inst.params) : -INFINITY;
      if (lower < best && best <= upper) {
        J.emplace(i + 1, l);
        break;
      }
    }
  }
  return J;
}

AuditReport unpredictability_audit_box(const std::vector<std::vector<double>>& trajectory,
                                       const PerturbedBoxInstance& inst) {
  AuditReport r;
  const std::size_t M = inst.params.M;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::optional<std::size_t>> deepest(inst.n);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto& x = trajectory[t];
    bool inside = true;
    for (std::size_t i = 0; i < inst.n && inside; ++i) {
      const std::size_t L = deepest[i] ? std::min(*deepest[i] + 1, M) : 0;
      const auto u = inst.strings[i].prefix(L);
      const auto I = L < M ? active_interval(u, inst.strings[i].bit(L + 1), inst.delta[i], inst.params) : interval_d(u);
      inside = I.interior_contains(x[i]);
    }
    const auto J = maximizer_labels(inst, x);
    AuditStep step;
    step.t = t + 1;
    step.inside_active = inside;
    for (const auto& [i, l] : J) {
      step.maximizers.push_back((i - 1) * (M + 1) + l + 1);
      if (!seen.count({i, l})) ++step.new_count;
    }
    for (const auto& [i, l] : J) {
      seen.emplace(i, l);
      deepest[i - 1] = std::max(deepest[i - 1].value_or(0), l);
    }
    step.violation = inside && J.size() >= 2;
    ++r.steps;
    if (!inside) ++r.outside_active;
    if (step.new_count >= 2) ++r.multi_new_steps;
    if (step.violation) {
      ++r.violations;
      if (!r.first_violation) r.first_violation = step.t;
    }
    r.events.push_back(std::move(step));
  }
  r.pass = r.violations == 0;
  return r;
}

std::vector<std::vector<double>> sample_box_trajectory(const PerturbedBoxInstance& inst, std::size_t steps, Rng& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<double> x(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
      const auto depth = static_cast<std::size_t>(rng.below(inst.params.M + 1));
      const auto I = interval_d(inst.strings[i].prefix(depth));
      x[i] = rng.uniform(I.lo, I.hi);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<lp::Vec> sample_lp_trajectory(const lp::WorkingBasis& basis, std::size_t steps, Rng& rng) {
  std::vector<lp::Vec> out;
  for (std::size_t t = 0; t < steps; ++t) {
    lp::Vec c(basis.M);
    const double unit = rng.uniform(0.01, 0.1);
    for (auto& v : c) v = unit * (static_cast<double>(rng.below(5)) - 2.0);
    auto x = basis.from_working(c);
    const double norm = lp::lp_norm(x, basis.p);
    if (norm > 0.9)
      for (auto& v : x) v *= 0.9 / norm;
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace olb::perturbed
