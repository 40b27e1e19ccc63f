#include "olb/family_lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace olb::lp {
namespace {

bool is_power_of_two(std::size_t m) { return m >= 1 && (m & (m - 1)) == 0; }

// In-place Walsh–Hadamard transform: out_i = Σ_k ν_i(k) in_k.
void hadamard(Vec& v) {
  for (std::size_t len = 1; len < v.size(); len <<= 1)
    for (std::size_t i = 0; i < v.size(); i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = v[j];
        const double b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
}

}  // namespace

const char* to_string(BasisMode m) noexcept { return m == BasisMode::Standard ? "standard" : "tensor"; }

BasisMode parse_mode(const std::string& name) {
  if (name == "standard") return BasisMode::Standard;
  if (name == "tensor") return BasisMode::Tensor;
  throw std::invalid_argument("unknown basis mode '" + name + "'");
}

WorkingBasis::WorkingBasis(double p_, std::size_t M_)
    : p(p_), M(M_), mode(p_ < 2.0 ? BasisMode::Tensor : BasisMode::Standard) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("WorkingBasis: need 1 ≤ p < ∞");
  if (M < 1) throw std::invalid_argument("WorkingBasis: M must be ≥ 1");
  if (mode == BasisMode::Tensor && !is_power_of_two(M))
    throw std::invalid_argument("WorkingBasis: tensor basis needs M a power of two");
}

int WorkingBasis::nu(std::size_t i, std::size_t k) const {
  if (mode == BasisMode::Standard) return i == k ? 1 : 0;
  return std::popcount((i - 1) & (k - 1)) % 2 == 0 ? 1 : -1;
}

Vec WorkingBasis::working_coordinates(const Vec& x) const {
  if (x.size() != M) throw std::invalid_argument("working_coordinates: dimension mismatch");
  if (mode == BasisMode::Standard) return x;
  Vec c = x;
  hadamard(c);
  const double scale = std::pow(static_cast<double>(M), -q_inverse());
  for (auto& v : c) v *= scale;
  return c;
}

double WorkingBasis::working_coordinate(std::size_t i, const Vec& x) const {
  if (i < 1 || i > M) throw std::invalid_argument("working_coordinate: index out of range");
  if (x.size() != M) throw std::invalid_argument("working_coordinate: dimension mismatch");
  if (mode == BasisMode::Standard) return x[i - 1];
  double s = 0.0;
  for (std::size_t k = 1; k <= M; ++k) s += nu(i, k) * x[k - 1];
  return s * std::pow(static_cast<double>(M), -q_inverse());
}

Vec WorkingBasis::from_working(const Vec& c) const {
  if (c.size() != M) throw std::invalid_argument("from_working: dimension mismatch");
  if (mode == BasisMode::Standard) return c;
  // ⟨ν_i, x⟩ = M^{1/q} c_i and H² = M·I, so x = H c · M^{1/q − 1}.
  Vec x = c;
  hadamard(x);
  const double scale = std::pow(static_cast<double>(M), q_inverse() - 1.0);
  for (auto& v : x) v *= scale;
  return x;
}

Vec WorkingBasis::coordinate_gradient(std::size_t i) const {
  Vec g(M, 0.0);
  if (mode == BasisMode::Standard) {
    g.at(i - 1) = 1.0;
    return g;
  }
  const double scale = std::pow(static_cast<double>(M), -q_inverse());
  for (std::size_t k = 1; k <= M; ++k) g[k - 1] = nu(i, k) * scale;
  return g;
}

double lp_norm(const Vec& x, double p) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

std::size_t choose_M(double p, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("choose_M: ε must be positive");
  if (p >= 2.0) {
    const double m = std::floor(std::pow(1.0 / eps, p) * (1.0 + 1e-12)) - 1.0;
    if (m < 1.0) throw AccuracyError("choose_M: ε too coarse for the large-scale family (M < 1)");
    if (m > 1e9) throw AccuracyError("choose_M: ε too fine (M > 10^9)");
    return static_cast<std::size_t>(m);
  }
  const double bound = 1.0 / (eps * eps);
  if (!(bound > 1.0)) throw AccuracyError("choose_M: ε too coarse for the large-scale family (M < 1)");
  std::size_t M = 1;
  while (static_cast<double>(M) * 2.0 < bound) M *= 2;
  if (M > (std::size_t{1} << 30)) throw AccuracyError("choose_M: ε too fine");
  return M;
}

void LpInstance::validate() const {
  if (signs.size() != basis.M) throw std::invalid_argument("LpInstance: expected M signs");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("LpInstance: signs must be ±1");
}

BitString LpInstance::bits() const {
  std::vector<std::uint8_t> b;
  for (int s : signs) b.push_back(s > 0 ? 1 : 0);
  return BitString(std::move(b));
}

LpInstance LpInstance::from_bits(const WorkingBasis& basis, const BitString& s) {
  LpInstance inst{basis, {}};
  for (auto b : s.bits()) inst.signs.push_back(b ? 1 : -1);
  inst.validate();
  return inst;
}

void to_json(nlohmann::json& j, const LpInstance& inst) {
  j = {{"p", inst.basis.p}, {"M", inst.basis.M}, {"mode", to_string(inst.basis.mode)}, {"signs", inst.signs}};
}

void from_json(const nlohmann::json& j, LpInstance& inst) {
  inst.basis = WorkingBasis(j.at("p").get<double>(), j.at("M").get<std::size_t>());
  if (j.contains("mode") && parse_mode(j.at("mode").get<std::string>()) != inst.basis.mode)
    throw std::invalid_argument("LpInstance: mode inconsistent with p");
  inst.signs = j.at("signs").get<std::vector<int>>();
  inst.validate();
}

void check_domain(const WorkingBasis& basis, const Vec& x) {
  if (x.size() != basis.M) throw std::invalid_argument("L^p family: query dimension mismatch");
  const double norm = lp_norm(x, basis.p);
  if (!(norm <= 1.0 + 1e-12)) throw DomainError("L^p family: query outside the unit ball (norm " + std::to_string(norm) + ")");
}

double eval_lp(const LpInstance& inst, const Vec& x) {
  check_domain(inst.basis, x);
  const auto c = inst.basis.working_coordinates(x);
  double best = -INFINITY;
  for (std::size_t i = 0; i < c.size(); ++i) best = std::max(best, inst.signs[i] * c[i]);
  return best;
}

std::vector<std::size_t> confidence_order(const Vec& c) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(c[a - 1]) > std::abs(c[b - 1]); });
  return order;
}

Answer reference_oracle(const LpInstance& inst, const Vec& x) {
  check_domain(inst.basis, x);
  const auto c = inst.basis.working_coordinates(x);
  Answer best{-INFINITY, 0, 0.0};
  for (std::size_t i : confidence_order(c)) {
    const double v = inst.signs[i - 1] * c[i - 1];
    if (v > best.value) best = {v, i, static_cast<double>(inst.signs[i - 1])};
  }
  return best;
}

Oracle<Vec, Answer> reference_oracle_for(LpInstance inst) {
  return [inst = std::move(inst)](const Vec& x) { return reference_oracle(inst, x); };
}

Vec ambient_subgradient(const WorkingBasis& basis, const Answer& a) {
  auto g = basis.coordinate_gradient(a.axis);
  for (auto& v : g) v *= a.slope;
  return g;
}

sgp::Query lp_sgp_query(const WorkingBasis& basis, const Vec& x) {
  check_domain(basis, x);
  const auto c = basis.working_coordinates(x);
  sgp::Query q;
  std::vector<std::uint8_t> guess;
  for (std::size_t i : confidence_order(c)) {
    q.sigma.push_back(i);
    guess.push_back(c[i - 1] > 0.0 ? 0 : 1);  // s = −sign c, and +1 at a zero
    if (c[i - 1] == 0.0) break;
  }
  q.guess = BitString(std::move(guess));
  return q;
}

Answer lp_emulate(const WorkingBasis& basis, const Vec& x, const sgp::Answer& a) {
  const auto c = basis.working_coordinates(x);
  const auto q = lp_sgp_query(basis, x);
  auto sign_at = [&](std::size_t j) { return q.guess.bit(j) ? 1 : -1; };
  if (!a.equal) {
    const std::size_t J = q.sigma.at(a.k - 1);
    const double p = -sign_at(a.k);
    return {p * c[J - 1], J, p};
  }
  // Every guessed sign is right. The maximum −|c_{σ(k)}| (or 0) is attained
  // first, in ≺, at the earliest position sharing |c_{σ(k)}|.
  const std::size_t k = q.guess.size();
  const double last = std::abs(c[q.sigma[k - 1] - 1]);
  std::size_t m = 1;
  while (std::abs(c[q.sigma[m - 1] - 1]) != last) ++m;
  const std::size_t J = q.sigma[m - 1];
  const double p = sign_at(m);
  return {p * c[J - 1], J, p};
}

Emulation<Vec, Answer, sgp::Query, sgp::Answer> emulation(WorkingBasis basis) {
  Emulation<Vec, Answer, sgp::Query, sgp::Answer> e;
  e.query_map = [basis](const Vec& x) { return lp_sgp_query(basis, x); };
  e.answer_map = [basis](const Vec& x, const sgp::Answer& a) { return lp_emulate(basis, x, a); };
  return e;
}

double witness_value(const WorkingBasis& basis) {
  return -std::pow(static_cast<double>(basis.M), -1.0 / basis.r());
}

Vec packing_witness(const LpInstance& inst) {
  inst.validate();
  const double mag = -witness_value(inst.basis);
  Vec c(inst.basis.M);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -inst.signs[i] * mag;
  return inst.basis.from_working(c);
}

std::vector<int> identify_from_eps_min(const LpInstance& inst, const Vec& x, double eps) {
  const double M = static_cast<double>(inst.basis.M);
  if (!(M < std::pow(1.0 / eps, inst.basis.r())))
    throw std::invalid_argument("identify_from_eps_min: need M < 1/ε^r");
  const double v = eval_lp(inst, x);
  if (!(v < witness_value(inst.basis) + eps))
    throw std::invalid_argument("identify_from_eps_min: point is not an ε-minimum");
  const auto c = inst.basis.working_coordinates(x);
  std::vector<int> s;
  for (double ci : c) s.push_back(ci < 0.0 ? 1 : -1);
  return s;
}

}  // namespace olb::lp
