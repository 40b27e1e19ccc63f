#include "olb/optimizers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace olb::opt {
namespace {

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool judged(const Judge& judge, const std::vector<double>& x) { return judge && judge(x); }

}  // namespace

GenericOracle adapt_box(Oracle<box::Point, box::Answer> oracle) {
  return [oracle = std::move(oracle)](const std::vector<double>& x) {
    box::Point q;
    for (double v : x) q.push_back(Dyadic::from_double(v));
    const auto a = oracle(q);
    FirstOrderSample s{a.value.to_double(), std::vector<double>(x.size(), 0.0)};
    s.grad.at(a.axis - 1) = a.slope.to_double();
    return s;
  };
}

GenericOracle adapt_lp(Oracle<lp::Vec, lp::Answer> oracle, lp::WorkingBasis basis) {
  return [oracle = std::move(oracle), basis = std::move(basis)](const std::vector<double>& x) {
    const auto a = oracle(x);
    return FirstOrderSample{a.value, lp::ambient_subgradient(basis, a)};
  };
}

double Domain::l2_radius() const {
  const double n_ = static_cast<double>(n);
  if (kind == Kind::Box) return std::sqrt(n_);
  if (p <= 2.0) return std::pow(n_, 0.5 - 1.0 / p);
  return 1.0;
}

std::vector<double> Domain::project(std::vector<double> x) const {
  if (kind == Kind::Box) {
    for (auto& v : x) v = std::clamp(v, -1.0, 1.0);
    return x;
  }
  const double r = l2_radius() * (1.0 - 1e-12);
  const double norm = l2(x);
  if (norm > r)
    for (auto& v : x) v *= r / norm;
  return x;
}

std::vector<double> Domain::sample(Rng& rng) const {
  std::vector<double> x(n);
  if (kind == Kind::Box) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
  }
  // Uniform in the Euclidean ball of radius l2_radius(): Gaussian direction, radius U^{1/n}.
  std::normal_distribution<double> gauss;
  std::mt19937_64 engine(rng.next());
  for (auto& v : x) v = gauss(engine);
  const double norm = l2(x);
  const double radius = l2_radius() * (1.0 - 1e-12) * std::pow(rng.uniform01(), 1.0 / static_cast<double>(n));
  for (auto& v : x) v *= radius / norm;
  return x;
}

RunResult projected_subgradient(const GenericOracle& oracle, const Domain& domain, const SubgradientOptions& options,
                                const Judge& judge) {
  RunResult r;
  std::vector<double> x(domain.n, 0.0);
  std::vector<double> best = x;
  double best_value = INFINITY;
  const double R = domain.l2_radius();
  for (std::size_t t = 1; t <= options.steps; ++t) {
    const auto s = oracle(x);
    ++r.queries_used;
    if (s.value < best_value) {
      best_value = s.value;
      best = x;
    }
    if (judged(judge, x)) {
      r.success = true;
      if (options.stop_on_success) break;
    }
    const double g = l2(s.grad);
    if (g == 0.0) break;  // zero subgradient: x is a minimizer
    const double eta = options.scale * R / std::sqrt(static_cast<double>(t)) / g;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * s.grad[i];
    x = domain.project(std::move(x));
  }
  r.final_point = best;
  r.success = r.success || judged(judge, best);
  return r;
}

RunResult random_search(const GenericOracle& oracle, const Domain& domain, std::size_t budget, std::uint64_t seed,
                        const Judge& judge) {
  RunResult r;
  Rng rng(seed);
  double best_value = INFINITY;
  for (std::size_t t = 0; t < budget; ++t) {
    auto x = domain.sample(rng);
    const auto s = oracle(x);
    ++r.queries_used;
    if (s.value < best_value) {
      best_value = s.value;
      r.final_point = x;
    }
    if (judged(judge, x)) {
      r.success = true;
      break;
    }
  }
  return r;
}

RunResult tailored_box_learner(const Oracle<box::Point, box::Answer>& oracle, std::size_t n, std::size_t M,
                               const Judge& judge) {
  if (n < 1 || M < 1) throw std::invalid_argument("tailored_box_learner: n and M must be ≥ 1");
  RunResult r;
  std::vector<BitString> known(n);
  std::size_t remaining = n * M;
  auto midpoints = [&] {
    box::Point x;
    for (const auto& u : known) x.push_back(f1d::interval_of(u).center());
    return x;
  };
  while (remaining > 0) {
    const auto x = midpoints();
    const auto a = oracle(x);
    ++r.queries_used;
    const std::size_t j = a.axis;
    if (j < 1 || j > n || known[j - 1].size() >= M)
      throw std::runtime_error("tailored_box_learner: answer on an already identified coordinate");
    // Decode the next bit of coordinate j: the two candidate extensions
    // produce the same value at the midpoint but opposite slopes.
    std::optional<std::uint8_t> bit;
    for (std::uint8_t b : {std::uint8_t{0}, std::uint8_t{1}}) {
      const auto u = known[j - 1].append(b);
      if (f1d::eval(u, x[j - 1]) == a.value && f1d::subgradient_1d(u, x[j - 1]) == a.slope) bit = b;
    }
    if (!bit) throw std::runtime_error("tailored_box_learner: answer matches no candidate extension");
    known[j - 1] = known[j - 1].append(*bit);
    --remaining;
  }
  std::vector<std::uint8_t> all;
  for (const auto& u : known) all.insert(all.end(), u.bits().begin(), u.bits().end());
  r.identified = BitString(std::move(all));
  for (const auto& c : midpoints()) r.final_point.push_back(c.to_double());
  r.success = judge ? judge(r.final_point) : true;
  return r;
}

RunResult tailored_lp_learner(const Oracle<lp::Vec, lp::Answer>& oracle, const lp::WorkingBasis& basis,
                              const Judge& judge) {
  const std::size_t M = basis.M;
  RunResult r;
  std::vector<int> sign(M, 0);  // 0 = unknown
  const double top = std::pow(static_cast<double>(M), -1.0 / basis.r()) * (1.0 - 1e-9);
  const double known_mag = top / 4.0;
  std::size_t unknown = M;
  while (unknown > 0) {
    lp::Vec c(M);
    std::vector<std::size_t> order;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < M; ++i) {
      if (sign[i] == 0) {
        c[i] = -top * (1.0 - static_cast<double>(rank++) / (2.0 * static_cast<double>(M) + 2.0));  // guess +1
        order.push_back(i + 1);
      } else {
        c[i] = -sign[i] * known_mag;
      }
    }
    const auto x = basis.from_working(c);
    const auto a = oracle(x);
    ++r.queries_used;
    if (a.value > 0.0) {
      // The largest wrongly guessed coordinate answers; all before it were right.
      for (std::size_t i : order) {
        if (i == a.axis) break;
        sign[i - 1] = 1;
        --unknown;
      }
      if (sign[a.axis - 1] != 0) throw std::runtime_error("tailored_lp_learner: answer on a known coordinate");
      sign[a.axis - 1] = a.slope > 0 ? 1 : -1;
      --unknown;
    } else {
      for (std::size_t i : order) sign[i - 1] = 1;
      unknown = 0;
    }
  }
  lp::LpInstance guess{basis, sign};
  r.identified = guess.bits();
  r.final_point = lp::packing_witness(guess);
  r.success = judge ? judge(r.final_point) : true;
  return r;
}

std::string csv_header() { return "algo,family,n,M,p,eps,seed,queries_used,success,identified\n"; }

std::string csv_row(const RunRow& row) {
  std::ostringstream os;
  os.precision(17);
  os << row.algo << ',' << row.family << ',' << row.n << ',' << row.M << ',' << row.p << ',' << row.eps << ','
     << row.seed << ',' << row.result.queries_used << ',' << (row.result.success ? 1 : 0) << ','
     << (row.result.identified ? row.result.identified->str() : "") << '\n';
  return os.str();
}

}  // namespace olb::opt
