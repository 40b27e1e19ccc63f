#include "lab.hpp"

#include "olb/family_1d.hpp"
#include "olb/family_box.hpp"
#include "olb/family_lp.hpp"
#include "olb/infoacct.hpp"
#include "olb/optimizers.hpp"
#include "olb/parallel.hpp"
#include "olb/perturbed.hpp"
#include "olb/sgp.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace olb::lab {
namespace {

using nlohmann::json;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

BitString random_string(std::size_t len, Rng& rng) {
  std::vector<std::uint8_t> bits(len);
  for (auto& b : bits) b = rng.bit();
  return BitString(std::move(bits));
}

struct Report {
  std::string body;
  bool pass = true;
};

// --- parameter resolution ---------------------------------------------------

struct BoxSetup {
  Dyadic eps;
  std::size_t M;
};

BoxSetup box_setup(const Config& cfg, const std::string& default_eps) {
  const std::string text = cfg.eps.empty() ? default_eps : cfg.eps;
  Dyadic eps;
  try {
    eps = Dyadic::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--eps must be dyadic for the box family: " + std::string(e.what()));
  }
  if (eps.sign() <= 0) throw UsageError("--eps must be positive");
  std::size_t M = 0;
  if (cfg.M) {
    M = *cfg.M;
    if (M < 1) throw UsageError("--M must be ≥ 1");
    if (eps > Dyadic::pow2(-3 * static_cast<std::int64_t>(M)))
      throw UsageError("--M " + std::to_string(M) + " breaks packing: need ε ≤ 2^{-3M}");
  } else {
    try {
      M = f1d::Family1D::from_eps(eps).M;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (cfg.n < 1) throw UsageError("--n must be ≥ 1");
  return {eps, M};
}

struct LpSetup {
  double eps;
  lp::WorkingBasis basis;
};

LpSetup lp_setup(const Config& cfg, double p, const std::string& default_eps) {
  const double eps = parse_real(cfg.eps.empty() ? default_eps : cfg.eps);
  if (!(p >= 1.0) || !std::isfinite(p)) throw UsageError("--p must satisfy 1 ≤ p < ∞");
  std::size_t M = 0;
  try {
    M = cfg.M ? *cfg.M : lp::choose_M(p, eps);
    lp::WorkingBasis basis(p, M);
    if (cfg.n_given) {
      const double r = basis.r();
      if (eps < std::pow(static_cast<double>(cfg.n), -1.0 / r))
        throw UsageError("large-scale regime needs ε ≥ n^{-1/r}");
      if (M > cfg.n) throw UsageError("large-scale family needs M ≤ n");
    }
    return {eps, basis};
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

double bound(double H, double Pe) { return ((1.0 - Pe) * H - 1.0) / 2.0; }

// --- sgp --------------------------------------------------------------------

Report cmd_sgp(const Config& cfg) {
  const std::size_t M = cfg.M.value_or(32);
  if (M < 1) throw UsageError("--M must be ≥ 1");
  if (!(cfg.pe >= 0.0 && cfg.pe < 1.0)) throw UsageError("--pe must lie in [0, 1)");
  std::vector<sgp::Strategy> strategies;
  if (cfg.algo.empty() || cfg.algo == "all")
    strategies = sgp::all_strategies();
  else
    try {
      strategies = {sgp::parse_strategy(cfg.algo)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  Report r;
  json results = json::array();
  std::string csv;
  bool header = true;
  for (auto s : strategies) {
    const auto e = sgp::estimate_queries(s, M, cfg.trials, cfg.seed, cfg.pe, cfg.jobs);
    auto j = sgp::summary_json(e);
    const bool ok = e.mean >= e.bound() - 3.0 * e.stderr_;
    j["check_pass"] = ok;
    r.pass = r.pass && ok;
    results.push_back(j);
    csv += sgp::trials_csv(e, header);
    header = false;
  }
  r.body = cfg.format == "json" ? json{{"command", "sgp"}, {"results", results}}.dump(2) + "\n" : csv;
  return r;
}

// --- optimize ---------------------------------------------------------------

struct Summary {
  double mean = 0.0;
  double stderr_ = 0.0;
  double success_rate = 0.0;
};

Summary summarize(const std::vector<opt::RunRow>& rows) {
  std::vector<std::size_t> T;
  std::size_t ok = 0;
  for (const auto& row : rows) {
    T.push_back(row.result.queries_used);
    ok += row.result.success ? 1 : 0;
  }
  const auto e = info::summarize(T);
  return {e.mean, e.stderr_, rows.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(rows.size())};
}

opt::RunResult run_box_algo(const std::string& algo, const box::BoxInstance& inst, const Dyadic& eps,
                            std::optional<std::size_t> budget, std::uint64_t seed) {
  const std::size_t n = inst.n;
  const std::size_t M = inst.M;
  auto em = emulated_oracle(box::emulation(n, M), sgp::oracle_for(inst.concatenated()));
  const Dyadic target = f1d::minimum_value(M) + eps;
  opt::Judge judge = [&](const std::vector<double>& x) {
    box::Point q;
    for (double v : x) q.push_back(Dyadic::from_double(v));
    return box::eval_box(inst, q) < target;
  };
  opt::RunResult res;
  const std::size_t H = n * M;
  if (algo == "tailored") {
    res = opt::tailored_box_learner(em.as_oracle(), n, M, judge);
  } else if (algo == "subgradient") {
    opt::SubgradientOptions o;
    o.steps = budget.value_or(1000 * H);
    res = opt::projected_subgradient(opt::adapt_box(em.as_oracle()), opt::Domain::box(n), o, judge);
  } else if (algo == "random") {
    res = opt::random_search(opt::adapt_box(em.as_oracle()), opt::Domain::box(n), budget.value_or(1000 * H), seed, judge);
  } else {
    throw UsageError("unknown --algo '" + algo + "' (tailored|subgradient|random)");
  }
  if (em.outer_queries() != em.inner_queries() || em.outer_queries() != res.queries_used)
    throw QueryCountMismatch("optimize: query counts diverged");
  return res;
}

opt::RunResult run_lp_algo(const std::string& algo, const lp::LpInstance& inst, double eps,
                           std::optional<std::size_t> budget, std::uint64_t seed) {
  const auto& basis = inst.basis;
  auto em = emulated_oracle(lp::emulation(basis), sgp::oracle_for(inst.bits()));
  const double target = lp::witness_value(basis) + eps;
  opt::Judge judge = [&](const std::vector<double>& x) { return lp::eval_lp(inst, x) < target; };
  opt::RunResult res;
  if (algo == "tailored") {
    res = opt::tailored_lp_learner(em.as_oracle(), basis, judge);
  } else if (algo == "subgradient") {
    opt::SubgradientOptions o;
    o.steps = budget.value_or(50 * basis.M);
    res = opt::projected_subgradient(opt::adapt_lp(em.as_oracle(), basis), opt::Domain::lp_ball(basis.M, basis.p), o,
                                     judge);
  } else if (algo == "random") {
    res = opt::random_search(opt::adapt_lp(em.as_oracle(), basis), opt::Domain::lp_ball(basis.M, basis.p),
                             budget.value_or(50 * basis.M), seed, judge);
  } else {
    throw UsageError("unknown --algo '" + algo + "' (tailored|subgradient|random)");
  }
  if (em.outer_queries() != em.inner_queries() || em.outer_queries() != res.queries_used)
    throw QueryCountMismatch("optimize: query counts diverged");
  return res;
}

struct CellResult {
  std::vector<opt::RunRow> rows;
  std::size_t M = 0;
  std::size_t H = 0;
};

CellResult run_cell(const Config& cfg, const std::string& family, const std::string& algo, std::size_t n, double p,
                    const std::string& eps_text) {
  Config c = cfg;
  c.eps = eps_text;
  c.n = n;
  CellResult cell;
  cell.rows.resize(cfg.trials);
  if (family == "box") {
    const auto setup = box_setup(c, "2^-9");
    cell.M = setup.M;
    cell.H = n * setup.M;
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
      Rng rng(cfg.seed, i);
      const auto inst = box::BoxInstance::from_concatenated(random_string(n * setup.M, rng), n, setup.M);
      auto res = run_box_algo(algo, inst, setup.eps, cfg.budget, rng.next());
      cell.rows[i] = opt::RunRow{algo, family, n, setup.M, INFINITY, setup.eps.to_double(), cfg.seed, std::move(res)};
    });
  } else if (family == "lp") {
    const auto setup = lp_setup(c, p, "1/16");
    cell.M = setup.basis.M;
    cell.H = setup.basis.M;
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
      Rng rng(cfg.seed, i);
      const auto inst = lp::LpInstance::from_bits(setup.basis, random_string(setup.basis.M, rng));
      auto res = run_lp_algo(algo, inst, setup.eps, cfg.budget, rng.next());
      cell.rows[i] = opt::RunRow{algo, family, setup.basis.M, setup.basis.M, p, setup.eps, cfg.seed, std::move(res)};
    });
  } else {
    throw UsageError("optimize/scaling: --family must be box or lp");
  }
  return cell;
}

json summary_json(const CellResult& cell, const Config& cfg, const std::string& family, const std::string& algo,
                  std::size_t n, double p, const std::string& eps_text, bool& pass) {
  const auto s = summarize(cell.rows);
  const double b = bound(static_cast<double>(cell.H), cfg.pe);
  const bool ok = s.mean >= b - 3.0 * s.stderr_;
  pass = pass && ok;
  return {{"family", family},  {"algo", algo},          {"n", n},
          {"p", family == "box" ? json("inf") : json(p)}, {"eps", eps_text}, {"M", cell.M},
          {"H", cell.H},        {"trials", cfg.trials},  {"mean_T", s.mean},
          {"stderr", s.stderr_}, {"success_rate", s.success_rate}, {"bound", b},
          {"check_pass", ok}};
}

Report cmd_optimize(const Config& cfg) {
  const std::string family = cfg.family.empty() ? "box" : cfg.family;
  const std::string algo = cfg.algo.empty() ? "tailored" : cfg.algo;
  const std::string eps = cfg.eps.empty() ? (family == "box" ? "2^-9" : "1/16") : cfg.eps;
  const auto cell = run_cell(cfg, family, algo, cfg.n, cfg.p, eps);
  Report r;
  const auto summary = summary_json(cell, cfg, family, algo, family == "box" ? cfg.n : cell.M, cfg.p, eps, r.pass);
  if (cfg.format == "json") {
    json runs = json::array();
    for (const auto& row : cell.rows)
      runs.push_back({{"queries_used", row.result.queries_used},
                      {"success", row.result.success},
                      {"identified", row.result.identified ? row.result.identified->str() : ""}});
    r.body = json{{"command", "optimize"}, {"summary", summary}, {"runs", runs}}.dump(2) + "\n";
  } else {
    r.body = opt::csv_header();
    for (const auto& row : cell.rows) r.body += opt::csv_row(row);
  }
  return r;
}

// --- scaling ----------------------------------------------------------------

Report cmd_scaling(const Config& cfg) {
  const std::string family = cfg.family.empty() ? "box" : cfg.family;
  const std::string algo = cfg.algo.empty() ? "tailored" : cfg.algo;
  std::vector<std::string> epss = cfg.epss;
  if (family == "lp" && !cfg.epss_given) epss = {"1/4", "1/8", "1/16"};
  const std::vector<std::size_t> ns = family == "box" ? cfg.ns : std::vector<std::size_t>{0};
  Report r;
  json rows = json::array();
  std::ostringstream csv;
  csv << "family,algo,n,p,eps,M,H,trials,mean_T,stderr,bound,check_pass\n";
  std::vector<std::pair<double, double>> fit;  // (regressor, mean T)
  for (std::size_t n : ns) {
    for (const auto& eps : epss) {
      const auto cell = run_cell(cfg, family, algo, n == 0 ? 1 : n, cfg.p, eps);
      const std::size_t shown_n = family == "box" ? n : cell.M;
      auto j = summary_json(cell, cfg, family, algo, shown_n, cfg.p, eps, r.pass);
      const double e = parse_real(eps);
      const double z = family == "box" ? static_cast<double>(n) * std::log2(1.0 / e)
                                       : std::pow(1.0 / e, cfg.p < 2.0 ? 2.0 : cfg.p);
      fit.emplace_back(z, j["mean_T"].get<double>());
      csv << family << ',' << algo << ',' << shown_n << ',' << (family == "box" ? "inf" : num(cfg.p)) << ',' << eps
          << ',' << cell.M << ',' << cell.H << ',' << cfg.trials << ',' << num(j["mean_T"].get<double>()) << ','
          << num(j["stderr"].get<double>()) << ',' << num(j["bound"].get<double>()) << ','
          << (j["check_pass"].get<bool>() ? 1 : 0) << '\n';
      rows.push_back(j);
    }
  }
  double zz = 0.0;
  double zt = 0.0;
  for (const auto& [z, t] : fit) {
    zz += z * z;
    zt += z * t;
  }
  const double a = zz > 0.0 ? zt / zz : 0.0;
  double worst = 0.0;
  for (const auto& [z, t] : fit) worst = std::max(worst, std::abs(t - a * z) / t);
  if (cfg.format == "json")
    r.body = json{{"command", "scaling"},
                  {"rows", rows},
                  {"fit", {{"model", family == "box" ? "a*n*log2(1/eps)" : "a/eps^r"}, {"a", a}, {"max_rel_residual", worst}}}}
                 .dump(2) +
             "\n";
  else
    r.body = csv.str();
  return r;
}

// --- audit ------------------------------------------------------------------

Report audit_sgp(const Config& cfg) {
  const std::size_t M = cfg.M.value_or(10);
  sgp::Strategy s = sgp::Strategy::GuessFull;
  if (!cfg.algo.empty()) try {
      s = sgp::parse_strategy(cfg.algo);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  std::vector<info::InfoLedger> ledgers(cfg.trials);
  std::vector<std::size_t> T(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    const auto S = random_string(M, rng);
    const auto run = sgp::run_strategy(s, S, rng);
    ledgers[i] = info::audit_run(run.transcript, run.posteriors, 0.0);
    T[i] = run.T;
  });
  Report r;
  std::ostringstream csv;
  csv << "trial,t,H_before,H_after,K,expected_K,tail_excess\n";
  std::size_t violations = 0;
  std::size_t steps = 0;
  double max_e = 0.0;
  double max_excess = -1.0;
  for (std::size_t i = 0; i < ledgers.size(); ++i) {
    violations += ledgers[i].violations;
    for (const auto& rec : ledgers[i].records) {
      ++steps;
      max_e = std::max(max_e, rec.expected_K);
      max_excess = std::max(max_excess, rec.tail_excess);
      csv << i << ',' << rec.t << ',' << rec.H_before << ',' << rec.H_after << ',' << rec.K << ','
          << num(rec.expected_K) << ',' << num(rec.tail_excess) << '\n';
    }
  }
  if (!cfg.events.empty()) {
    std::ofstream f(cfg.events, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open events file '" + cfg.events + "'");
    for (std::size_t i = 0; i < ledgers.size(); ++i)
      for (const auto& rec : ledgers[i].records)
        f << json{{"trial", i},          {"t", rec.t},
                  {"H_before", rec.H_before}, {"H_after", rec.H_after},
                  {"K", rec.K},          {"expected_K", rec.expected_K},
                  {"tail_excess", rec.tail_excess}, {"violation", rec.violation}}
                 .dump()
          << '\n';
  }
  const auto est = info::summarize(T);
  bool tail_ok = true;
  for (std::size_t t = 0; t < est.tail.size(); ++t)
    tail_ok = tail_ok && est.tail[t] <= info::tail_bound(static_cast<double>(M), 0.0, static_cast<double>(M), 2.0,
                                                         static_cast<double>(t)) +
                                            3.0 * std::sqrt(est.tail[t] * (1.0 - est.tail[t]) / static_cast<double>(T.size())) + 1e-12;
  json j = {{"command", "audit"},      {"family", "sgp"},        {"strategy", sgp::to_string(s)},
            {"M", M},                  {"trials", cfg.trials},   {"steps", steps},
            {"violations", violations}, {"max_expected_K", max_e}, {"max_tail_excess", max_excess},
            {"mean_T", est.mean},      {"stderr", est.stderr_},
            {"fano_bound", info::fano_expectation_bound(static_cast<double>(M), 0.0, static_cast<double>(M), 2.0)},
            {"tail_check_pass", tail_ok}};
  bool split_ok = true;
  if (s != sgp::Strategy::RandomGuess && M <= 12) {
    const auto split = info::split_identity(s, M);
    split_ok = std::abs(split.residual) <= 1e-9 && split.max_step_gap <= 1e-9;
    j["split_identity"] = {{"H_F", split.H_F},
                           {"H_F_given_Pi", split.H_F_given_Pi},
                           {"sum_weighted_K", split.sum_weighted_K},
                           {"residual", split.residual},
                           {"max_step_gap", split.max_step_gap},
                           {"pass", split_ok}};
  }
  r.pass = violations == 0 && tail_ok && split_ok;
  j["pass"] = r.pass;
  r.body = cfg.format == "json" ? j.dump(2) + "\n" : csv.str();
  return r;
}

void write_events(const std::string& path, const std::vector<perturbed::AuditReport>& reports) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open events file '" + path + "'");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::ostringstream os;
    reports[i].write_jsonl(os);
    std::istringstream lines(os.str());
    for (std::string line; std::getline(lines, line);) {
      auto j = json::parse(line);
      j["trial"] = i;
      f << j.dump() << '\n';
    }
  }
}

Report audit_reports(const Config& cfg, const std::string& family, const std::vector<perturbed::AuditReport>& reports,
                     bool control_detected, json params) {
  std::size_t violations = 0, multi = 0, near = 0, outside = 0, steps = 0;
  std::ostringstream csv;
  csv << "trial,steps,violations,multi_new_steps,outside_active,near_ties\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& a = reports[i];
    violations += a.violations;
    multi += a.multi_new_steps;
    near += a.near_ties;
    outside += a.outside_active;
    steps += a.steps;
    csv << i << ',' << a.steps << ',' << a.violations << ',' << a.multi_new_steps << ',' << a.outside_active << ','
        << a.near_ties << '\n';
  }
  write_events(cfg.events, reports);
  Report r;
  r.pass = violations == 0 && multi == 0 && control_detected;
  json j = {{"command", "audit"},
            {"family", family},
            {"params", std::move(params)},
            {"trajectories", reports.size()},
            {"steps", steps},
            {"violations", violations},
            {"multi_new_steps", multi},
            {"outside_active", outside},
            {"near_ties", near},
            {"control_detected", control_detected},
            {"pass", r.pass}};
  r.body = cfg.format == "json" ? j.dump(2) + "\n" : csv.str();
  return r;
}

Report audit_perturbed_lp(const Config& cfg) {
  const auto setup = lp_setup(cfg, cfg.p, "1/4");
  if (setup.basis.M < 2) throw UsageError("perturbed-lp audit needs M ≥ 2");
  std::vector<perturbed::AuditReport> reports(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    const auto base = lp::LpInstance::from_bits(setup.basis, random_string(setup.basis.M, rng));
    const auto inst = perturbed::random_perturbed_lp(base, setup.eps, perturbed::kDefaultK, rng);
    const auto traj = perturbed::sample_lp_trajectory(setup.basis, cfg.steps, rng);
    reports[i] = perturbed::unpredictability_audit_lp(traj, inst);
  });
  perturbed::PerturbedLpInstance control{lp::LpInstance{setup.basis, std::vector<int>(setup.basis.M, 1)},
                                         std::vector<double>(setup.basis.M, 0.0), setup.eps, perturbed::kDefaultK, 0};
  const bool detected = !perturbed::unpredictability_audit_lp({lp::Vec(setup.basis.M, 0.0)}, control).pass;
  return audit_reports(cfg, "perturbed-lp", reports, detected,
                       {{"p", setup.basis.p}, {"eps", setup.eps}, {"M", setup.basis.M}, {"K", perturbed::kDefaultK},
                        {"steps", cfg.steps}, {"seed", cfg.seed}});
}

Report audit_perturbed_box(const Config& cfg) {
  const double eps = parse_real(cfg.eps.empty() ? "1e-6" : cfg.eps);
  perturbed::PerturbedBoxParams params;
  try {
    params = cfg.M ? perturbed::PerturbedBoxParams::with_depth(eps, *cfg.M) : perturbed::PerturbedBoxParams::from_eps(eps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.n < 2) throw UsageError("perturbed-box audit needs n ≥ 2");
  std::vector<perturbed::AuditReport> reports(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    const auto inst = perturbed::random_perturbed_box(cfg.n, params, rng);
    const auto traj = perturbed::sample_box_trajectory(inst, cfg.steps, rng);
    reports[i] = perturbed::unpredictability_audit_box(traj, inst);
  });
  Rng rng(cfg.seed, cfg.trials);
  auto control = perturbed::random_perturbed_box(cfg.n, params, rng);
  for (std::size_t i = 1; i < cfg.n; ++i) {
    control.strings[i] = control.strings[0];
    control.delta[i] = control.delta[0];
  }
  const auto I = perturbed::interval_d(control.strings[0].prefix(1));
  const std::vector<double> x(cfg.n, (I.lo + I.hi) / 2.0);
  const bool detected = !perturbed::unpredictability_audit_box({x}, control).pass;
  return audit_reports(cfg, "perturbed-box", reports, detected,
                       {{"n", cfg.n}, {"eps", eps}, {"M", params.M}, {"alpha", params.alpha},
                        {"delta_bar", params.delta_bar}, {"K", params.K}, {"steps", cfg.steps}, {"seed", cfg.seed}});
}

Report cmd_audit(const Config& cfg) {
  const std::string family = cfg.family.empty() ? "sgp" : cfg.family;
  if (family == "sgp") return audit_sgp(cfg);
  if (family == "perturbed-lp") return audit_perturbed_lp(cfg);
  if (family == "perturbed-box") return audit_perturbed_box(cfg);
  throw UsageError("audit: --family must be sgp, perturbed-lp or perturbed-box");
}

// --- packing ----------------------------------------------------------------

Report cmd_packing(const Config& cfg) {
  const std::string family = cfg.family.empty() ? "box" : cfg.family;
  Report r;
  json j;
  if (family == "box") {
    const auto setup = box_setup(cfg, "2^-9");
    if (cfg.n * setup.M > 16) throw UsageError("packing: nM must be ≤ 16");
    const auto rep = box::packing_check_box(cfg.n, setup.M, setup.eps);
    r.pass = rep.pass;
    j = {{"family", "box"},        {"n", cfg.n}, {"M", setup.M},        {"eps", setup.eps.str()},
         {"instances", rep.instances}, {"pairs", rep.pairs}, {"pass", rep.pass}};
    if (rep.witness) j["witness"] = {rep.witness->first, rep.witness->second};
  } else if (family == "lp") {
    const auto setup = lp_setup(cfg, cfg.p, "1/4");
    const std::size_t M = setup.basis.M;
    if (M > 16) throw UsageError("packing: lp enumeration needs M ≤ 16");
    std::size_t checked = 0;
    std::size_t failures = 0;
    const auto strings = all_strings(M);
    Rng rng(cfg.seed);
    const double mag = -lp::witness_value(setup.basis);
    for (const auto& s : strings) {
      const auto inst = lp::LpInstance::from_bits(setup.basis, s);
      for (std::size_t k = 0; k < std::max<std::size_t>(1, cfg.steps); ++k) {
        lp::Vec c(M);
        for (std::size_t i = 0; i < M; ++i)
          c[i] = -inst.signs[i] * mag * (1.0 - setup.eps / 4.0) * (1.0 - rng.uniform(0.0, setup.eps / 4.0));
        const auto x = setup.basis.from_working(c);
        ++checked;
        try {
          if (lp::identify_from_eps_min(inst, x, setup.eps) != inst.signs) ++failures;
        } catch (const std::exception&) {
          ++failures;
        }
      }
    }
    r.pass = failures == 0;
    j = {{"family", "lp"},  {"p", setup.basis.p}, {"M", M},          {"eps", setup.eps},
         {"instances", strings.size()}, {"samples", checked}, {"failures", failures}, {"pass", r.pass}};
  } else {
    throw UsageError("packing: --family must be box or lp");
  }
  j["command"] = "packing";
  if (cfg.format == "json") {
    r.body = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << (r.pass ? "pass" : "fail") << ", " << j["instances"].get<std::size_t>() << " instances";
    if (j.contains("pairs")) os << ", " << j["pairs"].get<std::size_t>() << " disjoint pairs";
    if (j.contains("samples")) os << ", " << j["samples"].get<std::size_t>() << " ε-minima identified";
    r.body = os.str() + "\n";
  }
  return r;
}

// --- emulation-check --------------------------------------------------------

Dyadic random_dyadic(Rng& rng, int max_k) {
  const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_k))) + 1;
  const auto span = std::uint64_t{1} << k;
  return Dyadic(Dyadic::Int(rng.below(2 * span + 1)) - Dyadic::Int(span), -k);
}

struct EmuStats {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::size_t count_failures = 0;
};

EmuStats check_box_case(const box::BoxInstance& inst, const box::Point& x) {
  EmuStats s;
  auto em = emulated_oracle(box::emulation(inst.n, inst.M), sgp::oracle_for(inst.concatenated()));
  const auto a = em(x);
  s.cases = 1;
  if (!(a == box::reference_oracle(inst, x))) s.mismatches = 1;
  if (em.outer_queries() != 1 || em.inner_queries() != 1) s.count_failures = 1;
  return s;
}

void add(EmuStats& a, const EmuStats& b) {
  a.cases += b.cases;
  a.mismatches += b.mismatches;
  a.count_failures += b.count_failures;
}

Report cmd_emulation_check(const Config& cfg) {
  const std::string family = cfg.family.empty() ? "box" : cfg.family;
  json suites = json::array();
  std::ostringstream csv;
  csv << "family,suite,p,cases,mismatches,count_failures\n";
  Report r;
  auto record = [&](const std::string& suite, const std::string& p, const EmuStats& s) {
    const bool ok = s.mismatches == 0 && s.count_failures == 0;
    r.pass = r.pass && ok;
    suites.push_back({{"family", family},
                      {"suite", suite},
                      {"p", p},
                      {"cases", s.cases},
                      {"mismatches", s.mismatches},
                      {"count_failures", s.count_failures},
                      {"pass", ok}});
    csv << family << ',' << suite << ',' << p << ',' << s.cases << ',' << s.mismatches << ',' << s.count_failures << '\n';
  };
  if (family == "box" || family == "1d") {
    std::vector<EmuStats> per(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
      Rng rng(cfg.seed, i);
      const std::size_t n = family == "1d" ? 1 : (cfg.n_given ? cfg.n : 1 + rng.below(3));
      const std::size_t M = cfg.M ? *cfg.M : 1 + rng.below(4);
      const auto inst = box::BoxInstance::from_concatenated(random_string(n * M, rng), n, M);
      box::Point x;
      for (std::size_t c = 0; c < n; ++c) x.push_back(random_dyadic(rng, static_cast<int>(3 * M + 2)));
      per[i] = check_box_case(inst, x);
      if (family == "1d") {
        const auto s = f1d::query_string(x[0], M);
        const auto e = f1d::emulate_first_order(x[0], sgp::answer(inst.strings[0], f1d::sgp_query(x[0], M)), s);
        if (!(e.answer == f1d::reference_oracle(inst.strings[0], x[0]))) per[i].mismatches = 1;
      }
    });
    EmuStats total;
    for (const auto& s : per) add(total, s);
    record("random", "inf", total);
    if (family == "box") {
      EmuStats grid;
      const auto instances = box::all_instances(2, 2);
      for (int a = -32; a <= 32; ++a)
        for (int b = -32; b <= 32; ++b) {
          const box::Point x{Dyadic(a).scaled(-5), Dyadic(b).scaled(-5)};
          for (const auto& inst : instances) add(grid, check_box_case(inst, x));
        }
      record("grid-n2-M2", "inf", grid);
    }
  } else if (family == "lp") {
    const std::vector<double> ps = cfg.p_given ? std::vector<double>{cfg.p} : std::vector<double>{1.0, 1.5, 2.0, 3.0};
    for (double p : ps) {
      std::vector<EmuStats> per(cfg.trials);
      parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
        Rng rng(cfg.seed, i);
        const std::size_t M = cfg.M ? *cfg.M : (p < 2.0 ? std::size_t{1} << rng.below(5) : 1 + rng.below(16));
        const lp::WorkingBasis basis(p, M);
        const auto inst = lp::LpInstance::from_bits(basis, random_string(M, rng));
        lp::Vec x(M);
        if (rng.bit()) {
          lp::Vec c(M);
          for (auto& v : c) v = 0.05 * (static_cast<double>(rng.below(5)) - 2.0);
          x = basis.from_working(c);
        } else {
          for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        }
        const double norm = lp::lp_norm(x, p);
        if (norm > 1.0)
          for (auto& v : x) v /= norm * (1.0 + 1e-9);
        auto em = emulated_oracle(lp::emulation(basis), sgp::oracle_for(inst.bits()));
        const auto a = em(x);
        const auto ref = lp::reference_oracle(inst, x);
        per[i].cases = 1;
        if (!(a.axis == ref.axis && a.slope == ref.slope && std::abs(a.value - ref.value) <= 1e-12)) per[i].mismatches = 1;
        if (em.outer_queries() != 1 || em.inner_queries() != 1) per[i].count_failures = 1;
      });
      EmuStats total;
      for (const auto& s : per) add(total, s);
      record("random", num(p), total);
    }
  } else {
    throw UsageError("emulation-check: --family must be box, lp or 1d");
  }
  r.body = cfg.format == "json" ? json{{"command", "emulation-check"}, {"suites", suites}, {"pass", r.pass}}.dump(2) + "\n"
                                : csv.str();
  return r;
}

void apply_config_file(const std::string& path, CLI::App& sub, Config& cfg) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read --config file '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError("invalid --config JSON: " + std::string(e.what()));
  }
  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  try {
    for (const auto& [key, value] : j.items()) {
      const std::string flag = "--" + key;
      if (key == "config") continue;
      CLI::Option* opt = nullptr;
      try {
        opt = sub.get_option(flag);
      } catch (const CLI::OptionNotFound&) {
        throw UsageError("unknown key '" + key + "' in --config file");
      }
      if (opt->count() > 0) continue;  // flags win
      if (key == "family") cfg.family = value.get<std::string>();
      else if (key == "n") cfg.n = value.get<std::size_t>(), cfg.n_given = true;
      else if (key == "p") cfg.p = value.get<double>(), cfg.p_given = true;
      else if (key == "eps") cfg.eps = value.is_string() ? value.get<std::string>() : num(value.get<double>());
      else if (key == "M") cfg.M = value.get<std::size_t>();
      else if (key == "algo") cfg.algo = value.get<std::string>();
      else if (key == "trials") cfg.trials = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "pe") cfg.pe = value.get<double>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "format") cfg.format = value.get<std::string>();
      else if (key == "jobs") cfg.jobs = value.get<unsigned>();
      else if (key == "ns") cfg.ns = value.get<std::vector<std::size_t>>();
      else if (key == "epss") cfg.epss = value.get<std::vector<std::string>>(), cfg.epss_given = true;
      else if (key == "budget") cfg.budget = value.get<std::size_t>();
      else if (key == "steps") cfg.steps = value.get<std::size_t>();
      else if (key == "events") cfg.events = value.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw UsageError("bad value in --config file: " + std::string(e.what()));
  }
  (void)given;
}

}  // namespace

double parse_real(const std::string& text) {
  try {
    return Dyadic::parse(text).to_double();
  } catch (const std::invalid_argument&) {
  }
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("");
      const std::string rest = text.substr(slash + 1);
      const double b = std::stod(rest, &used);
      if (used != rest.size() || b == 0.0) throw std::invalid_argument("");
      return a / b;
    }
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse number '" + text + "'");
  }
}

int run(const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
    if (cfg.trials < 1) throw UsageError("--trials must be ≥ 1");
    if (cfg.jobs < 1) throw UsageError("--jobs must be ≥ 1");
    Report r;
    if (cfg.command == "sgp") r = cmd_sgp(cfg);
    else if (cfg.command == "optimize") r = cmd_optimize(cfg);
    else if (cfg.command == "audit") r = cmd_audit(cfg);
    else if (cfg.command == "packing") r = cmd_packing(cfg);
    else if (cfg.command == "emulation-check") r = cmd_emulation_check(cfg);
    else if (cfg.command == "scaling") r = cmd_scaling(cfg);
    else throw UsageError("unknown subcommand '" + cfg.command + "'");
    if (cfg.out.empty()) {
      out << r.body;
    } else {
      std::ofstream f(cfg.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open --out file '" + cfg.out + "'");
      f << r.body;
    }
    if (!r.pass) err << "lab " << cfg.command << ": check failed\n";
    return r.pass ? kOk : kCheckFailed;
  } catch (const UsageError& e) {
    err << "lab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "lab: " << e.what() << '\n';
    return kCheckFailed;
  }
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oracle-complexity lower-bound laboratory"};
  app.require_subcommand(1);
  Config cfg;
  std::string config_path;
  std::optional<std::size_t> M;
  std::optional<std::size_t> budget;
  const char* names[] = {"sgp", "optimize", "audit", "packing", "emulation-check", "scaling"};
  const char* help[] = {"String Guessing strategy statistics", "run an algorithm on a hard family",
                        "information ledgers and unpredictability audits", "exhaustive packing verification",
                        "emulated vs reference oracle equivalence", "query counts over (n, eps) grids"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--family", cfg.family, "sgp|box|lp|1d|perturbed-lp|perturbed-box");
    sub->add_option("--n", cfg.n, "dimension (box) or ambient dimension (lp)");
    sub->add_option("--p", cfg.p, "L^p exponent, 1 ≤ p < ∞");
    sub->add_option("--eps", cfg.eps, "accuracy, e.g. 2^-9, 1/16, 0.001953125");
    sub->add_option("--M", M, "depth / string length override");
    sub->add_option("--algo", cfg.algo, "strategy or algorithm");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--pe", cfg.pe, "error probability for bounded-error mode");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "csv|json");
    sub->add_option("--jobs", cfg.jobs, "worker threads");
    sub->add_option("--ns", cfg.ns, "grid of n values (scaling)")->delimiter(',');
    sub->add_option("--epss", cfg.epss, "grid of eps values (scaling)")->delimiter(',');
    sub->add_option("--budget", budget, "query budget for generic algorithms");
    sub->add_option("--steps", cfg.steps, "queries per audited trajectory / samples per instance");
    sub->add_option("--events", cfg.events, "JSONL file for per-step audit events");
    sub->add_option("--config", config_path, "JSON file with defaults; flags win");
    subs.push_back(sub);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "lab: " << e.what() << '\n';
    return kUsage;
  }
  CLI::App* chosen = nullptr;
  for (auto* s : subs)
    if (s->parsed()) chosen = s;
  cfg.command = chosen->get_name();
  cfg.M = M;
  cfg.budget = budget;
  cfg.p_given = chosen->get_option("--p")->count() > 0;
  cfg.n_given = chosen->get_option("--n")->count() > 0;
  cfg.epss_given = chosen->get_option("--epss")->count() > 0;
  if (!config_path.empty()) {
    try {
      apply_config_file(config_path, *chosen, cfg);
    } catch (const UsageError& e) {
      err << "lab: " << e.what() << '\n';
      return kUsage;
    }
  }
  return run(cfg, out, err);
}

}  // namespace olb::lab
