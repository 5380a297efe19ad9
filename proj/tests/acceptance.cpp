// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "evtl/cli.hpp"
#include "evtl/error.hpp"
#include "evtl/models.hpp"
#include "evtl/robustness.hpp"
#include "evtl/stats.hpp"
#include "evtl/wasserstein.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

using namespace evtl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = seconds_since(start);
  if (limit_s > 0 && t > limit_s) {
    o.pass = false;
    o.detail += fmt::format("; over the {:.0f} s budget", limit_s);
  }
  if (!o.pass) ++failures;
  std::cout << fmt::format("{} criterion {}: {} [{}] ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, t)
            << std::flush;
}

SpaceRef line() { return chain_space(); }

DataState x_state(const SpaceRef& space, double x) { return make_data_state(space, std::vector<double>{x}); }

SampleSet samples(const SpaceRef& space, const std::vector<double>& xs) {
  SampleSet out(space);
  for (double x : xs) out.push_back(x_state(space, x).view());
  return out;
}

// ---------------------------------------------------------------------------

Outcome estimator_oracle_identity() {
  auto space = line();
  auto rho = identity_penalty("rho", "x");
  Engine rng(20240601);
  std::uniform_int_distribution<int> size(1, 64), ells(1, 4), coarse(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = size(rng), ell = ells(rng);
    // Half the pairs draw from a coarse grid so ties are common.
    const bool grid = coarse(rng) == 1;
    auto draw = [&] { return grid ? std::round(u(rng) * 8) / 8 : u(rng); };
    std::vector<double> a(n), b(n * ell);
    for (auto& x : a) x = draw();
    for (auto& x : b) x = draw();
    const double est = compute_wass(samples(space, a), samples(space, b), rho);
    const double exact = exact_wass_1d(DiscreteDist::uniform(a), DiscreteDist::uniform(b));
    worst = std::max(worst, std::abs(est - exact));
  }
  return {worst <= 1e-12, fmt::format("max |compute_wass - exact| = {:.3g} over 1000 pairs", worst)};
}

Outcome analytic_convergence() {
  // Quantiles 0.5r and 0.2 + 0.5r: the one-sided integral is evaluated by the
  // midpoint rule, exact for this affine integrand.
  double oracle = 0.0;
  const int cells = 1000;
  for (int c = 0; c < cells; ++c) {
    const double r = (c + 0.5) / cells;
    oracle += std::max((0.2 + 0.5 * r) - 0.5 * r, 0.0) / cells;
  }
  auto space = line();
  auto rho = identity_penalty("rho", "x");
  Engine rng(7);
  std::uniform_real_distribution<double> mu(0.0, 0.5), nu(0.2, 0.7);
  const std::size_t n = 100000;
  SampleSet e1(space), e2(space);
  for (std::size_t j = 0; j < n; ++j) e1.push_back(x_state(space, mu(rng)).view());
  for (std::size_t j = 0; j < n; ++j) e2.push_back(x_state(space, nu(rng)).view());
  const double est = compute_wass(e1, e2, rho);
  const double err = std::abs(est - oracle);
  return {std::abs(oracle - 0.2) < 1e-12 && err < 0.01,
          fmt::format("oracle {:.6f}, estimate {:.6f}, error {:.4g}", oracle, est, err)};
}

struct NamedFormula {
  std::string name;
  FormulaPtr phi;
};

std::vector<NamedFormula> chain_formulas(const SpaceRef& space, const PenaltySpec& rho) {
  auto pt = [&](double x) { return DistributionSpec::point(x_state(space, x)); };
  return {
      {"atom", target(pt(0.25), rho, 0.6)},
      {"eventually", eventually(0, 4, target(pt(0.5), rho, 0.4))},
      {"always-hazard", always(1, 3, negate(hazard(pt(1.0), rho, 0.2)))},
      {"nested-until", until(target(pt(0.25), rho, 0.7), 1, 3, always(0, 2, negate(hazard(pt(1.0), rho, 0.2))))},
  };
}

Outcome statistical_convergence() {
  auto space = line();
  auto rho = identity_penalty("rho", "x");
  const auto lambda = DiscountSpec::constant();
  const std::size_t ell = 2;
  const std::vector<std::size_t> ns{100, 1000, 10000};
  double worst_final = 0.0;
  int inversions = 0;
  std::string trace;
  for (const auto& f : chain_fixtures(space)) {
    ChainKernel kernel(f.chain);
    std::vector<double> mean_err(ns.size(), 0.0);
    const auto formulas = chain_formulas(space, rho);
    for (const auto& nf : formulas) {
      const double exact = exact_robustness(f.chain, *nf.phi, lambda).robust();
      for (std::size_t k = 0; k < ns.size(); ++k) {
        const auto stat =
            sat(kernel, f.chain.initial_state(), *nf.phi, ell, ns[k], lambda, RandomnessPlan(1000 + k)).robust();
        const double err = std::abs(stat - exact);
        mean_err[k] += err / static_cast<double>(formulas.size());
        if (k + 1 == ns.size()) worst_final = std::max(worst_final, err);
      }
    }
    for (std::size_t k = 1; k < ns.size(); ++k) {
      if (mean_err[k] > mean_err[k - 1]) ++inversions;
    }
    trace += fmt::format("{}: {:.4f}/{:.4f}/{:.4f}; ", f.name, mean_err[0], mean_err[1], mean_err[2]);
  }
  return {worst_final < 0.03 && inversions <= 1,
          fmt::format("max error at N=1e4 {:.4f}; mean error by N {}inversions {}", worst_final, trace, inversions)};
}

FiniteChain random_chain(Engine& rng, const SpaceRef& space, const std::vector<double>& xs) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows(xs.size(), std::vector<double>(xs.size()));
  for (auto& row : rows) {
    double total = 0.0;
    for (auto& p : row) total += (p = u(rng) * u(rng));
    for (auto& p : row) p /= total;
  }
  std::uniform_int_distribution<std::size_t> init(0, xs.size() - 1);
  return make_chain(space, xs, rows, init(rng));
}

// A copy of `base` with every row mixed towards a random row.
FiniteChain perturbed(Engine& rng, const FiniteChain& base, double eps) {
  const auto noise = random_chain(rng, base.space(), [&] {
    std::vector<double> xs;
    for (const auto& s : base.states()) xs.push_back(s[0]);
    return xs;
  }());
  auto rows = base.transition();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) total += (rows[i][j] = (1 - eps) * rows[i][j] + eps * noise.transition()[i][j]);
    for (auto& p : rows[i]) p /= total;
  }
  return FiniteChain(base.states(), rows, base.initial());
}

FormulaPtr random_formula(Engine& rng, const SpaceRef& space, const PenaltySpec& rho, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 7);
  std::uniform_int_distribution<int> small(0, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pt = [&] { return DistributionSpec::point(x_state(space, u(rng))); };
  switch (pick(rng)) {
  case 0: return make_true();
  case 1: return target(pt(), rho, u(rng));
  case 2: return hazard(pt(), rho, u(rng));
  case 3: return negate(random_formula(rng, space, rho, depth - 1));
  case 4: return disj(random_formula(rng, space, rho, depth - 1), random_formula(rng, space, rho, depth - 1));
  case 5: return conj(random_formula(rng, space, rho, depth - 1), random_formula(rng, space, rho, depth - 1));
  default: {
    const int a = small(rng);
    return until(random_formula(rng, space, rho, depth - 1), a, a + small(rng),
                 random_formula(rng, space, rho, depth - 1));
  }
  }
}

Outcome witness_and_transfer() {
  auto space = line();
  auto rho = identity_penalty("rho", "x");
  Engine rng(4242);

  std::vector<std::pair<FiniteChain, FiniteChain>> witness_pairs;
  auto fixtures = chain_fixtures(space);
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    for (std::size_t j = 0; j < fixtures.size(); ++j) {
      if (i != j) witness_pairs.emplace_back(fixtures[i].chain, fixtures[j].chain);
    }
  }
  std::vector<std::pair<FiniteChain, FiniteChain>> transfer_pairs;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 0; p < 5; ++p) {
    std::vector<double> xs{0.0, 1.0};
    for (int s = 0; s < 2 + p % 3; ++s) xs.push_back(std::round(u(rng) * 1000) / 1000);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    auto base = random_chain(rng, space, xs);
    transfer_pairs.emplace_back(base, perturbed(rng, base, 0.15));
  }
  witness_pairs.insert(witness_pairs.end(), transfer_pairs.begin(), transfer_pairs.end());

  double worst_gap = 0.0;
  const int horizon_cap = 10;
  const auto ot = ObservationTimes::range(0, horizon_cap);
  for (const auto& lambda : {DiscountSpec::constant(), DiscountSpec::exponential(0.9)}) {
    for (const auto& [a, b] : witness_pairs) {
      const double sym = std::max(exact_evolution_metric(a, b, rho, lambda, ot).overall,
                                  exact_evolution_metric(b, a, rho, lambda, ot).overall);
      auto [phi, tau] = exact_distinguishing_formula(a, b, rho, lambda, ot);
      const double ra = exact_robustness(a, *phi, lambda, tau).values[tau];
      const double rb = exact_robustness(b, *phi, lambda, tau).values[tau];
      worst_gap = std::max(worst_gap, std::abs(std::abs(ra - rb) - sym));
    }
  }

  int premises = 0, violations = 0;
  const auto lambda = DiscountSpec::constant();
  for (const auto& [a, b] : transfer_pairs) {
    const double m = std::max(exact_evolution_metric(a, b, rho, lambda, ot).overall,
                              exact_evolution_metric(b, a, rho, lambda, ot).overall);
    int made = 0;
    while (made < 100) {
      auto phi = random_formula(rng, space, rho, 3);
      if (horizon(*phi) > horizon_cap) continue;
      ++made;
      const double ra = exact_robustness(a, *phi, lambda).robust();
      const double rb = exact_robustness(b, *phi, lambda).robust();
      if (ra >= m) {
        ++premises;
        if (rb < 0.0) ++violations;
      }
      if (rb >= m) {
        ++premises;
        if (ra < 0.0) ++violations;
      }
    }
  }
  return {worst_gap <= 1e-9 && violations == 0 && premises > 0,
          fmt::format("witness: max | |gap| - metric | = {:.3g} over {} pairs; transfer: {} premises, {} violations",
                      worst_gap, 2 * witness_pairs.size(), premises, violations)};
}

Outcome invariant_suites() {
  const int cases = 10000;
  std::vector<std::string> broken;
  Engine rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  {
    auto space = make_space({VariableSpec::interval("x", -5, 5), VariableSpec::interval("y", 0, 3)});
    PenaltySpec rho("rho", {"x", "y"}, [](StateView s, int) { return 0.2 * s[0] * s[1]; });
    std::uniform_real_distribution<double> wide(-8, 8);
    int bad = 0;
    for (int t = 0; t < cases; ++t) {
      auto d = [&] { return make_data_state(space, {{"x", wide(rng)}, {"y", wide(rng)}}); };
      auto d1 = d(), d2 = d(), d3 = d();
      const double m12 = state_hemimetric(rho, d1, d2);
      if (state_hemimetric(rho, d1, d1) != 0.0) ++bad;
      if (!(m12 >= 0.0 && m12 <= 1.0)) ++bad;
      if (m12 > state_hemimetric(rho, d1, d3) + state_hemimetric(rho, d3, d2) + 1e-15) ++bad;
      if (!(rho(d1) >= 0.0 && rho(d1) <= 1.0)) ++bad;
      if (!(DataState(space, std::vector<double>(d1.values().begin(), d1.values().end())) == d1)) ++bad;
    }
    if (bad) broken.push_back(fmt::format("hemimetric {}", bad));
  }

  {
    auto space = line();
    auto rho = identity_penalty("rho", "x");
    std::uniform_int_distribution<int> size(1, 40), ells(1, 4);
    int bad = 0;
    for (int t = 0; t < cases; ++t) {
      const std::size_t n = size(rng), ell = ells(rng);
      std::vector<double> a(n), b(n * ell);
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = u(rng);
      const double w = compute_wass(samples(space, a), samples(space, b), rho);
      if (!(w >= 0.0 && w <= 1.0)) ++bad;
      std::shuffle(a.begin(), a.end(), rng);
      std::shuffle(b.begin(), b.end(), rng);
      if (compute_wass(samples(space, a), samples(space, b), rho) != w) ++bad;
      // Dominated second set: every nu below its matched omega quantile.
      std::sort(a.begin(), a.end());
      std::vector<double> dominated;
      for (std::size_t h = 0; h < n * ell; ++h) dominated.push_back(a[h / ell] * u(rng));
      std::shuffle(dominated.begin(), dominated.end(), rng);
      if (compute_wass(samples(space, a), samples(space, dominated), rho) != 0.0) ++bad;
    }
    if (bad) broken.push_back(fmt::format("wasserstein {}", bad));
  }

  {
    auto space = line();
    auto rho = identity_penalty("rho", "x");
    auto fixtures = chain_fixtures(space);
    const int k = 12;
    const std::size_t ell = 2, n = 8;
    std::vector<EvolutionEstimate> estimates;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
      estimates.push_back(estimate(ChainKernel(fixtures[f].chain), fixtures[f].chain.initial_state(), k, ell * n,
                                   RandomnessPlan(f)));
    }
    const auto lambda = DiscountSpec::exponential(0.95);
    int bad = 0, made = 0;
    while (made < cases) {
      auto phi = random_formula(rng, space, rho, 3);
      auto psi = random_formula(rng, space, rho, 2);
      if (horizon(*phi) > k || horizon(*psi) > k) continue;
      const auto& est = estimates[made % estimates.size()];
      const StreamKey key(made);
      ++made;
      const auto v = eval(est, *phi, ell, n, lambda, key.child({0, 0})).values;
      const auto nn = eval(est, *negate(negate(phi)), ell, n, lambda, key).values;
      // phi /\ psi = !(!phi \/ !psi): operands sit under Not, Or-side, Not.
      const auto vphi = eval(est, *phi, ell, n, lambda, key.child({0, 1, 0})).values;
      const auto vpsi = eval(est, *psi, ell, n, lambda, key.child({0, 2, 0})).values;
      const auto both = eval(est, *conj(phi, psi), ell, n, lambda, key).values;
      if (nn != v) ++bad;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= -1.0 && v[i] <= 1.0)) ++bad;
        if (both[i] != std::min(vphi[i], vpsi[i])) ++bad;
      }
    }
    if (bad) broken.push_back(fmt::format("robustness {}", bad));
  }
  return {broken.empty(), broken.empty() ? fmt::format("3 suites x {} cases, zero violations", cases)
                                         : fmt::format("violations: {}", fmt::join(broken, ", "))};
}

Outcome three_tanks() {
  TankParams params;
  std::vector<std::string> notes;
  bool ok = true;
  for (auto scenario : {TankScenario::GaussianInflow, TankScenario::RandomWalkInflow}) {
    const int sid = static_cast<int>(scenario);
    TanksKernel kernel(params, scenario);
    const auto d0 = tanks_initial(params, kernel.space());

    const auto long_run = estimate(kernel, d0, 600, 1000, RandomnessPlan(60 + sid), {4});
    bool contained = true;
    for (const auto& set : long_run.per_step) {
      for (std::size_t j = 0; j < set.size(); ++j) {
        for (std::size_t v = 0; v < 6; ++v) contained = contained && kernel.space()->variable(v).contains(set.value(j, v));
      }
    }
    ok = ok && contained;

    const auto n1000 = estimate(kernel, d0, 150, 1000, RandomnessPlan(100 + sid), {4});
    const auto n4000 = estimate(kernel, d0, 150, 4000, RandomnessPlan(200 + sid), {4});
    const std::size_t vars[] = {0, 1, 2};
    const auto reference = mean_evolution(kernel, d0, 150, 100000, RandomnessPlan(300 + sid), vars, {4});

    double lo = 1e9, hi = -1e9, ratio_lo = 1e9, ratio_hi = 0.0, cov_min = 1.0;
    for (int v = 0; v < 3; ++v) {
      const auto name = fmt::format("l{}", v + 1);
      const auto r1 = error_report(n1000, name, std::span<const double>(reference[v]));
      const auto r4 = error_report(n4000, name);
      for (int t = 100; t <= 150; ++t) {
        lo = std::min(lo, r1.rows[t].mean);
        hi = std::max(hi, r1.rows[t].mean);
      }
      double s1 = 0.0, s4 = 0.0;
      for (int t = 1; t <= 150; ++t) {
        s1 += r1.rows[t].stderr_mean;
        s4 += r4.rows[t].stderr_mean;
      }
      ratio_lo = std::min(ratio_lo, s1 / s4);
      ratio_hi = std::max(ratio_hi, s1 / s4);
      cov_min = std::min(cov_min, r1.coverage());
    }
    const bool means_ok = lo >= 9.0 && hi <= 11.0;
    const bool ratio_ok = ratio_lo >= 1.8 && ratio_hi <= 2.2;
    // The coverage requirement is stated for the random-walk scenario.
    const bool cov_ok = scenario == TankScenario::GaussianInflow || cov_min >= 0.9;
    ok = ok && means_ok && ratio_ok && cov_ok;
    notes.push_back(fmt::format("scenario {}: in-domain {}, means(100..150) in [{:.3f}, {:.3f}], stderr ratio "
                                "[{:.3f}, {:.3f}], min |z|<=1.96 coverage {:.3f}",
                                sid, contained ? "yes" : "no", lo, hi, ratio_lo, ratio_hi, cov_min));
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

struct SeriesRow {
  double value;
  bool reliable;
};

std::vector<SeriesRow> read_series(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string time, value, reliable;
    std::getline(fields, time, ',');
    std::getline(fields, value, ',');
    std::getline(fields, reliable, ',');
    rows.push_back({std::stod(value), reliable == "1"});
  }
  return rows;
}

const fs::path kPresets = EVTL_SOURCE_DIR "/presets";

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "evtl_acceptance";
  fs::create_directories(dir);
  return dir;
}

Outcome prop_pipeline() {
  bool ok = true;
  std::vector<std::string> notes;
  double slowest = 0.0;
  for (const char* prop : {"prop1", "prop2"}) {
    std::map<int, std::vector<SeriesRow>> by_k;
    int h = -1;
    for (int k : {150, 300, 600}) {
      const auto csv = scratch() / fmt::format("{}-{}.csv", prop, k);
      const auto json = scratch() / fmt::format("{}-{}.json", prop, k);
      std::ostringstream out, err;
      const auto start = Clock::now();
      const int code = run_cli({"check", "--config", (kPresets / "paper-scenario-1.cfg").string(), "--formula",
                                (kPresets / (std::string(prop) + ".evtl")).string(), "--runs", "100", "--ell", "10",
                                "--steps", std::to_string(k), "--seed", "2022", "--out", csv.string(), "--json",
                                json.string()},
                               out, err);
      const double t = seconds_since(start);
      slowest = std::max(slowest, t);
      if (code != 0 || t > 120.0) {
        ok = false;
        notes.push_back(fmt::format("{} k={} exit {} in {:.1f} s: {}", prop, k, code, t, err.str()));
        continue;
      }
      std::ifstream js(json);
      const auto summary = nlohmann::json::parse(js);
      h = summary["horizon"].get<int>();
      const auto rows = read_series(csv);
      bool shape = static_cast<int>(rows.size()) == k + 1 && summary["reliable_up_to"].get<int>() == k - h;
      for (int i = 0; i <= k && shape; ++i) {
        shape = rows[i].value >= -1.0 && rows[i].value <= 1.0 && rows[i].reliable == (i <= k - h);
      }
      ok = ok && shape;
      by_k[k] = rows;
    }
    // Reliable entries must not depend on k: they agree exactly with the
    // longest run, while the flagged tail is free to differ.
    if (by_k.size() == 3) {
      const auto& longest = by_k[600];
      std::size_t tail_diff = 0;
      bool prefix_equal = true;
      for (int k : {150, 300}) {
        for (int i = 0; i <= k; ++i) {
          if (i <= k - h) {
            prefix_equal = prefix_equal && by_k[k][i].value == longest[i].value;
          } else if (by_k[k][i].value != longest[i].value) {
            ++tail_diff;
          }
        }
      }
      ok = ok && prefix_equal;
      notes.push_back(fmt::format("{}: horizon {}, v0 {:.4f}, reliable prefixes {} across k, {} flagged entries differ "
                                  "from the k=600 run",
                                  prop, h, by_k[150][0].value, prefix_equal ? "identical" : "DIFFER", tail_diff));
    }
  }
  notes.push_back(fmt::format("slowest run {:.2f} s", slowest));
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

Outcome determinism() {
  const auto s1 = (kPresets / "paper-scenario-1.cfg").string();
  const auto s2 = (kPresets / "paper-scenario-2.cfg").string();
  const auto c3 = (kPresets / "chain-three-state.cfg").string();
  const auto c4 = (kPresets / "chain-four-state.cfg").string();
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"simulate", {"simulate", "--config", s1, "--seed", "42"}},
      {"estimate", {"estimate", "--config", s2, "--runs", "200", "--seed", "42"}},
      {"distance", {"distance", "--config-a", s1, "--config-b", s2, "--runs", "100", "--ell", "3", "--ot", "0:150"}},
      {"distance-exact", {"distance", "--config-a", c3, "--config-b", c4, "--ot", "0:20", "--exact"}},
      {"check", {"check", "--config", s1, "--formula", (kPresets / "prop2.evtl").string(), "--runs", "50"}},
      {"stats", {"stats", "--config", s2, "--var", "l2", "--runs", "300", "--ref-runs", "3000"}},
      {"stats-sweep", {"stats", "--config", s1, "--steps", "40", "--sweep"}},
  };
  std::vector<std::string> differing;
  for (const auto& [name, base] : commands) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "4", "1", "4"}) {
      auto args = base;
      const auto json = scratch() / ("det-" + name + ".json");
      args.insert(args.end(), {"--workers", workers});
      if (name != "simulate" && name != "estimate") args.insert(args.end(), {"--json", json.string()});
      std::ostringstream out, err;
      if (run_cli(args, out, err) != 0) throw std::runtime_error(name + ": " + err.str());
      std::string blob = out.str();
      if (fs::exists(json)) {
        std::ifstream in(json, std::ios::binary);
        blob += std::string(std::istreambuf_iterator<char>(in), {});
        fs::remove(json);
      }
      outputs.push_back(std::move(blob));
    }
    if (!std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs.front(); })) {
      differing.push_back(name);
    }
  }
  return {differing.empty(), differing.empty()
                                 ? fmt::format("{} commands x workers {{1,4}} x 2 repetitions byte-identical",
                                               commands.size())
                                 : fmt::format("differing: {}", fmt::join(differing, ", "))};
}

} // namespace

int main() {
  report(1, "estimator equals the exact quantile oracle", 10, estimator_oracle_identity);
  report(2, "uniform shift converges to its closed-form value", 5, analytic_convergence);
  report(3, "statistical robustness converges to the exact chain value", 60, statistical_convergence);
  report(4, "distinguishing formula and robustness transfer", 30, witness_and_transfer);
  report(5, "randomized invariant suites", 0, invariant_suites);
  report(6, "three-tanks qualitative reproduction", 300, three_tanks);
  report(7, "start-up and recovery properties through check", 0, prop_pipeline);
  report(8, "CLI determinism across runs and worker counts", 0, determinism);
  std::cout << fmt::format("{} of 8 criteria passed\n", 8 - failures);
  return failures;
}
