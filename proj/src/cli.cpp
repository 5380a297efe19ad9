#include "evtl/cli.hpp"

#include "evtl/config.hpp"
#include "evtl/csv.hpp"
#include "evtl/error.hpp"
#include "evtl/formula.hpp"
#include "evtl/parser.hpp"
#include "evtl/robustness.hpp"
#include "evtl/stats.hpp"
#include "evtl/wasserstein.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace evtl {

namespace {

using Json = nlohmann::ordered_json;

// Flags shared by every subcommand. Empty optionals mean "not given".
struct CommonFlags {
  std::string config;
  std::string preset;
  std::optional<std::string> model;
  std::optional<int> scenario;
  std::optional<int> steps;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> ell;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> lambda;
  std::optional<std::string> ot;
  std::optional<unsigned> workers;
  std::optional<std::string> until_mode;
  std::vector<std::string> sets;
  std::string out;
  std::string json;
};

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--preset", f.preset, "Built-in parameter set: paper-scenario-1 | paper-scenario-2");
  cmd->add_option("--model", f.model, "three-tanks | chain");
  cmd->add_option("--scenario", f.scenario, "Three-tanks inflow scenario (1 or 2)");
  cmd->add_option("--steps", f.steps, "Simulation steps k");
  cmd->add_option("--runs", f.runs, "Number of runs N");
  cmd->add_option("--ell", f.ell, "Sample multiplier for the second argument of the distance");
  cmd->add_option("--seed", f.seed, "Master seed (default: $EVTL_SEED, else 0)");
  cmd->add_option("--lambda", f.lambda, "Discount: const:c or exp:r");
  cmd->add_option("--ot", f.ot, "Observation times, e.g. 0:50,100");
  cmd->add_option("--workers", f.workers, "Worker threads (results do not depend on it)");
  cmd->add_option("--until-mode", f.until_mode, "semantics | figure");
  cmd->add_option("--set", f.sets, "Override any config key: key=value (repeatable)");
}

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Key/value config file");
  add_model_flags(cmd, f);
  cmd->add_option("--out", f.out, "Write CSV here instead of stdout");
}

// Expands a `preset = NAME` entry into the keys it stands for, keeping the
// explicit keys on top.
KeyValues expand_preset(KeyValues kv) {
  auto it = kv.find("preset");
  if (it == kv.end()) return kv;
  auto base = preset(it->second);
  if (!base) throw ConfigError(fmt::format("unknown preset '{}'", it->second));
  kv.erase(it);
  for (auto& [k, v] : kv) (*base)[k] = v;
  return *base;
}

// defaults < preset < config file < flags
RunConfig resolve(const CommonFlags& f, const std::string& config_path) {
  KeyValues kv;
  if (!f.preset.empty()) kv["preset"] = f.preset;
  if (!config_path.empty()) {
    auto file = load_key_values(config_path);
    if (file.contains("preset") && !f.preset.empty()) file.erase("preset");
    for (auto& [k, v] : file) kv[k] = v;
  }
  kv = expand_preset(std::move(kv));
  if (f.model) kv["model"] = *f.model;
  if (f.scenario) kv["scenario"] = std::to_string(*f.scenario);
  if (f.steps) kv["steps"] = std::to_string(*f.steps);
  if (f.runs) kv["runs"] = std::to_string(*f.runs);
  if (f.ell) kv["ell"] = std::to_string(*f.ell);
  if (f.seed) kv["seed"] = std::to_string(*f.seed);
  if (f.lambda) kv["lambda"] = *f.lambda;
  if (f.ot) kv["ot"] = *f.ot;
  if (f.workers) kv["workers"] = std::to_string(*f.workers);
  if (f.until_mode) kv["until_mode"] = *f.until_mode;
  for (const auto& s : f.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return make_run_config(kv);
}

// Writes to `path` when given, else to `fallback`.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", path));
  write(file);
  if (!file) throw NumericError(fmt::format("failed writing '{}'", path));
}

const char* mode_name(UntilMode m) { return m == UntilMode::Semantics ? "semantics" : "figure"; }

int cmd_simulate(const CommonFlags& f, std::ostream& out) {
  const auto cfg = resolve(f, f.config);
  const auto model = build_model(cfg);
  auto rng = RandomnessPlan(cfg.seed).run_stream(0);
  const auto traj = simulate(*model.kernel, model.initial, cfg.steps, rng);
  emit(f.out, out, [&](std::ostream& o) { write_trajectory_csv(o, traj, 0); });
  return kExitOk;
}

int cmd_estimate(const CommonFlags& f, std::ostream& out) {
  const auto cfg = resolve(f, f.config);
  const auto model = build_model(cfg);
  const auto est = estimate(*model.kernel, model.initial, cfg.steps, cfg.runs, RandomnessPlan(cfg.seed),
                            SimOptions{cfg.workers});
  emit(f.out, out, [&](std::ostream& o) { write_estimate_csv(o, est); });
  return kExitOk;
}

struct DistanceFlags {
  std::string config_a;
  std::string config_b;
  bool exact = false;
};

int cmd_distance(const CommonFlags& f, const DistanceFlags& d, std::ostream& out) {
  const auto cfg_a = resolve(f, d.config_a);
  const auto cfg_b = resolve(f, d.config_b);
  const auto model_a = build_model(cfg_a);
  const auto model_b = build_model(cfg_b);
  if (model_a.space->names() != model_b.space->names()) {
    throw ConfigError("distance: the two systems must share the same variables");
  }
  const auto& rho = model_a.penalties.at(cfg_a.penalty);
  const auto lambda = cfg_a.discount();
  const auto ot = cfg_a.times();

  Json summary;
  summary["penalty"] = cfg_a.penalty;
  summary["lambda"] = lambda.describe();
  EvoDistanceReport report;
  if (d.exact) {
    if (!model_a.chain || !model_b.chain) throw ConfigError("distance --exact needs two chain models");
    report = exact_evolution_metric(*model_a.chain, *model_b.chain, rho, lambda, ot);
    const auto back = exact_evolution_metric(*model_b.chain, *model_a.chain, rho, lambda, ot);
    const auto w = choose_witness(report, back);
    summary["mode"] = "exact";
    summary["forward"] = report.overall;
    summary["backward"] = back.overall;
    summary["symmetric"] = std::max(report.overall, back.overall);
    summary["witness"] = {{"direction", w.forward ? "a->b" : "b->a"}, {"tau", w.tau}, {"p", w.p}, {"gap", w.gap}};
  } else {
    const int steps = ot.max();
    const auto a = estimate(*model_a.kernel, model_a.initial, steps, cfg_a.runs, RandomnessPlan(cfg_a.seed),
                            SimOptions{cfg_a.workers});
    const auto b = estimate(*model_b.kernel, model_b.initial, steps, cfg_a.ell * cfg_a.runs,
                            RandomnessPlan(cfg_b.seed), SimOptions{cfg_a.workers});
    report = evolution_metric(a, b, rho, lambda, ot, cfg_a.workers);
    summary["mode"] = "statistical";
    summary["runs"] = cfg_a.runs;
    summary["ell"] = cfg_a.ell;
    summary["seed_a"] = cfg_a.seed;
    summary["seed_b"] = cfg_b.seed;
    summary["forward"] = report.overall;
  }
  emit(f.out, out, [&](std::ostream& o) { report.write_csv(o); });
  if (!f.json.empty()) {
    std::ostringstream body;
    report.write_json(body);
    auto j = Json::parse(body.str());
    for (auto& [k, v] : summary.items()) j[k] = v;
    emit(f.json, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }
  return kExitOk;
}

struct CheckFlags {
  std::string formula;
  std::string formula_text;
};

int cmd_check(const CommonFlags& f, const CheckFlags& c, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve(f, f.config);
  const auto model = build_model(cfg);

  std::string text = c.formula_text;
  std::filesystem::path base = ".";
  if (!c.formula.empty()) {
    std::ifstream in(c.formula);
    if (!in) throw ConfigError(fmt::format("cannot open formula file '{}'", c.formula));
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    base = std::filesystem::path(c.formula).parent_path();
    if (base.empty()) base = ".";
  } else if (text.empty()) {
    throw ConfigError("check: give --formula FILE or --formula-text TEXT");
  }
  const auto phi = parse_formula(text, ParseContext{model.space, &model.penalties, base});
  const int h = horizon(*phi);
  if (h > cfg.steps) {
    err << fmt::format("warning: formula horizon {} exceeds steps {}; simulating {} steps\n", h, cfg.steps, h);
  }
  const auto lambda = cfg.discount();
  const auto series = sat(*model.kernel, model.initial, *phi, cfg.ell, cfg.runs, lambda, RandomnessPlan(cfg.seed),
                          SatOptions{cfg.steps, EvalOptions{cfg.until_mode, cfg.workers}});
  emit(f.out, out, [&](std::ostream& o) { series.write_csv(o); });
  if (!f.json.empty()) {
    Json j;
    j["formula"] = to_string(*phi);
    j["v0"] = series.robust();
    j["satisfied"] = series.robust() > 0.0;
    j["steps"] = series.horizon();
    j["horizon"] = h;
    j["reliable_up_to"] = series.reliable_up_to;
    j["runs"] = cfg.runs;
    j["ell"] = cfg.ell;
    j["seed"] = cfg.seed;
    j["lambda"] = lambda.describe();
    j["until_mode"] = mode_name(cfg.until_mode);
    emit(f.json, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }
  return kExitOk;
}

struct StatsFlags {
  std::string var = "l3";
  std::size_t ref_runs = 0;
  std::optional<std::uint64_t> ref_seed;
  bool sweep = false;
};

int cmd_stats(const CommonFlags& f, const StatsFlags& s, std::ostream& out) {
  const auto cfg = resolve(f, f.config);
  const auto model = build_model(cfg);
  const auto v = model.space->index_of(s.var);

  std::optional<std::vector<double>> reference;
  const std::uint64_t ref_seed = s.ref_seed.value_or(cfg.seed + 1);
  if (s.ref_runs > 0) {
    const std::size_t vars[] = {v};
    reference = std::move(mean_evolution(*model.kernel, model.initial, cfg.steps, s.ref_runs,
                                         RandomnessPlan(ref_seed), vars, SimOptions{cfg.workers})
                              .front());
  }

  std::vector<std::size_t> counts{cfg.runs};
  if (s.sweep) counts.assign(kRunSweep.begin(), kRunSweep.end());

  std::vector<ErrorReport> reports;
  for (auto n : counts) {
    const auto est =
        estimate(*model.kernel, model.initial, cfg.steps, n, RandomnessPlan(cfg.seed), SimOptions{cfg.workers});
    std::optional<std::span<const double>> ref;
    if (reference) ref = std::span<const double>(*reference);
    reports.push_back(error_report(est, s.var, ref));
  }
  emit(f.out, out, [&](std::ostream& o) {
    for (std::size_t i = 0; i < reports.size(); ++i) reports[i].write_csv(o, i == 0);
  });
  if (!f.json.empty()) {
    Json j;
    j["var"] = s.var;
    j["seed"] = cfg.seed;
    if (reference) {
      j["ref_runs"] = s.ref_runs;
      j["ref_seed"] = ref_seed;
    }
    auto rows = Json::array();
    for (const auto& r : reports) {
      double mean_stderr = 0.0;
      for (const auto& row : r.rows) mean_stderr += row.stderr_mean;
      mean_stderr /= static_cast<double>(r.rows.size());
      Json e{{"runs", r.runs}, {"mean_stderr", mean_stderr}};
      if (reference) e["coverage95"] = r.coverage();
      rows.push_back(std::move(e));
    }
    j["reports"] = std::move(rows);
    emit(f.json, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }
  return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical model checker for evolution temporal logic"};
  app.require_subcommand(1);

  CommonFlags f;
  DistanceFlags dist;
  CheckFlags check;
  StatsFlags stats;

  auto* simulate_cmd = app.add_subcommand("simulate", "One trajectory as CSV (run,time,<vars>)");
  add_common_flags(simulate_cmd, f);

  auto* estimate_cmd = app.add_subcommand("estimate", "N independent runs as CSV, run-major");
  add_common_flags(estimate_cmd, f);

  auto* distance_cmd = app.add_subcommand("distance", "Evolution metric between two configured systems");
  distance_cmd->add_option("--config-a", dist.config_a, "Config of the first system")->required();
  distance_cmd->add_option("--config-b", dist.config_b, "Config of the second system")->required();
  distance_cmd->add_flag("--exact", dist.exact, "Exact transient laws (both systems must be chains)");
  add_model_flags(distance_cmd, f);
  distance_cmd->add_option("--out", f.out, "Per-time CSV path");
  distance_cmd->add_option("--json", f.json, "Summary JSON path");

  auto* check_cmd = app.add_subcommand("check", "Robustness series of a formula");
  add_common_flags(check_cmd, f);
  auto* formula_opt = check_cmd->add_option("--formula", check.formula, "Formula file");
  check_cmd->add_option("--formula-text", check.formula_text, "Formula source")->excludes(formula_opt);
  check_cmd->add_option("--json", f.json, "Summary JSON path");

  auto* stats_cmd = app.add_subcommand("stats", "Mean, standard deviation and standard error per time step");
  add_common_flags(stats_cmd, f);
  stats_cmd->add_option("--var", stats.var, "Variable to analyse");
  stats_cmd->add_option("--ref-runs", stats.ref_runs, "Runs of the reference estimate used for z-scores");
  stats_cmd->add_option("--ref-seed", stats.ref_seed, "Seed of the reference estimate (default: seed + 1)");
  stats_cmd->add_flag("--sweep", stats.sweep, "Repeat for N in 100, 500, 1000, 5000, 10000");
  stats_cmd->add_option("--json", f.json, "Summary JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(f, out);
    if (estimate_cmd->parsed()) return cmd_estimate(f, out);
    if (distance_cmd->parsed()) return cmd_distance(f, dist, out);
    if (check_cmd->parsed()) return cmd_check(f, check, out, err);
    if (stats_cmd->parsed()) return cmd_stats(f, stats, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

} // namespace evtl
