#include "evtl/config.hpp"

#include "evtl/error.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace evtl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a valid integer", key, text));
  }
  return v;
}

std::vector<double> to_reals(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    out.push_back(to_real(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

} // namespace

KeyValues parse_key_values(std::string_view text, std::string_view origin) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, line_no));
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, line_no));
    out[std::string(key)] = std::string(value);
  }
  return out;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str(), path.string());
}

ObservationTimes RunConfig::times() const {
  if (observation_times) return ObservationTimes::parse(*observation_times);
  return ObservationTimes::range(0, steps);
}

RunConfig make_run_config(const KeyValues& values) {
  RunConfig c;
  if (const char* env = std::getenv("EVTL_SEED"); env && *env) c.seed = to_int<std::uint64_t>("EVTL_SEED", env);

  std::map<std::size_t, std::vector<double>> rows;
  for (const auto& [key, value] : values) {
    if (key == "model") {
      if (value == "three-tanks") {
        c.model = ModelKind::ThreeTanks;
      } else if (value == "chain") {
        c.model = ModelKind::Chain;
      } else {
        throw ConfigError(fmt::format("model: unknown model '{}' (expected three-tanks or chain)", value));
      }
    } else if (key == "scenario") {
      const int s = to_int<int>(key, value);
      if (s != 1 && s != 2) throw ConfigError(fmt::format("scenario: expected 1 or 2, got {}", s));
      c.scenario = static_cast<TankScenario>(s);
    } else if (key == "steps") {
      c.steps = to_int<int>(key, value);
      if (c.steps < 0) throw ConfigError("steps: must be nonnegative");
    } else if (key == "runs") {
      c.runs = to_int<std::size_t>(key, value);
      if (c.runs < 1) throw ConfigError("runs: must be at least 1");
    } else if (key == "ell") {
      c.ell = to_int<std::size_t>(key, value);
      if (c.ell < 1) throw ConfigError("ell: must be at least 1");
    } else if (key == "seed") {
      c.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "lambda") {
      DiscountSpec::parse(value);
      c.lambda = value;
    } else if (key == "ot") {
      ObservationTimes::parse(value);
      c.observation_times = value;
    } else if (key == "penalty") {
      c.penalty = value;
    } else if (key == "until_mode") {
      c.until_mode = parse_until_mode(value);
    } else if (key == "workers") {
      c.workers = to_int<unsigned>(key, value);
      if (c.workers < 1) throw ConfigError("workers: must be at least 1");
    } else if (key.starts_with("tanks.")) {
      const auto name = std::string_view(key).substr(6);
      auto& t = c.tanks;
      const double v = to_real(key, value);
      if (name == "l_m") t.l_min = v;
      else if (name == "l_M") t.l_max = v;
      else if (name == "l_g") t.l_goal = v;
      else if (name == "delta_l") t.delta_l = v;
      else if (name == "q_M") t.q_max = v;
      else if (name == "q_s") t.q_step = v;
      else if (name == "q_av") t.q_avg = v;
      else if (name == "delta_q") t.delta_q = v;
      else if (name == "A") t.area = v;
      else if (name == "a") t.pipe = v;
      else if (name == "a12") t.loss12 = v;
      else if (name == "a23") t.loss23 = v;
      else if (name == "g") t.gravity = v;
      else if (name == "dt") t.dt = v;
      else throw ConfigError(fmt::format("unknown key '{}'", key));
    } else if (key == "chain.values") {
      c.chain.values = to_reals(key, value);
    } else if (key == "chain.initial") {
      c.chain.initial = to_int<std::size_t>(key, value);
    } else if (key.starts_with("chain.row.")) {
      rows[to_int<std::size_t>(key, std::string_view(key).substr(10))] = to_reals(key, value);
    } else if (key.starts_with("penalty.")) {
      c.penalty_specs[key.substr(8)] = value;
    } else {
      throw ConfigError(fmt::format("unknown key '{}'", key));
    }
  }
  if (c.model == ModelKind::ThreeTanks) c.tanks.validate();
  for (auto& [index, row] : rows) {
    if (index != c.chain.rows.size()) throw ConfigError(fmt::format("chain.row.{}: rows must be numbered 0..n-1", index));
    c.chain.rows.push_back(std::move(row));
  }
  if (c.penalty.empty()) c.penalty = c.model == ModelKind::ThreeTanks ? "rho3" : "rho";
  return c;
}

namespace {

PenaltySpec penalty_from_spec(const std::string& name, const std::string& spec) {
  const auto w = words(spec);
  if (w.size() == 5 && w[0] == "normdist") {
    const auto key = "penalty." + name;
    return normalized_distance_penalty(name, w[1], to_real(key, w[2]), to_real(key, w[3]), to_real(key, w[4]));
  }
  if (w.size() == 2 && w[0] == "identity") return identity_penalty(name, w[1]);
  throw ConfigError(
      fmt::format("penalty.{}: expected 'normdist VAR GOAL MIN MAX' or 'identity VAR', got '{}'", name, spec));
}

} // namespace

Model build_model(const RunConfig& config) {
  if (config.model == ModelKind::ThreeTanks) {
    auto kernel = std::make_shared<const TanksKernel>(config.tanks, config.scenario);
    const auto& space = kernel->space();
    Model m{space, kernel, tanks_initial(config.tanks, space), tank_penalties(config.tanks), std::nullopt};
    for (const auto& [name, spec] : config.penalty_specs) m.penalties.add(penalty_from_spec(name, spec));
    for (const auto& name : m.penalties.names()) {
      for (const auto& v : m.penalties.at(name).vars()) space->index_of(v);
    }
    return m;
  }

  if (config.chain.values.empty()) throw ConfigError("chain model: chain.values is required");
  auto space = chain_space();
  auto chain = make_chain(space, config.chain.values, config.chain.rows, config.chain.initial);
  auto kernel = std::make_shared<const ChainKernel>(chain);
  PenaltyRegistry penalties;
  penalties.add(identity_penalty("rho", "x"));
  for (const auto& [name, spec] : config.penalty_specs) penalties.add(penalty_from_spec(name, spec));
  return Model{space, kernel, chain.initial_state(), std::move(penalties), std::move(chain)};
}

std::optional<KeyValues> preset(std::string_view name) {
  // Mirrors presets/paper-scenario-*.cfg.
  static const char* const kCommon = R"(
model = three-tanks
tanks.l_m = 0
tanks.l_M = 20
tanks.l_g = 10
tanks.delta_l = 0.5
tanks.q_M = 6
tanks.q_s = 1.2
tanks.q_av = 3
tanks.delta_q = 0.5
tanks.A = 1
tanks.a = 0.5
tanks.a12 = 0.75
tanks.a23 = 0.75
tanks.g = 9.81
tanks.dt = 0.1
steps = 150
)";
  if (name == "paper-scenario-1") {
    auto kv = parse_key_values(kCommon, "preset");
    kv["scenario"] = "1";
    return kv;
  }
  if (name == "paper-scenario-2") {
    auto kv = parse_key_values(kCommon, "preset");
    kv["scenario"] = "2";
    return kv;
  }
  return std::nullopt;
}

} // namespace evtl
