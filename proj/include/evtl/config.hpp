#pragma once

// Run configuration: a flat `key = value` text format plus the model it describes.

#include "evtl/data_model.hpp"
#include "evtl/kernel_sim.hpp"
#include "evtl/models.hpp"
#include "evtl/robustness.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace evtl {

/// Ordered key/value pairs; later assignments override earlier ones.
using KeyValues = std::map<std::string, std::string>;

/// One `key = value` per line, `#` comments, blank lines ignored.
KeyValues parse_key_values(std::string_view text, std::string_view origin = "<config>");
KeyValues load_key_values(const std::filesystem::path& path);

enum class ModelKind { ThreeTanks, Chain };

struct ChainSpec {
  std::vector<double> values;
  std::vector<std::vector<double>> rows;
  std::size_t initial = 0;
};

struct RunConfig {
  ModelKind model = ModelKind::ThreeTanks;
  TankScenario scenario = TankScenario::GaussianInflow;
  TankParams tanks;
  ChainSpec chain;
  KeyValues penalty_specs; // name -> "normdist VAR GOAL MIN MAX" | "identity VAR"
  int steps = 150;
  std::size_t runs = 100;
  std::size_t ell = 1;
  std::uint64_t seed = 0;
  std::string lambda = "const:1";
  std::optional<std::string> observation_times; // defaults to 0:steps
  std::string penalty;                          // penalty used by `distance`
  UntilMode until_mode = UntilMode::Semantics;
  unsigned workers = 1;

  DiscountSpec discount() const { return DiscountSpec::parse(lambda); }
  ObservationTimes times() const;
};

/// Defaults, overlaid with `values`. Unknown keys and invalid values raise
/// ConfigError. The seed defaults to $EVTL_SEED when set, else 0.
RunConfig make_run_config(const KeyValues& values);

/// Everything needed to simulate and check a configured system.
struct Model {
  SpaceRef space;
  std::shared_ptr<const MarkovKernel> kernel;
  DataState initial;
  PenaltyRegistry penalties;
  std::optional<FiniteChain> chain;
};

Model build_model(const RunConfig& config);

/// Presets shipped with the tool: paper-scenario-1, paper-scenario-2.
std::optional<KeyValues> preset(std::string_view name);

} // namespace evtl
