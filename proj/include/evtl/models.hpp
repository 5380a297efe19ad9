#pragma once

// Ready-made systems: the three-tanks laboratory plant and finite-chain fixtures.

#include "evtl/data_model.hpp"
#include "evtl/finite_chain.hpp"
#include "evtl/kernel_sim.hpp"

#include <memory>
#include <vector>

namespace evtl {

/// Physical and controller parameters of the three-tanks plant. Levels share
/// one length unit; the normal variances (delta_l, delta_q) are variances.
struct TankParams {
  double l_min = 0.0;
  double l_max = 20.0;
  double l_goal = 10.0;
  double delta_l = 0.5;
  double q_max = 6.0;
  double q_step = 6.0 / 5.0;
  double q_avg = 3.0; // q_max / 2
  double delta_q = 0.5;
  double area = 1.0;  // tank cross-section A
  double pipe = 0.5;  // pipe cross-section a
  double loss12 = 0.75;
  double loss23 = 0.75;
  double gravity = 9.81;
  double dt = 0.1;

  /// Throws ConfigError on violated constraints.
  void validate() const;
  TankLevels levels() const { return {l_goal, l_max, l_min}; }
};

enum class TankScenario { GaussianInflow = 1, RandomWalkInflow = 2 };

/// Variables l1, l2, l3 in [l_min, l_max] and q1, q2, q0 in [0, q_max], in that order.
SpaceRef tanks_space(const TankParams& params);

/// Signed Torricelli flow from a tank at level `from` to one at level `to`.
double torricelli_flow(double loss, double pipe, double gravity, double from, double to);

class TanksKernel final : public MarkovKernel {
public:
  TanksKernel(TankParams params, TankScenario scenario);

  const SpaceRef& space() const override { return space_; }
  const TankParams& params() const noexcept { return params_; }
  TankScenario scenario() const noexcept { return scenario_; }

  /// Flows from pre-update levels, level balance scaled by dt/A, level clamp,
  /// environment inflow, then both pump controllers reading pre-update levels.
  void step(StateView current, std::span<double> next, Engine& rng) const override;

private:
  TankParams params_;
  TankScenario scenario_;
  SpaceRef space_;
};

/// All levels at l_min, all flows zero.
DataState tanks_initial(const TankParams& params, const SpaceRef& space);

/// rho1..rho3 for the tank levels.
PenaltyRegistry tank_penalties(const TankParams& params);

/// Samples the next state from the current state's transition row.
class ChainKernel final : public MarkovKernel {
public:
  explicit ChainKernel(FiniteChain chain) : chain_(std::move(chain)) {}

  const SpaceRef& space() const override { return chain_.space(); }
  const FiniteChain& chain() const noexcept { return chain_; }
  void step(StateView current, std::span<double> next, Engine& rng) const override;

private:
  FiniteChain chain_;
};

/// One variable `x` in [0,1]; chain states are given by their x values.
SpaceRef chain_space();
FiniteChain make_chain(const SpaceRef& space, const std::vector<double>& xs, std::vector<std::vector<double>> rows,
                       std::size_t initial = 0);

/// Small chains over chain_space() used as exact-oracle fixtures.
struct ChainFixture {
  std::string name;
  FiniteChain chain;
};
std::vector<ChainFixture> chain_fixtures(const SpaceRef& space);

} // namespace evtl
