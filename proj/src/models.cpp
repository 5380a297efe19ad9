#include "evtl/models.hpp"

#include "evtl/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace evtl {

void TankParams::validate() const {
  if (!(l_min < l_goal && l_goal < l_max)) {
    throw ConfigError(fmt::format("tanks: need l_m < l_g < l_M, got {} < {} < {}", l_min, l_goal, l_max));
  }
  if (!(q_step > 0.0 && q_step <= q_max)) {
    throw ConfigError(fmt::format("tanks: need 0 < q_s <= q_M, got q_s = {}, q_M = {}", q_step, q_max));
  }
  if (!(area > 0.0 && pipe > 0.0)) throw ConfigError("tanks: cross-sections A and a must be positive");
  if (!(loss12 > 0.0 && loss12 <= 1.0 && loss23 > 0.0 && loss23 <= 1.0)) {
    throw ConfigError("tanks: loss coefficients must lie in (0,1]");
  }
  if (!(delta_l >= 0.0 && delta_q >= 0.0)) throw ConfigError("tanks: delta_l and delta_q must be nonnegative");
  if (!(gravity > 0.0 && dt > 0.0)) throw ConfigError("tanks: g and dt must be positive");
}

SpaceRef tanks_space(const TankParams& params) {
  params.validate();
  return make_space({
      VariableSpec::interval("l1", params.l_min, params.l_max),
      VariableSpec::interval("l2", params.l_min, params.l_max),
      VariableSpec::interval("l3", params.l_min, params.l_max),
      VariableSpec::interval("q1", 0.0, params.q_max),
      VariableSpec::interval("q2", 0.0, params.q_max),
      VariableSpec::interval("q0", 0.0, params.q_max),
  });
}

double torricelli_flow(double loss, double pipe, double gravity, double from, double to) {
  const double magnitude = loss * pipe * std::sqrt(2.0 * gravity * std::abs(from - to));
  return from >= to ? magnitude : -magnitude;
}

TanksKernel::TanksKernel(TankParams params, TankScenario scenario)
    : params_(params), scenario_(scenario), space_(tanks_space(params_)) {}

namespace {
enum Var : std::size_t { L1, L2, L3, Q1, Q2, Q0 };
}

void TanksKernel::step(StateView current, std::span<double> next, Engine& rng) const {
  const auto& p = params_;
  const double l1 = current[L1];
  const double l2 = current[L2];
  const double l3 = current[L3];
  const double q1 = current[Q1];
  const double q2 = current[Q2];
  const double q0 = current[Q0];

  const double q12 = torricelli_flow(p.loss12, p.pipe, p.gravity, l1, l2);
  const double q23 = torricelli_flow(p.loss23, p.pipe, p.gravity, l2, l3);
  const double scale = p.dt / p.area;

  auto level = [&](double v) { return std::clamp(v, p.l_min, p.l_max); };
  auto flow = [&](double v) { return std::clamp(v, 0.0, p.q_max); };

  next[L1] = level(l1 + scale * (q1 - q12));
  next[L2] = level(l2 + scale * (q12 - q23));
  next[L3] = level(l3 + scale * (q2 + q23 - q0));

  if (scenario_ == TankScenario::GaussianInflow) {
    next[Q2] = flow(draw_normal(rng, p.q_avg, p.delta_q));
  } else {
    next[Q2] = flow(q2 + draw_normal(rng, 0.0, 1.0));
  }

  double pump_in = q1;
  if (l1 > p.l_goal + p.delta_l) {
    pump_in = std::max(0.0, q1 - p.q_step);
  } else if (l1 < p.l_goal - p.delta_l) {
    pump_in = std::min(p.q_max, q1 + p.q_step);
  }
  double pump_out = q0;
  if (l3 > p.l_goal + p.delta_l) {
    pump_out = std::min(p.q_max, q0 + p.q_step);
  } else if (l3 < p.l_goal - p.delta_l) {
    pump_out = std::max(0.0, q0 - p.q_step);
  }
  next[Q1] = flow(pump_in);
  next[Q0] = flow(pump_out);
}

DataState tanks_initial(const TankParams& params, const SpaceRef& space) {
  return make_data_state(space, {{"l1", params.l_min},
                                 {"l2", params.l_min},
                                 {"l3", params.l_min},
                                 {"q1", 0.0},
                                 {"q2", 0.0},
                                 {"q0", 0.0}});
}

PenaltyRegistry tank_penalties(const TankParams& params) {
  PenaltyRegistry out;
  for (int i = 1; i <= 3; ++i) out.add(tank_penalty(i, params.levels()));
  return out;
}

void ChainKernel::step(StateView current, std::span<double> next, Engine& rng) const {
  const auto from = chain_.find(current.values());
  if (!from) throw NumericError("chain kernel: current state is not a chain state");
  const auto& row = chain_.transition()[*from];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cumulative = 0.0;
  std::size_t to = row.size() - 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    cumulative += row[j];
    if (u < cumulative) {
      to = j;
      break;
    }
  }
  // Guard against rounding in the last cumulative sum landing on a zero-probability tail.
  while (row[to] == 0.0 && to > 0) --to;
  std::ranges::copy(chain_.states()[to].values(), next.begin());
}

SpaceRef chain_space() { return make_space({VariableSpec::interval("x", 0.0, 1.0)}); }

FiniteChain make_chain(const SpaceRef& space, const std::vector<double>& xs, std::vector<std::vector<double>> rows,
                       std::size_t initial) {
  std::vector<DataState> states;
  for (double x : xs) states.push_back(make_data_state(space, std::vector<double>{x}));
  return FiniteChain(std::move(states), std::move(rows), initial);
}

std::vector<ChainFixture> chain_fixtures(const SpaceRef& space) {
  std::vector<ChainFixture> out;
  out.push_back({"two-state", make_chain(space, {0.0, 1.0}, {{0.5, 0.5}, {0.0, 1.0}}, 0)});
  out.push_back({"three-state",
                 make_chain(space, {0.0, 0.5, 1.0}, {{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.1, 0.4, 0.5}}, 0)});
  out.push_back({"four-state",
                 make_chain(space, {0.0, 0.25, 0.6, 1.0},
                            {{0.7, 0.2, 0.1, 0.0}, {0.3, 0.4, 0.2, 0.1}, {0.0, 0.3, 0.4, 0.3}, {0.0, 0.0, 0.5, 0.5}}, 3)});
  return out;
}

} // namespace evtl
