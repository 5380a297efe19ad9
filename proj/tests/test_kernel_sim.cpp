#include <doctest.h>

#include "evtl/csv.hpp"
#include "evtl/error.hpp"
#include "evtl/kernel_sim.hpp"
#include "evtl/models.hpp"

#include <algorithm>
#include <sstream>

using namespace evtl;

namespace {

SpaceRef line() { return make_space({VariableSpec::interval("x", 0, 1)}); }

// Next value uniform on {0, 0.5, 1}, independent of the current state.
FunctionKernel uniform3(const SpaceRef& space) {
  return FunctionKernel(space, [](StateView, std::span<double> next, Engine& rng) {
    std::uniform_int_distribution<int> pick(0, 2);
    next[0] = 0.5 * pick(rng);
  });
}

} // namespace

TEST_CASE("identity kernel trajectories repeat the initial state") {
  auto space = line();
  IdentityKernel id(space);
  auto d0 = make_data_state(space, {{"x", 0.25}});
  Engine rng(1);
  auto traj = simulate(id, d0, 3, rng);
  REQUIRE(traj.length() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(traj.states.state(i) == d0);
  CHECK(simulate(id, d0, 0, rng).length() == 1);
  CHECK_THROWS_AS(simulate(id, d0, -1, rng), ConfigError);
}

TEST_CASE("three-tanks trajectory stays in its domain") {
  TankParams params;
  TanksKernel kernel(params, TankScenario::GaussianInflow);
  auto d0 = tanks_initial(params, kernel.space());
  auto rng = RandomnessPlan(42).run_stream(0);
  auto traj = simulate(kernel, d0, 150, rng);
  for (std::size_t i = 0; i < traj.length(); ++i) {
    for (std::size_t v = 0; v < 3; ++v) {
      REQUIRE(traj.states.value(i, v) >= 0.0);
      REQUIRE(traj.states.value(i, v) <= 20.0);
    }
  }
}

TEST_CASE("out-of-domain kernel output is a numeric error") {
  auto space = line();
  FunctionKernel bad(space, [](StateView, std::span<double> next, Engine&) { next[0] = 3.0; });
  Engine rng(1);
  CHECK_THROWS_AS(simulate(bad, make_data_state(space, {{"x", 0.0}}), 2, rng), NumericError);
  FunctionKernel nan(space, [](StateView, std::span<double> next, Engine&) { next[0] = std::nan(""); });
  CHECK_THROWS_AS(simulate(nan, make_data_state(space, {{"x", 0.0}}), 2, rng), NumericError);
}

TEST_CASE("a single run estimate equals simulate with run stream 0") {
  TankParams params;
  TanksKernel kernel(params, TankScenario::RandomWalkInflow);
  auto d0 = tanks_initial(params, kernel.space());
  RandomnessPlan plan(9);
  auto est = estimate(kernel, d0, 20, 1, plan);
  auto rng = plan.run_stream(0);
  auto traj = simulate(kernel, d0, 20, rng);
  for (int i = 0; i <= 20; ++i) CHECK(est.per_step[i].state(0) == traj.states.state(i));
}

TEST_CASE("identity kernel estimate holds copies of d0") {
  auto space = line();
  IdentityKernel id(space);
  auto d0 = make_data_state(space, {{"x", 0.75}});
  auto est = estimate(id, d0, 10, 50, RandomnessPlan(3));
  REQUIRE(est.per_step.size() == 11);
  for (const auto& set : est.per_step) CHECK(set == SampleSet::repeat(d0, 50));
}

TEST_CASE("estimates are deterministic and worker-count invariant") {
  TankParams params;
  TanksKernel kernel(params, TankScenario::RandomWalkInflow);
  auto d0 = tanks_initial(params, kernel.space());
  RandomnessPlan plan(123);
  auto a = estimate(kernel, d0, 30, 64, plan, {1});
  auto b = estimate(kernel, d0, 30, 64, plan, {4});
  auto c = estimate(kernel, d0, 30, 64, plan, {3});
  for (int i = 0; i <= 30; ++i) {
    CHECK(a.per_step[i] == b.per_step[i]);
    CHECK(a.per_step[i] == c.per_step[i]);
  }
  const std::size_t vars[] = {0, 2};
  auto m1 = mean_evolution(kernel, d0, 30, 3000, plan, vars, {1});
  auto m4 = mean_evolution(kernel, d0, 30, 3000, plan, vars, {4});
  CHECK(m1 == m4);
}

TEST_CASE("run r of an estimate is the run-r trajectory") {
  // Permuting run indices permutes every time slice the same way.
  auto space = line();
  auto kernel = uniform3(space);
  auto d0 = make_data_state(space, {{"x", 0.0}});
  RandomnessPlan plan(5);
  auto est = estimate(kernel, d0, 6, 20, plan);
  for (std::size_t r : {0u, 7u, 19u}) {
    auto rng = plan.run_stream(r);
    auto traj = simulate(kernel, d0, 6, rng);
    for (int i = 0; i <= 6; ++i) CHECK(est.per_step[i].state(r) == traj.states.state(i));
  }
}

TEST_CASE("distinct run streams differ") {
  RandomnessPlan plan(1);
  auto r0 = plan.run_stream(0);
  auto r1 = plan.run_stream(1);
  CHECK(r0() != r1());
  auto again = plan.run_stream(0);
  auto r0b = plan.run_stream(0);
  CHECK(again() == r0b());
}

TEST_CASE("empirical measure") {
  auto space = make_space({VariableSpec::interval("l3", 0, 20)});
  SampleSet set(space);
  for (double v : {9.0, 10.0, 11.0, 12.0}) set.push_back(make_data_state(space, {{"l3", v}}).view());
  CHECK(empirical_measure(set, [](StateView) { return true; }) == 1.0);
  CHECK(empirical_measure(set, [](StateView) { return false; }) == 0.0);
  CHECK(empirical_measure(set, [](StateView s) { return s[0] <= 10.0; }) == 0.5);
}

TEST_CASE("one-step empirical law converges to the kernel's law") {
  auto space = line();
  auto kernel = uniform3(space);
  auto est = estimate(kernel, make_data_state(space, {{"x", 0.0}}), 1, 10000, RandomnessPlan(77));
  for (double atom : {0.0, 0.5, 1.0}) {
    const double freq = empirical_measure(est.per_step[1], [&](StateView s) { return s[0] == atom; });
    CHECK(std::abs(freq - 1.0 / 3.0) < 0.02);
  }
}

TEST_CASE("trajectory csv layout") {
  auto space = make_space({VariableSpec::interval("a", 0, 1), VariableSpec::interval("b", 0, 1)});
  IdentityKernel id(space);
  Engine rng(1);
  auto traj = simulate(id, make_data_state(space, {{"a", 0.1}, {"b", 0.0}}), 1, rng);
  std::ostringstream out;
  write_trajectory_csv(out, traj, 2);
  CHECK(out.str() == "run,time,a,b\n2,0,0.10000000000000001,0\n2,1,0.10000000000000001,0\n");
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw NumericError("boom");
                               }),
                  NumericError);
}
