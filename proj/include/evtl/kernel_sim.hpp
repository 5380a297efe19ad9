#pragma once

// Trajectory simulation and empirical evolution-sequence estimation.

#include "evtl/data_model.hpp"
#include "evtl/random.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace evtl {

/// Sampler for a Markov kernel. Implementations must be pure: the next state
/// depends only on the current state and the randomness drawn, so a single
/// kernel object can be shared by concurrent workers.
class MarkovKernel {
public:
  virtual ~MarkovKernel() = default;

  virtual const SpaceRef& space() const = 0;
  /// Writes the successor of `current` into `next` (same width as the space).
  virtual void step(StateView current, std::span<double> next, Engine& rng) const = 0;
};

/// Dirac self-loop: step(d) = delta_d.
class IdentityKernel final : public MarkovKernel {
public:
  explicit IdentityKernel(SpaceRef space) : space_(std::move(space)) {}
  const SpaceRef& space() const override { return space_; }
  void step(StateView current, std::span<double> next, Engine&) const override;

private:
  SpaceRef space_;
};

/// Kernel backed by a callable; handy for tests and small ad-hoc models.
class FunctionKernel final : public MarkovKernel {
public:
  using StepFn = std::function<void(StateView, std::span<double>, Engine&)>;
  FunctionKernel(SpaceRef space, StepFn fn) : space_(std::move(space)), fn_(std::move(fn)) {}
  const SpaceRef& space() const override { return space_; }
  void step(StateView current, std::span<double> next, Engine& rng) const override { fn_(current, next, rng); }

private:
  SpaceRef space_;
  StepFn fn_;
};

/// One kernel application with validation of the produced state.
DataState apply_kernel(const MarkovKernel& kernel, const DataState& current, Engine& rng);

/// States d_0..d_k of one run; d_0 is the initial state.
struct Trajectory {
  SampleSet states;

  std::size_t length() const { return states.size(); }
};

Trajectory simulate(const MarkovKernel& kernel, const DataState& initial, int steps, Engine& rng);

/// The empirical evolution sequence: per_step[i] holds the i-th state of every run.
struct EvolutionEstimate {
  std::vector<SampleSet> per_step;
  std::size_t runs = 0;
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(per_step.size()) - 1; }
  const DataSpace& space() const { return per_step.front().space(); }
};

struct SimOptions {
  unsigned workers = 1;
};

/// N independent runs; run r uses plan.run_stream(r), so the result does not
/// depend on the worker count.
EvolutionEstimate estimate(const MarkovKernel& kernel, const DataState& initial, int steps, std::size_t runs,
                           const RandomnessPlan& plan, SimOptions options = {});

/// Per-time sample means of selected variables over `runs` runs, without
/// materialising the samples. Summation is blocked by run index so the value
/// is identical for any worker count.
std::vector<std::vector<double>> mean_evolution(const MarkovKernel& kernel, const DataState& initial, int steps,
                                                std::size_t runs, const RandomnessPlan& plan,
                                                std::span<const std::size_t> variables, SimOptions options = {});

/// |E ∩ D| / N for an indicator of D.
double empirical_measure(const SampleSet& samples, const std::function<bool(StateView)>& indicator);

/// CSV: header `run,time,<vars...>`, one row per (run, time), run-major.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t run = 0);
void write_estimate_csv(std::ostream& out, const EvolutionEstimate& estimate);

/// Runs `count` jobs on up to `workers` threads; job i is handled exactly once.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job);

} // namespace evtl
