#pragma once

#include "evtl/data_model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace evtl {

/// A finite-state Markov chain over explicit data states. Used as an exact
/// oracle: its transient laws can be computed instead of sampled.
class FiniteChain {
public:
  /// Rows must be stochastic within 1e-12 and states pairwise distinct.
  FiniteChain(std::vector<DataState> states, std::vector<std::vector<double>> transition, std::size_t initial);

  const SpaceRef& space() const { return states_.front().space_ref(); }
  const std::vector<DataState>& states() const noexcept { return states_; }
  const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }
  std::size_t initial() const noexcept { return initial_; }
  std::size_t size() const noexcept { return states_.size(); }

  const DataState& initial_state() const { return states_[initial_]; }
  /// Index of a state equal to `values`, if any.
  std::optional<std::size_t> find(std::span<const double> values) const;

  /// Laws S_0..S_steps over state indices; S_0 is the Dirac at the initial state.
  std::vector<std::vector<double>> transient(int steps) const;

private:
  std::vector<DataState> states_;
  std::vector<std::vector<double>> transition_;
  std::size_t initial_;
};

} // namespace evtl
