#include "evtl/finite_chain.hpp"

#include "evtl/error.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace evtl {

FiniteChain::FiniteChain(std::vector<DataState> states, std::vector<std::vector<double>> transition,
                         std::size_t initial)
    : states_(std::move(states)), transition_(std::move(transition)), initial_(initial) {
  if (states_.empty()) throw ConfigError("finite chain: no states");
  if (initial_ >= states_.size()) throw ConfigError(fmt::format("finite chain: initial index {} out of range", initial_));
  if (transition_.size() != states_.size()) {
    throw ConfigError(fmt::format("finite chain: {} rows for {} states", transition_.size(), states_.size()));
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].space_ref() != states_.front().space_ref()) throw ConfigError("finite chain: mixed data spaces");
    for (std::size_t j = 0; j < i; ++j) {
      if (states_[i] == states_[j]) throw ConfigError(fmt::format("finite chain: states {} and {} coincide", j, i));
    }
    const auto& row = transition_[i];
    if (row.size() != states_.size()) throw ConfigError(fmt::format("finite chain: row {} has {} entries", i, row.size()));
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw ConfigError(fmt::format("finite chain: row {} has a negative entry", i));
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError(fmt::format("finite chain: row {} sums to {}", i, total));
  }
}

std::optional<std::size_t> FiniteChain::find(std::span<const double> values) const {
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (std::ranges::equal(states_[i].values(), values)) return i;
  }
  return std::nullopt;
}

std::vector<std::vector<double>> FiniteChain::transient(int steps) const {
  const auto n = states_.size();
  std::vector<std::vector<double>> laws;
  std::vector<double> law(n, 0.0);
  law[initial_] = 1.0;
  laws.push_back(law);
  for (int t = 0; t < steps; ++t) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (law[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += law[i] * transition_[i][j];
    }
    law = std::move(next);
    laws.push_back(law);
  }
  return laws;
}

} // namespace evtl
