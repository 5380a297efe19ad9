#pragma once

// Statistical robustness monitor and its exact counterpart on finite chains.

#include "evtl/data_model.hpp"
#include "evtl/finite_chain.hpp"
#include "evtl/formula.hpp"
#include "evtl/kernel_sim.hpp"
#include "evtl/random.hpp"
#include "evtl/wasserstein.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace evtl {

/// How the bounded-until window treats the left operand.
///  - Semantics: min of v1 over [i+a, t') (exclusive, empty min = +1).
///  - Figure: min of v1 over [i, t'] (inclusive, starting at i). Stricter.
enum class UntilMode { Semantics, Figure };

UntilMode parse_until_mode(std::string_view text);

/// v_0..v_k. Entries past reliable_up_to depend on windows cut short by the
/// simulation horizon; they are emitted but flagged.
struct RobustnessSeries {
  std::vector<double> values;
  int reliable_up_to = -1;

  int horizon() const { return static_cast<int>(values.size()) - 1; }
  bool reliable(std::size_t i) const { return static_cast<int>(i) <= reliable_up_to; }
  double robust() const { return values.front(); }

  /// Columns: time,value,reliable
  void write_csv(std::ostream& out) const;
};

/// Combines two robustness series for phi1 U[a,b] phi2. Windows are clamped at
/// the last index; a window that starts past it yields -1.
std::vector<double> until_combine(std::span<const double> v1, std::span<const double> v2, int a, int b,
                                  UntilMode mode = UntilMode::Semantics);

struct EvalOptions {
  UntilMode until_mode = UntilMode::Semantics;
  unsigned workers = 1;
};

/// Robustness series of `phi` over an estimate whose sets hold ell*n samples.
/// Atom distributions are sampled afresh from substreams of `key` derived from
/// the atom's position in the tree and the time index.
RobustnessSeries eval(const EvolutionEstimate& estimate, const Formula& phi, std::size_t ell, std::size_t n,
                      const DiscountSpec& lambda, const StreamKey& key, EvalOptions options = {});

struct SatOptions {
  int steps = 0; // simulate at least this many steps (formula horizon is the floor)
  EvalOptions eval;
};

/// Simulates ell*n runs up to max(horizon(phi), steps) and evaluates phi.
RobustnessSeries sat(const MarkovKernel& kernel, const DataState& initial, const Formula& phi, std::size_t ell,
                     std::size_t n, const DiscountSpec& lambda, const RandomnessPlan& plan, SatOptions options = {});

/// Exact robustness on a finite chain. Atoms must have finite support.
RobustnessSeries exact_robustness(const FiniteChain& chain, const Formula& phi, const DiscountSpec& lambda,
                                  int steps = 0, UntilMode mode = UntilMode::Semantics);

/// Exact per-time one-sided distance W(S_a,tau, S_b,tau) for tau in OT.
EvoDistanceReport exact_evolution_metric(const FiniteChain& a, const FiniteChain& b, const PenaltySpec& rho,
                                         const DiscountSpec& lambda, const ObservationTimes& ot);

/// Witness formula built from exact transient laws.
std::pair<FormulaPtr, int> exact_distinguishing_formula(const FiniteChain& a, const FiniteChain& b,
                                                        const PenaltySpec& rho, const DiscountSpec& lambda,
                                                        const ObservationTimes& ot);

/// Law of the chain at `tau` as a weighted empirical distribution.
DistributionSpec chain_law(const FiniteChain& chain, int tau);

} // namespace evtl
