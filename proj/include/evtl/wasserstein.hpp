#pragma once

// One-sided Wasserstein distance over penalty-projected samples, an exact
// quantile-integral oracle, and the evolution metric between two systems.

#include "evtl/data_model.hpp"
#include "evtl/formula.hpp"
#include "evtl/kernel_sim.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace evtl {

/// Penalty values of a sample set, sorted ascending.
std::vector<double> project(const SampleSet& samples, const PenaltySpec& rho, int tau = 0);

/// (1/|nu|) * sum_h max{nu_h - omega_ceil(h/ell), 0} for sorted inputs where
/// |nu| = ell * |omega|.
double one_sided_wass_sorted(std::span<const double> omega, std::span<const double> nu);

/// Estimates W(m_rho)(mu, nu) from E1 ~ mu (N samples) and E2 ~ nu (ell*N
/// samples); ell is inferred from the sizes.
double compute_wass(const SampleSet& e1, const SampleSet& e2, const PenaltySpec& rho, int tau = 0);
/// Same, but `ell` must agree with the cardinalities.
double compute_wass(const SampleSet& e1, const SampleSet& e2, const PenaltySpec& rho, std::size_t ell, int tau);

/// A finite distribution on the real line.
struct DiscreteDist {
  std::vector<double> values;
  std::vector<double> weights;

  static DiscreteDist uniform(std::vector<double> values);
  static DiscreteDist dirac(double value) { return {{value}, {1.0}}; }
};

/// ∫_0^1 max{F_q^{-1}(r) - F_p^{-1}(r), 0} dr, computed exactly by merging the
/// quantile breakpoints of both distributions.
double exact_wass_1d(const DiscreteDist& p, const DiscreteDist& q);

struct EvoDistanceEntry {
  int tau;
  double lambda;
  double distance;
  double discounted;
};

struct EvoDistanceReport {
  std::vector<EvoDistanceEntry> per_time;
  double overall = 0.0;
  int argmax_time = 0; // lowest tau attaining the max

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

/// Builds a report from per-time distances (in observation-time order).
EvoDistanceReport make_report(const ObservationTimes& ot, const DiscountSpec& lambda, std::span<const double> distances);

/// max over tau in OT of lambda(tau) * W(A_tau, B_tau).
EvoDistanceReport evolution_metric(const EvolutionEstimate& a, const EvolutionEstimate& b, const PenaltySpec& rho,
                                   const DiscountSpec& lambda, const ObservationTimes& ot, unsigned workers = 1);

/// Which of the two directions dominates and where.
struct WitnessChoice {
  bool forward;  // true: A -> B dominates (ties included)
  int tau;       // argmax time of the dominating direction
  double p;      // discounted max of the other direction
  double gap;    // discounted max of the dominating direction
};
WitnessChoice choose_witness(const EvoDistanceReport& forward, const EvoDistanceReport& backward);

/// A target atom whose robustness on A and B at the returned time differs by
/// the symmetrised evolution metric. mu is the empirical law of the dominating
/// system at its argmax time.
std::pair<FormulaPtr, int> distinguishing_formula(const EvolutionEstimate& a, const EvolutionEstimate& b,
                                                  const PenaltySpec& rho, const DiscountSpec& lambda,
                                                  const ObservationTimes& ot);

} // namespace evtl
