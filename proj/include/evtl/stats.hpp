#pragma once

// Standard-error analysis of an empirical evolution sequence.

#include "evtl/kernel_sim.hpp"

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evtl {

struct ErrorRow {
  int time = 0;
  double mean = 0.0;
  double stddev = 0.0; // N-1 denominator
  double stderr_mean = 0.0;
  std::optional<double> z; // absent without a reference mean or when stderr is 0
  bool within95() const { return z && std::abs(*z) <= 1.96; }
};

struct ErrorReport {
  std::string var;
  std::size_t runs = 0;
  std::vector<ErrorRow> rows;

  /// Fraction of rows with a defined z-score that fall inside ±1.96.
  double coverage() const;
  /// Columns: runs,time,var,mean,stddev,stderr,z,within95 (z empty when undefined).
  void write_csv(std::ostream& out, bool header = true) const;
};

/// Per-time sample statistics for `var`; `reference_mean`, when given, must
/// cover every time index and yields z-scores.
ErrorReport error_report(const EvolutionEstimate& estimate, const std::string& var,
                         std::optional<std::span<const double>> reference_mean = std::nullopt);

/// The run counts swept in the standard-error study.
inline constexpr std::array<std::size_t, 5> kRunSweep{100, 500, 1000, 5000, 10000};

} // namespace evtl
