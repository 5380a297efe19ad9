#include "evtl/stats.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace evtl {

ErrorReport error_report(const EvolutionEstimate& estimate, const std::string& var,
                         std::optional<std::span<const double>> reference_mean) {
  if (estimate.per_step.empty()) throw NumericError("error_report: empty estimate");
  const auto v = estimate.space().index_of(var);
  const std::size_t n = estimate.runs;
  if (n < 2) throw ConfigError(fmt::format("error_report: need at least 2 runs, got {}", n));
  if (reference_mean && reference_mean->size() < estimate.per_step.size()) {
    throw ConfigError(fmt::format("error_report: reference mean covers {} steps, estimate has {}",
                                  reference_mean->size(), estimate.per_step.size()));
  }

  ErrorReport report{var, n, {}};
  const auto nd = static_cast<double>(n);
  for (std::size_t t = 0; t < estimate.per_step.size(); ++t) {
    const auto& set = estimate.per_step[t];
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += set.value(j, v);
    const double mean = sum / nd;
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = set.value(j, v) - mean;
      ss += d * d;
    }
    ErrorRow row;
    row.time = static_cast<int>(t);
    row.mean = mean;
    row.stddev = std::sqrt(ss / (nd - 1.0));
    row.stderr_mean = row.stddev / std::sqrt(nd);
    if (reference_mean && row.stderr_mean > 0.0) row.z = (mean - (*reference_mean)[t]) / row.stderr_mean;
    report.rows.push_back(row);
  }
  return report;
}

double ErrorReport::coverage() const {
  std::size_t defined = 0;
  std::size_t inside = 0;
  for (const auto& r : rows) {
    if (!r.z) continue;
    ++defined;
    if (r.within95()) ++inside;
  }
  return defined == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(defined);
}

void ErrorReport::write_csv(std::ostream& out, bool header) const {
  if (header) out << "runs,time,var,mean,stddev,stderr,z,within95\n";
  for (const auto& r : rows) {
    out << runs << ',' << r.time << ',' << var << ',' << format_real(r.mean) << ',' << format_real(r.stddev) << ','
        << format_real(r.stderr_mean) << ',' << (r.z ? format_real(*r.z) : std::string{}) << ','
        << (r.z ? (r.within95() ? "1" : "0") : "") << '\n';
  }
}

} // namespace evtl
