#include "evtl/wasserstein.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace evtl {

std::vector<double> project(const SampleSet& samples, const PenaltySpec& rho, int tau) {
  std::vector<double> out(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) out[j] = rho(samples[j], tau);
  std::stable_sort(out.begin(), out.end());
  return out;
}

double one_sided_wass_sorted(std::span<const double> omega, std::span<const double> nu) {
  if (omega.empty()) throw NumericError("compute_wass: first sample set is empty");
  if (nu.size() % omega.size() != 0) {
    throw NumericError(fmt::format("compute_wass: second sample set size {} is not a multiple of first size {}",
                                   nu.size(), omega.size()));
  }
  const std::size_t ell = nu.size() / omega.size();
  double sum = 0.0;
  // h is 0-based here: omega index ceil((h+1)/ell) - 1 == h / ell.
  for (std::size_t h = 0; h < nu.size(); ++h) sum += std::max(nu[h] - omega[h / ell], 0.0);
  return sum / static_cast<double>(nu.size());
}

double compute_wass(const SampleSet& e1, const SampleSet& e2, const PenaltySpec& rho, int tau) {
  if (e1.empty()) throw NumericError("compute_wass: first sample set is empty");
  if (e2.size() % e1.size() != 0 || e2.empty()) {
    throw NumericError(fmt::format("compute_wass: second sample set size {} is not a multiple of first size {}",
                                   e2.size(), e1.size()));
  }
  const auto omega = project(e1, rho, tau);
  const auto nu = project(e2, rho, tau);
  return one_sided_wass_sorted(omega, nu);
}

double compute_wass(const SampleSet& e1, const SampleSet& e2, const PenaltySpec& rho, std::size_t ell, int tau) {
  if (ell < 1 || e1.size() * ell != e2.size()) {
    throw NumericError(fmt::format("compute_wass: ell = {} disagrees with sizes {} and {}", ell, e1.size(), e2.size()));
  }
  return compute_wass(e1, e2, rho, tau);
}

DiscreteDist DiscreteDist::uniform(std::vector<double> values) {
  const double w = 1.0 / static_cast<double>(values.size());
  std::vector<double> weights(values.size(), w);
  return {std::move(values), std::move(weights)};
}

namespace {

struct Quantile {
  std::vector<double> values;     // ascending
  std::vector<double> cumulative; // right end of each atom's quantile interval; last == 1
};

Quantile quantile_of(const DiscreteDist& d, const char* which) {
  if (d.values.empty() || d.values.size() != d.weights.size()) {
    throw NumericError(fmt::format("exact_wass_1d: distribution {} is empty or has mismatched weights", which));
  }
  std::vector<std::size_t> order(d.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d.values[a] < d.values[b]; });

  Quantile q;
  double total = 0.0;
  for (auto i : order) {
    if (!(d.weights[i] >= 0.0)) throw NumericError(fmt::format("exact_wass_1d: negative weight in {}", which));
    total += d.weights[i];
    q.values.push_back(d.values[i]);
    q.cumulative.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw NumericError(fmt::format("exact_wass_1d: weights of {} sum to {}, not 1", which, total));
  }
  q.cumulative.back() = 1.0;
  return q;
}

} // namespace

double exact_wass_1d(const DiscreteDist& p, const DiscreteDist& q) {
  const auto qp = quantile_of(p, "p");
  const auto qq = quantile_of(q, "q");
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = 0.0;
  double total = 0.0;
  while (i < qp.values.size() && j < qq.values.size()) {
    const double cp = qp.cumulative[i];
    const double cq = qq.cumulative[j];
    const double next = std::min(cp, cq);
    if (next > prev) {
      total += std::max(qq.values[j] - qp.values[i], 0.0) * (next - prev);
      prev = next;
    }
    if (cp <= next) ++i;
    if (cq <= next) ++j;
  }
  return total;
}

EvoDistanceReport make_report(const ObservationTimes& ot, const DiscountSpec& lambda, std::span<const double> distances) {
  if (distances.size() != ot.indices().size()) throw NumericError("make_report: one distance per observation time");
  EvoDistanceReport report;
  bool first = true;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    const int tau = ot.indices()[k];
    const double l = lambda(tau);
    const double discounted = l * distances[k];
    report.per_time.push_back({tau, l, distances[k], discounted});
    if (first || discounted > report.overall) {
      report.overall = discounted;
      report.argmax_time = tau;
      first = false;
    }
  }
  return report;
}

EvoDistanceReport evolution_metric(const EvolutionEstimate& a, const EvolutionEstimate& b, const PenaltySpec& rho,
                                   const DiscountSpec& lambda, const ObservationTimes& ot, unsigned workers) {
  for (int tau : ot.indices()) {
    if (tau > a.horizon()) throw NumericError(fmt::format("evolution_metric: first estimate does not cover time {}", tau));
    if (tau > b.horizon()) throw NumericError(fmt::format("evolution_metric: second estimate does not cover time {}", tau));
  }
  if (a.runs == 0 || b.runs % a.runs != 0) {
    throw NumericError(fmt::format("evolution_metric: run count {} is not a multiple of {}", b.runs, a.runs));
  }
  std::vector<double> distances(ot.indices().size());
  parallel_for(distances.size(), workers, [&](std::size_t k) {
    const auto tau = static_cast<std::size_t>(ot.indices()[k]);
    distances[k] = compute_wass(a.per_step[tau], b.per_step[tau], rho, static_cast<int>(tau));
  });
  return make_report(ot, lambda, distances);
}

WitnessChoice choose_witness(const EvoDistanceReport& forward, const EvoDistanceReport& backward) {
  if (forward.overall >= backward.overall) return {true, forward.argmax_time, backward.overall, forward.overall};
  return {false, backward.argmax_time, forward.overall, backward.overall};
}

std::pair<FormulaPtr, int> distinguishing_formula(const EvolutionEstimate& a, const EvolutionEstimate& b,
                                                  const PenaltySpec& rho, const DiscountSpec& lambda,
                                                  const ObservationTimes& ot) {
  const auto fwd = evolution_metric(a, b, rho, lambda, ot);
  // The reverse direction needs |A| to be a multiple of |B|; B's sets are
  // truncated to |A| when the counts differ.
  const EvolutionEstimate* b_back = &b;
  EvolutionEstimate trimmed;
  if (a.runs != b.runs) {
    trimmed.runs = a.runs;
    trimmed.seed = b.seed;
    for (const auto& s : b.per_step) trimmed.per_step.push_back(s.prefix(a.runs));
    b_back = &trimmed;
  }
  const auto bwd = evolution_metric(*b_back, a, rho, lambda, ot);
  const auto choice = choose_witness(fwd, bwd);
  const auto& source = choice.forward ? a : b;
  auto mu = DistributionSpec::empirical(source.per_step[static_cast<std::size_t>(choice.tau)]);
  return {target(std::move(mu), rho, std::clamp(choice.p, 0.0, 1.0)), choice.tau};
}

void EvoDistanceReport::write_csv(std::ostream& out) const {
  out << "tau,lambda,distance,discounted\n";
  for (const auto& e : per_time) {
    out << e.tau << ',' << format_real(e.lambda) << ',' << format_real(e.distance) << ',' << format_real(e.discounted)
        << '\n';
  }
}

void EvoDistanceReport::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["overall"] = overall;
  j["argmax_time"] = argmax_time;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : per_time) {
    rows.push_back({{"tau", e.tau}, {"lambda", e.lambda}, {"distance", e.distance}, {"discounted", e.discounted}});
  }
  j["per_time"] = std::move(rows);
  out << j.dump(2) << '\n';
}

} // namespace evtl
