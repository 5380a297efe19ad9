#include "evtl/robustness.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace evtl {

UntilMode parse_until_mode(std::string_view text) {
  if (text == "semantics") return UntilMode::Semantics;
  if (text == "figure") return UntilMode::Figure;
  throw ConfigError(fmt::format("until mode '{}': expected semantics or figure", text));
}

void RobustnessSeries::write_csv(std::ostream& out) const {
  out << "time,value,reliable\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i << ',' << format_real(values[i]) << ',' << (reliable(i) ? 1 : 0) << '\n';
  }
}

std::vector<double> until_combine(std::span<const double> v1, std::span<const double> v2, int a, int b,
                                  UntilMode mode) {
  if (a < 0 || a > b) throw ConfigError(fmt::format("until interval [{},{}] must satisfy 0 <= a <= b", a, b));
  if (v1.size() != v2.size()) throw NumericError("until_combine: series of different lengths");
  const auto len = static_cast<long>(v1.size());
  const long k = len - 1;
  std::vector<double> out(v1.size(), -1.0);
  for (long i = 0; i <= k; ++i) {
    const long first = i + a;
    const long last = std::min<long>(i + b, k);
    if (first > k) continue;
    double best = -std::numeric_limits<double>::infinity();
    if (mode == UntilMode::Semantics) {
      double prefix = std::numeric_limits<double>::infinity(); // min of v1 over [first, t)
      for (long t = first; t <= last; ++t) {
        const double inner = std::min(v2[t], std::min(prefix, 1.0));
        best = std::max(best, inner);
        prefix = std::min(prefix, v1[t]);
      }
    } else {
      double prefix = std::numeric_limits<double>::infinity(); // min of v1 over [i, t]
      for (long h = i; h < first; ++h) prefix = std::min(prefix, v1[h]);
      for (long t = first; t <= last; ++t) {
        prefix = std::min(prefix, v1[t]);
        best = std::max(best, std::min(prefix, v2[t]));
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using AtomFn = std::function<std::vector<double>(const AtomNode&, const StreamKey&)>;

// Shared recursion over the formula; only atoms differ between the
// statistical and the exact evaluators.
std::vector<double> eval_tree(const Formula& phi, std::size_t length, const AtomFn& atom, const StreamKey& key,
                              UntilMode mode) {
  return std::visit(overloaded{
                        [&](const TrueNode&) { return std::vector<double>(length, 1.0); },
                        [&](const AtomNode& n) { return atom(n, key); },
                        [&](const NotNode& n) {
                          auto v = eval_tree(*n.arg, length, atom, key.child(0), mode);
                          for (auto& x : v) x = -x;
                          return v;
                        },
                        [&](const OrNode& n) {
                          auto v1 = eval_tree(*n.lhs, length, atom, key.child(1), mode);
                          const auto v2 = eval_tree(*n.rhs, length, atom, key.child(2), mode);
                          for (std::size_t i = 0; i < length; ++i) v1[i] = std::max(v1[i], v2[i]);
                          return v1;
                        },
                        [&](const UntilNode& n) {
                          const auto v1 = eval_tree(*n.lhs, length, atom, key.child(1), mode);
                          const auto v2 = eval_tree(*n.rhs, length, atom, key.child(2), mode);
                          return until_combine(v1, v2, n.a, n.b, mode);
                        },
                    },
                    phi.node());
}

RobustnessSeries finish(std::vector<double> values, const Formula& phi) {
  RobustnessSeries out;
  out.reliable_up_to = static_cast<int>(values.size()) - 1 - horizon(phi);
  if (out.reliable_up_to < -1) out.reliable_up_to = -1;
  out.values = std::move(values);
  return out;
}

} // namespace

RobustnessSeries eval(const EvolutionEstimate& estimate, const Formula& phi, std::size_t ell, std::size_t n,
                      const DiscountSpec& lambda, const StreamKey& key, EvalOptions options) {
  if (ell < 1 || n < 1) throw ConfigError("eval: ell and N must be at least 1");
  if (estimate.per_step.empty()) throw NumericError("eval: empty estimate");
  if (estimate.runs != ell * n) {
    throw NumericError(fmt::format("eval: estimate holds {} samples per step, expected ell*N = {}", estimate.runs,
                                   ell * n));
  }
  const int k = estimate.horizon();
  if (horizon(phi) > k) {
    throw NumericError(fmt::format("eval: formula horizon {} exceeds available steps {}", horizon(phi), k));
  }
  const auto length = static_cast<std::size_t>(k) + 1;

  AtomFn atom = [&](const AtomNode& node, const StreamKey& atom_key) {
    std::vector<double> v(length);
    parallel_for(length, options.workers, [&](std::size_t i) {
      auto rng = atom_key.child(i).engine();
      const int tau = static_cast<int>(i);
      const auto& sampled = estimate.per_step[i];
      if (node.kind == AtomKind::Target) {
        const auto mu = sample_dist(node.dist, n, rng);
        v[i] = node.p - lambda(tau) * compute_wass(mu, sampled, *node.penalty, tau);
      } else {
        const auto mu = sample_dist(node.dist, ell * n, rng);
        v[i] = lambda(tau) * compute_wass(sampled.prefix(n), mu, *node.penalty, tau) - node.p;
      }
    });
    return v;
  };
  return finish(eval_tree(phi, length, atom, key, options.until_mode), phi);
}

RobustnessSeries sat(const MarkovKernel& kernel, const DataState& initial, const Formula& phi, std::size_t ell,
                     std::size_t n, const DiscountSpec& lambda, const RandomnessPlan& plan, SatOptions options) {
  if (ell < 1 || n < 1) throw ConfigError("sat: ell and N must be at least 1");
  const int k = std::max(horizon(phi), options.steps);
  const auto est = estimate(kernel, initial, k, ell * n, plan, SimOptions{options.eval.workers});
  return eval(est, phi, ell, n, lambda, plan.monitor_key(), options.eval);
}

DistributionSpec chain_law(const FiniteChain& chain, int tau) {
  auto laws = chain.transient(tau);
  auto weights = std::move(laws.back());
  double total = 0.0;
  for (double w : weights) total += w;
  for (auto& w : weights) w /= total;
  SampleSet states(chain.space());
  for (const auto& s : chain.states()) states.push_back(s.view());
  return DistributionSpec::empirical(std::move(states), std::move(weights));
}

namespace {

DiscreteDist project_weighted(const SampleSet& states, std::span<const double> weights, const PenaltySpec& rho, int tau) {
  DiscreteDist d;
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t j = 0; j < states.size(); ++j) {
    d.values.push_back(rho(states[j], tau));
    d.weights.push_back(weights[j] / total);
  }
  return d;
}

DiscreteDist project_chain(const FiniteChain& chain, std::span<const double> law, const PenaltySpec& rho, int tau) {
  SampleSet states(chain.space());
  for (const auto& s : chain.states()) states.push_back(s.view());
  return project_weighted(states, law, rho, tau);
}

DiscreteDist project_dist(const DistributionSpec& dist, const PenaltySpec& rho, int tau) {
  if (!dist.finite_support()) {
    throw ConfigError("exact oracle supports only point and empirical atom distributions");
  }
  const auto support = support_of(dist);
  return project_weighted(support.states, support.weights, rho, tau);
}

} // namespace

RobustnessSeries exact_robustness(const FiniteChain& chain, const Formula& phi, const DiscountSpec& lambda, int steps,
                                  UntilMode mode) {
  const int k = std::max(horizon(phi), steps);
  const auto laws = chain.transient(k);
  const auto length = static_cast<std::size_t>(k) + 1;

  AtomFn atom = [&](const AtomNode& node, const StreamKey&) {
    if (node.dist.space() != chain.space()) throw ConfigError("atom distribution is over a different data space");
    std::vector<double> v(length);
    for (std::size_t i = 0; i < length; ++i) {
      const int tau = static_cast<int>(i);
      const auto system = project_chain(chain, laws[i], *node.penalty, tau);
      const auto mu = project_dist(node.dist, *node.penalty, tau);
      v[i] = node.kind == AtomKind::Target ? node.p - lambda(tau) * exact_wass_1d(mu, system)
                                           : lambda(tau) * exact_wass_1d(system, mu) - node.p;
    }
    return v;
  };
  return finish(eval_tree(phi, length, atom, StreamKey(0), mode), phi);
}

EvoDistanceReport exact_evolution_metric(const FiniteChain& a, const FiniteChain& b, const PenaltySpec& rho,
                                         const DiscountSpec& lambda, const ObservationTimes& ot) {
  if (a.space()->names() != b.space()->names()) {
    throw ConfigError("exact_evolution_metric: chains over different variables");
  }
  const auto la = a.transient(ot.max());
  const auto lb = b.transient(ot.max());
  std::vector<double> distances;
  for (int tau : ot.indices()) {
    const auto t = static_cast<std::size_t>(tau);
    distances.push_back(exact_wass_1d(project_chain(a, la[t], rho, tau), project_chain(b, lb[t], rho, tau)));
  }
  return make_report(ot, lambda, distances);
}

std::pair<FormulaPtr, int> exact_distinguishing_formula(const FiniteChain& a, const FiniteChain& b,
                                                        const PenaltySpec& rho, const DiscountSpec& lambda,
                                                        const ObservationTimes& ot) {
  const auto choice = choose_witness(exact_evolution_metric(a, b, rho, lambda, ot),
                                     exact_evolution_metric(b, a, rho, lambda, ot));
  auto mu = chain_law(choice.forward ? a : b, choice.tau);
  return {target(std::move(mu), rho, std::clamp(choice.p, 0.0, 1.0)), choice.tau};
}

} // namespace evtl
