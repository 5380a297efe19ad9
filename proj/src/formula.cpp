#include "evtl/formula.hpp"

#include "evtl/csv.hpp"
#include "evtl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace evtl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> default_values(const DataSpace& space) {
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out[i] = space.variable(i).clamp(0.0);
  return out;
}

} // namespace

DistributionSpec::DistributionSpec(SpaceRef space, Kind kind) : space_(std::move(space)), kind_(std::move(kind)) {
  if (!space_) throw ConfigError("distribution without a data space");
  std::visit(overloaded{
                 [&](const ProductNormal& n) {
                   if (n.components.empty()) throw ConfigError("normal distribution without components");
                   std::vector<std::string> seen;
                   for (const auto& c : n.components) {
                     space_->index_of(c.var);
                     if (!(c.variance >= 0.0)) {
                       throw ConfigError(fmt::format("normal({}): negative variance {}", c.var, c.variance));
                     }
                     if (std::ranges::find(seen, c.var) != seen.end()) {
                       throw ConfigError(fmt::format("normal: variable '{}' given twice", c.var));
                     }
                     seen.push_back(c.var);
                   }
                 },
                 [&](const PointMass& p) {
                   if (p.state.space_ref() != space_) throw ConfigError("point mass over a different data space");
                   for (const auto& v : p.vars) space_->index_of(v);
                 },
                 [&](const EmpiricalDist& e) {
                   if (e.samples.space_ref() != space_) throw ConfigError("empirical sample over a different data space");
                   if (e.samples.empty()) throw ConfigError("empirical distribution has no samples");
                   if (!e.weights.empty()) {
                     if (e.weights.size() != e.samples.size()) {
                       throw ConfigError("empirical distribution: weight count differs from sample count");
                     }
                     double total = 0.0;
                     for (double w : e.weights) {
                       if (!(w >= 0.0)) throw ConfigError("empirical distribution: negative weight");
                       total += w;
                     }
                     if (std::abs(total - 1.0) > 1e-9) {
                       throw ConfigError(fmt::format("empirical distribution: weights sum to {}", total));
                     }
                   }
                   for (const auto& v : e.vars) space_->index_of(v);
                 },
             },
             kind_);
}

DistributionSpec DistributionSpec::normal(SpaceRef space, std::vector<NormalComponent> components) {
  return {std::move(space), ProductNormal{std::move(components)}};
}

DistributionSpec DistributionSpec::point(const DataState& state, std::vector<std::string> vars) {
  if (vars.empty()) vars = state.space().names();
  return {state.space_ref(), PointMass{state, std::move(vars)}};
}

DistributionSpec DistributionSpec::empirical(SampleSet samples, std::vector<double> weights, std::string source) {
  auto space = samples.space_ref();
  auto vars = space->names();
  return {std::move(space), EmpiricalDist{std::move(samples), std::move(weights), std::move(vars), std::move(source)}};
}

std::vector<std::string> DistributionSpec::vars() const {
  return std::visit(overloaded{
                        [](const ProductNormal& n) {
                          std::vector<std::string> out;
                          for (const auto& c : n.components) out.push_back(c.var);
                          return out;
                        },
                        [](const PointMass& p) { return p.vars; },
                        [](const EmpiricalDist& e) { return e.vars; },
                    },
                    kind_);
}

SampleSet sample_dist(const DistributionSpec& dist, std::size_t n, Engine& rng) {
  if (n < 1) throw ConfigError("sample_dist: sample count must be at least 1");
  const auto& space = dist.space();
  return std::visit(
      overloaded{
          [&](const ProductNormal& normal) {
            SampleSet out(dist.space(), n);
            const auto base = default_values(*space);
            std::vector<std::size_t> index;
            for (const auto& c : normal.components) index.push_back(space->index_of(c.var));
            for (std::size_t j = 0; j < n; ++j) {
              auto row = out.mutable_row(j);
              std::ranges::copy(base, row.begin());
              for (std::size_t c = 0; c < index.size(); ++c) {
                const auto& comp = normal.components[c];
                row[index[c]] = space->variable(index[c]).clamp(draw_normal(rng, comp.mean, comp.variance));
              }
            }
            return out;
          },
          [&](const PointMass& point) { return SampleSet::repeat(point.state, n); },
          [&](const EmpiricalDist& emp) {
            SampleSet out(dist.space(), n);
            if (emp.weights.empty()) {
              std::uniform_int_distribution<std::size_t> pick(0, emp.samples.size() - 1);
              for (std::size_t j = 0; j < n; ++j) std::ranges::copy(emp.samples.row(pick(rng)), out.mutable_row(j).begin());
            } else {
              std::discrete_distribution<std::size_t> pick(emp.weights.begin(), emp.weights.end());
              for (std::size_t j = 0; j < n; ++j) std::ranges::copy(emp.samples.row(pick(rng)), out.mutable_row(j).begin());
            }
            return out;
          },
      },
      dist.kind());
}

WeightedStates support_of(const DistributionSpec& dist) {
  return std::visit(overloaded{
                        [](const ProductNormal&) -> WeightedStates {
                          throw ConfigError("continuous (normal) distribution has no finite support");
                        },
                        [](const PointMass& p) { return WeightedStates{SampleSet::repeat(p.state, 1), {1.0}}; },
                        [](const EmpiricalDist& e) {
                          auto weights = e.weights;
                          if (weights.empty()) {
                            weights.assign(e.samples.size(), 1.0 / static_cast<double>(e.samples.size()));
                          }
                          return WeightedStates{e.samples, std::move(weights)};
                        },
                    },
                    dist.kind());
}

// ---------------------------------------------------------------------------

namespace {

FormulaPtr make(Formula::Node node) { return std::make_shared<const Formula>(std::move(node)); }

void require(const FormulaPtr& f, const char* what) {
  if (!f) throw ConfigError(fmt::format("{}: null subformula", what));
}

FormulaPtr atom(AtomKind kind, DistributionSpec dist, PenaltySpec penalty, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(fmt::format("atom threshold p = {} outside [0,1]", p));
  const auto mu_vars = dist.vars();
  for (const auto& v : penalty.vars()) {
    if (std::ranges::find(mu_vars, v) == mu_vars.end()) {
      throw ConfigError(fmt::format("penalty '{}' reads variable '{}' which the distribution does not define",
                                    penalty.name(), v));
    }
  }
  return make(AtomNode{kind, std::move(dist), std::make_shared<const PenaltySpec>(std::move(penalty)), p});
}

} // namespace

FormulaPtr make_true() { return make(TrueNode{}); }

FormulaPtr target(DistributionSpec dist, PenaltySpec penalty, double p) {
  return atom(AtomKind::Target, std::move(dist), std::move(penalty), p);
}

FormulaPtr hazard(DistributionSpec dist, PenaltySpec penalty, double p) {
  return atom(AtomKind::Hazard, std::move(dist), std::move(penalty), p);
}

FormulaPtr negate(FormulaPtr arg) {
  require(arg, "negate");
  return make(NotNode{std::move(arg)});
}

FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs) {
  require(lhs, "or");
  require(rhs, "or");
  return make(OrNode{std::move(lhs), std::move(rhs)});
}

FormulaPtr until(FormulaPtr lhs, int a, int b, FormulaPtr rhs) {
  require(lhs, "until");
  require(rhs, "until");
  if (a < 0 || a > b) throw ConfigError(fmt::format("until interval [{},{}] must satisfy 0 <= a <= b", a, b));
  return make(UntilNode{std::move(lhs), a, b, std::move(rhs)});
}

FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs) {
  return negate(disj(negate(std::move(lhs)), negate(std::move(rhs))));
}

FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs) { return disj(negate(std::move(lhs)), std::move(rhs)); }

FormulaPtr eventually(int a, int b, FormulaPtr arg) { return until(make_true(), a, b, std::move(arg)); }

FormulaPtr always(int a, int b, FormulaPtr arg) { return negate(eventually(a, b, negate(std::move(arg)))); }

int horizon(const Formula& phi) {
  return std::visit(overloaded{
                        [](const TrueNode&) { return 0; },
                        [](const AtomNode&) { return 0; },
                        [](const NotNode& n) { return horizon(*n.arg); },
                        [](const OrNode& n) { return std::max(horizon(*n.lhs), horizon(*n.rhs)); },
                        [](const UntilNode& n) { return n.b + std::max(horizon(*n.lhs), horizon(*n.rhs)); },
                    },
                    phi.node());
}

namespace {

bool same_dist(const DistributionSpec& a, const DistributionSpec& b) {
  if (a.space() != b.space() || a.kind().index() != b.kind().index()) return false;
  return std::visit(overloaded{
                        [&](const ProductNormal& x) {
                          const auto& y = std::get<ProductNormal>(b.kind());
                          if (x.components.size() != y.components.size()) return false;
                          for (std::size_t i = 0; i < x.components.size(); ++i) {
                            const auto& c = x.components[i];
                            const auto& d = y.components[i];
                            if (c.var != d.var || c.mean != d.mean || c.variance != d.variance) return false;
                          }
                          return true;
                        },
                        [&](const PointMass& x) {
                          const auto& y = std::get<PointMass>(b.kind());
                          return x.state == y.state && x.vars == y.vars;
                        },
                        [&](const EmpiricalDist& x) {
                          const auto& y = std::get<EmpiricalDist>(b.kind());
                          return x.samples == y.samples && x.weights == y.weights && x.vars == y.vars;
                        },
                    },
                    a.kind());
}

} // namespace

bool same_structure(const Formula& a, const Formula& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(overloaded{
                        [](const TrueNode&) { return true; },
                        [&](const AtomNode& x) {
                          const auto& y = std::get<AtomNode>(b.node());
                          return x.kind == y.kind && x.p == y.p && x.penalty->name() == y.penalty->name() &&
                                 same_dist(x.dist, y.dist);
                        },
                        [&](const NotNode& x) { return same_structure(*x.arg, *std::get<NotNode>(b.node()).arg); },
                        [&](const OrNode& x) {
                          const auto& y = std::get<OrNode>(b.node());
                          return same_structure(*x.lhs, *y.lhs) && same_structure(*x.rhs, *y.rhs);
                        },
                        [&](const UntilNode& x) {
                          const auto& y = std::get<UntilNode>(b.node());
                          return x.a == y.a && x.b == y.b && same_structure(*x.lhs, *y.lhs) &&
                                 same_structure(*x.rhs, *y.rhs);
                        },
                    },
                    a.node());
}

std::string to_string(const DistributionSpec& dist) {
  return std::visit(overloaded{
                        [](const ProductNormal& n) {
                          std::string out = "normal(";
                          for (std::size_t i = 0; i < n.components.size(); ++i) {
                            const auto& c = n.components[i];
                            if (i > 0) out += ", ";
                            out += fmt::format("{}; {}, {}", c.var, format_real(c.mean), format_real(c.variance));
                          }
                          return out + ")";
                        },
                        [](const PointMass& p) {
                          std::string out = "point(";
                          for (std::size_t i = 0; i < p.vars.size(); ++i) {
                            if (i > 0) out += ", ";
                            out += fmt::format("{} = {}", p.vars[i], format_real(p.state.at(p.vars[i])));
                          }
                          return out + ")";
                        },
                        [](const EmpiricalDist& e) {
                          if (e.source.empty()) return fmt::format("empirical(<{} in-memory samples>)", e.samples.size());
                          return fmt::format("empirical(\"{}\")", e.source);
                        },
                    },
                    dist.kind());
}

std::string to_string(const Formula& phi) {
  return std::visit(overloaded{
                        [](const TrueNode&) -> std::string { return "true"; },
                        [](const AtomNode& n) {
                          return fmt::format("{}({}, {}, {})", n.kind == AtomKind::Target ? "target" : "hazard",
                                             to_string(n.dist), n.penalty->name(), format_real(n.p));
                        },
                        [](const NotNode& n) { return fmt::format("!({})", to_string(*n.arg)); },
                        [](const OrNode& n) { return fmt::format("({} || {})", to_string(*n.lhs), to_string(*n.rhs)); },
                        [](const UntilNode& n) {
                          return fmt::format("({} U[{},{}] {})", to_string(*n.lhs), n.a, n.b, to_string(*n.rhs));
                        },
                    },
                    phi.node());
}

} // namespace evtl
