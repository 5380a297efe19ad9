#pragma once

// Evolution Temporal Logic formulae: distributions carried by atoms, the
// abstract syntax tree, macro constructors and structural queries.

#include "evtl/data_model.hpp"
#include "evtl/random.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace evtl {

struct NormalComponent {
  std::string var;
  double mean = 0.0;
  double variance = 0.0;
};

/// Independent per-variable normals, each clamped into its domain.
struct ProductNormal {
  std::vector<NormalComponent> components;
};

struct PointMass {
  DataState state;
  std::vector<std::string> vars; // the variables the source actually fixed
};

/// A finite set of states, drawn with replacement. Empty weights mean uniform.
struct EmpiricalDist {
  SampleSet samples;
  std::vector<double> weights;
  std::vector<std::string> vars;
  std::string source; // file path when loaded from disk
};

class DistributionSpec {
public:
  using Kind = std::variant<ProductNormal, PointMass, EmpiricalDist>;

  DistributionSpec(SpaceRef space, Kind kind);

  static DistributionSpec normal(SpaceRef space, std::vector<NormalComponent> components);
  static DistributionSpec point(const DataState& state, std::vector<std::string> vars = {});
  static DistributionSpec empirical(SampleSet samples, std::vector<double> weights = {}, std::string source = {});

  const SpaceRef& space() const noexcept { return space_; }
  const Kind& kind() const noexcept { return kind_; }
  /// var(mu)
  std::vector<std::string> vars() const;

  /// True for point masses and finite empirical distributions.
  bool finite_support() const { return !std::holds_alternative<ProductNormal>(kind_); }

private:
  SpaceRef space_;
  Kind kind_;
};

/// n i.i.d. draws from `dist`.
SampleSet sample_dist(const DistributionSpec& dist, std::size_t n, Engine& rng);

/// Atoms with finite support as (state, probability) pairs.
struct WeightedStates {
  SampleSet states;
  std::vector<double> weights;
};
WeightedStates support_of(const DistributionSpec& dist);

// ---------------------------------------------------------------------------

enum class AtomKind { Target, Hazard };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct TrueNode {};
struct AtomNode {
  AtomKind kind;
  DistributionSpec dist;
  std::shared_ptr<const PenaltySpec> penalty;
  double p;
};
struct NotNode {
  FormulaPtr arg;
};
struct OrNode {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct UntilNode {
  FormulaPtr lhs;
  int a;
  int b;
  FormulaPtr rhs;
};

/// Immutable formula node. Build through the free constructors below.
class Formula {
public:
  using Node = std::variant<TrueNode, AtomNode, NotNode, OrNode, UntilNode>;

  explicit Formula(Node node) : node_(std::move(node)) {}
  const Node& node() const noexcept { return node_; }

private:
  Node node_;
};

FormulaPtr make_true();
/// <mu>^rho_p. Checks p in [0,1] and var(rho) ⊆ var(mu).
FormulaPtr target(DistributionSpec dist, PenaltySpec penalty, double p);
/// >mu<^rho_p.
FormulaPtr hazard(DistributionSpec dist, PenaltySpec penalty, double p);
FormulaPtr negate(FormulaPtr arg);
FormulaPtr disj(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr until(FormulaPtr lhs, int a, int b, FormulaPtr rhs);

// Macros, expanded on construction.
FormulaPtr conj(FormulaPtr lhs, FormulaPtr rhs);     // !(!l || !r)
FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);  // !l || r
FormulaPtr eventually(int a, int b, FormulaPtr arg); // true U[a,b] arg
FormulaPtr always(int a, int b, FormulaPtr arg);     // !F[a,b] !arg

/// Number of future steps evaluation at time 0 may inspect.
int horizon(const Formula& phi);

/// Structural equality (distributions compared by value, penalties by name).
bool same_structure(const Formula& a, const Formula& b);

/// Core-syntax rendering accepted by the parser (empirical atoms only when
/// they came from a file).
std::string to_string(const Formula& phi);
std::string to_string(const DistributionSpec& dist);

} // namespace evtl
