#pragma once

// Core domain types: variables, data spaces, data states, sample sets,
// penalty functions, discount functions and observation times.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evtl {

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FiniteSet {
  std::vector<double> values; // kept sorted ascending
};

using Domain = std::variant<ClosedInterval, FiniteSet>;

/// A named variable with a compact or finite domain.
class VariableSpec {
public:
  static VariableSpec interval(std::string name, double lo, double hi);
  static VariableSpec finite(std::string name, std::vector<double> values);

  const std::string& name() const noexcept { return name_; }
  const Domain& domain() const noexcept { return domain_; }

  /// Clamps into an interval, or snaps to the nearest finite member
  /// (ties go to the smaller member).
  double clamp(double value) const;
  bool contains(double value) const;

private:
  VariableSpec(std::string name, Domain domain) : name_(std::move(name)), domain_(std::move(domain)) {}

  std::string name_;
  Domain domain_;
};

/// Ordered list of variables; the order is fixed for the lifetime of the space.
class DataSpace {
public:
  explicit DataSpace(std::vector<VariableSpec> variables);

  std::size_t size() const noexcept { return variables_.size(); }
  const VariableSpec& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ConfigError naming the variable when absent.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::string> names() const;

private:
  std::vector<VariableSpec> variables_;
};

using SpaceRef = std::shared_ptr<const DataSpace>;

SpaceRef make_space(std::vector<VariableSpec> variables);

/// Non-owning view of one data state's values.
class StateView {
public:
  StateView(const DataSpace& space, std::span<const double> values) : space_(&space), values_(values) {}

  const DataSpace& space() const noexcept { return *space_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::string_view name) const { return values_[space_->index_of(name)]; }

private:
  const DataSpace* space_;
  std::span<const double> values_;
};

/// One time-slice of the system: a real value per declared variable, always in-domain.
class DataState {
public:
  DataState(SpaceRef space, std::vector<double> values);

  const SpaceRef& space_ref() const noexcept { return space_; }
  const DataSpace& space() const noexcept { return *space_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::string_view name) const { return values_[space_->index_of(name)]; }
  StateView view() const { return {*space_, values_}; }

  friend bool operator==(const DataState& a, const DataState& b) {
    return a.space_ == b.space_ && a.values_ == b.values_;
  }

private:
  SpaceRef space_;
  std::vector<double> values_;
};

/// Clamps every value into its domain. Missing or unknown names are errors.
DataState make_data_state(const SpaceRef& space, const std::map<std::string, double>& assignments);

/// Positional construction; values are clamped into their domains.
DataState make_data_state(const SpaceRef& space, std::span<const double> values);

/// N data states over one space, stored row-major.
class SampleSet {
public:
  explicit SampleSet(SpaceRef space) : space_(std::move(space)) {}
  SampleSet(SpaceRef space, std::size_t count);

  /// `count` copies of `state`.
  static SampleSet repeat(const DataState& state, std::size_t count);

  const SpaceRef& space_ref() const noexcept { return space_; }
  const DataSpace& space() const noexcept { return *space_; }
  std::size_t size() const noexcept { return width() == 0 ? 0 : data_.size() / width(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t width() const noexcept { return space_->size(); }

  StateView operator[](std::size_t j) const { return {*space_, row(j)}; }
  DataState state(std::size_t j) const;
  double value(std::size_t j, std::size_t var) const { return data_[j * width() + var]; }

  std::span<const double> row(std::size_t j) const { return {data_.data() + j * width(), width()}; }
  std::span<double> mutable_row(std::size_t j) { return {data_.data() + j * width(), width()}; }

  void push_back(StateView state);
  /// First `count` samples in stored order.
  SampleSet prefix(std::size_t count) const;

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.space_ == b.space_ && a.data_ == b.data_;
  }

private:
  SpaceRef space_;
  std::vector<double> data_;
};

/// A penalty function rho: D -> [0,1]. The evaluator may depend on the time
/// index; time-invariant penalties simply ignore it.
class PenaltySpec {
public:
  using Evaluator = std::function<double(StateView, int)>;

  PenaltySpec(std::string name, std::vector<std::string> vars, Evaluator eval);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& vars() const noexcept { return vars_; }

  /// Always in [0,1].
  double operator()(StateView state, int tau = 0) const;
  double operator()(const DataState& state, int tau = 0) const { return (*this)(state.view(), tau); }

private:
  std::string name_;
  std::vector<std::string> vars_;
  Evaluator eval_;
};

/// |d(var) - goal| / max(hi - goal, goal - lo), clamped to [0,1].
PenaltySpec normalized_distance_penalty(std::string name, std::string var, double goal, double lo, double hi);

/// The variable's value itself, clamped to [0,1].
PenaltySpec identity_penalty(std::string name, std::string var);

/// Tank i level penalty with goal/max/min levels.
struct TankLevels {
  double goal = 10.0;
  double max = 20.0;
  double min = 0.0;
};
PenaltySpec tank_penalty(int tank, const TankLevels& levels);

/// max{rho(d2) - rho(d1), 0}: how much worse d2 is than d1.
double state_hemimetric(const PenaltySpec& rho, StateView d1, StateView d2, int tau = 0);
double state_hemimetric(const PenaltySpec& rho, const DataState& d1, const DataState& d2, int tau = 0);

/// Penalties addressable by name from formulae.
class PenaltyRegistry {
public:
  void add(PenaltySpec penalty);
  const PenaltySpec* find(std::string_view name) const;
  const PenaltySpec& at(std::string_view name) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, PenaltySpec, std::less<>> penalties_;
};

/// Non-increasing discount lambda(tau) = c * r^tau with c, r in (0,1].
class DiscountSpec {
public:
  static DiscountSpec constant(double c = 1.0);
  static DiscountSpec exponential(double rate, double scale = 1.0);
  /// Parses "const:c" or "exp:r".
  static DiscountSpec parse(std::string_view text);

  double operator()(int tau) const;
  std::string describe() const;

private:
  DiscountSpec(double scale, double rate) : scale_(scale), rate_(rate) {}

  double scale_;
  double rate_;
};

/// Sorted, duplicate-free, nonnegative time indices.
class ObservationTimes {
public:
  explicit ObservationTimes(std::vector<int> indices);
  /// Every index in [first, last].
  static ObservationTimes range(int first, int last);
  /// Parses "a:b" ranges and comma-separated indices, e.g. "0:10,20,30".
  static ObservationTimes parse(std::string_view text);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int max() const { return indices_.back(); }

private:
  std::vector<int> indices_;
};

} // namespace evtl
