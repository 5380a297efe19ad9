#include "evtl/data_model.hpp"

#include "evtl/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace evtl {

VariableSpec VariableSpec::interval(std::string name, double lo, double hi) {
  if (!(lo <= hi)) {
    throw ConfigError(fmt::format("variable '{}': interval [{}, {}] has lo > hi", name, lo, hi));
  }
  return {std::move(name), ClosedInterval{lo, hi}};
}

VariableSpec VariableSpec::finite(std::string name, std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError(fmt::format("variable '{}': finite domain is empty", name));
  }
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw ConfigError(fmt::format("variable '{}': finite domain has duplicates", name));
  }
  return {std::move(name), FiniteSet{std::move(values)}};
}

double VariableSpec::clamp(double value) const {
  if (const auto* iv = std::get_if<ClosedInterval>(&domain_)) {
    if (std::isnan(value)) return iv->lo;
    return std::clamp(value, iv->lo, iv->hi);
  }
  const auto& values = std::get<FiniteSet>(domain_).values;
  if (std::isnan(value)) return values.front();
  auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end()) return values.back();
  if (it == values.begin() || *it == value) return *it;
  const double above = *it;
  const double below = *std::prev(it);
  return (above - value < value - below) ? above : below;
}

bool VariableSpec::contains(double value) const {
  if (const auto* iv = std::get_if<ClosedInterval>(&domain_)) {
    return value >= iv->lo && value <= iv->hi;
  }
  const auto& values = std::get<FiniteSet>(domain_).values;
  return std::binary_search(values.begin(), values.end(), value);
}

DataSpace::DataSpace(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (!seen.insert(v.name()).second) {
      throw ConfigError(fmt::format("duplicate variable name '{}'", v.name()));
    }
  }
}

std::optional<std::size_t> DataSpace::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name() == name) return i;
  }
  return std::nullopt;
}

std::size_t DataSpace::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ConfigError(fmt::format("unknown variable '{}'", name));
}

std::vector<std::string> DataSpace::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name());
  return out;
}

SpaceRef make_space(std::vector<VariableSpec> variables) {
  return std::make_shared<const DataSpace>(std::move(variables));
}

DataState::DataState(SpaceRef space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw ConfigError("data state without a data space");
  if (values_.size() != space_->size()) {
    throw ConfigError(fmt::format("data state has {} values for {} variables", values_.size(), space_->size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = space_->variable(i).clamp(values_[i]);
  }
}

DataState make_data_state(const SpaceRef& space, const std::map<std::string, double>& assignments) {
  for (const auto& [name, value] : assignments) {
    if (!space->find(name)) throw ConfigError(fmt::format("unknown variable '{}' in assignment", name));
  }
  std::vector<double> values(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto& name = space->variable(i).name();
    auto it = assignments.find(name);
    if (it == assignments.end()) throw ConfigError(fmt::format("missing assignment for variable '{}'", name));
    values[i] = it->second;
  }
  return DataState(space, std::move(values));
}

DataState make_data_state(const SpaceRef& space, std::span<const double> values) {
  return DataState(space, std::vector<double>(values.begin(), values.end()));
}

SampleSet::SampleSet(SpaceRef space, std::size_t count) : space_(std::move(space)), data_(count * space_->size()) {}

SampleSet SampleSet::repeat(const DataState& state, std::size_t count) {
  SampleSet out(state.space_ref(), count);
  for (std::size_t j = 0; j < count; ++j) {
    std::ranges::copy(state.values(), out.mutable_row(j).begin());
  }
  return out;
}

DataState SampleSet::state(std::size_t j) const {
  auto r = row(j);
  return DataState(space_, std::vector<double>(r.begin(), r.end()));
}

void SampleSet::push_back(StateView state) {
  if (&state.space() != space_.get()) throw ConfigError("sample set: state from a different data space");
  data_.insert(data_.end(), state.values().begin(), state.values().end());
}

SampleSet SampleSet::prefix(std::size_t count) const {
  if (count > size()) {
    throw NumericError(fmt::format("sample set prefix of {} requested from {} samples", count, size()));
  }
  SampleSet out(space_);
  out.data_.assign(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(count * width()));
  return out;
}

PenaltySpec::PenaltySpec(std::string name, std::vector<std::string> vars, Evaluator eval)
    : name_(std::move(name)), vars_(std::move(vars)), eval_(std::move(eval)) {
  if (!eval_) throw ConfigError(fmt::format("penalty '{}' has no evaluator", name_));
}

double PenaltySpec::operator()(StateView state, int tau) const {
  const double v = eval_(state, tau);
  if (std::isnan(v)) return 1.0;
  return std::clamp(v, 0.0, 1.0);
}

PenaltySpec normalized_distance_penalty(std::string name, std::string var, double goal, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError(fmt::format("penalty '{}': degenerate range [{}, {}]", name, lo, hi));
  if (goal < lo || goal > hi) {
    throw ConfigError(fmt::format("penalty '{}': goal {} outside [{}, {}]", name, goal, lo, hi));
  }
  const double scale = std::max(hi - goal, goal - lo);
  auto vars = std::vector<std::string>{var};
  return PenaltySpec(std::move(name), std::move(vars),
                     [var = std::move(var), goal, scale](StateView d, int) { return std::abs(d.at(var) - goal) / scale; });
}

PenaltySpec identity_penalty(std::string name, std::string var) {
  auto vars = std::vector<std::string>{var};
  return PenaltySpec(std::move(name), std::move(vars), [var = std::move(var)](StateView d, int) { return d.at(var); });
}

PenaltySpec tank_penalty(int tank, const TankLevels& levels) {
  if (tank < 1 || tank > 3) throw ConfigError(fmt::format("tank index {} outside 1..3", tank));
  return normalized_distance_penalty(fmt::format("rho{}", tank), fmt::format("l{}", tank), levels.goal, levels.min,
                                     levels.max);
}

double state_hemimetric(const PenaltySpec& rho, StateView d1, StateView d2, int tau) {
  if (&d1.space() != &d2.space()) throw ConfigError("state_hemimetric: states belong to different data spaces");
  return std::max(rho(d2, tau) - rho(d1, tau), 0.0);
}

double state_hemimetric(const PenaltySpec& rho, const DataState& d1, const DataState& d2, int tau) {
  return state_hemimetric(rho, d1.view(), d2.view(), tau);
}

void PenaltyRegistry::add(PenaltySpec penalty) {
  auto name = penalty.name();
  penalties_.insert_or_assign(std::move(name), std::move(penalty));
}

const PenaltySpec* PenaltyRegistry::find(std::string_view name) const {
  auto it = penalties_.find(name);
  return it == penalties_.end() ? nullptr : &it->second;
}

const PenaltySpec& PenaltyRegistry::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw ConfigError(fmt::format("unknown penalty '{}'", name));
}

std::vector<std::string> PenaltyRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : penalties_) out.push_back(name);
  return out;
}

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  return value;
}

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw ConfigError(fmt::format("{}: '{}' is not an integer", what, text));
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

} // namespace

DiscountSpec DiscountSpec::constant(double c) {
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError(fmt::format("discount constant {} outside (0,1]", c));
  return {c, 1.0};
}

DiscountSpec DiscountSpec::exponential(double rate, double scale) {
  if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError(fmt::format("discount rate {} outside (0,1]", rate));
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError(fmt::format("discount scale {} outside (0,1]", scale));
  return {scale, rate};
}

DiscountSpec DiscountSpec::parse(std::string_view text) {
  text = trim(text);
  if (text.starts_with("const:")) return constant(parse_real(trim(text.substr(6)), "lambda"));
  if (text.starts_with("exp:")) return exponential(parse_real(trim(text.substr(4)), "lambda"));
  throw ConfigError(fmt::format("lambda '{}': expected const:c or exp:r", text));
}

double DiscountSpec::operator()(int tau) const {
  if (rate_ == 1.0) return scale_;
  // r^tau underflows to 0 for huge tau; keep the value inside (0,1].
  return std::max(scale_ * std::pow(rate_, tau), std::numeric_limits<double>::min());
}

std::string DiscountSpec::describe() const {
  if (rate_ == 1.0) return fmt::format("const:{}", scale_);
  if (scale_ == 1.0) return fmt::format("exp:{}", rate_);
  return fmt::format("exp:{}*{}", rate_, scale_);
}

ObservationTimes::ObservationTimes(std::vector<int> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw ConfigError("observation times: empty set");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (indices_.front() < 0) throw ConfigError("observation times: negative index");
}

ObservationTimes ObservationTimes::range(int first, int last) {
  if (first > last) throw ConfigError(fmt::format("observation times: empty range {}:{}", first, last));
  std::vector<int> out;
  for (int t = first; t <= last; ++t) out.push_back(t);
  return ObservationTimes(std::move(out));
}

ObservationTimes ObservationTimes::parse(std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    if (auto colon = item.find(':'); colon != std::string_view::npos) {
      const int a = parse_int(trim(item.substr(0, colon)), "observation times");
      const int b = parse_int(trim(item.substr(colon + 1)), "observation times");
      if (a > b) throw ConfigError(fmt::format("observation times: empty range {}:{}", a, b));
      for (int t = a; t <= b; ++t) out.push_back(t);
    } else {
      out.push_back(parse_int(item, "observation times"));
    }
  }
  return ObservationTimes(std::move(out));
}

} // namespace evtl
