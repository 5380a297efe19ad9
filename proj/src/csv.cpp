#include "evtl/csv.hpp"

#include "evtl/error.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace evtl {

std::string format_real(double value) {
  if (value == 0.0) return "0"; // folds -0
  return fmt::format("{:.17g}", value);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

} // namespace

SampleSet read_samples_csv(const std::filesystem::path& path, const SpaceRef& space) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open sample file '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(fmt::format("sample file '{}' is empty", path.string()));
  const auto header = split_fields(line);
  std::vector<std::optional<std::size_t>> column_var(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) column_var[c] = space->find(header[c]);

  std::vector<double> defaults(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) defaults[i] = space->variable(i).clamp(0.0);

  SampleSet out(space);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ConfigError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), line_no, header.size(),
                                    fields.size()));
    }
    auto values = defaults;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!column_var[c]) continue;
      double v = 0.0;
      const auto& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ConfigError(fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, f));
      }
      values[*column_var[c]] = v;
    }
    out.push_back(make_data_state(space, values).view());
  }
  return out;
}

} // namespace evtl
