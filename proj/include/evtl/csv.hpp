#pragma once

#include "evtl/data_model.hpp"

#include <filesystem>
#include <string>

namespace evtl {

/// Fixed 17-significant-digit rendering, stable across platforms.
std::string format_real(double value);

/// Loads data states from a CSV whose header names variables of `space`.
/// Columns that are not space variables (e.g. run, time) are ignored;
/// space variables without a column are set to their domain's clamp of 0.
SampleSet read_samples_csv(const std::filesystem::path& path, const SpaceRef& space);

} // namespace evtl
