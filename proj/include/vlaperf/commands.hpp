#pragma once

#include <string>
#include <vector>

#include "vlaperf/config.hpp"
#include "vlaperf/report.hpp"

namespace vlaperf {

/// Tables printed by `analyze`: a summary plus phase and network breakdowns,
/// or the dual-system / long-context view when those options are set.
std::vector<Table> analyze_tables(const Registry& registry, const RunSettings& run);

/// Axes a sweep may vary.
const std::vector<std::string>& sweep_axes();

/// Applies one axis value to `run`. Throws ConfigError for unknown axes or
/// unparsable values.
void apply_axis(RunSettings& run, const std::string& axis, const std::string& value);

/// One row per point of the cartesian product of `run.sweep`, ordered
/// lexicographically by (first axis value index, second, ...). No axes
/// gives a single row with the values `analyze` reports.
Table sweep_table(const Registry& registry, const RunSettings& run);

/// Identifiers of every preset, as a set of tables.
std::vector<Table> preset_tables(const Registry& registry);

}  // namespace vlaperf
