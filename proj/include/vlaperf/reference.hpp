#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlaperf/config.hpp"
#include "vlaperf/report.hpp"

namespace vlaperf {

/// One modeled value checked against a published one.
struct Check {
  std::string row;
  std::string metric;
  Cell::Kind unit = Cell::Kind::seconds;
  // Numeric comparison; nullopt on either side means N/A.
  std::optional<double> published;
  std::optional<double> modeled;
  // Label comparison (unit == text).
  std::string published_label;
  std::string modeled_label;
  double tolerance = 0;   // relative unless `absolute`
  bool absolute = false;
  // Half a unit of the published value's last printed digit.
  double resolution = 0;

  /// N/A matches N/A; labels must be equal; numbers within tolerance.
  bool passed() const;
  /// (modeled - published) / published, or the absolute difference.
  std::optional<double> error() const;
};

struct Reproduction {
  std::string id;
  std::string title;
  std::vector<Check> checks;

  bool passed() const;
  Table table() const;
};

/// Table identifiers accepted by reproduce(), in display order.
std::vector<std::string> reproduction_ids();

/// Runs the model for one published table. Accepts the identifiers from
/// reproduction_ids() case-insensitively plus the aliases "scaling" (T5),
/// "long-context" (T6) and "dual-system" (T9). Throws ConfigError otherwise.
Reproduction reproduce(std::string_view id, const Registry& registry = Registry::builtin());

}  // namespace vlaperf
