#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlaperf/netmodel.hpp"
#include "vlaperf/roofline.hpp"
#include "vlaperf/scenarios.hpp"
#include "vlaperf/workload.hpp"

namespace vlaperf {

/// Every addressable preset: model components, composed models, GPUs and
/// network links, keyed by stable lowercase identifiers.
struct Registry {
  ModelCatalog catalog;
  std::map<std::string, AcceleratorConfig, std::less<>> hardware;
  std::map<std::string, NetworkConfig, std::less<>> networks;

  static Registry builtin();

  // Lookups throw ConfigError naming the known identifiers.
  const VlaModelSpec& model(std::string_view id) const;
  const AcceleratorConfig& accelerator(std::string_view id) const;
  const NetworkConfig& network(std::string_view id) const;
};

/// Options of one command. Unset fields fall back to command defaults;
/// values from a config file are overwritten by explicit CLI flags.
struct RunSettings {
  std::optional<std::string> model, hw, placement, net, cloud_net, device_hw, decoding, format,
      out;
  std::optional<std::int64_t> chunk, steps, context_steps, cameras, dof, language_tokens,
      observation_bytes, precision_bytes;
  std::optional<double> s2_cap;
  std::optional<bool> async;
  // Sweep axes in declaration order; values kept as text and parsed per axis.
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;

  /// Fields set in `over` replace ours; sweep axes with the same name too.
  void merge(const RunSettings& over);
};

/// Parses a JSON config document. Components, models, accelerators and
/// networks are added to `registry`; the "run" section is returned.
/// Unknown keys and a stored seq_len are rejected with ConfigError.
RunSettings load_config_text(std::string_view text, Registry& registry);
RunSettings load_config_file(const std::filesystem::path& path, Registry& registry);

/// `name` itself if it exists, else the first match of `name` or
/// `name`.json in the colon-separated directories of VLAPERF_PRESET_PATH.
std::filesystem::path resolve_config_path(const std::string& name);

inline constexpr const char* kPresetPathEnv = "VLAPERF_PRESET_PATH";

/// The model after applying chunk/steps/decoding/camera/precision overrides.
VlaModelSpec resolve_model(const Registry& registry, const RunSettings& run);

/// Placement kinds: on-device, edge, cloud, collaborative.
Placement resolve_placement(const Registry& registry, const RunSettings& run);

ScenarioOptions resolve_options(const RunSettings& run);

}  // namespace vlaperf
