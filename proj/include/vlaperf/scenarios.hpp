#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vlaperf/netmodel.hpp"
#include "vlaperf/opgraph.hpp"
#include "vlaperf/roofline.hpp"
#include "vlaperf/workload.hpp"

namespace vlaperf {

struct OnDevice {
  AcceleratorConfig hw;
};
struct EdgeServer {
  AcceleratorConfig hw;
  NetworkConfig net;
};
struct CloudServer {
  AcceleratorConfig hw;
  NetworkConfig access;
  NetworkConfig cloud;
};
/// Vision + VLM on the server, action expert on the device.
struct Collaborative {
  AcceleratorConfig device;
  AcceleratorConfig server;
  NetworkConfig net;
};

using Placement = std::variant<OnDevice, EdgeServer, CloudServer, Collaborative>;

std::string describe(const Placement& placement);
/// Hardware running the VLM (the server for every non-device placement).
const AcceleratorConfig& serving_hw(const Placement& placement);
/// Robot <-> server path; empty for on-device inference.
std::optional<NetworkPath> network_path(const Placement& placement);
bool is_server_placement(const Placement& placement);

struct ScenarioOptions {
  ObservationEncoding observation = ObservationEncoding::compressed;
  std::optional<std::int64_t> observation_bytes;
  std::int64_t precision_bytes = 2;
};

struct ScenarioResult {
  bool feasible = true;
  std::string infeasible_reason;
  std::map<Phase, double> phase_latencies;
  // Ordered network legs (upload, download, kv_download).
  std::vector<std::pair<std::string, double>> network_latencies;
  double e2e_latency = 0;
  double sync_frequency = 0;
  std::optional<double> async_frequency;
  std::map<Phase, Bound> boundedness;
  std::map<Phase, double> phase_oi;
  std::int64_t footprint = 0;

  double compute_latency() const;
  double network_latency() const;
  double leg(std::string_view name) const;
};

/// Observation upload, full inference on the serving hardware, action
/// download. A capacity violation yields feasible = false, never a throw.
ScenarioResult sync_scenario(const VlaModelSpec& spec, const Placement& placement,
                             const ScenarioOptions& opts = {});

/// sync_scenario plus the overlapped throughput: the slowest of GPU rate,
/// per-hop observation upload rate and per-hop action download rate.
ScenarioResult async_scenario(const VlaModelSpec& spec, const Placement& placement,
                              const ScenarioOptions& opts = {});

/// min(1 / compute_seconds, per-hop observation upload rate, per-hop action
/// download rate); just the GPU rate on-device.
double async_rate(const VlaModelSpec& spec, const Placement& placement, double compute_seconds,
                  const ScenarioOptions& opts = {});

/// Upload, vision + VLM on the server, VLM KV download, diffusion on device.
/// Throws ConfigError unless the placement is Collaborative and the model
/// decodes with a diffusion action expert.
ScenarioResult collaborative_scenario(const VlaModelSpec& spec, const Placement& placement,
                                      const ScenarioOptions& opts = {});

struct DualSystemResult {
  bool feasible = true;
  std::string infeasible_reason;
  double s1_latency = 0;  // upload + vision + action + download
  double s2_latency = 0;  // VLM prefill
  double s2_cap = 0;
  double sync_frequency = 0;
  double async_frequency = 0;
  // Set when the resulting System 1 rate falls below the System 2 cap.
  bool s1_below_cap = false;
  double speedup() const { return async_frequency / sync_frequency; }
};

/// System 1 and System 2 share one unit-time budget: f1 = (1 - f2 * T2) / T1.
DualSystemResult dual_system_scenario(const VlaModelSpec& spec, const Placement& placement,
                                      double s2_cap_hz, const ScenarioOptions& opts = {});

/// Stateful inference at timestep `t` (see long_context_step_graphs).
ScenarioResult long_context_scenario(const VlaModelSpec& spec, const Placement& placement,
                                     std::int64_t t, const ScenarioOptions& opts = {});

struct LongContextRow {
  std::int64_t timesteps = 0;
  std::int64_t kv_bytes = 0;
  ScenarioResult result;
};

std::vector<LongContextRow> long_context_sweep(const VlaModelSpec& spec,
                                               const Placement& placement,
                                               const std::vector<std::int64_t>& timesteps,
                                               const ScenarioOptions& opts = {});

struct DecodingRow {
  std::int64_t chunk_size = 0;
  std::int64_t action_dof = 0;
  double diffusion = 0;
  double diffusion_large = 0;
  double autoregressive = 0;
  double autoregressive_parallel = 0;
  double parallel_decode_oi = 0;
};

/// The diffusion variants keep the spec's denoise steps; Diffusion-Large
/// swaps in an action expert with the VLM's architecture.
std::vector<DecodingRow> decoding_comparison(const VlaModelSpec& spec,
                                             const AcceleratorConfig& hw,
                                             const std::vector<std::int64_t>& chunk_sizes,
                                             const std::vector<std::int64_t>& dofs);

struct DenoiseChunkRow {
  std::int64_t steps = 0;
  std::int64_t chunk_size = 0;
  double action_latency = 0;
  double e2e_latency = 0;
  double action_oi = 0;  // 0 when steps == 0
};

std::vector<DenoiseChunkRow> denoise_chunk_sweep(const VlaModelSpec& spec,
                                                 const AcceleratorConfig& hw,
                                                 const std::vector<std::int64_t>& steps,
                                                 const std::vector<std::int64_t>& chunks);

struct ScalingRow {
  std::string model;
  std::int64_t params = 0;
  std::string hardware;
  ScenarioResult result;
};

std::vector<ScalingRow> scaling_sweep(const ModelCatalog& catalog,
                                      const std::vector<AcceleratorConfig>& hardware);

enum class FrequencyTier { below_realtime, realtime, high_performance };

/// >= 100 Hz is high-performance, >= 10 Hz real-time.
FrequencyTier classify_frequency(double hz);
std::string_view to_string(FrequencyTier tier);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers and returns the
/// results in index order. Output does not depend on scheduling.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn, unsigned threads = 0)
    -> std::vector<decltype(fn(std::size_t{}))>;

}  // namespace vlaperf

#include "vlaperf/detail/parallel_map.hpp"
