#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vlaperf/opgraph.hpp"
#include "vlaperf/workload.hpp"

namespace vlaperf {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

struct AcceleratorConfig {
  std::string name;
  // Peak FLOP/s keyed by element size in bytes (4 = FP32, 2 = BF16/FP16, 1 = INT8).
  std::map<std::int64_t, double> peak_flops;
  double mem_bandwidth = 0;  // bytes/s
  double mem_capacity = 0;   // bytes

  double peak(std::int64_t precision_bytes) const;
  /// FLOPs per byte at which BF16 compute and memory time are equal.
  double balance_oi() const { return peak(2) / mem_bandwidth; }

  /// Throws ConfigError if a mandatory entry is missing or non-positive.
  void validate() const;
};

/// The five GPUs used throughout: thor, rtx4090, a100, h100, b100.
std::map<std::string, AcceleratorConfig, std::less<>> hardware_presets();

enum class Bound { compute, memory };

std::string_view to_string(Bound bound);

struct OpTiming {
  double seconds = 0;
  Bound bound = Bound::memory;
};

struct GraphTiming {
  double seconds = 0;
  std::map<Phase, double> phase_seconds;
};

/// max(flops / peak, bytes / bandwidth). Ties report memory.
OpTiming op_time(const Operator& op, const AcceleratorConfig& hw, std::int64_t precision_bytes = 2);

GraphTiming graph_time(const OperatorGraph& graph, const AcceleratorConfig& hw,
                       std::int64_t precision_bytes = 2);

/// Aggregate operator intensity. Throws std::domain_error for a zero-byte graph.
double graph_oi(const OperatorGraph& graph);

/// Compute iff aggregate OI strictly exceeds the hardware balance point.
Bound boundedness(const OperatorGraph& graph, const AcceleratorConfig& hw);

// --- memory ----------------------------------------------------------------

/// Largest transient activation buffer of one FFN block: the layer input plus
/// every up-projection output, for the busiest component of one inference.
std::int64_t activation_working_set_bytes(const VlaModelSpec& spec);

/// KV bytes resident for a stateless inference (the full prefix).
std::int64_t stateless_kv_bytes(const VlaModelSpec& spec);

/// KV bytes resident after `t` long-context timesteps (vision tokens only).
std::int64_t long_context_kv_bytes(const VlaModelSpec& spec, std::int64_t t);

/// Weights + working set + stateless KV.
std::int64_t memory_footprint(const VlaModelSpec& spec);

/// Weights + working set + KV retained after `context_timesteps` steps.
std::int64_t memory_footprint(const VlaModelSpec& spec, std::int64_t context_timesteps);

bool fits(const VlaModelSpec& spec, const AcceleratorConfig& hw);
bool fits(const VlaModelSpec& spec, const AcceleratorConfig& hw, std::int64_t context_timesteps);

}  // namespace vlaperf
