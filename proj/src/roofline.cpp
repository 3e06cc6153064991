#include "vlaperf/roofline.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace vlaperf {

double AcceleratorConfig::peak(std::int64_t precision_bytes) const {
  auto it = peak_flops.find(precision_bytes);
  if (it == peak_flops.end()) {
    throw ConfigError(
        fmt::format("accelerator '{}' has no peak for {}-byte precision", name, precision_bytes));
  }
  return it->second;
}

void AcceleratorConfig::validate() const {
  for (std::int64_t p : {2, 4}) {
    if (!peak_flops.contains(p))
      throw ConfigError(fmt::format("accelerator '{}': missing {}-byte peak", name, p));
  }
  for (const auto& [p, v] : peak_flops) {
    if (!(v > 0)) throw ConfigError(fmt::format("accelerator '{}': peak must be > 0", name));
  }
  if (!(mem_bandwidth > 0) || !(mem_capacity > 0))
    throw ConfigError(fmt::format("accelerator '{}': bandwidth and capacity must be > 0", name));
}

namespace {

AcceleratorConfig make_gpu(std::string name, double fp32_tflops, double bf16_tflops,
                           double int8_tops, double memory_gb, double bw_gbs) {
  AcceleratorConfig hw;
  hw.name = std::move(name);
  hw.peak_flops = {{4, fp32_tflops * 1e12}, {2, bf16_tflops * 1e12}, {1, int8_tops * 1e12}};
  hw.mem_bandwidth = bw_gbs * 1e9;
  hw.mem_capacity = memory_gb * kGiB;
  return hw;
}

}  // namespace

std::map<std::string, AcceleratorConfig, std::less<>> hardware_presets() {
  return {
      {"thor", make_gpu("Jetson Thor", 100, 400, 800, 128, 270)},
      {"rtx4090", make_gpu("RTX 4090", 83, 165, 330, 24, 1008)},
      {"a100", make_gpu("A100", 20, 312, 624, 80, 2039)},
      {"h100", make_gpu("H100", 67, 989, 1979, 80, 3350)},
      {"b100", make_gpu("B100", 60, 1750, 3500, 192, 8000)},
  };
}

std::string_view to_string(Bound bound) {
  return bound == Bound::compute ? "compute" : "memory";
}

OpTiming op_time(const Operator& op, const AcceleratorConfig& hw, std::int64_t precision_bytes) {
  const double compute = op.flops / hw.peak(precision_bytes);
  const double memory = op.bytes / hw.mem_bandwidth;
  if (compute > memory) return {compute, Bound::compute};
  return {memory, Bound::memory};
}

GraphTiming graph_time(const OperatorGraph& graph, const AcceleratorConfig& hw,
                       std::int64_t precision_bytes) {
  GraphTiming out;
  const double peak = hw.peak(precision_bytes);
  for (const auto& op : graph.ops()) {
    const double t = std::max(op.flops / peak, op.bytes / hw.mem_bandwidth);
    out.seconds += t;
    out.phase_seconds[op.phase] += t;
  }
  return out;
}

double graph_oi(const OperatorGraph& graph) {
  if (graph.total_bytes() <= 0) throw std::domain_error("operator intensity of a zero-byte graph");
  return graph.total_flops() / graph.total_bytes();
}

Bound boundedness(const OperatorGraph& graph, const AcceleratorConfig& hw) {
  return graph_oi(graph) > hw.balance_oi() ? Bound::compute : Bound::memory;
}

std::int64_t activation_working_set_bytes(const VlaModelSpec& spec) {
  auto ffn_block = [](const TransformerConfig& cfg, std::int64_t tokens) {
    return tokens * (cfg.hidden_size + cfg.num_ffi * cfg.intermediate_size) *
           cfg.precision_bytes;
  };
  std::int64_t peak = std::max(ffn_block(spec.vision_encoder, spec.vision_tokens()),
                               ffn_block(spec.vlm, spec.prefix_tokens()));
  switch (spec.decoding_mode) {
    case DecodingMode::diffusion:
      peak = std::max(peak, ffn_block(*spec.action_expert, spec.chunk_size));
      break;
    case DecodingMode::autoregressive_parallel:
      peak = std::max(peak, ffn_block(spec.vlm, spec.action_tokens()));
      break;
    case DecodingMode::autoregressive:
      break;
  }
  return peak;
}

std::int64_t stateless_kv_bytes(const VlaModelSpec& spec) {
  return spec.prefix_tokens() * kv_bytes_per_token(spec.vlm);
}

std::int64_t long_context_kv_bytes(const VlaModelSpec& spec, std::int64_t t) {
  return spec.vision_tokens() * t * kv_bytes_per_token(spec.vlm);
}

std::int64_t memory_footprint(const VlaModelSpec& spec) {
  return total_weight_bytes(spec) + activation_working_set_bytes(spec) + stateless_kv_bytes(spec);
}

std::int64_t memory_footprint(const VlaModelSpec& spec, std::int64_t context_timesteps) {
  if (context_timesteps < 1) throw ConfigError("context timesteps must be >= 1");
  return total_weight_bytes(spec) + activation_working_set_bytes(spec) +
         long_context_kv_bytes(spec, context_timesteps);
}

bool fits(const VlaModelSpec& spec, const AcceleratorConfig& hw) {
  return static_cast<double>(memory_footprint(spec)) <= hw.mem_capacity;
}

bool fits(const VlaModelSpec& spec, const AcceleratorConfig& hw, std::int64_t context_timesteps) {
  return static_cast<double>(memory_footprint(spec, context_timesteps)) <= hw.mem_capacity;
}

}  // namespace vlaperf
