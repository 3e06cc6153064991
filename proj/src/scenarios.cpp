#include "vlaperf/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace vlaperf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string gib(std::int64_t bytes) {
  return fmt::format("{:.2f} GB", static_cast<double>(bytes) / kGiB);
}

}  // namespace

std::string describe(const Placement& placement) {
  return std::visit(
      Overloaded{
          [](const OnDevice& p) { return fmt::format("{} (on-device)", p.hw.name); },
          [](const EdgeServer& p) { return fmt::format("{} via {}", p.hw.name, p.net.name); },
          [](const CloudServer& p) {
            return fmt::format("{} via {} + {}", p.hw.name, p.access.name, p.cloud.name);
          },
          [](const Collaborative& p) {
            return fmt::format("{} server + {} device via {}", p.server.name, p.device.name,
                               p.net.name);
          },
      },
      placement);
}

const AcceleratorConfig& serving_hw(const Placement& placement) {
  return std::visit(Overloaded{
                        [](const OnDevice& p) -> const AcceleratorConfig& { return p.hw; },
                        [](const EdgeServer& p) -> const AcceleratorConfig& { return p.hw; },
                        [](const CloudServer& p) -> const AcceleratorConfig& { return p.hw; },
                        [](const Collaborative& p) -> const AcceleratorConfig& {
                          return p.server;
                        },
                    },
                    placement);
}

std::optional<NetworkPath> network_path(const Placement& placement) {
  return std::visit(Overloaded{
                        [](const OnDevice&) -> std::optional<NetworkPath> { return std::nullopt; },
                        [](const EdgeServer& p) -> std::optional<NetworkPath> {
                          return NetworkPath({p.net});
                        },
                        [](const CloudServer& p) -> std::optional<NetworkPath> {
                          return NetworkPath({p.access, p.cloud});
                        },
                        [](const Collaborative& p) -> std::optional<NetworkPath> {
                          return NetworkPath({p.net});
                        },
                    },
                    placement);
}

bool is_server_placement(const Placement& placement) {
  return !std::holds_alternative<OnDevice>(placement);
}

double ScenarioResult::compute_latency() const {
  double total = 0;
  for (const auto& [phase, t] : phase_latencies) total += t;
  return total;
}

double ScenarioResult::network_latency() const {
  double total = 0;
  for (const auto& [name, t] : network_latencies) total += t;
  return total;
}

double ScenarioResult::leg(std::string_view name) const {
  for (const auto& [leg_name, t] : network_latencies)
    if (leg_name == name) return t;
  return 0;
}

namespace {

void fill_phases(ScenarioResult& r, const OperatorGraph& graph, const AcceleratorConfig& hw,
                 std::int64_t precision, const std::vector<Phase>& phases) {
  const GraphTiming timing = graph_time(graph, hw, precision);
  for (Phase phase : phases) {
    const OperatorGraph sub = graph.phase_subgraph(phase);
    auto it = timing.phase_seconds.find(phase);
    r.phase_latencies[phase] = it == timing.phase_seconds.end() ? 0.0 : it->second;
    if (sub.total_bytes() > 0) {
      r.phase_oi[phase] = graph_oi(sub);
      r.boundedness[phase] = boundedness(sub, hw);
    }
  }
}

void finish(ScenarioResult& r) {
  r.e2e_latency = r.compute_latency() + r.network_latency();
  r.sync_frequency = r.e2e_latency > 0 ? 1.0 / r.e2e_latency : 0.0;
}

ScenarioResult infeasible(std::string reason, std::int64_t footprint) {
  ScenarioResult r;
  r.feasible = false;
  r.infeasible_reason = std::move(reason);
  r.footprint = footprint;
  return r;
}

// Evaluates an already-built graph on a non-collaborative placement.
ScenarioResult evaluate(const VlaModelSpec& spec, const Placement& placement,
                        const OperatorGraph& graph, std::int64_t footprint,
                        const ScenarioOptions& opts) {
  const AcceleratorConfig& hw = serving_hw(placement);
  if (static_cast<double>(footprint) > hw.mem_capacity) {
    return infeasible(fmt::format("needs {} but {} has {}", gib(footprint), hw.name,
                                  gib(static_cast<std::int64_t>(hw.mem_capacity))),
                      footprint);
  }
  ScenarioResult r;
  r.footprint = footprint;
  fill_phases(r, graph, hw, opts.precision_bytes,
              {Phase::vision, Phase::vlm, Phase::action});
  if (auto path = network_path(placement)) {
    r.network_latencies.emplace_back(
        "upload",
        path_time(observation_payload(spec, opts.observation, opts.observation_bytes), *path));
    r.network_latencies.emplace_back("download", path_time(action_payload(spec), *path));
  }
  finish(r);
  return r;
}

void require_diffusion(const VlaModelSpec& spec, std::string_view what) {
  if (spec.decoding_mode != DecodingMode::diffusion || !spec.action_expert)
    throw ConfigError(fmt::format("{} needs a diffusion action expert", what));
}

}  // namespace

ScenarioResult sync_scenario(const VlaModelSpec& spec, const Placement& placement,
                             const ScenarioOptions& opts) {
  if (std::holds_alternative<Collaborative>(placement))
    return collaborative_scenario(spec, placement, opts);
  return evaluate(spec, placement, inference_graph(spec), memory_footprint(spec), opts);
}

double async_rate(const VlaModelSpec& spec, const Placement& placement, double compute_seconds,
                  const ScenarioOptions& opts) {
  double rate = 1.0 / compute_seconds;
  if (auto path = network_path(placement)) {
    rate = std::min(rate, path_rate(observation_payload(spec, opts.observation,
                                                        opts.observation_bytes),
                                    *path));
    // A collaborative device downloads the prefix cache instead of actions.
    const Payload down = std::holds_alternative<Collaborative>(placement)
                             ? kv_payload(spec.prefix_tokens(), spec.vlm)
                             : action_payload(spec);
    rate = std::min(rate, path_rate(down, *path));
  }
  return rate;
}

ScenarioResult async_scenario(const VlaModelSpec& spec, const Placement& placement,
                              const ScenarioOptions& opts) {
  ScenarioResult r = sync_scenario(spec, placement, opts);
  if (r.feasible) r.async_frequency = async_rate(spec, placement, r.compute_latency(), opts);
  return r;
}

ScenarioResult collaborative_scenario(const VlaModelSpec& spec, const Placement& placement,
                                      const ScenarioOptions& opts) {
  const auto* collab = std::get_if<Collaborative>(&placement);
  if (!collab) throw ConfigError("collaborative scenario needs a collaborative placement");
  require_diffusion(spec, "collaborative inference");

  // Server: vision + VLM + prefix cache. Device: action expert + downloaded cache.
  const std::int64_t kv = stateless_kv_bytes(spec);
  const std::int64_t server_bytes = weight_bytes(spec.vision_encoder) + weight_bytes(spec.vlm) +
                                    activation_working_set_bytes(spec) + kv;
  const std::int64_t device_bytes = weight_bytes(*spec.action_expert) + kv;
  if (static_cast<double>(server_bytes) > collab->server.mem_capacity)
    return infeasible(fmt::format("server needs {}", gib(server_bytes)), server_bytes);
  if (static_cast<double>(device_bytes) > collab->device.mem_capacity)
    return infeasible(fmt::format("device needs {}", gib(device_bytes)), device_bytes);

  ScenarioResult r;
  r.footprint = server_bytes;
  OperatorGraph server_graph =
      vit_encode_graph(spec.vision_encoder, spec.num_cameras, spec.tokens_per_image);
  server_graph.append(prefill_graph(spec.vlm, spec.prefix_tokens(), 0));
  fill_phases(r, server_graph, collab->server, opts.precision_bytes, {Phase::vision, Phase::vlm});
  fill_phases(r, action_graph(spec, spec.prefix_tokens()), collab->device, opts.precision_bytes,
              {Phase::action});

  const NetworkPath path({collab->net});
  r.network_latencies.emplace_back(
      "upload",
      path_time(observation_payload(spec, opts.observation, opts.observation_bytes), path));
  r.network_latencies.emplace_back(
      "kv_download", path_time(kv_payload(spec.prefix_tokens(), spec.vlm), path));
  finish(r);
  return r;
}

DualSystemResult dual_system_scenario(const VlaModelSpec& spec, const Placement& placement,
                                      double s2_cap_hz, const ScenarioOptions& opts) {
  require_diffusion(spec, "dual-system inference");
  if (std::holds_alternative<Collaborative>(placement))
    throw ConfigError("dual-system inference runs on a single accelerator");

  DualSystemResult out;
  out.s2_cap = s2_cap_hz;
  const AcceleratorConfig& hw = serving_hw(placement);
  const std::int64_t footprint = memory_footprint(spec);
  if (static_cast<double>(footprint) > hw.mem_capacity) {
    out.feasible = false;
    out.infeasible_reason = fmt::format("needs {}", gib(footprint));
    return out;
  }

  const auto p = opts.precision_bytes;
  const double vision =
      graph_time(vit_encode_graph(spec.vision_encoder, spec.num_cameras, spec.tokens_per_image),
                 hw, p)
          .seconds;
  const double action = graph_time(action_graph(spec, spec.prefix_tokens()), hw, p).seconds;
  double network = 0;
  if (auto path = network_path(placement)) {
    network =
        path_time(observation_payload(spec, opts.observation, opts.observation_bytes), *path) +
        path_time(action_payload(spec), *path);
  }
  out.s1_latency = network + vision + action;
  out.s2_latency = graph_time(prefill_graph(spec.vlm, spec.prefix_tokens(), 0), hw, p).seconds;
  out.sync_frequency = 1.0 / (out.s1_latency + out.s2_latency);

  const double s2_share = s2_cap_hz * out.s2_latency;
  if (!(s2_cap_hz > 0) || s2_share >= 1.0) {
    out.feasible = false;
    out.infeasible_reason =
        fmt::format("System 2 cap {:.1f} Hz needs {:.0f}% of the accelerator", s2_cap_hz,
                    s2_share * 100);
    return out;
  }
  out.async_frequency = (1.0 - s2_share) / out.s1_latency;
  out.s1_below_cap = out.async_frequency < s2_cap_hz;
  return out;
}

ScenarioResult long_context_scenario(const VlaModelSpec& spec, const Placement& placement,
                                     std::int64_t t, const ScenarioOptions& opts) {
  if (std::holds_alternative<Collaborative>(placement))
    throw ConfigError("long-context inference is not modeled for collaborative placements");
  return evaluate(spec, placement, long_context_step_graphs(spec, t), memory_footprint(spec, t),
                  opts);
}

std::vector<LongContextRow> long_context_sweep(const VlaModelSpec& spec,
                                               const Placement& placement,
                                               const std::vector<std::int64_t>& timesteps,
                                               const ScenarioOptions& opts) {
  return parallel_map(timesteps.size(), [&](std::size_t i) {
    const std::int64_t t = timesteps[i];
    return LongContextRow{t, long_context_kv_bytes(spec, t),
                          long_context_scenario(spec, placement, t, opts)};
  });
}

std::vector<DecodingRow> decoding_comparison(const VlaModelSpec& spec,
                                             const AcceleratorConfig& hw,
                                             const std::vector<std::int64_t>& chunk_sizes,
                                             const std::vector<std::int64_t>& dofs) {
  require_diffusion(spec, "decoding comparison");
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (auto chunk : chunk_sizes)
    for (auto dof : dofs) cells.emplace_back(chunk, dof);

  return parallel_map(cells.size(), [&](std::size_t i) {
    VlaModelSpec base = spec;
    base.chunk_size = cells[i].first;
    base.action_dof = cells[i].second;
    auto latency = [&](const VlaModelSpec& s) { return graph_time(inference_graph(s), hw).seconds; };

    DecodingRow row;
    row.chunk_size = base.chunk_size;
    row.action_dof = base.action_dof;
    row.diffusion = latency(base);

    VlaModelSpec large = base;
    large.action_expert = base.vlm;
    large.action_expert->name = base.vlm.name + " (action)";
    row.diffusion_large = latency(large);

    VlaModelSpec ar = base;
    ar.action_expert.reset();
    ar.decoding_mode = DecodingMode::autoregressive;
    row.autoregressive = latency(ar);

    ar.decoding_mode = DecodingMode::autoregressive_parallel;
    row.autoregressive_parallel = latency(ar);
    row.parallel_decode_oi =
        graph_oi(parallel_decode_graph(base.vlm, base.action_tokens(), base.prefix_tokens()));
    return row;
  });
}

std::vector<DenoiseChunkRow> denoise_chunk_sweep(const VlaModelSpec& spec,
                                                 const AcceleratorConfig& hw,
                                                 const std::vector<std::int64_t>& steps,
                                                 const std::vector<std::int64_t>& chunks) {
  require_diffusion(spec, "denoise/chunk sweep");
  OperatorGraph prefix =
      vit_encode_graph(spec.vision_encoder, spec.num_cameras, spec.tokens_per_image);
  prefix.append(prefill_graph(spec.vlm, spec.prefix_tokens(), 0));
  const double prefix_latency = graph_time(prefix, hw).seconds;

  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (auto s : steps)
    for (auto c : chunks) cells.emplace_back(s, c);

  return parallel_map(cells.size(), [&](std::size_t i) {
    const auto [s, c] = cells[i];
    const OperatorGraph action =
        diffusion_graph(*spec.action_expert, spec.prefix_tokens(), kv_bytes_per_token(spec.vlm),
                        c, s, spec.action_dof);
    DenoiseChunkRow row;
    row.steps = s;
    row.chunk_size = c;
    row.action_latency = graph_time(action, hw).seconds;
    row.e2e_latency = prefix_latency + row.action_latency;
    row.action_oi = action.total_bytes() > 0 ? graph_oi(action) : 0.0;
    return row;
  });
}

std::vector<ScalingRow> scaling_sweep(const ModelCatalog& catalog,
                                      const std::vector<AcceleratorConfig>& hardware) {
  const std::vector<VlaModelSpec> family = scaled_family(catalog);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t m = 0; m < family.size(); ++m)
    for (std::size_t h = 0; h < hardware.size(); ++h) cells.emplace_back(m, h);

  return parallel_map(cells.size(), [&](std::size_t i) {
    const auto& spec = family[cells[i].first];
    const auto& hw = hardware[cells[i].second];
    return ScalingRow{spec.name, total_param_count(spec), hw.name,
                      sync_scenario(spec, OnDevice{hw})};
  });
}

FrequencyTier classify_frequency(double hz) {
  if (hz >= 100.0) return FrequencyTier::high_performance;
  if (hz >= 10.0) return FrequencyTier::realtime;
  return FrequencyTier::below_realtime;
}

std::string_view to_string(FrequencyTier tier) {
  switch (tier) {
    case FrequencyTier::below_realtime:
      return "<10Hz";
    case FrequencyTier::realtime:
      return ">=10Hz";
    case FrequencyTier::high_performance:
      return ">=100Hz";
  }
  return "?";
}

}  // namespace vlaperf
