#include "vlaperf/commands.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace vlaperf {

namespace {

ScenarioResult evaluate(const VlaModelSpec& spec, const Placement& placement,
                        const RunSettings& run) {
  const ScenarioOptions opts = resolve_options(run);
  if (run.context_steps) {
    ScenarioResult r = long_context_scenario(spec, placement, *run.context_steps, opts);
    if (r.feasible && run.async.value_or(false))
      r.async_frequency = async_rate(spec, placement, r.compute_latency(), opts);
    return r;
  }
  if (std::holds_alternative<Collaborative>(placement))
    return collaborative_scenario(spec, placement, opts);
  return run.async.value_or(false) ? async_scenario(spec, placement, opts)
                                   : sync_scenario(spec, placement, opts);
}

Cell hz_or_na(const ScenarioResult& r, std::optional<double> hz) {
  return r.feasible && hz ? Cell::hertz(*hz) : Cell::na();
}

Table kv_table(std::string title) {
  Table t({"field", "value"});
  t.title = std::move(title);
  return t;
}

}  // namespace

std::vector<Table> analyze_tables(const Registry& registry, const RunSettings& run) {
  const VlaModelSpec spec = resolve_model(registry, run);
  const Placement placement = resolve_placement(registry, run);
  std::vector<Table> out;

  if (run.s2_cap) {
    if (run.context_steps) throw ConfigError("--s2-cap cannot be combined with --context-steps");
    const auto d = dual_system_scenario(spec, placement, *run.s2_cap, resolve_options(run));
    Table t = kv_table(fmt::format("{} on {} (dual-system)", spec.name, describe(placement)));
    t.add_row({Cell::text("S2 cap"), Cell::hertz(d.s2_cap)});
    t.add_row({Cell::text("S1 latency"), d.s1_latency > 0 ? Cell::seconds(d.s1_latency) : Cell::na()});
    t.add_row({Cell::text("S2 latency"), d.s2_latency > 0 ? Cell::seconds(d.s2_latency) : Cell::na()});
    t.add_row({Cell::text("sync frequency"),
               d.sync_frequency > 0 ? Cell::hertz(d.sync_frequency) : Cell::na()});
    t.add_row({Cell::text("async frequency"),
               d.feasible ? Cell::hertz(d.async_frequency) : Cell::na()});
    t.add_row({Cell::text("speedup"), d.feasible ? Cell::ratio(d.speedup()) : Cell::na()});
    t.add_row({Cell::text("status"),
               Cell::text(!d.feasible        ? "N/A: " + d.infeasible_reason
                          : d.s1_below_cap   ? "ok (System 1 rate below the System 2 cap)"
                                             : "ok")});
    out.push_back(std::move(t));
    return out;
  }

  const ScenarioResult r = evaluate(spec, placement, run);
  Table summary = kv_table(fmt::format("{} on {}", spec.name, describe(placement)));
  summary.add_row({Cell::text("parameters"), Cell::count(total_param_count(spec))});
  if (run.context_steps) {
    summary.add_row({Cell::text("context steps"), Cell::count(*run.context_steps)});
    summary.add_row({Cell::text("KV cache"),
                     Cell::bytes(static_cast<double>(long_context_kv_bytes(spec, *run.context_steps)))});
  }
  summary.add_row({Cell::text("memory footprint"), Cell::bytes(static_cast<double>(r.footprint))});
  summary.add_row({Cell::text("e2e latency"), r.feasible ? Cell::seconds(r.e2e_latency) : Cell::na()});
  summary.add_row({Cell::text("sync frequency"),
                   r.feasible ? Cell::hertz(r.sync_frequency) : Cell::na()});
  if (run.async.value_or(false))
    summary.add_row({Cell::text("async frequency"), hz_or_na(r, r.async_frequency)});
  if (r.feasible)
    summary.add_row({Cell::text("tier"),
                     Cell::text(std::string(to_string(classify_frequency(
                         r.async_frequency.value_or(r.sync_frequency)))))});
  summary.add_row({Cell::text("status"),
                   Cell::text(r.feasible ? "ok" : "N/A: " + r.infeasible_reason)});
  out.push_back(std::move(summary));
  if (!r.feasible) return out;

  Table phases({"phase", "latency", "OI", "bound"});
  phases.title = "phases";
  for (Phase p : kAllPhases) {
    auto lat = r.phase_latencies.find(p);
    if (lat == r.phase_latencies.end()) continue;
    auto oi = r.phase_oi.find(p);
    auto bound = r.boundedness.find(p);
    phases.add_row({Cell::text(std::string(to_string(p))), Cell::seconds(lat->second),
                    oi == r.phase_oi.end() ? Cell::na() : Cell::number(oi->second),
                    bound == r.boundedness.end() ? Cell::na()
                                                 : Cell::text(std::string(to_string(bound->second)))});
  }
  out.push_back(std::move(phases));

  if (!r.network_latencies.empty()) {
    Table net({"leg", "latency"});
    net.title = "network";
    for (const auto& [leg, t] : r.network_latencies) net.add_row({Cell::text(leg), Cell::seconds(t)});
    out.push_back(std::move(net));
  }
  return out;
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes = {
      "model", "hw",  "placement", "net",  "cloud_net",       "device_hw",
      "chunk", "steps", "context_steps", "decoding", "cameras", "dof", "language_tokens"};
  return axes;
}

namespace {

std::int64_t parse_int(const std::string& axis, const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(fmt::format("axis '{}': '{}' is not an integer", axis, text));
  return v;
}

std::string canonical_axis(std::string axis) {
  std::replace(axis.begin(), axis.end(), '-', '_');
  return axis;
}

}  // namespace

void apply_axis(RunSettings& run, const std::string& axis_name, const std::string& value) {
  const std::string axis = canonical_axis(axis_name);
  if (axis == "model") run.model = value;
  else if (axis == "hw") run.hw = value;
  else if (axis == "placement") run.placement = value;
  else if (axis == "net") run.net = value;
  else if (axis == "cloud_net") run.cloud_net = value;
  else if (axis == "device_hw") run.device_hw = value;
  else if (axis == "decoding") run.decoding = value;
  else if (axis == "chunk") run.chunk = parse_int(axis, value);
  else if (axis == "steps") run.steps = parse_int(axis, value);
  else if (axis == "context_steps") run.context_steps = parse_int(axis, value);
  else if (axis == "cameras") run.cameras = parse_int(axis, value);
  else if (axis == "dof") run.dof = parse_int(axis, value);
  else if (axis == "language_tokens") run.language_tokens = parse_int(axis, value);
  else {
    std::string known;
    for (const auto& a : sweep_axes()) known += (known.empty() ? "" : ", ") + a;
    throw ConfigError(fmt::format("unknown sweep axis '{}' (known: {})", axis_name, known));
  }
}

Table sweep_table(const Registry& registry, const RunSettings& run) {
  if (run.s2_cap) throw ConfigError("--s2-cap is only supported by analyze");
  const bool with_async = run.async.value_or(false);
  std::vector<std::string> columns;
  for (const auto& [axis, values] : run.sweep) {
    if (values.empty()) throw ConfigError(fmt::format("sweep axis '{}' has no values", axis));
    columns.push_back(canonical_axis(axis));
  }
  for (const char* c : {"model_name", "placement_desc", "vision", "vlm", "action", "network",
                        "e2e", "sync_hz"})
    columns.emplace_back(c);
  if (with_async) columns.emplace_back("async_hz");
  columns.emplace_back("footprint");
  columns.emplace_back("status");

  std::size_t cells = 1;
  for (const auto& [axis, values] : run.sweep) cells *= values.size();

  // Validate axis names and values up front so errors are not thread-dependent.
  for (const auto& [axis, values] : run.sweep) {
    RunSettings probe;
    for (const auto& v : values) apply_axis(probe, axis, v);
  }

  auto rows = parallel_map(cells, [&](std::size_t index) {
    RunSettings point = run;
    std::vector<Cell> row;
    // Mixed-radix decode; the last axis varies fastest.
    std::vector<std::size_t> digits(run.sweep.size());
    for (std::size_t a = run.sweep.size(); a-- > 0;) {
      digits[a] = index % run.sweep[a].second.size();
      index /= run.sweep[a].second.size();
    }
    for (std::size_t a = 0; a < run.sweep.size(); ++a) {
      const std::string& v = run.sweep[a].second[digits[a]];
      apply_axis(point, run.sweep[a].first, v);
      row.push_back(Cell::text(v));
    }
    const VlaModelSpec spec = resolve_model(registry, point);
    const Placement placement = resolve_placement(registry, point);
    const ScenarioResult r = evaluate(spec, placement, point);
    row.push_back(Cell::text(spec.name));
    row.push_back(Cell::text(describe(placement)));
    auto phase = [&](Phase p) {
      auto it = r.phase_latencies.find(p);
      return r.feasible && it != r.phase_latencies.end() ? Cell::seconds(it->second) : Cell::na();
    };
    row.push_back(phase(Phase::vision));
    row.push_back(phase(Phase::vlm));
    row.push_back(phase(Phase::action));
    row.push_back(r.feasible ? Cell::seconds(r.network_latency()) : Cell::na());
    row.push_back(r.feasible ? Cell::seconds(r.e2e_latency) : Cell::na());
    row.push_back(r.feasible ? Cell::hertz(r.sync_frequency) : Cell::na());
    if (with_async) row.push_back(hz_or_na(r, r.async_frequency));
    row.push_back(Cell::bytes(static_cast<double>(r.footprint)));
    row.push_back(Cell::text(r.feasible ? "ok" : "N/A: " + r.infeasible_reason));
    return row;
  });

  Table t(columns);
  t.title = "sweep";
  for (auto& row : rows) t.add_row(std::move(row));
  return t;
}

std::vector<Table> preset_tables(const Registry& registry) {
  std::vector<Table> out;

  Table models({"id", "name", "params", "vision", "vlm", "action", "decoding"});
  models.title = "models";
  for (const auto& [id, spec] : registry.catalog.models()) {
    models.add_row({Cell::text(id), Cell::text(spec.name), Cell::count(total_param_count(spec)),
                    Cell::text(spec.vision_encoder.name), Cell::text(spec.vlm.name),
                    spec.action_expert ? Cell::text(spec.action_expert->name) : Cell::na(),
                    Cell::text(std::string(to_string(spec.decoding_mode)))});
  }
  out.push_back(std::move(models));

  Table comps({"id", "name", "params", "layers", "hidden", "intermediate", "q_heads", "kv_heads"});
  comps.title = "components";
  for (const auto& [id, c] : registry.catalog.components()) {
    comps.add_row({Cell::text(id), Cell::text(c.name), Cell::count(param_count(c)),
                   Cell::count(c.num_layers), Cell::count(c.hidden_size),
                   Cell::count(c.intermediate_size), Cell::count(c.num_q_heads),
                   Cell::count(c.num_kv_heads)});
  }
  out.push_back(std::move(comps));

  Table hw({"id", "name", "bf16_tflops", "hbm_gbs", "memory", "balance_oi"});
  hw.title = "hardware";
  for (const auto& [id, h] : registry.hardware) {
    hw.add_row({Cell::text(id), Cell::text(h.name), Cell::number(h.peak(2) / 1e12),
                Cell::number(h.mem_bandwidth / 1e9), Cell::bytes(h.mem_capacity),
                Cell::number(h.balance_oi())});
  }
  out.push_back(std::move(hw));

  Table nets({"id", "name", "upload_mbps", "download_mbps", "base_latency", "efficiency"});
  nets.title = "networks";
  for (const auto& [id, n] : registry.networks) {
    nets.add_row({Cell::text(id), Cell::text(n.name), Cell::number(n.upload_bw / 1e6),
                  Cell::number(n.download_bw / 1e6), Cell::seconds(n.base_latency),
                  Cell::number(n.efficiency)});
  }
  out.push_back(std::move(nets));

  Table ids({"id"});
  ids.title = "reproducible tables";
  for (const char* id : {"T1", "T3", "T4", "T5 (scaling)", "T6 (long-context)", "T8",
                         "T9 (dual-system)", "collab"})
    ids.add_row({Cell::text(id)});
  out.push_back(std::move(ids));
  return out;
}

}  // namespace vlaperf
