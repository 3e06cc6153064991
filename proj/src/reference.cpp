#include "vlaperf/reference.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace vlaperf {

bool Check::passed() const {
  if (unit == Cell::Kind::text) return published_label == modeled_label;
  if (!published || !modeled) return !published && !modeled;
  const double diff = std::abs(*modeled - *published);
  if (absolute) return diff <= tolerance;
  return diff <= tolerance * std::abs(*published) + resolution;
}

std::optional<double> Check::error() const {
  if (unit == Cell::Kind::text || !published || !modeled) return std::nullopt;
  if (absolute) return *modeled - *published;
  return (*modeled - *published) / *published;
}

bool Reproduction::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

Table Reproduction::table() const {
  Table t({"row", "metric", "paper", "model", "error", "tolerance", "status"});
  t.title = fmt::format("{}: {}", id, title);
  auto value = [&](const Check& c, const std::optional<double>& v, const std::string& label) {
    if (c.unit == Cell::Kind::text) return Cell::text(label);
    if (!v) return Cell::na();
    switch (c.unit) {
      case Cell::Kind::seconds:
        return Cell::seconds(*v);
      case Cell::Kind::hertz:
        return Cell::hertz(*v);
      case Cell::Kind::bytes:
        return Cell::bytes(*v);
      case Cell::Kind::ratio:
        return Cell::ratio(*v);
      default:
        return Cell::number(*v);
    }
  };
  for (const auto& c : checks) {
    const auto err = c.error();
    Cell err_cell = !err ? Cell::text("-")
                         : Cell::text(c.absolute ? fmt::format("{:+.3f}", *err)
                                                 : fmt::format("{:+.1f}%", *err * 100));
    Cell tol_cell = c.unit == Cell::Kind::text ? Cell::text("exact")
                    : c.absolute               ? Cell::text(fmt::format("±{:g}", c.tolerance))
                                               : Cell::text(fmt::format("{:g}%", c.tolerance * 100));
    t.add_row({Cell::text(c.row), Cell::text(c.metric),
               value(c, c.published, c.published_label), value(c, c.modeled, c.modeled_label),
               std::move(err_cell), std::move(tol_cell), Cell::text(c.passed() ? "pass" : "FAIL")});
  }
  return t;
}

namespace {

constexpr double kMs = 1e-3;

Check numeric(std::string row, std::string metric, Cell::Kind unit, std::optional<double> paper,
              std::optional<double> model, double tol, bool absolute = false) {
  Check c;
  c.row = std::move(row);
  c.metric = std::move(metric);
  c.unit = unit;
  c.published = paper;
  c.modeled = model;
  c.tolerance = tol;
  c.absolute = absolute;
  return c;
}

Check label(std::string row, std::string metric, std::string paper, std::string model) {
  Check c;
  c.row = std::move(row);
  c.metric = std::move(metric);
  c.unit = Cell::Kind::text;
  c.published_label = std::move(paper);
  c.modeled_label = std::move(model);
  return c;
}

// Roofline validation on RTX 4090: 10 steps, chunk 63, empty prompt.
Reproduction table1(const Registry& reg) {
  Reproduction r{"T1", "roofline latency vs camera count on RTX 4090", {}};
  const double paper[] = {14.7, 22.5, 30.4};
  VlaModelSpec spec = reg.model("pi0");
  spec.chunk_size = 63;
  spec.language_tokens = 0;
  for (int cams = 1; cams <= 3; ++cams) {
    spec.num_cameras = cams;
    const auto res = sync_scenario(spec, OnDevice{reg.accelerator("rtx4090")});
    r.checks.push_back(numeric(fmt::format("{} camera{}", cams, cams > 1 ? "s" : ""), "e2e",
                               Cell::Kind::seconds, paper[cams - 1] * kMs, res.e2e_latency, 0.15));
  }
  return r;
}

struct BaselineRow {
  const char* hw;
  double vision, vlm, action, e2e, hz;
};
constexpr BaselineRow kBaseline[] = {
    {"thor", 6.06, 20.30, 26.20, 52.57, 19.0},  {"rtx4090", 4.02, 19.79, 7.25, 31.06, 32.2},
    {"a100", 2.13, 10.47, 3.60, 16.20, 61.7},   {"h100", 0.71, 3.30, 2.14, 6.15, 162.5},
    {"b100", 0.40, 1.87, 0.91, 3.18, 314.4},
};

Reproduction table3(const Registry& reg) {
  Reproduction r{"T3", "pi0 latency per GPU without network", {}};
  const VlaModelSpec& spec = reg.model("pi0");
  for (const auto& row : kBaseline) {
    const AcceleratorConfig& hw = reg.accelerator(row.hw);
    auto res = sync_scenario(spec, OnDevice{hw});
    const bool anchor = std::string_view(row.hw) == "b100";
    r.checks.push_back(numeric(hw.name, "vision", Cell::Kind::seconds, row.vision * kMs,
                               res.phase_latencies[Phase::vision], 0.15));
    r.checks.push_back(numeric(hw.name, "vlm", Cell::Kind::seconds, row.vlm * kMs,
                               res.phase_latencies[Phase::vlm], anchor ? 0.05 : 0.15));
    r.checks.push_back(numeric(hw.name, "action", Cell::Kind::seconds, row.action * kMs,
                               res.phase_latencies[Phase::action], 0.15));
    r.checks.push_back(
        numeric(hw.name, "e2e", Cell::Kind::seconds, row.e2e * kMs, res.e2e_latency, 0.15));
    r.checks.push_back(
        numeric(hw.name, "frequency", Cell::Kind::hertz, row.hz, res.sync_frequency, 0.15));
  }
  return r;
}

Reproduction table4(const Registry& reg) {
  Reproduction r{"T4", "compute- vs memory-bound phases", {}};
  struct Row {
    const char* hw;
    double balance;
    const char* labels[3];
  };
  const Row rows[] = {
      {"thor", 1481.5, {"memory", "memory", "memory"}},
      {"rtx4090", 163.7, {"compute", "compute", "memory"}},
      {"a100", 153.0, {"compute", "compute", "memory"}},
      {"h100", 295.2, {"compute", "compute", "memory"}},
      {"b100", 218.8, {"compute", "compute", "memory"}},
  };
  const VlaModelSpec& spec = reg.model("pi0");
  for (const auto& row : rows) {
    const AcceleratorConfig& hw = reg.accelerator(row.hw);
    r.checks.push_back(
        numeric(hw.name, "balance OI", Cell::Kind::number, row.balance, hw.balance_oi(), 0.1, true));
    auto res = sync_scenario(spec, OnDevice{hw});
    for (std::size_t i = 0; i < kAllPhases.size(); ++i) {
      const Phase phase = kAllPhases[i];
      r.checks.push_back(label(hw.name, std::string(to_string(phase)), row.labels[i],
                               std::string(to_string(res.boundedness.at(phase)))));
    }
  }
  const auto res = sync_scenario(spec, OnDevice{reg.accelerator("b100")});
  const double oi[] = {321.4, 542.8, 54.0};
  for (std::size_t i = 0; i < kAllPhases.size(); ++i) {
    r.checks.push_back(numeric("pi0", fmt::format("{} OI", to_string(kAllPhases[i])),
                               Cell::Kind::number, oi[i], res.phase_oi.at(kAllPhases[i]), 0.15));
  }
  return r;
}

Reproduction table5(const Registry& reg) {
  Reproduction r{"T5", "scaled-up models (frequency)", {}};
  // Published Hz per model for Thor, RTX 4090, B100; nullopt = N/A.
  const std::map<std::string, std::array<std::optional<double>, 3>> paper = {
      {"pi0", {19.0, 32.2, 314.4}},
      {"pi0-L", {3.9, 8.0, 73.6}},
      {"pi0-XL", {2.1, std::nullopt, 39.7}},
      {"pi0-XXL", {std::nullopt, std::nullopt, 9.6}},
  };
  const std::vector<AcceleratorConfig> hws = {reg.accelerator("thor"), reg.accelerator("rtx4090"),
                                              reg.accelerator("b100")};
  const auto rows = scaling_sweep(reg.catalog, hws);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& expect = paper.at(row.model)[i % hws.size()];
    std::optional<double> hz;
    if (row.result.feasible) hz = row.result.sync_frequency;
    r.checks.push_back(numeric(
        fmt::format("{} ({:.1f}B)", row.model, static_cast<double>(row.params) / 1e9),
        row.hardware, Cell::Kind::hertz, expect, hz, 0.20));
  }
  return r;
}

Reproduction table6(const Registry& reg) {
  Reproduction r{"T6", "long-context memory and latency", {}};
  const std::vector<std::int64_t> steps = {1, 10, 100, 1000, 10000};
  const double memory[] = {5.1, 5.3, 6.4, 18.3, 137.0};
  const double kv[] = {0.01, 0.13, 1.3, 13.2, 131.8};
  // Printed precision of each KV cell, in GiB.
  const double kv_digits[] = {0.01, 0.01, 0.1, 0.1, 0.1};
  const std::pair<const char*, std::array<std::optional<double>, 5>> latency[] = {
      {"thor", {52.6, 58.4, 122.9, 768.3, std::nullopt}},
      {"rtx4090", {31.1, 39.0, 117.3, 900.6, std::nullopt}},
      {"b100", {3.2, 3.9, 11.3, 85.2, 823.7}},
  };
  const VlaModelSpec& spec = reg.model("pi0");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string row = fmt::format("t={}", steps[i]);
    Check mem = numeric(row, "total memory", Cell::Kind::bytes, memory[i] * kGiB,
                        static_cast<double>(memory_footprint(spec, steps[i])), 0.02);
    Check cache = numeric(row, "KV cache", Cell::Kind::bytes, kv[i] * kGiB,
                          static_cast<double>(long_context_kv_bytes(spec, steps[i])), 0.02);
    // A value printed as "0.01 GB" stands for anything that rounds to it.
    cache.resolution = kv_digits[i] / 2 * kGiB;
    r.checks.push_back(mem);
    r.checks.push_back(cache);
  }
  for (const auto& [hw_id, cells] : latency) {
    const auto rows = long_context_sweep(spec, OnDevice{reg.accelerator(hw_id)}, steps);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::optional<double> model;
      if (rows[i].result.feasible) model = rows[i].result.e2e_latency;
      std::optional<double> paper;
      if (cells[i]) paper = *cells[i] * kMs;
      r.checks.push_back(numeric(fmt::format("t={}", steps[i]), reg.accelerator(hw_id).name,
                                 Cell::Kind::seconds, paper, model, 0.15));
    }
  }
  return r;
}

struct NetRow {
  const char* label;
  const char* access;
  const char* cloud;  // nullptr for an edge server
  double latency_ms, sync_hz, async_hz, speedup;
  bool network_bound;
};
constexpr NetRow kNetRows[] = {
    {"Ethernet 10G", "eth-10g", nullptr, 3.3, 301.4, 314.4, 1.04, false},
    {"Ethernet 1G", "eth-1g", nullptr, 3.8, 266.5, 314.4, 1.18, false},
    {"WiFi 7", "wifi-7", nullptr, 8.4, 119.7, 314.4, 2.63, false},
    {"5G", "5g", nullptr, 27.8, 35.9, 215.3, 5.99, true},
    {"4G", "4g", nullptr, 73.0, 13.7, 50.5, 3.68, true},
    {"Wired + Fast Cloud", "eth-10g", "fast-cloud", 23.4, 42.8, 314.4, 7.34, false},
    {"4G + Slow Cloud", "4g", "slow-cloud", 273.4, 3.7, 50.5, 13.79, true},
};

Reproduction table8(const Registry& reg) {
  Reproduction r{"T8", "sync vs async frequency on B100 servers", {}};
  const VlaModelSpec& spec = reg.model("pi0");
  const AcceleratorConfig& hw = reg.accelerator("b100");
  for (const auto& row : kNetRows) {
    Placement placement = row.cloud ? Placement{CloudServer{hw, reg.network(row.access),
                                                            reg.network(row.cloud)}}
                                    : Placement{EdgeServer{hw, reg.network(row.access)}};
    const auto res = async_scenario(spec, placement);
    const double async_hz = res.async_frequency.value_or(0);
    r.checks.push_back(numeric(row.label, "latency", Cell::Kind::seconds, row.latency_ms * kMs,
                               res.e2e_latency, 0.05));
    r.checks.push_back(
        numeric(row.label, "sync", Cell::Kind::hertz, row.sync_hz, res.sync_frequency, 0.05));
    r.checks.push_back(numeric(row.label, "async", Cell::Kind::hertz, row.async_hz, async_hz,
                               row.network_bound ? 0.03 : 0.15));
    r.checks.push_back(numeric(row.label, "speedup", Cell::Kind::ratio, row.speedup,
                               async_hz / res.sync_frequency, 0.07));
  }
  return r;
}

Reproduction table9(const Registry& reg) {
  Reproduction r{"T9", "dual-system inference", {}};
  struct Row {
    const char* hw;
    const char* net;  // nullptr = on-device
    double s1_ms, s2_ms, sync_hz, async5, speedup5, async10, speedup10;
  };
  const Row rows[] = {
      {"thor", nullptr, 32.3, 20.3, 19.0, 27.8, 1.46, 24.7, 1.30},
      {"b100", "eth-10g", 1.5, 1.9, 301.4, 682.4, 2.26, 676.0, 2.24},
      {"b100", "wifi-7", 6.5, 1.9, 119.7, 152.6, 1.28, 151.2, 1.26},
      {"b100", "5g", 26.0, 1.9, 35.9, 38.2, 1.06, 37.8, 1.05},
  };
  const VlaModelSpec& spec = reg.model("pi0");
  for (const auto& row : rows) {
    const AcceleratorConfig& hw = reg.accelerator(row.hw);
    Placement placement =
        row.net ? Placement{EdgeServer{hw, reg.network(row.net)}} : Placement{OnDevice{hw}};
    const std::string name =
        row.net ? fmt::format("{} + {}", hw.name, reg.network(row.net).name) : hw.name;
    const bool on_device = row.net == nullptr;
    const auto at5 = dual_system_scenario(spec, placement, 5.0);
    const auto at10 = dual_system_scenario(spec, placement, 10.0);
    r.checks.push_back(
        numeric(name, "S1 latency", Cell::Kind::seconds, row.s1_ms * kMs, at5.s1_latency, 0.03));
    r.checks.push_back(
        numeric(name, "S2 latency", Cell::Kind::seconds, row.s2_ms * kMs, at5.s2_latency, 0.15));
    r.checks.push_back(
        numeric(name, "sync", Cell::Kind::hertz, row.sync_hz, at5.sync_frequency, 0.05));
    r.checks.push_back(
        numeric(name, "async @5Hz", Cell::Kind::hertz, row.async5, at5.async_frequency, 0.03));
    r.checks.push_back(numeric(name, "speedup @5Hz", Cell::Kind::ratio, row.speedup5,
                               at5.speedup(), on_device ? 0.03 : 0.05, on_device));
    r.checks.push_back(
        numeric(name, "async @10Hz", Cell::Kind::hertz, row.async10, at10.async_frequency, 0.03));
    r.checks.push_back(numeric(name, "speedup @10Hz", Cell::Kind::ratio, row.speedup10,
                               at10.speedup(), on_device ? 0.03 : 0.05, on_device));
  }
  return r;
}

Reproduction collab(const Registry& reg) {
  Reproduction r{"collab", "device-server collaboration (B100 server, Thor device)", {}};
  const VlaModelSpec& spec = reg.model("pi0");
  const AcceleratorConfig& server = reg.accelerator("b100");
  const AcceleratorConfig& device = reg.accelerator("thor");
  const std::pair<const char*, double> legs[] = {
      {"eth-10g", 12.4}, {"wifi-7", 43.7}, {"5g", 257.7}};
  for (const auto& [net_id, ms] : legs) {
    const auto res = collaborative_scenario(spec, Collaborative{device, server, reg.network(net_id)});
    r.checks.push_back(numeric(reg.network(net_id).name, "KV download", Cell::Kind::seconds,
                               ms * kMs, res.leg("kv_download"), 0.06));
  }
  for (const auto& [id, net] : reg.networks) {
    const auto co = collaborative_scenario(spec, Collaborative{device, server, net});
    const auto solo = sync_scenario(spec, EdgeServer{server, net});
    r.checks.push_back(label(net.name, "collaborative >= server-only", "yes",
                             co.e2e_latency >= solo.e2e_latency ? "yes" : "no"));
  }
  return r;
}

std::string normalize(std::string_view id) {
  std::string out;
  for (char ch : id) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::vector<std::string> reproduction_ids() {
  return {"T1", "T3", "T4", "T5", "T6", "T8", "T9", "collab"};
}

Reproduction reproduce(std::string_view id, const Registry& registry) {
  const std::string key = normalize(id);
  if (key == "t1") return table1(registry);
  if (key == "t3") return table3(registry);
  if (key == "t4") return table4(registry);
  if (key == "t5" || key == "scaling") return table5(registry);
  if (key == "t6" || key == "long-context") return table6(registry);
  if (key == "t8") return table8(registry);
  if (key == "t9" || key == "dual-system") return table9(registry);
  if (key == "collab") return collab(registry);
  std::string known;
  for (const auto& k : reproduction_ids()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError(fmt::format("unknown table '{}' (known: {}, scaling)", id, known));
}

}  // namespace vlaperf
