// Acceptance gate: one PASS/FAIL line per criterion. Published values are
// frozen here rather than shared with the reproduce command.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "vlaperf/scenarios.hpp"

using namespace vlaperf;

namespace {

constexpr double kMs = 1e-3;

// Collects individual cell failures for one criterion.
struct Gate {
  int cells = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++cells;
    if (!ok) failures.push_back(what);
  }
  void near(double model, double paper, double rel, const std::string& what,
            double resolution = 0) {
    const bool ok = std::abs(model - paper) <= rel * std::abs(paper) + resolution;
    expect(ok, fmt::format("{}: {:.4g} vs {:.4g} ({:+.1f}%, tol {:g}%)", what, model, paper,
                           (model - paper) / paper * 100, rel * 100));
  }
  void within(double model, double paper, double abs_tol, const std::string& what) {
    expect(std::abs(model - paper) <= abs_tol,
           fmt::format("{}: {:.4g} vs {:.4g} (tol +-{:g})", what, model, paper, abs_tol));
  }
};

AcceleratorConfig hw(const char* id) { return hardware_presets().at(id); }
NetworkConfig net(const char* id) { return network_presets().at(id); }

void exact_oracles(Gate& g) {
  g.near(static_cast<double>(param_count(presets::gemma_2b())), 1.98e9, 0.005, "Gemma params");
  g.near(static_cast<double>(param_count(presets::siglip_so400m())), 411.19e6, 0.005,
         "SigLIP params");
  g.near(static_cast<double>(param_count(presets::act_m())), 292.63e6, 0.07, "Act-M params");
  g.expect(kv_bytes_per_token(presets::gemma_2b()) == 18'432, "Gemma KV bytes per token");
  const std::pair<const char*, double> balance[] = {
      {"thor", 1481.5}, {"rtx4090", 163.7}, {"a100", 153.0}, {"h100", 295.2}, {"b100", 218.8}};
  for (const auto& [id, oi] : balance) g.within(hw(id).balance_oi(), oi, 0.1, id);
}

void long_context_memory(Gate& g) {
  const auto spec = presets::pi0();
  const std::int64_t steps[] = {1, 10, 100, 1000, 10000};
  const double memory[] = {5.1, 5.3, 6.4, 18.3, 137.0};
  const double kv[] = {0.01, 0.13, 1.3, 13.2, 131.8};
  const double kv_printed_digit[] = {0.01, 0.01, 0.1, 0.1, 0.1};
  for (int i = 0; i < 5; ++i) {
    g.near(static_cast<double>(memory_footprint(spec, steps[i])) / kGiB, memory[i], 0.02,
           fmt::format("memory t={}", steps[i]));
    // "0.01 GB" in print covers every value that rounds to it.
    g.near(static_cast<double>(long_context_kv_bytes(spec, steps[i])) / kGiB, kv[i], 0.02,
           fmt::format("KV t={}", steps[i]), kv_printed_digit[i] / 2);
  }
  for (const char* id : {"thor", "rtx4090"})
    g.expect(!long_context_scenario(spec, OnDevice{hw(id)}, 10000).feasible,
             fmt::format("{} feasible at 10000 steps", id));
  g.expect(long_context_scenario(spec, OnDevice{hw("b100")}, 10000).feasible,
           "B100 infeasible at 10000 steps");
  g.expect(!sync_scenario(ModelCatalog::builtin().model("pi0-xl"), OnDevice{hw("rtx4090")})
                .feasible,
           "RTX 4090 feasible for pi0-XL");
}

void baseline_latency(Gate& g) {
  struct Row {
    const char* hw;
    double vision, vlm, action, e2e;
    std::array<const char*, 3> bound;
  };
  const Row rows[] = {
      {"thor", 6.06, 20.30, 26.20, 52.57, {"memory", "memory", "memory"}},
      {"rtx4090", 4.02, 19.79, 7.25, 31.06, {"compute", "compute", "memory"}},
      {"a100", 2.13, 10.47, 3.60, 16.20, {"compute", "compute", "memory"}},
      {"h100", 0.71, 3.30, 2.14, 6.15, {"compute", "compute", "memory"}},
      {"b100", 0.40, 1.87, 0.91, 3.18, {"compute", "compute", "memory"}},
  };
  const auto spec = presets::pi0();
  for (const auto& row : rows) {
    const auto r = sync_scenario(spec, OnDevice{hw(row.hw)});
    const double vlm_tol = std::string_view(row.hw) == "b100" ? 0.05 : 0.15;
    g.near(r.phase_latencies.at(Phase::vision) / kMs, row.vision, 0.15,
           fmt::format("{} vision", row.hw));
    g.near(r.phase_latencies.at(Phase::vlm) / kMs, row.vlm, vlm_tol, fmt::format("{} vlm", row.hw));
    g.near(r.phase_latencies.at(Phase::action) / kMs, row.action, 0.15,
           fmt::format("{} action", row.hw));
    g.near(r.e2e_latency / kMs, row.e2e, 0.15, fmt::format("{} e2e", row.hw));
    for (std::size_t i = 0; i < kAllPhases.size(); ++i) {
      const auto got = to_string(r.boundedness.at(kAllPhases[i]));
      g.expect(got == row.bound[i], fmt::format("{} {} is {}-bound", row.hw,
                                                to_string(kAllPhases[i]), got));
    }
  }
}

void network_scenarios(Gate& g) {
  struct Row {
    const char* access;
    const char* cloud;
    double latency_ms, async_hz, speedup;
    bool network_bound;
  };
  const Row rows[] = {
      {"eth-10g", nullptr, 3.3, 314.4, 1.04, false},
      {"eth-1g", nullptr, 3.8, 314.4, 1.18, false},
      {"wifi-7", nullptr, 8.4, 314.4, 2.63, false},
      {"5g", nullptr, 27.8, 215.3, 5.99, true},
      {"4g", nullptr, 73.0, 50.5, 3.68, true},
      {"eth-10g", "fast-cloud", 23.4, 314.4, 7.34, false},
      {"4g", "slow-cloud", 273.4, 50.5, 13.79, true},
  };
  const auto spec = presets::pi0();
  for (const auto& row : rows) {
    const Placement p = row.cloud ? Placement{CloudServer{hw("b100"), net(row.access), net(row.cloud)}}
                                  : Placement{EdgeServer{hw("b100"), net(row.access)}};
    const auto r = async_scenario(spec, p);
    const std::string name = row.cloud ? fmt::format("{}+{}", row.access, row.cloud) : row.access;
    g.near(r.e2e_latency / kMs, row.latency_ms, 0.05, name + " latency");
    g.near(*r.async_frequency, row.async_hz, row.network_bound ? 0.03 : 0.15, name + " async");
    g.near(*r.async_frequency / r.sync_frequency, row.speedup, 0.07, name + " speedup");
  }
}

void dual_system(Gate& g) {
  struct Row {
    const char* hw;
    const char* net;
    double s1_ms, async5, async10;
  };
  const Row rows[] = {
      {"thor", nullptr, 32.3, 27.8, 24.7},
      {"b100", "eth-10g", 1.5, 682.4, 676.0},
      {"b100", "wifi-7", 6.5, 152.6, 151.2},
      {"b100", "5g", 26.0, 38.2, 37.8},
  };
  const auto spec = presets::pi0();
  for (const auto& row : rows) {
    const Placement p = row.net ? Placement{EdgeServer{hw(row.hw), net(row.net)}}
                                : Placement{OnDevice{hw(row.hw)}};
    const std::string name = row.net ? fmt::format("{}+{}", row.hw, row.net) : row.hw;
    const auto at5 = dual_system_scenario(spec, p, 5.0);
    const auto at10 = dual_system_scenario(spec, p, 10.0);
    g.near(at5.s1_latency / kMs, row.s1_ms, 0.03, name + " S1");
    g.near(at5.async_frequency, row.async5, 0.03, name + " async@5Hz");
    g.near(at10.async_frequency, row.async10, 0.03, name + " async@10Hz");
    if (!row.net) {
      g.within(at5.speedup(), 1.46, 0.03, name + " speedup@5Hz");
      g.within(at10.speedup(), 1.30, 0.03, name + " speedup@10Hz");
    }
  }
}

void collaboration(Gate& g) {
  const auto spec = presets::pi0();
  const std::pair<const char*, double> legs[] = {{"eth-10g", 12.4}, {"wifi-7", 43.7}, {"5g", 257.7}};
  for (const auto& [id, ms] : legs) {
    const auto r = sync_scenario(spec, Collaborative{hw("thor"), hw("b100"), net(id)});
    g.near(r.leg("kv_download") / kMs, ms, 0.06, fmt::format("{} KV download", id));
  }
  for (const auto& [id, n] : network_presets()) {
    const auto co = sync_scenario(spec, Collaborative{hw("thor"), hw("b100"), n});
    const auto solo = sync_scenario(spec, EdgeServer{hw("b100"), n});
    g.expect(co.e2e_latency >= solo.e2e_latency, id + " collaborative faster than server-only");
  }
}

void sweeps(Gate& g) {
  const auto spec = presets::pi0();
  const auto b100 = hw("b100");

  std::vector<std::int64_t> steps;
  for (std::int64_t s = 1; s <= 50; ++s) steps.push_back(s);
  const auto by_steps = denoise_chunk_sweep(spec, b100, steps, {50});
  const double per_step = by_steps[0].action_latency;
  bool linear = true;
  for (const auto& row : by_steps)
    linear = linear && std::abs(row.action_latency - static_cast<double>(row.steps) * per_step) <=
                           1e-12 * row.action_latency;
  g.expect(linear, "action latency not linear in steps");

  const auto by_chunk = denoise_chunk_sweep(spec, b100, {10}, {50, 250});
  const double growth = by_chunk[1].e2e_latency / by_chunk[0].e2e_latency - 1;
  g.expect(growth <= 0.15, fmt::format("chunk 50->250 e2e grows {:.1f}%", growth * 100));

  const auto dec = decoding_comparison(spec, b100, {5, 10, 50}, {14});
  const double ratio = dec[2].autoregressive / dec[2].diffusion;
  g.expect(ratio >= 102.4 / 1.3 && ratio <= 102.4 * 1.3,
           fmt::format("AR/diffusion at chunk 50: {:.1f} vs 102.4", ratio));
  g.near(dec[1].parallel_decode_oi, 135.9, 0.10, "parallel-decode OI chunk 10");
  g.near(dec[2].parallel_decode_oi, 477.7, 0.10, "parallel-decode OI chunk 50");
  g.expect(dec[0].autoregressive_parallel < dec[0].diffusion, "parallel AR slower at chunk 5");
  g.expect(dec[1].autoregressive_parallel < dec[1].diffusion, "parallel AR slower at chunk 10");
  g.expect(dec[2].autoregressive_parallel > dec[2].diffusion, "parallel AR faster at chunk 50");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

void scaling(Gate& g) {
  // Hz for thor, rtx4090, b100; nullopt marks N/A.
  const std::array<std::array<std::optional<double>, 3>, 4> paper = {{
      {19.0, 32.2, 314.4},
      {3.9, 8.0, 73.6},
      {2.1, std::nullopt, 39.7},
      {std::nullopt, std::nullopt, 9.6},
  }};
  const std::vector<AcceleratorConfig> hws = {hw("thor"), hw("rtx4090"), hw("b100")};
  const auto catalog = ModelCatalog::builtin();
  const auto rows = scaling_sweep(catalog, hws);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& expect = paper[i / 3][i % 3];
    const std::string name = fmt::format("{} on {}", rows[i].model, rows[i].hardware);
    if (!expect) {
      g.expect(!rows[i].result.feasible, name + " should be N/A");
    } else if (!rows[i].result.feasible) {
      g.expect(false, name + " is N/A");
    } else {
      g.near(rows[i].result.sync_frequency, *expect, 0.20, name);
    }
  }

  const auto family = scaled_family(catalog);
  for (Phase phase : kAllPhases) {
    std::vector<double> params, latency;
    for (const auto& spec : family) {
      const TransformerConfig& cfg = phase == Phase::vision ? spec.vision_encoder
                                     : phase == Phase::vlm  ? spec.vlm
                                                            : *spec.action_expert;
      params.push_back(static_cast<double>(param_count(cfg)));
      latency.push_back(sync_scenario(spec, OnDevice{hw("b100")}).phase_latencies.at(phase));
    }
    const double slope = loglog_slope(params, latency);
    g.within(slope, 1.0, 0.25, fmt::format("{} latency-vs-params slope", to_string(phase)));
  }
}

void fidelity_anchor(Gate& g) {
  auto spec = presets::pi0();
  spec.chunk_size = 63;
  spec.language_tokens = 0;
  const double paper[] = {14.7, 22.5, 30.4};
  for (int cams = 1; cams <= 3; ++cams) {
    spec.num_cameras = cams;
    g.near(sync_scenario(spec, OnDevice{hw("rtx4090")}).e2e_latency / kMs, paper[cams - 1], 0.15,
           fmt::format("{} camera(s)", cams));
  }
}

void properties(Gate& g) {
  const auto spec = presets::pi0();
  const auto graph = inference_graph(spec);

  // Roofline max law, per operator and summed.
  for (const char* id : {"thor", "rtx4090", "a100", "h100", "b100"}) {
    const auto h = hw(id);
    double sum = 0;
    bool per_op = true;
    for (const auto& op : graph.ops()) {
      const double t = op_time(op, h).seconds;
      per_op = per_op && t == std::max(op.flops / h.peak(2), op.bytes / h.mem_bandwidth);
      sum += t;
    }
    g.expect(per_op, fmt::format("{} max law", id));
    g.expect(std::abs(graph_time(graph, h).seconds - sum) <= 1e-12 * sum,
             fmt::format("{} graph time is not the operator sum", id));
  }

  // Graph additivity.
  const auto vision = vit_encode_graph(spec.vision_encoder, 3, 256);
  const auto vlm = prefill_graph(spec.vlm, 800, 0);
  const auto joined = concat(vision, vlm);
  g.expect(joined.total_flops() == vision.total_flops() + vlm.total_flops() &&
               joined.total_bytes() == vision.total_bytes() + vlm.total_bytes(),
           "graph totals not additive");

  // Affine network law.
  for (const auto& [id, n] : network_presets()) {
    const double t0 = transfer_time({0, Direction::upload}, n);
    const double t1 = transfer_time({1'000'000, Direction::upload}, n);
    const double t3 = transfer_time({3'000'000, Direction::upload}, n);
    g.expect(std::abs((t3 - t0) - 3 * (t1 - t0)) <= 1e-12 * t3 && t0 == n.base_latency,
             id + " transfer time not affine");
  }

  // Monotonicity.
  auto more = spec;
  double prev = 0;
  for (std::int64_t steps : {1, 2, 5, 10, 20}) {
    more.denoise_steps = steps;
    const double t = sync_scenario(more, OnDevice{hw("h100")}).e2e_latency;
    g.expect(t > prev, fmt::format("latency not increasing at {} steps", steps));
    prev = t;
  }
  prev = 0;
  for (std::int64_t t : {1, 10, 100, 1000}) {
    const double lat = long_context_scenario(spec, OnDevice{hw("b100")}, t).e2e_latency;
    g.expect(lat > prev, fmt::format("latency not increasing at context {}", t));
    prev = lat;
  }
  prev = 0;
  for (double cap : {1.0, 5.0, 10.0, 20.0}) {
    const double f = dual_system_scenario(spec, OnDevice{hw("thor")}, cap).async_frequency;
    g.expect(prev == 0 || f < prev, fmt::format("System 1 rate not decreasing at cap {}", cap));
    prev = f;
  }
  for (const auto& [id, n] : network_presets()) {
    const auto r = async_scenario(spec, EdgeServer{hw("b100"), n});
    g.expect(*r.async_frequency >= r.sync_frequency, id + " async below sync");
  }

  // Parallel sweeps are deterministic.
  const std::vector<std::int64_t> ts = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  const auto a = long_context_sweep(spec, OnDevice{hw("a100")}, ts);
  const auto b = long_context_sweep(spec, OnDevice{hw("a100")}, ts);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i)
    same = a[i].timesteps == ts[i] && a[i].result.e2e_latency == b[i].result.e2e_latency;
  g.expect(same, "parallel sweep not deterministic");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Gate&)>> criteria[] = {
      {"closed-form oracles", exact_oracles},
      {"long-context memory", long_context_memory},
      {"baseline latency and boundedness", baseline_latency},
      {"network scenarios", network_scenarios},
      {"dual-system", dual_system},
      {"collaboration", collaboration},
      {"sweeps", sweeps},
      {"scaling", scaling},
      {"fidelity anchor", fidelity_anchor},
      {"property suite", properties},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    Gate g;
    run(g);
    const bool ok = g.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("criterion %2d %-34s %s (%d/%d cells)\n", ++n, name, ok ? "PASS" : "FAIL",
                g.cells - static_cast<int>(g.failures.size()), g.cells);
    for (const auto& f : g.failures) std::printf("    %s\n", f.c_str());
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
