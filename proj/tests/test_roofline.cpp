#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vlaperf/opgraph.hpp"
#include "vlaperf/roofline.hpp"

using namespace vlaperf;

namespace {

AcceleratorConfig hw(const char* id) { return hardware_presets().at(id); }

AcceleratorConfig scaled(AcceleratorConfig base, double alpha) {
  for (auto& [p, v] : base.peak_flops) v *= alpha;
  base.mem_bandwidth *= alpha;
  return base;
}

}  // namespace

TEST_SUITE("roofline") {

TEST_CASE("hardware balance points") {
  CHECK(hw("thor").balance_oi() == doctest::Approx(1481.5).epsilon(1e-4));
  CHECK(hw("rtx4090").balance_oi() == doctest::Approx(163.7).epsilon(1e-3));
  CHECK(hw("a100").balance_oi() == doctest::Approx(153.0).epsilon(1e-3));
  CHECK(hw("h100").balance_oi() == doctest::Approx(295.2).epsilon(1e-3));
  CHECK(hw("b100").balance_oi() == doctest::Approx(218.75).epsilon(1e-6));
  for (const auto& [id, cfg] : hardware_presets()) CHECK_NOTHROW(cfg.validate());
  CHECK(hw("b100").mem_capacity == 192 * kGiB);
}

TEST_CASE("peak lookup") {
  auto b = hw("b100");
  CHECK(b.peak(2) == 1750e12);
  CHECK(b.peak(4) == 60e12);
  CHECK(b.peak(1) == 3500e12);
  CHECK_THROWS_AS(b.peak(8), ConfigError);
  b.peak_flops.erase(2);
  CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("operator time") {
  Operator op{"x", 1e12, 1e9, Phase::vlm};
  auto t = op_time(op, hw("b100"));
  CHECK(t.bound == Bound::compute);
  CHECK(t.seconds == doctest::Approx(1e12 / 1750e12));

  Operator memory{"m", 1e9, 1e9, Phase::vlm};
  auto tm = op_time(memory, hw("b100"));
  CHECK(tm.bound == Bound::memory);
  CHECK(tm.seconds == doctest::Approx(1e9 / 8000e9));
}

TEST_CASE("a tie counts as memory-bound") {
  auto b = hw("b100");
  Operator op{"tie", 218.75 * 8e9, 8e9, Phase::vlm};
  CHECK(op.flops / b.peak(2) == op.bytes / b.mem_bandwidth);
  CHECK(op_time(op, b).bound == Bound::memory);
  OperatorGraph g;
  g.push(op);
  CHECK(boundedness(g, b) == Bound::memory);
}

TEST_CASE("graph time is the sum of operator maxima") {
  auto g = inference_graph(presets::pi0());
  auto a = hw("a100");
  double sum = 0, flops_only = 0, bytes_only = 0;
  for (const auto& op : g.ops()) {
    sum += op_time(op, a).seconds;
    flops_only += op.flops / a.peak(2);
    bytes_only += op.bytes / a.mem_bandwidth;
  }
  auto t = graph_time(g, a);
  CHECK(t.seconds == doctest::Approx(sum).epsilon(1e-12));
  CHECK(t.seconds >= flops_only);
  CHECK(t.seconds >= bytes_only);
  double phases = 0;
  for (const auto& [p, s] : t.phase_seconds) phases += s;
  CHECK(phases == doctest::Approx(t.seconds).epsilon(1e-12));
}

TEST_CASE("empty graph") {
  OperatorGraph g;
  CHECK(graph_time(g, hw("thor")).seconds == 0);
  CHECK_THROWS_AS(graph_oi(g), std::domain_error);
}

TEST_CASE("scaling peak and bandwidth together scales time inversely") {
  auto g = inference_graph(presets::pi0());
  auto base = hw("h100");
  const double t = graph_time(g, base).seconds;
  for (double alpha : {0.5, 2.0, 3.0}) {
    CHECK(graph_time(g, scaled(base, alpha)).seconds == doctest::Approx(t / alpha).epsilon(1e-12));
  }
}

TEST_CASE("more bandwidth never slows a graph") {
  auto g = inference_graph(presets::pi0());
  auto base = hw("thor");
  double prev = graph_time(g, base).seconds;
  for (double bw : {300e9, 600e9, 1200e9}) {
    base.mem_bandwidth = bw;
    const double t = graph_time(g, base).seconds;
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("phase boundedness on B100") {
  auto spec = presets::pi0();
  auto g = inference_graph(spec);
  auto b = hw("b100");
  CHECK(boundedness(g.phase_subgraph(Phase::vision), b) == Bound::compute);
  CHECK(boundedness(g.phase_subgraph(Phase::vlm), b) == Bound::compute);
  CHECK(boundedness(g.phase_subgraph(Phase::action), b) == Bound::memory);
  CHECK(boundedness(g.phase_subgraph(Phase::action), hw("thor")) == Bound::memory);
}

TEST_CASE("memory footprint") {
  auto spec = presets::pi0();
  const auto weights = total_weight_bytes(spec);
  const auto kv = stateless_kv_bytes(spec);
  CHECK(kv == 800 * 18432);
  CHECK(memory_footprint(spec) == weights + activation_working_set_bytes(spec) + kv);
  // Gemma's gated MLP over the 800-token prefix is the largest buffer.
  CHECK(activation_working_set_bytes(spec) == 800 * (2048 + 2 * 16384) * 2);
  CHECK(memory_footprint(spec) / kGiB == doctest::Approx(5.10).epsilon(0.02));

  CHECK(long_context_kv_bytes(spec, 1) == 768 * 18432);
  CHECK(long_context_kv_bytes(spec, 1000) == 1000 * long_context_kv_bytes(spec, 1));
  CHECK(memory_footprint(spec, 1000) / kGiB == doctest::Approx(18.3).epsilon(0.02));
  CHECK_THROWS_AS(memory_footprint(spec, 0), ConfigError);
}

TEST_CASE("capacity checks") {
  auto catalog = ModelCatalog::builtin();
  auto xxl = catalog.model("pi0-xxl");
  CHECK_FALSE(fits(xxl, hw("thor")));
  CHECK_FALSE(fits(xxl, hw("rtx4090")));
  CHECK(fits(xxl, hw("b100")));
  CHECK(fits(presets::pi0(), hw("rtx4090")));
  CHECK_FALSE(fits(presets::pi0(), hw("thor"), 10000));
  CHECK(fits(presets::pi0(), hw("b100"), 10000));
}

TEST_CASE("footprint grows with context") {
  auto spec = presets::pi0();
  std::int64_t prev = 0;
  for (std::int64_t t : {1, 10, 100, 1000, 10000}) {
    const auto f = memory_footprint(spec, t);
    CHECK(f > prev);
    prev = f;
  }
}

}  // TEST_SUITE
