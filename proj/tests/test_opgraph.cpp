#include <doctest.h>

#include "vlaperf/opgraph.hpp"
#include "vlaperf/roofline.hpp"

using namespace vlaperf;

namespace {

TransformerConfig toy() {
  return {.name = "toy",
          .num_layers = 1,
          .hidden_size = 4,
          .intermediate_size = 8,
          .num_ffi = 2,
          .num_q_heads = 2,
          .num_kv_heads = 1,
          .head_dim = 2};
}

double attention_flops(const OperatorGraph& g) {
  double total = 0;
  for (const auto& op : g.ops())
    if (op.label.find("attn") != std::string::npos) total += op.flops;
  return total;
}

}  // namespace

TEST_SUITE("opgraph") {

TEST_CASE("matmul operator") {
  auto one = matmul_op(1, 1, 1, 2, "x");
  CHECK(one.flops == 2);
  CHECK(one.bytes == 6);

  auto proj = matmul_op(800, 2048, 2048, 2, "q");
  CHECK(proj.flops == 2.0 * 800 * 2048 * 2048);
  CHECK(proj.bytes == 2.0 * (800.0 * 2048 + 2048.0 * 2048 + 800.0 * 2048));
  CHECK(proj.flops == doctest::Approx(6.7109e9).epsilon(1e-4));
  CHECK(proj.bytes == doctest::Approx(1.4942e7).epsilon(1e-4));

  // Empty query still streams the weight.
  auto empty = matmul_op(0, 2048, 1024, 2, "w");
  CHECK(empty.flops == 0);
  CHECK(empty.bytes == 2.0 * 2048 * 1024);
}

TEST_CASE("fused attention operator") {
  auto a = attention_op(800, 800, 8, 1, 256, 2);
  CHECK(a.flops == 4.0 * 800 * 800 * 8 * 256);
  CHECK(a.flops == doctest::Approx(5.243e9).epsilon(1e-3));
  CHECK(a.bytes == 2.0 * (800.0 * 2048 * 2 + 800.0 * 256 * 2));
  CHECK(a.bytes == doctest::Approx(7.373e6).epsilon(1e-3));
  CHECK(attention_op(0, 800, 8, 1, 256, 2).flops == 0);
}

TEST_CASE("attention monotonicity") {
  double prev_bytes = -1, prev_flops = -1;
  for (std::int64_t kv = 0; kv <= 4096; kv += 128) {
    auto a = attention_op(16, kv, 8, 2, 64, 2);
    CHECK(a.bytes >= prev_bytes);
    CHECK(a.flops > prev_flops);
    prev_bytes = a.bytes;
    prev_flops = a.flops;
  }
}

TEST_CASE("graph totals are additive") {
  auto a = prefill_graph(presets::gemma_2b(), 100, 0);
  auto b = diffusion_graph(presets::act_m(), 800, 18432, 50, 3, 14);
  auto c = concat(a, b);
  CHECK(c.total_flops() == a.total_flops() + b.total_flops());
  CHECK(c.total_bytes() == a.total_bytes() + b.total_bytes());
  CHECK(c.size() == a.size() + b.size());
  CHECK(c.kv_cache_written_bytes() == a.kv_cache_written_bytes() + b.kv_cache_written_bytes());
}

TEST_CASE("phase subgraphs partition the graph") {
  auto g = inference_graph(presets::pi0());
  double flops = 0, bytes = 0;
  std::size_t n = 0;
  for (Phase p : kAllPhases) {
    auto sub = g.phase_subgraph(p);
    flops += sub.total_flops();
    bytes += sub.total_bytes();
    n += sub.size();
    for (const auto& op : sub.ops()) CHECK(op.phase == p);
  }
  CHECK(n == g.size());
  CHECK(flops == doctest::Approx(g.total_flops()));
  CHECK(bytes == doctest::Approx(g.total_bytes()));
}

TEST_CASE("vision encoder graph") {
  auto so = presets::siglip_so400m();
  CHECK(vit_encode_graph(so, 0, 256).empty());
  CHECK_THROWS_AS(vit_encode_graph(presets::gemma_2b(), 3, 256), ConfigError);

  // Linear layers see all images' tokens; weights are streamed once.
  auto one = vit_encode_graph(so, 1, 256);
  auto three = vit_encode_graph(so, 3, 256);
  const double linear_flops_one = one.total_flops() - attention_flops(one);
  const double linear_flops_three = three.total_flops() - attention_flops(three);
  CHECK(linear_flops_three == doctest::Approx(3 * linear_flops_one));
  CHECK(attention_flops(three) == doctest::Approx(3 * attention_flops(one)));
  CHECK(three.total_flops() == doctest::Approx(3 * one.total_flops()));
  CHECK(three.total_bytes() < 3 * one.total_bytes());
}

TEST_CASE("prefill flops identity") {
  // 2 * S * params misses exactly the attention score/value term.
  for (auto cfg : {presets::gemma_2b(), presets::llama2_7b(), presets::act_m()}) {
    for (std::int64_t prefix : {0, 512}) {
      const std::int64_t s = 800;
      auto g = prefill_graph(cfg, s, prefix);
      const double attn = 4.0 * s * (s + prefix) * static_cast<double>(cfg.q_width()) *
                          static_cast<double>(cfg.num_layers);
      CHECK(g.total_flops() ==
            doctest::Approx(2.0 * s * static_cast<double>(param_count(cfg)) + attn).epsilon(1e-12));
      CHECK(g.kv_cache_written_bytes() == s * kv_bytes_per_token(cfg));
    }
  }
}

TEST_CASE("Gemma prefill totals") {
  auto g = prefill_graph(presets::gemma_2b(), 800, 0);
  CHECK(g.total_flops() == doctest::Approx(3.27e12).epsilon(0.02));
}

TEST_CASE("decode is a one-token prefill") {
  auto cfg = toy();
  auto pre = prefill_graph(cfg, 1, 0, Phase::action);
  auto dec = decode_step_graph(cfg, 0);
  CHECK(pre.total_flops() == dec.total_flops());
  CHECK(pre.total_bytes() == dec.total_bytes());

  auto par = parallel_decode_graph(cfg, 1, 37);
  auto step = decode_step_graph(cfg, 37);
  CHECK(par.total_flops() == step.total_flops());
  CHECK(par.total_bytes() == step.total_bytes());

  // Decode step flops are 2 * params plus the attention term.
  auto gemma = decode_step_graph(presets::gemma_2b(), 800);
  const double attn = 4.0 * 801 * 2048 * 18;
  CHECK(gemma.total_flops() ==
        doctest::Approx(2.0 * static_cast<double>(param_count(presets::gemma_2b())) + attn));
}

TEST_CASE("autoregressive decode attends a growing cache") {
  auto cfg = toy();
  auto g = autoregressive_decode_graph(cfg, 3, 10);
  double expect = 0;
  for (int k = 0; k < 3; ++k) expect += decode_step_graph(cfg, 10 + k).total_flops();
  CHECK(g.total_flops() == expect);
  CHECK(autoregressive_decode_graph(cfg, 0, 10).empty());
}

TEST_CASE("parallel decode operator intensity") {
  auto gemma = presets::gemma_2b();
  CHECK(graph_oi(parallel_decode_graph(gemma, 140, 800)) == doctest::Approx(135.9).epsilon(0.10));
  CHECK(graph_oi(parallel_decode_graph(gemma, 700, 800)) == doctest::Approx(477.7).epsilon(0.10));
}

TEST_CASE("diffusion steps are identical") {
  auto act = presets::act_m();
  auto ten = diffusion_graph(act, 800, 18432, 50, 10, 14);
  auto fifty = diffusion_graph(act, 800, 18432, 50, 50, 14);
  auto one = diffusion_graph(act, 800, 18432, 50, 1, 14);
  CHECK(ten.size() == 10 * one.size());
  CHECK(fifty.total_flops() == 5 * ten.total_flops());
  CHECK(fifty.total_bytes() == 5 * ten.total_bytes());
  CHECK(diffusion_graph(act, 800, 18432, 50, 0, 14).empty());
}

TEST_CASE("diffusion step reads the prefix cache once") {
  auto act = presets::act_m();
  auto with = diffusion_graph(act, 800, 18432, 50, 1, 14);
  auto without = diffusion_graph(act, 800, 0, 50, 1, 14);
  CHECK(with.total_bytes() - without.total_bytes() == doctest::Approx(800.0 * 18432));
}

TEST_CASE("action graph dispatch") {
  auto spec = presets::pi0();
  CHECK(action_graph(spec, 800).total_flops() ==
        diffusion_graph(*spec.action_expert, 800, 18432, 50, 10, 14).total_flops());
  spec.action_expert.reset();
  spec.decoding_mode = DecodingMode::autoregressive;
  CHECK(action_graph(spec, 800).size() == 700 * decode_step_graph(spec.vlm, 800).size());
  spec.decoding_mode = DecodingMode::autoregressive_parallel;
  CHECK(action_graph(spec, 800).total_flops() ==
        parallel_decode_graph(spec.vlm, 700, 800).total_flops());
}

TEST_CASE("long-context timesteps") {
  auto spec = presets::pi0();
  auto t1 = long_context_step_graphs(spec, 1);
  auto base = inference_graph(spec);
  CHECK(t1.total_flops() == base.total_flops());
  CHECK(t1.total_bytes() == base.total_bytes());
  CHECK(long_context_cached_tokens(spec, 1000) == 768 * 999);
  CHECK(long_context_step_graphs(spec, 100).total_flops() > t1.total_flops());
  CHECK_THROWS_AS(long_context_step_graphs(spec, 0), ConfigError);
}

}  // TEST_SUITE
