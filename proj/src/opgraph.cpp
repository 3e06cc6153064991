#include "vlaperf/opgraph.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace vlaperf {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::vision:
      return "vision";
    case Phase::vlm:
      return "vlm";
    case Phase::action:
      return "action";
  }
  return "?";
}

void OperatorGraph::push(Operator op) {
  flops_ += op.flops;
  bytes_ += op.bytes;
  ops_.push_back(std::move(op));
}

void OperatorGraph::append(const OperatorGraph& other) {
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  flops_ += other.flops_;
  bytes_ += other.bytes_;
  kv_written_ += other.kv_written_;
}

void OperatorGraph::append_repeated(const OperatorGraph& other, std::int64_t times) {
  ops_.reserve(ops_.size() + other.ops_.size() * static_cast<std::size_t>(std::max<std::int64_t>(times, 0)));
  for (std::int64_t i = 0; i < times; ++i) append(other);
}

OperatorGraph OperatorGraph::phase_subgraph(Phase phase) const {
  OperatorGraph sub;
  for (const auto& op : ops_)
    if (op.phase == phase) sub.push(op);
  return sub;
}

OperatorGraph concat(const OperatorGraph& a, const OperatorGraph& b) {
  OperatorGraph out = a;
  out.append(b);
  return out;
}

Operator matmul_op(std::int64_t m, std::int64_t n, std::int64_t k, std::int64_t precision_bytes,
                   std::string label, Phase phase) {
  const double md = static_cast<double>(m), nd = static_cast<double>(n),
               kd = static_cast<double>(k);
  return {std::move(label), 2.0 * md * nd * kd,
          static_cast<double>(precision_bytes) * (md * kd + kd * nd + md * nd), phase};
}

Operator attention_op(std::int64_t q_len, std::int64_t kv_len, std::int64_t n_q,
                      std::int64_t n_kv, std::int64_t head_dim, std::int64_t precision_bytes,
                      std::string label, Phase phase) {
  const double q = static_cast<double>(q_len), kv = static_cast<double>(kv_len),
               d = static_cast<double>(head_dim);
  const double flops = 4.0 * q * kv * static_cast<double>(n_q) * d;
  const double bytes = static_cast<double>(precision_bytes) *
                       (q * static_cast<double>(n_q) * d * 2.0 +
                        kv * static_cast<double>(n_kv) * d * 2.0);
  return {std::move(label), flops, bytes, phase};
}

namespace {

// Projections and FFN of one layer around an attention operator supplied by
// the caller.
template <typename AttentionFn>
void emit_layer(OperatorGraph& g, const TransformerConfig& cfg, std::int64_t layer,
                std::int64_t tokens, Phase phase, AttentionFn&& attention) {
  const std::int64_t h = cfg.hidden_size, p = cfg.precision_bytes;
  const std::string tag = fmt::format("L{}.", layer);
  g.push(matmul_op(tokens, cfg.q_width(), h, p, tag + "q_proj", phase));
  g.push(matmul_op(tokens, cfg.kv_width(), h, p, tag + "k_proj", phase));
  g.push(matmul_op(tokens, cfg.kv_width(), h, p, tag + "v_proj", phase));
  attention(g, tag);
  g.push(matmul_op(tokens, h, cfg.q_width(), p, tag + "o_proj", phase));
  // A gated MLP runs its gate and up projections as separate matmuls.
  for (std::int64_t f = 0; f < cfg.num_ffi; ++f) {
    g.push(matmul_op(tokens, cfg.intermediate_size, h, p,
                     tag + (cfg.num_ffi == 1 ? "ffn_up" : fmt::format("ffn_up{}", f)),
                     phase));
  }
  g.push(matmul_op(tokens, h, cfg.intermediate_size, p, tag + "ffn_down", phase));
}

}  // namespace

OperatorGraph vit_encode_graph(const TransformerConfig& cfg, std::int64_t num_images,
                               std::int64_t tokens_per_image) {
  if (!cfg.patch_input_dim) {
    throw ConfigError(fmt::format("'{}' is not a vision encoder (no patch_input_dim)", cfg.name));
  }
  OperatorGraph g;
  if (num_images <= 0 || tokens_per_image <= 0) return g;
  const std::int64_t tokens = num_images * tokens_per_image;
  const std::int64_t p = cfg.precision_bytes;
  g.push(matmul_op(tokens, cfg.hidden_size, *cfg.patch_input_dim, p, "patch_embed",
                   Phase::vision));
  for (std::int64_t l = 0; l < cfg.num_layers; ++l) {
    emit_layer(g, cfg, l, tokens, Phase::vision, [&](OperatorGraph& out, const std::string& tag) {
      for (std::int64_t img = 0; img < num_images; ++img) {
        out.push(attention_op(tokens_per_image, tokens_per_image, cfg.num_q_heads,
                              cfg.num_kv_heads, cfg.head_dim, p,
                              fmt::format("{}attn.img{}", tag, img), Phase::vision));
      }
    });
  }
  return g;
}

OperatorGraph prefill_graph(const TransformerConfig& cfg, std::int64_t q_len,
                            std::int64_t kv_prefix_len, Phase phase) {
  OperatorGraph g;
  const std::int64_t p = cfg.precision_bytes;
  for (std::int64_t l = 0; l < cfg.num_layers; ++l) {
    emit_layer(g, cfg, l, q_len, phase, [&](OperatorGraph& out, const std::string& tag) {
      out.push(attention_op(q_len, kv_prefix_len + q_len, cfg.num_q_heads, cfg.num_kv_heads,
                            cfg.head_dim, p, tag + "attn", phase));
    });
  }
  g.add_kv_cache_written(static_cast<double>(q_len) *
                         static_cast<double>(kv_bytes_per_token(cfg)));
  return g;
}

OperatorGraph decode_step_graph(const TransformerConfig& cfg, std::int64_t kv_prefix_len,
                                Phase phase) {
  return prefill_graph(cfg, 1, kv_prefix_len, phase);
}

OperatorGraph parallel_decode_graph(const TransformerConfig& cfg,
                                    std::int64_t num_action_tokens, std::int64_t kv_prefix_len,
                                    Phase phase) {
  return prefill_graph(cfg, num_action_tokens, kv_prefix_len, phase);
}

OperatorGraph autoregressive_decode_graph(const TransformerConfig& cfg, std::int64_t num_tokens,
                                          std::int64_t kv_prefix_len, Phase phase) {
  OperatorGraph g;
  for (std::int64_t k = 0; k < num_tokens; ++k)
    g.append(decode_step_graph(cfg, kv_prefix_len + k, phase));
  return g;
}

OperatorGraph diffusion_graph(const TransformerConfig& action_cfg,
                              std::int64_t vlm_prefix_tokens,
                              std::int64_t vlm_kv_bytes_per_token, std::int64_t chunk_size,
                              std::int64_t steps, std::int64_t action_dof) {
  OperatorGraph g;
  if (steps <= 0) return g;
  const auto& cfg = action_cfg;
  const std::int64_t p = cfg.precision_bytes, h = cfg.hidden_size;
  const Phase phase = Phase::action;

  // Every expert layer reads its share of the VLM prefix cache.
  const double prefix_kv_bytes =
      static_cast<double>(vlm_prefix_tokens) * static_cast<double>(vlm_kv_bytes_per_token);
  const double prefix_kv_per_layer =
      cfg.num_layers > 0 ? prefix_kv_bytes / static_cast<double>(cfg.num_layers) : 0.0;

  OperatorGraph step;
  step.push(matmul_op(chunk_size, h, action_dof, p, "action_in_proj", phase));
  for (std::int64_t l = 0; l < cfg.num_layers; ++l) {
    emit_layer(step, cfg, l, chunk_size, phase, [&](OperatorGraph& out, const std::string& tag) {
      // Chunk attends [VLM prefix ; chunk]. The chunk's own K/V are counted at
      // the expert's width; the prefix at the VLM's cached width.
      Operator joint = attention_op(chunk_size, chunk_size, cfg.num_q_heads, cfg.num_kv_heads,
                                    cfg.head_dim, p, tag + "joint_attn", phase);
      joint.flops = 4.0 * static_cast<double>(chunk_size) *
                    static_cast<double>(vlm_prefix_tokens + chunk_size) *
                    static_cast<double>(cfg.q_width());
      joint.bytes += prefix_kv_per_layer;
      out.push(std::move(joint));
    });
  }
  step.push(matmul_op(chunk_size, action_dof, h, p, "action_out_proj", phase));

  g.append_repeated(step, steps);
  return g;
}

OperatorGraph action_graph(const VlaModelSpec& spec, std::int64_t kv_prefix_len) {
  switch (spec.decoding_mode) {
    case DecodingMode::diffusion:
      return diffusion_graph(*spec.action_expert, kv_prefix_len, kv_bytes_per_token(spec.vlm),
                             spec.chunk_size, spec.denoise_steps, spec.action_dof);
    case DecodingMode::autoregressive:
      return autoregressive_decode_graph(spec.vlm, spec.action_tokens(), kv_prefix_len);
    case DecodingMode::autoregressive_parallel:
      return parallel_decode_graph(spec.vlm, spec.action_tokens(), kv_prefix_len);
  }
  return {};
}

OperatorGraph inference_graph(const VlaModelSpec& spec) {
  OperatorGraph g = vit_encode_graph(spec.vision_encoder, spec.num_cameras,
                                     spec.tokens_per_image);
  g.append(prefill_graph(spec.vlm, spec.prefix_tokens(), 0));
  g.append(action_graph(spec, spec.prefix_tokens()));
  return g;
}

std::int64_t long_context_cached_tokens(const VlaModelSpec& spec, std::int64_t t) {
  return spec.vision_tokens() * (t - 1);
}

OperatorGraph long_context_step_graphs(const VlaModelSpec& spec, std::int64_t t) {
  if (t < 1) throw ConfigError("long-context timestep must be >= 1");
  const std::int64_t cached = long_context_cached_tokens(spec, t);
  OperatorGraph g = vit_encode_graph(spec.vision_encoder, spec.num_cameras,
                                     spec.tokens_per_image);
  g.append(prefill_graph(spec.vlm, spec.prefix_tokens(), cached));
  g.append(action_graph(spec, cached + spec.prefix_tokens()));
  return g;
}

}  // namespace vlaperf
