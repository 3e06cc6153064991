#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vlaperf/workload.hpp"

namespace vlaperf {

enum class Phase { vision, vlm, action };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::vision, Phase::vlm, Phase::action};

std::string_view to_string(Phase phase);

/// One kernel invocation. FLOPs and HBM bytes are integral counts carried as
/// doubles; every value the builders produce is exactly representable.
struct Operator {
  std::string label;
  double flops = 0;
  double bytes = 0;
  Phase phase = Phase::vlm;
};

class OperatorGraph {
 public:
  void push(Operator op);
  void append(const OperatorGraph& other);
  /// Appends `other` `times` times; used for identical denoising steps.
  void append_repeated(const OperatorGraph& other, std::int64_t times);

  const std::vector<Operator>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  std::size_t size() const { return ops_.size(); }

  double total_flops() const { return flops_; }
  double total_bytes() const { return bytes_; }
  double kv_cache_written_bytes() const { return kv_written_; }
  void add_kv_cache_written(double bytes) { kv_written_ += bytes; }

  /// The operators tagged with `phase`, order preserved.
  OperatorGraph phase_subgraph(Phase phase) const;

 private:
  std::vector<Operator> ops_;
  double flops_ = 0;
  double bytes_ = 0;
  double kv_written_ = 0;
};

OperatorGraph concat(const OperatorGraph& a, const OperatorGraph& b);

// --- primitive operators -------------------------------------------------

/// [m x k] * [k x n]; the k x n operand is the weight.
Operator matmul_op(std::int64_t m, std::int64_t n, std::int64_t k, std::int64_t precision_bytes,
                   std::string label, Phase phase = Phase::vlm);

/// Fused attention: reads Q and K/V, writes O; the score matrix never
/// reaches HBM.
Operator attention_op(std::int64_t q_len, std::int64_t kv_len, std::int64_t n_q,
                      std::int64_t n_kv, std::int64_t head_dim, std::int64_t precision_bytes,
                      std::string label = "attn", Phase phase = Phase::vlm);

// --- workload graphs ------------------------------------------------------

/// Encodes `num_images` images. Linear layers run on all images' tokens as
/// one batch (weights streamed once); attention stays per image.
/// Throws ConfigError if `cfg` has no patch_input_dim.
OperatorGraph vit_encode_graph(const TransformerConfig& cfg, std::int64_t num_images,
                               std::int64_t tokens_per_image);

/// Processes `q_len` new tokens attending over `kv_prefix_len` cached tokens
/// plus themselves.
OperatorGraph prefill_graph(const TransformerConfig& cfg, std::int64_t q_len,
                            std::int64_t kv_prefix_len, Phase phase = Phase::vlm);

OperatorGraph decode_step_graph(const TransformerConfig& cfg, std::int64_t kv_prefix_len,
                                Phase phase = Phase::action);

OperatorGraph parallel_decode_graph(const TransformerConfig& cfg,
                                    std::int64_t num_action_tokens, std::int64_t kv_prefix_len,
                                    Phase phase = Phase::action);

/// `num_tokens` sequential decode steps; step k attends prefix + k tokens.
OperatorGraph autoregressive_decode_graph(const TransformerConfig& cfg, std::int64_t num_tokens,
                                          std::int64_t kv_prefix_len,
                                          Phase phase = Phase::action);

/// Flow-matching / diffusion action expert. Each step re-reads the expert's
/// weights and the VLM prefix KV (never recomputed) and recomputes the
/// chunk's own KV. All steps are identical.
OperatorGraph diffusion_graph(const TransformerConfig& action_cfg,
                              std::int64_t vlm_prefix_tokens,
                              std::int64_t vlm_kv_bytes_per_token, std::int64_t chunk_size,
                              std::int64_t steps, std::int64_t action_dof);

/// The action phase of `spec` given a VLM context of `kv_prefix_len` tokens.
OperatorGraph action_graph(const VlaModelSpec& spec, std::int64_t kv_prefix_len);

/// Vision + VLM prefill + action graph of one stateless inference.
OperatorGraph inference_graph(const VlaModelSpec& spec);

/// Timestep `t` (1-based) of a long-context VLA: the VLM keeps only the
/// vision tokens of each past step in its cache, and the newest prefix
/// attends over 768 * (t - 1) cached tokens for the default three cameras.
OperatorGraph long_context_step_graphs(const VlaModelSpec& spec, std::int64_t t);

/// Number of VLM tokens cached before timestep `t`.
std::int64_t long_context_cached_tokens(const VlaModelSpec& spec, std::int64_t t);

}  // namespace vlaperf
