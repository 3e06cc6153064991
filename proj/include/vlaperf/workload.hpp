#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vlaperf {

/// Thrown for configurations that violate a structural invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Architecture of one transformer component (vision encoder, VLM backbone
/// or action expert). Sequence length is not part of the architecture; it is
/// derived from the VLA spec at graph-build time.
struct TransformerConfig {
  std::string name;
  std::int64_t num_layers = 0;
  std::int64_t hidden_size = 0;
  std::int64_t intermediate_size = 0;
  // Number of FFN up-projections: 1 for a plain MLP, 2 for a gated MLP.
  std::int64_t num_ffi = 1;
  std::int64_t num_q_heads = 1;
  std::int64_t num_kv_heads = 1;
  std::int64_t head_dim = 0;
  std::int64_t precision_bytes = 2;
  // Elements per flattened image patch (channels x patch^2); vision only.
  std::optional<std::int64_t> patch_input_dim;

  std::int64_t q_width() const { return num_q_heads * head_dim; }
  std::int64_t kv_width() const { return num_kv_heads * head_dim; }
  bool is_vision() const { return patch_input_dim.has_value(); }

  /// Throws ConfigError describing the first violated invariant.
  /// A zero-layer config is accepted: it models an empty component.
  void validate() const;

  friend bool operator==(const TransformerConfig&, const TransformerConfig&) = default;
};

enum class DecodingMode { diffusion, autoregressive, autoregressive_parallel };

std::string_view to_string(DecodingMode mode);
DecodingMode parse_decoding_mode(std::string_view text);

struct VlaModelSpec {
  std::string name;
  TransformerConfig vision_encoder;
  TransformerConfig vlm;
  std::optional<TransformerConfig> action_expert;
  std::int64_t num_cameras = 3;
  std::int64_t tokens_per_image = 256;
  std::int64_t language_tokens = 32;
  std::int64_t action_dof = 14;
  std::int64_t chunk_size = 50;
  std::int64_t denoise_steps = 10;
  DecodingMode decoding_mode = DecodingMode::diffusion;

  std::int64_t vision_tokens() const { return num_cameras * tokens_per_image; }
  std::int64_t prefix_tokens() const { return vision_tokens() + language_tokens; }
  /// Tokens an autoregressive decoder emits per inference (one per action dimension).
  std::int64_t action_tokens() const { return chunk_size * action_dof; }

  void validate() const;

  friend bool operator==(const VlaModelSpec&, const VlaModelSpec&) = default;
};

// Closed-form model arithmetic. Embedding/vocabulary tables and norm/bias
// parameters are excluded.
std::int64_t param_count(const TransformerConfig& cfg);
std::int64_t weight_bytes(const TransformerConfig& cfg);
std::int64_t kv_bytes_per_token(const TransformerConfig& cfg);

/// Sum of weight bytes over every component present in the spec.
std::int64_t total_weight_bytes(const VlaModelSpec& spec);
std::int64_t total_param_count(const VlaModelSpec& spec);

namespace presets {

TransformerConfig siglip_so400m();
TransformerConfig siglip_giant();
TransformerConfig gemma_2b();
TransformerConfig llama2_7b();
TransformerConfig llama2_13b();
TransformerConfig llama2_70b();
TransformerConfig act_m();

/// The baseline pi0: SigLIP-So400m + Gemma-2B + Act-M with default workload.
VlaModelSpec pi0();

}  // namespace presets

/// Builds an action expert from a VLM by halving the hidden width and
/// quartering the FFN width while keeping the attention head layout. Depth
/// starts at the VLM's layer count and is re-chosen to hit `target_params`
/// when that first guess misses by more than `tolerance`.
/// Throws ConfigError when no depth lands within tolerance.
TransformerConfig derive_action_expert(const TransformerConfig& vlm, std::string name,
                                       double target_params, double tolerance = 0.10);

/// Named model components and composed VLA specs.
class ModelCatalog {
 public:
  /// The built-in catalog: pi0 components and the scaled family.
  static ModelCatalog builtin();

  void add_component(std::string id, TransformerConfig cfg);
  void add_model(std::string id, VlaModelSpec spec);

  const TransformerConfig& component(std::string_view id) const;
  const VlaModelSpec& model(std::string_view id) const;
  bool has_component(std::string_view id) const;
  bool has_model(std::string_view id) const;

  const std::map<std::string, TransformerConfig, std::less<>>& components() const {
    return components_;
  }
  const std::map<std::string, VlaModelSpec, std::less<>>& models() const { return models_; }

 private:
  std::map<std::string, TransformerConfig, std::less<>> components_;
  std::map<std::string, VlaModelSpec, std::less<>> models_;
};

/// pi0, pi0-L, pi0-XL and pi0-XXL in increasing size.
/// Throws ConfigError if a derived action expert misses its target by >10%.
std::vector<VlaModelSpec> scaled_family(const ModelCatalog& catalog);

}  // namespace vlaperf
