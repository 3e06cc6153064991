#include "vlaperf/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace vlaperf {

namespace {

void require(bool ok, const std::string& name, std::string_view what) {
  if (!ok) throw ConfigError(fmt::format("model '{}': {}", name, what));
}

}  // namespace

void TransformerConfig::validate() const {
  require(num_layers >= 0, name, "num_layers must be >= 0");
  require(hidden_size >= 1, name, "hidden_size must be >= 1");
  require(intermediate_size >= 1, name, "intermediate_size must be >= 1");
  require(num_ffi >= 1, name, "num_ffi must be >= 1");
  require(num_q_heads >= 1 && num_kv_heads >= 1, name, "head counts must be >= 1");
  require(head_dim >= 1, name, "head_dim must be >= 1");
  require(num_kv_heads <= num_q_heads, name, "num_kv_heads must not exceed num_q_heads");
  require(num_q_heads % num_kv_heads == 0, name,
          "num_q_heads must be divisible by num_kv_heads");
  require(precision_bytes == 1 || precision_bytes == 2 || precision_bytes == 4, name,
          "precision_bytes must be 1, 2 or 4");
  if (patch_input_dim) require(*patch_input_dim >= 1, name, "patch_input_dim must be >= 1");
}

std::string_view to_string(DecodingMode mode) {
  switch (mode) {
    case DecodingMode::diffusion:
      return "diffusion";
    case DecodingMode::autoregressive:
      return "autoregressive";
    case DecodingMode::autoregressive_parallel:
      return "autoregressive_parallel";
  }
  return "?";
}

DecodingMode parse_decoding_mode(std::string_view text) {
  if (text == "diffusion") return DecodingMode::diffusion;
  if (text == "autoregressive" || text == "ar") return DecodingMode::autoregressive;
  if (text == "autoregressive_parallel" || text == "autoregressive-parallel" ||
      text == "ar-parallel")
    return DecodingMode::autoregressive_parallel;
  throw ConfigError(fmt::format("unknown decoding mode '{}'", text));
}

void VlaModelSpec::validate() const {
  vision_encoder.validate();
  vlm.validate();
  require(vision_encoder.is_vision(), name, "vision encoder needs patch_input_dim");
  if (decoding_mode == DecodingMode::diffusion) {
    require(action_expert.has_value(), name, "diffusion decoding needs an action expert");
    action_expert->validate();
  } else {
    require(!action_expert.has_value(), name,
            "autoregressive decoding runs on the VLM; action expert must be absent");
  }
  require(num_cameras >= 0 && tokens_per_image >= 0 && language_tokens >= 0, name,
          "token counts must be >= 0");
  require(prefix_tokens() >= 1, name, "prefix must contain at least one token");
  require(action_dof >= 1, name, "action_dof must be >= 1");
  require(chunk_size >= 1, name, "chunk_size must be >= 1");
  require(denoise_steps >= 0, name, "denoise_steps must be >= 0");
}

std::int64_t param_count(const TransformerConfig& cfg) {
  const std::int64_t h = cfg.hidden_size;
  const std::int64_t per_layer = h * cfg.q_width()            // Q
                                 + 2 * h * cfg.kv_width()     // K, V
                                 + cfg.q_width() * h          // O
                                 + (cfg.num_ffi + 1) * h * cfg.intermediate_size;
  const std::int64_t patch = cfg.patch_input_dim.value_or(0) * h;
  return cfg.num_layers * per_layer + (cfg.num_layers > 0 ? patch : 0);
}

std::int64_t weight_bytes(const TransformerConfig& cfg) {
  return param_count(cfg) * cfg.precision_bytes;
}

std::int64_t kv_bytes_per_token(const TransformerConfig& cfg) {
  return 2 * cfg.num_layers * cfg.kv_width() * cfg.precision_bytes;
}

std::int64_t total_weight_bytes(const VlaModelSpec& spec) {
  std::int64_t total = weight_bytes(spec.vision_encoder) + weight_bytes(spec.vlm);
  if (spec.action_expert) total += weight_bytes(*spec.action_expert);
  return total;
}

std::int64_t total_param_count(const VlaModelSpec& spec) {
  std::int64_t total = param_count(spec.vision_encoder) + param_count(spec.vlm);
  if (spec.action_expert) total += param_count(*spec.action_expert);
  return total;
}

namespace presets {

// 224x224 RGB input cut into 14x14 patches.
constexpr std::int64_t kSiglipPatchDim = 3 * 14 * 14;

TransformerConfig siglip_so400m() {
  return {.name = "SigLIP-So400m",
          .num_layers = 27,
          .hidden_size = 1152,
          .intermediate_size = 4304,
          .num_ffi = 1,
          .num_q_heads = 16,
          .num_kv_heads = 16,
          .head_dim = 72,
          .precision_bytes = 2,
          .patch_input_dim = kSiglipPatchDim};
}

TransformerConfig siglip_giant() {
  return {.name = "SigLIP-Giant",
          .num_layers = 40,
          .hidden_size = 1536,
          .intermediate_size = 6144,
          .num_ffi = 1,
          .num_q_heads = 16,
          .num_kv_heads = 16,
          .head_dim = 96,
          .precision_bytes = 2,
          .patch_input_dim = kSiglipPatchDim};
}

TransformerConfig gemma_2b() {
  return {.name = "Gemma-2B",
          .num_layers = 18,
          .hidden_size = 2048,
          .intermediate_size = 16384,
          .num_ffi = 2,
          .num_q_heads = 8,
          .num_kv_heads = 1,
          .head_dim = 256,
          .precision_bytes = 2,
          .patch_input_dim = std::nullopt};
}

TransformerConfig llama2_7b() {
  return {.name = "Llama2-7B",
          .num_layers = 32,
          .hidden_size = 4096,
          .intermediate_size = 11008,
          .num_ffi = 2,
          .num_q_heads = 32,
          .num_kv_heads = 32,
          .head_dim = 128,
          .precision_bytes = 2,
          .patch_input_dim = std::nullopt};
}

TransformerConfig llama2_13b() {
  return {.name = "Llama2-13B",
          .num_layers = 40,
          .hidden_size = 5120,
          .intermediate_size = 13824,
          .num_ffi = 2,
          .num_q_heads = 40,
          .num_kv_heads = 40,
          .head_dim = 128,
          .precision_bytes = 2,
          .patch_input_dim = std::nullopt};
}

TransformerConfig llama2_70b() {
  return {.name = "Llama2-70B",
          .num_layers = 80,
          .hidden_size = 8192,
          .intermediate_size = 28672,
          .num_ffi = 2,
          .num_q_heads = 64,
          .num_kv_heads = 8,
          .head_dim = 128,
          .precision_bytes = 2,
          .patch_input_dim = std::nullopt};
}

TransformerConfig act_m() {
  return {.name = "Act-M",
          .num_layers = 18,
          .hidden_size = 1024,
          .intermediate_size = 4096,
          .num_ffi = 2,
          .num_q_heads = 8,
          .num_kv_heads = 1,
          .head_dim = 256,
          .precision_bytes = 2,
          .patch_input_dim = std::nullopt};
}

VlaModelSpec pi0() {
  VlaModelSpec spec;
  spec.name = "pi0";
  spec.vision_encoder = siglip_so400m();
  spec.vlm = gemma_2b();
  spec.action_expert = act_m();
  return spec;
}

}  // namespace presets

TransformerConfig derive_action_expert(const TransformerConfig& vlm, std::string name,
                                       double target_params, double tolerance) {
  TransformerConfig act = vlm;
  act.name = std::move(name);
  act.hidden_size = vlm.hidden_size / 2;
  act.intermediate_size = vlm.intermediate_size / 4;
  act.patch_input_dim.reset();

  auto miss = [&](const TransformerConfig& c) {
    return std::abs(static_cast<double>(param_count(c)) - target_params) / target_params;
  };
  // Keeping the VLM depth preserves the layer-wise pairing of joint attention.
  if (miss(act) > tolerance) {
    act.num_layers = 1;
    const double per_layer = static_cast<double>(param_count(act));
    act.num_layers = std::max<std::int64_t>(1, std::llround(target_params / per_layer));
  }
  if (miss(act) > tolerance) {
    throw ConfigError(fmt::format("derived action expert '{}' has {} params, more than {:.0f}% "
                                  "away from target {:.3g}",
                                  act.name, param_count(act), tolerance * 100, target_params));
  }
  return act;
}

namespace {

struct FamilyMember {
  const char* id;
  const char* display;
  const char* vision;
  const char* vlm;
  const char* action;
  double action_target;
};

// Published action expert sizes for the scaled family.
constexpr FamilyMember kFamily[] = {
    {"pi0-l", "pi0-L", "siglip-giant", "llama2-7b", "act-l", 1.5e9},
    {"pi0-xl", "pi0-XL", "siglip-giant", "llama2-13b", "act-xl", 2.9e9},
    {"pi0-xxl", "pi0-XXL", "siglip-giant", "llama2-70b", "act-xxl", 11.7e9},
};

}  // namespace

ModelCatalog ModelCatalog::builtin() {
  ModelCatalog cat;
  cat.add_component("siglip-so400m", presets::siglip_so400m());
  cat.add_component("siglip-giant", presets::siglip_giant());
  cat.add_component("gemma-2b", presets::gemma_2b());
  cat.add_component("llama2-7b", presets::llama2_7b());
  cat.add_component("llama2-13b", presets::llama2_13b());
  cat.add_component("llama2-70b", presets::llama2_70b());
  cat.add_component("act-m", presets::act_m());
  cat.add_model("pi0", presets::pi0());

  for (const auto& m : kFamily) {
    std::string display_act = m.action;
    display_act[0] = 'A';
    for (std::size_t i = 4; i < display_act.size(); ++i)
      display_act[i] = static_cast<char>(std::toupper(display_act[i]));
    cat.add_component(m.action, derive_action_expert(cat.component(m.vlm), display_act,
                                                     m.action_target));
    VlaModelSpec spec = presets::pi0();
    spec.name = m.display;
    spec.vision_encoder = cat.component(m.vision);
    spec.vlm = cat.component(m.vlm);
    spec.action_expert = cat.component(m.action);
    cat.add_model(m.id, std::move(spec));
  }
  return cat;
}

void ModelCatalog::add_component(std::string id, TransformerConfig cfg) {
  cfg.validate();
  components_.insert_or_assign(std::move(id), std::move(cfg));
}

void ModelCatalog::add_model(std::string id, VlaModelSpec spec) {
  spec.validate();
  models_.insert_or_assign(std::move(id), std::move(spec));
}

const TransformerConfig& ModelCatalog::component(std::string_view id) const {
  auto it = components_.find(id);
  if (it == components_.end()) throw ConfigError(fmt::format("unknown model component '{}'", id));
  return it->second;
}

const VlaModelSpec& ModelCatalog::model(std::string_view id) const {
  auto it = models_.find(id);
  if (it == models_.end()) throw ConfigError(fmt::format("unknown model '{}'", id));
  return it->second;
}

bool ModelCatalog::has_component(std::string_view id) const {
  return components_.find(id) != components_.end();
}

bool ModelCatalog::has_model(std::string_view id) const {
  return models_.find(id) != models_.end();
}

std::vector<VlaModelSpec> scaled_family(const ModelCatalog& catalog) {
  std::vector<VlaModelSpec> family{catalog.model("pi0")};
  for (const auto& m : kFamily) {
    const VlaModelSpec& spec = catalog.model(m.id);
    const double params = static_cast<double>(param_count(*spec.action_expert));
    if (std::abs(params - m.action_target) / m.action_target > 0.10) {
      throw ConfigError(fmt::format("{}: action expert has {} params, target {:.3g}", m.display,
                                    static_cast<std::int64_t>(params), m.action_target));
    }
    family.push_back(spec);
  }
  return family;
}

}  // namespace vlaperf
