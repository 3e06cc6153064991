#include "vlaperf/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace vlaperf {

// Ordered so sweep axes keep the order they are written in.
using json = nlohmann::ordered_json;

namespace {

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, std::string_view id,
                                        std::string_view what) {
  auto it = map.find(id);
  if (it == map.end()) {
    std::string known;
    for (const auto& [k, v] : map) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError(fmt::format("unknown {} '{}' (known: {})", what, id, known));
  }
  return it->second;
}

}  // namespace

Registry Registry::builtin() {
  return {ModelCatalog::builtin(), hardware_presets(), network_presets()};
}

const VlaModelSpec& Registry::model(std::string_view id) const {
  return lookup(catalog.models(), id, "model");
}
const AcceleratorConfig& Registry::accelerator(std::string_view id) const {
  return lookup(hardware, id, "hardware");
}
const NetworkConfig& Registry::network(std::string_view id) const {
  return lookup(networks, id, "network");
}

void RunSettings::merge(const RunSettings& over) {
  auto take = [](auto& mine, const auto& theirs) {
    if (theirs) mine = theirs;
  };
  take(model, over.model);
  take(hw, over.hw);
  take(placement, over.placement);
  take(net, over.net);
  take(cloud_net, over.cloud_net);
  take(device_hw, over.device_hw);
  take(decoding, over.decoding);
  take(format, over.format);
  take(out, over.out);
  take(chunk, over.chunk);
  take(steps, over.steps);
  take(context_steps, over.context_steps);
  take(cameras, over.cameras);
  take(dof, over.dof);
  take(language_tokens, over.language_tokens);
  take(observation_bytes, over.observation_bytes);
  take(precision_bytes, over.precision_bytes);
  take(s2_cap, over.s2_cap);
  take(async, over.async);
  for (const auto& axis : over.sweep) {
    auto it = std::find_if(sweep.begin(), sweep.end(),
                           [&](const auto& a) { return a.first == axis.first; });
    if (it == sweep.end())
      sweep.push_back(axis);
    else
      it->second = axis.second;
  }
}

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  const std::set<std::string_view> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (key == "seq_len")
      throw ConfigError(fmt::format(
          "{}: seq_len is derived from cameras, tokens per image and language tokens; remove it",
          where));
    if (!allowed.contains(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}: '{}' has the wrong type", where, key));
  }
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& out, std::string_view where) {
  if (!obj.contains(key)) return;
  T v{};
  read(obj, key, v, where);
  out = v;
}

TransformerConfig parse_component(const std::string& id, const json& j, const Registry& reg) {
  const std::string where = fmt::format("components.{}", id);
  check_keys(j, where,
             {"base", "name", "num_layers", "hidden_size", "intermediate_size", "num_ffi",
              "num_q_heads", "num_kv_heads", "head_dim", "precision_bytes", "patch_input_dim"});
  TransformerConfig cfg;
  cfg.name = id;
  if (j.contains("base")) cfg = reg.catalog.component(j.at("base").get<std::string>());
  read(j, "name", cfg.name, where);
  read(j, "num_layers", cfg.num_layers, where);
  read(j, "hidden_size", cfg.hidden_size, where);
  read(j, "intermediate_size", cfg.intermediate_size, where);
  read(j, "num_ffi", cfg.num_ffi, where);
  read(j, "num_q_heads", cfg.num_q_heads, where);
  read(j, "num_kv_heads", cfg.num_kv_heads, where);
  read(j, "head_dim", cfg.head_dim, where);
  read(j, "precision_bytes", cfg.precision_bytes, where);
  read(j, "patch_input_dim", cfg.patch_input_dim, where);
  if (cfg.head_dim == 0 && cfg.num_q_heads > 0) cfg.head_dim = cfg.hidden_size / cfg.num_q_heads;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  return cfg;
}

VlaModelSpec parse_model(const std::string& id, const json& j, const Registry& reg) {
  const std::string where = fmt::format("models.{}", id);
  check_keys(j, where,
             {"base", "name", "vision_encoder", "vlm", "action_expert", "num_cameras",
              "tokens_per_image", "language_tokens", "action_dof", "chunk_size", "denoise_steps",
              "decoding_mode"});
  VlaModelSpec spec;
  spec.name = id;
  if (j.contains("base")) spec = reg.model(j.at("base").get<std::string>());
  read(j, "name", spec.name, where);
  auto component = [&](const char* key) {
    return reg.catalog.component(j.at(key).get<std::string>());
  };
  if (j.contains("vision_encoder")) spec.vision_encoder = component("vision_encoder");
  if (j.contains("vlm")) spec.vlm = component("vlm");
  if (j.contains("action_expert")) {
    if (j.at("action_expert").is_null())
      spec.action_expert.reset();
    else
      spec.action_expert = component("action_expert");
  }
  read(j, "num_cameras", spec.num_cameras, where);
  read(j, "tokens_per_image", spec.tokens_per_image, where);
  read(j, "language_tokens", spec.language_tokens, where);
  read(j, "action_dof", spec.action_dof, where);
  read(j, "chunk_size", spec.chunk_size, where);
  read(j, "denoise_steps", spec.denoise_steps, where);
  if (j.contains("decoding_mode"))
    spec.decoding_mode = parse_decoding_mode(j.at("decoding_mode").get<std::string>());
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  return spec;
}

AcceleratorConfig parse_accelerator(const std::string& id, const json& j, const Registry& reg) {
  const std::string where = fmt::format("accelerators.{}", id);
  check_keys(j, where,
             {"base", "name", "BF16_TFLOPS", "FP32_TFLOPS", "INT8_TOPS", "Memory_GB",
              "HBM_BW_GBs"});
  AcceleratorConfig hw;
  hw.name = id;
  if (j.contains("base")) hw = reg.accelerator(j.at("base").get<std::string>());
  read(j, "name", hw.name, where);
  auto set_peak = [&](const char* key, std::int64_t p) {
    std::optional<double> v;
    read(j, key, v, where);
    if (v) hw.peak_flops[p] = *v * 1e12;
  };
  set_peak("FP32_TFLOPS", 4);
  set_peak("BF16_TFLOPS", 2);
  set_peak("INT8_TOPS", 1);
  std::optional<double> mem, bw;
  read(j, "Memory_GB", mem, where);
  read(j, "HBM_BW_GBs", bw, where);
  if (mem) hw.mem_capacity = *mem * kGiB;
  if (bw) hw.mem_bandwidth = *bw * 1e9;
  hw.validate();
  return hw;
}

NetworkConfig parse_network(const std::string& id, const json& j, const Registry& reg) {
  const std::string where = fmt::format("networks.{}", id);
  check_keys(j, where,
             {"base", "name", "bandwidth_mbps", "upload_mbps", "download_mbps",
              "base_latency_ms", "efficiency"});
  NetworkConfig net;
  net.name = id;
  if (j.contains("base")) net = reg.network(j.at("base").get<std::string>());
  read(j, "name", net.name, where);
  std::optional<double> both, up, down, latency;
  read(j, "bandwidth_mbps", both, where);
  read(j, "upload_mbps", up, where);
  read(j, "download_mbps", down, where);
  read(j, "base_latency_ms", latency, where);
  if (both) net.upload_bw = net.download_bw = *both * 1e6;
  if (up) net.upload_bw = *up * 1e6;
  if (down) net.download_bw = *down * 1e6;
  if (latency) net.base_latency = *latency * 1e-3;
  read(j, "efficiency", net.efficiency, where);
  net.validate();
  return net;
}

std::string axis_value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number()) return fmt::format("{}", v.get<double>());
  throw ConfigError("run.sweep: axis values must be strings or numbers");
}

RunSettings parse_run(const json& j) {
  const std::string where = "run";
  check_keys(j, where,
             {"model", "hw", "placement", "net", "cloud_net", "device_hw", "decoding", "format",
              "out", "chunk", "steps", "context_steps", "cameras", "dof", "language_tokens",
              "observation_bytes", "precision_bytes", "s2_cap", "async", "sweep"});
  RunSettings run;
  read(j, "model", run.model, where);
  read(j, "hw", run.hw, where);
  read(j, "placement", run.placement, where);
  read(j, "net", run.net, where);
  read(j, "cloud_net", run.cloud_net, where);
  read(j, "device_hw", run.device_hw, where);
  read(j, "decoding", run.decoding, where);
  read(j, "format", run.format, where);
  read(j, "out", run.out, where);
  read(j, "chunk", run.chunk, where);
  read(j, "steps", run.steps, where);
  read(j, "context_steps", run.context_steps, where);
  read(j, "cameras", run.cameras, where);
  read(j, "dof", run.dof, where);
  read(j, "language_tokens", run.language_tokens, where);
  read(j, "observation_bytes", run.observation_bytes, where);
  read(j, "precision_bytes", run.precision_bytes, where);
  read(j, "s2_cap", run.s2_cap, where);
  read(j, "async", run.async, where);
  if (j.contains("sweep")) {
    const json& axes = j.at("sweep");
    if (!axes.is_object()) throw ConfigError("run.sweep: expected an object of axis -> values");
    for (const auto& [axis, values] : axes.items()) {
      std::vector<std::string> texts;
      if (values.is_array()) {
        for (const auto& v : values) texts.push_back(axis_value_text(v));
      } else {
        texts.push_back(axis_value_text(values));
      }
      run.sweep.emplace_back(axis, std::move(texts));
    }
  }
  return run;
}

}  // namespace

RunSettings load_config_text(std::string_view text, Registry& registry) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  check_keys(doc, "config", {"components", "models", "accelerators", "networks", "run"});

  // Sections are applied in dependency order so models can name new components.
  auto each = [&](const char* section, auto&& fn) {
    if (!doc.contains(section)) return;
    const json& s = doc.at(section);
    if (!s.is_object()) throw ConfigError(fmt::format("{}: expected an object", section));
    for (const auto& [id, body] : s.items()) fn(id, body);
  };
  try {
    each("components", [&](const std::string& id, const json& body) {
      registry.catalog.add_component(id, parse_component(id, body, registry));
    });
    each("models", [&](const std::string& id, const json& body) {
      registry.catalog.add_model(id, parse_model(id, body, registry));
    });
    each("accelerators", [&](const std::string& id, const json& body) {
      registry.hardware.insert_or_assign(id, parse_accelerator(id, body, registry));
    });
    each("networks", [&](const std::string& id, const json& body) {
      registry.networks.insert_or_assign(id, parse_network(id, body, registry));
    });
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  return doc.contains("run") ? parse_run(doc.at("run")) : RunSettings{};
}

RunSettings load_config_file(const std::filesystem::path& path, Registry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return load_config_text(buf.str(), registry);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::filesystem::path resolve_config_path(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* env = std::getenv(kPresetPathEnv)) {
    std::stringstream dirs(env);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      for (const fs::path& candidate : {fs::path(dir) / name, fs::path(dir) / (name + ".json")})
        if (fs::exists(candidate)) return candidate;
    }
  }
  throw ConfigError(fmt::format("config '{}' not found (searched {})", name, kPresetPathEnv));
}

VlaModelSpec resolve_model(const Registry& registry, const RunSettings& run) {
  VlaModelSpec spec = registry.model(run.model.value_or("pi0"));
  if (run.chunk) spec.chunk_size = *run.chunk;
  if (run.steps) spec.denoise_steps = *run.steps;
  if (run.cameras) spec.num_cameras = *run.cameras;
  if (run.dof) spec.action_dof = *run.dof;
  if (run.language_tokens) spec.language_tokens = *run.language_tokens;
  if (run.decoding) {
    spec.decoding_mode = parse_decoding_mode(*run.decoding);
    if (spec.decoding_mode != DecodingMode::diffusion) spec.action_expert.reset();
  }
  if (run.precision_bytes) {
    spec.vision_encoder.precision_bytes = *run.precision_bytes;
    spec.vlm.precision_bytes = *run.precision_bytes;
    if (spec.action_expert) spec.action_expert->precision_bytes = *run.precision_bytes;
  }
  spec.validate();
  return spec;
}

Placement resolve_placement(const Registry& registry, const RunSettings& run) {
  const std::string kind = run.placement.value_or("on-device");
  const AcceleratorConfig& hw = registry.accelerator(run.hw.value_or("b100"));
  if (kind == "on-device" || kind == "device") return OnDevice{hw};
  if (kind == "edge" || kind == "edge-server")
    return EdgeServer{hw, registry.network(run.net.value_or("eth-10g"))};
  if (kind == "cloud" || kind == "cloud-server")
    return CloudServer{hw, registry.network(run.net.value_or("eth-10g")),
                       registry.network(run.cloud_net.value_or("fast-cloud"))};
  if (kind == "collaborative")
    return Collaborative{registry.accelerator(run.device_hw.value_or("thor")), hw,
                         registry.network(run.net.value_or("eth-10g"))};
  throw ConfigError(fmt::format(
      "unknown placement '{}' (expected on-device, edge, cloud or collaborative)", kind));
}

ScenarioOptions resolve_options(const RunSettings& run) {
  ScenarioOptions opts;
  opts.observation_bytes = run.observation_bytes;
  if (run.precision_bytes) opts.precision_bytes = *run.precision_bytes;
  return opts;
}

}  // namespace vlaperf
