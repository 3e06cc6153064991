#include "vlaperf/netmodel.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace vlaperf {

void NetworkConfig::validate() const {
  if (!(upload_bw > 0) || !(download_bw > 0))
    throw ConfigError(fmt::format("network '{}': bandwidths must be > 0", name));
  if (!(base_latency >= 0))
    throw ConfigError(fmt::format("network '{}': base latency must be >= 0", name));
  if (!(efficiency > 0) || efficiency > 1)
    throw ConfigError(fmt::format("network '{}': efficiency must be in (0, 1]", name));
}

namespace {

NetworkConfig make_net(std::string name, double up_mbps, double down_mbps, double latency_ms) {
  return {std::move(name), up_mbps * 1e6, down_mbps * 1e6, latency_ms * 1e-3, 1.0};
}

}  // namespace

std::map<std::string, NetworkConfig, std::less<>> network_presets() {
  return {
      {"eth-1g", make_net("Ethernet 1G", 1000, 1000, 0.10)},
      {"eth-10g", make_net("Ethernet 10G", 10000, 10000, 0.05)},
      {"wifi-6", make_net("WiFi 6", 560, 800, 3.50)},
      {"wifi-7", make_net("WiFi 7", 2000, 3000, 2.50)},
      {"4g", make_net("4G", 19, 75, 25.00)},
      {"5g", make_net("5G", 80, 500, 10.00)},
      {"slow-cloud", make_net("Slow Cloud", 1000, 1000, 100.00)},
      {"fast-cloud", make_net("Fast Cloud", 10000, 10000, 10.00)},
  };
}

NetworkPath::NetworkPath(std::vector<NetworkConfig> hops) : hops_(std::move(hops)) {
  if (hops_.empty() || hops_.size() > 2)
    throw ConfigError(fmt::format("network path must have 1 or 2 hops, got {}", hops_.size()));
  for (const auto& hop : hops_) hop.validate();
}

namespace {

double directional_bw(const NetworkConfig& net, Direction dir) {
  return (dir == Direction::upload ? net.upload_bw : net.download_bw) * net.efficiency;
}

}  // namespace

double transfer_time(const Payload& payload, const NetworkConfig& net) {
  return net.base_latency +
         static_cast<double>(payload.bytes) * 8.0 / directional_bw(net, payload.direction);
}

double path_time(const Payload& payload, const NetworkPath& path) {
  double total = 0;
  for (const auto& hop : path.hops()) total += transfer_time(payload, hop);
  return total;
}

double path_rate(const Payload& payload, const NetworkPath& path) {
  if (payload.bytes <= 0) return std::numeric_limits<double>::infinity();
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& hop : path.hops()) {
    rate = std::min(rate, directional_bw(hop, payload.direction) /
                              (8.0 * static_cast<double>(payload.bytes)));
  }
  return rate;
}

Payload observation_payload(const VlaModelSpec& spec, ObservationEncoding mode,
                            std::optional<std::int64_t> compressed_override) {
  if (mode == ObservationEncoding::raw) {
    return {spec.num_cameras * kImageSide * kImageSide * kImageChannels, Direction::upload};
  }
  return {compressed_override.value_or(spec.num_cameras * kCompressedBytesPerCamera),
          Direction::upload};
}

Payload action_payload(const VlaModelSpec& spec) {
  return {spec.chunk_size * spec.action_dof * kActionElementBytes, Direction::download};
}

Payload kv_payload(std::int64_t tokens, const TransformerConfig& cfg) {
  return {tokens * kv_bytes_per_token(cfg), Direction::download};
}

}  // namespace vlaperf
