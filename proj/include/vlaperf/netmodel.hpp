#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlaperf/workload.hpp"

namespace vlaperf {

struct NetworkConfig {
  std::string name;
  double upload_bw = 0;    // bits/s
  double download_bw = 0;  // bits/s
  double base_latency = 0; // seconds, one way
  double efficiency = 1.0;

  void validate() const;
};

/// Ethernet 1G/10G, WiFi 6/7, 4G, 5G and the slow/fast cloud hops.
std::map<std::string, NetworkConfig, std::less<>> network_presets();

enum class Direction { upload, download };

struct Payload {
  std::int64_t bytes = 0;
  Direction direction = Direction::upload;
};

/// One hop for an edge server; [access, cloud] for a cloud server.
class NetworkPath {
 public:
  explicit NetworkPath(std::vector<NetworkConfig> hops);
  const std::vector<NetworkConfig>& hops() const { return hops_; }

 private:
  std::vector<NetworkConfig> hops_;
};

double transfer_time(const Payload& payload, const NetworkConfig& net);
double path_time(const Payload& payload, const NetworkPath& path);

/// Sustained transfers per second of `payload` through the slowest hop.
double path_rate(const Payload& payload, const NetworkPath& path);

enum class ObservationEncoding { compressed, raw };

// Compressed 224x224 RGB frame; three cameras upload 46,500 B per inference.
inline constexpr std::int64_t kCompressedBytesPerCamera = 15'500;
inline constexpr std::int64_t kImageSide = 224;
inline constexpr std::int64_t kImageChannels = 3;
// Actions travel as FP32.
inline constexpr std::int64_t kActionElementBytes = 4;

/// Camera frames uploaded per inference. `compressed_override`, when set,
/// replaces the per-camera compressed size times the camera count.
Payload observation_payload(const VlaModelSpec& spec, ObservationEncoding mode,
                            std::optional<std::int64_t> compressed_override = std::nullopt);
Payload action_payload(const VlaModelSpec& spec);
Payload kv_payload(std::int64_t tokens, const TransformerConfig& cfg);

}  // namespace vlaperf
