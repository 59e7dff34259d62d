#pragma once

#include "lipc/network.hpp"

#include <filesystem>
#include <string>

namespace lipc {

// Weight file layout:
//   { "input_dim": n0, "layers": [ { "weights": [[row-major]], "bias": [...] }, ... ] }
// The scalar state y is the last input coordinate. Doubles are written in shortest round-trip form.
std::string network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const std::string& text);

void save_network(const ReluNetwork& net, const std::filesystem::path& path);
ReluNetwork load_network(const std::filesystem::path& path);

}  // namespace lipc
