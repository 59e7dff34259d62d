#include "lipc/network_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace lipc {

using nlohmann::json;

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  const std::size_t upto = std::min(byte, text.size());
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
  return "line " + std::to_string(line);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

}  // namespace

std::string network_to_json(const ReluNetwork& net) {
  json doc;
  doc["input_dim"] = net.input_dim();
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
      rows.push_back(std::move(row));
    }
    json bias = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) bias.push_back(layer.bias(r));
    layers.push_back(json{{"weights", std::move(rows)}, {"bias", std::move(bias)}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

ReluNetwork network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("network file: " + line_context(text, e.byte) + ": " + e.what());
  }
  const json& input_dim_v = require(doc, "input_dim", "network file");
  if (!input_dim_v.is_number_integer()) throw ParseError("network file: \"input_dim\" must be an integer");
  const long input_dim = input_dim_v.get<long>();
  if (input_dim < 1) throw ParseError("network file: \"input_dim\" must be positive");
  const json& layers_v = require(doc, "layers", "network file");
  if (!layers_v.is_array() || layers_v.empty()) throw ParseError("network file: \"layers\" must be a nonempty array");

  std::vector<DenseLayer> layers;
  long expected_cols = input_dim;
  for (std::size_t l = 0; l < layers_v.size(); ++l) {
    const std::string where = "layers[" + std::to_string(l) + "]";
    const json& w = require(layers_v[l], "weights", where);
    const json& b = require(layers_v[l], "bias", where);
    if (!w.is_array() || w.empty()) throw ParseError(where + ".weights: expected a nonempty array of rows");
    if (!b.is_array()) throw ParseError(where + ".bias: expected an array");
    const long rows = static_cast<long>(w.size());
    if (static_cast<long>(b.size()) != rows)
      throw ParseError(where + ": bias length " + std::to_string(b.size()) + " does not match " +
                       std::to_string(rows) + " weight rows");
    DenseLayer layer{Matrix(rows, expected_cols), Vector(rows)};
    for (long r = 0; r < rows; ++r) {
      const std::string row_where = where + ".weights[" + std::to_string(r) + "]";
      if (!w[r].is_array()) throw ParseError(row_where + ": expected an array");
      if (static_cast<long>(w[r].size()) != expected_cols)
        throw ParseError(row_where + ": has " + std::to_string(w[r].size()) + " columns, expected " +
                         std::to_string(expected_cols));
      for (long c = 0; c < expected_cols; ++c)
        layer.weights(r, c) = as_number(w[r][c], row_where + "[" + std::to_string(c) + "]");
      layer.bias(r) = as_number(b[r], where + ".bias[" + std::to_string(r) + "]");
    }
    expected_cols = rows;
    layers.push_back(std::move(layer));
  }
  if (layers.back().weights.rows() != 1)
    throw ParseError("layers[" + std::to_string(layers.size() - 1) + "]: final layer must have output dimension 1");
  return ReluNetwork(std::move(layers));
}

void save_network(const ReluNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file " + path.string());
  out << network_to_json(net);
}

ReluNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return network_from_json(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lipc
