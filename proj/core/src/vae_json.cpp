/*
 * Copyright 2026 The maculavae Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <string>

#include <json.hpp>

#include "maculavae/errors.hpp"
#include "maculavae/text_io.hpp"
#include "maculavae/vae.hpp"

namespace maculavae {

namespace {

using nlohmann::json;

constexpr const char* kLayerNames[] = {"enc_hidden", "enc_head", "dec_hidden", "dec_out"};

json layer_to_json(const LayerParams& layer)
{
    json weights = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            row.push_back(layer.weights(r, c));
        }
        weights.push_back(std::move(row));
    }
    json bias = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
        bias.push_back(layer.bias[r]);
    }
    return json{{"weights", std::move(weights)}, {"bias", std::move(bias)}};
}

double number_at(const json& value, const std::string& where)
{
    if (!value.is_number()) {
        throw ParseError("weights file: non-numeric entry in " + where);
    }
    return value.get<double>();
}

void layer_from_json(const json& doc, const char* name, LayerParams& layer)
{
    if (!doc.contains(name) || !doc[name].is_object()) {
        throw ParseError(std::string("weights file: missing layer '") + name + "'");
    }
    const json& node = doc[name];
    const json& weights = node.value("weights", json());
    const json& bias = node.value("bias", json());
    const auto rows = layer.weights.rows();
    const auto cols = layer.weights.cols();
    if (!weights.is_array() || static_cast<Eigen::Index>(weights.size()) != rows || !bias.is_array()
        || static_cast<Eigen::Index>(bias.size()) != rows) {
        throw ShapeError(std::string("weights file: layer '") + name + "' has the wrong shape");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = weights[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ShapeError(std::string("weights file: layer '") + name + "' has a ragged row");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            layer.weights(r, c) = number_at(row[static_cast<std::size_t>(c)], name);
        }
        layer.bias[r] = number_at(bias[static_cast<std::size_t>(r)], name);
    }
}

} // namespace

std::string weights_to_json(const VaeParams& params)
{
    params.validate_shapes();
    json doc;
    doc["dims"] = {{"latent_dim", params.latent_dim},
                   {"hidden_dim", params.hidden_dim},
                   {"input_dim", kInputDim}};
    doc["enc_hidden"] = layer_to_json(params.enc_hidden);
    doc["enc_head"] = layer_to_json(params.enc_head);
    doc["dec_hidden"] = layer_to_json(params.dec_hidden);
    doc["dec_out"] = layer_to_json(params.dec_out);
    return doc.dump(1) + "\n";
}

VaeParams weights_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("weights file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("dims") || !doc["dims"].is_object()) {
        throw ParseError("weights file: missing 'dims' header");
    }
    const json& dims = doc["dims"];
    for (const char* key : {"latent_dim", "hidden_dim", "input_dim"}) {
        if (!dims.contains(key) || !dims[key].is_number_integer()) {
            throw ParseError(std::string("weights file: dims.") + key + " must be an integer");
        }
    }
    if (dims["input_dim"].get<int>() != kInputDim) {
        throw ShapeError("weights file: input_dim must be 6");
    }
    VaeParams params =
        VaeParams::zeros(dims["latent_dim"].get<int>(), dims["hidden_dim"].get<int>());
    layer_from_json(doc, kLayerNames[0], params.enc_hidden);
    layer_from_json(doc, kLayerNames[1], params.enc_head);
    layer_from_json(doc, kLayerNames[2], params.dec_hidden);
    layer_from_json(doc, kLayerNames[3], params.dec_out);
    if (!params.all_finite()) {
        throw NumericError("weights file contains non-finite values");
    }
    return params;
}

void save_weights(const std::filesystem::path& path, const VaeParams& params)
{
    text::write_file(path, weights_to_json(params));
}

VaeParams load_weights(const std::filesystem::path& path)
{
    return weights_from_json(text::read_file(path));
}

} // namespace maculavae
