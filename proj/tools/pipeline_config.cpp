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

#include "pipeline_config.hpp"

#include <string>

#include <json.hpp>

#include "maculavae/errors.hpp"
#include "maculavae/text_io.hpp"

namespace maculavae::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where)
{
    if (!obj.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto key : allowed) {
            known = known || item.key() == key;
        }
        if (!known) {
            throw ConfigError("unknown config key '" + where + "." + item.key() + "'");
        }
    }
}

template <class T>
void read_number(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    const json& v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) {
            throw ConfigError(where + "." + key + " must be an integer");
        }
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) {
                out = v.get<T>();
                return;
            }
            if (v.get<long long>() < 0) {
                throw ConfigError(where + "." + key + " must be non-negative");
            }
        }
        out = v.get<T>();
    } else {
        if (!v.is_number()) {
            throw ConfigError(where + "." + key + " must be a number");
        }
        out = v.get<T>();
    }
}

void read_bool(const json& obj, const char* key, bool& out, const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    if (!obj.at(key).is_boolean()) {
        throw ConfigError(where + "." + key + " must be true or false");
    }
    out = obj.at(key).get<bool>();
}

void read_path(const json& obj, const char* key, std::optional<std::filesystem::path>& out,
               const std::string& where)
{
    if (!obj.contains(key)) {
        return;
    }
    if (!obj.at(key).is_string()) {
        throw ConfigError(where + "." + key + " must be a string");
    }
    out = obj.at(key).get<std::string>();
}

void read_model(const json& obj, DiseaseModel& model, const std::string& where)
{
    reject_unknown(obj,
                   {"age_mean", "age_var", "race_probs", "p_polyps", "p_drusen", "p_srh", "p_male"},
                   where);
    read_number(obj, "age_mean", model.age_mean, where);
    read_number(obj, "age_var", model.age_var, where);
    read_number(obj, "p_polyps", model.p_polyps, where);
    read_number(obj, "p_drusen", model.p_drusen, where);
    read_number(obj, "p_srh", model.p_srh, where);
    read_number(obj, "p_male", model.p_male, where);
    if (obj.contains("race_probs")) {
        const json& probs = obj.at("race_probs");
        if (!probs.is_array() || probs.size() != kNumRaces) {
            throw ConfigError(where + ".race_probs must be an array of 5 numbers");
        }
        for (std::size_t i = 0; i < kNumRaces; ++i) {
            if (!probs[i].is_number()) {
                throw ConfigError(where + ".race_probs must be an array of 5 numbers");
            }
            model.race_probs[i] = probs[i].get<double>();
        }
    }
}

} // namespace

void PipelineConfig::validate() const
{
    for (Disease d : kAllDiseases) {
        try {
            data.models[static_cast<std::size_t>(d)].validate();
        } catch (const InvalidModelError& e) {
            throw ConfigError("data.models." + std::string(disease_token(d)) + ": " + e.what());
        }
    }
    if (data.per_disease_count < 1) {
        throw ConfigError("data.per_disease_count must be at least 1");
    }
    if (!(data.age_cap > 0.0)) {
        throw ConfigError("data.age_cap must be positive");
    }
    train.validate();
    if (cluster.k < 1) {
        throw ConfigError("cluster.k must be at least 1");
    }
    if (cluster.max_iter < 1 || !(cluster.tol >= 0.0) || cluster.restarts < 1
        || cluster.elbow_max_k < 1) {
        throw ConfigError("cluster.max_iter, restarts and elbow_max_k must be >= 1, tol >= 0");
    }
}

PipelineConfig parse_pipeline_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    PipelineConfig config = default_pipeline_config();
    reject_unknown(doc, {"data", "train", "cluster", "paths"}, "config");

    if (doc.contains("data")) {
        const json& data = doc["data"];
        reject_unknown(data, {"models", "per_disease_count", "seed", "age_cap"}, "data");
        read_number(data, "per_disease_count", config.data.per_disease_count, "data");
        read_number(data, "seed", config.data.seed, "data");
        read_number(data, "age_cap", config.data.age_cap, "data");
        if (data.contains("models")) {
            const json& models = data["models"];
            reject_unknown(models, {"ARMD", "CSCR", "PCV"}, "data.models");
            for (Disease d : kAllDiseases) {
                const std::string token(disease_token(d));
                if (models.contains(token)) {
                    read_model(models[token], config.data.models[static_cast<std::size_t>(d)],
                               "data.models." + token);
                }
            }
        }
    }

    if (doc.contains("train")) {
        const json& t = doc["train"];
        reject_unknown(t,
                       {"epochs", "batch_size", "learning_rate", "adam_beta1", "adam_beta2",
                        "adam_eps", "seed", "latent_dim", "hidden_dim", "shuffle_each_epoch"},
                       "train");
        read_number(t, "epochs", config.train.epochs, "train");
        read_number(t, "batch_size", config.train.batch_size, "train");
        read_number(t, "learning_rate", config.train.learning_rate, "train");
        read_number(t, "adam_beta1", config.train.adam_beta1, "train");
        read_number(t, "adam_beta2", config.train.adam_beta2, "train");
        read_number(t, "adam_eps", config.train.adam_eps, "train");
        read_number(t, "seed", config.train.seed, "train");
        read_number(t, "latent_dim", config.train.latent_dim, "train");
        read_number(t, "hidden_dim", config.train.hidden_dim, "train");
        read_bool(t, "shuffle_each_epoch", config.train.shuffle_each_epoch, "train");
    }

    if (doc.contains("cluster")) {
        const json& c = doc["cluster"];
        reject_unknown(c, {"k", "seed", "tol", "max_iter", "restarts", "elbow_max_k"}, "cluster");
        read_number(c, "k", config.cluster.k, "cluster");
        read_number(c, "seed", config.cluster.seed, "cluster");
        read_number(c, "tol", config.cluster.tol, "cluster");
        read_number(c, "max_iter", config.cluster.max_iter, "cluster");
        read_number(c, "restarts", config.cluster.restarts, "cluster");
        read_number(c, "elbow_max_k", config.cluster.elbow_max_k, "cluster");
    }

    if (doc.contains("paths")) {
        const json& p = doc["paths"];
        reject_unknown(p, {"out", "cohort", "weights", "latents", "assignments"}, "paths");
        std::optional<std::filesystem::path> out;
        read_path(p, "out", out, "paths");
        if (out) {
            config.paths.out = *out;
        }
        read_path(p, "cohort", config.paths.cohort, "paths");
        read_path(p, "weights", config.paths.weights, "paths");
        read_path(p, "latents", config.paths.latents, "paths");
        read_path(p, "assignments", config.paths.assignments, "paths");
    }

    config.train.age_cap = config.data.age_cap;
    config.validate();
    return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path)
{
    return parse_pipeline_config(text::read_file(path));
}

} // namespace maculavae::cli
