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

#include "maculavae/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maculavae/errors.hpp"

namespace maculavae {

namespace {

constexpr std::array<std::string_view, kNumRaces> kRaceTokens{
    "ASIAN", "BLACK", "CAUCASIAN", "HISPANIC", "OTHER"};
constexpr std::array<std::string_view, kNumDiseases> kDiseaseTokens{"ARMD", "CSCR", "PCV"};

void require_probability(double p, const char* name)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidModelError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
    }
}

void require_normalized(std::span<const double> probs)
{
    if (probs.empty()) {
        throw InvalidModelError("probability vector is empty");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidModelError("probability vector has a negative or non-finite entry");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kRaceTolerance) {
        throw InvalidModelError("probability vector sums to " + std::to_string(total) + ", not 1");
    }
}

bool bernoulli(double p, Rng& rng)
{
    return rng.uniform() < p;
}

} // namespace

std::string_view race_token(Race race)
{
    return kRaceTokens.at(static_cast<std::size_t>(race));
}

std::string_view disease_token(Disease disease)
{
    return kDiseaseTokens.at(static_cast<std::size_t>(disease));
}

std::optional<Race> race_from_token(std::string_view token)
{
    for (std::size_t i = 0; i < kRaceTokens.size(); ++i) {
        if (kRaceTokens[i] == token) {
            return static_cast<Race>(i);
        }
    }
    return std::nullopt;
}

std::optional<Disease> disease_from_token(std::string_view token)
{
    for (std::size_t i = 0; i < kDiseaseTokens.size(); ++i) {
        if (kDiseaseTokens[i] == token) {
            return static_cast<Disease>(i);
        }
    }
    return std::nullopt;
}

void DiseaseModel::validate() const
{
    if (!(age_mean > 0.0) || !std::isfinite(age_mean)) {
        throw InvalidModelError("age_mean must be positive");
    }
    if (!(age_var >= 0.0) || !std::isfinite(age_var)) {
        throw InvalidModelError("age_var must be non-negative");
    }
    require_normalized(race_probs);
    require_probability(p_polyps, "p_polyps");
    require_probability(p_drusen, "p_drusen");
    require_probability(p_srh, "p_srh");
    require_probability(p_male, "p_male");
}

DiseaseModels default_disease_models()
{
    DiseaseModels models;

    auto& armd = models[static_cast<std::size_t>(Disease::ExudativeArmd)];
    armd.age_mean = 80.0;
    armd.age_var = 80.0;
    armd.race_probs = {0.39, 0.01, 0.5, 0.05, 0.05};
    armd.p_polyps = 0.05;
    armd.p_drusen = 0.90;
    armd.p_srh = 0.30;
    armd.p_male = 0.5;

    auto& cscr = models[static_cast<std::size_t>(Disease::Cscr)];
    cscr.age_mean = 39.0;
    cscr.age_var = 60.0;
    cscr.race_probs = {0.33, 0.05, 0.32, 0.25, 0.05};
    cscr.p_polyps = 0.05;
    cscr.p_drusen = 0.10;
    cscr.p_srh = 0.05;
    cscr.p_male = 0.80;

    auto& pcv = models[static_cast<std::size_t>(Disease::Pcv)];
    pcv.age_mean = 60.0;
    pcv.age_var = 40.0;
    pcv.race_probs = {0.4, 0.3, 0.10, 0.18, 0.02};
    pcv.p_polyps = 1.0;
    pcv.p_drusen = 0.28;
    pcv.p_srh = 0.33;
    pcv.p_male = 0.5;

    return models;
}

double sample_age(const DiseaseModel& model, Rng& rng)
{
    if (!(model.age_var >= 0.0)) {
        throw InvalidModelError("age_var must be non-negative");
    }
    if (!(model.age_mean > 0.0)) {
        throw InvalidModelError("age_mean must be positive");
    }
    const double sd = std::sqrt(model.age_var);
    double age;
    do {
        age = model.age_mean + sd * rng.normal();
    } while (!(age > 0.0));
    return age;
}

std::size_t categorical_index(std::span<const double> probs, double u)
{
    require_normalized(probs);
    double upper = 0.0;
    std::size_t last_supported = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            last_supported = i;
        }
        upper += probs[i];
        if (u < upper && probs[i] > 0.0) {
            return i;
        }
    }
    // Only reachable when rounding leaves the cumulative sum a hair below u.
    return last_supported;
}

std::size_t sample_categorical(std::span<const double> probs, Rng& rng)
{
    return categorical_index(probs, rng.uniform());
}

PVec sample_pvec(Disease disease, const DiseaseModel& model, Rng& rng)
{
    model.validate();
    PVec p;
    p.disease = disease;
    p.age = sample_age(model, rng);
    p.race = static_cast<Race>(sample_categorical(model.race_probs, rng));
    p.polyps = bernoulli(model.p_polyps, rng);
    p.drusen = bernoulli(model.p_drusen, rng);
    p.srh = bernoulli(model.p_srh, rng);
    p.male = bernoulli(model.p_male, rng);
    return p;
}

Cohort generate_cohort(const DiseaseModels& models, std::size_t per_disease_count,
                       std::uint64_t seed)
{
    if (per_disease_count == 0) {
        throw ConfigError("per_disease_count must be at least 1 (empty cohort)");
    }
    for (const auto& model : models) {
        model.validate();
    }

    Cohort cohort;
    cohort.seed = seed;
    cohort.per_disease_count = per_disease_count;
    cohort.records.reserve(per_disease_count * kNumDiseases);

    Rng rng(seed);
    std::size_t next_id = 0;
    for (Disease disease : kAllDiseases) {
        const auto& model = models[static_cast<std::size_t>(disease)];
        for (std::size_t i = 0; i < per_disease_count; ++i) {
            PVec p = sample_pvec(disease, model, rng);
            p.id = next_id++;
            cohort.records.push_back(p);
        }
    }
    return cohort;
}

FeatureVec encode_features(const PVec& p, double age_cap)
{
    if (!(age_cap > 0.0)) {
        throw ConfigError("age_cap must be positive");
    }
    return {
        static_cast<double>(p.race) / 4.0,
        std::clamp(p.age, 0.0, age_cap) / age_cap,
        p.polyps ? 1.0 : 0.0,
        p.drusen ? 1.0 : 0.0,
        p.srh ? 1.0 : 0.0,
        p.male ? 1.0 : 0.0,
    };
}

PVec decode_features(const FeatureVec& x, double age_cap)
{
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (!(x[d] >= 0.0 && x[d] <= 1.0)) {
            throw CodecError("feature " + std::to_string(d) + " outside [0, 1]: "
                             + std::to_string(x[d]));
        }
    }
    PVec p;
    // Nearest of {0, .25, .5, .75, 1}; exact ties go to the lower code.
    p.race = static_cast<Race>(static_cast<int>(std::ceil(x[0] * 4.0 - 0.5)));
    p.age = x[1] * age_cap;
    p.polyps = x[2] >= 0.5;
    p.drusen = x[3] >= 0.5;
    p.srh = x[4] >= 0.5;
    p.male = x[5] >= 0.5;
    return p;
}

} // namespace maculavae
