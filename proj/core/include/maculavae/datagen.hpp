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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maculavae/random.hpp"

namespace maculavae {

/// Codes follow the bracket order used for race tables: 0..4.
enum class Race : std::uint8_t { Asian = 0, Black, Caucasian, Hispanic, Other };
inline constexpr std::size_t kNumRaces = 5;

/// Metadata only; never part of the model input.
enum class Disease : std::uint8_t { ExudativeArmd = 0, Cscr, Pcv };
inline constexpr std::size_t kNumDiseases = 3;
inline constexpr std::array<Disease, kNumDiseases> kAllDiseases{
    Disease::ExudativeArmd, Disease::Cscr, Disease::Pcv};

/// Tokens used in CSV files: ASIAN..OTHER and ARMD/CSCR/PCV.
std::string_view race_token(Race race);
std::string_view disease_token(Disease disease);
std::optional<Race> race_from_token(std::string_view token);
std::optional<Disease> disease_from_token(std::string_view token);

/// One synthetic patient profile.
struct PVec {
    std::size_t id = 0;
    Disease disease = Disease::ExudativeArmd;
    Race race = Race::Asian;
    double age = 0.0;
    bool polyps = false;
    bool drusen = false;
    bool srh = false;
    bool male = false;

    friend bool operator==(const PVec&, const PVec&) = default;
};

/// Independent per-attribute sampling distributions for one maculopathy.
struct DiseaseModel {
    double age_mean = 0.0;
    double age_var = 0.0;
    std::array<double, kNumRaces> race_probs{};
    double p_polyps = 0.0;
    double p_drusen = 0.0;
    double p_srh = 0.0;
    double p_male = 0.0;

    /// Throws InvalidModelError when any invariant is violated.
    void validate() const;

    friend bool operator==(const DiseaseModel&, const DiseaseModel&) = default;
};

/// Indexed by the integer value of Disease.
using DiseaseModels = std::array<DiseaseModel, kNumDiseases>;

/// Default parameterization. Age and race parameters and the PCV/CSCR drusen
/// rates come from the published epidemiology; the remaining finding rates
/// and the CSCR male fraction are documented extrapolations and are meant to
/// be overridden from config when better numbers are available.
DiseaseModels default_disease_models();

inline constexpr double kRaceTolerance = 1e-9;
inline constexpr double kDefaultAgeCap = 110.0;
inline constexpr std::size_t kFeatureDim = 6;

/// [race_code, age_norm, polyps, drusen, srh, sex], every entry in [0, 1].
using FeatureVec = std::array<double, kFeatureDim>;

struct Cohort {
    std::vector<PVec> records;
    std::uint64_t seed = 0;
    std::size_t per_disease_count = 0;

    friend bool operator==(const Cohort&, const Cohort&) = default;
};

/// Normal(age_mean, age_var), redrawn until strictly positive.
double sample_age(const DiseaseModel& model, Rng& rng);

/// Inverse CDF over half-open intervals [cum_i, cum_{i+1}) for a given u in [0, 1).
std::size_t categorical_index(std::span<const double> probs, double u);

/// One uniform draw pushed through categorical_index.
std::size_t sample_categorical(std::span<const double> probs, Rng& rng);

/// Attributes are drawn in the fixed order age, race, polyps, drusen, srh, sex.
PVec sample_pvec(Disease disease, const DiseaseModel& model, Rng& rng);

/// per_disease_count records for each disease, ARMD first, then CSCR, then
/// PCV. Ids run 0..N-1 in that order. Pure function of its arguments.
Cohort generate_cohort(const DiseaseModels& models, std::size_t per_disease_count,
                       std::uint64_t seed);

FeatureVec encode_features(const PVec& p, double age_cap = kDefaultAgeCap);

/// Inverse of encode_features. id and disease are left at their defaults.
PVec decode_features(const FeatureVec& x, double age_cap = kDefaultAgeCap);

inline constexpr std::string_view kCohortCsvHeader = "id,disease,race,age,polyps,drusen,srh,sex";

std::string cohort_to_csv(const Cohort& cohort);

/// Parses the cohort CSV. The seed and per-disease count are not stored in
/// the file; per_disease_count is recovered when the diseases are balanced.
Cohort cohort_from_csv(std::string_view csv);

void write_cohort(const std::filesystem::path& path, const Cohort& cohort);
Cohort read_cohort(const std::filesystem::path& path);

} // namespace maculavae
