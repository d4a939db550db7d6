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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "maculavae/clustering.hpp"
#include "maculavae/datagen.hpp"

namespace maculavae {

/// Per-cluster characteristics. Pairs are [with, without] and sex is
/// [male, female].
struct ClusterSummary {
    int cluster = 0; // 0-based; reports print cluster + 1
    std::size_t size = 0;
    std::array<std::size_t, kNumRaces> race{};
    double age_min = 0.0;
    double age_median = 0.0;
    double age_max = 0.0;
    std::size_t polyps_with = 0;
    std::size_t polyps_without = 0;
    std::size_t drusen_with = 0;
    std::size_t drusen_without = 0;
    std::size_t srh_with = 0;
    std::size_t srh_without = 0;
    std::size_t male = 0;
    std::size_t female = 0;
    std::array<std::size_t, kNumDiseases> disease{};
};

/// Violated sum/ordering invariants, one message each. Empty when consistent.
std::vector<std::string> audit_summary(const ClusterSummary& summary);

/// One summary per non-empty cluster, ordered by cluster index. Every latent
/// point must carry a cluster and an id present in the cohort (JoinError
/// otherwise). The median of an even-sized cluster is the mean of the two
/// central ages.
std::vector<ClusterSummary> summarize_clusters(const Cohort& cohort,
                                               const std::vector<LatentPoint>& latents);

/// Cluster indices in [0, k) that have no members.
std::vector<int> empty_clusters(const std::vector<LatentPoint>& latents, int k);

struct ClusterComposition {
    int cluster = 0;
    std::array<bool, kNumDiseases> present{};
    int diseases_present = 0;
};

/// For each binary attribute, the fraction of clusters in which every member
/// falls on the same side.
struct PurityReport {
    double polyps = 0.0;
    double sex = 0.0;
    double drusen = 0.0;
    double srh = 0.0;
    std::vector<ClusterComposition> composition;
    int clusters_with_all_diseases = 0;
    int clusters_with_two_diseases = 0;
    int clusters_with_one_disease = 0;
};

/// Throws ConfigError on an empty summary list.
PurityReport purity_stats(const std::vector<ClusterSummary>& summaries);

inline constexpr std::string_view kClusterReportCsvHeader =
    "cluster,size,asian,black,caucasian,hispanic,other,age_min,age_median,age_max,"
    "polyps_with,polyps_without,drusen_with,drusen_without,srh_with,srh_without,"
    "male,female,armd,cscr,pcv";

/// Column titles of the bracketed text table.
inline constexpr std::array<std::string_view, 8> kClusterTableColumns{
    "ID", "Size", "Race", "Age", "Polyps", "Drusen", "SRH", "Sex"};

/// Machine-readable report at full precision.
std::string cluster_report_csv(const std::vector<ClusterSummary>& summaries);

/// Human-readable table in bracket notation, ages rounded to whole years,
/// followed by each cluster's disease counts.
std::string cluster_report_table(const std::vector<ClusterSummary>& summaries);

std::string purity_csv(const PurityReport& report);
std::string purity_text(const PurityReport& report);

/// Per-disease point files plus the composite, in the latents CSV schema.
struct ScatterExport {
    std::array<std::string, kNumDiseases> per_disease;
    std::string composite;
};

ScatterExport export_latent_scatter(const std::vector<LatentPoint>& latents);

/// Writes <dir>/<prefix>_{armd,cscr,pcv,composite}.csv.
void write_latent_scatter(const std::filesystem::path& dir, const ScatterExport& scatter,
                          std::string_view prefix = "scatter");

struct FindingRates {
    double polyps = 0.0;
    double drusen = 0.0;
    double srh = 0.0;
    double male = 0.0;
};

/// Tables behind the data-model figures: race distributions, finding rates,
/// and age densities on a 1-year grid over [0, 110].
struct DataModelFigures {
    std::array<std::array<double, kNumRaces>, kNumDiseases> race_probs{};
    std::array<FindingRates, kNumDiseases> findings{};
    std::vector<double> ages;
    std::array<std::vector<double>, kNumDiseases> age_density;
};

inline constexpr double kAgeGridMax = 110.0;

double normal_density(double x, double mean, double variance);

DataModelFigures export_data_model_figures(const DiseaseModels& models);

std::string race_table_csv(const DataModelFigures& figures);
std::string findings_csv(const DataModelFigures& figures);
std::string age_density_csv(const DataModelFigures& figures);

} // namespace maculavae
