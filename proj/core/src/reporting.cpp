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

#include "maculavae/reporting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "maculavae/errors.hpp"
#include "maculavae/text_io.hpp"

namespace maculavae {

namespace {

double median_of_sorted(const std::vector<double>& v)
{
    const std::size_t n = v.size();
    if (n % 2 == 1) {
        return v[n / 2];
    }
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class T, std::size_t N>
std::size_t array_sum(const std::array<T, N>& a)
{
    return std::accumulate(a.begin(), a.end(), std::size_t{0});
}

std::string bracket(std::initializer_list<long long> values)
{
    std::string out = "[";
    bool first = true;
    for (long long v : values) {
        if (!first) {
            out += ',';
        }
        out += std::to_string(v);
        first = false;
    }
    return out + "]";
}

template <std::size_t N>
std::string bracket(const std::array<std::size_t, N>& a)
{
    std::string out = "[";
    for (std::size_t i = 0; i < N; ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(a[i]);
    }
    return out + "]";
}

bool pure(std::size_t with, std::size_t without)
{
    return with == 0 || without == 0;
}

std::string lowercase(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

} // namespace

std::vector<std::string> audit_summary(const ClusterSummary& s)
{
    std::vector<std::string> problems;
    const auto id = std::to_string(s.cluster + 1);
    if (array_sum(s.race) != s.size) {
        problems.push_back("cluster " + id + ": race counts do not sum to size");
    }
    if (s.polyps_with + s.polyps_without != s.size) {
        problems.push_back("cluster " + id + ": polyps counts do not sum to size");
    }
    if (s.drusen_with + s.drusen_without != s.size) {
        problems.push_back("cluster " + id + ": drusen counts do not sum to size");
    }
    if (s.srh_with + s.srh_without != s.size) {
        problems.push_back("cluster " + id + ": srh counts do not sum to size");
    }
    if (s.male + s.female != s.size) {
        problems.push_back("cluster " + id + ": sex counts do not sum to size");
    }
    if (array_sum(s.disease) != s.size) {
        problems.push_back("cluster " + id + ": disease counts do not sum to size");
    }
    if (!(s.age_min <= s.age_median && s.age_median <= s.age_max)) {
        problems.push_back("cluster " + id + ": ages not ordered min <= median <= max");
    }
    return problems;
}

std::vector<ClusterSummary> summarize_clusters(const Cohort& cohort,
                                               const std::vector<LatentPoint>& latents)
{
    std::unordered_map<std::size_t, const PVec*> by_id;
    by_id.reserve(cohort.records.size());
    for (const auto& rec : cohort.records) {
        by_id.emplace(rec.id, &rec);
    }

    std::map<int, std::vector<const PVec*>> members;
    for (const auto& p : latents) {
        if (!p.cluster) {
            throw JoinError("latent point " + std::to_string(p.id) + " has no cluster assignment");
        }
        const auto it = by_id.find(p.id);
        if (it == by_id.end()) {
            throw JoinError("latent point id " + std::to_string(p.id) + " is not in the cohort");
        }
        members[*p.cluster].push_back(it->second);
    }

    std::vector<ClusterSummary> out;
    out.reserve(members.size());
    for (const auto& [cluster, recs] : members) {
        ClusterSummary s;
        s.cluster = cluster;
        s.size = recs.size();
        std::vector<double> ages;
        ages.reserve(recs.size());
        for (const PVec* r : recs) {
            ++s.race[static_cast<std::size_t>(r->race)];
            ++s.disease[static_cast<std::size_t>(r->disease)];
            ages.push_back(r->age);
            (r->polyps ? s.polyps_with : s.polyps_without)++;
            (r->drusen ? s.drusen_with : s.drusen_without)++;
            (r->srh ? s.srh_with : s.srh_without)++;
            (r->male ? s.male : s.female)++;
        }
        std::sort(ages.begin(), ages.end());
        s.age_min = ages.front();
        s.age_max = ages.back();
        s.age_median = median_of_sorted(ages);
        out.push_back(s);
    }
    return out;
}

std::vector<int> empty_clusters(const std::vector<LatentPoint>& latents, int k)
{
    std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
    for (const auto& p : latents) {
        if (p.cluster && *p.cluster >= 0 && *p.cluster < k) {
            seen[static_cast<std::size_t>(*p.cluster)] = true;
        }
    }
    std::vector<int> out;
    for (int c = 0; c < k; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) {
            out.push_back(c);
        }
    }
    return out;
}

PurityReport purity_stats(const std::vector<ClusterSummary>& summaries)
{
    if (summaries.empty()) {
        throw ConfigError("purity_stats needs at least one cluster");
    }
    PurityReport report;
    std::size_t polyps = 0, sex = 0, drusen = 0, srh = 0;
    for (const auto& s : summaries) {
        polyps += pure(s.polyps_with, s.polyps_without);
        sex += pure(s.male, s.female);
        drusen += pure(s.drusen_with, s.drusen_without);
        srh += pure(s.srh_with, s.srh_without);

        ClusterComposition c;
        c.cluster = s.cluster;
        for (std::size_t d = 0; d < kNumDiseases; ++d) {
            c.present[d] = s.disease[d] > 0;
            c.diseases_present += c.present[d] ? 1 : 0;
        }
        if (c.diseases_present == 3) {
            ++report.clusters_with_all_diseases;
        } else if (c.diseases_present == 2) {
            ++report.clusters_with_two_diseases;
        } else if (c.diseases_present == 1) {
            ++report.clusters_with_one_disease;
        }
        report.composition.push_back(c);
    }
    const double n = static_cast<double>(summaries.size());
    report.polyps = static_cast<double>(polyps) / n;
    report.sex = static_cast<double>(sex) / n;
    report.drusen = static_cast<double>(drusen) / n;
    report.srh = static_cast<double>(srh) / n;
    return report;
}

std::string cluster_report_csv(const std::vector<ClusterSummary>& summaries)
{
    std::string out(kClusterReportCsvHeader);
    out += '\n';
    for (const auto& s : summaries) {
        out += std::to_string(s.cluster + 1) + ',' + std::to_string(s.size);
        for (auto c : s.race) {
            out += ',' + std::to_string(c);
        }
        out += ',' + text::format_double(s.age_min);
        out += ',' + text::format_double(s.age_median);
        out += ',' + text::format_double(s.age_max);
        for (auto c : {s.polyps_with, s.polyps_without, s.drusen_with, s.drusen_without,
                       s.srh_with, s.srh_without, s.male, s.female}) {
            out += ',' + std::to_string(c);
        }
        for (auto c : s.disease) {
            out += ',' + std::to_string(c);
        }
        out += '\n';
    }
    return out;
}

std::string cluster_report_table(const std::vector<ClusterSummary>& summaries)
{
    std::vector<std::array<std::string, 8>> rows;
    rows.push_back({});
    for (std::size_t c = 0; c < kClusterTableColumns.size(); ++c) {
        rows.back()[c] = kClusterTableColumns[c];
    }
    for (const auto& s : summaries) {
        auto sz = [](std::size_t v) { return static_cast<long long>(v); };
        rows.push_back({
            std::to_string(s.cluster + 1),
            std::to_string(s.size),
            bracket(s.race),
            bracket({std::llround(s.age_min), std::llround(s.age_median), std::llround(s.age_max)}),
            bracket({sz(s.polyps_with), sz(s.polyps_without)}),
            bracket({sz(s.drusen_with), sz(s.drusen_without)}),
            bracket({sz(s.srh_with), sz(s.srh_without)}),
            bracket({sz(s.male), sz(s.female)}),
        });
    }

    std::array<std::size_t, 8> width{};
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }

    std::ostringstream os;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) {
                os << " | ";
            }
            os << rows[r][c];
            if (c + 1 < rows[r].size()) {
                os << std::string(width[c] - rows[r][c].size(), ' ');
            }
        }
        os << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width) {
                total += w;
            }
            os << std::string(total + 3 * (width.size() - 1), '-') << '\n';
        }
    }
    os << "\nRace: [Asian, Black, Caucasian, Hispanic, Other]. Age: [min, median, max].\n"
          "Polyps, Drusen, SRH: [with, without]. Sex: [male, female].\n";

    os << "\nDisease composition [ARMD, CSCR, PCV]\n";
    for (const auto& s : summaries) {
        os << std::to_string(s.cluster + 1) << ": " << bracket(s.disease) << '\n';
    }
    return os.str();
}

std::string purity_csv(const PurityReport& report)
{
    std::ostringstream os;
    os << "attribute,purity\n";
    os << "polyps," << text::format_double(report.polyps) << '\n';
    os << "sex," << text::format_double(report.sex) << '\n';
    os << "drusen," << text::format_double(report.drusen) << '\n';
    os << "srh," << text::format_double(report.srh) << '\n';
    return os.str();
}

std::string purity_text(const PurityReport& report)
{
    std::ostringstream os;
    const auto n = report.composition.size();
    auto line = [&](const char* name, double value) {
        os << "  " << name << ": " << text::format_double(value) << " ("
           << std::llround(value * static_cast<double>(n)) << " of " << n << " clusters unmixed)\n";
    };
    os << "Attribute purity\n";
    line("polyps", report.polyps);
    line("sex", report.sex);
    line("drusen", report.drusen);
    line("srh", report.srh);
    os << "Disease mixing\n";
    os << "  clusters with all three diseases: " << report.clusters_with_all_diseases << '\n';
    os << "  clusters with two diseases: " << report.clusters_with_two_diseases << '\n';
    os << "  clusters with one disease: " << report.clusters_with_one_disease << '\n';
    for (const auto& c : report.composition) {
        os << "  cluster " << c.cluster + 1 << ":";
        for (std::size_t d = 0; d < kNumDiseases; ++d) {
            if (c.present[d]) {
                os << ' ' << disease_token(static_cast<Disease>(d));
            }
        }
        os << '\n';
    }
    return os.str();
}

ScatterExport export_latent_scatter(const std::vector<LatentPoint>& latents)
{
    std::array<std::vector<LatentPoint>, kNumDiseases> split;
    for (const auto& p : latents) {
        split[static_cast<std::size_t>(p.disease)].push_back(p);
    }
    ScatterExport out;
    for (std::size_t d = 0; d < kNumDiseases; ++d) {
        out.per_disease[d] = latents_to_csv(split[d]);
    }
    out.composite = latents_to_csv(latents);
    return out;
}

void write_latent_scatter(const std::filesystem::path& dir, const ScatterExport& scatter,
                          std::string_view prefix)
{
    for (std::size_t d = 0; d < kNumDiseases; ++d) {
        const auto name = std::string(prefix) + "_"
                          + lowercase(disease_token(static_cast<Disease>(d))) + ".csv";
        text::write_file(dir / name, scatter.per_disease[d]);
    }
    text::write_file(dir / (std::string(prefix) + "_composite.csv"), scatter.composite);
}

double normal_density(double x, double mean, double variance)
{
    const double z = x - mean;
    return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

DataModelFigures export_data_model_figures(const DiseaseModels& models)
{
    DataModelFigures fig;
    for (int a = 0; a <= static_cast<int>(kAgeGridMax); ++a) {
        fig.ages.push_back(static_cast<double>(a));
    }
    for (std::size_t d = 0; d < kNumDiseases; ++d) {
        const auto& m = models[d];
        m.validate();
        fig.race_probs[d] = m.race_probs;
        fig.findings[d] = {m.p_polyps, m.p_drusen, m.p_srh, m.p_male};
        auto& density = fig.age_density[d];
        density.reserve(fig.ages.size());
        for (double age : fig.ages) {
            density.push_back(m.age_var > 0.0 ? normal_density(age, m.age_mean, m.age_var) : 0.0);
        }
        if (m.age_var == 0.0) {
            // Point mass: a unit spike on the nearest grid age.
            const auto at = static_cast<std::size_t>(std::clamp(std::round(m.age_mean), 0.0, kAgeGridMax));
            density[at] = 1.0;
        }
    }
    return fig;
}

std::string race_table_csv(const DataModelFigures& figures)
{
    std::string out = "disease,asian,black,caucasian,hispanic,other\n";
    for (std::size_t d = 0; d < kNumDiseases; ++d) {
        out += disease_token(static_cast<Disease>(d));
        for (double p : figures.race_probs[d]) {
            out += ',' + text::format_double(p);
        }
        out += '\n';
    }
    return out;
}

std::string findings_csv(const DataModelFigures& figures)
{
    std::string out = "disease,polyps,drusen,srh,male\n";
    for (std::size_t d = 0; d < kNumDiseases; ++d) {
        const auto& f = figures.findings[d];
        out += std::string(disease_token(static_cast<Disease>(d))) + ','
               + text::format_double(f.polyps) + ',' + text::format_double(f.drusen) + ','
               + text::format_double(f.srh) + ',' + text::format_double(f.male) + '\n';
    }
    return out;
}

std::string age_density_csv(const DataModelFigures& figures)
{
    std::string out = "age,armd,cscr,pcv\n";
    for (std::size_t i = 0; i < figures.ages.size(); ++i) {
        out += text::format_double(figures.ages[i]);
        for (std::size_t d = 0; d < kNumDiseases; ++d) {
            out += ',' + text::format_double(figures.age_density[d][i]);
        }
        out += '\n';
    }
    return out;
}

} // namespace maculavae
