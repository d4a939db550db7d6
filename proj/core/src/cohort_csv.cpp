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

#include <cmath>
#include <string>

#include "maculavae/datagen.hpp"
#include "maculavae/errors.hpp"
#include "maculavae/text_io.hpp"

namespace maculavae {

namespace {

bool parse_flag(std::string_view field, const char* name, std::size_t line)
{
    if (field == "0") {
        return false;
    }
    if (field == "1") {
        return true;
    }
    throw ParseError(std::string(name) + " must be 0 or 1, got '" + std::string(field) + "'", line);
}

Race parse_race(std::string_view field, std::size_t line)
{
    if (auto race = race_from_token(field)) {
        return *race;
    }
    // Integer codes are accepted as well, but only 0..4.
    if (!field.empty() && field.find_first_not_of("-0123456789") == std::string_view::npos) {
        const auto code = text::parse_int(field, line);
        if (code >= 0 && code < static_cast<std::int64_t>(kNumRaces)) {
            return static_cast<Race>(code);
        }
    }
    throw ParseError("unknown race '" + std::string(field) + "'", line);
}

} // namespace

std::string cohort_to_csv(const Cohort& cohort)
{
    std::string out;
    out.reserve(64 * (cohort.records.size() + 1));
    out += kCohortCsvHeader;
    out += '\n';
    for (const auto& p : cohort.records) {
        out += std::to_string(p.id);
        out += ',';
        out += disease_token(p.disease);
        out += ',';
        out += race_token(p.race);
        out += ',';
        out += text::format_double(p.age);
        out += p.polyps ? ",1" : ",0";
        out += p.drusen ? ",1" : ",0";
        out += p.srh ? ",1" : ",0";
        out += p.male ? ",1\n" : ",0\n";
    }
    return out;
}

Cohort cohort_from_csv(std::string_view csv)
{
    const auto rows = text::lines(csv);
    if (rows.empty() || rows.front() != kCohortCsvHeader) {
        throw ParseError("expected header '" + std::string(kCohortCsvHeader) + "'", 1);
    }

    Cohort cohort;
    std::array<std::size_t, kNumDiseases> per_disease{};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t line = r + 1;
        if (rows[r].empty()) {
            continue;
        }
        const auto fields = text::split_csv_row(rows[r]);
        if (fields.size() != 8) {
            throw ParseError("expected 8 fields, got " + std::to_string(fields.size()), line);
        }
        PVec p;
        const auto id = text::parse_int(fields[0], line);
        if (id < 0) {
            throw ParseError("negative id", line);
        }
        p.id = static_cast<std::size_t>(id);
        const auto disease = disease_from_token(fields[1]);
        if (!disease) {
            throw ParseError("unknown disease '" + std::string(fields[1]) + "'", line);
        }
        p.disease = *disease;
        p.race = parse_race(fields[2], line);
        p.age = text::parse_double(fields[3], line);
        if (!(p.age > 0.0) || !std::isfinite(p.age)) {
            throw ParseError("age must be a positive finite number", line);
        }
        p.polyps = parse_flag(fields[4], "polyps", line);
        p.drusen = parse_flag(fields[5], "drusen", line);
        p.srh = parse_flag(fields[6], "srh", line);
        p.male = parse_flag(fields[7], "sex", line);
        ++per_disease[static_cast<std::size_t>(p.disease)];
        cohort.records.push_back(p);
    }

    if (per_disease[0] == per_disease[1] && per_disease[1] == per_disease[2]) {
        cohort.per_disease_count = per_disease[0];
    }
    return cohort;
}

void write_cohort(const std::filesystem::path& path, const Cohort& cohort)
{
    text::write_file(path, cohort_to_csv(cohort));
}

Cohort read_cohort(const std::filesystem::path& path)
{
    return cohort_from_csv(text::read_file(path));
}

} // namespace maculavae
