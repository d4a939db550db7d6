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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "maculavae/datagen.hpp"
#include "maculavae/errors.hpp"

namespace maculavae {
namespace {

const DiseaseModel& model_for(const DiseaseModels& models, Disease d)
{
    return models[static_cast<std::size_t>(d)];
}

double binomial_sd(double p, double n)
{
    return std::sqrt(p * (1.0 - p) / n);
}

TEST(DefaultModels, AgeParameters)
{
    const auto models = default_disease_models();
    EXPECT_EQ(model_for(models, Disease::Cscr).age_mean, 39.0);
    EXPECT_EQ(model_for(models, Disease::Cscr).age_var, 60.0);
    EXPECT_EQ(model_for(models, Disease::Pcv).age_mean, 60.0);
    EXPECT_EQ(model_for(models, Disease::Pcv).age_var, 40.0);
    EXPECT_EQ(model_for(models, Disease::ExudativeArmd).age_mean, 80.0);
    EXPECT_EQ(model_for(models, Disease::ExudativeArmd).age_var, 80.0);
}

TEST(DefaultModels, RaceAndFindingRates)
{
    const auto models = default_disease_models();
    const std::array<double, 5> armd{0.39, 0.01, 0.5, 0.05, 0.05};
    const std::array<double, 5> cscr{0.33, 0.05, 0.32, 0.25, 0.05};
    const std::array<double, 5> pcv{0.4, 0.3, 0.10, 0.18, 0.02};
    EXPECT_EQ(model_for(models, Disease::ExudativeArmd).race_probs, armd);
    EXPECT_EQ(model_for(models, Disease::Cscr).race_probs, cscr);
    EXPECT_EQ(model_for(models, Disease::Pcv).race_probs, pcv);
    EXPECT_EQ(model_for(models, Disease::Pcv).p_drusen, 0.28);
    EXPECT_EQ(model_for(models, Disease::Cscr).p_drusen, 0.10);
    EXPECT_EQ(model_for(models, Disease::Pcv).p_polyps, 1.0);
    EXPECT_EQ(model_for(models, Disease::Cscr).p_male, 0.80);
    EXPECT_EQ(model_for(models, Disease::Pcv).p_male, 0.5);
    EXPECT_EQ(model_for(models, Disease::ExudativeArmd).p_male, 0.5);
    for (const auto& m : models) {
        EXPECT_NO_THROW(m.validate());
    }
}

TEST(DiseaseModel, ValidateRejectsBadParameters)
{
    auto m = default_disease_models()[0];
    auto bad = m;
    bad.race_probs[0] += 0.01;
    EXPECT_THROW(bad.validate(), InvalidModelError);
    bad = m;
    bad.p_srh = 1.5;
    EXPECT_THROW(bad.validate(), InvalidModelError);
    bad = m;
    bad.age_var = -1.0;
    EXPECT_THROW(bad.validate(), InvalidModelError);
    bad = m;
    bad.age_mean = 0.0;
    EXPECT_THROW(bad.validate(), InvalidModelError);
}

TEST(SampleAge, ZeroVarianceIsExact)
{
    DiseaseModel m = default_disease_models()[0];
    m.age_var = 0.0;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_age(m, rng), m.age_mean);
    }
}

TEST(SampleAge, NegativeVarianceRejected)
{
    DiseaseModel m = default_disease_models()[0];
    m.age_var = -2.0;
    Rng rng(5);
    EXPECT_THROW(sample_age(m, rng), InvalidModelError);
}

TEST(SampleAge, CscrMeanWithinThreeStandardErrors)
{
    const auto m = model_for(default_disease_models(), Disease::Cscr);
    Rng rng(2024);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += sample_age(m, rng);
    }
    EXPECT_LT(std::abs(sum / n - 39.0), 3.0 * std::sqrt(60.0 / n));
}

TEST(SampleAge, AlwaysPositiveEvenWithHeavyTruncation)
{
    DiseaseModel m = model_for(default_disease_models(), Disease::ExudativeArmd);
    Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
        ASSERT_GT(sample_age(m, rng), 0.0);
    }
    // Mean one SD above zero: about 16% of raw draws are rejected.
    m.age_mean = 2.0;
    m.age_var = 4.0;
    for (int i = 0; i < 10000; ++i) {
        ASSERT_GT(sample_age(m, rng), 0.0);
    }
}

TEST(Categorical, PointMass)
{
    const std::array<double, 5> probs{1, 0, 0, 0, 0};
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample_categorical(probs, rng), 0u);
    }
}

TEST(Categorical, InverseCdfThresholds)
{
    const std::array<double, 2> half{0.5, 0.5};
    EXPECT_EQ(categorical_index(half, 0.7), 1u);
    EXPECT_EQ(categorical_index(half, 0.0), 0u);
    // Half-open intervals: the boundary belongs to the upper bin.
    EXPECT_EQ(categorical_index(half, 0.5), 1u);
    EXPECT_EQ(categorical_index(half, 0.4999999), 0u);
    const std::array<double, 3> gap{0.5, 0.0, 0.5};
    EXPECT_EQ(categorical_index(gap, 0.5), 2u);
    EXPECT_EQ(categorical_index(gap, 0.9999999999999999), 2u);
}

TEST(Categorical, RejectsUnnormalized)
{
    const std::array<double, 2> bad{0.5, 0.6};
    Rng rng(1);
    EXPECT_THROW(sample_categorical(bad, rng), InvalidModelError);
    const std::array<double, 2> negative{1.5, -0.5};
    EXPECT_THROW(sample_categorical(negative, rng), InvalidModelError);
}

TEST(Categorical, ArmdRaceFrequencies)
{
    const auto m = model_for(default_disease_models(), Disease::ExudativeArmd);
    Rng rng(77);
    const int n = 100000;
    std::array<int, 5> counts{};
    for (int i = 0; i < n; ++i) {
        ++counts[sample_categorical(m.race_probs, rng)];
    }
    for (std::size_t r = 0; r < 5; ++r) {
        const double p = m.race_probs[r];
        EXPECT_LT(std::abs(counts[r] / double(n) - p), 3.0 * binomial_sd(p, n)) << "race " << r;
    }
}

TEST(SamplePvec, DegenerateModel)
{
    DiseaseModel m;
    m.age_mean = 50.0;
    m.age_var = 0.0;
    m.race_probs = {0, 0, 1, 0, 0};
    m.p_polyps = m.p_drusen = m.p_srh = m.p_male = 1.0;
    Rng rng(1);
    const PVec p = sample_pvec(Disease::Cscr, m, rng);
    EXPECT_EQ(p.age, 50.0);
    EXPECT_EQ(p.race, Race::Caucasian);
    EXPECT_TRUE(p.polyps && p.drusen && p.srh && p.male);
    EXPECT_EQ(p.disease, Disease::Cscr);
}

TEST(SamplePvec, PcvAlwaysHasPolyps)
{
    const auto m = model_for(default_disease_models(), Disease::Pcv);
    Rng rng(4);
    for (int i = 0; i < 5000; ++i) {
        ASSERT_TRUE(sample_pvec(Disease::Pcv, m, rng).polyps);
    }
}

TEST(SamplePvec, CscrMaleFraction)
{
    const auto m = model_for(default_disease_models(), Disease::Cscr);
    Rng rng(8);
    const int n = 10000;
    int male = 0;
    for (int i = 0; i < n; ++i) {
        male += sample_pvec(Disease::Cscr, m, rng).male;
    }
    EXPECT_LT(std::abs(male / double(n) - 0.8), 3.0 * binomial_sd(0.8, n));
}

TEST(SamplePvec, InvalidModelPropagates)
{
    DiseaseModel m = default_disease_models()[0];
    m.p_male = -0.1;
    Rng rng(1);
    EXPECT_THROW(sample_pvec(Disease::Cscr, m, rng), InvalidModelError);
}

// Every Bernoulli and categorical frequency of every default model, N = 1e4.
TEST(GenerateCohort, FrequenciesWithinThreeSigma)
{
    const auto models = default_disease_models();
    const std::size_t n = 10000;
    const Cohort cohort = generate_cohort(models, n, 123);
    for (Disease d : kAllDiseases) {
        const auto& m = model_for(models, d);
        std::array<double, 5> race{};
        double polyps = 0, drusen = 0, srh = 0, male = 0;
        for (const auto& p : cohort.records) {
            if (p.disease != d) {
                continue;
            }
            race[static_cast<std::size_t>(p.race)] += 1;
            polyps += p.polyps;
            drusen += p.drusen;
            srh += p.srh;
            male += p.male;
        }
        const double nn = static_cast<double>(n);
        for (std::size_t r = 0; r < 5; ++r) {
            EXPECT_LE(std::abs(race[r] / nn - m.race_probs[r]), 3.0 * binomial_sd(m.race_probs[r], nn));
        }
        EXPECT_LE(std::abs(polyps / nn - m.p_polyps), 3.0 * binomial_sd(m.p_polyps, nn));
        EXPECT_LE(std::abs(drusen / nn - m.p_drusen), 3.0 * binomial_sd(m.p_drusen, nn));
        EXPECT_LE(std::abs(srh / nn - m.p_srh), 3.0 * binomial_sd(m.p_srh, nn));
        EXPECT_LE(std::abs(male / nn - m.p_male), 3.0 * binomial_sd(m.p_male, nn));
    }
}

TEST(GenerateCohort, CountsAndOrder)
{
    const Cohort cohort = generate_cohort(default_disease_models(), 1000, 1);
    ASSERT_EQ(cohort.records.size(), 3000u);
    for (std::size_t i = 0; i < cohort.records.size(); ++i) {
        EXPECT_EQ(cohort.records[i].id, i);
        EXPECT_EQ(cohort.records[i].disease, kAllDiseases[i / 1000]);
        EXPECT_GT(cohort.records[i].age, 0.0);
    }
    EXPECT_EQ(generate_cohort(default_disease_models(), 1, 1).records.size(), 3u);
}

TEST(GenerateCohort, EmptyRejected)
{
    EXPECT_THROW(generate_cohort(default_disease_models(), 0, 1), ConfigError);
}

TEST(GenerateCohort, DeterministicBytes)
{
    const auto a = cohort_to_csv(generate_cohort(default_disease_models(), 200, 99));
    const auto b = cohort_to_csv(generate_cohort(default_disease_models(), 200, 99));
    const auto c = cohort_to_csv(generate_cohort(default_disease_models(), 200, 100));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Features, Corners)
{
    PVec low;
    low.race = Race::Asian;
    low.age = 1e-9;
    const auto lx = encode_features(low);
    EXPECT_EQ(lx[0], 0.0);
    EXPECT_NEAR(lx[1], 0.0, 1e-10);
    for (int d = 2; d < 6; ++d) {
        EXPECT_EQ(lx[d], 0.0);
    }

    PVec high;
    high.race = Race::Other;
    high.age = 110.0;
    high.polyps = high.drusen = high.srh = high.male = true;
    const FeatureVec hx = encode_features(high);
    for (double v : hx) {
        EXPECT_EQ(v, 1.0);
    }

    PVec mid;
    mid.race = Race::Caucasian;
    mid.age = 55.0;
    mid.drusen = true;
    const FeatureVec expected{0.5, 0.5, 0, 1, 0, 0};
    EXPECT_EQ(encode_features(mid), expected);
}

TEST(Features, AgeClippedAtCap)
{
    PVec p;
    p.age = 150.0;
    EXPECT_EQ(encode_features(p)[1], 1.0);
    EXPECT_EQ(encode_features(p, 200.0)[1], 0.75);
}

TEST(Features, DecodeRules)
{
    FeatureVec x{0.3, 0.5, 0.5, 0.49, 0, 1};
    const PVec p = decode_features(x);
    EXPECT_EQ(p.race, Race::Black);
    EXPECT_DOUBLE_EQ(p.age, 55.0);
    EXPECT_TRUE(p.polyps);
    EXPECT_FALSE(p.drusen);
    EXPECT_FALSE(p.srh);
    EXPECT_TRUE(p.male);
    // Exact midpoint between 0.25 and 0.5 rounds down.
    x[0] = 0.375;
    EXPECT_EQ(decode_features(x).race, Race::Black);
    x[0] = 0.376;
    EXPECT_EQ(decode_features(x).race, Race::Caucasian);
}

TEST(Features, DecodeRejectsOutOfRange)
{
    FeatureVec x{0, 0.5, 0, 0, 0, 1.2};
    EXPECT_THROW(decode_features(x), CodecError);
    x[5] = -0.1;
    EXPECT_THROW(decode_features(x), CodecError);
}

// Property: encode lands in [0,1]^6 and decode inverts it on generated records.
TEST(Features, RoundTripProperty)
{
    const Cohort cohort = generate_cohort(default_disease_models(), 2000, 31);
    for (const auto& p : cohort.records) {
        const FeatureVec x = encode_features(p);
        for (double v : x) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
        ASSERT_TRUE(x[0] == 0.0 || x[0] == 0.25 || x[0] == 0.5 || x[0] == 0.75 || x[0] == 1.0);
        const PVec back = decode_features(x);
        ASSERT_EQ(back.race, p.race);
        ASSERT_EQ(back.polyps, p.polyps);
        ASSERT_EQ(back.drusen, p.drusen);
        ASSERT_EQ(back.srh, p.srh);
        ASSERT_EQ(back.male, p.male);
        if (p.age <= kDefaultAgeCap) {
            ASSERT_NEAR(back.age, p.age, 1e-9);
        }
    }
}

TEST(CohortCsv, RoundTrip)
{
    const Cohort cohort = generate_cohort(default_disease_models(), 1, 5);
    const auto csv = cohort_to_csv(cohort);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,disease,race,age,polyps,drusen,srh,sex");
    const Cohort back = cohort_from_csv(csv);
    EXPECT_EQ(back.records, cohort.records);
    EXPECT_EQ(back.per_disease_count, 1u);

    const auto path = std::filesystem::temp_directory_path() / "maculavae_cohort_rt.csv";
    write_cohort(path, generate_cohort(default_disease_models(), 300, 6));
    EXPECT_EQ(read_cohort(path).records, generate_cohort(default_disease_models(), 300, 6).records);
    std::filesystem::remove(path);
}

TEST(CohortCsv, HeaderOnlyIsEmpty)
{
    const Cohort c = cohort_from_csv("id,disease,race,age,polyps,drusen,srh,sex\n");
    EXPECT_TRUE(c.records.empty());
}

TEST(CohortCsv, BadRaceCodeNamesLine)
{
    const std::string csv =
        "id,disease,race,age,polyps,drusen,srh,sex\n"
        "0,ARMD,ASIAN,70.5,0,1,0,1\n"
        "1,PCV,7,61.25,1,0,0,0\n";
    try {
        cohort_from_csv(csv);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(CohortCsv, MalformedRows)
{
    const std::string header = "id,disease,race,age,polyps,drusen,srh,sex\n";
    EXPECT_THROW(cohort_from_csv(header + "0,ARMD,ASIAN,70,0,1,0\n"), ParseError);
    EXPECT_THROW(cohort_from_csv(header + "0,XYZ,ASIAN,70,0,1,0,1\n"), ParseError);
    EXPECT_THROW(cohort_from_csv(header + "0,ARMD,ASIAN,abc,0,1,0,1\n"), ParseError);
    EXPECT_THROW(cohort_from_csv(header + "0,ARMD,ASIAN,-3,0,1,0,1\n"), ParseError);
    EXPECT_THROW(cohort_from_csv(header + "0,ARMD,ASIAN,70,2,1,0,1\n"), ParseError);
    EXPECT_THROW(cohort_from_csv("id,race\n"), ParseError);
}

} // namespace
} // namespace maculavae
