#include <gtest/gtest.h>

#include "qmean/report_io.hpp"

using namespace qmean;

TEST(Format, TwelveSignificantDigits) {
    EXPECT_EQ(io::fmt(1.0 / 3), "0.333333333333");
    EXPECT_EQ(io::fmt(0.0), "0");
    EXPECT_EQ(io::fmt(1e-20), "1e-20");
    EXPECT_EQ(io::fmt(std::optional<double>{}), "");
    EXPECT_EQ(io::round12(2.0 / 3), 0.666666666667);
}

TEST(ErrorReportIo, CsvHeaderAndRow) {
    const auto r = worst_prob_error(Estimator::ae(8), 8, 0.81);
    const std::string csv = io::error_reports_csv({r});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "criterion,n,T,p,q,measure,value");
    EXPECT_EQ(csv.back(), '\n');
    const std::string row = csv.substr(csv.find('\n') + 1);
    EXPECT_EQ(row.rfind("worst-prob,8,8,0.81,,,", 0), 0u) << row;
}

TEST(ErrorReportIo, CountScaledTagAndJsonFields) {
    const auto r = count_scaled(avg_prob_error(Estimator::ae(8), 8, 0.81, uniform_means(8)));
    const auto j = io::to_json(r);
    EXPECT_EQ(j["criterion"], "count-avg-prob");
    EXPECT_EQ(j["measure"], "uniform-means");
    EXPECT_TRUE(j["q"].is_null());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"criterion", "estimator", "n", "T", "p", "q", "measure", "value"}));
}

TEST(SweepIo, Header) {
    SweepRow row{"ae", 64, 8, 0.81, std::nullopt, std::nullopt, 0.1, 0.125, 0.8};
    const std::string csv = io::sweep_csv({row});
    EXPECT_EQ(csv, "name,n,T,p,q,measure,value,floor,ratio\nae,64,8,0.81,,,0.1,0.125,0.8\n");
}

TEST(BoundCheckIo, JsonShape) {
    const auto j = io::to_json(lemma61_check(100, 1.0));
    EXPECT_EQ(j["name"], "lemma61");
    EXPECT_TRUE(j["holds"].get<bool>());
    EXPECT_EQ(j["params"]["n"], 100);
    EXPECT_GT(j["margin"].get<double>(), 0);
}

TEST(DistributionIo, AtomsArePairs) {
    const auto d = ae_distribution(WeightClass(4, 2), 4);
    const auto j = io::to_json(d);
    EXPECT_EQ(j["queries"], 4);
    ASSERT_EQ(j["atoms"].size(), d.atoms().size());
    EXPECT_EQ(j["atoms"][0].size(), 2u);
    const std::string csv = io::distribution_csv(d);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,k,queries,estimate,prob");
}

TEST(WitnessIo, Fields) {
    const auto j = io::to_json(min_degree_lp(PartialFnSpec(2, 2, 0), 0.0));
    EXPECT_EQ(j["degree"], 1);
    EXPECT_EQ(j["coefficients"].size(), 2u);
    EXPECT_EQ(j["coefficients"][1], 0.5);
}

TEST(MeasureIo, CsvRows) {
    const std::string csv = io::measure_csv(uniform_inputs(2));
    EXPECT_EQ(csv, "k,class_prob,per_string\n0,0.25,0.25\n1,0.5,0.25\n2,0.25,0.25\n");
}
