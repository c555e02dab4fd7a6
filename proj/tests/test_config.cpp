// Copyright 2026 The tbswitch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <numbers>

#include "tbswitch/config.hpp"

namespace tbswitch {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const ExperimentConfig c = parse_config("");
    EXPECT_EQ(config_hash(c), config_hash(ExperimentConfig{}));
    EXPECT_DOUBLE_EQ(c.source.mu, 0.25);
    EXPECT_DOUBLE_EQ(c.charlie.efficiency, 0.08);
    EXPECT_DOUBLE_EQ(c.schedule.extinction_db, 20.0);
    EXPECT_DOUBLE_EQ(c.schedule.insertion_loss_db, 4.0);
}

TEST(ParseConfig, ReadsAllSections) {
    const ExperimentConfig c = parse_config(R"(
# comment
[source]
mu = 0.1
pair_truncation = 3
statistics = poissonian
[switch]
extinction_db = inf
extinction_model = bias_ensemble
[detectors]
efficiency = 0.5
david_dark = 1e-5
[run]
pulses = 1e5
seed = 77
workers = 4
ideal = true
)");
    EXPECT_DOUBLE_EQ(c.source.mu, 0.1);
    EXPECT_EQ(c.source.pair_truncation, 3);
    EXPECT_EQ(c.source.statistics, PairStatistics::poissonian);
    EXPECT_TRUE(std::isinf(c.schedule.extinction_db));
    EXPECT_EQ(c.schedule.model, ExtinctionModel::bias_ensemble);
    EXPECT_DOUBLE_EQ(c.charlie.efficiency, 0.5);
    EXPECT_DOUBLE_EQ(c.david.dark_prob_per_gate, 1e-5);
    EXPECT_DOUBLE_EQ(c.charlie.dark_prob_per_gate, 2e-6);
    EXPECT_EQ(c.pulses, 100000);
    EXPECT_EQ(c.seed, 77U);
    EXPECT_EQ(c.workers, 4);
    EXPECT_TRUE(c.ideal);
}

TEST(ParseConfig, ReportsErrorsAsConfigErrors) {
    for (const char *bad : {"[nope]\n", "[source]\nmu = abc\n", "[source]\ncolour = 3\n",
                            "mu = 0.1\n", "[source]\nmu\n", "[detectors]\nefficiency = 2\n",
                            "[source]\nmu = 5\n", "[run]\nworkers = 0\n"}) {
        try {
            (void)parse_config(bad);
            ADD_FAILURE() << bad;
        } catch (const Error &e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidConfig) << bad;
        }
    }
}

TEST(ParsePhase, AcceptsMultiplesOfPi) {
    EXPECT_DOUBLE_EQ(parse_phase("0"), 0.0);
    EXPECT_DOUBLE_EQ(parse_phase("pi"), kPi);
    EXPECT_DOUBLE_EQ(parse_phase("2pi"), 2.0 * kPi);
    EXPECT_DOUBLE_EQ(parse_phase("pi/2"), kPi / 2.0);
    EXPECT_DOUBLE_EQ(parse_phase("-pi/2"), -kPi / 2.0);
    EXPECT_DOUBLE_EQ(parse_phase("3pi/4"), 0.75 * kPi);
    EXPECT_DOUBLE_EQ(parse_phase("1.5"), 1.5);
    EXPECT_THROW(parse_phase("pix"), Error);
}

TEST(ParseList, RangesAndCommaLists) {
    const auto num = [](std::string_view s) { return detail::parse_double(s); };
    const auto r = parse_list("-100:100:20", num);
    ASSERT_EQ(r.size(), 11U);
    EXPECT_DOUBLE_EQ(r.front(), -100.0);
    EXPECT_DOUBLE_EQ(r.back(), 100.0);
    EXPECT_EQ(parse_list("1, 2,3", num), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(parse_list("0:11pi/6:pi/6", parse_phase).size(), 12U);
    EXPECT_THROW(parse_list("1:2", num), Error);
    EXPECT_THROW(parse_list("2:1:1", num), Error);
}

TEST(Csv, MetadataHeaderAndRoundTripNumbers) {
    CsvTable t({"x", "y"});
    add_run_metadata(t, 0xabcULL, 9);
    t.row({format_number(0.1), format_number(std::int64_t{42})});
    t.row({format_number(-2.5e-7), format_number(0.0)});
    EXPECT_EQ(t.str(),
              "# tbswitch_version=0.1.0\n# config_hash=0000000000000abc\n# seed=9\n"
              "x,y\n0.1,42\n-2.5e-07,0\n");
    EXPECT_THROW(t.row({"1"}), Error);
}

TEST(Csv, ScanTablesFollowTheColumnSchemas) {
    ExperimentConfig c;
    c.pulses = 1000;
    const std::string hom = hom_table(hom_scan({0.0, 10.0}, c)).str();
    EXPECT_EQ(hom.substr(0, hom.find('\n')),
              "delay_ps,coincidences,singles_c,singles_d,rate,rate_stderr");
    std::vector<double> phases;
    for (int i = 0; i < 6; ++i) {
        phases.push_back(i);
    }
    const std::string fringe = fringe_table(fringe_scan(phases, 0.0, c)).str();
    EXPECT_EQ(fringe.substr(0, fringe.find('\n')),
              "phi_c,coincidences,accidentals,subtracted,singles_c");
}

} // namespace
} // namespace tbswitch
