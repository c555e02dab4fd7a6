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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tbswitch/experiments.hpp"
#include "tbswitch/qubits.hpp"

namespace tbswitch {
namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig ideal_config() {
    ExperimentConfig c;
    c.ideal = true;
    c.pulses = 0;
    return c;
}

PureState entangled_target(double pa, double pb) {
    const double h = 1.0 / std::numbers::sqrt2;
    PureState t(Limits{4, 3});
    t.add(photons(Port::C, 1, Port::D, 1), -h);
    t.add(photons(Port::C, 2, Port::D, 2), h * std::polar(1.0, pa + pb));
    return t;
}

std::vector<double> twelve_phases() {
    std::vector<double> v;
    for (int i = 0; i < 12; ++i) {
        v.push_back(2.0 * kPi * i / 12.0);
    }
    return v;
}

TEST(Entangler, IdealOutputIsTheMaximallyEntangledPair) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        ExperimentConfig c = ideal_config();
        c.phases.alice = phase(rng);
        c.phases.bob = phase(rng);
        const Projection p = run_entangler(c);
        EXPECT_NEAR(p.probability, 0.5, 1e-12);
        EXPECT_NEAR(fidelity(p.state, entangled_target(c.phases.alice, c.phases.bob)), 1.0, 1e-12);
        const auto amps = two_qubit_amplitudes(p.state, Port::C, Port::D);
        EXPECT_NEAR(concurrence(amps), 1.0, 1e-12);
        const auto schmidt = schmidt_coefficients(amps);
        EXPECT_NEAR(schmidt[0], 1.0 / std::numbers::sqrt2, 1e-7);
        EXPECT_NEAR(schmidt[1], 1.0 / std::numbers::sqrt2, 1e-7);
    }
}

TEST(Entangler, MixedScheduleNeedsEnsembleHandling) {
    ExperimentConfig c;
    c.schedule.model = ExtinctionModel::bias_ensemble;
    c.ideal = true;
    EXPECT_EQ(propagate(c, AnalysisStage::removed).states.size(), 1U);
    c.ideal = false;
    EXPECT_GT(propagate(c, AnalysisStage::removed).states.size(), 2U);
    EXPECT_THROW(run_entangler(c), Error);
}

TEST(AnalyticCoincidence, CosineLaw) {
    EXPECT_NEAR(analytic_coincidence({}, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(analytic_coincidence({kPi, 0, 0, 0}, 1.0), 2.0, 1e-15);
    EXPECT_NEAR(analytic_coincidence({0.3, 1.0, 2.0, 0.1}, 0.0), 1.0, 1e-15);
    EXPECT_THROW(analytic_coincidence({}, 1.5), Error);
}

TEST(WernerWitness, StrictThreshold) {
    EXPECT_TRUE(werner_witness(0.528));
    EXPECT_FALSE(werner_witness(1.0 / 3.0));
    EXPECT_FALSE(werner_witness(0.0));
    EXPECT_THROW(werner_witness(1.2), Error);
}

TEST(Fringe, IdealCoincidenceFollowsTotalPhase) {
    // Fit c in p = c (1 - cos(total)) over a 16-point grid, then check the
    // residual and the dependence on the phase sum alone.
    std::vector<std::pair<Phases, double>> samples;
    for (int i = 0; i < 16; ++i) {
        Phases ph{0.1 * i, 0.37 * i - 1.0, 0.05 * i * i, -0.2 * i};
        ExperimentConfig c = ideal_config();
        c.phases = ph;
        c.charlie.gate_bin = c.david.gate_bin = 2;
        const OpticalRun run = propagate(c, AnalysisStage::inserted);
        samples.push_back(
            {ph, click_probabilities(run.states, run.detectors, run.budget).coincidence()});
    }
    double num = 0.0, den = 0.0;
    for (const auto &[ph, p] : samples) {
        const double g = analytic_coincidence(ph, 1.0);
        num += g * p;
        den += g * g;
    }
    const double c = num / den;
    // Post-selection 1/2 times 1/16 from the two analysis interferometers.
    EXPECT_NEAR(c, 1.0 / 32.0, 1e-12);
    for (const auto &[ph, p] : samples) {
        EXPECT_NEAR(p, c * analytic_coincidence(ph, 1.0), 1e-9);
    }

    ExperimentConfig a = ideal_config(), b = ideal_config();
    a.phases = {0.4, 0.9, 0.2, 0.3};
    b.phases = {1.1, 0.2, -0.1, 0.6}; // same total
    const auto prob = [](const ExperimentConfig &cfg) {
        const OpticalRun run = propagate(cfg, AnalysisStage::inserted);
        return click_probabilities(run.states, run.detectors, run.budget)
            .coincidence();
    };
    EXPECT_NEAR(prob(a), prob(b), 1e-12);
}

TEST(Fringe, IdealScanHasUnitVisibilityAndFlatSingles) {
    ExperimentConfig c = ideal_config();
    const ScanResult exact = fringe_scan(twelve_phases(), 0.0, c);
    EXPECT_NEAR(summarize_fringe(exact).analytic.visibility, 1.0, 1e-6);
    for (const auto &p : exact.points) {
        EXPECT_NEAR(p.analytic_singles_c, exact.points.front().analytic_singles_c, 1e-12);
    }

    c.pulses = 200'000;
    const ScanResult sampled = fringe_scan(twelve_phases(), 0.0, c);
    const FringeSummary s = summarize_fringe(sampled);
    EXPECT_LT(std::abs(s.raw.visibility - 1.0), 4.0 * s.raw.visibility_stderr + 1e-3);
    EXPECT_LT(s.singles.visibility, 4.0 * s.singles.visibility_stderr);
}

TEST(Fringe, DistinguishablePhotonsGiveNoFringe) {
    ExperimentConfig c = ideal_config();
    c.delay_ps = 1000.0;
    const ScanResult scan = fringe_scan(twelve_phases(), 0.0, c);
    EXPECT_NEAR(summarize_fringe(scan).analytic.visibility, 0.0, 1e-9);
}

TEST(Fringe, NoisySubtractedVisibilityIsAtLeastRaw) {
    ExperimentConfig c;
    c.pulses = 2'000'000;
    c.workers = 2;
    for (double david : {0.0, kPi / 2}) {
        const FringeSummary s = summarize_fringe(fringe_scan(twelve_phases(), david, c));
        EXPECT_GE(s.subtracted.visibility, s.raw.visibility);
    }
}

TEST(Fringe, SubtractedCountsNeverNegative) {
    ExperimentConfig c = ideal_config();
    c.pulses = 100'000;
    for (const auto &p : fringe_scan(twelve_phases(), 0.0, c).points) {
        EXPECT_GE(subtracted_coincidences(p.counts), 0.0);
        EXPECT_LE(subtracted_coincidences(p.counts), static_cast<double>(p.counts.coincidences));
    }
}

TEST(Hom, IdealNullAndDistinguishablePlateau) {
    ExperimentConfig c = ideal_config();
    const ScanResult scan = hom_scan({-1000.0, 0.0, 1000.0}, c);
    EXPECT_NEAR(scan.points[1].analytic_coincidence, 0.0, 1e-12);
    // Both photons in t1 (1/4), then split classically (1/2).
    EXPECT_NEAR(scan.points[0].analytic_coincidence, 0.125, 1e-10);
    EXPECT_NEAR(scan.points[2].analytic_coincidence, 0.125, 1e-10);
    EXPECT_NEAR(fit_dip(hom_scan({-300, -60, -20, 0, 20, 60, 300}, c), 60.0, true).visibility,
                1.0, 1e-9);
}

TEST(Hom, DipDepthShrinksWithDelay) {
    ExperimentConfig c;
    c.pulses = 0;
    const ScanResult scan = hom_scan({0.0, 20.0, 40.0, 80.0, 400.0}, c);
    const double plateau = scan.points.back().analytic_coincidence;
    double last = 2.0;
    for (const auto &p : scan.points) {
        const double depth = (plateau - p.analytic_coincidence) / plateau;
        EXPECT_LE(depth, last + 1e-12);
        last = depth;
    }
}

TEST(Hom, VisibilityFallsWithBrightness) {
    double last = 2.0;
    for (double mu : {0.01, 0.1, 0.25}) {
        ExperimentConfig c;
        c.pulses = 0;
        c.source.mu = mu;
        const ScanResult scan = hom_scan({-300, -100, -50, -20, 0, 20, 50, 100, 300}, c);
        const double v = fit_dip(scan, 60.0, true).visibility;
        EXPECT_LT(v, last);
        last = v;
    }
}

TEST(Hom, AnalyticDipInsideExperimentalBand) {
    ExperimentConfig c;
    c.pulses = 0;
    std::vector<double> delays;
    for (int d = -300; d <= 300; d += 10) {
        delays.push_back(d);
    }
    const double v = fit_dip(hom_scan(delays, c), 60.0, true).visibility;
    EXPECT_GT(v, 0.53);
    EXPECT_LT(v, 0.80);
}

TEST(DelayScan, IdealBunchingAndAntiBunching) {
    const ExperimentConfig c = ideal_config();
    const std::vector<double> delays{-400.0, -200.0, 0.0, 200.0, 400.0};
    const DelayContrast null = delay_contrast(delay_scan(delays, 2.0 * kPi, c), 180.0, true);
    const DelayContrast peak = delay_contrast(delay_scan(delays, kPi, c), 180.0, true);
    EXPECT_NEAR(null.at_zero, 0.0, 1e-12);
    EXPECT_NEAR(peak.ratio(), 2.0, 1e-9);
    EXPECT_NEAR(null.plateau, peak.plateau, 1e-12);
}

TEST(DelayScan, TracesAreSymmetricAndMergeWhenDistinguishable) {
    ExperimentConfig c;
    c.pulses = 0;
    const std::vector<double> delays{-120.0, -40.0, 0.0, 40.0, 120.0};
    const ScanResult pi = delay_scan(delays, kPi, c);
    const ScanResult two_pi = delay_scan(delays, 2.0 * kPi, c);
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const std::size_t j = delays.size() - 1 - i;
        EXPECT_NEAR(pi.points[i].analytic_coincidence, pi.points[j].analytic_coincidence, 1e-15);
    }
    EXPECT_GT(pi.points[2].analytic_coincidence, two_pi.points[2].analytic_coincidence);

    // Far apart, the traces differ only through single-photon interference
    // of the switch leakage; with a perfect switch they merge exactly.
    const auto far_split = [](const ExperimentConfig &cfg) {
        const double a = delay_scan({1000.0}, kPi, cfg).points[0].analytic_coincidence;
        const double b = delay_scan({1000.0}, 2.0 * kPi, cfg).points[0].analytic_coincidence;
        return std::abs(a - b) / (a + b);
    };
    EXPECT_LT(far_split(c), 0.05);
    c.schedule.extinction_db = std::numeric_limits<double>::infinity();
    EXPECT_LT(far_split(c), 1e-12);
}

TEST(Scan, RequiresIncreasingSettings) {
    const ExperimentConfig c = ideal_config();
    EXPECT_THROW(hom_scan({0.0, 0.0}, c), Error);
    EXPECT_THROW(hom_scan({}, c), Error);
}

TEST(Config, IdealOverridesImperfectionsAndHashTracksChanges) {
    ExperimentConfig c;
    c.ideal = true;
    const ExperimentConfig e = c.effective();
    EXPECT_EQ(e.source.pair_truncation, 1);
    EXPECT_DOUBLE_EQ(e.charlie.efficiency, 1.0);
    EXPECT_DOUBLE_EQ(e.david.dark_prob_per_gate, 0.0);
    EXPECT_TRUE(std::isinf(e.schedule.extinction_db));
    EXPECT_DOUBLE_EQ(e.preparation_transmission, 1.0);

    ExperimentConfig a, b;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.source.mu = 0.2500001;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Scan, SampledRatesAgreeWithExactProbabilities) {
    ExperimentConfig c;
    c.pulses = 1'000'000;
    const ScanResult scan = hom_scan({0.0, 300.0}, c);
    for (const auto &p : scan.points) {
        const double n = static_cast<double>(p.counts.starts);
        const double pr = p.analytic_coincidence;
        EXPECT_LT(std::abs(p.rate - pr), 4.0 * std::sqrt(pr * (1.0 - pr) / n));
        const double ps = p.analytic_singles_c;
        EXPECT_LT(std::abs(static_cast<double>(p.counts.singles_c) / n - ps),
                  4.0 * std::sqrt(ps * (1.0 - ps) / n));
    }
}

} // namespace
} // namespace tbswitch
