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
#include <random>

#include "test_support.hpp"
#include "tbswitch/dense_oracle.hpp"
#include "tbswitch/elements.hpp"
#include "tbswitch/qubits.hpp"
#include "tbswitch/source.hpp"

namespace tbswitch {
namespace {

constexpr double kPi = std::numbers::pi;
const Limits kLim{4, 3};

PureState one(Port p, int bin) { return PureState::basis(photon(p, bin), kLim); }

PureState two(Port p, int bp, Port q, int bq) {
    return PureState::basis(photons(p, bp, q, bq), kLim);
}

OccupationVector pair_same_mode(Port p, int bin) {
    return OccupationVector{{{p, bin}, 2}};
}

PureState entangle(const PureState &s) {
    return apply_switch(s, SwitchSchedule::entangler().made_ideal(), {Port::A, Port::B},
                        {Port::C, Port::D});
}

TEST(Switch, EntanglerExchangesFirstSlotAndPassesSecond) {
    const PureState first = entangle(one(Port::A, 1));
    EXPECT_NEAR(first.amplitude(photon(Port::D, 1)).real(), -1.0, 1e-15);
    const PureState second = entangle(one(Port::A, 2));
    EXPECT_NEAR(second.amplitude(photon(Port::C, 2)).real(), 1.0, 1e-15);
}

TEST(Switch, BalancedSettingBunchesCoincidentPhotons) {
    const SwitchSchedule bs = SwitchSchedule::beamsplitter().made_ideal();
    const PureState out =
        apply_switch(two(Port::A, 1, Port::B, 1), bs, {Port::A, Port::B}, {Port::C, Port::D});
    const double h = 1.0 / std::numbers::sqrt2;
    EXPECT_NEAR(out.amplitude(pair_same_mode(Port::C, 1)).real(), h, 1e-14);
    EXPECT_NEAR(out.amplitude(pair_same_mode(Port::D, 1)).real(), -h, 1e-14);
    EXPECT_NEAR(std::abs(out.amplitude(photons(Port::C, 1, Port::D, 1))), 0.0, 1e-15);
}

TEST(Switch, BalancedSettingMatchesDenseOracle) {
    const PureState in = two(Port::C, 1, Port::D, 1);
    const SwitchSchedule bs = SwitchSchedule::beamsplitter().made_ideal();
    const PureState sparse = apply_switch(in, bs, {Port::C, Port::D}, {Port::C, Port::D});
    const PureState dense = dense_oracle_apply(in, {Port::C, 1}, {Port::D, 1},
                                               Mat2::rotation(kPi / 2));
    EXPECT_LT(max_abs_difference(sparse, dense), 1e-10);
}

TEST(Switch, FiniteExtinctionLeaksTheConfiguredPower) {
    SwitchSchedule s = SwitchSchedule::entangler();
    s.extinction_db = 20.0;
    for (double sign : {1.0, -1.0}) {
        s.bias_sign = sign;
        const PureState out =
            apply_switch(one(Port::A, 1), s, {Port::A, Port::B}, {Port::C, Port::D});
        EXPECT_NEAR(std::norm(out.amplitude(photon(Port::C, 1))), 0.01, 1e-12);
        const PureState bar =
            apply_switch(one(Port::A, 2), s, {Port::A, Port::B}, {Port::C, Port::D});
        EXPECT_NEAR(std::norm(bar.amplitude(photon(Port::D, 2))), 0.01, 1e-12);
    }
}

TEST(Switch, IntermediateSettingsIgnoreExtinction) {
    SwitchSchedule s = SwitchSchedule::beamsplitter();
    s.extinction_db = 20.0;
    EXPECT_DOUBLE_EQ(s.effective_theta(1), kPi / 2);
}

TEST(Switch, BiasEnsembleHasTwoOppositeRealizations) {
    SwitchSchedule s = SwitchSchedule::entangler();
    s.model = ExtinctionModel::bias_ensemble;
    const auto r = s.realizations();
    ASSERT_EQ(r.size(), 2U);
    EXPECT_DOUBLE_EQ(r[0].first + r[1].first, 1.0);
    EXPECT_NEAR(r[0].second.effective_theta(2), -r[1].second.effective_theta(2), 1e-15);
    EXPECT_EQ(s.made_ideal().realizations().size(), 1U);
}

TEST(Switch, IdealIsUnitaryAndZeroPhaseIsIdentity) {
    std::mt19937_64 rng(3);
    SwitchSchedule s;
    s.theta = {{1, 0.7}, {2, 2.1}, {3, -0.4}};
    s = s.made_ideal();
    SwitchSchedule zero;
    zero.theta = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    zero = zero.made_ideal();
    for (int trial = 0; trial < 20; ++trial) {
        // Random states over A/B modes only.
        PureState in(kLim);
        std::normal_distribution<double> g;
        for (int t = 0; t < 4; ++t) {
            OccupationVector o;
            o.add({Port::A, 1 + t % 3}, t % 2 + 1);
            o.add({Port::B, 1 + (t + 1) % 3}, 1);
            in.add(o, Complex{g(rng), g(rng)});
        }
        in = in.scaled(1.0 / std::sqrt(in.norm2()));
        const PureState out = apply_switch(in, s, {Port::A, Port::B}, {Port::C, Port::D});
        EXPECT_NEAR(out.norm2(), 1.0, 1e-12);
        const PureState same = apply_switch(in, zero, {Port::A, Port::B}, {Port::A, Port::B});
        EXPECT_LT(max_abs_difference(same, in), 1e-15);
    }
}

TEST(Switch, RejectsOccupiedOutputsAndUnknownBins) {
    PureState s = tensor(one(Port::A, 1), one(Port::C, 1));
    EXPECT_THROW(apply_switch(s, SwitchSchedule::entangler(), {Port::A, Port::B},
                              {Port::C, Port::D}),
                 Error);
    SwitchSchedule strict = SwitchSchedule::entangler();
    strict.missing_bins_are_identity = false;
    try {
        apply_switch(one(Port::A, 3), strict, {Port::A, Port::B}, {Port::C, Port::D});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownTimeBin);
    }
}

TEST(Switch, ExpandsTheProductOfTwoQubits) {
    const double pa = 0.37, pb = 1.91;
    PureState in = two(Port::A, 1, Port::B, 1);
    in = prepare_timebin_qubit(in, Port::A, pa);
    in = prepare_timebin_qubit(in, Port::B, pb);
    const PureState out = entangle(in);
    const Complex ea = std::polar(1.0, pa), eb = std::polar(1.0, pb);
    PureState expected(kLim);
    expected.add(photons(Port::C, 1, Port::D, 1), -0.5);
    expected.add(photons(Port::D, 1, Port::D, 2), -0.5 * eb);
    expected.add(photons(Port::C, 1, Port::C, 2), 0.5 * ea);
    expected.add(photons(Port::C, 2, Port::D, 2), 0.5 * ea * eb);
    EXPECT_LT(max_abs_difference(out, expected), 1e-12);
}

TEST(DelayInterferometer, PreparationGivesNormalizedQubit) {
    const double phi = 0.8;
    const PureState q = prepare_timebin_qubit(one(Port::A, 1), Port::A, phi);
    const double h = 1.0 / std::numbers::sqrt2;
    EXPECT_NEAR(std::abs(q.amplitude(photon(Port::A, 1)) - h), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(q.amplitude(photon(Port::A, 2)) - h * std::polar(1.0, phi)), 0.0,
                1e-15);
    EXPECT_NEAR(q.norm2(), 1.0, 1e-15);
    try {
        prepare_timebin_qubit(one(Port::A, 2), Port::A, 0.0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::TimeBinOverflow);
    }
}

TEST(DelayInterferometer, AnalysisHalvesWeightPerPhoton) {
    const PureState out = apply_delay_interferometer(
        one(Port::C, 1), {0.0, Port::C, InterferometerRole::analysis, std::nullopt});
    EXPECT_NEAR(out.amplitude(photon(Port::C, 1)).real(), 0.5, 1e-15);
    EXPECT_NEAR(out.amplitude(photon(Port::C, 2)).real(), 0.5, 1e-15);
    EXPECT_NEAR(out.norm2(), 0.5, 1e-15);

    const PureState two_in = PureState::basis(OccupationVector{{{Port::C, 1}, 2}}, kLim);
    const PureState two_out = apply_delay_interferometer(
        two_in, {1.3, Port::C, InterferometerRole::analysis, std::nullopt});
    EXPECT_NEAR(two_out.norm2(), 0.25, 1e-14);
}

// Direct substitution a_t -> (a_t + e a_{t+1})/2 on C and
// (a_t - e a_{t+1})/2 on the exit, independent of the split/delay/recombine
// decomposition used by the library.
PureState analysis_by_substitution(const PureState &s, double phase, Port exit) {
    const Complex e = std::polar(1.0, phase);
    return apply_creation_map(s, [&](const ModeLabel &m) -> std::optional<CreationImage> {
        if (m.port != Port::C) {
            return std::nullopt;
        }
        return CreationImage{{m, 0.5},
                             {{m.port, m.time_bin + 1, m.branch}, 0.5 * e},
                             {{exit, m.time_bin, m.branch}, 0.5},
                             {{exit, m.time_bin + 1, m.branch}, -0.5 * e}};
    });
}

TEST(DelayInterferometer, DecompositionMatchesDirectSubstitution) {
    const Port exit = ancilla_port(0);
    PureState in(kLim);
    in.add(OccupationVector{{{Port::C, 1}, 2}}, 0.6);
    in.add(photons(Port::C, 1, Port::C, 2), Complex{0.0, 0.48});
    in.add(photons(Port::C, 2, Port::D, 1), 0.64);
    for (double phase : {0.0, 0.9, kPi, 4.0}) {
        const PureState lib = apply_delay_interferometer(
            in, {phase, Port::C, InterferometerRole::analysis, exit});
        EXPECT_LT(max_abs_difference(lib, analysis_by_substitution(in, phase, exit)), 1e-12);
        EXPECT_NEAR(lib.norm2(), in.norm2(), 1e-12);
    }
}

TEST(DelayInterferometer, ReproducesThreeSlotCoincidencePattern) {
    const double pa = 0.4, pb = 1.2, pc = 2.3, pd = -0.7;
    PureState eq4(kLim);
    const double h = 1.0 / std::numbers::sqrt2;
    eq4.add(photons(Port::C, 1, Port::D, 1), -h);
    eq4.add(photons(Port::C, 2, Port::D, 2), h * std::polar(1.0, pa + pb));
    PureState out = apply_delay_interferometer(
        eq4, {pc, Port::C, InterferometerRole::analysis, std::nullopt});
    out = apply_delay_interferometer(out,
                                     {pd, Port::D, InterferometerRole::analysis, std::nullopt});
    const Complex k = 0.25 * h;
    const Complex t1 = out.amplitude(photons(Port::C, 1, Port::D, 1)) / k;
    const Complex t2 = out.amplitude(photons(Port::C, 2, Port::D, 2)) / k;
    const Complex t3 = out.amplitude(photons(Port::C, 3, Port::D, 3)) / k;
    EXPECT_LT(std::abs(t1 - Complex{-1.0}), 1e-12);
    EXPECT_LT(std::abs(t2 - (std::polar(1.0, pa + pb) - std::polar(1.0, pc + pd))), 1e-12);
    EXPECT_LT(std::abs(t3 - std::polar(1.0, pa + pb + pc + pd)), 1e-12);
}

TEST(DelayInterferometer, RejectsPhotonsThatWouldLeaveTheWindow) {
    try {
        apply_delay_interferometer(one(Port::C, 3),
                                   {0.0, Port::C, InterferometerRole::analysis, std::nullopt});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::TimeBinOverflow);
    }
}

TEST(Attenuator, CouplesToAFreshAncilla) {
    EXPECT_LT(max_abs_difference(attenuator(one(Port::C, 2), Port::C, 2, 1.0), one(Port::C, 2)),
              1e-15);
    const PureState gone = attenuator(one(Port::C, 2), Port::C, 2, 0.0);
    EXPECT_NEAR(std::norm(gone.amplitude(photon(ancilla_port(0), 2))), 1.0, 1e-15);

    const PureState third = attenuator(one(Port::C, 2), Port::C, 2, 1.0 / std::sqrt(3.0));
    EXPECT_NEAR(third.amplitude(photon(Port::C, 2)).real(), 1.0 / std::sqrt(3.0), 1e-15);
    const Projection kept = project(third, [](const OccupationVector &o) {
        return o.at_port(ancilla_port(0)) == 0;
    });
    EXPECT_NEAR(kept.probability, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(third.norm2(), 1.0, 1e-15);
    EXPECT_THROW(attenuator(one(Port::C, 2), Port::C, 2, 1.5), Error);
}

TEST(PhaseShifter, MultipliesEachPhoton) {
    const PureState out = phase_shifter(two(Port::C, 1, Port::C, 2), Port::C, 0.5);
    EXPECT_LT(std::abs(out.amplitude(photons(Port::C, 1, Port::C, 2)) - std::polar(1.0, 1.0)),
              1e-15);
}

} // namespace
} // namespace tbswitch
