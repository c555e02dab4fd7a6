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

/**
 * @file
 * End-to-end pipelines: source -> preparation interferometers -> switch ->
 * (analysis interferometers) -> gated detectors, and the three scans built
 * on top of them (HOM dip, two-photon fringes, delay scan).
 *
 * Every scan point carries both the exact click probabilities and, when
 * `pulses > 0`, a Monte-Carlo CountRecord.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "tbswitch/detection.hpp"
#include "tbswitch/elements.hpp"
#include "tbswitch/fock.hpp"
#include "tbswitch/source.hpp"

namespace tbswitch {

/// Interferometer phases of Alice, Bob (preparation) and Charlie, David
/// (analysis).
struct Phases {
    double alice = 0.0;
    double bob = 0.0;
    double charlie = 0.0;
    double david = 0.0;

    [[nodiscard]] double total() const { return alice + bob - charlie - david; }
};

struct ExperimentConfig {
    SourceConfig source;
    SwitchSchedule schedule = SwitchSchedule::entangler();
    Phases phases;
    DetectorConfig charlie{0.08, 2e-6, 2, Port::C};
    DetectorConfig david{0.08, 2e-6, 2, Port::D};
    /// Power transmission of the preparation interferometer exit that is
    /// kept (the other exit is discarded).
    double preparation_transmission = 0.5;
    /// Additional uniform loss per output arm (fibre, filters), dB.
    double extra_loss_db = 0.0;
    double delay_ps = 0.0;
    /// Largest number of surviving photons simulated per pulse.
    int photon_limit = 4;
    std::int64_t pulses = 1'000'000;
    std::uint64_t seed = 1;
    int workers = 1;
    /// Single pair, unit efficiency, no darks, perfect switch, no loss.
    bool ideal = false;

    [[nodiscard]] ExperimentConfig effective() const {
        ExperimentConfig c = *this;
        if (c.ideal) {
            c.source.pair_truncation = 1;
            c.schedule = c.schedule.made_ideal();
            for (DetectorConfig *d : {&c.charlie, &c.david}) {
                d->efficiency = 1.0;
                d->dark_prob_per_gate = 0.0;
            }
            c.preparation_transmission = 1.0;
            c.extra_loss_db = 0.0;
        }
        return c;
    }

    [[nodiscard]] std::array<DetectorConfig, 2> detectors() const {
        return {charlie, david};
    }
};

/// Canonical text form; identical configs give identical strings.
inline std::string canonical_string(const ExperimentConfig &c) {
    std::string s;
    char buf[96];
    const auto put = [&](const char *key, double v) {
        std::snprintf(buf, sizeof buf, "%s=%.17g\n", key, v);
        s += buf;
    };
    put("source.mu", c.source.mu);
    put("source.pair_truncation", c.source.pair_truncation);
    put("source.pulse_fwhm_ps", c.source.pulse_fwhm_ps);
    s += std::string("source.statistics=") +
         (c.source.statistics == PairStatistics::thermal ? "thermal" : "poissonian") +
         "\n";
    for (const auto &[bin, t] : c.schedule.theta) {
        std::snprintf(buf, sizeof buf, "switch.theta.%d=%.17g\n", bin, t);
        s += buf;
    }
    put("switch.extinction_db", c.schedule.extinction_db);
    put("switch.insertion_loss_db", c.schedule.insertion_loss_db);
    s += std::string("switch.extinction_model=") +
         (c.schedule.model == ExtinctionModel::coherent ? "coherent" : "bias_ensemble") +
         "\n";
    put("switch.bias_sign", c.schedule.bias_sign);
    put("phases.alice", c.phases.alice);
    put("phases.bob", c.phases.bob);
    put("phases.charlie", c.phases.charlie);
    put("phases.david", c.phases.david);
    put("detectors.charlie.efficiency", c.charlie.efficiency);
    put("detectors.charlie.dark", c.charlie.dark_prob_per_gate);
    put("detectors.charlie.gate_bin", c.charlie.gate_bin);
    put("detectors.david.efficiency", c.david.efficiency);
    put("detectors.david.dark", c.david.dark_prob_per_gate);
    put("detectors.david.gate_bin", c.david.gate_bin);
    put("loss.preparation_transmission", c.preparation_transmission);
    put("loss.extra_db", c.extra_loss_db);
    put("run.delay_ps", c.delay_ps);
    put("run.photon_limit", c.photon_limit);
    put("run.pulses", static_cast<double>(c.pulses));
    put("run.seed", static_cast<double>(c.seed));
    put("run.workers", c.workers);
    put("run.ideal", c.ideal ? 1.0 : 0.0);
    return s;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const ExperimentConfig &c) {
    return fnv1a(canonical_string(c));
}

/// Optical state arriving at the detectors, with the detectors that see it.
/// The loss common to both arms is already applied at the source, so
/// `detectors` carry only the residual survival of each arm and `budget` is
/// empty.
struct OpticalRun {
    Ensemble states;
    std::array<DetectorConfig, 2> detectors{};
    LossBudget budget;
    /// Source mass not simulated (photon limit and pair tail).
    double dropped = 0.0;

    /// The single pure state of a one-member run.
    [[nodiscard]] const PureState &pure() const {
        if (states.size() != 1) {
            throw Error(ErrorCode::InvalidArgument,
                        "run is a mixture of " + std::to_string(states.size()) +
                            " members");
        }
        return states.front().state;
    }
};

enum class AnalysisStage { removed, inserted };

inline constexpr Port kCharlieExit = ancilla_port(0);
inline constexpr Port kDavidExit = ancilla_port(1);

/// Per-photon transmission from the source to a click at `det`.
inline double arm_survival(const ExperimentConfig &c, const DetectorConfig &det) {
    return det.efficiency * c.preparation_transmission *
           std::pow(10.0, -(c.schedule.insertion_loss_db + c.extra_loss_db) / 10.0);
}

/// Propagates the source through the full setup described by `config`.
/// Uniform loss commutes with the passive optics, so the survival common to
/// both arms thins the source first and only surviving photons (at most
/// `photon_limit`) are propagated.
inline OpticalRun propagate(const ExperimentConfig &config, AnalysisStage analysis) {
    const ExperimentConfig c = config.effective();
    OpticalRun run;
    run.detectors = c.detectors();
    std::vector<SurvivorTerm> terms{{1, 1, 1.0}};
    int max_photons = 2;
    if (!c.ideal) {
        const double sc = arm_survival(c, c.charlie);
        const double sd = arm_survival(c, c.david);
        const double common = std::min(sc, sd);
        run.detectors[0].efficiency = common > 0.0 ? std::min(1.0, sc / common) : 0.0;
        run.detectors[1].efficiency = common > 0.0 ? std::min(1.0, sd / common) : 0.0;
        const ThinnedSource thinned = thinned_source(c.source, common, c.photon_limit);
        terms = thinned.terms;
        run.dropped = thinned.dropped;
        max_photons = c.photon_limit;
    }
    const Limits limits{std::max(2, max_photons), 3};
    const double zeta = OverlapModel{c.delay_ps, c.source.pulse_fwhm_ps}.zeta();
    const auto realizations = c.schedule.realizations();
    for (const SurvivorTerm &term : terms) {
        OccupationVector occ;
        occ.add({Port::A, 1}, term.signal);
        occ.add({Port::B, 1}, term.idler);
        PureState source = PureState::basis(occ, limits);
        source = prepare_timebin_qubit(source, Port::A, c.phases.alice);
        source = prepare_timebin_qubit(source, Port::B, c.phases.bob);
        if (zeta < 1.0) {
            source = apply_distinguishability(source, Port::B, zeta);
        }
        for (const auto &[weight, schedule] : realizations) {
            PureState state =
                apply_switch(source, schedule, {Port::A, Port::B}, {Port::C, Port::D});
            if (analysis == AnalysisStage::inserted) {
                state = apply_delay_interferometer(
                    state,
                    {c.phases.charlie, Port::C, InterferometerRole::analysis, kCharlieExit});
                state = apply_delay_interferometer(
                    state,
                    {c.phases.david, Port::D, InterferometerRole::analysis, kDavidExit});
            }
            run.states.push_back({term.weight * weight, std::move(state)});
        }
    }
    return run;
}

/// Runs the entangler (no analysis interferometers) and post-selects one or
/// more photons at each of C and D. Needs a one-member run, i.e. `ideal`.
inline Projection run_entangler(const ExperimentConfig &config) {
    const OpticalRun run = propagate(config, AnalysisStage::removed);
    return project(run.pure(), [](const OccupationVector &occ) {
        return occ.at_port(Port::C) >= 1 && occ.at_port(Port::D) >= 1;
    });
}

/// 1 - V cos(phi_A + phi_B - phi_C - phi_D).
inline double analytic_coincidence(const Phases &phases, double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "visibility outside [0, 1]");
    }
    return 1.0 - visibility * std::cos(phases.total());
}

/// Entanglement witness for Werner states: fringe visibility above 1/3.
inline bool werner_witness(double visibility) {
    if (!(visibility >= -1.0 && visibility <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "visibility outside [-1, 1]");
    }
    return visibility > 1.0 / 3.0;
}

struct ScanPoint {
    double setting = 0.0;
    CountRecord counts;             // empty when the sampled path is off
    double rate = 0.0;              // coincidences per start pulse
    double rate_stderr = 0.0;
    double analytic_coincidence = 0.0;
    double analytic_singles_c = 0.0;
    double analytic_singles_d = 0.0;
};

struct ScanResult {
    std::string variable;
    std::vector<ScanPoint> points;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] bool sampled() const {
        return !points.empty() && points.front().counts.starts > 0;
    }
};

namespace detail {

inline void require_monotone(const std::vector<double> &settings) {
    if (settings.empty()) {
        throw Error(ErrorCode::InvalidArgument, "scan needs at least one setting");
    }
    for (std::size_t i = 1; i < settings.size(); ++i) {
        if (!(settings[i] > settings[i - 1])) {
            throw Error(ErrorCode::InvalidArgument,
                        "scan settings must be strictly increasing");
        }
    }
}

inline ScanPoint evaluate_point(const ExperimentConfig &config, AnalysisStage analysis,
                                double setting, std::uint64_t point_seed) {
    const ExperimentConfig c = config.effective();
    const OpticalRun run = propagate(c, analysis);
    const ClickDistribution clicks =
        click_probabilities(run.states, run.detectors, run.budget);
    ScanPoint pt;
    pt.setting = setting;
    pt.analytic_coincidence = clicks.coincidence();
    pt.analytic_singles_c = clicks.marginal(0);
    pt.analytic_singles_d = clicks.marginal(1);
    if (c.pulses > 0) {
        pt.counts = run_monte_carlo(run.states, run.detectors, run.budget, c.pulses,
                                    point_seed, c.workers);
        const double n = static_cast<double>(pt.counts.starts);
        pt.rate = static_cast<double>(pt.counts.coincidences) / n;
        pt.rate_stderr = std::sqrt(static_cast<double>(pt.counts.coincidences)) / n;
    }
    return pt;
}

} // namespace detail

/// HOM dip: switch at theta = pi/2 in both bins, analysis interferometers
/// removed, both gates on t1.
inline ScanResult hom_scan(const std::vector<double> &delays_ps,
                          const ExperimentConfig &config) {
    detail::require_monotone(delays_ps);
    ExperimentConfig c = config;
    c.schedule = c.schedule.with_theta(SwitchSchedule::beamsplitter().theta);
    c.charlie.gate_bin = 1;
    c.david.gate_bin = 1;
    ScanResult out{"delay_ps", {}, config_hash(c), c.seed};
    for (std::size_t i = 0; i < delays_ps.size(); ++i) {
        c.delay_ps = delays_ps[i];
        out.points.push_back(detail::evaluate_point(c, AnalysisStage::removed,
                                                    delays_ps[i], derive_seed(c.seed, i)));
    }
    return out;
}

/// Coincidence fringe vs Charlie's phase at fixed David phase; gates on t2.
inline ScanResult fringe_scan(const std::vector<double> &charlie_phases,
                             double david_phase, const ExperimentConfig &config) {
    detail::require_monotone(charlie_phases);
    ExperimentConfig c = config;
    c.charlie.gate_bin = 2;
    c.david.gate_bin = 2;
    c.phases.david = david_phase;
    ScanResult out{"phi_c", {}, config_hash(c), c.seed};
    for (std::size_t i = 0; i < charlie_phases.size(); ++i) {
        c.phases.charlie = charlie_phases[i];
        out.points.push_back(detail::evaluate_point(
            c, AnalysisStage::inserted, charlie_phases[i], derive_seed(c.seed, i)));
    }
    return out;
}

/// Coincidences vs relative delay with Charlie at `charlie_phase` and David
/// at 0; gates on t2.
inline ScanResult delay_scan(const std::vector<double> &delays_ps, double charlie_phase,
                            const ExperimentConfig &config) {
    detail::require_monotone(delays_ps);
    ExperimentConfig c = config;
    c.charlie.gate_bin = 2;
    c.david.gate_bin = 2;
    c.phases.charlie = charlie_phase;
    c.phases.david = 0.0;
    ScanResult out{"delay_ps", {}, config_hash(c), c.seed};
    for (std::size_t i = 0; i < delays_ps.size(); ++i) {
        c.delay_ps = delays_ps[i];
        out.points.push_back(detail::evaluate_point(c, AnalysisStage::inserted,
                                                    delays_ps[i], derive_seed(c.seed, i)));
    }
    return out;
}

/// Dip or peak contrast of a delay trace.
struct DelayContrast {
    double plateau = 0.0;        // mean rate over |delay| >= plateau_min_delay
    double plateau_stderr = 0.0;
    double at_zero = 0.0;        // rate at the delay closest to zero
    double at_zero_stderr = 0.0;
    double minimum = 0.0;

    /// at_zero / plateau.
    [[nodiscard]] double ratio() const { return plateau > 0.0 ? at_zero / plateau : 0.0; }
    [[nodiscard]] double ratio_stderr() const {
        if (plateau <= 0.0) {
            return 0.0;
        }
        const double r = ratio();
        const double rel_a = at_zero > 0.0 ? at_zero_stderr / at_zero : 0.0;
        const double rel_p = plateau_stderr / plateau;
        return r * std::sqrt(rel_a * rel_a + rel_p * rel_p);
    }
    /// (plateau - minimum) / plateau.
    [[nodiscard]] double dip_visibility() const {
        return plateau > 0.0 ? (plateau - minimum) / plateau : 0.0;
    }
};

/// Plateau = points with |delay| >= plateau_min_delay (or the outermost
/// points when none qualify). `analytic` selects exact probabilities instead
/// of sampled rates.
inline DelayContrast delay_contrast(const ScanResult &scan, double plateau_min_delay,
                                    bool analytic) {
    if (scan.points.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty scan");
    }
    const auto value = [&](const ScanPoint &p) {
        return analytic ? p.analytic_coincidence : p.rate;
    };
    double max_abs = 0.0;
    for (const auto &p : scan.points) {
        max_abs = std::max(max_abs, std::abs(p.setting));
    }
    const double threshold = std::min(plateau_min_delay, max_abs);
    DelayContrast out;
    double sum = 0.0, var = 0.0;
    int n = 0;
    const ScanPoint *zero = &scan.points.front();
    out.minimum = value(scan.points.front());
    for (const auto &p : scan.points) {
        if (std::abs(p.setting) >= threshold) {
            sum += value(p);
            var += p.rate_stderr * p.rate_stderr;
            ++n;
        }
        if (std::abs(p.setting) < std::abs(zero->setting)) {
            zero = &p;
        }
        out.minimum = std::min(out.minimum, value(p));
    }
    out.plateau = sum / n;
    out.plateau_stderr = analytic ? 0.0 : std::sqrt(var) / n;
    out.at_zero = value(*zero);
    out.at_zero_stderr = analytic ? 0.0 : zero->rate_stderr;
    return out;
}

/// Fit of rate(delay) = plateau - depth * zeta(delay)^2, the HOM dip shape
/// for the Gaussian overlap model. Visibility = depth / plateau.
struct DipFit {
    double plateau = 0.0;
    double depth = 0.0;
    double visibility = 0.0;
    double visibility_stderr = 0.0;
};

inline DipFit fit_dip(const ScanResult &scan, double pulse_fwhm_ps, bool analytic) {
    if (scan.points.size() < 3) {
        throw Error(ErrorCode::InsufficientPoints, "dip fit needs >= 3 points");
    }
    // Weighted linear least squares in (1, g) with g = zeta^2.
    double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
    for (const auto &p : scan.points) {
        const double z = OverlapModel{p.setting, pulse_fwhm_ps}.zeta();
        const double g = z * z;
        const double y = analytic ? p.analytic_coincidence : p.rate;
        double w = 1.0;
        if (!analytic) {
            // Poisson weight from the expected rate, floored at one count.
            const double n = static_cast<double>(p.counts.starts);
            w = n / std::max(static_cast<double>(p.counts.coincidences), 1.0) * n;
        }
        s00 += w;
        s01 += w * g;
        s11 += w * g * g;
        t0 += w * y;
        t1 += w * g * y;
    }
    const double det = s00 * s11 - s01 * s01;
    if (std::abs(det) < 1e-300) {
        throw Error(ErrorCode::DegeneratePhases, "delays do not resolve the dip");
    }
    const double a = (s11 * t0 - s01 * t1) / det;
    const double b = (s01 * t0 - s00 * t1) / det; // y = a - b g
    DipFit fit{a, b, a != 0.0 ? b / a : 0.0, 0.0};
    if (!analytic && a > 0.0) {
        // Covariance of (a, -b) is (X^T W X)^{-1} for inverse-variance weights.
        const double var_a = s11 / det;
        const double var_b = s00 / det;
        const double cov_ab = s01 / det; // cov(a, b) with y = a - b g
        const double dv_da = -b / (a * a);
        const double dv_db = 1.0 / a;
        const double var = dv_da * dv_da * var_a + dv_db * dv_db * var_b +
                           2.0 * dv_da * dv_db * cov_ab;
        fit.visibility_stderr = std::sqrt(std::max(0.0, var));
    }
    return fit;
}

/// Raw and accidental-subtracted fringe fits of a fringe scan.
struct FringeSummary {
    FringeFit raw;
    FringeFit subtracted;
    FringeFit analytic;
    FringeFit singles; // modulation of Charlie's singles
};

inline FringeSummary summarize_fringe(const ScanResult &scan) {
    std::vector<FringePoint> raw, sub, exact, singles;
    for (const auto &p : scan.points) {
        exact.push_back({p.setting, p.analytic_coincidence});
        if (scan.sampled()) {
            const double c = static_cast<double>(p.counts.coincidences);
            const double var = std::max(c, 1.0);
            raw.push_back({p.setting, c, var});
            sub.push_back({p.setting, subtracted_coincidences(p.counts), var});
            const double s = static_cast<double>(p.counts.singles_c);
            singles.push_back({p.setting, s, std::max(s, 1.0)});
        }
    }
    FringeSummary out;
    out.analytic = fit_visibility(exact);
    if (scan.sampled()) {
        out.raw = fit_visibility(raw);
        out.subtracted = fit_visibility(sub);
        out.singles = fit_visibility(singles);
    }
    return out;
}

} // namespace tbswitch
