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
 * Optical elements as state transformers: the time-dependent 2x2 switch,
 * 1-bit delay interferometers, attenuators and phase shifters.
 */

#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "tbswitch/fock.hpp"

namespace tbswitch {

inline constexpr double kInfiniteExtinction =
    std::numeric_limits<double>::infinity();

/// How finite extinction enters the amplitudes. `coherent`: one fixed bias
/// error. `bias_ensemble`: equal mixture of +/- bias errors.
enum class ExtinctionModel { coherent, bias_ensemble };

/// Per-time-bin arm phase of the 2x2 switch plus its imperfections.
struct SwitchSchedule {
    std::map<int, double> theta;
    double extinction_db = 20.0;
    double insertion_loss_db = 4.0;
    bool missing_bins_are_identity = true;
    ExtinctionModel model = ExtinctionModel::coherent;
    double bias_sign = 1.0;

    /// theta(t1) = pi, theta(t2) = 0: exchange the first slot, pass the second.
    static SwitchSchedule entangler() { return {{{1, std::numbers::pi}, {2, 0.0}}}; }

    /// theta = pi/2 on both qubit bins: a 50/50 beamsplitter.
    static SwitchSchedule beamsplitter() {
        return {{{1, std::numbers::pi / 2}, {2, std::numbers::pi / 2}}};
    }

    [[nodiscard]] SwitchSchedule made_ideal() const {
        SwitchSchedule s = *this;
        s.extinction_db = kInfiniteExtinction;
        s.insertion_loss_db = 0.0;
        return s;
    }

    /// Same imperfections, different phases.
    [[nodiscard]] SwitchSchedule with_theta(std::map<int, double> t) const {
        SwitchSchedule s = *this;
        s.theta = std::move(t);
        return s;
    }

    void validate() const {
        if (std::isnan(extinction_db) || extinction_db < 0.0 ||
            !std::isfinite(insertion_loss_db) || insertion_loss_db < 0.0) {
            throw Error(ErrorCode::InvalidConfig,
                        "switch extinction/insertion loss must be >= 0");
        }
        for (const auto &[bin, t] : theta) {
            if (!std::isfinite(t)) {
                throw Error(ErrorCode::InvalidConfig, "non-finite switch phase");
            }
        }
    }

    [[nodiscard]] double nominal_theta(int bin) const {
        auto it = theta.find(bin);
        if (it != theta.end()) {
            return it->second;
        }
        if (!missing_bins_are_identity) {
            throw Error(ErrorCode::UnknownTimeBin,
                        "no switch phase for bin " + std::to_string(bin));
        }
        return 0.0;
    }

    /// Angle actually realized. A nominal bar (0) or cross (pi) setting is
    /// offset by a bias error bias_sign * delta with
    /// sin^2(delta/2) = 10^(-extinction_db/10), so the leaked power matches
    /// the extinction ratio. The offset has the same sign in every bin, as a
    /// drifted DC bias would produce. Other settings are taken as exact.
    [[nodiscard]] double effective_theta(int bin) const {
        const double nominal = nominal_theta(bin);
        if (!std::isfinite(extinction_db)) {
            return nominal;
        }
        const double wrapped =
            std::remainder(nominal, 2.0 * std::numbers::pi); // in [-pi, pi]
        const bool bar = std::abs(wrapped) < 1e-12;
        const bool cross = std::abs(std::abs(wrapped) - std::numbers::pi) < 1e-12;
        if (!bar && !cross) {
            return nominal;
        }
        return nominal + bias_sign * bias_offset();
    }

    /// delta such that sin^2(delta/2) equals the leaked power fraction.
    [[nodiscard]] double bias_offset() const {
        if (!std::isfinite(extinction_db)) {
            return 0.0;
        }
        const double leak = std::pow(10.0, -extinction_db / 20.0);
        return 2.0 * std::asin(std::min(1.0, leak));
    }

    /// Switch settings to average over. A coherent schedule is one
    /// realization; a bias ensemble is the equal mixture of both bias signs,
    /// which keeps the leaked power but removes its phase coherence.
    [[nodiscard]] std::vector<std::pair<double, SwitchSchedule>> realizations() const {
        if (model == ExtinctionModel::coherent || !std::isfinite(extinction_db)) {
            return {{1.0, *this}};
        }
        SwitchSchedule plus = *this, minus = *this;
        plus.model = minus.model = ExtinctionModel::coherent;
        plus.bias_sign = 1.0;
        minus.bias_sign = -1.0;
        return {{0.5, plus}, {0.5, minus}};
    }

    /// Power transmission from the insertion loss.
    [[nodiscard]] double transmission() const {
        return std::pow(10.0, -insertion_loss_db / 10.0);
    }
};

using PortPair = std::pair<Port, Port>;

/// Routes photons from `in` through the switch onto `out` (A,B -> C,D in the
/// entangler). For every time bin and distinguishability branch the pair of
/// output modes is rotated by Mat2::rotation(effective_theta(bin)). This is
/// a single realization; use SwitchSchedule::realizations() for ensembles.
/// `in == out` is allowed for in-place use (vacuum-ancilla attenuators).
/// Insertion loss is not applied here; see LossBudget.
inline PureState apply_switch(const PureState &state,
                              const SwitchSchedule &schedule, PortPair in,
                              PortPair out) {
    if (in.first == in.second || out.first == out.second) {
        throw Error(ErrorCode::InvalidArgument, "switch ports must be distinct");
    }
    schedule.validate();
    const bool in_place = in == out;
    if (!in_place) {
        for (const auto &[occ, amp] : state) {
            for (Port p : {out.first, out.second}) {
                if (p != in.first && p != in.second && occ.at_port(p) > 0) {
                    throw Error(ErrorCode::InvalidArgument,
                                "output port " + port_name(p) + " not empty");
                }
            }
        }
    }
    PureState current = state;
    if (!in_place) {
        current = apply_creation_map(
            state, [&](const ModeLabel &m) -> std::optional<CreationImage> {
                if (m.port == in.first) {
                    return CreationImage{{{out.first, m.time_bin, m.branch}, 1.0}};
                }
                if (m.port == in.second) {
                    return CreationImage{{{out.second, m.time_bin, m.branch}, 1.0}};
                }
                return std::nullopt;
            });
    }
    const Limits limits = state.limits();
    const auto modes = current.modes();
    for (int bin = 1; bin <= limits.max_time_bin; ++bin) {
        for (Branch br : {Branch::parallel, Branch::orthogonal}) {
            const ModeLabel u{out.first, bin, br};
            const ModeLabel v{out.second, bin, br};
            if (!modes.contains(u) && !modes.contains(v)) {
                continue;
            }
            const double theta = schedule.effective_theta(bin);
            current = apply_mode_pair_unitary(current, u, v, Mat2::rotation(theta));
        }
    }
    return current;
}

/// Smallest ancilla index with no photons in `state`.
inline Port fresh_ancilla(const PureState &state) {
    int k = 0;
    for (const auto &mode : state.modes()) {
        if (is_ancilla(mode.port)) {
            k = std::max(k, static_cast<int>(mode.port) - kFirstAncilla + 1);
        }
    }
    return ancilla_port(k);
}

enum class InterferometerRole { preparation, analysis };

struct InterferometerSetting {
    double phase = 0.0;
    Port port = Port::C;
    InterferometerRole role = InterferometerRole::analysis;
    /// Analysis only. When set, the second exit of the interferometer is
    /// kept on this (ancilla) port instead of being discarded, which makes
    /// the map an isometry.
    std::optional<Port> exit_port;
};

/// 1-bit delay interferometer.
///
/// Analysis: a_{t}^+ -> (a_{t}^+ + e^{i phase} a_{t+1}^+)/2 on the monitored
/// exit (sub-normalizing), plus (a_{t}^+ - e^{i phase} a_{t+1}^+)/2 on
/// exit_port when one is given.
/// Preparation: a_{t1}^+ -> (a_{t1}^+ + e^{i phase} a_{t2}^+)/sqrt(2),
/// the post-selected normalized qubit.
inline PureState apply_delay_interferometer(const PureState &state,
                                            const InterferometerSetting &setting) {
    if (!std::isfinite(setting.phase)) {
        throw Error(ErrorCode::InvalidArgument, "non-finite interferometer phase");
    }
    const Complex shift = std::polar(1.0, setting.phase);
    const int tmax = state.limits().max_time_bin;

    if (setting.role == InterferometerRole::preparation) {
        for (const auto &mode : state.modes()) {
            if (mode.port == setting.port && mode.time_bin != 1) {
                throw Error(ErrorCode::TimeBinOverflow,
                            "preparation expects photons in t1 only, found " +
                                to_string(mode));
            }
        }
        if (tmax < 2) {
            throw Error(ErrorCode::TimeBinOverflow, "need at least two time bins");
        }
        const double h = 1.0 / std::numbers::sqrt2;
        return apply_creation_map(
            state, [&](const ModeLabel &m) -> std::optional<CreationImage> {
                if (m.port != setting.port) {
                    return std::nullopt;
                }
                return CreationImage{{{m.port, 1, m.branch}, h},
                                     {{m.port, 2, m.branch}, h * shift}};
            });
    }

    for (const auto &mode : state.modes()) {
        if (mode.port == setting.port && mode.time_bin >= tmax) {
            throw Error(ErrorCode::TimeBinOverflow,
                        "delayed copy of " + to_string(mode) + " leaves the window");
        }
    }
    const Port exit = setting.exit_port ? *setting.exit_port : fresh_ancilla(state);
    for (const auto &mode : state.modes()) {
        if (mode.port == exit) {
            throw Error(ErrorCode::ModeCollision,
                        "exit port " + port_name(mode.port) + " occupied");
        }
    }
    // Unbalanced Mach-Zehnder: 50/50 split into short (port) and long (exit)
    // arms, one-bin delay with phase on the long arm, 50/50 recombination.
    // Net effect per photon: (a_t + e a_{t+1})/2 on the port and
    // (a_t - e a_{t+1})/2 on the exit.
    const double h = 1.0 / std::numbers::sqrt2;
    const Mat2 split{h, h, h, -h};
    const auto pair_pass = [&](PureState s, const Mat2 &m) {
        const auto occupied = s.modes();
        for (int bin = 1; bin <= tmax; ++bin) {
            for (Branch br : {Branch::parallel, Branch::orthogonal}) {
                const ModeLabel u{setting.port, bin, br};
                const ModeLabel v{exit, bin, br};
                if (occupied.contains(u) || occupied.contains(v)) {
                    s = apply_mode_pair_unitary(s, u, v, m);
                }
            }
        }
        return s;
    };
    PureState out = pair_pass(state, split);
    out = apply_creation_map(out, [&](const ModeLabel &m) -> std::optional<CreationImage> {
        if (m.port != exit) {
            return std::nullopt;
        }
        return CreationImage{{{exit, m.time_bin + 1, m.branch}, shift}};
    });
    out = pair_pass(out, split);
    if (setting.exit_port) {
        return out;
    }
    // Discarded exit: keep only the amplitude with nothing on it.
    PureState kept(out.limits(), out.tolerance());
    for (const auto &[occ, amp] : out) {
        if (occ.at_port(exit) == 0) {
            kept.add(occ, amp);
        }
    }
    return kept;
}

/// Couples (port, time_bin) to a fresh vacuum ancilla:
/// a^+ -> t a^+ + sqrt(1 - t^2) anc^+. Photons on the ancilla survive until a
/// post-selection discards them.
inline PureState attenuator(const PureState &state, Port port, int time_bin,
                            double amplitude_transmission) {
    if (!(amplitude_transmission >= 0.0 && amplitude_transmission <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "amplitude transmission outside [0, 1]");
    }
    const Port anc = fresh_ancilla(state);
    const double t = amplitude_transmission;
    const double r = std::sqrt(1.0 - t * t);
    return apply_creation_map(
        state, [&](const ModeLabel &m) -> std::optional<CreationImage> {
            if (m.port != port || m.time_bin != time_bin) {
                return std::nullopt;
            }
            return CreationImage{{m, t}, {{anc, m.time_bin, m.branch}, r}};
        });
}

/// Multiplies every photon at `port` (all bins) by e^{i phase}.
inline PureState phase_shifter(const PureState &state, Port port, double phase) {
    const Complex shift = std::polar(1.0, phase);
    return apply_creation_map(
        state, [&](const ModeLabel &m) -> std::optional<CreationImage> {
            if (m.port != port) {
                return std::nullopt;
            }
            return CreationImage{{m, shift}};
        });
}

} // namespace tbswitch
