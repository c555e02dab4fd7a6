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
 * Gate constructions from time-bin switches: the partial polarizing beam
 * splitter analogue and the post-selected three-switch CZ gate.
 *
 * Qubits enter on ports A and B and leave on C and D. Basis ordering for
 * every 4x4 object here is {t2t2, t2t1, t1t2, t1t1}, first label on the
 * A/C qubit, so the CZ sign sits on the last entry.
 */

#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "tbswitch/elements.hpp"
#include "tbswitch/fock.hpp"
#include "tbswitch/qubits.hpp"

namespace tbswitch {

/// 2 arccos(1/sqrt(3)): amplitude 1/sqrt(3) stays, sqrt(2/3) swaps.
inline double partial_pbs_theta() { return 2.0 * std::acos(1.0 / std::sqrt(3.0)); }

/// t1 partially exchanged (kept-port probability 1/3), t2 transmitted.
inline SwitchSchedule partial_pbs_schedule() {
    SwitchSchedule s;
    s.theta = {{1, partial_pbs_theta()}, {2, 0.0}};
    return s.made_ideal();
}

/// In-place switch with a vacuum second input: t2 kept with amplitude
/// 1/sqrt(3), t1 untouched.
inline SwitchSchedule compensation_schedule() {
    SwitchSchedule s;
    s.theta = {{1, 0.0}, {2, partial_pbs_theta()}};
    return s.made_ideal();
}

struct CzSettings {
    /// Applied to all three switches; infinity is the ideal gate.
    double extinction_db = std::numeric_limits<double>::infinity();
};

using GateMatrix = std::array<std::array<Complex, 4>, 4>; // [out][in]

inline constexpr Port kCzFirstAncilla = ancilla_port(0);
inline constexpr Port kCzSecondAncilla = ancilla_port(1);

namespace detail {

inline void require_two_qubits(const PureState &input) {
    if (input.norm2() == 0.0) {
        throw Error(ErrorCode::NotSinglePhotonInput, "empty input state");
    }
    for (const auto &[occ, amp] : input) {
        if (occ.at_port(Port::A) != 1 || occ.at_port(Port::B) != 1 || occ.total() != 2) {
            throw Error(ErrorCode::NotSinglePhotonInput,
                        "need exactly one photon on each of A and B");
        }
        for (const auto &[mode, n] : occ) {
            if (mode.time_bin < 1 || mode.time_bin > 2 ||
                mode.branch != Branch::parallel) {
                throw Error(ErrorCode::NotSinglePhotonInput,
                            "qubit photon outside {t1, t2}: " + to_string(mode));
            }
        }
    }
}

inline std::array<PureState, 4> basis_inputs() {
    const std::array<std::pair<int, int>, 4> bins{{{2, 2}, {2, 1}, {1, 2}, {1, 1}}};
    std::array<PureState, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = PureState::basis(photons(Port::A, bins[i].first, Port::B, bins[i].second),
                                  Limits{2, 3});
    }
    return out;
}

} // namespace detail

/// Full (un-post-selected) output of the three-switch circuit: partial PBS
/// A,B -> C,D, then a compensation switch on each of C and D against its
/// own vacuum ancilla.
inline PureState cz_circuit(const PureState &input, const CzSettings &settings = {}) {
    detail::require_two_qubits(input);
    SwitchSchedule pbs = partial_pbs_schedule();
    SwitchSchedule comp = compensation_schedule();
    pbs.extinction_db = comp.extinction_db = settings.extinction_db;
    PureState state = apply_switch(input, pbs, {Port::A, Port::B}, {Port::C, Port::D});
    state = apply_switch(state, comp, {Port::C, kCzFirstAncilla},
                         {Port::C, kCzFirstAncilla});
    return apply_switch(state, comp, {Port::D, kCzSecondAncilla},
                        {Port::D, kCzSecondAncilla});
}

/// Post-selects one photon on each of C and D.
inline Projection cz_gate(const PureState &input, const CzSettings &settings = {}) {
    return project(cz_circuit(input, settings), [](const OccupationVector &occ) {
        return occ.at_port(Port::C) == 1 && occ.at_port(Port::D) == 1 && occ.total() == 2;
    });
}

/// Post-selected operator, column j = C/D amplitudes for basis input j.
inline GateMatrix cz_operator(const CzSettings &settings = {}) {
    GateMatrix m{};
    const auto inputs = detail::basis_inputs();
    for (std::size_t j = 0; j < 4; ++j) {
        const TwoQubitAmplitudes col =
            two_qubit_amplitudes(cz_circuit(inputs[j], settings), Port::C, Port::D);
        for (std::size_t i = 0; i < 4; ++i) {
            m[i][j] = col[i];
        }
    }
    return m;
}

/// |Tr(U^+ M)|^2 / (d Tr(M^+ M)), insensitive to the overall scale of M.
inline double process_fidelity(const GateMatrix &target, const GateMatrix &m) {
    Complex overlap = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            overlap += std::conj(target[i][j]) * m[i][j];
            norm += std::norm(m[i][j]);
        }
    }
    return norm > 0.0 ? std::norm(overlap) / (4.0 * norm) : 0.0;
}

inline GateMatrix cz_target() {
    GateMatrix u{};
    u[0][0] = u[1][1] = u[2][2] = 1.0;
    u[3][3] = -1.0;
    return u;
}

/// Relabels a 4x4 object under exchange of the two qubits.
inline GateMatrix swap_qubits(const GateMatrix &m) {
    constexpr std::array<std::size_t, 4> perm{0, 2, 1, 3};
    GateMatrix out{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            out[perm[i]][perm[j]] = m[i][j];
        }
    }
    return out;
}

struct GateReport {
    GateMatrix op{};
    std::array<double, 4> success{}; // per basis input
    double fidelity = 0.0;
    double max_off_diagonal = 0.0;
    double plus_plus_concurrence = 0.0;
    double plus_plus_success = 0.0;
    /// max |M - swap(M)| where swap(M) is the operator seen with the
    /// qubits fed in the other way round.
    double swap_asymmetry = 0.0;
    double extinction_db = std::numeric_limits<double>::infinity();
};

inline GateReport cz_report(const CzSettings &settings = {}) {
    GateReport r;
    r.extinction_db = settings.extinction_db;
    r.op = cz_operator(settings);
    const auto inputs = detail::basis_inputs();
    for (std::size_t j = 0; j < 4; ++j) {
        r.success[j] = cz_gate(inputs[j], settings).probability;
        for (std::size_t i = 0; i < 4; ++i) {
            if (i != j) {
                r.max_off_diagonal = std::max(r.max_off_diagonal, std::abs(r.op[i][j]));
            }
        }
    }
    r.fidelity = process_fidelity(cz_target(), r.op);

    PureState plus = PureState::basis(photons(Port::A, 1, Port::B, 1), Limits{2, 3});
    plus = apply_delay_interferometer(
        plus, {0.0, Port::A, InterferometerRole::preparation, std::nullopt});
    plus = apply_delay_interferometer(
        plus, {0.0, Port::B, InterferometerRole::preparation, std::nullopt});
    const Projection out = cz_gate(plus, settings);
    r.plus_plus_success = out.probability;
    r.plus_plus_concurrence = concurrence(two_qubit_amplitudes(out.state, Port::C, Port::D));

    // Feed each basis input with A and B exchanged; in the swapped labels
    // the operator must coincide with the original one.
    GateMatrix swapped{};
    const std::array<std::pair<int, int>, 4> bins{{{2, 2}, {2, 1}, {1, 2}, {1, 1}}};
    for (std::size_t j = 0; j < 4; ++j) {
        const PureState in = PureState::basis(
            photons(Port::A, bins[j].second, Port::B, bins[j].first), Limits{2, 3});
        const TwoQubitAmplitudes col =
            two_qubit_amplitudes(cz_circuit(in, settings), Port::D, Port::C);
        for (std::size_t i = 0; i < 4; ++i) {
            swapped[i][j] = col[i];
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            r.swap_asymmetry = std::max(r.swap_asymmetry, std::abs(r.op[i][j] - swapped[i][j]));
        }
    }
    return r;
}

/// Contract of the ideal gate: fidelity and per-input success at 1/9.
inline bool cz_contract_holds(const GateReport &r, double tol = 1e-9) {
    if (!(r.fidelity > 1.0 - tol)) {
        return false;
    }
    for (double p : r.success) {
        if (std::abs(p - 1.0 / 9.0) > tol) {
            return false;
        }
    }
    return true;
}

/// Entangler schedule on single-photon basis inputs: t1 exchanged (A->D,
/// B->C), t2 transmitted (A->C, B->D), each with probability 1.
inline bool entangler_as_pbs_check(double tol = 1e-12) {
    const SwitchSchedule s = SwitchSchedule::entangler().made_ideal();
    struct Case {
        Port in;
        int bin;
        Port expected;
    };
    const std::array<Case, 4> cases{{{Port::A, 1, Port::D},
                                     {Port::B, 1, Port::C},
                                     {Port::A, 2, Port::C},
                                     {Port::B, 2, Port::D}}};
    for (const auto &c : cases) {
        const PureState in = PureState::basis(photon(c.in, c.bin), Limits{1, 2});
        const PureState out = apply_switch(in, s, {Port::A, Port::B}, {Port::C, Port::D});
        if (std::abs(std::norm(out.amplitude(photon(c.expected, c.bin))) - 1.0) > tol) {
            return false;
        }
    }
    return true;
}

} // namespace tbswitch
