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

#pragma once

#include <array>
#include <cmath>

#include "tbswitch/fock.hpp"

namespace tbswitch {

/// Two-qubit amplitudes in the order {t2t2, t2t1, t1t2, t1t1}, where the
/// first label is the bin of the photon on `first` and the second the bin of
/// the photon on `second`.
using TwoQubitAmplitudes = std::array<Complex, 4>;

/// Single photon at `port` in time bin `bin` (parallel branch).
inline OccupationVector photon(Port port, int bin) {
    return OccupationVector{{{port, bin, Branch::parallel}, 1}};
}

inline OccupationVector photons(Port p, int bin_p, Port q, int bin_q) {
    OccupationVector occ;
    occ.add({p, bin_p, Branch::parallel}, 1);
    occ.add({q, bin_q, Branch::parallel}, 1);
    return occ;
}

inline TwoQubitAmplitudes two_qubit_amplitudes(const PureState &state, Port first,
                                               Port second) {
    return {state.amplitude(photons(first, 2, second, 2)),
            state.amplitude(photons(first, 2, second, 1)),
            state.amplitude(photons(first, 1, second, 2)),
            state.amplitude(photons(first, 1, second, 1))};
}

/// Wootters concurrence of a pure two-qubit state, 2|a00 a11 - a01 a10| / |a|^2.
inline double concurrence(const TwoQubitAmplitudes &a) {
    double n = 0.0;
    for (const auto &x : a) {
        n += std::norm(x);
    }
    if (n == 0.0) {
        return 0.0;
    }
    return 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]) / n;
}

/// Schmidt coefficients (descending) of a pure two-qubit state, normalized.
inline std::array<double, 2> schmidt_coefficients(const TwoQubitAmplitudes &a) {
    double n = 0.0;
    for (const auto &x : a) {
        n += std::norm(x);
    }
    // Eigenvalues of the reduced density matrix: (1 +- sqrt(1 - C^2)) / 2.
    const double c = n == 0.0 ? 0.0 : 2.0 * std::abs(a[0] * a[3] - a[1] * a[2]) / n;
    const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
    return {std::sqrt((1.0 + root) / 2.0), std::sqrt((1.0 - root) / 2.0)};
}

} // namespace tbswitch
