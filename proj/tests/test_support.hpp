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

// Shared helpers for the test executables: random states and unitaries.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tbswitch/fock.hpp"

namespace tbswitch::testing {

/// Haar-random 2x2 unitary.
inline Mat2 random_unitary(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    const Complex a{g(rng), g(rng)}, b{g(rng), g(rng)};
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    const Complex x = a / n, y = b / n;
    const Complex phase = std::polar(1.0, std::uniform_real_distribution<double>(
                                              0.0, 2.0 * std::numbers::pi)(rng));
    // Columns (x, y) and phase * (-conj(y), conj(x)).
    return {x, phase * -std::conj(y), y, phase * std::conj(x)};
}

/// Six labelled modes used by the randomized checks.
inline std::vector<ModeLabel> mode_pool() {
    return {{Port::A, 1}, {Port::A, 2}, {Port::B, 1},
            {Port::B, 2}, {Port::C, 1}, {Port::D, 2, Branch::orthogonal}};
}

/// Random normalized superposition of up to `terms` occupation vectors with
/// at most `max_photons` photons over the mode pool.
inline PureState random_state(std::mt19937_64 &rng, int max_photons, int terms = 5) {
    const auto pool = mode_pool();
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> count(0, max_photons);
    std::normal_distribution<double> g;
    PureState s(Limits{4, 3});
    for (int t = 0; t < terms; ++t) {
        OccupationVector occ;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) {
            occ.add(pool[pick(rng)], 1);
        }
        s.add(occ, Complex{g(rng), g(rng)});
    }
    s.prune();
    return s.scaled(1.0 / std::sqrt(s.norm2()));
}

} // namespace tbswitch::testing
