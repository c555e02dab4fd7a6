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
 * Brute-force reference for mode-pair maps. Enumerates the full Fock basis
 * of each photon-number sector and builds the transfer matrix from
 * permanents of the single-particle unitary, so it shares no code path with
 * the binomial expansion in fock.hpp.
 */

#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "tbswitch/fock.hpp"

namespace tbswitch {

struct DenseLimits {
    int max_modes = 8;
    int max_photons = 4;
};

namespace detail {

/// Permanent by summation over all permutations; n <= 4 here.
inline Complex permanent(const std::vector<std::vector<Complex>> &a) {
    const std::size_t n = a.size();
    if (n == 0) {
        return {1.0};
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Complex total{};
    do {
        Complex prod{1.0};
        for (std::size_t i = 0; i < n; ++i) {
            prod *= a[i][perm[i]];
        }
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// All occupation tuples of `modes` slots holding exactly `photons`.
inline void enumerate_sector(int modes, int photons, std::vector<int> &cur,
                             std::vector<std::vector<int>> &out) {
    if (static_cast<int>(cur.size()) == modes - 1) {
        cur.push_back(photons);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int n = photons; n >= 0; --n) {
        cur.push_back(n);
        enumerate_sector(modes, photons - n, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// Dense reference implementation of apply_mode_pair_unitary().
inline PureState dense_oracle_apply(const PureState &state, const ModeLabel &u,
                                    const ModeLabel &v, const Mat2 &m,
                                    DenseLimits limits = {}) {
    std::set<ModeLabel> mode_set = state.modes();
    mode_set.insert(u);
    mode_set.insert(v);
    const std::vector<ModeLabel> modes(mode_set.begin(), mode_set.end());
    const int nm = static_cast<int>(modes.size());
    if (nm > limits.max_modes || state.max_total_photons() > limits.max_photons) {
        throw Error(ErrorCode::DimensionTooLarge,
                    std::to_string(nm) + " modes, " +
                        std::to_string(state.max_total_photons()) + " photons");
    }
    const auto index_of = [&](const ModeLabel &x) {
        return static_cast<std::size_t>(
            std::find(modes.begin(), modes.end(), x) - modes.begin());
    };
    const std::size_t iu = index_of(u);
    const std::size_t iv = index_of(v);

    // Single-particle unitary: column j is the image of mode j.
    std::vector<std::vector<Complex>> unitary(
        modes.size(), std::vector<Complex>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        unitary[i][i] = 1.0;
    }
    unitary[iu][iu] = m.m00;
    unitary[iv][iu] = m.m10;
    unitary[iu][iv] = m.m01;
    unitary[iv][iv] = m.m11;

    const auto to_occ = [&](const std::vector<int> &t) {
        OccupationVector occ;
        for (std::size_t i = 0; i < t.size(); ++i) {
            occ.add(modes[i], t[i]);
        }
        return occ;
    };
    const auto expand = [](const std::vector<int> &t) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < t.size(); ++i) {
            for (int k = 0; k < t[i]; ++k) {
                idx.push_back(i);
            }
        }
        return idx;
    };
    const auto norm_factor = [](const std::vector<int> &t) {
        double f = 1.0;
        for (int n : t) {
            f *= detail::factorial(n);
        }
        return f;
    };

    PureState out(state.limits(), state.tolerance());
    for (int photons = 0; photons <= state.max_total_photons(); ++photons) {
        std::vector<std::vector<int>> basis;
        std::vector<int> cur;
        detail::enumerate_sector(nm, photons, cur, basis);

        // Input vector in this sector.
        std::vector<Complex> in(basis.size());
        bool any = false;
        for (std::size_t b = 0; b < basis.size(); ++b) {
            in[b] = state.amplitude(to_occ(basis[b]));
            any = any || in[b] != Complex{};
        }
        if (!any) {
            continue;
        }
        // Transfer matrix <out|U|in> = perm(U[out rows, in cols]) /
        // sqrt(prod n_in! prod n_out!).
        for (std::size_t r = 0; r < basis.size(); ++r) {
            const auto rows = expand(basis[r]);
            Complex acc{};
            for (std::size_t c = 0; c < basis.size(); ++c) {
                if (in[c] == Complex{}) {
                    continue;
                }
                const auto cols = expand(basis[c]);
                std::vector<std::vector<Complex>> sub(
                    rows.size(), std::vector<Complex>(cols.size()));
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    for (std::size_t j = 0; j < cols.size(); ++j) {
                        sub[i][j] = unitary[rows[i]][cols[j]];
                    }
                }
                acc += detail::permanent(sub) /
                       std::sqrt(norm_factor(basis[r]) * norm_factor(basis[c])) *
                       in[c];
            }
            if (acc != Complex{}) {
                out.add(to_occ(basis[r]), acc);
            }
        }
    }
    out.prune();
    return out;
}

} // namespace tbswitch
