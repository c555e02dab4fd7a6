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
 * Degenerate pulsed photon-pair source: pair-number statistics, time-bin
 * qubit preparation and a two-branch model of partial distinguishability.
 */

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tbswitch/elements.hpp"
#include "tbswitch/fock.hpp"

namespace tbswitch {

enum class PairStatistics { thermal, poissonian };

inline constexpr double kMaxTruncatedTail = 1e-2;

struct SourceConfig {
    double mu = 0.25;
    int pair_truncation = 16;
    double pulse_fwhm_ps = 60.0;
    PairStatistics statistics = PairStatistics::thermal;

    /// Probability of emitting exactly n pairs in one pulse.
    [[nodiscard]] double pair_probability(int n) const {
        if (n < 0) {
            return 0.0;
        }
        if (statistics == PairStatistics::thermal) {
            return std::pow(mu, n) / std::pow(1.0 + mu, n + 1);
        }
        return std::exp(-mu) * std::pow(mu, n) / std::tgamma(n + 1.0);
    }

    /// Probability mass beyond pair_truncation.
    [[nodiscard]] double truncated_tail() const {
        if (statistics == PairStatistics::thermal) {
            return std::pow(mu / (1.0 + mu), pair_truncation + 1);
        }
        double kept = 0.0;
        for (int n = 0; n <= pair_truncation; ++n) {
            kept += pair_probability(n);
        }
        return std::max(0.0, 1.0 - kept);
    }

    void validate() const {
        if (!(mu >= 0.0) || !std::isfinite(mu)) {
            throw Error(ErrorCode::InvalidConfig, "mu must be finite and >= 0");
        }
        if (pair_truncation < 1) {
            throw Error(ErrorCode::InvalidConfig, "pair_truncation must be >= 1");
        }
        if (!(pulse_fwhm_ps > 0.0)) {
            throw Error(ErrorCode::InvalidConfig, "pulse_fwhm_ps must be > 0");
        }
        if (truncated_tail() >= kMaxTruncatedTail) {
            throw Error(ErrorCode::InvalidConfig,
                        "pair truncation " + std::to_string(pair_truncation) +
                            " leaves tail " + std::to_string(truncated_tail()));
        }
    }
};

/// Amplitude overlap of two Gaussian pulses offset by `delay_ps`.
struct OverlapModel {
    double delay_ps = 0.0;
    double pulse_fwhm_ps = 60.0;

    [[nodiscard]] double sigma_ps() const {
        return pulse_fwhm_ps / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    }

    /// zeta = exp(-delay^2 / (4 sigma^2)); zeta(0) = 1.
    [[nodiscard]] double zeta() const {
        const double s = sigma_ps();
        return std::exp(-delay_ps * delay_ps / (4.0 * s * s));
    }
};

/// sum_n sqrt(p(n)) |n>_signal |n>_idler, n = 0..pair_truncation. The
/// norm^2 equals the kept probability mass.
inline PureState spdc_state(const SourceConfig &config,
                            ModeLabel signal = {Port::A, 1},
                            ModeLabel idler = {Port::B, 1}, Limits limits = {}) {
    config.validate();
    if (2 * config.pair_truncation > limits.max_photons) {
        throw Error(ErrorCode::TruncationOverflow,
                    std::to_string(config.pair_truncation) +
                        " pairs exceed the photon limit");
    }
    PureState out(limits);
    for (int n = 0; n <= config.pair_truncation; ++n) {
        const double p = config.pair_probability(n);
        if (p == 0.0) {
            continue;
        }
        OccupationVector occ;
        occ.add(signal, n);
        occ.add(idler, n);
        out.add(occ, std::sqrt(p));
    }
    out.prune();
    return out;
}

/// Fock input |signal>|idler> left after every photon of the source passed
/// a uniform loss.
struct SurvivorTerm {
    int signal = 0;
    int idler = 0;
    double weight = 0.0;
};

struct ThinnedSource {
    std::vector<SurvivorTerm> terms;
    /// Mass of the terms above the photon limit, and of the pair tail.
    double dropped = 0.0;
};

namespace detail {

inline double binomial_pmf(int n, int k, double p) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double pk = k == 0 ? 1.0 : std::pow(p, k);
    const double qk = n - k == 0 ? 1.0 : std::pow(1.0 - p, n - k);
    return std::exp(log_c) * pk * qk;
}

} // namespace detail

/// Source followed by per-photon survival `survival` on both arms, as a
/// mixture over surviving photon numbers with signal + idler <= max_photons.
/// Exact for photon counting behind passive optics with that common loss.
inline ThinnedSource thinned_source(const SourceConfig &config, double survival,
                                    int max_photons) {
    config.validate();
    if (!(survival >= 0.0 && survival <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "survival outside [0, 1]");
    }
    if (max_photons < 0) {
        throw Error(ErrorCode::InvalidArgument, "negative photon limit");
    }
    ThinnedSource out;
    double kept = 0.0;
    for (int ks = 0; ks <= max_photons; ++ks) {
        for (int ki = 0; ks + ki <= max_photons; ++ki) {
            double w = 0.0;
            for (int n = std::max(ks, ki); n <= config.pair_truncation; ++n) {
                w += config.pair_probability(n) * detail::binomial_pmf(n, ks, survival) *
                     detail::binomial_pmf(n, ki, survival);
            }
            if (w > 0.0) {
                out.terms.push_back({ks, ki, w});
                kept += w;
            }
        }
    }
    out.dropped = std::max(0.0, 1.0 - kept);
    return out;
}

/// Exactly one pair, |1>_signal |1>_idler.
inline PureState single_pair_state(ModeLabel signal = {Port::A, 1},
                                   ModeLabel idler = {Port::B, 1},
                                   Limits limits = {}) {
    return PureState::basis({{signal, 1}, {idler, 1}}, limits);
}

/// Maps each photon at (port, t1) onto (|t1> + e^{i phase}|t2>)/sqrt(2).
inline PureState prepare_timebin_qubit(const PureState &state, Port port,
                                       double phase) {
    return apply_delay_interferometer(
        state, {phase, port, InterferometerRole::preparation, std::nullopt});
}

/// Splits every photon at `port` into zeta * parallel + sqrt(1 - zeta^2) *
/// orthogonal. Orthogonal-branch photons no longer interfere with
/// parallel-branch ones.
inline PureState apply_distinguishability(const PureState &state, Port port,
                                          double zeta) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "overlap outside [0, 1]");
    }
    const double orth = std::sqrt(1.0 - zeta * zeta);
    return apply_creation_map(
        state, [&](const ModeLabel &m) -> std::optional<CreationImage> {
            if (m.port != port || m.branch != Branch::parallel) {
                return std::nullopt;
            }
            return CreationImage{{m, zeta},
                                 {{m.port, m.time_bin, Branch::orthogonal}, orth}};
        });
}

inline PureState apply_distinguishability(const PureState &state, Port port,
                                          const OverlapModel &model) {
    return apply_distinguishability(state, port, model.zeta());
}

} // namespace tbswitch
