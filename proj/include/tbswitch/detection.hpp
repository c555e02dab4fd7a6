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
 * Gated threshold detectors: exact click statistics, Monte-Carlo sampling,
 * accidental-coincidence estimation and fringe-visibility fitting.
 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "tbswitch/fock.hpp"

namespace tbswitch {

struct DetectorConfig {
    double efficiency = 0.08;
    double dark_prob_per_gate = 2e-6;
    int gate_bin = 2;
    Port port = Port::C;

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "efficiency outside [0, 1]");
        }
        if (!(dark_prob_per_gate >= 0.0 && dark_prob_per_gate < 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "dark probability outside [0, 1)");
        }
        if (gate_bin < 1) {
            throw Error(ErrorCode::InvalidConfig, "gate bin must be >= 1");
        }
    }
};

/// Uniform per-port power transmission (insertion losses, discarded
/// preparation paths, fibre). Uniform loss commutes with passive linear
/// optics, so it is applied at the detector instead of on amplitudes.
class LossBudget {
  public:
    [[nodiscard]] double transmission(Port p) const {
        auto it = factors_.find(p);
        return it == factors_.end() ? 1.0 : it->second;
    }

    void attenuate(Port p, double factor) {
        if (!(factor > 0.0 && factor <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "loss factor must lie in (0, 1]");
        }
        factors_[p] = transmission(p) * factor;
    }

    /// dB of loss (positive number) on port p.
    void attenuate_db(Port p, double db) { attenuate(p, std::pow(10.0, -db / 10.0)); }

    [[nodiscard]] const std::map<Port, double> &factors() const { return factors_; }

  private:
    std::map<Port, double> factors_;
};

inline double survival_probability(const DetectorConfig &det,
                                   const LossBudget &budget) {
    const double p = det.efficiency * budget.transmission(det.port);
    if (!(p >= 0.0 && p <= 1.0) || !(det.dark_prob_per_gate >= 0.0 &&
                                      det.dark_prob_per_gate < 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "detector efficiency/dark probability out of range");
    }
    return p;
}

/// Distribution of photon numbers in each detector's gated mode. Coherences
/// between occupation vectors never matter here: the detectors measure in
/// the occupation basis. Weight missing from a sub-normalized state is a
/// vacuum outcome.
struct GatedDistribution {
    std::vector<std::vector<int>> counts; // one row per outcome class
    std::vector<double> probability;
};

/// Statistical mixture of pure states. Weights sum to at most one; the
/// remainder counts as vacuum.
struct WeightedState {
    double weight = 1.0;
    PureState state;
};
using Ensemble = std::vector<WeightedState>;

namespace detail {

inline void accumulate_classes(std::map<std::vector<int>, double> &classes,
                               const PureState &state, double weight,
                               std::span<const DetectorConfig> detectors) {
    for (const auto &[occ, amp] : state) {
        std::vector<int> key;
        key.reserve(detectors.size());
        for (const auto &det : detectors) {
            key.push_back(occ.at_port_bin(det.port, det.gate_bin));
        }
        classes[key] += weight * std::norm(amp);
    }
    const double missing = 1.0 - state.norm2();
    if (missing > 0.0) {
        classes[std::vector<int>(detectors.size(), 0)] += weight * missing;
    }
}

inline GatedDistribution to_distribution(const std::map<std::vector<int>, double> &classes) {
    GatedDistribution out;
    for (const auto &[key, p] : classes) {
        out.counts.push_back(key);
        out.probability.push_back(p);
    }
    return out;
}

} // namespace detail

inline GatedDistribution gated_distribution(const PureState &state,
                                            std::span<const DetectorConfig> detectors) {
    std::map<std::vector<int>, double> classes;
    detail::accumulate_classes(classes, state, 1.0, detectors);
    return detail::to_distribution(classes);
}

inline GatedDistribution gated_distribution(const Ensemble &ensemble,
                                            std::span<const DetectorConfig> detectors) {
    if (ensemble.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty ensemble");
    }
    double total = 0.0;
    for (const auto &member : ensemble) {
        if (!(member.weight >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "negative ensemble weight");
        }
        total += member.weight;
    }
    if (total > 1.0 + 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "ensemble weights exceed 1");
    }
    std::map<std::vector<int>, double> classes;
    for (const auto &member : ensemble) {
        detail::accumulate_classes(classes, member.state, member.weight, detectors);
    }
    if (total < 1.0) {
        classes[std::vector<int>(detectors.size(), 0)] += 1.0 - total;
    }
    return detail::to_distribution(classes);
}

/// Joint click distribution; bit i of the index is "detector i clicked".
struct ClickDistribution {
    std::vector<double> joint;

    [[nodiscard]] std::size_t detectors() const {
        return static_cast<std::size_t>(std::countr_zero(joint.size()));
    }

    [[nodiscard]] double marginal(std::size_t i) const {
        double s = 0.0;
        for (std::size_t mask = 0; mask < joint.size(); ++mask) {
            if ((mask >> i) & 1U) {
                s += joint[mask];
            }
        }
        return s;
    }

    /// Probability that every detector clicked.
    [[nodiscard]] double coincidence() const { return joint.back(); }
};

/// P(click | n photons) = 1 - (1 - dark)(1 - p)^n for a threshold detector.
inline double click_given_photons(int n, double survival, double dark) {
    return 1.0 - (1.0 - dark) * std::pow(1.0 - survival, n);
}

inline ClickDistribution click_probabilities(const GatedDistribution &dist,
                                             std::span<const DetectorConfig> detectors,
                                             const LossBudget &budget) {
    if (detectors.empty() || detectors.size() > 16) {
        throw Error(ErrorCode::InvalidArgument, "need 1..16 detectors");
    }
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        for (std::size_t j = i + 1; j < detectors.size(); ++j) {
            if (detectors[i].port == detectors[j].port) {
                throw Error(ErrorCode::InvalidArgument,
                            "detectors must sit on distinct ports");
            }
        }
    }
    std::vector<double> survival;
    for (const auto &det : detectors) {
        survival.push_back(survival_probability(det, budget));
    }
    ClickDistribution out{std::vector<double>(std::size_t{1} << detectors.size(), 0.0)};
    for (std::size_t c = 0; c < dist.counts.size(); ++c) {
        for (std::size_t mask = 0; mask < out.joint.size(); ++mask) {
            double p = dist.probability[c];
            for (std::size_t d = 0; d < detectors.size(); ++d) {
                const double click = click_given_photons(
                    dist.counts[c][d], survival[d], detectors[d].dark_prob_per_gate);
                p *= ((mask >> d) & 1U) ? click : 1.0 - click;
            }
            out.joint[mask] += p;
        }
    }
    return out;
}

inline ClickDistribution click_probabilities(const PureState &state,
                                             std::span<const DetectorConfig> detectors,
                                             const LossBudget &budget) {
    return click_probabilities(gated_distribution(state, detectors), detectors, budget);
}

inline ClickDistribution click_probabilities(const Ensemble &ensemble,
                                             std::span<const DetectorConfig> detectors,
                                             const LossBudget &budget) {
    return click_probabilities(gated_distribution(ensemble, detectors), detectors, budget);
}

struct CountRecord {
    std::int64_t starts = 0;
    std::int64_t singles_c = 0;
    std::int64_t singles_d = 0;
    std::int64_t coincidences = 0;
    double accidentals_estimate = 0.0;

    CountRecord &operator+=(const CountRecord &o) {
        starts += o.starts;
        singles_c += o.singles_c;
        singles_d += o.singles_d;
        coincidences += o.coincidences;
        return *this;
    }
    bool operator==(const CountRecord &) const = default;
};

/// Uncorrelated-coincidence estimate singles_c * singles_d / starts.
inline double estimate_accidentals(const CountRecord &record) {
    if (record.starts <= 0) {
        throw Error(ErrorCode::ZeroStarts, "record has no start pulses");
    }
    return static_cast<double>(record.singles_c) *
           static_cast<double>(record.singles_d) /
           static_cast<double>(record.starts);
}

/// Coincidences minus the accidental estimate, floored at zero.
inline double subtracted_coincidences(const CountRecord &record) {
    return std::max(0.0, static_cast<double>(record.coincidences) -
                             estimate_accidentals(record));
}

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xoshiro256** with a [0, 1) double helper. Spelled out so streams are
/// identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        for (auto &s : state_) {
            seed = splitmix64(seed);
            s = seed;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

} // namespace detail

/// Seed for a derived stream, e.g. one worker or one scan point.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return detail::splitmix64(master ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Samples `pulses` gate periods for a detector pair. Each pulse draws an
/// outcome from the gated photon-number distribution, thins every photon
/// with the detector survival probability and adds a dark count draw.
/// Pulses are split across `workers` streams derived from (seed, worker);
/// the result is a deterministic function of (inputs, seed, workers).
inline CountRecord run_monte_carlo(const GatedDistribution &dist,
                                   const std::array<DetectorConfig, 2> &detectors,
                                   const LossBudget &budget, std::int64_t pulses,
                                   std::uint64_t seed, int workers = 1) {
    if (pulses < 1) {
        throw Error(ErrorCode::InvalidArgument, "pulses must be >= 1");
    }
    if (workers < 1) {
        throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
    }
    if (dist.probability.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty photon-number distribution");
    }
    // Outcome classes in decreasing probability with 53-bit integer
    // thresholds, so a pulse costs one comparison in the common case.
    std::vector<std::size_t> order(dist.probability.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return dist.probability[x] > dist.probability[y];
    });
    double total_p = 0.0;
    for (double p : dist.probability) {
        total_p += p;
    }
    constexpr double kScale = 0x1.0p53;
    std::vector<std::uint64_t> bound;
    std::vector<std::array<int, 2>> photons_at;
    double acc = 0.0;
    for (std::size_t i : order) {
        acc += dist.probability[i];
        bound.push_back(static_cast<std::uint64_t>(std::min(acc / total_p, 1.0) * kScale));
        photons_at.push_back({dist.counts[i][0], dist.counts[i][1]});
    }
    bound.back() = static_cast<std::uint64_t>(kScale);
    const std::array<double, 2> surv{survival_probability(detectors[0], budget),
                                     survival_probability(detectors[1], budget)};
    const std::array<std::uint64_t, 2> dark{
        static_cast<std::uint64_t>(detectors[0].dark_prob_per_gate * kScale),
        static_cast<std::uint64_t>(detectors[1].dark_prob_per_gate * kScale)};

    const auto simulate = [&](std::int64_t n, std::uint64_t stream_seed) {
        detail::Rng rng(stream_seed);
        CountRecord rec;
        rec.starts = n;
        const std::size_t last = bound.size() - 1;
        for (std::int64_t i = 0; i < n; ++i) {
            const std::uint64_t u = rng.next() >> 11;
            std::size_t c = 0;
            while (c < last && u >= bound[c]) {
                ++c;
            }
            std::array<bool, 2> click{false, false};
            for (std::size_t d = 0; d < 2; ++d) {
                const int k = photons_at[c][d];
                if (k > 0) {
                    if (surv[d] >= 1.0) {
                        click[d] = true;
                    } else {
                        for (int j = 0; j < k; ++j) {
                            if (rng.uniform() < surv[d]) {
                                click[d] = true;
                            }
                        }
                    }
                }
                if ((rng.next() >> 11) < dark[d]) {
                    click[d] = true;
                }
            }
            rec.singles_c += click[0];
            rec.singles_d += click[1];
            rec.coincidences += click[0] && click[1];
        }
        return rec;
    };

    std::vector<CountRecord> partial(static_cast<std::size_t>(workers));
    const std::int64_t base = pulses / workers;
    const std::int64_t extra = pulses % workers;
    const auto share = [&](int w) { return base + (w < extra ? 1 : 0); };
    if (workers == 1) {
        partial[0] = simulate(pulses, derive_seed(seed, 0));
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                partial[static_cast<std::size_t>(w)] =
                    simulate(share(w), derive_seed(seed, static_cast<std::uint64_t>(w)));
            });
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    CountRecord total;
    for (const auto &p : partial) {
        total += p;
    }
    total.accidentals_estimate = estimate_accidentals(total);
    return total;
}

inline CountRecord run_monte_carlo(const PureState &state,
                                   const std::array<DetectorConfig, 2> &detectors,
                                   const LossBudget &budget, std::int64_t pulses,
                                   std::uint64_t seed, int workers = 1) {
    return run_monte_carlo(gated_distribution(state, detectors), detectors, budget,
                           pulses, seed, workers);
}

/// Mixture version, sampled from the weighted sum of member distributions.
inline CountRecord run_monte_carlo(const Ensemble &ensemble,
                                   const std::array<DetectorConfig, 2> &detectors,
                                   const LossBudget &budget, std::int64_t pulses,
                                   std::uint64_t seed, int workers = 1) {
    return run_monte_carlo(gated_distribution(ensemble, detectors), detectors, budget,
                           pulses, seed, workers);
}

/// Least-squares fit of A (1 - V cos(phase - offset)).
struct FringeFit {
    double visibility = 0.0;
    double amplitude = 0.0;
    double phase_offset = 0.0;
    double residual = 0.0;          // RMS of fit residuals
    double visibility_stderr = 0.0; // delta method on the fit covariance
    double minmax_visibility = 0.0; // (max - min) / (max + min) of the data
};

struct FringePoint {
    double phase = 0.0;
    double value = 0.0;
    double variance = -1.0; // < 0: use the residual variance instead
};

inline FringeFit fit_visibility(std::span<const FringePoint> points) {
    if (points.size() < 5) {
        throw Error(ErrorCode::InsufficientPoints,
                    "need at least 5 points, got " + std::to_string(points.size()));
    }
    const auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [](const FringePoint &a, const FringePoint &b) { return a.phase < b.phase; });
    if (hi->phase - lo->phase < 1.5 * std::numbers::pi - 1e-9) {
        throw Error(ErrorCode::DegeneratePhases, "phases span less than 1.5 pi");
    }

    // Linear model y = b0 + b1 cos(phase) + b2 sin(phase).
    std::array<std::array<double, 3>, 3> xtx{};
    std::array<double, 3> xty{};
    for (const auto &pt : points) {
        const std::array<double, 3> row{1.0, std::cos(pt.phase), std::sin(pt.phase)};
        for (std::size_t i = 0; i < 3; ++i) {
            xty[i] += row[i] * pt.value;
            for (std::size_t j = 0; j < 3; ++j) {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    const auto &m = xtx;
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-9 * std::pow(static_cast<double>(points.size()), 3)) {
        throw Error(ErrorCode::DegeneratePhases, "phases do not resolve a fringe");
    }
    std::array<std::array<double, 3>, 3> inv{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const std::size_t c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    std::array<double, 3> beta{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            beta[i] += inv[i][j] * xty[j];
        }
    }

    double rss = 0.0;
    double vmin = points[0].value, vmax = points[0].value;
    bool explicit_variances = true;
    for (const auto &pt : points) {
        const double fitted =
            beta[0] + beta[1] * std::cos(pt.phase) + beta[2] * std::sin(pt.phase);
        rss += (pt.value - fitted) * (pt.value - fitted);
        vmin = std::min(vmin, pt.value);
        vmax = std::max(vmax, pt.value);
        explicit_variances = explicit_variances && pt.variance >= 0.0;
    }

    // Parameter covariance: sandwich with the given variances, or the
    // residual variance when none are given.
    std::array<std::array<double, 3>, 3> cov{};
    if (explicit_variances) {
        std::array<std::array<double, 3>, 3> meat{};
        for (const auto &pt : points) {
            const std::array<double, 3> row{1.0, std::cos(pt.phase), std::sin(pt.phase)};
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) {
                    meat[i][j] += row[i] * row[j] * pt.variance;
                }
            }
        }
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                for (std::size_t k = 0; k < 3; ++k) {
                    for (std::size_t l = 0; l < 3; ++l) {
                        cov[i][j] += inv[i][k] * meat[k][l] * inv[l][j];
                    }
                }
            }
        }
    } else {
        const double s2 = points.size() > 3 ? rss / static_cast<double>(points.size() - 3) : 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                cov[i][j] = inv[i][j] * s2;
            }
        }
    }

    FringeFit fit;
    fit.amplitude = beta[0];
    fit.residual = std::sqrt(rss / static_cast<double>(points.size()));
    fit.minmax_visibility = (vmax + vmin) > 0.0 ? (vmax - vmin) / (vmax + vmin) : 0.0;
    const double mod = std::hypot(beta[1], beta[2]);
    if (beta[0] == 0.0) {
        return fit;
    }
    fit.visibility = mod / beta[0];
    fit.phase_offset = std::atan2(-beta[2], -beta[1]);
    // Gradient of V = |(b1, b2)| / b0.
    std::array<double, 3> g{-fit.visibility / beta[0], 0.0, 0.0};
    if (mod > 0.0) {
        g[1] = beta[1] / (mod * beta[0]);
        g[2] = beta[2] / (mod * beta[0]);
    }
    double var = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            var += g[i] * cov[i][j] * g[j];
        }
    }
    fit.visibility_stderr = std::sqrt(std::max(0.0, var));
    return fit;
}

} // namespace tbswitch
