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
 * Sparse bosonic Fock states over (port, time bin, distinguishability
 * branch) modes, and the linear-optics primitives every element reduces to.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tbswitch/error.hpp"

namespace tbswitch {

using Complex = std::complex<double>;

/// Spatial rail. A..D are the switch ports; values from 4 upward are
/// ancilla/vacuum rails (see ancilla_port()).
enum class Port : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

constexpr int kFirstAncilla = 4;

constexpr Port ancilla_port(int k) {
    return static_cast<Port>(kFirstAncilla + k);
}
constexpr bool is_ancilla(Port p) {
    return static_cast<int>(p) >= kFirstAncilla;
}

inline std::string port_name(Port p) {
    switch (p) {
    case Port::A: return "A";
    case Port::B: return "B";
    case Port::C: return "C";
    case Port::D: return "D";
    }
    return "Anc" + std::to_string(static_cast<int>(p) - kFirstAncilla);
}

/// Distinguishability sub-mode. Parallel and orthogonal branches never
/// interfere with each other.
enum class Branch : std::uint8_t { parallel = 0, orthogonal = 1 };

struct ModeLabel {
    Port port = Port::A;
    int time_bin = 1;
    Branch branch = Branch::parallel;

    // Ordered by port, then time bin, then branch.
    auto operator<=>(const ModeLabel &) const = default;
};

inline std::string to_string(const ModeLabel &m) {
    std::string s = port_name(m.port) + ":t" + std::to_string(m.time_bin);
    if (m.branch == Branch::orthogonal) {
        s += "'";
    }
    return s;
}

/// Truncation limits shared by every state in one simulation.
struct Limits {
    int max_photons = 4;
    int max_time_bin = 3;

    auto operator<=>(const Limits &) const = default;
};

/// Sparse occupation numbers. Entries are kept sorted by mode and every
/// stored count is strictly positive.
class OccupationVector {
  public:
    using Entry = std::pair<ModeLabel, int>;

    OccupationVector() = default;
    OccupationVector(std::initializer_list<Entry> entries) {
        for (const auto &[mode, n] : entries) {
            add(mode, n);
        }
    }

    [[nodiscard]] int count(const ModeLabel &mode) const {
        auto it = find(mode);
        return (it != entries_.end() && it->first == mode) ? it->second : 0;
    }

    /// Adds `n` photons to `mode` (n may be negative as long as the result
    /// stays non-negative).
    void add(const ModeLabel &mode, int n) {
        if (n == 0) {
            return;
        }
        auto it = find(mode);
        if (it != entries_.end() && it->first == mode) {
            it->second += n;
            if (it->second == 0) {
                entries_.erase(it);
            } else if (it->second < 0) {
                throw Error(ErrorCode::InvalidArgument,
                            "negative occupation at " + to_string(mode));
            }
        } else {
            if (n < 0) {
                throw Error(ErrorCode::InvalidArgument,
                            "negative occupation at " + to_string(mode));
            }
            entries_.insert(it, {mode, n});
        }
    }

    void set(const ModeLabel &mode, int n) { add(mode, n - count(mode)); }

    [[nodiscard]] int total() const {
        int t = 0;
        for (const auto &e : entries_) {
            t += e.second;
        }
        return t;
    }

    [[nodiscard]] int at_port(Port p) const {
        int t = 0;
        for (const auto &[mode, n] : entries_) {
            if (mode.port == p) {
                t += n;
            }
        }
        return t;
    }

    /// Photons at (port, bin) summed over both branches: what a gated
    /// detector on that port sees.
    [[nodiscard]] int at_port_bin(Port p, int bin) const {
        int t = 0;
        for (const auto &[mode, n] : entries_) {
            if (mode.port == p && mode.time_bin == bin) {
                t += n;
            }
        }
        return t;
    }

    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] auto begin() const { return entries_.begin(); }
    [[nodiscard]] auto end() const { return entries_.end(); }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    auto operator<=>(const OccupationVector &) const = default;
    bool operator==(const OccupationVector &) const = default;

  private:
    std::vector<Entry>::iterator find(const ModeLabel &mode) {
        return std::lower_bound(
            entries_.begin(), entries_.end(), mode,
            [](const Entry &e, const ModeLabel &m) { return e.first < m; });
    }
    [[nodiscard]] std::vector<Entry>::const_iterator
    find(const ModeLabel &mode) const {
        return std::lower_bound(
            entries_.begin(), entries_.end(), mode,
            [](const Entry &e, const ModeLabel &m) { return e.first < m; });
    }

    std::vector<Entry> entries_;
};

inline std::string to_string(const OccupationVector &occ) {
    if (occ.empty()) {
        return "|vac>";
    }
    std::string s = "|";
    bool first = true;
    for (const auto &[mode, n] : occ) {
        if (!first) {
            s += ",";
        }
        first = false;
        s += std::to_string(n) + "@" + to_string(mode);
    }
    return s + ">";
}

inline constexpr double kDefaultPruneTolerance = 1e-12;

/// Sparse superposition of occupation vectors. Sub-normalized states are
/// allowed (post-selection, lossy maps); nothing here renormalizes except
/// project().
class PureState {
  public:
    using Terms = std::map<OccupationVector, Complex>;

    explicit PureState(Limits limits = {},
                       double tolerance = kDefaultPruneTolerance)
        : limits_(limits), tolerance_(tolerance) {}

    static PureState vacuum(Limits limits = {}) {
        PureState s(limits);
        s.add({}, 1.0);
        return s;
    }

    static PureState basis(const OccupationVector &occ, Limits limits = {}) {
        PureState s(limits);
        s.add(occ, 1.0);
        return s;
    }

    /// Accumulates `amp` onto `occ`. Used while building states; no pruning
    /// happens until prune() or an element application.
    void add(const OccupationVector &occ, Complex amp) {
        if (occ.total() > limits_.max_photons) {
            throw Error(ErrorCode::TruncationOverflow,
                        to_string(occ) + " exceeds " +
                            std::to_string(limits_.max_photons) + " photons");
        }
        for (const auto &[mode, n] : occ) {
            if (mode.time_bin < 1 || mode.time_bin > limits_.max_time_bin) {
                throw Error(ErrorCode::TimeBinOverflow,
                            "time bin out of range in " + to_string(occ));
            }
        }
        terms_[occ] += amp;
    }

    void prune() {
        std::erase_if(terms_, [this](const auto &kv) {
            return std::abs(kv.second) < tolerance_;
        });
    }

    [[nodiscard]] Complex amplitude(const OccupationVector &occ) const {
        auto it = terms_.find(occ);
        return it == terms_.end() ? Complex{} : it->second;
    }

    [[nodiscard]] double norm2() const {
        double s = 0.0;
        for (const auto &[occ, amp] : terms_) {
            s += std::norm(amp);
        }
        return s;
    }

    [[nodiscard]] std::set<ModeLabel> modes() const {
        std::set<ModeLabel> out;
        for (const auto &[occ, amp] : terms_) {
            for (const auto &[mode, n] : occ) {
                out.insert(mode);
            }
        }
        return out;
    }

    [[nodiscard]] int max_total_photons() const {
        int m = 0;
        for (const auto &[occ, amp] : terms_) {
            m = std::max(m, occ.total());
        }
        return m;
    }

    [[nodiscard]] const Terms &terms() const { return terms_; }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] bool empty() const { return terms_.empty(); }
    [[nodiscard]] const Limits &limits() const { return limits_; }
    [[nodiscard]] double tolerance() const { return tolerance_; }
    [[nodiscard]] auto begin() const { return terms_.begin(); }
    [[nodiscard]] auto end() const { return terms_.end(); }

    /// Returns a copy with every amplitude multiplied by `factor`.
    [[nodiscard]] PureState scaled(Complex factor) const {
        PureState out(limits_, tolerance_);
        for (const auto &[occ, amp] : terms_) {
            out.terms_[occ] = amp * factor;
        }
        out.prune();
        return out;
    }

  private:
    Limits limits_;
    double tolerance_;
    Terms terms_;
};

/// Inner product <a|b>.
inline Complex inner(const PureState &a, const PureState &b) {
    Complex s{};
    for (const auto &[occ, amp] : a) {
        s += std::conj(amp) * b.amplitude(occ);
    }
    return s;
}

/// |<a|b>|^2 / (|a|^2 |b|^2).
inline double fidelity(const PureState &a, const PureState &b) {
    const double na = a.norm2();
    const double nb = b.norm2();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::norm(inner(a, b)) / (na * nb);
}

/// Largest elementwise amplitude difference over the union of supports.
inline double max_abs_difference(const PureState &a, const PureState &b) {
    double d = 0.0;
    for (const auto &[occ, amp] : a) {
        d = std::max(d, std::abs(amp - b.amplitude(occ)));
    }
    for (const auto &[occ, amp] : b) {
        d = std::max(d, std::abs(amp - a.amplitude(occ)));
    }
    return d;
}

/// 2x2 mode-pair matrix. Column 0 is the image of mode u, column 1 the image
/// of mode v:  a_u^+ -> m00 a_u^+ + m10 a_v^+,  a_v^+ -> m01 a_u^+ + m11 a_v^+.
struct Mat2 {
    Complex m00{1.0}, m01{}, m10{}, m11{1.0};

    static Mat2 identity() { return {}; }

    /// Switch rotation for arm phase difference `theta`: the u column is
    /// (cos(theta/2), -sin(theta/2)), the v column (sin(theta/2), cos(theta/2)).
    static Mat2 rotation(double theta) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        return {c, s, -s, c};
    }

    [[nodiscard]] Mat2 operator*(const Mat2 &o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }

    [[nodiscard]] Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01),
                std::conj(m11)};
    }

    [[nodiscard]] double unitarity_error() const {
        const Mat2 p = adjoint() * (*this);
        return std::max({std::abs(p.m00 - 1.0), std::abs(p.m01),
                         std::abs(p.m10), std::abs(p.m11 - 1.0)});
    }
};

namespace detail {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

inline double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

inline Complex ipow(Complex z, int n) {
    Complex r{1.0};
    for (int i = 0; i < n; ++i) {
        r *= z;
    }
    return r;
}

} // namespace detail

/// Applies the two-mode bosonic map described by `m` to modes u and v.
///
/// A term with j photons in u and k in v expands as
///   (m00 a_u + m10 a_v)^j (m01 a_u + m11 a_v)^k / sqrt(j! k!)
/// whose monomials a_u^r a_v^(j+k-r) |0> carry sqrt(r! (j+k-r)!).
/// Photon number is conserved term by term.
inline PureState apply_mode_pair_unitary(const PureState &state,
                                         const ModeLabel &u,
                                         const ModeLabel &v, const Mat2 &m,
                                         bool check_unitary = true) {
    if (u == v) {
        throw Error(ErrorCode::InvalidArgument,
                    "mode pair must be distinct: " + to_string(u));
    }
    if (check_unitary && m.unitarity_error() > 1e-12) {
        throw Error(ErrorCode::NonUnitaryMatrix,
                    "unitarity error " + std::to_string(m.unitarity_error()));
    }
    using detail::binomial;
    using detail::factorial;
    using detail::ipow;

    PureState out(state.limits(), state.tolerance());
    for (const auto &[occ, amp] : state) {
        const int j = occ.count(u);
        const int k = occ.count(v);
        if (j == 0 && k == 0) {
            out.add(occ, amp);
            continue;
        }
        OccupationVector rest = occ;
        rest.set(u, 0);
        rest.set(v, 0);
        const double in_norm = std::sqrt(factorial(j) * factorial(k));
        // Coefficient of a_u^r a_v^(j+k-r) in the operator product.
        std::vector<Complex> coeff(static_cast<std::size_t>(j + k + 1));
        for (int p = 0; p <= j; ++p) {
            const Complex cu = binomial(j, p) * ipow(m.m00, p) *
                               ipow(m.m10, j - p);
            for (int q = 0; q <= k; ++q) {
                const Complex cv = binomial(k, q) * ipow(m.m01, q) *
                                   ipow(m.m11, k - q);
                coeff[static_cast<std::size_t>(p + q)] += cu * cv;
            }
        }
        for (int r = 0; r <= j + k; ++r) {
            const Complex c = coeff[static_cast<std::size_t>(r)];
            if (c == Complex{}) {
                continue;
            }
            OccupationVector next = rest;
            next.add(u, r);
            next.add(v, j + k - r);
            const double out_norm =
                std::sqrt(factorial(r) * factorial(j + k - r));
            out.add(next, amp * c * out_norm / in_norm);
        }
    }
    out.prune();
    return out;
}

/// Image of one creation operator under a linear (possibly non-unitary)
/// mode map: a_mode^+ -> sum_i coeff_i a_{mode_i}^+.
using CreationImage = std::vector<std::pair<ModeLabel, Complex>>;

/// Returns the image for modes that the map touches, std::nullopt for modes
/// it leaves alone.
using CreationMap = std::function<std::optional<CreationImage>(const ModeLabel &)>;

/// Substitutes every creation operator simultaneously according to `map`
/// and re-normal-orders into occupation vectors. Works for isometries as
/// well as lossy (sub-normalizing) maps.
inline PureState apply_creation_map(const PureState &state,
                                    const CreationMap &map) {
    using detail::factorial;
    PureState out(state.limits(), state.tolerance());
    for (const auto &[occ, amp] : state) {
        // Operators that stay put go straight into the seed monomial.
        OccupationVector seed;
        std::vector<const CreationImage *> operators;
        std::vector<CreationImage> images;
        images.reserve(occ.size());
        double in_norm = 1.0;
        for (const auto &[mode, n] : occ) {
            in_norm *= factorial(n);
            auto image = map(mode);
            if (!image) {
                seed.add(mode, n);
                continue;
            }
            images.push_back(std::move(*image));
            for (int i = 0; i < n; ++i) {
                operators.push_back(&images.back());
            }
        }
        // `images` never reallocates after the reserve above, so the
        // pointers stay valid.
        std::map<OccupationVector, Complex> monomials{{seed, Complex{1.0}}};
        for (const CreationImage *image : operators) {
            std::map<OccupationVector, Complex> next;
            for (const auto &[mono, c] : monomials) {
                for (const auto &[target, coeff] : *image) {
                    if (coeff == Complex{}) {
                        continue;
                    }
                    OccupationVector grown = mono;
                    grown.add(target, 1);
                    next[grown] += c * coeff;
                }
            }
            monomials = std::move(next);
        }
        const double scale = 1.0 / std::sqrt(in_norm);
        for (const auto &[mono, c] : monomials) {
            double out_norm = 1.0;
            for (const auto &[mode, n] : mono) {
                out_norm *= factorial(n);
            }
            out.add(mono, amp * c * scale * std::sqrt(out_norm));
        }
    }
    out.prune();
    return out;
}

/// Product state of two states on disjoint modes.
inline PureState tensor(const PureState &a, const PureState &b) {
    const auto ma = a.modes();
    for (const auto &mode : b.modes()) {
        if (ma.contains(mode)) {
            throw Error(ErrorCode::ModeCollision,
                        "both states occupy " + to_string(mode));
        }
    }
    PureState out(a.limits(), std::max(a.tolerance(), b.tolerance()));
    for (const auto &[oa, xa] : a) {
        for (const auto &[ob, xb] : b) {
            OccupationVector joined = oa;
            for (const auto &[mode, n] : ob) {
                joined.add(mode, n);
            }
            out.add(joined, xa * xb);
        }
    }
    out.prune();
    return out;
}

struct Projection {
    PureState state;
    double probability = 0.0;
};

/// Keeps the terms satisfying `keep`, renormalized. `probability` is the
/// kept weight relative to the input norm.
inline Projection project(const PureState &state,
                          const std::function<bool(const OccupationVector &)> &keep) {
    PureState kept(state.limits(), state.tolerance());
    for (const auto &[occ, amp] : state) {
        if (keep(occ)) {
            kept.add(occ, amp);
        }
    }
    const double total = state.norm2();
    const double weight = kept.norm2();
    if (kept.empty() || weight == 0.0 || total == 0.0) {
        throw Error(ErrorCode::EmptyProjection, "no term satisfies predicate");
    }
    return {kept.scaled(1.0 / std::sqrt(weight)), weight / total};
}

} // namespace tbswitch
