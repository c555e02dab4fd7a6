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
 * Run configuration files, numeric list arguments and CSV output.
 *
 * Configuration is a sectioned key = value text file:
 *
 *     [source]     mu, pair_truncation, pulse_fwhm_ps, statistics,
 *                  preparation_transmission
 *     [switch]     extinction_db, insertion_loss_db, extinction_model
 *     [detectors]  efficiency, dark_prob_per_gate, charlie_efficiency,
 *                  david_efficiency, charlie_dark, david_dark, extra_loss_db
 *     [run]        pulses, seed, workers, ideal, photon_limit
 *
 * Every key is optional; an empty file yields the default experiment.
 * Lines starting with '#' or ';' are comments.
 */

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tbswitch/error.hpp"
#include "tbswitch/experiments.hpp"

namespace tbswitch {

inline constexpr std::string_view kVersion = "0.1.0";

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view text) {
    const std::string_view t = trim(text);
    if (t == "inf" || t == "+inf" || t == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw Error(ErrorCode::InvalidConfig, "not a number: '" + std::string(t) + "'");
    }
    return v;
}

template <typename Int> Int parse_integer(std::string_view text) {
    const std::string_view t = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        // Accept integral values written in floating notation, e.g. 1e6.
        const double d = parse_double(t);
        if (d != std::floor(d) || std::abs(d) > 9.0e15) {
            throw Error(ErrorCode::InvalidConfig, "not an integer: '" + std::string(t) + "'");
        }
        return static_cast<Int>(d);
    }
    return v;
}

inline bool parse_bool(std::string_view text) {
    const std::string_view t = trim(text);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw Error(ErrorCode::InvalidConfig, "not a boolean: '" + std::string(t) + "'");
}

} // namespace detail

/// Phase in radians; accepts plain numbers and multiples of pi such as
/// "pi", "2pi", "-pi/2", "1.5pi", "3pi/4".
inline double parse_phase(std::string_view text) {
    std::string_view t = detail::trim(text);
    const auto at = t.find("pi");
    if (at == std::string_view::npos) {
        return detail::parse_double(t);
    }
    std::string_view coef = detail::trim(t.substr(0, at));
    std::string_view rest = detail::trim(t.substr(at + 2));
    double factor = 1.0;
    if (coef == "-") {
        factor = -1.0;
    } else if (!coef.empty() && coef != "+") {
        if (coef.back() == '*') {
            coef.remove_suffix(1);
        }
        factor = detail::parse_double(coef);
    }
    if (!rest.empty()) {
        if (rest.front() != '/') {
            throw Error(ErrorCode::InvalidConfig, "bad phase '" + std::string(t) + "'");
        }
        factor /= detail::parse_double(rest.substr(1));
    }
    return factor * std::numbers::pi;
}

/// Comma-separated values or an inclusive range "start:stop:step".
inline std::vector<double> parse_list(std::string_view text,
                                      const std::function<double(std::string_view)> &item) {
    const std::string_view t = detail::trim(text);
    std::vector<double> out;
    if (t.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        for (std::size_t pos; (pos = t.find(':', start)) != std::string_view::npos;
             start = pos + 1) {
            parts.push_back(t.substr(start, pos - start));
        }
        parts.push_back(t.substr(start));
        if (parts.size() != 3) {
            throw Error(ErrorCode::InvalidConfig, "range must be start:stop:step");
        }
        const double a = item(parts[0]), b = item(parts[1]), step = item(parts[2]);
        if (!(step > 0.0) || !(b >= a)) {
            throw Error(ErrorCode::InvalidConfig, "range needs step > 0 and stop >= start");
        }
        const auto n = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9));
        if (n > 100000) {
            throw Error(ErrorCode::InvalidConfig, "range has too many points");
        }
        for (std::int64_t i = 0; i <= n; ++i) {
            out.push_back(a + static_cast<double>(i) * step);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= t.size()) {
        const auto pos = t.find(',', start);
        const auto piece = t.substr(start, pos == std::string_view::npos ? t.npos : pos - start);
        out.push_back(item(piece));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

/// Range checks on a configuration; throws InvalidConfig.
inline void validate_config(const ExperimentConfig &c) {
    const auto fail = [](const std::string &what) {
        throw Error(ErrorCode::InvalidConfig, what);
    };
    try {
        c.source.validate();
        c.schedule.validate();
        c.charlie.validate();
        c.david.validate();
    } catch (const Error &e) {
        fail(e.what());
    }
    if (!(c.preparation_transmission > 0.0 && c.preparation_transmission <= 1.0)) {
        fail("preparation_transmission must be in (0, 1]");
    }
    if (!(c.extra_loss_db >= 0.0) || !std::isfinite(c.extra_loss_db)) {
        fail("extra_loss_db must be finite and >= 0");
    }
    if (c.pulses < 0) {
        fail("pulses must be >= 0");
    }
    if (c.workers < 1 || c.workers > 256) {
        fail("workers must be in 1..256");
    }
    if (c.photon_limit < 2 || c.photon_limit > 8) {
        fail("photon_limit must be in 2..8");
    }
}

/// Parses configuration text on top of the default experiment.
inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw Error(ErrorCode::InvalidConfig, where() + "unterminated section");
            }
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "source" && section != "switch" && section != "detectors" &&
                section != "run") {
                throw Error(ErrorCode::InvalidConfig, where() + "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidConfig, where() + "expected key = value");
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        try {
            if (full == "source.mu") {
                c.source.mu = detail::parse_double(value);
            } else if (full == "source.pair_truncation") {
                c.source.pair_truncation = detail::parse_integer<int>(value);
            } else if (full == "source.pulse_fwhm_ps") {
                c.source.pulse_fwhm_ps = detail::parse_double(value);
            } else if (full == "source.statistics") {
                if (value == "thermal") {
                    c.source.statistics = PairStatistics::thermal;
                } else if (value == "poissonian") {
                    c.source.statistics = PairStatistics::poissonian;
                } else {
                    throw Error(ErrorCode::InvalidConfig, "statistics must be thermal or poissonian");
                }
            } else if (full == "source.preparation_transmission") {
                c.preparation_transmission = detail::parse_double(value);
            } else if (full == "switch.extinction_db") {
                c.schedule.extinction_db = detail::parse_double(value);
            } else if (full == "switch.insertion_loss_db") {
                c.schedule.insertion_loss_db = detail::parse_double(value);
            } else if (full == "switch.extinction_model") {
                if (value == "coherent") {
                    c.schedule.model = ExtinctionModel::coherent;
                } else if (value == "bias_ensemble") {
                    c.schedule.model = ExtinctionModel::bias_ensemble;
                } else {
                    throw Error(ErrorCode::InvalidConfig,
                                "extinction_model must be coherent or bias_ensemble");
                }
            } else if (full == "detectors.efficiency") {
                c.charlie.efficiency = c.david.efficiency = detail::parse_double(value);
            } else if (full == "detectors.dark_prob_per_gate") {
                c.charlie.dark_prob_per_gate = c.david.dark_prob_per_gate =
                    detail::parse_double(value);
            } else if (full == "detectors.charlie_efficiency") {
                c.charlie.efficiency = detail::parse_double(value);
            } else if (full == "detectors.david_efficiency") {
                c.david.efficiency = detail::parse_double(value);
            } else if (full == "detectors.charlie_dark") {
                c.charlie.dark_prob_per_gate = detail::parse_double(value);
            } else if (full == "detectors.david_dark") {
                c.david.dark_prob_per_gate = detail::parse_double(value);
            } else if (full == "detectors.extra_loss_db") {
                c.extra_loss_db = detail::parse_double(value);
            } else if (full == "run.pulses") {
                c.pulses = detail::parse_integer<std::int64_t>(value);
            } else if (full == "run.seed") {
                c.seed = detail::parse_integer<std::uint64_t>(value);
            } else if (full == "run.workers") {
                c.workers = detail::parse_integer<int>(value);
            } else if (full == "run.photon_limit") {
                c.photon_limit = detail::parse_integer<int>(value);
            } else if (full == "run.ideal") {
                c.ideal = detail::parse_bool(value);
            } else {
                throw Error(ErrorCode::InvalidConfig, "unknown key '" + full + "'");
            }
        } catch (const Error &e) {
            throw Error(ErrorCode::InvalidConfig, where() + e.what());
        }
    }
    validate_config(c);
    return c;
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidConfig, "cannot read config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

/// Shortest round-trip decimal form, locale independent.
inline std::string format_number(double v) {
    if (v == 0.0) {
        return "0";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_number(std::int64_t v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// CSV document with '#' metadata lines, a header row and '\n' endings.
class CsvTable {
  public:
    CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void meta(const std::string &key, const std::string &value) {
        meta_.push_back("# " + key + "=" + value);
    }

    void row(const std::vector<std::string> &cells) {
        if (cells.size() != header_.size()) {
            throw Error(ErrorCode::InvalidArgument, "row width does not match header");
        }
        rows_.push_back(cells);
    }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (const auto &m : meta_) {
            out += m + "\n";
        }
        out += join(header_);
        for (const auto &r : rows_) {
            out += join(r);
        }
        return out;
    }

    void write(const std::string &path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
        }
        f << str();
    }

  private:
    static std::string join(const std::vector<std::string> &cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            line += (i ? "," : "") + cells[i];
        }
        return line + "\n";
    }

    std::vector<std::string> header_;
    std::vector<std::string> meta_;
    std::vector<std::vector<std::string>> rows_;
};

inline CsvTable hom_table(const ScanResult &scan) {
    CsvTable t({"delay_ps", "coincidences", "singles_c", "singles_d", "rate", "rate_stderr"});
    for (const auto &p : scan.points) {
        t.row({format_number(p.setting), format_number(p.counts.coincidences),
               format_number(p.counts.singles_c), format_number(p.counts.singles_d),
               format_number(p.rate), format_number(p.rate_stderr)});
    }
    return t;
}

inline CsvTable fringe_table(const ScanResult &scan) {
    CsvTable t({"phi_c", "coincidences", "accidentals", "subtracted", "singles_c"});
    for (const auto &p : scan.points) {
        t.row({format_number(p.setting), format_number(p.counts.coincidences),
               format_number(p.counts.accidentals_estimate),
               format_number(subtracted_coincidences(p.counts)),
               format_number(p.counts.singles_c)});
    }
    return t;
}

/// Analytic-only scans (pulses = 0) carry probabilities instead of counts.
inline CsvTable analytic_table(const ScanResult &scan) {
    CsvTable t({scan.variable, "p_coincidence", "p_singles_c", "p_singles_d"});
    for (const auto &p : scan.points) {
        t.row({format_number(p.setting), format_number(p.analytic_coincidence),
               format_number(p.analytic_singles_c), format_number(p.analytic_singles_d)});
    }
    return t;
}

inline void add_run_metadata(CsvTable &t, std::uint64_t hash, std::uint64_t seed) {
    t.meta("tbswitch_version", std::string(kVersion));
    t.meta("config_hash", hex64(hash));
    t.meta("seed", std::to_string(seed));
}

} // namespace tbswitch
