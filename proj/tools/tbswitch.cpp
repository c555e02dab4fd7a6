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

// tbswitch: command-line driver for the time-bin switch experiments.
//
//   tbswitch hom-scan    [--config F] [--delays L] [--pulses N] [--seed S] [--ideal] --out F
//   tbswitch fringe-scan [--config F] --david-phase P [--phases L] ... --out F
//   tbswitch delay-scan  [--config F] [--charlie-phase P] [--delays L] ... --out F
//   tbswitch cz-check    [--extinction-db X] --out F
//
// Exit codes: 0 success, 2 configuration error, 3 runtime invariant
// violation, 4 gate contract failure. TBSWITCH_CONFIG names a default
// config file.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbswitch/config.hpp"
#include "tbswitch/experiments.hpp"
#include "tbswitch/gates.hpp"

namespace {

using namespace tbswitch;
using Json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitGate = 4;

struct RunOptions {
    std::string config_path;
    std::string out;
    std::optional<std::int64_t> pulses;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool ideal = false;
};

struct GateContractFailure {};

void add_run_options(CLI::App &cmd, RunOptions &o) {
    cmd.add_option("-c,--config", o.config_path, "Configuration file (default: $TBSWITCH_CONFIG)");
    cmd.add_option("--pulses", o.pulses, "Pulses per scan point (0: exact probabilities only)");
    cmd.add_option("--seed", o.seed, "Master seed");
    cmd.add_option("--workers", o.workers, "Monte-Carlo worker threads");
    cmd.add_flag("--ideal", o.ideal, "Single pair, perfect detectors and switch, no loss");
    cmd.add_option("-o,--out", o.out, "Output CSV path")->required();
}

ExperimentConfig resolve_config(const RunOptions &o) {
    std::string path = o.config_path;
    if (path.empty()) {
        if (const char *env = std::getenv("TBSWITCH_CONFIG"); env != nullptr) {
            path = env;
        }
    }
    ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
    if (o.pulses) {
        c.pulses = *o.pulses;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.workers) {
        c.workers = *o.workers;
    }
    c.ideal = c.ideal || o.ideal;
    validate_config(c);
    return c;
}

std::vector<double> increasing(std::vector<double> values, const char *flag) {
    if (values.empty() || !std::is_sorted(values.begin(), values.end(), std::less_equal<>())) {
        throw tbswitch::Error(tbswitch::ErrorCode::InvalidConfig,
                              std::string(flag) + " must be strictly increasing");
    }
    return values;
}

std::vector<double> delays_or(const std::string &text, const std::string &fallback) {
    return increasing(parse_list(text.empty() ? fallback : text,
                                 [](std::string_view s) { return detail::parse_double(s); }),
                      "--delays");
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Sidecar with the run metadata that must not enter the CSV body.
void write_manifest(const std::string &out, const std::string &command,
                    const ExperimentConfig &c, const std::vector<std::string> &outputs,
                    double seconds, Json extra = Json::object()) {
    Json j;
    j["tool"] = "tbswitch";
    j["version"] = std::string(kVersion);
    j["command"] = command;
    j["config_hash"] = hex64(config_hash(c));
    j["config"] = canonical_string(c);
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["outputs"] = outputs;
    j["wall_clock_s"] = seconds;
    if (!extra.empty()) {
        j["results"] = std::move(extra);
    }
    std::ofstream f(out + ".manifest.json", std::ios::binary);
    f << j.dump(2) << "\n";
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CsvTable table_for(const ScanResult &scan, CsvTable (*sampled)(const ScanResult &)) {
    CsvTable t = scan.sampled() ? sampled(scan) : analytic_table(scan);
    add_run_metadata(t, scan.config_hash, scan.seed);
    return t;
}

int hom_command(const RunOptions &o, const std::string &delays_text) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = resolve_config(o);
    const ScanResult scan = hom_scan(delays_or(delays_text, "-300:300:10"), c);
    table_for(scan, hom_table).write(o.out);

    Json results;
    if (scan.points.size() < 3) {
        std::cout << "fewer than 3 delays, no dip fit\n";
        write_manifest(o.out, "hom-scan", c, {o.out}, elapsed(t0), results);
        return 0;
    }
    const double fwhm = c.effective().source.pulse_fwhm_ps;
    const DipFit exact = fit_dip(scan, fwhm, true);
    results["analytic_visibility"] = exact.visibility;
    if (scan.sampled()) {
        const DipFit fit = fit_dip(scan, fwhm, false);
        std::cout << "dip visibility " << fmt(fit.visibility) << " +- "
                  << fmt(fit.visibility_stderr) << " (exact model " << fmt(exact.visibility)
                  << ")\n";
        results["visibility"] = fit.visibility;
        results["visibility_stderr"] = fit.visibility_stderr;
    } else {
        std::cout << "dip visibility (exact) " << fmt(exact.visibility) << "\n";
    }
    write_manifest(o.out, "hom-scan", c, {o.out}, elapsed(t0), results);
    return 0;
}

int fringe_command(const RunOptions &o, const std::string &david_phase,
                   const std::string &phases_text) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = resolve_config(o);
    const std::vector<double> phases = increasing(
        parse_list(phases_text.empty() ? "0:11pi/6:pi/6" : phases_text, parse_phase),
        "--phases");
    const ScanResult scan = fringe_scan(phases, parse_phase(david_phase), c);
    table_for(scan, fringe_table).write(o.out);

    Json results;
    if (scan.points.size() < 5) {
        std::cout << "fewer than 5 phases, no fringe fit\n";
        write_manifest(o.out, "fringe-scan", c, {o.out}, elapsed(t0), results);
        return 0;
    }
    const FringeSummary s = summarize_fringe(scan);
    results["analytic_visibility"] = s.analytic.visibility;
    if (scan.sampled()) {
        const auto report = [&](const char *name, const FringeFit &f) {
            std::cout << name << " visibility " << fmt(f.visibility) << " +- "
                      << fmt(f.visibility_stderr) << "  werner witness "
                      << (werner_witness(std::clamp(f.visibility, -1.0, 1.0)) ? "true" : "false")
                      << "\n";
            results[std::string(name) + "_visibility"] = f.visibility;
            results[std::string(name) + "_visibility_stderr"] = f.visibility_stderr;
        };
        report("raw", s.raw);
        report("subtracted", s.subtracted);
        std::cout << "singles_c modulation " << fmt(s.singles.visibility) << " +- "
                  << fmt(s.singles.visibility_stderr) << "\n";
        results["singles_visibility"] = s.singles.visibility;
    } else {
        std::cout << "visibility (exact) " << fmt(s.analytic.visibility) << "  werner witness "
                  << (werner_witness(std::clamp(s.analytic.visibility, -1.0, 1.0)) ? "true" : "false")
                  << "\n";
    }
    write_manifest(o.out, "fringe-scan", c, {o.out}, elapsed(t0), results);
    return 0;
}

std::string with_suffix(const std::string &path, const std::string &suffix) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int delay_command(const RunOptions &o, const std::string &charlie_phase,
                  const std::string &delays_text) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = resolve_config(o);
    const std::vector<double> delays = delays_or(delays_text, "-300:300:20");
    std::vector<std::pair<std::string, double>> traces;
    if (charlie_phase.empty()) {
        traces = {{"pi", std::numbers::pi}, {"2pi", 2.0 * std::numbers::pi}};
    } else {
        traces = {{charlie_phase, parse_phase(charlie_phase)}};
    }
    const double plateau_min = 3.0 * c.effective().source.pulse_fwhm_ps;
    std::vector<std::string> outputs;
    Json results;
    for (const auto &[label, phase] : traces) {
        const ScanResult scan = delay_scan(delays, phase, c);
        const std::string path = traces.size() == 1 ? o.out : with_suffix(o.out, "_" + label);
        CsvTable t = table_for(scan, hom_table);
        t.meta("charlie_phase", format_number(phase));
        t.write(path);
        outputs.push_back(path);
        const DelayContrast dc = delay_contrast(scan, plateau_min, !scan.sampled());
        std::cout << "charlie phase " << label << ": rate(0)/plateau " << fmt(dc.ratio());
        if (scan.sampled()) {
            std::cout << " +- " << fmt(dc.ratio_stderr());
        }
        std::cout << "  [" << path << "]\n";
        results[label] = {{"ratio", dc.ratio()}, {"ratio_stderr", dc.ratio_stderr()}};
    }
    write_manifest(o.out, "delay-scan", c, outputs, elapsed(t0), results);
    return 0;
}

int cz_command(const std::string &out, double extinction_db) {
    const auto t0 = std::chrono::steady_clock::now();
    const GateReport r = cz_report({extinction_db});
    static const std::array<const char *, 4> labels{"t2t2", "t2t1", "t1t2", "t1t1"};
    CsvTable t({"out_basis", "in_basis", "re", "im"});
    t.meta("tbswitch_version", std::string(kVersion));
    t.meta("extinction_db", format_number(extinction_db));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            t.row({labels[i], labels[j], format_number(r.op[i][j].real()),
                   format_number(r.op[i][j].imag())});
        }
    }
    t.write(out);

    std::cout << "process fidelity " << fmt(r.fidelity, 12) << "\n";
    Json success = Json::object();
    for (std::size_t j = 0; j < 4; ++j) {
        std::cout << "success " << labels[j] << " " << fmt(r.success[j], 12) << "\n";
        success[labels[j]] = r.success[j];
    }
    std::cout << "concurrence on |+>|+> " << fmt(r.plus_plus_concurrence, 12) << "\n";
    std::cout << "swap asymmetry " << r.swap_asymmetry << "\n";

    Json report;
    report["fidelity"] = r.fidelity;
    report["success"] = success;
    report["max_off_diagonal"] = r.max_off_diagonal;
    report["plus_plus_concurrence"] = r.plus_plus_concurrence;
    report["swap_asymmetry"] = r.swap_asymmetry;
    Json j;
    j["tool"] = "tbswitch";
    j["version"] = std::string(kVersion);
    j["command"] = "cz-check";
    j["extinction_db"] = std::isfinite(extinction_db) ? Json(extinction_db) : Json("inf");
    j["outputs"] = {out};
    j["wall_clock_s"] = elapsed(t0);
    j["results"] = report;
    std::ofstream(out + ".manifest.json", std::ios::binary) << j.dump(2) << "\n";

    if (!std::isfinite(extinction_db) && !cz_contract_holds(r)) {
        throw GateContractFailure{};
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Time-bin entangling switch simulator"};
    app.set_version_flag("--version", std::string(tbswitch::kVersion));
    app.require_subcommand(1);

    RunOptions hom_opts, fringe_opts, delay_opts;
    std::string hom_delays, fringe_phases, fringe_david, delay_delays, delay_charlie;
    std::string cz_out;
    double cz_extinction = std::numeric_limits<double>::infinity();

    auto *hom = app.add_subcommand("hom-scan", "Two-photon interference dip vs delay");
    add_run_options(*hom, hom_opts);
    hom->add_option("--delays", hom_delays, "Delays in ps: list or start:stop:step");

    auto *fringe = app.add_subcommand("fringe-scan", "Coincidence fringe vs Charlie's phase");
    add_run_options(*fringe, fringe_opts);
    fringe->add_option("--david-phase", fringe_david, "David's phase, e.g. 0 or pi/2")
        ->required();
    fringe->add_option("--phases", fringe_phases, "Charlie's phases: list or start:stop:step");

    auto *delay = app.add_subcommand("delay-scan", "Coincidences vs delay at fixed phases");
    add_run_options(*delay, delay_opts);
    delay->add_option("--charlie-phase", delay_charlie, "pi or 2pi (default: both traces)");
    delay->add_option("--delays", delay_delays, "Delays in ps: list or start:stop:step");

    auto *cz = app.add_subcommand("cz-check", "Verify the three-switch CZ gate");
    cz->add_option("-o,--out", cz_out, "Output CSV path")->required();
    cz->add_option("--extinction-db", cz_extinction, "Finite switch extinction (report only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*hom) {
            return hom_command(hom_opts, hom_delays);
        }
        if (*fringe) {
            return fringe_command(fringe_opts, fringe_david, fringe_phases);
        }
        if (*delay) {
            return delay_command(delay_opts, delay_charlie, delay_delays);
        }
        return cz_command(cz_out, cz_extinction);
    } catch (const GateContractFailure &) {
        std::cerr << "error: CZ gate contract violated\n";
        return kExitGate;
    } catch (const tbswitch::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == tbswitch::ErrorCode::InvalidConfig ? kExitConfig : kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
