// Copyright 2026 The Photostat Authors
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

// photostat: simulate pulsed two-level emitters and analyze time-tag streams.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "photostat/config.h"
#include "photostat/correlator.h"
#include "photostat/detection.h"
#include "photostat/emitter.h"
#include "photostat/errors.h"
#include "photostat/gating.h"
#include "photostat/hom.h"
#include "photostat/lifetime.h"
#include "photostat/photon_number.h"
#include "photostat/report.h"
#include "photostat/selftest.h"
#include "photostat/tag_file.h"

#ifndef PHOTOSTAT_VERSION
#define PHOTOSTAT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace photostat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Common {
    std::string config;
    std::string out;
    std::optional<uint64_t> seed;
    unsigned threads = 0;
    std::string manifest;
};

class Manifest {
  public:
    explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
        j_["command"] = command_;
        j_["tool_version"] = PHOTOSTAT_VERSION;
        j_["inputs"] = json::array();
        j_["outputs"] = json::array();
        j_["config"] = json::object();
        j_["seed"] = nullptr;
    }

    void input(const fs::path &p) {
        j_["inputs"].push_back(p.string());
    }
    void output(const fs::path &p) {
        j_["outputs"].push_back(p.string());
    }
    json &config() {
        return j_["config"];
    }
    void seed(uint64_t s) {
        j_["seed"] = s;
    }

    void write(const fs::path &path, int exit_code, const std::string &error) {
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        j_["wall_clock_seconds"] = seconds;
        j_["exit_code"] = exit_code;
        j_["status"] = exit_code == kExitOk ? "ok" : "error";
        j_["error"] = error.empty() ? json(nullptr) : json(error);
        std::ofstream out(path);
        out << j_.dump(2) << "\n";
    }

  private:
    std::string command_;
    std::chrono::steady_clock::time_point start_;
    json j_;
};

fs::path manifest_path(const Common &c, const std::string &command) {
    if (!c.manifest.empty()) {
        return c.manifest;
    }
    if (c.out.empty()) {
        return "photostat-" + command + ".manifest.json";
    }
    if (fs::is_directory(c.out)) {
        return fs::path(c.out) / "manifest.json";
    }
    return c.out + ".manifest.json";
}

/// Runs a command body, mapping exceptions to exit codes, and always writes the manifest.
int run(const std::string &command, const Common &common, const std::function<void(Manifest &)> &body) {
    Manifest manifest(command);
    int code = kExitOk;
    std::string error;
    try {
        body(manifest);
    } catch (const validation_error &e) {
        code = kExitValidation;
        error = e.what();
    } catch (const data_error &e) {
        code = kExitData;
        error = e.what();
    } catch (const numerical_error &e) {
        code = kExitNumerical;
        error = e.what();
    } catch (const std::exception &e) {
        code = kExitFailed;
        error = e.what();
    }
    if (!error.empty()) {
        fmt::print(std::cerr, "photostat {}: error: {}\n", command, error);
    }
    try {
        manifest.write(manifest_path(common, command), code, error);
    } catch (const std::exception &e) {
        fmt::print(std::cerr, "photostat {}: cannot write manifest: {}\n", command, e.what());
    }
    return code;
}

void add_common(CLI::App *app, Common &c, bool with_config) {
    if (with_config) {
        app->add_option("--config", c.config, "JSON configuration file");
    }
    app->add_option("--out", c.out, "Output path");
    app->add_option("--seed", c.seed, "Override the random seed");
    app->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    app->add_option("--manifest", c.manifest, "Run manifest path (default: <out>.manifest.json)");
}

void require_out(const Common &c) {
    if (c.out.empty()) {
        throw validation_error("--out is required");
    }
}

std::ofstream open_output(const fs::path &path, Manifest &manifest) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw data_error("cannot write " + path.string());
    }
    manifest.output(path);
    return out;
}

void write_json(const fs::path &path, const json &j, Manifest &manifest) {
    auto out = open_output(path, manifest);
    out << j.dump(2) << "\n";
}

TimeTagStream load_stream(const std::string &path, Manifest &manifest) {
    if (path.empty()) {
        throw validation_error("--input is required");
    }
    manifest.input(path);
    return read_stream(path);
}

SimulationConfig load_config(const Common &c, Manifest &manifest) {
    if (c.config.empty()) {
        throw validation_error("--config is required");
    }
    manifest.input(c.config);
    auto config = load_simulation_config(c.config);
    if (c.seed) {
        config.emitter.seed = *c.seed;
    }
    manifest.seed(config.emitter.seed);
    manifest.config() = to_json(config);
    return config;
}

std::string theta_name(double theta) {
    return fmt::format("theta_{:.3f}pi.ptag", theta);
}

/// One simulated point: emissions (empty for reference sources) and the detected stream.
struct SimulatedPoint {
    EmissionLog log;
    TimeTagStream stream;
};

SimulatedPoint simulate_point(const SimulationConfig &config, size_t i, unsigned threads) {
    SimulatedPoint p;
    const auto &e = config.emitter;
    if (config.source) {
        p.stream = simulate_reference(*config.source, e.n_pulses, config.detection, e.seed, e.repetition_period_ps,
                                      e.lifetime_ps, threads);
        return p;
    }
    auto emitter = config.emitter_at(i);
    p.log = simulate_emissions(emitter, threads);
    p.stream = detect(p.log, config.detection, emitter.repetition_period_ps, emitter.seed, threads);
    return p;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    Common common;
    bool csv = false;
    std::string emission_times;
};

void cmd_simulate(const SimulateArgs &a, Manifest &manifest) {
    require_out(a.common);
    auto config = load_config(a.common, manifest);
    bool sweep = config.pulse_area_pi.size() > 1;
    if (sweep && config.source) {
        throw validation_error("pulse_area_pi: a sweep needs the emitter model, not a reference source");
    }
    fs::path out = a.common.out;
    std::ofstream index;
    if (sweep) {
        fs::create_directories(out);
        index = open_output(out / "sweep.csv", manifest);
        index << "theta_over_pi,file\n";
    }
    for (size_t i = 0; i < config.pulse_area_pi.size(); i++) {
        auto point = simulate_point(config, i, a.common.threads);
        fs::path file = sweep ? out / theta_name(config.pulse_area_pi[i]) : out;
        if (file.has_parent_path()) {
            fs::create_directories(file.parent_path());
        }
        write_stream(point.stream, file);
        manifest.output(file);
        if (a.csv) {
            auto csv = open_output(file.string() + ".csv", manifest);
            write_stream_csv(point.stream, csv);
        }
        if (!a.emission_times.empty() && !config.source) {
            fs::path path = sweep ? out / (theta_name(config.pulse_area_pi[i]) + ".emissions.csv")
                                  : fs::path(a.emission_times);
            auto csv = open_output(path, manifest);
            fmt::print(csv, "pulse_index,t_ps\n");
            for (size_t k = 0; k < point.log.n_pulses(); k++) {
                auto times = point.log.record(k).emission_times;
                if (!times.empty()) {
                    fmt::print(csv, "{},{:.6f}\n", k, times.front());
                }
            }
        }
        if (sweep) {
            fmt::print(index, "{},{}\n", config.pulse_area_pi[i], theta_name(config.pulse_area_pi[i]));
        }
        fmt::print("{}: {} tags ({} detector)\n", file.string(), point.stream.size(),
                   point.stream.count_detector_tags());
    }
}

// ---- correlate ------------------------------------------------------------

struct CorrelateArgs {
    Common common;
    std::string input;
    int order = 2;
    std::vector<int> channels;
    std::optional<picoseconds> bin_width;
    std::optional<picoseconds> max_delay;
    picoseconds window = kDefaultPeakWindow;
    std::optional<picoseconds> lifetime_bin;
    picoseconds fit_start = 250;
};

HistogramOptions histogram_options(int order, picoseconds period, std::optional<picoseconds> bin_width,
                                   std::optional<picoseconds> max_delay, picoseconds window, unsigned threads) {
    auto o = HistogramOptions::defaults(order, period);
    if (bin_width) {
        o.bin_width = *bin_width;
    }
    if (max_delay) {
        o.max_delay = *max_delay;
    }
    o.window = window;
    o.threads = threads;
    return o;
}

std::vector<uint8_t> channel_list(const std::vector<int> &channels) {
    std::vector<uint8_t> out;
    for (int c : channels) {
        if (c < 1 || c > 255) {
            throw validation_error("--channels: detector channels are 1..255, got " + std::to_string(c));
        }
        out.push_back(static_cast<uint8_t>(c));
    }
    return out;
}

void cmd_correlate(const CorrelateArgs &a, Manifest &manifest) {
    require_out(a.common);
    auto stream = load_stream(a.input, manifest);
    auto o = histogram_options(a.order, stream.clock_period(), a.bin_width, a.max_delay, a.window, a.common.threads);
    o.channels = channel_list(a.channels);
    auto present = stream.detector_channels();
    for (auto ch : o.channels) {
        if (std::find(present.begin(), present.end(), ch) == present.end()) {
            std::string list;
            for (auto p : present) {
                list += (list.empty() ? "" : ", ") + std::to_string(p);
            }
            throw data_error("channel " + std::to_string(ch) + " not in stream; channels present: " +
                             (list.empty() ? "none" : list));
        }
    }
    manifest.config() = {{"order", o.order},        {"bin_width_ps", o.bin_width}, {"max_delay_ps", o.max_delay},
                         {"window_ps", o.window},   {"channels", a.channels},      {"input", a.input}};

    auto h = static_cast<int>(o.channels.size()) == o.order ? build_histogram(stream, o)
                                                            : build_combined_histogram(stream, o);
    {
        auto csv = open_output(a.common.out + ".csv", manifest);
        write_histogram_csv(h, csv);
    }
    json report;
    report["histogram"] = to_json(h);
    auto g = g_zero(h);
    report["g_zero"] = to_json(g);
    fmt::print("g{}(0) = {:.6g} +{:.3g}/-{:.3g} (N_c = {}, N_u = {:.6g})\n", o.order, g.value, g.sigma_up,
               g.sigma_low, g.n_c, g.n_u_mean);
    if (o.order >= 3) {
        report["slices"] = json::array();
        for (const auto &s : g_lower_order_slices(h)) {
            report["slices"].push_back(to_json(s));
        }
        json combined;
        std::vector<SliceKind> kinds{SliceKind::pair};
        if (o.order == 4) {
            kinds = {SliceKind::pair, SliceKind::pair_pair, SliceKind::triple};
        }
        for (auto kind : kinds) {
            auto e = combined_slice_estimate(h, kind);
            combined[slice_kind_name(kind)] = to_json(e);
            fmt::print("  slices estimating {}: {:.6g} +{:.3g}/-{:.3g}\n", slice_kind_name(kind), e.value, e.sigma_up,
                       e.sigma_low);
        }
        report["combined_slices"] = combined;
    }
    if (a.lifetime_bin) {
        auto lh = lifetime_histogram(stream, *a.lifetime_bin);
        auto csv = open_output(a.common.out + ".lifetime.csv", manifest);
        write_lifetime_csv(lh, csv);
        auto fit = fit_lifetime(lh, a.fit_start);
        report["lifetime"] = to_json(fit);
        report["lifetime"]["fit_start_ps"] = a.fit_start;
        fmt::print("lifetime = {:.2f} ps\n", fit.tau_hat);
    }
    write_json(a.common.out + ".json", report, manifest);
}

// ---- extract-pn -----------------------------------------------------------

struct ExtractArgs {
    Common common;
    std::string input;
    std::string moments;
    std::string sweep;
    std::optional<double> eta;
    double eta_sigma = 0;
    std::string eta_from;
    bool estimate_eta = false;
};

MomentOptions moment_options(picoseconds period, unsigned threads) {
    MomentOptions o;
    o.g2 = HistogramOptions::defaults(2, period);
    o.g3 = MomentOptions::wide(3, 10, period);
    o.g4 = MomentOptions::wide(4, 20, period);
    for (auto *h : {&o.g2, &o.g3, &o.g4}) {
        h->threads = threads;
    }
    return o;
}

MomentSet moments_of(const fs::path &path, unsigned threads, Manifest &manifest) {
    auto stream = load_stream(path.string(), manifest);
    return measure_moments(stream, moment_options(stream.clock_period(), threads));
}

std::optional<Estimate> given_eta(const ExtractArgs &a, Manifest &manifest) {
    if (a.eta) {
        return Estimate{*a.eta, a.eta_sigma};
    }
    if (!a.eta_from.empty()) {
        manifest.input(a.eta_from);
        auto j = read_json_file(a.eta_from);
        if (!j.contains("eta") || !j["eta"].is_object() || !j["eta"].contains("value")) {
            throw validation_error(a.eta_from + ": no eta estimate recorded");
        }
        return Estimate{j["eta"]["value"].get<double>(), j["eta"].value("sigma", 0.0)};
    }
    return std::nullopt;
}

void cmd_extract_pn(const ExtractArgs &a, Manifest &manifest) {
    require_out(a.common);
    int modes = !a.input.empty() + !a.moments.empty() + !a.sweep.empty();
    if (modes != 1) {
        throw validation_error("give exactly one of --input, --moments, --sweep");
    }
    if (a.estimate_eta && (a.eta || !a.eta_from.empty())) {
        throw validation_error("--estimate-eta conflicts with --eta / --eta-from");
    }
    manifest.config() = {{"eta", a.eta ? json(*a.eta) : json(nullptr)},
                         {"eta_from", a.eta_from},
                         {"estimate_eta", a.estimate_eta}};
    auto eta = given_eta(a, manifest);

    if (!a.sweep.empty()) {
        fs::path dir = a.sweep;
        manifest.input(dir / "sweep.csv");
        std::ifstream index(dir / "sweep.csv");
        if (!index) {
            throw data_error("cannot read " + (dir / "sweep.csv").string());
        }
        std::string line;
        std::getline(index, line);
        std::vector<std::pair<double, MomentSet>> points;
        while (std::getline(index, line)) {
            auto comma = line.find(',');
            if (comma == std::string::npos) {
                continue;
            }
            double theta = std::stod(line.substr(0, comma));
            points.emplace_back(theta, moments_of(dir / line.substr(comma + 1), a.common.threads, manifest));
        }
        if (a.estimate_eta) {
            auto pi = std::find_if(points.begin(), points.end(), [](const auto &p) {
                return std::abs(p.first - 1.0) < 1e-9;
            });
            if (pi == points.end()) {
                throw validation_error("--estimate-eta needs a theta = 1 (pi pulse) point in the sweep");
            }
            eta = estimate_eta_from_moments(pi->second);
        }
        auto csv = open_output(a.common.out, manifest);
        fmt::print(csv, "theta_over_pi,p0,p1,pi2,pi3,pi4\n");
        for (const auto &[theta, m] : points) {
            try {
                auto r = extract_photon_numbers(m, eta);
                const auto &d = r.source ? *r.source : r.detected;
                fmt::print(csv, "{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", theta, d.p[0], d.p[1], r.purity[1],
                           r.purity[2], r.purity[3]);
            } catch (const std::runtime_error &e) {
                fmt::print(std::cerr, "theta = {}: {}\n", theta, e.what());
                fmt::print(csv, "{},nan,nan,nan,nan,nan\n", theta);
            }
        }
        return;
    }

    MomentSet m;
    if (!a.input.empty()) {
        m = moments_of(a.input, a.common.threads, manifest);
    } else {
        manifest.input(a.moments);
        m = moments_from_json(read_json_file(a.moments));
    }
    if (a.estimate_eta) {
        eta = estimate_eta_from_moments(m);
    }
    auto r = extract_photon_numbers(m, eta);
    const auto &d = r.source ? *r.source : r.detected;
    fmt::print("mu = {:.6g}, {} p = [{:.6g}, {:.6g}, {:.6g}, {:.6g}, {:.6g}]\n", r.mu,
               r.source ? "source" : "detected", d.p[0], d.p[1], d.p[2], d.p[3], d.p[4]);
    if (r.eta) {
        fmt::print("eta = {:.6g} +- {:.3g}\n", r.eta->value, r.eta->sigma);
    }
    write_json(a.common.out, to_json(r), manifest);
}

// ---- gate-scan ------------------------------------------------------------

struct GateScanArgs {
    Common common;
    std::string input;
    std::vector<picoseconds> t_starts;
    std::string t_start_range;
    picoseconds t_stop = GateWindow{}.t_stop;
    picoseconds offset = 0;
    std::optional<picoseconds> bin_width;
    std::optional<picoseconds> max_delay;
    picoseconds window = kDefaultPeakWindow;
};

std::vector<picoseconds> parse_range(const std::string &text) {
    std::vector<picoseconds> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stoll(item));
        } catch (const std::exception &) {
            throw validation_error("--t-start-range: expected start:stop:step, got '" + text + "'");
        }
    }
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
        throw validation_error("--t-start-range: expected start:stop:step with step > 0");
    }
    std::vector<picoseconds> out;
    for (picoseconds t = parts[0]; t <= parts[1]; t += parts[2]) {
        out.push_back(t);
    }
    return out;
}

void cmd_gate_scan(const GateScanArgs &a, Manifest &manifest) {
    require_out(a.common);
    auto stream = load_stream(a.input, manifest);
    std::vector<picoseconds> starts = a.t_starts;
    if (!a.t_start_range.empty()) {
        auto more = parse_range(a.t_start_range);
        starts.insert(starts.end(), more.begin(), more.end());
    }
    if (starts.empty()) {
        starts = {0, 50, 100, 150, 200};
    }
    auto o = histogram_options(2, stream.clock_period(), a.bin_width, a.max_delay, a.window, a.common.threads);
    manifest.config() = {{"t_start_ps", starts}, {"t_stop_ps", a.t_stop}, {"offset_ps", a.offset},
                         {"bin_width_ps", o.bin_width}, {"max_delay_ps", o.max_delay}, {"window_ps", o.window}};
    auto points = gated_g2_scan(stream, starts, a.t_stop, o, a.offset);
    auto csv = open_output(a.common.out, manifest);
    write_gate_scan_csv(points, csv);
    for (const auto &p : points) {
        fmt::print("t_start = {:>5} ps: rate = {:.4g} cps, g2(0) = {:.4g} +{:.2g}/-{:.2g}\n", p.gate.t_start,
                   p.count_rate_cps, p.g2.value, p.g2.sigma_up, p.g2.sigma_low);
    }
}

// ---- hom ------------------------------------------------------------------

struct HomArgs {
    Common common;
    std::optional<double> v_raw;
    std::optional<double> central;
    std::optional<double> reference;
    double pattern_factor = 2.0;
    std::optional<double> g2;
    std::string emission_times;
    double tau = 204.0;
    picoseconds t_start = 150;
    picoseconds t_stop = GateWindow{}.t_stop;
};

double nan_if_bunched(double m, double g2) {
    return g2 >= 0 && g2 < 1 ? expected_visibility(m, g2) : std::nan("");
}

std::optional<double> g2_or_nothing(const TimeTagStream &stream, unsigned threads) {
    try {
        auto o = HistogramOptions::defaults(2, stream.clock_period());
        o.threads = threads;
        return g_zero(build_combined_histogram(stream, o)).value;
    } catch (const data_error &) {
        return std::nullopt;
    }
}

std::vector<double> read_emission_times(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot read " + path.string());
    }
    std::string line;
    std::getline(in, line);
    std::vector<double> times;
    while (std::getline(in, line)) {
        auto comma = line.rfind(',');
        try {
            times.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
        } catch (const std::exception &) {
            throw data_error(path.string() + ": bad emission time '" + line + "'");
        }
    }
    return times;
}

void cmd_hom(const HomArgs &a, Manifest &manifest) {
    require_out(a.common);
    manifest.config() = {{"tau_ps", a.tau},
                         {"t_start_ps", a.t_start},
                         {"t_stop_ps", a.t_stop},
                         {"pattern_factor", a.pattern_factor}};

    if (!a.common.config.empty()) {
        auto config = load_config(a.common, manifest);
        if (config.source) {
            throw validation_error("source: hom sweeps need the emitter model");
        }
        GateWindow gate{a.t_start, a.t_stop};
        validate_gate(gate, config.emitter.repetition_period_ps);
        double emission_start = static_cast<double>(a.t_start - config.detection.delay_ps);
        auto csv = open_output(a.common.out, manifest);
        fmt::print(csv, "theta_over_pi,V_raw,g2,M,V_gated,count_rate\n");
        for (size_t i = 0; i < config.pulse_area_pi.size(); i++) {
            auto point = simulate_point(config, i, a.common.threads);
            auto pairs = first_emission_pairs(point.log);
            auto gated = apply_gate(point.stream, gate);
            auto g2 = g2_or_nothing(point.stream, a.common.threads);
            auto g2_gated = g2_or_nothing(gated, a.common.threads);
            double m = std::nan("");
            double m_gated = std::nan("");
            try {
                m = overlap_from_emission_times(pairs, a.tau);
                m_gated = overlap_from_emission_times(pairs, a.tau, emission_start);
            } catch (const data_error &e) {
                fmt::print(std::cerr, "theta = {}: {}\n", config.pulse_area_pi[i], e.what());
            }
            double v = g2 ? nan_if_bunched(m, *g2) : std::nan("");
            double v_gated = g2_gated ? nan_if_bunched(m_gated, *g2_gated) : std::nan("");
            double rate = static_cast<double>(gated.count_detector_tags()) / acquisition_seconds(point.stream);
            fmt::print(csv, "{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", config.pulse_area_pi[i], v,
                       g2.value_or(std::nan("")), m, v_gated, rate);
        }
        return;
    }

    if (!a.emission_times.empty()) {
        manifest.input(a.emission_times);
        auto times = read_emission_times(a.emission_times);
        std::vector<EmissionPair> pairs;
        for (size_t i = 0; i + 1 < times.size(); i += 2) {
            pairs.emplace_back(times[i], times[i + 1]);
        }
        double m = overlap_from_emission_times(pairs, a.tau);
        double m_gated = overlap_from_emission_times(pairs, a.tau, static_cast<double>(a.t_start));
        auto csv = open_output(a.common.out, manifest);
        fmt::print(csv, "t_start_ps,M\n0,{:.10g}\n{},{:.10g}\n", m, a.t_start, m_gated);
        fmt::print("M = {:.6g}, gated at {} ps: {:.6g}\n", m, a.t_start, m_gated);
        return;
    }

    if (!a.g2) {
        throw validation_error("--g2 is required to correct a measured visibility");
    }
    double v;
    if (a.v_raw) {
        v = *a.v_raw;
    } else if (a.central && a.reference) {
        v = visibility_from_counts(*a.central, *a.reference, a.pattern_factor);
    } else {
        throw validation_error("give --config, --emission-times, --v-raw, or --central with --reference");
    }
    HomReport r{v, *a.g2, correct_visibility(v, *a.g2), std::nullopt};
    auto csv = open_output(a.common.out, manifest);
    fmt::print(csv, "V_raw,g2,M\n{:.10g},{:.10g},{:.10g}\n", r.v_raw, r.g2, r.m);
    fmt::print("V_raw = {:.6g}, g2 = {:.6g}, M = {:.6g}\n", r.v_raw, r.g2, r.m);
}

// ---- selftest -------------------------------------------------------------

int cmd_selftest(const Common &common) {
    bool all = true;
    int code = run("selftest", common, [&](Manifest &manifest) {
        manifest.config() = {{"threads", common.threads}};
        auto results = run_selftest(common.threads);
        size_t width = 0;
        for (const auto &r : results) {
            width = std::max(width, r.name.size());
        }
        for (const auto &r : results) {
            fmt::print("{:<{}}  {}  {}\n", r.name, width, r.passed ? "PASS" : "FAIL", r.detail);
            all = all && r.passed;
        }
    });
    return code != kExitOk ? code : (all ? kExitOk : kExitFailed);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Photon statistics of pulsed two-level emitters from time-tag streams"};
    app.set_version_flag("--version", PHOTOSTAT_VERSION);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "Simulate a pulsed emitter (or reference source) to a tag file");
    add_common(simulate, sim.common, true);
    simulate->add_flag("--csv", sim.csv, "Also write time_ps,channel CSV next to each tag file");
    simulate->add_option("--emission-times", sim.emission_times, "Write first emission times per pulse (CSV)");

    CorrelateArgs cor;
    auto *correlate = app.add_subcommand("correlate", "Correlation histogram and g(m)(0) of a tag file");
    add_common(correlate, cor.common, false);
    correlate->add_option("--input,input", cor.input, "Tag file")->required();
    correlate->add_option("-m,--order", cor.order, "Correlation order (2..4)");
    correlate->add_option("--channels", cor.channels, "Channels per axis position (default: all combinations)")
        ->delimiter(',');
    correlate->add_option("--bin-width", cor.bin_width, "Bin width in ps");
    correlate->add_option("--max-delay", cor.max_delay, "Delay axis half range in ps");
    correlate->add_option("--window", cor.window, "Peak integration window in ps");
    correlate->add_option("--lifetime-bin", cor.lifetime_bin, "Also fit the lifetime histogram with this bin (ps)");
    correlate->add_option("--fit-start", cor.fit_start, "Start of the lifetime fit after the clock (ps)");

    ExtractArgs ext;
    auto *extract = app.add_subcommand("extract-pn", "Photon-number probabilities from correlations");
    add_common(extract, ext.common, false);
    extract->add_option("--input", ext.input, "Tag file (runs m = 2..4 correlations)");
    extract->add_option("--moments", ext.moments, "JSON with g2, g3, g4, b_prime");
    extract->add_option("--sweep", ext.sweep, "Directory written by a simulate sweep (CSV output)");
    extract->add_option("--eta", ext.eta, "Transmission used to undo loss");
    extract->add_option("--eta-sigma", ext.eta_sigma, "Uncertainty of --eta");
    extract->add_option("--eta-from", ext.eta_from, "Reuse the eta estimate stored in an extract-pn JSON");
    extract->add_flag("--estimate-eta", ext.estimate_eta, "Estimate eta assuming a pi pulse");

    GateScanArgs gs;
    auto *gate_scan = app.add_subcommand("gate-scan", "g2(0) and count rate versus gate start");
    add_common(gate_scan, gs.common, false);
    gate_scan->add_option("--input,input", gs.input, "Tag file")->required();
    gate_scan->add_option("--t-start", gs.t_starts, "Gate starts in ps")->delimiter(',');
    gate_scan->add_option("--t-start-range", gs.t_start_range, "Gate starts as start:stop:step (ps)");
    gate_scan->add_option("--t-stop", gs.t_stop, "Gate stop in ps");
    gate_scan->add_option("--offset", gs.offset, "Clock-to-signal offset subtracted before gating (ps)");
    gate_scan->add_option("--bin-width", gs.bin_width, "Bin width in ps");
    gate_scan->add_option("--max-delay", gs.max_delay, "Delay axis half range in ps");
    gate_scan->add_option("--window", gs.window, "Peak integration window in ps");

    HomArgs hom;
    auto *hom_cmd = app.add_subcommand("hom", "Wavepacket overlap and corrected HOM visibility");
    add_common(hom_cmd, hom.common, true);
    hom_cmd->add_option("--v-raw", hom.v_raw, "Measured raw visibility");
    hom_cmd->add_option("--central", hom.central, "Central-peak coincidences");
    hom_cmd->add_option("--reference", hom.reference, "Reference coincidences");
    hom_cmd->add_option("--pattern-factor", hom.pattern_factor, "Peak-pattern normalization");
    hom_cmd->add_option("--g2", hom.g2, "g2(0) of the source");
    hom_cmd->add_option("--emission-times", hom.emission_times, "Emission-time CSV (consecutive rows pair up)");
    hom_cmd->add_option("--tau", hom.tau, "Wavepacket decay time in ps");
    hom_cmd->add_option("--t-start", hom.t_start, "Gate start in ps");
    hom_cmd->add_option("--t-stop", hom.t_stop, "Gate stop in ps");

    Common st;
    auto *selftest = app.add_subcommand("selftest", "Oracle and reference-source checks");
    selftest->add_option("--threads", st.threads, "Worker threads (0 = all cores)");
    selftest->add_option("--manifest", st.manifest, "Run manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (*simulate) {
        return run("simulate", sim.common, [&](Manifest &m) { cmd_simulate(sim, m); });
    }
    if (*correlate) {
        return run("correlate", cor.common, [&](Manifest &m) { cmd_correlate(cor, m); });
    }
    if (*extract) {
        return run("extract-pn", ext.common, [&](Manifest &m) { cmd_extract_pn(ext, m); });
    }
    if (*gate_scan) {
        return run("gate-scan", gs.common, [&](Manifest &m) { cmd_gate_scan(gs, m); });
    }
    if (*hom_cmd) {
        return run("hom", hom.common, [&](Manifest &m) { cmd_hom(hom, m); });
    }
    return cmd_selftest(st);
}
