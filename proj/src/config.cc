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

#include "photostat/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "photostat/errors.h"

namespace photostat {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "pulse_area_pi", "pulse_duration_ps", "pulse_shape", "lifetime_ps", "repetition_period_ps",
    "n_pulses",      "eta_t",             "n_detectors", "splitting",   "jitter_ps",
    "delay_ps",      "background_cps",    "seed",        "source",
};

double number(const json &j, const std::string &key) {
    if (!j.is_number()) {
        throw validation_error(key + ": expected a number");
    }
    return j.get<double>();
}

uint64_t count(const json &j, const std::string &key) {
    if (!j.is_number_integer() || j.get<int64_t>() < 0) {
        throw validation_error(key + ": expected a non-negative integer");
    }
    return j.get<uint64_t>();
}

std::vector<double> pulse_areas(const json &j) {
    const std::string key = "pulse_area_pi";
    std::vector<double> out;
    if (j.is_number()) {
        out.push_back(j.get<double>());
    } else if (j.is_array()) {
        for (const auto &v : j) {
            out.push_back(number(v, key));
        }
    } else if (j.is_object()) {
        for (const char *k : {"start", "stop", "step"}) {
            if (!j.contains(k)) {
                throw validation_error(key + ": sweep needs start, stop and step");
            }
        }
        out = linear_grid(number(j["start"], key + ".start"), number(j["stop"], key + ".stop"),
                          number(j["step"], key + ".step"));
    } else {
        throw validation_error(key + ": expected a number, a list or {start, stop, step}");
    }
    if (out.empty()) {
        throw validation_error(key + ": no pulse areas given");
    }
    for (double v : out) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw validation_error(key + ": pulse areas must be finite and non-negative");
        }
    }
    return out;
}

ReferenceSource parse_source(const json &j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw validation_error("source: expected {\"type\": \"coherent\" | \"thermal\" | \"fock\", ...}");
    }
    std::string type = j["type"];
    if (type == "fock") {
        if (!j.contains("n")) {
            throw validation_error("source.n: required for a fock source");
        }
        return FockSource{static_cast<int>(count(j["n"], "source.n"))};
    }
    if (!j.contains("mean")) {
        throw validation_error("source.mean: required for a " + type + " source");
    }
    double mean = number(j["mean"], "source.mean");
    if (!(mean >= 0)) {
        throw validation_error("source.mean: must be non-negative");
    }
    if (type == "coherent") {
        return CoherentSource{mean};
    }
    if (type == "thermal") {
        return ThermalSource{mean};
    }
    throw validation_error("source.type: unknown source type '" + type + "'");
}

}  // namespace

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0) || !(stop >= start)) {
        throw validation_error("grid needs step > 0 and stop >= start");
    }
    auto n = static_cast<size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (size_t i = 0; i < n; i++) {
        out.push_back(start + step * static_cast<double>(i));
    }
    return out;
}

EmitterConfig SimulationConfig::emitter_at(size_t i) const {
    EmitterConfig e = emitter;
    e.pulse_area = pulse_area_pi.at(i) * std::numbers::pi;
    return e;
}

SimulationConfig parse_simulation_config(const json &j) {
    if (!j.is_object()) {
        throw validation_error("config: expected a JSON object");
    }
    for (const auto &item : j.items()) {
        if (!kKnownKeys.count(item.key())) {
            throw validation_error(item.key() + ": unknown config key");
        }
    }
    SimulationConfig c;
    auto &e = c.emitter;
    auto &d = c.detection;
    if (j.contains("pulse_area_pi")) {
        c.pulse_area_pi = pulse_areas(j["pulse_area_pi"]);
    }
    if (j.contains("pulse_duration_ps")) {
        e.pulse_duration_ps = number(j["pulse_duration_ps"], "pulse_duration_ps");
    }
    if (j.contains("pulse_shape")) {
        const auto &s = j["pulse_shape"];
        if (s == "square") {
            e.pulse_shape = PulseShape::square;
        } else if (s == "gaussian") {
            e.pulse_shape = PulseShape::gaussian;
        } else {
            throw validation_error("pulse_shape: expected \"square\" or \"gaussian\"");
        }
    }
    if (j.contains("lifetime_ps")) {
        e.lifetime_ps = number(j["lifetime_ps"], "lifetime_ps");
    }
    if (j.contains("repetition_period_ps")) {
        e.repetition_period_ps = static_cast<picoseconds>(count(j["repetition_period_ps"], "repetition_period_ps"));
    }
    if (j.contains("n_pulses")) {
        e.n_pulses = count(j["n_pulses"], "n_pulses");
    }
    if (j.contains("seed")) {
        e.seed = count(j["seed"], "seed");
    }
    if (j.contains("eta_t")) {
        d.eta_t = number(j["eta_t"], "eta_t");
    }
    if (j.contains("n_detectors")) {
        d.n_detectors = static_cast<int>(count(j["n_detectors"], "n_detectors"));
    }
    if (j.contains("splitting")) {
        if (!j["splitting"].is_array()) {
            throw validation_error("splitting: expected a list of probabilities");
        }
        d.splitting.clear();
        for (const auto &v : j["splitting"]) {
            d.splitting.push_back(number(v, "splitting"));
        }
    }
    if (j.contains("jitter_ps")) {
        d.jitter_ps = number(j["jitter_ps"], "jitter_ps");
    }
    if (j.contains("delay_ps")) {
        d.delay_ps = static_cast<picoseconds>(count(j["delay_ps"], "delay_ps"));
    }
    if (j.contains("background_cps")) {
        d.background_cps = number(j["background_cps"], "background_cps");
    }
    if (j.contains("source")) {
        c.source = parse_source(j["source"]);
    }
    for (size_t i = 0; i < c.pulse_area_pi.size(); i++) {
        c.emitter_at(i).validate();
    }
    d.validate();
    return c;
}

json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw validation_error(path.string() + ": " + e.what());
    }
}

SimulationConfig load_simulation_config(const std::filesystem::path &path) {
    return parse_simulation_config(read_json_file(path));
}

json to_json(const SimulationConfig &c) {
    json j;
    j["pulse_area_pi"] = c.pulse_area_pi.size() == 1 ? json(c.pulse_area_pi[0]) : json(c.pulse_area_pi);
    j["pulse_duration_ps"] = c.emitter.pulse_duration_ps;
    j["pulse_shape"] = c.emitter.pulse_shape == PulseShape::square ? "square" : "gaussian";
    j["lifetime_ps"] = c.emitter.lifetime_ps;
    j["repetition_period_ps"] = c.emitter.repetition_period_ps;
    j["n_pulses"] = c.emitter.n_pulses;
    j["seed"] = c.emitter.seed;
    j["eta_t"] = c.detection.eta_t;
    j["n_detectors"] = c.detection.n_detectors;
    j["splitting"] = c.detection.resolved_splitting();
    j["jitter_ps"] = c.detection.jitter_ps;
    j["delay_ps"] = c.detection.delay_ps;
    j["background_cps"] = c.detection.background_cps;
    if (c.source) {
        std::visit(
            [&](const auto &s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, CoherentSource>) {
                    j["source"] = {{"type", "coherent"}, {"mean", s.mean}};
                } else if constexpr (std::is_same_v<S, ThermalSource>) {
                    j["source"] = {{"type", "thermal"}, {"mean", s.mean}};
                } else {
                    j["source"] = {{"type", "fock"}, {"n", s.n}};
                }
            },
            *c.source);
    }
    return j;
}

}  // namespace photostat
