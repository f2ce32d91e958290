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

#include "photostat/report.h"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "photostat/errors.h"

namespace photostat {

using nlohmann::json;

namespace {

Measured measured(const json &j, const char *key) {
    if (!j.contains(key)) {
        throw validation_error(std::string("moments: missing ") + key);
    }
    const json &v = j[key];
    if (v.is_number()) {
        return {v.get<double>(), 0, 0};
    }
    if (!v.is_object() || !v.contains("value") || !v["value"].is_number()) {
        throw validation_error(std::string("moments.") + key + ": expected a number or {value, sigma_low, sigma_up}");
    }
    Measured m;
    m.value = v["value"].get<double>();
    m.sigma_low = v.value("sigma_low", 0.0);
    m.sigma_up = v.value("sigma_up", m.sigma_low);
    return m;
}

json probabilities(const std::array<double, kMaxPhotonNumber + 1> &p) {
    return json(std::vector<double>(p.begin(), p.end()));
}

}  // namespace

const char *slice_kind_name(SliceKind kind) {
    switch (kind) {
    case SliceKind::pair:
        return "g2";
    case SliceKind::pair_pair:
        return "g2_squared";
    case SliceKind::triple:
        return "g3";
    }
    return "";
}

json to_json(const GEstimate &g) {
    return {
        {"value", g.value},
        {"sigma_low", g.sigma_low},
        {"sigma_up", g.sigma_up},
        {"N_c", g.n_c},
        {"N_u_mean", g.n_u_mean},
        {"N_u_sigma", g.n_u_sigma},
        {"n_uncorrelated_peaks", g.n_uncorrelated_peaks},
        {"n_correlated_peaks", g.n_correlated_peaks},
    };
}

json to_json(const SliceEstimate &s) {
    json j = to_json(s.estimate);
    j["label"] = s.label;
    j["estimates"] = slice_kind_name(s.kind);
    return j;
}

json to_json(const Measured &m) {
    return {{"value", m.value}, {"sigma_low", m.sigma_low}, {"sigma_up", m.sigma_up}};
}

json to_json(const MomentSet &m) {
    return {{"g2", to_json(m.g2)}, {"g3", to_json(m.g3)}, {"g4", to_json(m.g4)}, {"b_prime", to_json(m.b_prime)}};
}

json to_json(const PhotonNumberDist &d) {
    json j;
    j["p"] = probabilities(d.p);
    j["level"] = d.level == DistributionLevel::source ? "source" : "detected";
    j["eta_applied"] = d.eta_applied ? json(*d.eta_applied) : json(nullptr);
    j["truncated"] = d.truncated;
    return j;
}

json to_json(const PhotonNumberReport &r) {
    json j;
    j["moments"] = to_json(r.moments);
    j["mu"] = r.mu;
    j["detected"] = to_json(r.detected);
    j["detected"]["sigma"] = probabilities(r.detected_sigma);
    if (r.eta) {
        j["eta"] = {{"value", r.eta->value}, {"sigma", r.eta->sigma}};
    } else {
        j["eta"] = nullptr;
    }
    if (r.source) {
        j["source"] = to_json(*r.source);
        j["source"]["sigma"] = probabilities(r.source_sigma);
    } else {
        j["source"] = nullptr;
    }
    j["purities"] = {{"level", r.source ? "source" : "detected"},
                     {"pi", std::vector<double>(r.purity.begin(), r.purity.end())},
                     {"sigma", std::vector<double>(r.purity_sigma.begin(), r.purity_sigma.end())}};
    return j;
}

json to_json(const LifetimeFit &f) {
    return {{"tau_hat_ps", f.tau_hat},
            {"amplitude", f.amplitude},
            {"offset", f.offset},
            {"residual_norm", f.residual_norm},
            {"n_bins", f.n_bins}};
}

json to_json(const CorrelationHistogram &h) {
    return {{"order", h.order},
            {"bin_width_ps", h.bin_width},
            {"max_delay_ps", h.max_delay},
            {"clock_period_ps", h.clock_period},
            {"window_ps", h.peaks.window},
            {"channel_sets", h.channel_sets},
            {"total_tags_per_channel", h.channel_totals}};
}

MomentSet moments_from_json(const json &j) {
    const json &m = j.contains("moments") ? j["moments"] : j;
    if (!m.is_object()) {
        throw validation_error("moments: expected a JSON object");
    }
    MomentSet out;
    out.g2 = measured(m, "g2");
    out.g3 = measured(m, "g3");
    out.g4 = measured(m, "g4");
    out.b_prime = measured(m, "b_prime");
    out.validate();
    return out;
}

void write_histogram_csv(const CorrelationHistogram &h, std::ostream &out) {
    if (h.order == 4) {
        fmt::print(out, "k1,k2,k3,counts\n");
        for (size_t i = 0; i < h.peaks.size(); i++) {
            if (h.peaks.counts[i] == 0) {
                continue;
            }
            auto p = h.peaks.point(i);
            fmt::print(out, "{},{},{},{}\n", p[0], p[1], p[2], h.peaks.counts[i]);
        }
        return;
    }
    int len = h.bins_per_axis();
    int half = len / 2;
    if (h.order == 2) {
        fmt::print(out, "tau_ps,counts\n");
        for (int b = 0; b < len; b++) {
            fmt::print(out, "{},{}\n", (b - half) * h.bin_width, h.counts[b]);
        }
        return;
    }
    fmt::print(out, "tau1_ps,tau2_ps,counts\n");
    for (int a = 0; a < len; a++) {
        for (int b = 0; b < len; b++) {
            fmt::print(out, "{},{},{}\n", (a - half) * h.bin_width, (b - half) * h.bin_width,
                       h.counts[static_cast<size_t>(a) * len + b]);
        }
    }
}

void write_lifetime_csv(const LifetimeHistogram &h, std::ostream &out) {
    fmt::print(out, "t_ps,counts\n");
    for (size_t i = 0; i < h.counts.size(); i++) {
        fmt::print(out, "{},{}\n", static_cast<picoseconds>(i) * h.bin_width, h.counts[i]);
    }
}

void write_gate_scan_csv(std::span<const GateScanPoint> points, std::ostream &out) {
    fmt::print(out, "t_start_ps,count_rate_cps,g2,sigma_low,sigma_up\n");
    for (const auto &p : points) {
        fmt::print(out, "{},{:.10g},{:.10g},{:.10g},{:.10g}\n", p.gate.t_start, p.count_rate_cps, p.g2.value,
                   p.g2.sigma_low, p.g2.sigma_up);
    }
}

}  // namespace photostat
