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

#ifndef PHOTOSTAT_REPORT_H
#define PHOTOSTAT_REPORT_H

#include <ostream>
#include <span>

#include <json.hpp>

#include "photostat/correlator.h"
#include "photostat/gating.h"
#include "photostat/lifetime.h"
#include "photostat/photon_number.h"

namespace photostat {

nlohmann::json to_json(const GEstimate &g);
nlohmann::json to_json(const SliceEstimate &s);
nlohmann::json to_json(const Measured &m);
nlohmann::json to_json(const MomentSet &m);
nlohmann::json to_json(const PhotonNumberDist &d);
nlohmann::json to_json(const PhotonNumberReport &r);
nlohmann::json to_json(const LifetimeFit &f);
nlohmann::json to_json(const CorrelationHistogram &h);

const char *slice_kind_name(SliceKind kind);

/// Accepts either {"value", "sigma_low", "sigma_up"} objects or bare numbers
/// for g2, g3, g4 and b_prime.
MomentSet moments_from_json(const nlohmann::json &j);

/// m = 2: tau_ps,counts. m = 3: tau1_ps,tau2_ps,counts. m = 4: the nonzero
/// lattice peaks as k1,k2,k3,counts.
void write_histogram_csv(const CorrelationHistogram &h, std::ostream &out);
void write_lifetime_csv(const LifetimeHistogram &h, std::ostream &out);
void write_gate_scan_csv(std::span<const GateScanPoint> points, std::ostream &out);

}  // namespace photostat

#endif
