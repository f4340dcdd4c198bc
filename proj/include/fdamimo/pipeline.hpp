// SPDX-License-Identifier: Apache-2.0
//
// fdamimo - FDA-MIMO radar multipath identification and mitigation toolkit
// Copyright (C) 2026 The fdamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "fdamimo/scenario.hpp"
#include <vector>

namespace fdamimo
{
    WaveformSet make_waveforms(const Scenario &s);

    RadarConfig with_delta_f(const RadarConfig &cfg, double delta_f_hz);

    // Virtual steering at a target's bin-centre range and angle (direct path signature)
    CVec target_steering(const RadarConfig &cfg, const Target &t, double sample_rate_hz, const CVec &tx_weights);
    CVec target_steering(const RadarConfig &cfg, const Target &t, double sample_rate_hz);

    struct DetectionRun
    {
        std::vector<RangeProfile> profiles; // one beam per scene target
        std::vector<DetectionSet> sets;
        std::vector<double> ranges_m;       // union over beams, ascending, unique bins
    };

    // Beamform toward every scene target, run CA-CFAR on each profile, merge the detections
    DetectionRun detect_targets(const EchoCube &cube, const Scene &scene, const CfarParams &cfar);

    // Range-profile level (dB relative to the direct-path bin) at the bin nearest range_m
    double level_relative_to(const RangeProfile &p, double range_m, double reference_range_m);
}
