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

#include "fdamimo/pipeline.hpp"

#include <algorithm>
#include <set>

namespace fdamimo
{
    WaveformSet make_waveforms(const Scenario &s)
    {
        return build_waveform_set(s.radar, s.samples_per_pulse, s.waveform_seed, s.chip_mode);
    }

    RadarConfig with_delta_f(const RadarConfig &cfg, double delta_f_hz)
    {
        RadarConfig c = cfg;
        c.freq_increment_hz = delta_f_hz;
        c.validate();
        return c;
    }

    CVec target_steering(const RadarConfig &cfg, const Target &t, double sample_rate_hz, const CVec &tx_weights)
    {
        return virtual_steering(cfg, quantized_range(t.range_m, sample_rate_hz), t.angle_rad, t.angle_rad, tx_weights);
    }

    CVec target_steering(const RadarConfig &cfg, const Target &t, double sample_rate_hz)
    {
        return target_steering(cfg, t, sample_rate_hz, CVec::Ones(cfg.num_tx));
    }

    DetectionRun detect_targets(const EchoCube &cube, const Scene &scene, const CfarParams &cfar)
    {
        DetectionRun run;
        const CMat avg = cube.data();
        std::set<int> bins;
        for (const Target &t : scene.targets)
        {
            run.profiles.push_back(beamform_profile(avg, cube.range_axis_m, target_steering(cube.config, t, cube.sample_rate_hz)));
            run.sets.push_back(cfar_ca(run.profiles.back(), cfar));
            bins.insert(run.sets.back().bins.begin(), run.sets.back().bins.end());
        }
        for (int b : bins)
            run.ranges_m.push_back(cube.range_axis_m[b]);
        return run;
    }

    double level_relative_to(const RangeProfile &p, double range_m, double reference_range_m)
    {
        return p.power_db[nearest_bin(p.range_axis_m, range_m)] - p.power_db[nearest_bin(p.range_axis_m, reference_range_m)];
    }
}
