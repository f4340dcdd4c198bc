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

#include "fdamimo/array_model.hpp"
#include "fdamimo/detection.hpp"
#include "fdamimo/discrimination.hpp"
#include "fdamimo/echo_sim.hpp"
#include "fdamimo/mitigation.hpp"
#include "fdamimo/waveforms.hpp"
#include <cstdint>
#include <string>

namespace fdamimo
{
    struct SweepSettings
    {
        double start_hz = 0.1e6;
        double stop_hz = 39.9e6;
        int steps = 399;
    };

    struct OutputSettings
    {
        bool write_cube = true;
        bool write_waveforms = true;
        bool write_spectra = true;
    };

    // In-memory form of a scenario file. Sections: [radar] [scene] [waveform] [cfar]
    // [discrimination] [mitigation] [output]. Unknown sections or keys are errors.
    struct Scenario
    {
        RadarConfig radar;
        SimOptions sim;
        Scene scene;
        double snr_db = 0.0;
        bool noise_from_snr = true;
        int samples_per_pulse = 256;
        std::uint64_t waveform_seed = 0;
        ChipMode chip_mode = ChipMode::cyclic;
        CfarParams cfar;
        DiscriminationParams discrimination;
        MitigationOptions mitigation;
        SweepSettings sweep;
        OutputSettings output;

        // Fully resolved INI text; parses back to an equal scenario
        std::string to_ini() const;
    };

    Scenario parse_scenario(const std::string &text, const std::string &origin = "<string>");
    Scenario load_scenario(const std::string &path);
}
