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
#include <array>
#include <cstdint>
#include <string>

namespace fdamimo
{
    // Peak normalized cross-correlation allowed between distinct rows at nonzero lag
    inline constexpr double kOrthogonalityBudget = 0.15;

    enum class ChipMode
    {
        cyclic,   // one chip per sample, Barker-11 repeated to fill the pulse
        upsampled // row 0 uses rectangular chips stretched over the pulse
    };

    struct WaveformSet
    {
        CMat samples; // M x L_s
        double sample_rate_hz = 0.0;
        std::string code_name;

        int num_tx() const { return static_cast<int>(samples.rows()); }
        int length() const { return static_cast<int>(samples.cols()); }
    };

    std::array<double, 11> barker11_phase_code();

    // Seeded orthogonal set: Barker chips times unimodular random phases, then
    // zero-lag Gram-Schmidt and unit average power. f_s = L_s / T_s.
    WaveformSet build_waveform_set(const RadarConfig &cfg, int samples_per_pulse, std::uint64_t seed,
                                   ChipMode mode = ChipMode::cyclic);

    // Transmit templates x_m[i] = s_m[i] exp(j 2 pi m df i / f_s)
    CMat tx_templates(const WaveformSet &ws, double delta_f_hz);

    // Discretized ambiguity matrix at the given delay (rounded to samples):
    //   R(m, m') = 1/L sum_i s_m[i] s*_m'[i - k] exp(-j 2 pi (m' - m) df i / f_s)
    // Samples outside the pulse are zero unless cyclic is set.
    CMat ambiguity_matrix(const WaveformSet &ws, double delay_s, double delta_f_hz, bool cyclic = false);
    CMat ambiguity_matrix(const WaveformSet &ws, double delay_s, const RadarConfig &cfg);

    // Largest |normalized cross-correlation| between distinct rows over lags 1 .. L-1
    double peak_cross_correlation(const WaveformSet &ws);

    void write_waveforms_csv(const WaveformSet &ws, const std::string &path);
}
