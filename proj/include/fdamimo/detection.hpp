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

#include "fdamimo/types.hpp"
#include <string>
#include <vector>

namespace fdamimo
{
    enum class ProfileLabel
    {
        single_channel_mf,
        beamformed,
        noncoherent
    };

    struct RangeProfile
    {
        RVec power_db;     // peak-normalized, global max is 0 dB
        RVec range_axis_m;
        ProfileLabel label = ProfileLabel::beamformed;
        double peak_db = 0.0; // absolute level of the 0 dB reference, 10 log10 |.|^2

        // Absolute level of bin k in dB
        double absolute_db(Eigen::Index k) const { return power_db[k] + peak_db; }
    };

    struct DetectionSet
    {
        std::vector<double> ranges_m; // ascending
        std::vector<int> bins;
        RVec threshold_db; // same reference as the profile; NaN where the window does not fit
        double pfa = 0.0;
        double alpha = 0.0;
    };

    struct CfarParams
    {
        int train = 16; // cells per side
        int guard = 4;  // cells per side
        double pfa = 1e-4;
    };

    // power_db[k] = 20 log10 |steer^H z(:, k)|, peak-normalized
    RangeProfile beamform_profile(const CMat &data, const RVec &range_axis_m, const CVec &steer);

    // Channel 0 only (one transmit/receive pair)
    RangeProfile single_channel_profile(const CMat &data, const RVec &range_axis_m, Eigen::Index channel = 0);

    // sum over channels of |z|^2, peak-normalized
    RangeProfile noncoherent_profile(const CMat &data, const RVec &range_axis_m);

    double cfar_alpha(int train, double pfa);

    // Cell-averaging CFAR on linear power. Runs of over-threshold cells collapse to their strongest
    // cell, which must also be a local maximum of the profile.
    DetectionSet cfar_ca(const RangeProfile &profile, const CfarParams &params);

    // Index of the bin nearest range_m; exact midpoints go to the even bin
    Eigen::Index nearest_bin(const RVec &range_axis_m, double range_m);

    CVec snapshot_at_range(const CMat &data, const RVec &range_axis_m, double range_m);

    void write_profile_csv(const RangeProfile &p, const std::string &path);
    void write_threshold_csv(const RangeProfile &p, const DetectionSet &d, const std::string &path);
}
