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

#include "fdamimo/detection.hpp"
#include "csv.hpp"

#include <cmath>
#include <limits>

namespace fdamimo
{
    static RangeProfile from_power(const RVec &power, const RVec &axis, ProfileLabel label)
    {
        if (axis.size() != power.size())
            throw ConfigError("range axis length must equal the number of range bins");
        RangeProfile p;
        p.range_axis_m = axis;
        p.label = label;
        const double peak = power.maxCoeff();
        p.peak_db = 10.0 * std::log10(std::max(peak, 1e-300));
        p.power_db.resize(power.size());
        for (Eigen::Index k = 0; k < power.size(); ++k)
            p.power_db[k] = 10.0 * std::log10(std::max(power[k], 1e-300)) - p.peak_db;
        return p;
    }

    RangeProfile beamform_profile(const CMat &data, const RVec &range_axis_m, const CVec &steer)
    {
        if (steer.size() != data.rows())
            throw ConfigError("beamform_profile: steering length must equal channel count");
        const CVec y = data.adjoint() * steer; // conj(steer^H z_k)
        return from_power(y.cwiseAbs2(), range_axis_m, ProfileLabel::beamformed);
    }

    RangeProfile single_channel_profile(const CMat &data, const RVec &range_axis_m, Eigen::Index channel)
    {
        if (channel < 0 || channel >= data.rows())
            throw ConfigError("single_channel_profile: channel out of range");
        return from_power(data.row(channel).cwiseAbs2().transpose(), range_axis_m, ProfileLabel::single_channel_mf);
    }

    RangeProfile noncoherent_profile(const CMat &data, const RVec &range_axis_m)
    {
        return from_power(data.cwiseAbs2().colwise().sum().transpose(), range_axis_m, ProfileLabel::noncoherent);
    }

    double cfar_alpha(int train, double pfa)
    {
        const double Nt = 2.0 * train;
        return Nt * (std::pow(pfa, -1.0 / Nt) - 1.0);
    }

    DetectionSet cfar_ca(const RangeProfile &profile, const CfarParams &params)
    {
        if (params.train < 1 || params.guard < 0)
            throw ConfigError("cfar_ca: train >= 1 and guard >= 0 required");
        if (!(params.pfa > 0.0 && params.pfa < 1.0))
            throw ConfigError("cfar_ca: pfa must lie in (0, 1)");
        const Eigen::Index L = profile.power_db.size();
        const int half = params.train + params.guard;
        if (L < 2 * half + 1)
            throw ConfigError("cfar_ca: profile shorter than the CFAR window");

        RVec P(L);
        for (Eigen::Index k = 0; k < L; ++k)
            P[k] = std::pow(10.0, profile.power_db[k] / 10.0);

        DetectionSet d;
        d.pfa = params.pfa;
        d.alpha = cfar_alpha(params.train, params.pfa);
        d.threshold_db = RVec::Constant(L, std::numeric_limits<double>::quiet_NaN());
        std::vector<char> over(L, 0);
        for (Eigen::Index k = half; k < L - half; ++k)
        {
            double s = 0.0;
            for (int j = params.guard + 1; j <= half; ++j)
                s += P[k - j] + P[k + j];
            const double thr = d.alpha * s / (2.0 * params.train);
            d.threshold_db[k] = 10.0 * std::log10(std::max(thr, 1e-300));
            over[k] = P[k] > thr;
        }

        for (Eigen::Index k = 0; k < L;)
        {
            if (!over[k])
            {
                ++k;
                continue;
            }
            Eigen::Index best = k;
            Eigen::Index j = k;
            for (; j < L && over[j]; ++j)
                if (P[j] > P[best])
                    best = j;
            const bool left_ok = best == 0 || P[best] >= P[best - 1];
            const bool right_ok = best == L - 1 || P[best] >= P[best + 1];
            if (left_ok && right_ok)
            {
                d.bins.push_back(static_cast<int>(best));
                d.ranges_m.push_back(profile.range_axis_m[best]);
            }
            k = j;
        }
        return d;
    }

    Eigen::Index nearest_bin(const RVec &range_axis_m, double range_m)
    {
        const Eigen::Index L = range_axis_m.size();
        if (L == 0)
            throw ConfigError("nearest_bin: empty range axis");
        const double step = L > 1 ? range_axis_m[1] - range_axis_m[0] : 1.0;
        const double pos = (range_m - range_axis_m[0]) / step;
        if (pos < -0.5 || pos > static_cast<double>(L - 1) + 0.5)
            throw ConfigError("range " + std::to_string(range_m) + " m is outside the range axis");
        Eigen::Index k = static_cast<Eigen::Index>(std::nearbyint(pos)); // ties to even under the default rounding mode
        return std::clamp<Eigen::Index>(k, 0, L - 1);
    }

    CVec snapshot_at_range(const CMat &data, const RVec &range_axis_m, double range_m)
    {
        if (range_axis_m.size() != data.cols())
            throw ConfigError("snapshot_at_range: range axis length mismatch");
        return data.col(nearest_bin(range_axis_m, range_m));
    }

    void write_profile_csv(const RangeProfile &p, const std::string &path)
    {
        detail::CsvWriter w(path, {"range_m", "power_db"});
        for (Eigen::Index k = 0; k < p.power_db.size(); ++k)
            w.row(p.range_axis_m[k], p.power_db[k]);
    }

    void write_threshold_csv(const RangeProfile &p, const DetectionSet &d, const std::string &path)
    {
        detail::CsvWriter w(path, {"range_m", "threshold_db"});
        for (Eigen::Index k = 0; k < p.power_db.size(); ++k)
            if (std::isfinite(d.threshold_db[k]))
                w.row(p.range_axis_m[k], d.threshold_db[k]);
    }
}
