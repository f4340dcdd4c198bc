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
#include <vector>

namespace fdamimo
{
    struct RadarConfig
    {
        int num_tx = 10;                  // M
        int num_rx = 10;                  // N
        double carrier_hz = 10e9;         // f0
        double freq_increment_hz = 0.0;   // delta f, 0 gives plain MIMO
        double tx_spacing_m = 0.0;        // d_t
        double rx_spacing_m = 0.0;        // d_r
        double bandwidth_hz = 40e6;       // B_s
        double pulse_s = 5e-6;            // T_s
        double pri_s = 25e-6;             // T_p
        double total_power = 10.0;        // P_t

        double wavelength() const { return kSpeedOfLight / carrier_hz; }
        int virtual_channels() const { return num_tx * num_rx; }

        // Throws ConfigError on the first violated invariant
        void validate() const;

        // Half-wavelength spaced transmit and receive arrays
        static RadarConfig half_wavelength(int M, int N, double f0, double delta_f);
    };

    struct Target
    {
        double range_m = 0.0;
        double angle_rad = 0.0;
        cd scatter = {1.0, 0.0}; // eta~0
        double velocity_mps = 0.0;
    };

    struct Scene
    {
        std::vector<Target> targets;
        double reflector_offset_m = 0.0; // h_a
        cd reflection_coeff = {0.0, 0.0};
        double noise_power = 0.0; // per-element, per-sample variance

        void validate() const;
    };

    struct MirrorTarget
    {
        double range_m;
        double angle_rad;
        double equiv_first_order_range_m; // (r + r_s) / 2
    };

    // Image of a target in a flat specular reflector h_a below the array axis
    MirrorTarget mirror_geometry(double range_m, double angle_rad, double h_a);

    CVec rx_steering(const RadarConfig &cfg, double angle_rad);
    CVec tx_steering(const RadarConfig &cfg, double angle_rad);

    // Gamma(r): element m is exp(-j 2 pi (2 df / c) m r), m counted from 0
    CVec range_steering(const RadarConfig &cfg, double range_m);
    CVec range_steering(const RadarConfig &cfg, double range_m, double delta_f_hz);

    CVec tx_range_angle_steering(const RadarConfig &cfg, double range_m, double angle_rad);
    CVec tx_range_angle_steering(const RadarConfig &cfg, double range_m, double angle_rad, double delta_f_hz);

    // a_r(theta_r) kron (w_F .* a_t(r, theta_t)), receive-major ordering n*M + m
    CVec virtual_steering(const RadarConfig &cfg, double range_m, double rx_angle_rad, double tx_angle_rad,
                          const CVec &tx_weights);
    CVec virtual_steering(const RadarConfig &cfg, double range_m, double rx_angle_rad, double tx_angle_rad);

    struct SpatialFrequencies
    {
        double f_st;
        double f_sr;
    };

    SpatialFrequencies spatial_frequencies(const RadarConfig &cfg, double range_m, double angle_rad);

    // x kron y with x-major layout
    CVec kron(const CVec &x, const CVec &y);
}
