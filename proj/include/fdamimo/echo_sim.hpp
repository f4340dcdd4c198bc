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
#include "fdamimo/waveforms.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace fdamimo
{
    enum class PathKind
    {
        direct,
        first_order_tx, // transmit leg bounces: tx angle theta_s, rx angle theta
        first_order_rx, // receive leg bounces: tx angle theta, rx angle theta_s
        second_order
    };

    const char *to_string(PathKind k);

    struct PathComponent
    {
        PathKind kind;
        int target_index;
        double delay_s; // round trip, unquantized
        double rx_angle_rad;
        double tx_angle_rad;
        double effective_range_m;
        cd amplitude;
    };

    enum class NoiseCoupling
    {
        independent, // separate noise on every receive element
        common       // one noise record shared by all receive elements
    };

    inline constexpr unsigned kAllPaths = 0xF;
    inline constexpr unsigned path_bit(PathKind k) { return 1u << static_cast<unsigned>(k); }

    struct SimOptions
    {
        double gate_start_m = 1800.0; // range of the first output bin (rounded to a sample)
        int range_bins = 256;         // L_r
        int pulses = 12;
        NoiseCoupling coupling = NoiseCoupling::independent;
        unsigned path_mask = kAllPaths;
        bool with_noise = true;
    };

    struct EchoCube
    {
        std::vector<CMat> pulses; // each MN x L_r, channel n*M + m
        RVec range_axis_m;
        RadarConfig config;
        std::uint64_t rng_seed = 0;
        double sample_rate_hz = 0.0;

        int channels() const { return pulses.empty() ? 0 : static_cast<int>(pulses.front().rows()); }
        int bins() const { return static_cast<int>(range_axis_m.size()); }

        // Coherent pulse average, MN x L_r
        CMat data() const;
        // All pulses side by side, MN x (L_r * pulses)
        CMat snapshots() const;
    };

    // eta0 = sqrt(P_t / M) eta~0 exp(-j 2 pi f0 tau0), times the common Doppler phase if v != 0
    cd equivalent_coefficient(const RadarConfig &cfg, const Target &t);

    std::vector<PathComponent> enumerate_paths(const Scene &scene, const RadarConfig &cfg);

    // sigma_n^2 such that M |eta0|^2 / sigma_n^2 equals the SNR (first target)
    double noise_power_for_snr(const RadarConfig &cfg, const Scene &scene, double snr_db);

    double range_bin_m(double sample_rate_hz);

    // Path delays are rounded to the sample grid; the range phase of the path uses the same rounded range
    double quantized_range(double range_m, double sample_rate_hz);

    EchoCube simulate_echo(const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws, const CVec &tx_weights,
                           std::uint64_t seed, const SimOptions &opts = {});

    // sigma^2 C kron conj(R_ss(0)), C = I_N (independent) or 1_N 1_N^T (common)
    CMat noise_covariance(const RadarConfig &cfg, const WaveformSet &ws, double noise_power,
                          NoiseCoupling coupling = NoiseCoupling::independent);

    // Binary cube: 64-byte header then little-endian complex64, pulse-major, bin, channel
    void write_cube(const EchoCube &cube, const std::string &path);
    EchoCube read_cube(const std::string &path);

    // range_m, mean_power_db (channel- and pulse-averaged power per bin)
    void write_cube_summary_csv(const EchoCube &cube, const std::string &path);
}
