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
#include "fdamimo/echo_sim.hpp"
#include "fdamimo/linalg.hpp"
#include <string>
#include <vector>

namespace fdamimo
{
    struct CompensatedCube
    {
        CMat data; // channels x snapshots
        double compensated_range_m = 0.0;
    };

    struct SpatialSpectrum
    {
        RMat power;   // |w^H z|, rows theta_t, cols theta_r
        RVec grid_rad; // shared by both axes, 0 .. pi
        double compensated_range_m = 0.0;
        double theta_t_hat = 0.0;
        double theta_r_hat = 0.0;
        double peak = 0.0;
    };

    struct DiscriminationParams
    {
        double grid_deg = 0.5;
        double angle_tolerance_deg = -1.0; // < 0 means one grid step
        double loading_factor = 1e-3;      // eps = factor * tr(Q) / dim

        double tolerance_deg() const { return angle_tolerance_deg < 0.0 ? grid_deg : angle_tolerance_deg; }
    };

    struct CellLabel
    {
        double range_m;
        bool real;
        double theta_t_rad;
        double theta_r_rad;
        double peak_power;
    };

    struct DiscriminationReport
    {
        std::vector<CellLabel> labels;
        double tolerance_used_rad = 0.0;
    };

    // 1_N kron conj(Gamma(r))
    CVec compensation_vector(const RadarConfig &cfg, double range_m);

    CompensatedCube compensate(const CMat &data, const RadarConfig &cfg, double range_m);

    // 1/K sum z z^H over the columns, loaded by factor * tr / dim
    HermitianMatrix compensated_covariance(const CompensatedCube &cc, double loading_factor = 1e-3);

    // |a^H Q^{-1} z| over the (theta_t, theta_r) grid, a = a_r(theta_r) kron a_t(theta_t)
    SpatialSpectrum capon_spectrum(const HermitianMatrix &Q, const RadarConfig &cfg, const CVec &z, double grid_deg);

    // Spectrum of the cell nearest cell_range_m with the data compensated for compensation_range_m
    SpatialSpectrum cell_spectrum(const EchoCube &cube, double cell_range_m, double compensation_range_m,
                                  const RadarConfig &cfg, const DiscriminationParams &params);

    // Labels every detected range. Covariance from all snapshots, statistic from the
    // coherent-average snapshot at each detection cell. Each range is snapped to its bin centre.
    // Spectra are returned when requested.
    DiscriminationReport discriminate(const EchoCube &cube, const std::vector<double> &ranges_m,
                                      const RadarConfig &cfg, const DiscriminationParams &params,
                                      std::vector<SpatialSpectrum> *spectra = nullptr);

    void write_spectrum_csv(const SpatialSpectrum &s, const std::string &path);
    void write_labels_csv(const DiscriminationReport &r, const std::string &path);
}
