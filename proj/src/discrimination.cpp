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

#include "fdamimo/discrimination.hpp"
#include "csv.hpp"

#include <cmath>

namespace fdamimo
{
    CVec compensation_vector(const RadarConfig &cfg, double range_m)
    {
        return kron(CVec::Ones(cfg.num_rx), range_steering(cfg, range_m).conjugate());
    }

    CompensatedCube compensate(const CMat &data, const RadarConfig &cfg, double range_m)
    {
        if (data.rows() != cfg.virtual_channels())
            throw ConfigError("compensate: channel count mismatch");
        CompensatedCube cc;
        cc.compensated_range_m = range_m;
        cc.data = compensation_vector(cfg, range_m).asDiagonal() * data;
        return cc;
    }

    HermitianMatrix compensated_covariance(const CompensatedCube &cc, double loading_factor)
    {
        const CMat R = sample_covariance(cc.data);
        const HermitianMatrix H = HermitianMatrix::from(R);
        return load(H, loading_factor * R.trace().real() / static_cast<double>(R.rows()));
    }

    SpatialSpectrum capon_spectrum(const HermitianMatrix &Q, const RadarConfig &cfg, const CVec &z, double grid_deg)
    {
        const int M = cfg.num_tx, N = cfg.num_rx;
        if (z.size() != M * N || Q.dim() != M * N)
            throw ConfigError("capon_spectrum: dimension mismatch");
        if (!(grid_deg > 0.0))
            throw ConfigError("capon_spectrum: grid step must be > 0");
        const double cells = 180.0 / grid_deg;
        const long G1 = std::lround(cells);
        if (std::abs(cells - static_cast<double>(G1)) > 1e-9)
            throw ConfigError("capon_spectrum: grid step must divide 180 deg");
        const Eigen::Index G = G1 + 1;

        // w = Q^{-1} a and Q Hermitian, so w^H z = a^H (Q^{-1} z): one solve serves the whole grid
        const CVec u = solve_loaded(Q, z, 0.0);
        Eigen::Map<const CMat> U(u.data(), M, N); // U(m, n) = u[n*M + m]

        SpatialSpectrum s;
        s.compensated_range_m = 0.0;
        s.grid_rad.resize(G);
        CMat At(M, G), Ar(N, G);
        for (Eigen::Index g = 0; g < G; ++g)
        {
            s.grid_rad[g] = deg2rad(static_cast<double>(g) * grid_deg);
            At.col(g) = tx_steering(cfg, s.grid_rad[g]);
            Ar.col(g) = rx_steering(cfg, s.grid_rad[g]);
        }
        // a^H u = sum_{n,m} conj(ar_n) conj(at_m) U(m, n)
        s.power = (At.adjoint() * U * Ar.conjugate()).cwiseAbs();

        Eigen::Index it = 0, ir = 0;
        s.peak = s.power.maxCoeff(&it, &ir);
        s.theta_t_hat = s.grid_rad[it];
        s.theta_r_hat = s.grid_rad[ir];
        return s;
    }

    SpatialSpectrum cell_spectrum(const EchoCube &cube, double cell_range_m, double compensation_range_m,
                                  const RadarConfig &cfg, const DiscriminationParams &params)
    {
        const double r = cube.range_axis_m[nearest_bin(cube.range_axis_m, cell_range_m)];
        const CompensatedCube cc = compensate(cube.snapshots(), cfg, compensation_range_m);
        const HermitianMatrix Q = compensated_covariance(cc, params.loading_factor);
        const CVec z = snapshot_at_range(cube.data(), cube.range_axis_m, r).cwiseProduct(compensation_vector(cfg, compensation_range_m));
        SpatialSpectrum s = capon_spectrum(Q, cfg, z, params.grid_deg);
        s.compensated_range_m = compensation_range_m;
        return s;
    }

    DiscriminationReport discriminate(const EchoCube &cube, const std::vector<double> &ranges_m,
                                      const RadarConfig &cfg, const DiscriminationParams &params,
                                      std::vector<SpatialSpectrum> *spectra)
    {
        DiscriminationReport rep;
        rep.tolerance_used_rad = deg2rad(params.tolerance_deg());
        if (spectra)
            spectra->clear();

        for (double requested : ranges_m)
        {
            // Cells are compensated at their bin-centre range, the range the samples actually represent
            const double r = cube.range_axis_m[nearest_bin(cube.range_axis_m, requested)];
            SpatialSpectrum s = cell_spectrum(cube, r, r, cfg, params);

            CellLabel lab;
            lab.range_m = r;
            lab.theta_t_rad = s.theta_t_hat;
            lab.theta_r_rad = s.theta_r_hat;
            lab.peak_power = s.peak;
            // small slack so a difference of exactly one grid step passes despite rounding
            lab.real = std::abs(s.theta_t_hat - s.theta_r_hat) <= rep.tolerance_used_rad * (1.0 + 1e-9);
            rep.labels.push_back(lab);
            if (spectra)
                spectra->push_back(std::move(s));
        }
        return rep;
    }

    void write_spectrum_csv(const SpatialSpectrum &s, const std::string &path)
    {
        detail::CsvWriter w(path, {"theta_t_deg", "theta_r_deg", "power_db"});
        const double ref = std::max(s.peak, 1e-300);
        for (Eigen::Index i = 0; i < s.power.rows(); ++i)
            for (Eigen::Index j = 0; j < s.power.cols(); ++j)
                w.row(rad2deg(s.grid_rad[i]), rad2deg(s.grid_rad[j]),
                      20.0 * std::log10(std::max(s.power(i, j), 1e-300) / ref));
    }

    void write_labels_csv(const DiscriminationReport &r, const std::string &path)
    {
        detail::CsvWriter w(path, {"range_m", "label", "theta_t_deg", "theta_r_deg"});
        for (const CellLabel &l : r.labels)
            w.row(l.range_m, l.real ? "real" : "false", rad2deg(l.theta_t_rad), rad2deg(l.theta_r_rad));
    }
}
