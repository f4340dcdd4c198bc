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

#include <catch_amalgamated.hpp>

#include "fdamimo/discrimination.hpp"

#include <cmath>
#include <random>

using namespace fdamimo;
using Catch::Approx;

static RadarConfig example_config(double delta_f = 19.6e6)
{
    return RadarConfig::half_wavelength(10, 10, 10e9, delta_f);
}

// Received signature of one path: a_r(theta_r) kron a_t(r, theta_t)
static CVec signature(const RadarConfig &cfg, double r, double theta_t_deg, double theta_r_deg)
{
    return kron(rx_steering(cfg, deg2rad(theta_r_deg)), tx_range_angle_steering(cfg, r, deg2rad(theta_t_deg)));
}

static SpatialSpectrum white_spectrum(const RadarConfig &cfg, const CVec &z, double comp_range, double grid = 0.5)
{
    const CVec zc = z.cwiseProduct(compensation_vector(cfg, comp_range));
    return capon_spectrum(HermitianMatrix::from(CMat::Identity(z.size(), z.size())), cfg, zc, grid);
}

static EchoCube reference_cube(const RadarConfig &cfg, cd rho, std::uint64_t seed, bool noise)
{
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    Scene s;
    s.targets.push_back({2000.0, deg2rad(70.0), {1.0, 0.0}, 0.0});
    s.reflector_offset_m = 20.0;
    s.reflection_coeff = rho;
    s.noise_power = noise_power_for_snr(cfg, s, -10.0);
    SimOptions o;
    o.with_noise = noise;
    return simulate_echo(s, cfg, ws, CVec::Ones(cfg.num_tx), seed, o);
}

// ================================================================================================
// Compensation
// ================================================================================================

TEST_CASE("Discrimination - Compensation vector layout")
{
    const RadarConfig cfg = example_config();
    const CVec c = compensation_vector(cfg, 2000.0);
    const CVec g = range_steering(cfg, 2000.0);
    REQUIRE(c.size() == 100);
    for (int n = 0; n < 10; ++n)
        for (int m = 0; m < 10; ++m)
            CHECK(std::abs(c[n * 10 + m] - std::conj(g[m])) < 1e-14);
    CHECK(((compensation_vector(example_config(0.0), 1234.0).array() - 1.0).abs()).maxCoeff() < 1e-14);
}

TEST_CASE("Discrimination - Compensation is invertible")
{
    const RadarConfig cfg = example_config();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> G;
    CMat Z(100, 30);
    for (Eigen::Index i = 0; i < Z.size(); ++i)
        Z.data()[i] = cd(G(rng), G(rng));
    const CompensatedCube cc = compensate(Z, cfg, 2007.0);
    CHECK(cc.compensated_range_m == 2007.0);
    const CVec c = compensation_vector(cfg, 2007.0);
    CHECK((cc.data - c.asDiagonal() * Z).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((c.conjugate().asDiagonal() * cc.data - Z).norm() <= 1e-12 * Z.norm());
    CHECK_THROWS_AS(compensate(Z.topRows(99), cfg, 2007.0), ConfigError);
}

TEST_CASE("Discrimination - Covariance is loaded by the trace")
{
    CompensatedCube cc;
    cc.data = CMat::Identity(4, 4) * 2.0;
    const HermitianMatrix Q = compensated_covariance(cc, 1e-3);
    // (1/4) sum z z^H = I, loading 1e-3 tr / dim = 1e-3
    CHECK((Q.values - 1.001 * CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

// ================================================================================================
// Spectra
// ================================================================================================

TEST_CASE("Discrimination - True-range compensation puts the direct path on the diagonal")
{
    const RadarConfig cfg = example_config();
    const SpatialSpectrum s = white_spectrum(cfg, signature(cfg, 2000.0, 70.0, 70.0), 2000.0);
    CHECK(rad2deg(s.theta_t_hat) == Approx(70.0).margin(1e-9));
    CHECK(rad2deg(s.theta_r_hat) == Approx(70.0).margin(1e-9));
    CHECK(s.peak == Approx(100.0).epsilon(1e-12));
    CHECK(s.power.rows() == 361);
    CHECK(s.power.cols() == 361);
}

TEST_CASE("Discrimination - First-order path stays off the diagonal at any compensation range")
{
    const RadarConfig cfg = example_config();
    const MirrorTarget mt = mirror_geometry(2000.0, deg2rad(70.0), 20.0);
    const double rb = mt.equiv_first_order_range_m;
    const CVec z = signature(cfg, rb, rad2deg(mt.angle_rad), 70.0);
    for (double rc : {rb, 2000.0, mt.range_m})
    {
        const SpatialSpectrum s = white_spectrum(cfg, z, rc);
        INFO("compensation range " << rc << ": (" << rad2deg(s.theta_t_hat) << ", " << rad2deg(s.theta_r_hat) << ")");
        CHECK(std::abs(rad2deg(s.theta_t_hat - s.theta_r_hat)) > 0.5);
    }
    // compensated at its own range the transmit angle is the mirror angle
    CHECK(rad2deg(white_spectrum(cfg, z, rb).theta_t_hat) == Approx(rad2deg(mt.angle_rad)).margin(0.25));
}

TEST_CASE("Discrimination - Wrong-range compensation moves the direct path off the diagonal")
{
    const RadarConfig cfg = example_config();
    const SpatialSpectrum s = white_spectrum(cfg, signature(cfg, 2000.0, 70.0, 70.0), 2003.0);
    // transmit spatial frequency shifts by -2 df (r - r_c) / c
    const double shift = -2.0 * 19.6e6 * (2000.0 - 2003.0) / 299792458.0;
    double fst = 0.5 * std::cos(deg2rad(70.0)) + shift;
    fst -= std::round(fst);
    CHECK(rad2deg(s.theta_r_hat) == Approx(70.0).margin(0.25));
    CHECK(rad2deg(s.theta_t_hat) == Approx(rad2deg(std::acos(2.0 * fst))).margin(0.5));
    CHECK(std::abs(rad2deg(s.theta_t_hat - s.theta_r_hat)) > 0.5);
}

TEST_CASE("Discrimination - Without a frequency increment the compensation range is irrelevant")
{
    const RadarConfig cfg = example_config(0.0);
    const EchoCube cube = reference_cube(cfg, std::polar(0.5, -kPi / 2), 3, true);
    const DiscriminationParams p;
    const SpatialSpectrum a = cell_spectrum(cube, 2000.0, 2000.0, cfg, p);
    for (double rc : {1850.0, 2007.0, 2014.0})
    {
        const SpatialSpectrum b = cell_spectrum(cube, 2000.0, rc, cfg, p);
        CHECK((a.power - b.power).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Discrimination - Compensated direct-path channels lose their range dependence")
{
    for (double df : {0.0, 19.6e6})
    {
        const RadarConfig cfg = example_config(df);
        const EchoCube cube = reference_cube(cfg, 0.0, 0, false);
        const double rq = quantized_range(2000.0, cube.sample_rate_hz);
        const CVec z = compensate(cube.data(), cfg, rq).data.col(nearest_bin(cube.range_axis_m, 2000.0));
        const CVec v = kron(rx_steering(cfg, deg2rad(70.0)), tx_steering(cfg, deg2rad(70.0)));
        const double corr = std::abs(v.dot(z)) / (v.norm() * z.norm());
        INFO("delta_f " << df << " Hz, correlation " << corr);
        CHECK(corr >= 0.999);
    }
}

TEST_CASE("Discrimination - Simulated direct path is diagonal only at its own range")
{
    const RadarConfig cfg = example_config();
    const EchoCube cube = reference_cube(cfg, 0.0, 0, false);
    const double rq = quantized_range(2000.0, cube.sample_rate_hz);
    const double rb = quantized_range(mirror_geometry(2000.0, deg2rad(70.0), 20.0).equiv_first_order_range_m,
                                      cube.sample_rate_hz);
    const DiscriminationParams p;
    const SpatialSpectrum d = cell_spectrum(cube, rq, rq, cfg, p);
    INFO("own range peak (" << rad2deg(d.theta_t_hat) << ", " << rad2deg(d.theta_r_hat) << ")");
    CHECK(std::abs(rad2deg(d.theta_t_hat) - 70.0) <= p.grid_deg + 1e-9);
    CHECK(std::abs(rad2deg(d.theta_r_hat) - 70.0) <= p.grid_deg + 1e-9);
    CHECK(std::abs(rad2deg(d.theta_t_hat - d.theta_r_hat)) <= p.tolerance_deg() + 1e-9);
    const SpatialSpectrum w = cell_spectrum(cube, rq, rb, cfg, p);
    INFO("first-order range peak (" << rad2deg(w.theta_t_hat) << ", " << rad2deg(w.theta_r_hat) << ")");
    CHECK(std::abs(rad2deg(w.theta_t_hat - w.theta_r_hat)) > p.tolerance_deg());
}

TEST_CASE("Discrimination - MIMO spectrum shows the four direct and mirror angle pairs")
{
    const RadarConfig cfg = example_config(0.0);
    const EchoCube cube = reference_cube(cfg, std::polar(0.5, -kPi / 2), 0, true);
    const SpatialSpectrum s = cell_spectrum(cube, 2000.0, 2000.0, cfg, DiscriminationParams{});
    const double ts = rad2deg(mirror_geometry(2000.0, deg2rad(70.0), 20.0).angle_rad);
    const auto idx = [](double deg) { return static_cast<int>(std::lround(deg / 0.5)); };
    for (double tt : {70.0, ts})
        for (double tr : {70.0, ts})
        {
            // a local maximum within one grid step of the expected pair
            bool found = false;
            for (int i = idx(tt) - 1; i <= idx(tt) + 1; ++i)
                for (int j = idx(tr) - 1; j <= idx(tr) + 1; ++j)
                {
                    bool is_max = true;
                    for (int di = -1; di <= 1; ++di)
                        for (int dj = -1; dj <= 1; ++dj)
                            if ((di || dj) && s.power(i + di, j + dj) > s.power(i, j))
                                is_max = false;
                    found = found || is_max;
                }
            INFO("expected pair (" << tt << ", " << tr << ")");
            CHECK(found);
        }
}

TEST_CASE("Discrimination - Labels follow the diagonal rule")
{
    const RadarConfig cfg = example_config();
    const EchoCube cube = reference_cube(cfg, std::polar(0.5, -kPi / 2), 4, true);
    DiscriminationParams p;
    std::vector<SpatialSpectrum> spectra;
    const std::vector<double> ranges = {1950.0, 2000.0, 2007.0, 2014.0, 2100.0};
    const DiscriminationReport r = discriminate(cube, ranges, cfg, p, &spectra);
    REQUIRE(r.labels.size() == ranges.size());
    REQUIRE(spectra.size() == ranges.size());
    CHECK(r.tolerance_used_rad == Approx(deg2rad(0.5)).epsilon(1e-14));
    for (std::size_t i = 0; i < ranges.size(); ++i)
    {
        const CellLabel &l = r.labels[i];
        CHECK(l.range_m == cube.range_axis_m[nearest_bin(cube.range_axis_m, ranges[i])]);
        CHECK(l.real == (std::abs(l.theta_t_rad - l.theta_r_rad) <= r.tolerance_used_rad + 1e-12));
        CHECK(l.theta_t_rad == spectra[i].theta_t_hat);
        CHECK(l.theta_r_rad == spectra[i].theta_r_hat);
        CHECK(l.peak_power == spectra[i].peak);
    }
    CHECK(discriminate(cube, {}, cfg, p).labels.empty());

    EchoCube scaled = cube;
    for (CMat &P : scaled.pulses)
        P *= cd(-3.0, 0.5);
    const DiscriminationReport rs = discriminate(scaled, ranges, cfg, p);
    for (std::size_t i = 0; i < ranges.size(); ++i)
    {
        CHECK(rs.labels[i].real == r.labels[i].real);
        CHECK(rs.labels[i].theta_t_rad == r.labels[i].theta_t_rad);
        CHECK(rs.labels[i].theta_r_rad == r.labels[i].theta_r_rad);
    }
}

TEST_CASE("Discrimination - Parameter rules")
{
    DiscriminationParams p;
    CHECK(p.tolerance_deg() == 0.5);
    p.grid_deg = 1.0;
    CHECK(p.tolerance_deg() == 1.0);
    p.angle_tolerance_deg = 2.5;
    CHECK(p.tolerance_deg() == 2.5);

    const RadarConfig cfg = example_config();
    const CVec z = signature(cfg, 2000.0, 70.0, 70.0);
    CHECK_THROWS_AS(white_spectrum(cfg, z, 2000.0, 0.7), ConfigError);
    CHECK_THROWS_AS(white_spectrum(cfg, z, 2000.0, 0.0), ConfigError);
    CHECK_NOTHROW(white_spectrum(cfg, z, 2000.0, 2.0));
    CHECK_THROWS_AS(capon_spectrum(HermitianMatrix::from(CMat::Identity(99, 99)), cfg, z, 1.0), ConfigError);
}
