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

#include "fdamimo/echo_sim.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace fdamimo;
using Catch::Approx;

static RadarConfig example_config(double delta_f = 19.6e6)
{
    return RadarConfig::half_wavelength(10, 10, 10e9, delta_f);
}

static Scene example_scene(cd rho = std::polar(0.5, -kPi / 2))
{
    Scene s;
    s.targets.push_back({2000.0, deg2rad(70.0), {1.0, 0.0}, 0.0});
    s.reflector_offset_m = 20.0;
    s.reflection_coeff = rho;
    return s;
}

static SimOptions noise_free(int pulses = 1)
{
    SimOptions o;
    o.pulses = pulses;
    o.with_noise = false;
    return o;
}

static RVec noncoherent_db(const CMat &Z)
{
    RVec p(Z.cols());
    for (Eigen::Index k = 0; k < Z.cols(); ++k)
        p[k] = 10.0 * std::log10(std::max(Z.col(k).squaredNorm(), 1e-300));
    return p;
}

static int bin_of(const EchoCube &cube, double r)
{
    return static_cast<int>(std::lround((r - cube.range_axis_m[0]) / range_bin_m(cube.sample_rate_hz)));
}

// ================================================================================================
// Paths
// ================================================================================================

TEST_CASE("Echo sim - No reflector leaves only the direct path")
{
    for (const PathComponent &p : enumerate_paths(example_scene(0.0), example_config()))
    {
        if (p.kind == PathKind::direct)
            CHECK(std::abs(p.amplitude) > 0.0);
        else
            CHECK(p.amplitude == cd(0.0));
    }
}

TEST_CASE("Echo sim - Path ranges and amplitudes of the reference scene")
{
    const RadarConfig cfg = example_config();
    const Scene s = example_scene();
    const auto paths = enumerate_paths(s, cfg);
    REQUIRE(paths.size() == 4);
    const double x = 2000.0 * std::sin(deg2rad(70.0)), y = 40.0 + 2000.0 * std::cos(deg2rad(70.0));
    const double rs = std::hypot(x, y);
    CHECK(paths[0].effective_range_m == Approx(2000.0));
    CHECK(paths[1].effective_range_m == Approx((2000.0 + rs) / 2).epsilon(1e-14));
    CHECK(paths[2].effective_range_m == Approx((2000.0 + rs) / 2).epsilon(1e-14));
    CHECK(paths[3].effective_range_m == Approx(rs).epsilon(1e-14));
    CHECK(paths[1].effective_range_m == Approx(2007.0).margin(0.05));
    CHECK(paths[3].effective_range_m == Approx(2014.0).margin(0.05));
    for (const PathComponent &p : paths)
        CHECK(p.delay_s == Approx(2.0 * p.effective_range_m / 299792458.0).epsilon(1e-14));

    const double a0 = std::abs(paths[0].amplitude);
    CHECK(std::abs(paths[1].amplitude) / a0 == Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(paths[2].amplitude) / a0 == Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(paths[3].amplitude) / a0 == Approx(0.25).epsilon(1e-14));

    // first-order legs swap the transmit and receive angles
    CHECK(paths[1].rx_angle_rad == paths[0].rx_angle_rad);
    CHECK(paths[1].tx_angle_rad == paths[3].tx_angle_rad);
    CHECK(paths[1].tx_angle_rad == paths[2].rx_angle_rad);
    CHECK(paths[2].tx_angle_rad == paths[0].tx_angle_rad);
    CHECK(rad2deg(paths[3].rx_angle_rad) == Approx(111.07).margin(0.01));
}

TEST_CASE("Echo sim - Equivalent coefficient")
{
    const RadarConfig cfg = example_config();
    Target t{2000.0, deg2rad(70.0), std::polar(2.0, 0.3), 0.0};
    const cd eta = equivalent_coefficient(cfg, t);
    CHECK(std::abs(eta) == Approx(std::sqrt(10.0 / 10) * 2.0).epsilon(1e-14));
    const double ph = 0.3 - 2.0 * kPi * 10e9 * (2.0 * 2000.0 / 299792458.0);
    CHECK(std::abs(eta - std::polar(2.0, ph)) < 1e-6);
}

// ================================================================================================
// Matched-filter output
// ================================================================================================

TEST_CASE("Echo sim - Noise-free peak sits at the nearest range bin")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    for (double r : {1900.0, 2000.0, 2001.4, 2123.0})
    {
        Scene s = example_scene(0.0);
        s.targets[0].range_m = r;
        const EchoCube cube = simulate_echo(s, cfg, ws, CVec::Ones(10), 0, noise_free());
        Eigen::Index k;
        noncoherent_db(cube.data()).maxCoeff(&k);
        CHECK(std::abs(cube.range_axis_m[k] - r) <= range_bin_m(cube.sample_rate_hz) / 2 + 1e-9);
    }
}

TEST_CASE("Echo sim - Reference scene shows three resolvable peaks")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    const EchoCube cube = simulate_echo(example_scene(), cfg, ws, CVec::Ones(10), 0, noise_free());
    const RVec p = noncoherent_db(cube.data());
    const double top = p.maxCoeff();
    std::vector<double> peaks;
    for (Eigen::Index k = 1; k + 1 < p.size(); ++k)
        if (p[k] > p[k - 1] && p[k] >= p[k + 1] && p[k] > top - 15.0)
            peaks.push_back(cube.range_axis_m[k]);
    INFO("peaks within 15 dB of the strongest: " << peaks.size());
    REQUIRE(peaks.size() == 3);
    const double dr = range_bin_m(cube.sample_rate_hz);
    CHECK(std::abs(peaks[0] - 2000.0) <= dr / 2 + 1e-9);
    CHECK(std::abs(peaks[1] - 2007.016) <= dr / 2 + 1e-9);
    CHECK(std::abs(peaks[2] - 2014.032) <= dr / 2 + 1e-9);
}

TEST_CASE("Echo sim - Deterministic given the seed")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    Scene s = example_scene();
    s.noise_power = 0.3;
    SimOptions o;
    o.pulses = 3;
    const EchoCube a = simulate_echo(s, cfg, ws, CVec::Ones(10), 99, o);
    const EchoCube b = simulate_echo(s, cfg, ws, CVec::Ones(10), 99, o);
    const EchoCube c = simulate_echo(s, cfg, ws, CVec::Ones(10), 100, o);
    for (int p = 0; p < 3; ++p)
    {
        CHECK((a.pulses[p] - b.pulses[p]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.pulses[p] - c.pulses[p]).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("Echo sim - Superposition of targets")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    Scene one = example_scene(), two = example_scene(), both = example_scene();
    two.targets[0] = {2100.0, deg2rad(80.0), std::polar(0.45, 1.0), 0.0};
    both.targets.push_back(two.targets[0]);
    const CMat za = simulate_echo(one, cfg, ws, CVec::Ones(10), 0, noise_free()).data();
    const CMat zb = simulate_echo(two, cfg, ws, CVec::Ones(10), 0, noise_free()).data();
    const CMat zab = simulate_echo(both, cfg, ws, CVec::Ones(10), 0, noise_free()).data();
    CHECK((zab - za - zb).norm() <= 1e-10 * zab.norm());
}

TEST_CASE("Echo sim - Four times the power doubles the amplitude")
{
    RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    const CMat z1 = simulate_echo(example_scene(), cfg, ws, CVec::Ones(10), 0, noise_free()).data();
    cfg.total_power *= 4.0;
    const CMat z4 = simulate_echo(example_scene(), cfg, ws, CVec::Ones(10), 0, noise_free()).data();
    CHECK((z4 - 2.0 * z1).norm() <= 1e-12 * z4.norm());
}

TEST_CASE("Echo sim - Post-filter SNR matches the configured value")
{
    // per-channel matched-filter gain is L / M relative to the element-level SNR
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    for (double snr_db : {0.0, -10.0})
    {
        Scene s = example_scene(0.0);
        s.noise_power = noise_power_for_snr(cfg, s, snr_db);
        SimOptions o;
        o.pulses = 1;
        // noise power from a target-free run: range sidelobes of the echo would bias bins near the target
        Scene empty = s;
        empty.targets[0].range_m = 50000.0;
        const int k = bin_of(simulate_echo(s, cfg, ws, CVec::Ones(10), 0, noise_free()), 2000.0);
        double sig = 0.0, noi = 0.0;
        for (int trial = 0; trial < 100; ++trial)
        {
            const CMat Zn = simulate_echo(empty, cfg, ws, CVec::Ones(10), 5000 + trial, o).data();
            const double n = Zn.squaredNorm() / static_cast<double>(Zn.size());
            const CMat Z = simulate_echo(s, cfg, ws, CVec::Ones(10), 1000 + trial, o).data();
            noi += n;
            sig += Z.col(k).squaredNorm() / Z.rows() - n;
        }
        const double measured = 10.0 * std::log10(sig / noi * 10.0 / 256.0);
        INFO("configured " << snr_db << " dB, measured " << measured << " dB");
        CHECK(std::abs(measured - snr_db) <= 1.0);
    }
}

TEST_CASE("Echo sim - Direct-path channel phases follow the virtual steering vector")
{
    for (double df : {0.0, 19.6e6})
    {
        const RadarConfig cfg = example_config(df);
        const WaveformSet ws = build_waveform_set(cfg, 256, 0);
        const EchoCube cube = simulate_echo(example_scene(0.0), cfg, ws, CVec::Ones(10), 0, noise_free());
        const CVec z = cube.data().col(bin_of(cube, 2000.0));
        const double rq = quantized_range(2000.0, cube.sample_rate_hz);
        const CVec v = kron(rx_steering(cfg, deg2rad(70.0)), tx_range_angle_steering(cfg, rq, deg2rad(70.0)));
        const double corr = std::abs(v.dot(z)) / (v.norm() * z.norm());
        INFO("delta_f " << df << " Hz, correlation " << corr);
        CHECK(corr >= 0.999);
    }
}

// ================================================================================================
// Noise
// ================================================================================================

TEST_CASE("Echo sim - Noise covariance structure")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    const CMat Ri = noise_covariance(cfg, ws, 2.0, NoiseCoupling::independent);
    const CMat Rc = noise_covariance(cfg, ws, 2.0, NoiseCoupling::common);
    CHECK((Ri - Ri.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((Rc - Rc.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(Ri.trace() - cd(200.0)) < 1e-9);
    CHECK(Ri.block(0, 10, 10, 10).cwiseAbs().maxCoeff() == 0.0);
    CHECK((Rc.block(0, 10, 10, 10) - Rc.block(0, 0, 10, 10)).cwiseAbs().maxCoeff() == 0.0);

    // exactly orthogonal rows: sigma^2 I and sigma^2 (1 1^T kron I)
    WaveformSet dft;
    dft.samples.resize(10, 256);
    for (int m = 0; m < 10; ++m)
        for (int i = 0; i < 256; ++i)
            dft.samples(m, i) = std::polar(1.0, 2.0 * kPi * m * i / 256.0);
    dft.sample_rate_hz = ws.sample_rate_hz;
    const RadarConfig mimo = example_config(0.0);
    CHECK((noise_covariance(mimo, dft, 2.0) - 2.0 * CMat::Identity(100, 100)).cwiseAbs().maxCoeff() < 1e-12);
    CMat want = CMat::Zero(100, 100);
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b)
            want.block(a * 10, b * 10, 10, 10) = 2.0 * CMat::Identity(10, 10);
    CHECK((noise_covariance(mimo, dft, 2.0, NoiseCoupling::common) - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Echo sim - Noise covariance agrees with a Monte-Carlo estimate")
{
    RadarConfig cfg = RadarConfig::half_wavelength(4, 3, 10e9, 19.6e6);
    const WaveformSet ws = build_waveform_set(cfg, 64, 0);
    for (NoiseCoupling coupling : {NoiseCoupling::independent, NoiseCoupling::common})
    {
        Scene s = example_scene(0.0);
        s.targets[0].range_m = 50000.0; // outside the gate
        s.noise_power = 1.5;
        SimOptions o;
        o.range_bins = 65; // bins 0 and 64 share no input sample
        o.pulses = 20000;
        o.coupling = coupling;
        const EchoCube cube = simulate_echo(s, cfg, ws, CVec::Ones(4), 7, o);
        CMat R = CMat::Zero(12, 12);
        for (const CMat &P : cube.pulses)
        {
            R += P.col(0) * P.col(0).adjoint();
            R += P.col(64) * P.col(64).adjoint();
        }
        R /= 2.0 * o.pulses;
        const CMat want = noise_covariance(cfg, ws, 1.5, coupling);
        const double err = (R - want).cwiseAbs().maxCoeff() / 1.5;
        INFO("max normalized entry error " << err);
        CHECK(err <= 0.05);
    }
}

// ================================================================================================
// Cube file
// ================================================================================================

TEST_CASE("Echo sim - Cube file round trip")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    Scene s = example_scene();
    s.noise_power = 0.1;
    SimOptions o;
    o.pulses = 2;
    o.range_bins = 32;
    const EchoCube cube = simulate_echo(s, cfg, ws, CVec::Ones(10), 3, o);
    const std::string path = (std::filesystem::temp_directory_path() / "fdamimo_roundtrip.fdmc").string();
    write_cube(cube, path);

    CHECK(std::filesystem::file_size(path) == 64u + 2u * 32u * 100u * 8u);
    std::ifstream f(path, std::ios::binary);
    char magic[4];
    f.read(magic, 4);
    CHECK(std::string(magic, 4) == "FDMC");
    f.close();

    const EchoCube back = read_cube(path);
    CHECK(back.config.num_tx == 10);
    CHECK(back.config.num_rx == 10);
    REQUIRE(back.pulses.size() == 2);
    REQUIRE(back.bins() == 32);
    CHECK(back.sample_rate_hz == cube.sample_rate_hz);
    CHECK((back.range_axis_m - cube.range_axis_m).cwiseAbs().maxCoeff() < 1e-9);
    for (int p = 0; p < 2; ++p)
        CHECK((back.pulses[p] - cube.pulses[p]).cwiseAbs().maxCoeff() <= 1e-6 * cube.pulses[p].cwiseAbs().maxCoeff());

    // a truncated file or a foreign header is rejected
    std::filesystem::resize_file(path, 64 + 1000);
    CHECK_THROWS_AS(read_cube(path), ConfigError);
    {
        std::ofstream g(path, std::ios::binary | std::ios::trunc);
        g << std::string(64, 'x');
    }
    CHECK_THROWS_AS(read_cube(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("Echo sim - Invalid inputs throw")
{
    const RadarConfig cfg = example_config();
    const WaveformSet ws = build_waveform_set(cfg, 256, 0);
    CHECK_THROWS_AS(simulate_echo(example_scene(), cfg, ws, CVec::Ones(9), 0, noise_free()), ConfigError);
    RadarConfig other = cfg;
    other.num_tx = 4;
    CHECK_THROWS_AS(simulate_echo(example_scene(), other, ws, CVec::Ones(4), 0, noise_free()), ConfigError);
    Scene bad = example_scene(std::polar(1.5, 0.0));
    CHECK_THROWS_AS(simulate_echo(bad, cfg, ws, CVec::Ones(10), 0, noise_free()), ConfigError);
    Scene none;
    CHECK_THROWS_AS(noise_power_for_snr(cfg, none, 0.0), ConfigError);
}
