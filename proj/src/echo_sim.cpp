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

#include "fdamimo/echo_sim.hpp"
#include "csv.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace fdamimo
{
    const char *to_string(PathKind k)
    {
        switch (k)
        {
        case PathKind::direct:
            return "direct";
        case PathKind::first_order_tx:
            return "first_order_tx";
        case PathKind::first_order_rx:
            return "first_order_rx";
        case PathKind::second_order:
            return "second_order";
        }
        return "?";
    }

    CMat EchoCube::data() const
    {
        if (pulses.empty())
            return {};
        CMat acc = pulses.front();
        for (std::size_t p = 1; p < pulses.size(); ++p)
            acc += pulses[p];
        return acc / static_cast<double>(pulses.size());
    }

    CMat EchoCube::snapshots() const
    {
        if (pulses.empty())
            return {};
        const Eigen::Index L = pulses.front().cols();
        CMat out(pulses.front().rows(), L * static_cast<Eigen::Index>(pulses.size()));
        for (std::size_t p = 0; p < pulses.size(); ++p)
            out.middleCols(static_cast<Eigen::Index>(p) * L, L) = pulses[p];
        return out;
    }

    cd equivalent_coefficient(const RadarConfig &cfg, const Target &t)
    {
        const double tau0 = 2.0 * t.range_m / kSpeedOfLight;
        double c = cfg.carrier_hz * tau0;
        c -= std::floor(c);
        cd eta = std::sqrt(cfg.total_power / cfg.num_tx) * t.scatter * std::polar(1.0, -2.0 * kPi * c);
        if (t.velocity_mps != 0.0)
            eta *= std::polar(1.0, -4.0 * kPi * t.velocity_mps * tau0 * cfg.carrier_hz / kSpeedOfLight);
        return eta;
    }

    std::vector<PathComponent> enumerate_paths(const Scene &scene, const RadarConfig &cfg)
    {
        std::vector<PathComponent> out;
        out.reserve(4 * scene.targets.size());
        const cd rho = scene.reflection_coeff;
        for (std::size_t i = 0; i < scene.targets.size(); ++i)
        {
            const Target &t = scene.targets[i];
            const MirrorTarget mt = mirror_geometry(t.range_m, t.angle_rad, scene.reflector_offset_m);
            const cd eta = equivalent_coefficient(cfg, t);
            const int ti = static_cast<int>(i);
            const double rb = mt.equiv_first_order_range_m;
            out.push_back({PathKind::direct, ti, 2.0 * t.range_m / kSpeedOfLight, t.angle_rad, t.angle_rad, t.range_m, eta});
            out.push_back({PathKind::first_order_tx, ti, 2.0 * rb / kSpeedOfLight, t.angle_rad, mt.angle_rad, rb, eta * rho});
            out.push_back({PathKind::first_order_rx, ti, 2.0 * rb / kSpeedOfLight, mt.angle_rad, t.angle_rad, rb, eta * rho});
            out.push_back({PathKind::second_order, ti, 2.0 * mt.range_m / kSpeedOfLight, mt.angle_rad, mt.angle_rad,
                           mt.range_m, eta * rho * rho});
        }
        return out;
    }

    double noise_power_for_snr(const RadarConfig &cfg, const Scene &scene, double snr_db)
    {
        if (scene.targets.empty())
            throw ConfigError("noise_power_for_snr: scene has no target");
        const double eta2 = std::norm(equivalent_coefficient(cfg, scene.targets.front()));
        return cfg.num_tx * eta2 / std::pow(10.0, snr_db / 10.0);
    }

    double range_bin_m(double sample_rate_hz)
    {
        return kSpeedOfLight / (2.0 * sample_rate_hz);
    }

    double quantized_range(double range_m, double sample_rate_hz)
    {
        return std::round(2.0 * range_m / kSpeedOfLight * sample_rate_hz) * range_bin_m(sample_rate_hz);
    }

    // z(n*M + m, k) = 1/sqrt(L) sum_i y(n, k + i) conj(x_m[i])
    static CMat matched_filter_bank(const CMat &y, const CMat &Xconj_t, int Lr)
    {
        const Eigen::Index N = y.rows(), L = Xconj_t.rows(), M = Xconj_t.cols();
        CMat z(N * M, Lr);
        CMat H(Lr, L);
        const double scale = 1.0 / std::sqrt(static_cast<double>(L));
        for (Eigen::Index n = 0; n < N; ++n)
        {
            for (Eigen::Index i = 0; i < L; ++i)
                H.col(i) = y.row(n).segment(i, Lr).transpose();
            const CMat zn = (H * Xconj_t) * scale; // Lr x M
            z.middleRows(n * M, M) = zn.transpose();
        }
        return z;
    }

    EchoCube simulate_echo(const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws, const CVec &tx_weights,
                           std::uint64_t seed, const SimOptions &opts)
    {
        cfg.validate();
        scene.validate();
        if (ws.num_tx() != cfg.num_tx)
            throw ConfigError("simulate_echo: waveform set and config disagree on num_tx");
        if (tx_weights.size() != cfg.num_tx)
            throw ConfigError("simulate_echo: tx_weights length must equal num_tx");
        if (opts.range_bins < 1 || opts.pulses < 1)
            throw ConfigError("simulate_echo: range_bins and pulses must be >= 1");

        const int N = cfg.num_rx, L = ws.length(), Lr = opts.range_bins;
        const double fs = ws.sample_rate_hz;
        const double dr = range_bin_m(fs);
        const long k0 = std::lround(opts.gate_start_m / dr);
        const int J = Lr + L - 1;

        const CMat X = tx_templates(ws, cfg.freq_increment_hz);
        const CMat Xconj_t = X.adjoint(); // L x M

        CMat ysig = CMat::Zero(N, J);
        for (const PathComponent &p : enumerate_paths(scene, cfg))
        {
            if (!(opts.path_mask & path_bit(p.kind)) || p.amplitude == cd(0.0))
                continue;
            const long d = std::lround(p.delay_s * fs);
            const double rq = static_cast<double>(d) * dr;
            const CVec at = tx_range_angle_steering(cfg, rq, p.tx_angle_rad).cwiseProduct(tx_weights);
            const CVec ar = rx_steering(cfg, p.rx_angle_rad);
            const Eigen::RowVectorXcd comp = at.transpose() * X; // sum_m at_m x_m[i]
            const long e = d - k0;
            for (int i = 0; i < L; ++i)
            {
                const long j = e + i;
                if (j >= 0 && j < J)
                    ysig.col(j) += p.amplitude * comp[i] * ar;
            }
        }

        EchoCube cube;
        cube.config = cfg;
        cube.rng_seed = seed;
        cube.sample_rate_hz = fs;
        cube.range_axis_m.resize(Lr);
        for (int k = 0; k < Lr; ++k)
            cube.range_axis_m[k] = static_cast<double>(k0 + k) * dr;

        const CMat zsig = matched_filter_bank(ysig, Xconj_t, Lr);
        const double sigma2 = opts.with_noise ? scene.noise_power : 0.0;
        cube.pulses.reserve(opts.pulses);
        for (int p = 0; p < opts.pulses; ++p)
        {
            if (!(sigma2 > 0.0))
            {
                cube.pulses.push_back(zsig);
                continue;
            }
            std::seed_seq sq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                             static_cast<std::uint32_t>(p)};
            std::mt19937_64 rng(sq);
            std::normal_distribution<double> G(0.0, std::sqrt(0.5 * sigma2));
            const int rows = opts.coupling == NoiseCoupling::common ? 1 : N;
            CMat v(rows, J);
            for (int n = 0; n < rows; ++n)
                for (int j = 0; j < J; ++j)
                {
                    const double re = G(rng);
                    const double im = G(rng);
                    v(n, j) = cd(re, im);
                }
            CMat zn = matched_filter_bank(v, Xconj_t, Lr);
            if (opts.coupling == NoiseCoupling::common)
                zn = zn.replicate(N, 1).eval();
            cube.pulses.push_back(zsig + zn);
        }
        return cube;
    }

    CMat noise_covariance(const RadarConfig &cfg, const WaveformSet &ws, double noise_power, NoiseCoupling coupling)
    {
        const int M = cfg.num_tx, N = cfg.num_rx;
        const CMat Rc = ambiguity_matrix(ws, 0.0, cfg.freq_increment_hz).conjugate();
        CMat out = CMat::Zero(N * M, N * M);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                if (a == b || coupling == NoiseCoupling::common)
                    out.block(a * M, b * M, M, M) = noise_power * Rc;
        return out;
    }

    namespace
    {
        static_assert(std::endian::native == std::endian::little, "cube IO assumes a little-endian host");

        struct CubeHeader
        {
            char magic[4];
            std::uint32_t version;
            std::uint32_t M;
            std::uint32_t N;
            std::uint32_t Lr;
            std::uint32_t pulses;
            double fs;
            double first_range_m;
            double range_step_m;
            std::uint8_t reserved[16];
        };
        static_assert(sizeof(CubeHeader) == 64);
    }

    void write_cube(const EchoCube &cube, const std::string &path)
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot open " + path + " for writing");
        CubeHeader h{};
        std::memcpy(h.magic, "FDMC", 4);
        h.version = 1;
        h.M = static_cast<std::uint32_t>(cube.config.num_tx);
        h.N = static_cast<std::uint32_t>(cube.config.num_rx);
        h.Lr = static_cast<std::uint32_t>(cube.bins());
        h.pulses = static_cast<std::uint32_t>(cube.pulses.size());
        h.fs = cube.sample_rate_hz;
        h.first_range_m = cube.bins() ? cube.range_axis_m[0] : 0.0;
        h.range_step_m = range_bin_m(cube.sample_rate_hz);
        f.write(reinterpret_cast<const char *>(&h), sizeof h);
        std::vector<float> buf;
        for (const CMat &P : cube.pulses)
        {
            buf.resize(2 * P.size());
            std::size_t q = 0;
            for (Eigen::Index k = 0; k < P.cols(); ++k)
                for (Eigen::Index c = 0; c < P.rows(); ++c)
                {
                    buf[q++] = static_cast<float>(P(c, k).real());
                    buf[q++] = static_cast<float>(P(c, k).imag());
                }
            f.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
        }
        if (!f)
            throw ConfigError("write failed: " + path);
    }

    EchoCube read_cube(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot open " + path);
        CubeHeader h{};
        f.read(reinterpret_cast<char *>(&h), sizeof h);
        if (!f || std::memcmp(h.magic, "FDMC", 4) != 0 || h.version != 1)
            throw ConfigError(path + ": not an FDMC v1 cube");
        EchoCube cube;
        cube.config.num_tx = static_cast<int>(h.M);
        cube.config.num_rx = static_cast<int>(h.N);
        cube.sample_rate_hz = h.fs;
        cube.range_axis_m.resize(h.Lr);
        for (std::uint32_t k = 0; k < h.Lr; ++k)
            cube.range_axis_m[k] = h.first_range_m + k * h.range_step_m;
        const Eigen::Index C = static_cast<Eigen::Index>(h.M) * h.N;
        std::vector<float> buf(2 * static_cast<std::size_t>(C) * h.Lr);
        for (std::uint32_t p = 0; p < h.pulses; ++p)
        {
            f.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
            if (!f)
                throw ConfigError(path + ": truncated cube");
            CMat P(C, h.Lr);
            std::size_t q = 0;
            for (Eigen::Index k = 0; k < P.cols(); ++k)
                for (Eigen::Index c = 0; c < C; ++c, q += 2)
                    P(c, k) = cd(buf[q], buf[q + 1]);
            cube.pulses.push_back(std::move(P));
        }
        return cube;
    }

    void write_cube_summary_csv(const EchoCube &cube, const std::string &path)
    {
        detail::CsvWriter w(path, {"range_m", "mean_power_db"});
        const int Lr = cube.bins();
        for (int k = 0; k < Lr; ++k)
        {
            double acc = 0.0;
            for (std::size_t p = 0; p < cube.pulses.size(); ++p)
                acc += cube.pulses[p].col(k).squaredNorm();
            acc /= static_cast<double>(cube.pulses.size() * cube.channels());
            w.row(cube.range_axis_m[k], 10.0 * std::log10(std::max(acc, 1e-300)));
        }
    }
}
