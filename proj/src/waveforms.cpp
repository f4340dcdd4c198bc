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

#include "fdamimo/waveforms.hpp"
#include "csv.hpp"

#include <cmath>
#include <random>

namespace fdamimo
{
    std::array<double, 11> barker11_phase_code()
    {
        return {+1, +1, +1, -1, -1, -1, +1, -1, -1, +1, -1};
    }

    WaveformSet build_waveform_set(const RadarConfig &cfg, int samples_per_pulse, std::uint64_t seed, ChipMode mode)
    {
        const int M = cfg.num_tx;
        const int L = samples_per_pulse;
        if (M < 1)
            throw ConfigError("build_waveform_set: num_tx must be >= 1");
        if (L < M * 11)
            throw ConfigError("build_waveform_set: samples_per_pulse must be >= 11 * num_tx");
        if (!(cfg.pulse_s > 0.0))
            throw ConfigError("build_waveform_set: pulse_s must be > 0");

        const auto code = barker11_phase_code();
        RVec chips(L);
        for (int i = 0; i < L; ++i)
            chips[i] = code[i % 11];

        CMat S(M, L);
        if (mode == ChipMode::upsampled)
            for (int i = 0; i < L; ++i)
                S(0, i) = code[std::min(10, (i * 11) / L)];
        else
            S.row(0) = chips.transpose().cast<cd>();

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int m = 1; m < M; ++m)
            for (int i = 0; i < L; ++i)
                S(m, i) = chips[i] * std::polar(1.0, 2.0 * kPi * U(rng));

        // Modified Gram-Schmidt on rows, zero lag
        for (int m = 0; m < M; ++m)
        {
            for (int k = 0; k < m; ++k)
            {
                // <q_k, v> = sum conj(q_k) v
                const cd c = (S.row(k).conjugate().cwiseProduct(S.row(m))).sum() / S.row(k).squaredNorm();
                S.row(m) -= c * S.row(k);
            }
            const double p = S.row(m).squaredNorm() / L;
            if (!(p > 1e-20))
                throw NumericalError("build_waveform_set: degenerate row after orthogonalization");
            S.row(m) /= std::sqrt(p);
        }

        WaveformSet ws;
        ws.samples = std::move(S);
        ws.sample_rate_hz = L / cfg.pulse_s;
        ws.code_name = mode == ChipMode::upsampled ? "barker11-upsampled+random-phase" : "barker11-cyclic+random-phase";
        return ws;
    }

    CMat tx_templates(const WaveformSet &ws, double delta_f_hz)
    {
        const int M = ws.num_tx(), L = ws.length();
        CMat X(M, L);
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < L; ++i)
            {
                double c = static_cast<double>(m) * delta_f_hz * i / ws.sample_rate_hz;
                c -= std::floor(c);
                X(m, i) = ws.samples(m, i) * std::polar(1.0, 2.0 * kPi * c);
            }
        return X;
    }

    CMat ambiguity_matrix(const WaveformSet &ws, double delay_s, double delta_f_hz, bool cyclic)
    {
        const int M = ws.num_tx(), L = ws.length();
        const long k = std::lround(delay_s * ws.sample_rate_hz);
        if (std::abs(k) >= L)
            throw ConfigError("ambiguity_matrix: |delay| must be shorter than the pulse");

        // s_m[i] s*_m'[i-k] e^{-j2pi(m'-m) df i/fs} = x_m[i] conj(x_m'[i-k]) e^{-j2pi m' df k/fs}
        const CMat X = tx_templates(ws, delta_f_hz);
        CMat shifted = CMat::Zero(M, L); // shifted(:, i) = X(:, i - k)
        for (int i = 0; i < L; ++i)
        {
            long j = i - k;
            if (cyclic)
                j = ((j % L) + L) % L;
            if (j >= 0 && j < L)
                shifted.col(i) = X.col(j);
        }
        CMat R = X * shifted.adjoint() / static_cast<double>(L);
        if (k != 0)
            for (int mp = 0; mp < M; ++mp)
            {
                double c = static_cast<double>(mp) * delta_f_hz * k / ws.sample_rate_hz;
                c -= std::floor(c);
                R.col(mp) *= std::polar(1.0, -2.0 * kPi * c);
            }
        return R;
    }

    CMat ambiguity_matrix(const WaveformSet &ws, double delay_s, const RadarConfig &cfg)
    {
        if (std::abs(delay_s) >= cfg.pulse_s)
            throw ConfigError("ambiguity_matrix: |delay| must be shorter than pulse_s");
        return ambiguity_matrix(ws, delay_s, cfg.freq_increment_hz, false);
    }

    double peak_cross_correlation(const WaveformSet &ws)
    {
        const int M = ws.num_tx(), L = ws.length();
        double peak = 0.0;
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
            {
                if (a == b)
                    continue;
                for (int k = 1; k < L; ++k)
                {
                    cd acc = 0.0;
                    for (int i = k; i < L; ++i)
                        acc += ws.samples(a, i) * std::conj(ws.samples(b, i - k));
                    peak = std::max(peak, std::abs(acc) / L);
                }
            }
        return peak;
    }

    void write_waveforms_csv(const WaveformSet &ws, const std::string &path)
    {
        detail::CsvWriter w(path, {"tx_index", "sample_index", "re", "im"});
        for (int m = 0; m < ws.num_tx(); ++m)
            for (int i = 0; i < ws.length(); ++i)
                w.row(m, i, ws.samples(m, i).real(), ws.samples(m, i).imag());
    }
}
