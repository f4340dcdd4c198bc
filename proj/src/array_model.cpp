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

#include "fdamimo/array_model.hpp"

#include <cmath>
#include <string>

namespace fdamimo
{
    void RadarConfig::validate() const
    {
        if (num_tx < 1 || num_rx < 1)
            throw ConfigError("num_tx and num_rx must be >= 1");
        if (!(carrier_hz > 0.0) || !(tx_spacing_m > 0.0) || !(rx_spacing_m > 0.0) || !(bandwidth_hz > 0.0) ||
            !(pulse_s > 0.0) || !(pri_s > 0.0) || !(total_power > 0.0))
            throw ConfigError("lengths, durations, frequencies and power must be strictly positive");
        if (freq_increment_hz < 0.0 || freq_increment_hz > bandwidth_hz)
            throw ConfigError("freq_increment_hz must lie in [0, bandwidth_hz]");
        if (!(pulse_s < pri_s))
            throw ConfigError("pulse_s must be shorter than pri_s");
    }

    RadarConfig RadarConfig::half_wavelength(int M, int N, double f0, double delta_f)
    {
        RadarConfig c;
        c.num_tx = M;
        c.num_rx = N;
        c.carrier_hz = f0;
        c.freq_increment_hz = delta_f;
        c.tx_spacing_m = 0.5 * kSpeedOfLight / f0;
        c.rx_spacing_m = c.tx_spacing_m;
        return c;
    }

    void Scene::validate() const
    {
        for (const auto &t : targets)
        {
            if (!(t.range_m > 0.0))
                throw ConfigError("target range must be > 0");
            if (!(t.angle_rad > 0.0 && t.angle_rad < kPi))
                throw ConfigError("target angle must lie in (0, 180) deg");
        }
        if (std::abs(reflection_coeff) > 1.0 + 1e-12)
            throw ConfigError("|reflection_coeff| must be <= 1");
        if (reflector_offset_m < 0.0)
            throw ConfigError("reflector_offset_m must be >= 0");
        if (noise_power < 0.0)
            throw ConfigError("noise_power must be >= 0");
    }

    MirrorTarget mirror_geometry(double range_m, double angle_rad, double h_a)
    {
        if (!(range_m > 0.0))
            throw ConfigError("mirror_geometry: range must be > 0");
        if (h_a < 0.0)
            throw ConfigError("mirror_geometry: reflector offset must be >= 0");

        // Mirror image sits 2 h_a below the array axis
        const double x = range_m * std::sin(angle_rad);
        const double y = 2.0 * h_a + range_m * std::cos(angle_rad);
        MirrorTarget m;
        m.range_m = std::hypot(x, y);
        m.angle_rad = kPi - std::atan2(x, y);
        m.equiv_first_order_range_m = 0.5 * (range_m + m.range_m);
        return m;
    }

    static CVec ula_steering(int n_elem, double spacing_over_lambda, double angle_rad)
    {
        CVec a(n_elem);
        const double phi = 2.0 * kPi * spacing_over_lambda * std::cos(angle_rad);
        for (int n = 0; n < n_elem; ++n)
            a[n] = std::polar(1.0, phi * n);
        return a;
    }

    CVec rx_steering(const RadarConfig &cfg, double angle_rad)
    {
        return ula_steering(cfg.num_rx, cfg.rx_spacing_m / cfg.wavelength(), angle_rad);
    }

    CVec tx_steering(const RadarConfig &cfg, double angle_rad)
    {
        return ula_steering(cfg.num_tx, cfg.tx_spacing_m / cfg.wavelength(), angle_rad);
    }

    CVec range_steering(const RadarConfig &cfg, double range_m, double delta_f_hz)
    {
        CVec g(cfg.num_tx);
        // Reduce the phase modulo 2 pi per element before polar() for large ranges
        const double cycles = 2.0 * delta_f_hz / kSpeedOfLight * range_m;
        for (int m = 0; m < cfg.num_tx; ++m)
        {
            double c = cycles * m;
            c -= std::floor(c);
            g[m] = std::polar(1.0, -2.0 * kPi * c);
        }
        return g;
    }

    CVec range_steering(const RadarConfig &cfg, double range_m)
    {
        return range_steering(cfg, range_m, cfg.freq_increment_hz);
    }

    CVec tx_range_angle_steering(const RadarConfig &cfg, double range_m, double angle_rad, double delta_f_hz)
    {
        return tx_steering(cfg, angle_rad).cwiseProduct(range_steering(cfg, range_m, delta_f_hz));
    }

    CVec tx_range_angle_steering(const RadarConfig &cfg, double range_m, double angle_rad)
    {
        return tx_range_angle_steering(cfg, range_m, angle_rad, cfg.freq_increment_hz);
    }

    CVec kron(const CVec &x, const CVec &y)
    {
        CVec out(x.size() * y.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            out.segment(i * y.size(), y.size()) = x[i] * y;
        return out;
    }

    CVec virtual_steering(const RadarConfig &cfg, double range_m, double rx_angle_rad, double tx_angle_rad,
                          const CVec &tx_weights)
    {
        if (tx_weights.size() != cfg.num_tx)
            throw ConfigError("virtual_steering: tx_weights length must equal num_tx");
        CVec at = tx_range_angle_steering(cfg, range_m, tx_angle_rad).cwiseProduct(tx_weights);
        return kron(rx_steering(cfg, rx_angle_rad), at);
    }

    CVec virtual_steering(const RadarConfig &cfg, double range_m, double rx_angle_rad, double tx_angle_rad)
    {
        return virtual_steering(cfg, range_m, rx_angle_rad, tx_angle_rad, CVec::Ones(cfg.num_tx));
    }

    SpatialFrequencies spatial_frequencies(const RadarConfig &cfg, double range_m, double angle_rad)
    {
        const double lam = cfg.wavelength();
        SpatialFrequencies f;
        f.f_sr = cfg.rx_spacing_m / lam * std::cos(angle_rad);
        f.f_st = -2.0 * cfg.freq_increment_hz / kSpeedOfLight * range_m + cfg.tx_spacing_m / lam * std::cos(angle_rad);
        return f;
    }
}
