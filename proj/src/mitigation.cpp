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

#include "fdamimo/mitigation.hpp"
#include "fdamimo/detection.hpp"
#include "csv.hpp"

#include <cmath>
#include <limits>

namespace fdamimo
{
    CovarianceEstimate received_covariance(const EchoCube &cube, const CVec &tx_weights)
    {
        CovarianceEstimate e;
        const CMat S = cube.snapshots();
        e.matrix = HermitianMatrix::from(sample_covariance(S));
        e.snapshot_count = S.cols();
        e.delta_f_hz = cube.config.freq_increment_hz;
        e.tx_weights = tx_weights;
        return e;
    }

    CVec mpdr_rx_weights(const HermitianMatrix &R, const CVec &steer, double loading_factor)
    {
        if (steer.size() != R.dim())
            throw ConfigError("mpdr_rx_weights: dimension mismatch");
        if (!(steer.norm() > 0.0))
            throw ConfigError("mpdr_rx_weights: steering vector is zero");
        const double eps = loading_factor * R.values.trace().real() / static_cast<double>(R.dim());
        const CVec u = solve_loaded(R, steer, eps);
        const cd xi_inv = steer.dot(u); // a^H R^{-1} a
        return u / std::conj(xi_inv);
    }

    CVec optimal_tx_weights(const HermitianMatrix &R, const CVec &tx_steer, TxWeightMode mode)
    {
        const Eigen::Index M = tx_steer.size();
        if (R.dim() < M || R.dim() % M != 0)
            throw ConfigError("optimal_tx_weights: covariance size is not a multiple of M");
        const CVec uniform = CVec::Ones(M);
        const EigenDecomposition ed = eig_hermitian(R);
        const double top = ed.values[0];
        const double next = ed.values.size() > 1 ? ed.values[1] : 0.0;
        // Flat spectrum: no dominant direction to project on
        if (!(top > 0.0) || (top - next) <= 1e-9 * std::abs(top))
            return uniform;

        const CVec v = ed.vectors.col(0).head(M);
        const double vn2 = v.squaredNorm();
        if (std::sqrt(vn2) < 1e-12)
            throw NumericalError("optimal_tx_weights: leading eigenvector has no transmit-block energy");

        CVec p = v * (v.dot(tx_steer) / vn2); // v v^H a / ||v||^2
        if (mode == TxWeightMode::perpendicular)
            p = tx_steer - p;
        const double pn = p.norm();
        if (!(pn > 1e-12 * tx_steer.norm()))
            return uniform;
        return p * (std::sqrt(static_cast<double>(M)) / pn);
    }

    MultipathGeometry MultipathGeometry::from_scene(const Scene &scene, const RadarConfig &cfg, std::size_t target)
    {
        if (target >= scene.targets.size())
            throw ConfigError("MultipathGeometry: target index out of range");
        const Target &t = scene.targets[target];
        const MirrorTarget mt = mirror_geometry(t.range_m, t.angle_rad, scene.reflector_offset_m);
        MultipathGeometry g;
        g.range_m = t.range_m;
        g.angle_rad = t.angle_rad;
        g.equiv_range_m = mt.equiv_first_order_range_m;
        g.mirror_range_m = mt.range_m;
        g.mirror_angle_rad = mt.angle_rad;
        g.eta0_sq = std::norm(equivalent_coefficient(cfg, t));
        g.rho_sq = std::norm(scene.reflection_coeff);
        return g;
    }

    double mitigation_objective(double delta_f_hz, const MultipathGeometry &geo, const RadarConfig &cfg,
                                const WaveformSet &ws, const CVec &tx_weights)
    {
        if (!(delta_f_hz > 0.0 && delta_f_hz < cfg.bandwidth_hz))
            throw ConfigError("mitigation_objective: delta f must lie in (0, B_s)");
        if (tx_weights.size() != cfg.num_tx || ws.num_tx() != cfg.num_tx)
            throw ConfigError("mitigation_objective: dimension mismatch");
        if (!(geo.rho_sq > 0.0) || !(geo.eta0_sq > 0.0))
            throw ConfigError("mitigation_objective: needs nonzero eta0 and reflection coefficient");

        const CMat Rss = ambiguity_matrix(ws, 0.0, delta_f_hz);
        const CMat Rc = Rss.conjugate();
        auto term = [&](double r, double th) {
            const CVec a = tx_range_angle_steering(cfg, r, th, delta_f_hz).cwiseProduct(tx_weights);
            return (a.adjoint() * Rc).squaredNorm();
        };
        return term(geo.equiv_range_m, geo.angle_rad) + term(geo.equiv_range_m, geo.mirror_angle_rad) +
               geo.rho_sq * term(geo.mirror_range_m, geo.mirror_angle_rad) +
               Rss.trace().real() / (geo.eta0_sq * geo.rho_sq);
    }

    double objective_gradient(double delta_f_hz, double h, const MultipathGeometry &geo, const RadarConfig &cfg,
                              const WaveformSet &ws, const CVec &tx_weights)
    {
        const double gp = mitigation_objective(delta_f_hz + h, geo, cfg, ws, tx_weights);
        const double gm = mitigation_objective(delta_f_hz - h, geo, cfg, ws, tx_weights);
        return (gp - gm) / (2.0 * h);
    }

    FreqOptResult optimize_freq_increment(double initial_hz, const MultipathGeometry &geo, const RadarConfig &cfg,
                                          const WaveformSet &ws, const CVec &tx_weights, const FreqOptOptions &opts)
    {
        const double B = cfg.bandwidth_hz;
        if (!(initial_hz > 0.0 && initial_hz < B))
            throw ConfigError("optimize_freq_increment: initial delta f must lie in (0, B_s)");
        const double h = opts.fd_step_hz > 0.0 ? opts.fd_step_hz : B * 1e-4;
        const double delta = std::max(opts.clip_margin_hz > 0.0 ? opts.clip_margin_hz : B * 1e-3, 1.5 * h);
        const double move0 = opts.trial_move_hz > 0.0 ? opts.trial_move_hz : B / 20.0;
        if (!(2.0 * delta < B))
            throw ConfigError("optimize_freq_increment: clip margin leaves no feasible interval");
        auto clip = [&](double x) { return std::clamp(x, delta, B - delta); };
        auto g = [&](double x) { return mitigation_objective(x, geo, cfg, ws, tx_weights); };

        FreqOptResult res;
        double x = clip(initial_hz);
        double gx = g(x);
        res.trace.push_back({0, x, gx});

        for (int it = 1; it <= opts.max_iter; ++it)
        {
            const double grad = objective_gradient(x, h, geo, cfg, ws, tx_weights);
            // Gradient below the rounding floor of the difference quotient: stationary
            if (!(std::abs(grad) * h > 1e-13 * std::max(1.0, std::abs(gx))))
            {
                res.converged = true;
                break;
            }
            double step = move0 / std::abs(grad);
            bool accepted = false;
            double xn = x, gn = gx;
            for (int b = 0; b <= opts.max_backtracks; ++b, step *= opts.backtrack)
            {
                xn = clip(x - step * grad);
                if (xn == x)
                    break;
                gn = g(xn);
                if (gn <= gx - opts.armijo_c * grad * (x - xn))
                {
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
            {
                res.converged = true;
                break;
            }
            const double change = gx - gn;
            x = xn;
            gx = gn;
            res.iterations = it;
            res.trace.push_back({it, x, gx});
            if (change < opts.tol * std::max(1.0, std::abs(gx)))
            {
                res.converged = true;
                break;
            }
        }
        res.delta_f_hz = x;
        res.objective = gx;
        return res;
    }

    std::vector<ObjectivePoint> sweep_objective(double start_hz, double stop_hz, int steps, const MultipathGeometry &geo,
                                                const RadarConfig &cfg, const WaveformSet &ws, const CVec &tx_weights)
    {
        if (steps < 1)
            throw ConfigError("sweep_objective: steps must be >= 1");
        std::vector<ObjectivePoint> out;
        out.reserve(steps);
        for (int i = 0; i < steps; ++i)
        {
            const double x = steps == 1 ? start_hz : start_hz + (stop_hz - start_hz) * i / (steps - 1);
            out.push_back({i, x, mitigation_objective(x, geo, cfg, ws, tx_weights)});
        }
        return out;
    }

    double output_sinr_db(const CVec &w, const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws,
                          const CVec &tx_weights, const SimOptions &sim, std::size_t target)
    {
        if (target >= scene.targets.size())
            throw ConfigError("output_sinr_db: target index out of range");
        SimOptions clean = sim;
        clean.with_noise = false;
        clean.pulses = 1;

        // Signal: direct path of the chosen target alone
        Scene only = scene;
        only.targets = {scene.targets[target]};
        clean.path_mask = path_bit(PathKind::direct);
        const EchoCube sig = simulate_echo(only, cfg, ws, tx_weights, 0, clean);
        const CVec s = snapshot_at_range(sig.data(), sig.range_axis_m,
                                         quantized_range(scene.targets[target].range_m, ws.sample_rate_hz));

        // Interference: every other path of every target
        CMat Rin = noise_covariance(cfg, ws, scene.noise_power, sim.coupling);
        clean.path_mask = kAllPaths & ~path_bit(PathKind::direct);
        Rin += sample_covariance(simulate_echo(scene, cfg, ws, tx_weights, 0, clean).snapshots());
        if (scene.targets.size() > 1)
        {
            Scene others = scene;
            others.targets.erase(others.targets.begin() + static_cast<std::ptrdiff_t>(target));
            clean.path_mask = path_bit(PathKind::direct);
            Rin += sample_covariance(simulate_echo(others, cfg, ws, tx_weights, 0, clean).snapshots());
        }
        const double num = std::norm(w.dot(s));
        const double den = w.dot(Rin * w).real();
        if (!(den > 0.0))
            return std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(num / den);
    }

    MitigationSolution run_mitigation(const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws,
                                      const SimOptions &sim, std::uint64_t seed, const MitigationOptions &opts)
    {
        if (opts.rounds < 0)
            throw ConfigError("run_mitigation: rounds must be >= 0");
        if (opts.target >= scene.targets.size())
            throw ConfigError("run_mitigation: target index out of range");
        RadarConfig c = cfg;
        c.freq_increment_hz = opts.initial_delta_f_hz;
        c.validate();
        const MultipathGeometry geo = MultipathGeometry::from_scene(scene, c, opts.target);
        const Target &t = scene.targets[opts.target];
        const double rq = quantized_range(t.range_m, ws.sample_rate_hz);

        MitigationSolution sol;
        sol.tx_weights = CVec::Ones(c.num_tx);

        auto receive = [&](int round, double objective) {
            const EchoCube cube = simulate_echo(scene, c, ws, sol.tx_weights, seed, sim);
            const CovarianceEstimate R = received_covariance(cube, sol.tx_weights);
            const CVec steer = virtual_steering(c, rq, t.angle_rad, t.angle_rad, sol.tx_weights);
            sol.rx_weights = mpdr_rx_weights(R.matrix, steer, opts.loading_factor);
            sol.sinr_trace.push_back(
                {round, c.freq_increment_hz, objective, output_sinr_db(sol.rx_weights, scene, c, ws, sol.tx_weights, sim, opts.target)});
            return R;
        };

        double g0 = std::numeric_limits<double>::quiet_NaN();
        if (geo.rho_sq > 0.0 && c.freq_increment_hz > 0.0 && c.freq_increment_hz < c.bandwidth_hz)
            g0 = mitigation_objective(c.freq_increment_hz, geo, c, ws, sol.tx_weights);
        CovarianceEstimate R = receive(0, g0);

        for (int round = 1; round <= opts.rounds; ++round)
        {
            const CVec at = tx_range_angle_steering(c, rq, t.angle_rad);
            sol.tx_weights = optimal_tx_weights(R.matrix, at, opts.tx_mode);
            const FreqOptResult fr = optimize_freq_increment(c.freq_increment_hz, geo, c, ws, sol.tx_weights, opts.optimizer);
            sol.optimizer_converged = sol.optimizer_converged && fr.converged;
            for (const ObjectivePoint &p : fr.trace)
                sol.objective_trace.push_back({static_cast<int>(sol.objective_trace.size()), p.delta_f_hz, p.objective});
            c.freq_increment_hz = fr.delta_f_hz;
            R = receive(round, fr.objective);
        }
        sol.freq_increment_hz = c.freq_increment_hz;
        return sol;
    }

    void write_mitigation_trace_csv(const MitigationSolution &s, const std::string &path)
    {
        detail::CsvWriter w(path, {"iteration", "delta_f_hz", "objective", "sinr_db"});
        for (const RoundRecord &r : s.sinr_trace)
            w.row(r.round, r.delta_f_hz, r.objective, r.sinr_db);
    }

    void write_sweep_csv(const std::vector<ObjectivePoint> &sweep, const std::string &path)
    {
        detail::CsvWriter w(path, {"iteration", "delta_f_hz", "objective", "sinr_db"});
        for (const ObjectivePoint &p : sweep)
            w.row(p.iteration, p.delta_f_hz, p.objective, "");
    }
}
