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
#include "fdamimo/echo_sim.hpp"
#include "fdamimo/linalg.hpp"
#include "fdamimo/waveforms.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace fdamimo
{
    struct CovarianceEstimate
    {
        HermitianMatrix matrix; // unloaded sample covariance R_zz
        Eigen::Index snapshot_count = 0;
        double delta_f_hz = 0.0;
        CVec tx_weights;
    };

    CovarianceEstimate received_covariance(const EchoCube &cube, const CVec &tx_weights);

    // w = R^{-1} a / (a^H R^{-1} a), R loaded by factor * tr / dim
    CVec mpdr_rx_weights(const HermitianMatrix &R, const CVec &steer, double loading_factor = 1e-3);

    enum class TxWeightMode
    {
        projection,   // a_t projected onto the leading eigenvector block
        perpendicular // a_t with that component removed
    };

    // ||w_F|| = sqrt(M). Uniform weights when the eigen-spectrum of R is flat.
    CVec optimal_tx_weights(const HermitianMatrix &R, const CVec &tx_steer, TxWeightMode mode = TxWeightMode::projection);

    // Ranges, angles and powers the objective needs; taken from the scene (oracle values in simulation)
    struct MultipathGeometry
    {
        double range_m = 0.0;
        double angle_rad = 0.0;
        double equiv_range_m = 0.0;
        double mirror_range_m = 0.0;
        double mirror_angle_rad = 0.0;
        double eta0_sq = 1.0;
        double rho_sq = 0.0;

        static MultipathGeometry from_scene(const Scene &scene, const RadarConfig &cfg, std::size_t target = 0);
    };

    // g(df): projected multipath energy through R_ss^*(0; df) plus tr(R_ss(0)) / (|eta0|^2 |rho|^2)
    double mitigation_objective(double delta_f_hz, const MultipathGeometry &geo, const RadarConfig &cfg,
                                const WaveformSet &ws, const CVec &tx_weights);

    struct ObjectivePoint
    {
        int iteration;
        double delta_f_hz;
        double objective;
    };

    struct FreqOptOptions
    {
        double fd_step_hz = -1.0;      // <= 0: B_s * 1e-4
        double clip_margin_hz = -1.0;  // <= 0: B_s * 1e-3
        double trial_move_hz = -1.0;   // first trial move of each line search; <= 0: B_s / 20
        int max_iter = 200;
        double tol = 1e-10;            // relative change of g
        double armijo_c = 1e-4;
        double backtrack = 0.5;
        int max_backtracks = 50;
    };

    struct FreqOptResult
    {
        double delta_f_hz = 0.0;
        double objective = 0.0;
        std::vector<ObjectivePoint> trace; // accepted iterates, starting point first
        int iterations = 0;
        bool converged = false;
    };

    // Central-difference derivative of g
    double objective_gradient(double delta_f_hz, double h, const MultipathGeometry &geo, const RadarConfig &cfg,
                              const WaveformSet &ws, const CVec &tx_weights);

    // Projected gradient descent with Armijo backtracking on [delta, B_s - delta]
    FreqOptResult optimize_freq_increment(double initial_hz, const MultipathGeometry &geo, const RadarConfig &cfg,
                                          const WaveformSet &ws, const CVec &tx_weights, const FreqOptOptions &opts = {});

    // steps evenly spaced points from start to stop inclusive
    std::vector<ObjectivePoint> sweep_objective(double start_hz, double stop_hz, int steps, const MultipathGeometry &geo,
                                                const RadarConfig &cfg, const WaveformSet &ws, const CVec &tx_weights);

    // SINR of receive weights w against the noise-free direct-path snapshot at its bin, with
    // interference = multipath-only sample covariance plus the filtered noise covariance
    double output_sinr_db(const CVec &w, const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws,
                          const CVec &tx_weights, const SimOptions &sim, std::size_t target = 0);

    struct RoundRecord
    {
        int round;
        double delta_f_hz;
        double objective;
        double sinr_db;
    };

    struct MitigationOptions
    {
        double initial_delta_f_hz = 32e6;
        int rounds = 1;
        TxWeightMode tx_mode = TxWeightMode::projection;
        FreqOptOptions optimizer;
        double loading_factor = 1e-3;
        std::size_t target = 0;
    };

    struct MitigationSolution
    {
        CVec rx_weights;
        CVec tx_weights;
        double freq_increment_hz = 0.0;
        std::vector<RoundRecord> sinr_trace;
        std::vector<ObjectivePoint> objective_trace; // descent iterates of all rounds
        bool optimizer_converged = true;
    };

    // Round 0: uniform w_F at the initial df, MPDR w_R. Each further round updates w_F from R_zz,
    // descends on df, re-simulates with the new transmit settings and recomputes w_R.
    MitigationSolution run_mitigation(const Scene &scene, const RadarConfig &cfg, const WaveformSet &ws,
                                      const SimOptions &sim, std::uint64_t seed, const MitigationOptions &opts);

    // iteration, delta_f_hz, objective, sinr_db (sinr empty for descent rows)
    void write_mitigation_trace_csv(const MitigationSolution &s, const std::string &path);
    void write_sweep_csv(const std::vector<ObjectivePoint> &sweep, const std::string &path);
}
