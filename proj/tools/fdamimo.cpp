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

// Batch runner: simulate | discriminate | mitigate | sweep

#include "fdamimo/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fdamimo;

namespace
{
    struct Common
    {
        std::string scenario;
        std::string out;
        std::uint64_t seed = 0;
        double grid_deg = -1.0;
        double pfa = -1.0;
    };

    std::string read_file(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot open scenario file " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    // git blob id: sha1("blob <size>\0<content>")
    std::string git_blob_sha1(const std::string &content)
    {
        std::string buf = "blob " + std::to_string(content.size());
        buf.push_back('\0');
        buf += content;
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(buf.data(), buf.size(), md, &len, EVP_sha1(), nullptr) != 1)
            throw NumericalError("sha1 failed");
        std::ostringstream o;
        for (unsigned int i = 0; i < len; ++i)
            o << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
        return o.str();
    }

    std::string utc_now()
    {
        const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::ostringstream o;
        o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return o.str();
    }

    class Run
    {
    public:
        Run(const std::string &command, const Common &opt) : opt_(opt), command_(command)
        {
            started_ = utc_now();
            text_ = read_file(opt.scenario);
            sc_ = parse_scenario(text_, opt.scenario);
            if (opt.grid_deg > 0.0)
                sc_.discrimination.grid_deg = opt.grid_deg;
            if (opt.pfa > 0.0)
            {
                if (!(opt.pfa < 1.0))
                    throw ConfigError("--pfa must lie in (0, 1)");
                sc_.cfar.pfa = opt.pfa;
            }
            fs::create_directories(opt.out);
            ws_ = make_waveforms(sc_);
        }

        Scenario &scenario() { return sc_; }
        const WaveformSet &waveforms() const { return ws_; }
        std::uint64_t seed() const { return opt_.seed; }

        std::string path(const std::string &name)
        {
            files_.push_back(name);
            return (fs::path(opt_.out) / name).string();
        }

        void finish(const nlohmann::json &summary)
        {
            {
                std::ofstream f(path("scenario_resolved.ini"));
                f << sc_.to_ini();
            }
            nlohmann::json m;
            m["command"] = command_;
            m["scenario_path"] = opt_.scenario;
            m["scenario_hash"] = git_blob_sha1(text_);
            m["seed"] = opt_.seed;
            m["waveform_seed"] = sc_.waveform_seed;
            m["started_utc"] = started_;
            m["finished_utc"] = utc_now();
            m["files"] = files_;
            m["summary"] = summary;
            std::ofstream f((fs::path(opt_.out) / "manifest.json").string());
            f << m.dump(2) << "\n";
        }

    private:
        Common opt_;
        std::string command_;
        std::string started_;
        std::string text_;
        Scenario sc_;
        WaveformSet ws_;
        std::vector<std::string> files_;
    };

    std::string range_tag(double r)
    {
        std::ostringstream o;
        o << std::fixed << std::setprecision(1) << r;
        return o.str();
    }

    nlohmann::json cmd_simulate(const Common &opt)
    {
        Run run("simulate", opt);
        Scenario &s = run.scenario();
        const WaveformSet &ws = run.waveforms();
        if (s.output.write_waveforms)
            write_waveforms_csv(ws, run.path("waveforms.csv"));

        nlohmann::json summary = nlohmann::json::object();
        for (const auto &[tag, df] : {std::pair<std::string, double>{"fda", s.radar.freq_increment_hz}, {"mimo", 0.0}})
        {
            const RadarConfig cfg = with_delta_f(s.radar, df);
            const EchoCube cube = simulate_echo(s.scene, cfg, ws, CVec::Ones(cfg.num_tx), run.seed(), s.sim);
            if (s.output.write_cube)
            {
                write_cube(cube, run.path("cube_" + tag + ".fdmc"));
                write_cube_summary_csv(cube, run.path("cube_" + tag + "_summary.csv"));
            }
            const CMat avg = cube.data();
            write_profile_csv(single_channel_profile(avg, cube.range_axis_m), run.path("profile_" + tag + "_single.csv"));
            write_profile_csv(noncoherent_profile(avg, cube.range_axis_m), run.path("profile_" + tag + "_noncoherent.csv"));
            const DetectionRun det = detect_targets(cube, s.scene, s.cfar);
            nlohmann::json levels = nlohmann::json::array();
            for (std::size_t i = 0; i < det.profiles.size(); ++i)
            {
                const std::string base = "profile_" + tag + "_target" + std::to_string(i);
                write_profile_csv(det.profiles[i], run.path(base + ".csv"));
                write_threshold_csv(det.profiles[i], det.sets[i], run.path(base + "_threshold.csv"));
                const Target &t = s.scene.targets[i];
                const MirrorTarget mt = mirror_geometry(t.range_m, t.angle_rad, s.scene.reflector_offset_m);
                levels.push_back({{"target", i},
                                  {"first_order_db", level_relative_to(det.profiles[i], mt.equiv_first_order_range_m, t.range_m)},
                                  {"second_order_db", level_relative_to(det.profiles[i], mt.range_m, t.range_m)}});
            }
            summary[tag] = {{"delta_f_hz", df}, {"detections_m", det.ranges_m}, {"multipath_levels", levels}};
            std::cout << tag << ": " << det.ranges_m.size() << " detections\n";
        }
        run.finish(summary);
        return summary;
    }

    nlohmann::json cmd_discriminate(const Common &opt)
    {
        Run run("discriminate", opt);
        Scenario &s = run.scenario();
        const WaveformSet &ws = run.waveforms();
        nlohmann::json summary = nlohmann::json::object();
        for (const auto &[tag, df] : {std::pair<std::string, double>{"fda", s.radar.freq_increment_hz}, {"mimo", 0.0}})
        {
            const RadarConfig cfg = with_delta_f(s.radar, df);
            const EchoCube cube = simulate_echo(s.scene, cfg, ws, CVec::Ones(cfg.num_tx), run.seed(), s.sim);
            const DetectionRun det = detect_targets(cube, s.scene, s.cfar);
            for (std::size_t i = 0; i < det.profiles.size(); ++i)
            {
                const std::string base = "profile_" + tag + "_target" + std::to_string(i);
                write_profile_csv(det.profiles[i], run.path(base + ".csv"));
                write_threshold_csv(det.profiles[i], det.sets[i], run.path(base + "_threshold.csv"));
            }
            std::vector<SpatialSpectrum> spectra;
            const DiscriminationReport rep = discriminate(cube, det.ranges_m, cfg, s.discrimination, &spectra);
            write_labels_csv(rep, run.path("labels_" + tag + ".csv"));
            if (s.output.write_spectra)
                for (const SpatialSpectrum &sp : spectra)
                    write_spectrum_csv(sp, run.path("spectrum_" + tag + "_" + range_tag(sp.compensated_range_m) + "m.csv"));
            nlohmann::json labels = nlohmann::json::array();
            for (const CellLabel &l : rep.labels)
            {
                labels.push_back({{"range_m", l.range_m},
                                  {"label", l.real ? "real" : "false"},
                                  {"theta_t_deg", rad2deg(l.theta_t_rad)},
                                  {"theta_r_deg", rad2deg(l.theta_r_rad)}});
                std::cout << tag << " " << std::fixed << std::setprecision(2) << l.range_m << " m: "
                          << (l.real ? "real" : "false") << " (" << rad2deg(l.theta_t_rad) << ", "
                          << rad2deg(l.theta_r_rad) << ")\n";
            }
            summary[tag] = {{"delta_f_hz", df}, {"labels", labels}};
        }
        run.finish(summary);
        return summary;
    }

    nlohmann::json cmd_mitigate(const Common &opt)
    {
        Run run("mitigate", opt);
        Scenario &s = run.scenario();
        const WaveformSet &ws = run.waveforms();
        const Target &t = s.scene.targets.at(s.mitigation.target);
        const MirrorTarget mt = mirror_geometry(t.range_m, t.angle_rad, s.scene.reflector_offset_m);

        // Before: uniform transmit weights, initial df, conventional receive weights
        const RadarConfig c0 = with_delta_f(s.radar, s.mitigation.initial_delta_f_hz);
        const CVec ones = CVec::Ones(c0.num_tx);
        const EchoCube before = simulate_echo(s.scene, c0, ws, ones, run.seed(), s.sim);
        const CVec a0 = target_steering(c0, t, ws.sample_rate_hz);
        const RangeProfile pb = beamform_profile(before.data(), before.range_axis_m, a0 / a0.squaredNorm());

        const MitigationSolution sol = run_mitigation(s.scene, s.radar, ws, s.sim, run.seed(), s.mitigation);
        const RadarConfig c1 = with_delta_f(s.radar, sol.freq_increment_hz);
        const EchoCube after = simulate_echo(s.scene, c1, ws, sol.tx_weights, run.seed(), s.sim);
        const RangeProfile pa = beamform_profile(after.data(), after.range_axis_m, sol.rx_weights);

        write_profile_csv(pb, run.path("profile_before.csv"));
        write_profile_csv(pa, run.path("profile_after.csv"));
        write_mitigation_trace_csv(sol, run.path("rounds.csv"));
        write_sweep_csv(sol.objective_trace, run.path("descent_trace.csv"));

        // Oracle sweep with the transmit weights the final descent used
        const MultipathGeometry geo = MultipathGeometry::from_scene(s.scene, s.radar, s.mitigation.target);
        const auto sweep = sweep_objective(s.sweep.start_hz, s.sweep.stop_hz, s.sweep.steps, geo, s.radar, ws, sol.tx_weights);
        write_sweep_csv(sweep, run.path("sweep.csv"));

        auto row = [&](const std::string &name, double r) {
            const double b = level_relative_to(pb, r, t.range_m);
            const double a = level_relative_to(pa, r, t.range_m);
            return nlohmann::json{{"path", name}, {"range_m", r}, {"before_db", b}, {"after_db", a}, {"reduction_db", b - a}};
        };
        const double direct_gain_change =
            pa.absolute_db(nearest_bin(pa.range_axis_m, t.range_m)) - pb.absolute_db(nearest_bin(pb.range_axis_m, t.range_m));
        nlohmann::json peaks = {row("first_order", mt.equiv_first_order_range_m), row("second_order", mt.range_m)};
        {
            std::ofstream f(run.path("peaks.csv"));
            f << "path,range_m,before_db,after_db,reduction_db\n";
            for (const auto &p : peaks)
                f << p["path"].get<std::string>() << "," << p["range_m"] << "," << p["before_db"] << "," << p["after_db"]
                  << "," << p["reduction_db"] << "\n";
        }
        nlohmann::json summary = {{"initial_delta_f_hz", s.mitigation.initial_delta_f_hz},
                                  {"final_delta_f_hz", sol.freq_increment_hz},
                                  {"direct_gain_change_db", direct_gain_change},
                                  {"optimizer_converged", sol.optimizer_converged},
                                  {"peaks", peaks}};
        nlohmann::json sinr = nlohmann::json::array();
        for (const RoundRecord &r : sol.sinr_trace)
            sinr.push_back({{"round", r.round}, {"delta_f_hz", r.delta_f_hz}, {"sinr_db", r.sinr_db}});
        summary["sinr"] = sinr;
        std::cout << "delta f " << s.mitigation.initial_delta_f_hz / 1e6 << " -> " << sol.freq_increment_hz / 1e6 << " MHz\n";
        for (const auto &p : peaks)
            std::cout << p["path"].get<std::string>() << ": " << p["before_db"].get<double>() << " dB -> "
                      << p["after_db"].get<double>() << " dB\n";
        run.finish(summary);
        return summary;
    }

    nlohmann::json cmd_sweep(const Common &opt, const std::string &param, double from, double to, int steps)
    {
        Run run("sweep", opt);
        Scenario &s = run.scenario();
        const WaveformSet &ws = run.waveforms();
        if (steps < 1)
            throw ConfigError("--steps must be >= 1");
        const bool df_param = param == "freq_increment_hz";
        if (!df_param && param != "reflection_coeff_mag" && param != "reflector_offset_m")
            throw ConfigError("unknown sweep parameter '" + param + "' (freq_increment_hz, reflection_coeff_mag, reflector_offset_m)");
        if (std::isnan(from))
            from = df_param ? s.sweep.start_hz : 0.0;
        if (std::isnan(to))
            to = df_param ? s.sweep.stop_hz : 1.0;

        const CVec ones = CVec::Ones(s.radar.num_tx);
        std::ofstream f(run.path("sweep.csv"));
        f.imbue(std::locale::classic());
        f << std::setprecision(12) << param << ",objective\n";
        for (int i = 0; i < steps; ++i)
        {
            const double v = steps == 1 ? from : from + (to - from) * i / (steps - 1);
            Scene sc = s.scene;
            double df = s.mitigation.initial_delta_f_hz;
            if (df_param)
                df = v;
            else if (param == "reflection_coeff_mag")
                sc.reflection_coeff = std::polar(v, std::arg(s.scene.reflection_coeff));
            else
                sc.reflector_offset_m = v;
            const MultipathGeometry geo = MultipathGeometry::from_scene(sc, s.radar, s.mitigation.target);
            f << v << "," << mitigation_objective(df, geo, s.radar, ws, ones) << "\n";
        }
        f.close();
        nlohmann::json summary = {{"param", param}, {"from", from}, {"to", to}, {"steps", steps}};
        run.finish(summary);
        return summary;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"FDA-MIMO multipath discrimination and mitigation runner"};
    app.require_subcommand(1);
    Common opt;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--scenario", opt.scenario, "scenario file")->required();
        sub->add_option("--out", opt.out, "output directory")->required();
        sub->add_option("--seed", opt.seed, "noise seed");
        sub->add_option("--grid-deg", opt.grid_deg, "angle grid step for spatial spectra");
        sub->add_option("--pfa", opt.pfa, "CFAR design false-alarm rate");
    };
    CLI::App *sim = app.add_subcommand("simulate", "echo cube and range profiles, FDA-MIMO and MIMO");
    CLI::App *dis = app.add_subcommand("discriminate", "CFAR and spatial-spectrum labelling of range cells");
    CLI::App *mit = app.add_subcommand("mitigate", "transmit/receive weights and frequency increment");
    CLI::App *swp = app.add_subcommand("sweep", "grid evaluation of the mitigation objective");
    for (CLI::App *sub : {sim, dis, mit, swp})
        add_common(sub);
    std::string param = "freq_increment_hz";
    double from = std::nan(""), to = std::nan("");
    int steps = 0;
    swp->add_option("--param", param, "freq_increment_hz | reflection_coeff_mag | reflector_offset_m");
    swp->add_option("--from", from, "first value (default from the scenario)");
    swp->add_option("--to", to, "last value (default from the scenario)");
    swp->add_option("--steps", steps, "number of points (default from the scenario)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (*sim)
            cmd_simulate(opt);
        else if (*dis)
            cmd_discriminate(opt);
        else if (*mit)
            cmd_mitigate(opt);
        else if (*swp)
        {
            if (steps == 0)
                steps = load_scenario(opt.scenario).sweep.steps;
            cmd_sweep(opt, param, from, to, steps);
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
