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

#include "fdamimo/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace fdamimo
{
    namespace pt = boost::property_tree;

    namespace
    {
        const std::map<std::string, std::set<std::string>> &schema()
        {
            static const std::map<std::string, std::set<std::string>> s = {
                {"radar",
                 {"num_tx", "num_rx", "carrier_hz", "freq_increment_hz", "tx_spacing_m", "rx_spacing_m", "bandwidth_hz",
                  "pulse_s", "pri_s", "total_power", "gate_start_m", "range_bins", "pulses", "noise_coupling"}},
                {"scene",
                 {"target_range_m", "target_angle_deg", "target_scatter_mag", "target_scatter_phase_deg",
                  "target_velocity_mps", "reflector_offset_m", "reflection_coeff_mag", "reflection_coeff_phase_deg",
                  "snr_db", "noise_power"}},
                {"waveform", {"samples_per_pulse", "seed", "chip_mode"}},
                {"cfar", {"train", "guard", "pfa"}},
                {"discrimination", {"grid_deg", "angle_tolerance_deg", "loading_factor"}},
                {"mitigation",
                 {"init_freq_increment_hz", "rounds", "tx_weight_mode", "loading_factor", "fd_step_hz", "clip_margin_hz",
                  "trial_move_hz", "max_iter", "tol", "sweep_start_hz", "sweep_stop_hz", "sweep_steps"}},
                {"output", {"write_cube", "write_waveforms", "write_spectra"}},
            };
            return s;
        }

        class Reader
        {
        public:
            Reader(const pt::ptree &tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

            bool has(const std::string &sec, const std::string &key) const
            {
                auto s = tree_.get_child_optional(sec);
                return s && s->find(key) != s->not_found();
            }

            std::string str(const std::string &sec, const std::string &key) const
            {
                return tree_.get_child(sec).get<std::string>(key);
            }

            double num(const std::string &sec, const std::string &key, double def) const
            {
                return has(sec, key) ? to_double(sec, key, str(sec, key)) : def;
            }

            long integer(const std::string &sec, const std::string &key, long def) const
            {
                if (!has(sec, key))
                    return def;
                const std::string v = trim(str(sec, key));
                std::size_t pos = 0;
                long out = 0;
                try
                {
                    out = std::stol(v, &pos);
                }
                catch (const std::exception &)
                {
                    pos = 0;
                }
                if (pos == 0 || pos != v.size())
                    fail(sec, key, "expected an integer, got '" + v + "'");
                return out;
            }

            bool boolean(const std::string &sec, const std::string &key, bool def) const
            {
                if (!has(sec, key))
                    return def;
                const std::string v = trim(str(sec, key));
                if (v == "true" || v == "1" || v == "yes")
                    return true;
                if (v == "false" || v == "0" || v == "no")
                    return false;
                fail(sec, key, "expected true/false, got '" + v + "'");
            }

            std::vector<double> list(const std::string &sec, const std::string &key) const
            {
                std::vector<double> out;
                if (!has(sec, key))
                    return out;
                std::stringstream ss(str(sec, key));
                std::string item;
                while (std::getline(ss, item, ','))
                    out.push_back(to_double(sec, key, item));
                return out;
            }

            [[noreturn]] void fail(const std::string &sec, const std::string &key, const std::string &msg) const
            {
                throw ConfigError(origin_ + ": [" + sec + "] " + key + ": " + msg);
            }

            static std::string trim(const std::string &s)
            {
                const auto a = s.find_first_not_of(" \t\r\n");
                if (a == std::string::npos)
                    return {};
                const auto b = s.find_last_not_of(" \t\r\n");
                return s.substr(a, b - a + 1);
            }

        private:
            double to_double(const std::string &sec, const std::string &key, const std::string &raw) const
            {
                const std::string v = trim(raw);
                std::istringstream is(v);
                is.imbue(std::locale::classic());
                double out = 0.0;
                is >> out;
                if (v.empty() || is.fail() || !is.eof() || !std::isfinite(out))
                    fail(sec, key, "expected a number, got '" + v + "'");
                return out;
            }

            const pt::ptree &tree_;
            std::string origin_;
        };

        std::string fmt_num(double v)
        {
            std::ostringstream os;
            os.imbue(std::locale::classic());
            os << std::setprecision(17) << v;
            return os.str();
        }
    }

    Scenario parse_scenario(const std::string &text, const std::string &origin)
    {
        pt::ptree tree;
        try
        {
            std::istringstream is(text);
            pt::ini_parser::read_ini(is, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
        }

        for (const auto &[sec, body] : tree)
        {
            auto it = schema().find(sec);
            if (it == schema().end())
            {
                if (body.empty())
                    throw ConfigError(origin + ": key '" + sec + "' outside of any section");
                throw ConfigError(origin + ": unknown section [" + sec + "]");
            }
            for (const auto &[key, value] : body)
                if (!it->second.count(key))
                    throw ConfigError(origin + ": [" + sec + "] unknown key '" + key + "'");
        }

        const Reader r(tree, origin);
        Scenario s;

        // [radar]
        RadarConfig &c = s.radar;
        c.num_tx = static_cast<int>(r.integer("radar", "num_tx", c.num_tx));
        c.num_rx = static_cast<int>(r.integer("radar", "num_rx", c.num_rx));
        c.carrier_hz = r.num("radar", "carrier_hz", c.carrier_hz);
        c.freq_increment_hz = r.num("radar", "freq_increment_hz", c.freq_increment_hz);
        const double half_lambda = c.carrier_hz > 0.0 ? 0.5 * kSpeedOfLight / c.carrier_hz : 0.0;
        c.tx_spacing_m = r.num("radar", "tx_spacing_m", half_lambda);
        c.rx_spacing_m = r.num("radar", "rx_spacing_m", half_lambda);
        c.bandwidth_hz = r.num("radar", "bandwidth_hz", c.bandwidth_hz);
        c.pulse_s = r.num("radar", "pulse_s", c.pulse_s);
        c.pri_s = r.num("radar", "pri_s", c.pri_s);
        c.total_power = r.num("radar", "total_power", c.total_power);
        c.validate();

        s.sim.gate_start_m = r.num("radar", "gate_start_m", s.sim.gate_start_m);
        s.sim.range_bins = static_cast<int>(r.integer("radar", "range_bins", s.sim.range_bins));
        s.sim.pulses = static_cast<int>(r.integer("radar", "pulses", s.sim.pulses));
        if (r.has("radar", "noise_coupling"))
        {
            const std::string v = Reader::trim(r.str("radar", "noise_coupling"));
            if (v == "independent")
                s.sim.coupling = NoiseCoupling::independent;
            else if (v == "common")
                s.sim.coupling = NoiseCoupling::common;
            else
                r.fail("radar", "noise_coupling", "expected independent|common");
        }
        if (s.sim.range_bins < 1 || s.sim.pulses < 1)
            throw ConfigError(origin + ": [radar] range_bins and pulses must be >= 1");

        // [scene]
        const auto ranges = r.list("scene", "target_range_m");
        const auto angles = r.list("scene", "target_angle_deg");
        if (ranges.empty())
            r.fail("scene", "target_range_m", "at least one target is required");
        if (angles.size() != ranges.size())
            r.fail("scene", "target_angle_deg", "must have one entry per target");
        auto per_target = [&](const char *key, double def) {
            auto v = r.list("scene", key);
            if (v.empty())
                v.assign(ranges.size(), def);
            if (v.size() != ranges.size())
                r.fail("scene", key, "must have one entry per target");
            return v;
        };
        const auto mags = per_target("target_scatter_mag", 1.0);
        const auto phases = per_target("target_scatter_phase_deg", 0.0);
        const auto vels = per_target("target_velocity_mps", 0.0);
        for (std::size_t i = 0; i < ranges.size(); ++i)
            s.scene.targets.push_back({ranges[i], deg2rad(angles[i]), std::polar(mags[i], deg2rad(phases[i])), vels[i]});
        s.scene.reflector_offset_m = r.num("scene", "reflector_offset_m", 0.0);
        s.scene.reflection_coeff = std::polar(r.num("scene", "reflection_coeff_mag", 0.0),
                                              deg2rad(r.num("scene", "reflection_coeff_phase_deg", 0.0)));
        if (r.has("scene", "snr_db") && r.has("scene", "noise_power"))
            r.fail("scene", "noise_power", "give either snr_db or noise_power, not both");
        if (r.has("scene", "noise_power"))
        {
            s.noise_from_snr = false;
            s.scene.noise_power = r.num("scene", "noise_power", 0.0);
        }
        else
        {
            s.noise_from_snr = true;
            s.snr_db = r.num("scene", "snr_db", 0.0);
            s.scene.noise_power = noise_power_for_snr(c, s.scene, s.snr_db);
        }
        s.scene.validate();

        // [waveform]
        s.samples_per_pulse = static_cast<int>(r.integer("waveform", "samples_per_pulse", s.samples_per_pulse));
        const long wseed = r.integer("waveform", "seed", 0);
        if (wseed < 0)
            r.fail("waveform", "seed", "must be >= 0");
        s.waveform_seed = static_cast<std::uint64_t>(wseed);
        if (r.has("waveform", "chip_mode"))
        {
            const std::string v = Reader::trim(r.str("waveform", "chip_mode"));
            if (v == "cyclic")
                s.chip_mode = ChipMode::cyclic;
            else if (v == "upsampled")
                s.chip_mode = ChipMode::upsampled;
            else
                r.fail("waveform", "chip_mode", "expected cyclic|upsampled");
        }
        if (s.samples_per_pulse < 11 * c.num_tx)
            r.fail("waveform", "samples_per_pulse", "must be >= 11 * num_tx");

        // [cfar]
        s.cfar.train = static_cast<int>(r.integer("cfar", "train", s.cfar.train));
        s.cfar.guard = static_cast<int>(r.integer("cfar", "guard", s.cfar.guard));
        s.cfar.pfa = r.num("cfar", "pfa", s.cfar.pfa);
        if (s.cfar.train < 1 || s.cfar.guard < 0 || !(s.cfar.pfa > 0.0 && s.cfar.pfa < 1.0))
            throw ConfigError(origin + ": [cfar] needs train >= 1, guard >= 0, 0 < pfa < 1");

        // [discrimination]
        auto &d = s.discrimination;
        d.grid_deg = r.num("discrimination", "grid_deg", d.grid_deg);
        d.angle_tolerance_deg = r.num("discrimination", "angle_tolerance_deg", d.angle_tolerance_deg);
        d.loading_factor = r.num("discrimination", "loading_factor", d.loading_factor);
        if (!(d.grid_deg > 0.0) || d.loading_factor < 0.0)
            throw ConfigError(origin + ": [discrimination] needs grid_deg > 0 and loading_factor >= 0");

        // [mitigation]
        auto &m = s.mitigation;
        m.initial_delta_f_hz = r.num("mitigation", "init_freq_increment_hz", 0.8 * c.bandwidth_hz);
        m.rounds = static_cast<int>(r.integer("mitigation", "rounds", m.rounds));
        m.loading_factor = r.num("mitigation", "loading_factor", m.loading_factor);
        if (r.has("mitigation", "tx_weight_mode"))
        {
            const std::string v = Reader::trim(r.str("mitigation", "tx_weight_mode"));
            if (v == "projection")
                m.tx_mode = TxWeightMode::projection;
            else if (v == "perpendicular")
                m.tx_mode = TxWeightMode::perpendicular;
            else
                r.fail("mitigation", "tx_weight_mode", "expected projection|perpendicular");
        }
        m.optimizer.fd_step_hz = r.num("mitigation", "fd_step_hz", c.bandwidth_hz * 1e-4);
        m.optimizer.clip_margin_hz = r.num("mitigation", "clip_margin_hz", c.bandwidth_hz * 1e-3);
        m.optimizer.trial_move_hz = r.num("mitigation", "trial_move_hz", c.bandwidth_hz / 20.0);
        m.optimizer.max_iter = static_cast<int>(r.integer("mitigation", "max_iter", m.optimizer.max_iter));
        m.optimizer.tol = r.num("mitigation", "tol", m.optimizer.tol);
        s.sweep.start_hz = r.num("mitigation", "sweep_start_hz", s.sweep.start_hz);
        s.sweep.stop_hz = r.num("mitigation", "sweep_stop_hz", s.sweep.stop_hz);
        s.sweep.steps = static_cast<int>(r.integer("mitigation", "sweep_steps", s.sweep.steps));
        if (m.rounds < 0 || m.optimizer.max_iter < 0 || s.sweep.steps < 1)
            throw ConfigError(origin + ": [mitigation] rounds, max_iter >= 0 and sweep_steps >= 1 required");
        if (!(m.initial_delta_f_hz > 0.0 && m.initial_delta_f_hz < c.bandwidth_hz))
            r.fail("mitigation", "init_freq_increment_hz", "must lie in (0, bandwidth_hz)");

        // [output]
        s.output.write_cube = r.boolean("output", "write_cube", s.output.write_cube);
        s.output.write_waveforms = r.boolean("output", "write_waveforms", s.output.write_waveforms);
        s.output.write_spectra = r.boolean("output", "write_spectra", s.output.write_spectra);
        return s;
    }

    Scenario load_scenario(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open scenario file " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_scenario(ss.str(), path);
    }

    std::string Scenario::to_ini() const
    {
        std::ostringstream o;
        o.imbue(std::locale::classic());
        auto join = [&](auto get) {
            std::string out;
            for (std::size_t i = 0; i < scene.targets.size(); ++i)
                out += (i ? ", " : "") + fmt_num(get(scene.targets[i]));
            return out;
        };
        o << "[radar]\n"
          << "num_tx = " << radar.num_tx << "\n"
          << "num_rx = " << radar.num_rx << "\n"
          << "carrier_hz = " << fmt_num(radar.carrier_hz) << "\n"
          << "freq_increment_hz = " << fmt_num(radar.freq_increment_hz) << "\n"
          << "tx_spacing_m = " << fmt_num(radar.tx_spacing_m) << "\n"
          << "rx_spacing_m = " << fmt_num(radar.rx_spacing_m) << "\n"
          << "bandwidth_hz = " << fmt_num(radar.bandwidth_hz) << "\n"
          << "pulse_s = " << fmt_num(radar.pulse_s) << "\n"
          << "pri_s = " << fmt_num(radar.pri_s) << "\n"
          << "total_power = " << fmt_num(radar.total_power) << "\n"
          << "gate_start_m = " << fmt_num(sim.gate_start_m) << "\n"
          << "range_bins = " << sim.range_bins << "\n"
          << "pulses = " << sim.pulses << "\n"
          << "noise_coupling = " << (sim.coupling == NoiseCoupling::common ? "common" : "independent") << "\n\n";
        o << "[scene]\n"
          << "target_range_m = " << join([](const Target &t) { return t.range_m; }) << "\n"
          << "target_angle_deg = " << join([](const Target &t) { return rad2deg(t.angle_rad); }) << "\n"
          << "target_scatter_mag = " << join([](const Target &t) { return std::abs(t.scatter); }) << "\n"
          << "target_scatter_phase_deg = " << join([](const Target &t) { return rad2deg(std::arg(t.scatter)); }) << "\n"
          << "target_velocity_mps = " << join([](const Target &t) { return t.velocity_mps; }) << "\n"
          << "reflector_offset_m = " << fmt_num(scene.reflector_offset_m) << "\n"
          << "reflection_coeff_mag = " << fmt_num(std::abs(scene.reflection_coeff)) << "\n"
          << "reflection_coeff_phase_deg = " << fmt_num(rad2deg(std::arg(scene.reflection_coeff))) << "\n";
        if (noise_from_snr)
            o << "snr_db = " << fmt_num(snr_db) << "\n\n";
        else
            o << "noise_power = " << fmt_num(scene.noise_power) << "\n\n";
        o << "[waveform]\n"
          << "samples_per_pulse = " << samples_per_pulse << "\n"
          << "seed = " << waveform_seed << "\n"
          << "chip_mode = " << (chip_mode == ChipMode::upsampled ? "upsampled" : "cyclic") << "\n\n";
        o << "[cfar]\n"
          << "train = " << cfar.train << "\n"
          << "guard = " << cfar.guard << "\n"
          << "pfa = " << fmt_num(cfar.pfa) << "\n\n";
        o << "[discrimination]\n"
          << "grid_deg = " << fmt_num(discrimination.grid_deg) << "\n"
          << "angle_tolerance_deg = " << fmt_num(discrimination.tolerance_deg()) << "\n"
          << "loading_factor = " << fmt_num(discrimination.loading_factor) << "\n\n";
        o << "[mitigation]\n"
          << "init_freq_increment_hz = " << fmt_num(mitigation.initial_delta_f_hz) << "\n"
          << "rounds = " << mitigation.rounds << "\n"
          << "tx_weight_mode = " << (mitigation.tx_mode == TxWeightMode::perpendicular ? "perpendicular" : "projection")
          << "\n"
          << "loading_factor = " << fmt_num(mitigation.loading_factor) << "\n"
          << "fd_step_hz = " << fmt_num(mitigation.optimizer.fd_step_hz) << "\n"
          << "clip_margin_hz = " << fmt_num(mitigation.optimizer.clip_margin_hz) << "\n"
          << "trial_move_hz = " << fmt_num(mitigation.optimizer.trial_move_hz) << "\n"
          << "max_iter = " << mitigation.optimizer.max_iter << "\n"
          << "tol = " << fmt_num(mitigation.optimizer.tol) << "\n"
          << "sweep_start_hz = " << fmt_num(sweep.start_hz) << "\n"
          << "sweep_stop_hz = " << fmt_num(sweep.stop_hz) << "\n"
          << "sweep_steps = " << sweep.steps << "\n\n";
        o << "[output]\n"
          << "write_cube = " << (output.write_cube ? "true" : "false") << "\n"
          << "write_waveforms = " << (output.write_waveforms ? "true" : "false") << "\n"
          << "write_spectra = " << (output.write_spectra ? "true" : "false") << "\n";
        return o.str();
    }
}
