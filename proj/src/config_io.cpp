// SPDX-License-Identifier: Apache-2.0
//
// hybridbf: link-level simulation of hybrid analog-digital precoding with
// S-parameter-based models of the analog RF beamforming network
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

#include "hybridbf/config_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hybridbf
{

namespace
{

using nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &message)
{
    throw ConfigError(path + ": " + message);
}

void require_object(const json &node, const std::string &path)
{
    if (!node.is_object())
        fail(path, "must be a JSON object");
}

void reject_unknown_keys(const json &node, const std::string &path,
                         const std::vector<std::string> &allowed)
{
    for (const auto &item : node.items())
    {
        bool known = false;
        for (const std::string &key : allowed)
            if (item.key() == key)
            {
                known = true;
                break;
            }
        if (!known)
            fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

double get_finite_number(const json &node, const std::string &path)
{
    if (!node.is_number())
        fail(path, "must be a number");
    const double value = node.get<double>();
    if (!std::isfinite(value))
        fail(path, "must be finite");
    return value;
}

arma::uword get_count(const json &node, const std::string &path)
{
    if (!node.is_number_integer() || node.is_number_float())
        fail(path, "must be an integer");
    if (node.is_number_integer() && !node.is_number_unsigned() && node.get<long long>() < 0)
        fail(path, "must be non-negative");
    return node.get<arma::uword>();
}

std::uint64_t get_u64(const json &node, const std::string &path)
{
    if (!node.is_number_integer() || node.is_number_float())
        fail(path, "must be an integer");
    if (!node.is_number_unsigned() && node.get<long long>() < 0)
        fail(path, "must be non-negative");
    return node.get<std::uint64_t>();
}

LossProfile parse_loss_profile(const json &node, const std::string &path)
{
    if (node.is_string())
    {
        const std::string name = node.get<std::string>();
        if (name == "ideal")
            return LossProfile::ideal();
        if (name == "sub5ghz")
            return LossProfile::sub5ghz();
        if (name == "mmwave")
            return LossProfile::mmwave();
        fail(path, "unknown profile name '" + name + "' (expected ideal, sub5ghz or mmwave)");
    }
    require_object(node, path);
    reject_unknown_keys(node, path,
                        {"divider_combiner_db", "hybrid_coupler_db", "variable_phase_shifter_db",
                         "fixed_phase_shifter_db", "band_tag"});
    LossProfile profile;
    profile.band_tag = "custom";
    if (node.contains("divider_combiner_db"))
        profile.divider_combiner_db = get_finite_number(node["divider_combiner_db"], path + ".divider_combiner_db");
    if (node.contains("hybrid_coupler_db"))
        profile.hybrid_coupler_db = get_finite_number(node["hybrid_coupler_db"], path + ".hybrid_coupler_db");
    if (node.contains("variable_phase_shifter_db"))
        profile.variable_phase_shifter_db =
            get_finite_number(node["variable_phase_shifter_db"], path + ".variable_phase_shifter_db");
    if (node.contains("fixed_phase_shifter_db"))
        profile.fixed_phase_shifter_db =
            get_finite_number(node["fixed_phase_shifter_db"], path + ".fixed_phase_shifter_db");
    if (node.contains("band_tag"))
    {
        if (!node["band_tag"].is_string())
            fail(path + ".band_tag", "must be a string");
        profile.band_tag = node["band_tag"].get<std::string>();
    }
    return profile;
}

std::vector<double> parse_rho_grid(const json &node, const std::string &path)
{
    std::vector<double> grid;
    if (node.is_array())
    {
        if (node.empty())
            fail(path, "must be non-empty");
        for (std::size_t i = 0; i < node.size(); ++i)
            grid.push_back(get_finite_number(node[i], path + "[" + std::to_string(i) + "]"));
        return grid;
    }
    require_object(node, path);
    reject_unknown_keys(node, path, {"from", "to", "step"});
    if (!node.contains("from") || !node.contains("to") || !node.contains("step"))
        fail(path, "range form requires from, to and step");
    const double from = get_finite_number(node["from"], path + ".from");
    const double to = get_finite_number(node["to"], path + ".to");
    const double step = get_finite_number(node["step"], path + ".step");
    if (!(step > 0.0))
        fail(path + ".step", "must be positive");
    if (to < from)
        fail(path, "range requires to >= from");
    for (std::size_t k = 0;; ++k)
    {
        const double value = from + double(k) * step;
        if (value > to + 1e-9 * step)
            break;
        grid.push_back(value);
    }
    return grid;
}

ScenarioConfig parse_scenario_object(const json &root)
{
    require_object(root, "");
    reject_unknown_keys(root, "",
                        {"geometry", "n_rf_chains", "groups", "architectures", "loss_profile",
                         "sweep", "power"});
    for (const char *required : {"geometry", "n_rf_chains", "groups"})
        if (!root.contains(required))
            fail(required, "required key is missing");

    ScenarioConfig config;

    const json &geometry = root["geometry"];
    require_object(geometry, "geometry");
    reject_unknown_keys(geometry, "geometry", {"n_antennas", "spacing_wavelengths"});
    if (!geometry.contains("n_antennas"))
        fail("geometry.n_antennas", "required key is missing");
    config.geometry.n_antennas = get_count(geometry["n_antennas"], "geometry.n_antennas");
    if (geometry.contains("spacing_wavelengths"))
        config.geometry.spacing_wavelengths =
            get_finite_number(geometry["spacing_wavelengths"], "geometry.spacing_wavelengths");

    config.n_rf_chains = get_count(root["n_rf_chains"], "n_rf_chains");

    const json &groups = root["groups"];
    if (!groups.is_array() || groups.empty())
        fail("groups", "must be a non-empty array");
    for (std::size_t g = 0; g < groups.size(); ++g)
    {
        const std::string path = "groups[" + std::to_string(g) + "]";
        const json &node = groups[g];
        require_object(node, path);
        reject_unknown_keys(node, path,
                            {"center_angle_deg", "angular_spread_deg", "n_users", "n_beams"});
        for (const char *required : {"center_angle_deg", "n_users", "n_beams"})
            if (!node.contains(required))
                fail(path + "." + required, "required key is missing");
        UserGroup group;
        group.center_angle_deg = get_finite_number(node["center_angle_deg"], path + ".center_angle_deg");
        if (node.contains("angular_spread_deg"))
            group.angular_spread_deg =
                get_finite_number(node["angular_spread_deg"], path + ".angular_spread_deg");
        group.n_users = get_count(node["n_users"], path + ".n_users");
        group.n_beams = get_count(node["n_beams"], path + ".n_beams");
        config.groups.push_back(group);
    }

    if (root.contains("architectures"))
    {
        const json &architectures = root["architectures"];
        if (!architectures.is_array())
            fail("architectures", "must be an array of architecture names");
        config.architectures.clear();
        for (std::size_t i = 0; i < architectures.size(); ++i)
        {
            const std::string path = "architectures[" + std::to_string(i) + "]";
            if (!architectures[i].is_string())
                fail(path, "must be a string");
            try
            {
                config.architectures.push_back(
                    parse_sweep_architecture(architectures[i].get<std::string>()));
            }
            catch (const std::invalid_argument &error)
            {
                fail(path, error.what());
            }
        }
    }

    if (root.contains("loss_profile"))
        config.loss_profile = parse_loss_profile(root["loss_profile"], "loss_profile");

    config.rho_grid_db.clear();
    for (double rho_db = 0.0; rho_db <= 30.0 + 1e-9; rho_db += 2.0)
        config.rho_grid_db.push_back(rho_db);
    if (root.contains("sweep"))
    {
        const json &sweep_node = root["sweep"];
        require_object(sweep_node, "sweep");
        reject_unknown_keys(sweep_node, "sweep", {"rho_db", "realizations", "master_seed"});
        if (sweep_node.contains("rho_db"))
            config.rho_grid_db = parse_rho_grid(sweep_node["rho_db"], "sweep.rho_db");
        if (sweep_node.contains("realizations"))
        {
            config.realizations = get_count(sweep_node["realizations"], "sweep.realizations");
            if (config.realizations < 1)
                fail("sweep.realizations", "must be >= 1");
        }
        if (sweep_node.contains("master_seed"))
            config.master_seed = get_u64(sweep_node["master_seed"], "sweep.master_seed");
    }

    if (root.contains("power"))
    {
        const json &power = root["power"];
        require_object(power, "power");
        reject_unknown_keys(power, "power",
                            {"pa_output_w", "pa_efficiency", "per_chain_w", "synthesizer_w",
                             "bandwidth_hz"});
        if (power.contains("pa_output_w"))
            config.power.pa_output_w = get_finite_number(power["pa_output_w"], "power.pa_output_w");
        if (power.contains("pa_efficiency"))
            config.power.pa_efficiency = get_finite_number(power["pa_efficiency"], "power.pa_efficiency");
        if (power.contains("per_chain_w"))
            config.power.per_chain_w = get_finite_number(power["per_chain_w"], "power.per_chain_w");
        if (power.contains("synthesizer_w"))
            config.power.synthesizer_w = get_finite_number(power["synthesizer_w"], "power.synthesizer_w");
        if (power.contains("bandwidth_hz"))
            config.power.bandwidth_hz = get_finite_number(power["bandwidth_hz"], "power.bandwidth_hz");
    }

    try
    {
        validate(config);
    }
    catch (const std::invalid_argument &error)
    {
        throw ConfigError(error.what());
    }
    return config;
}

std::string format_number(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

} // namespace

// ---------------------------------- PARSING ---------------------------------

ScenarioConfig parse_config(const std::string &text)
{
    json root;
    try
    {
        root = json::parse(text);
    }
    catch (const json::parse_error &error)
    {
        throw ConfigError(std::string("invalid JSON: ") + error.what());
    }

    // A run manifest is accepted wherever a scenario is: the resolved config
    // it embeds reproduces the original run.
    if (root.is_object() && root.contains("resolved_config"))
        return parse_scenario_object(root["resolved_config"]);
    return parse_scenario_object(root);
}

std::string serialize_config(const ScenarioConfig &config)
{
    json root;
    root["geometry"]["n_antennas"] = config.geometry.n_antennas;
    root["geometry"]["spacing_wavelengths"] = config.geometry.spacing_wavelengths;
    root["n_rf_chains"] = config.n_rf_chains;
    root["groups"] = json::array();
    for (const UserGroup &group : config.groups)
        root["groups"].push_back({{"center_angle_deg", group.center_angle_deg},
                                  {"angular_spread_deg", group.angular_spread_deg},
                                  {"n_users", group.n_users},
                                  {"n_beams", group.n_beams}});
    root["architectures"] = json::array();
    for (SweepArchitecture architecture : config.architectures)
        root["architectures"].push_back(std::string(to_string(architecture)));
    root["loss_profile"] = {{"divider_combiner_db", config.loss_profile.divider_combiner_db},
                            {"hybrid_coupler_db", config.loss_profile.hybrid_coupler_db},
                            {"variable_phase_shifter_db", config.loss_profile.variable_phase_shifter_db},
                            {"fixed_phase_shifter_db", config.loss_profile.fixed_phase_shifter_db},
                            {"band_tag", config.loss_profile.band_tag}};
    root["sweep"] = {{"rho_db", config.rho_grid_db},
                     {"realizations", config.realizations},
                     {"master_seed", config.master_seed}};
    root["power"] = {{"pa_output_w", config.power.pa_output_w},
                     {"pa_efficiency", config.power.pa_efficiency},
                     {"per_chain_w", config.power.per_chain_w},
                     {"synthesizer_w", config.power.synthesizer_w},
                     {"bandwidth_hz", config.power.bandwidth_hz}};
    return root.dump(2) + "\n";
}

ScenarioConfig load_config_file(const std::string &path)
{
    std::ifstream stream(path);
    if (!stream)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse_config(buffer.str());
}

// ---------------------------------- RESULTS ---------------------------------

std::string results_csv(const std::vector<PointResult> &table)
{
    std::string csv = "architecture,rho_db,sum_se_bits_s_hz,se_stderr,ee_bits_per_joule,"
                      "realizations,seed\n";
    for (const PointResult &point : table)
    {
        csv += std::string(to_string(point.architecture));
        csv += ',';
        csv += format_number(point.rho_db);
        csv += ',';
        csv += format_number(point.mean_sum_se_bits_s_hz);
        csv += ',';
        csv += format_number(point.se_stderr);
        csv += ',';
        csv += format_number(point.ee_bits_per_joule);
        csv += ',';
        csv += std::to_string(point.realizations);
        csv += ',';
        csv += std::to_string(point.seed);
        csv += '\n';
    }
    return csv;
}

std::string plot_table(const std::vector<PointResult> &table, const ScenarioConfig &config,
                       PlotMetric metric)
{
    // Architecture column order follows first appearance in the table.
    std::vector<SweepArchitecture> order;
    for (const PointResult &point : table)
    {
        bool seen = false;
        for (SweepArchitecture architecture : order)
            if (architecture == point.architecture)
            {
                seen = true;
                break;
            }
        if (!seen)
            order.push_back(point.architecture);
    }

    std::string text = metric == PlotMetric::SpectralEfficiency
                           ? "# mean sum spectral efficiency [bits/s/Hz] vs rho [dB]\n"
                           : "# energy efficiency [bits/J] vs rho [dB]\n";
    text += "# rho_db";
    for (SweepArchitecture architecture : order)
    {
        text += ' ';
        text += std::string(to_string(architecture));
    }
    text += '\n';

    for (double rho_db : config.rho_grid_db)
    {
        text += format_number(rho_db);
        for (SweepArchitecture architecture : order)
        {
            const PointResult *cell = nullptr;
            for (const PointResult &point : table)
                if (point.architecture == architecture && point.rho_db == rho_db)
                {
                    cell = &point;
                    break;
                }
            text += ' ';
            if (cell == nullptr)
                text += "nan";
            else
                text += format_number(metric == PlotMetric::SpectralEfficiency
                                          ? cell->mean_sum_se_bits_s_hz
                                          : cell->ee_bits_per_joule);
        }
        text += '\n';
    }
    return text;
}

namespace
{

void write_text_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream stream(path, std::ios::binary);
    if (!stream)
        throw std::runtime_error("cannot open output file '" + path.string() + "'");
    stream << content;
    if (!stream)
        throw std::runtime_error("failed writing output file '" + path.string() + "'");
}

} // namespace

void emit_results(const std::vector<PointResult> &table, const ScenarioConfig &config,
                  const std::string &out_dir)
{
    const std::filesystem::path directory(out_dir);
    std::filesystem::create_directories(directory);
    write_text_file(directory / "results.csv", results_csv(table));
    write_text_file(directory / "se_vs_rho.dat",
                    plot_table(table, config, PlotMetric::SpectralEfficiency));
    write_text_file(directory / "ee_vs_rho.dat",
                    plot_table(table, config, PlotMetric::EnergyEfficiency));
}

void write_manifest(const RunManifest &manifest, const std::string &out_dir)
{
    const std::filesystem::path directory(out_dir);
    std::filesystem::create_directories(directory);

    json root;
    root["config_path"] = manifest.config_path;
    root["output_dir"] = manifest.output_dir;
    root["tool_version"] = manifest.tool_version;
    root["timestamp_utc"] = manifest.timestamp_utc;
    root["resolved_config"] = json::parse(serialize_config(manifest.resolved_config));
    write_text_file(directory / "manifest.json", root.dump(2) + "\n");
}

} // namespace hybridbf
