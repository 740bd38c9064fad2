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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hybridbf;

namespace
{

const char *minimal_reference_json = R"({
  "geometry": {"n_antennas": 64},
  "n_rf_chains": 32,
  "groups": [
    {"center_angle_deg": -45.0, "n_users": 4, "n_beams": 10},
    {"center_angle_deg": 0.0, "n_users": 4, "n_beams": 12},
    {"center_angle_deg": 45.0, "n_users": 4, "n_beams": 10}
  ]
})";

std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream stream(path);
    REQUIRE(stream.good());
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

struct TempDir
{
    std::filesystem::path path;

    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("hybridbf_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }

    ~TempDir()
    {
        std::error_code ignored;
        std::filesystem::remove_all(path, ignored);
    }
};

std::vector<PointResult> tiny_table()
{
    PointResult a;
    a.architecture = SweepArchitecture::FullyDigital;
    a.rho_db = 0.0;
    a.mean_sum_se_bits_s_hz = 12.345678901234;
    a.se_stderr = 0.0123;
    a.ee_bits_per_joule = energy_efficiency_bits_per_joule(a.mean_sum_se_bits_s_hz,
                                                           PowerModel{}, 64);
    a.realizations = 10;
    a.seed = 1;

    PointResult b = a;
    b.architecture = SweepArchitecture::ButlerRealistic;
    b.rho_db = 10.0;
    b.mean_sum_se_bits_s_hz = 7.654321;
    b.ee_bits_per_joule = energy_efficiency_bits_per_joule(b.mean_sum_se_bits_s_hz,
                                                           PowerModel{}, 32);
    return {a, b};
}

} // namespace

TEST_CASE("minimal configuration fills every default")
{
    const ScenarioConfig config = parse_config(minimal_reference_json);

    CHECK(config.geometry.n_antennas == 64);
    CHECK(config.geometry.spacing_wavelengths == 0.5);
    CHECK(config.n_rf_chains == 32);

    REQUIRE(config.groups.size() == 3);
    CHECK(config.groups[0].center_angle_deg == -45.0);
    CHECK(config.groups[0].angular_spread_deg == 15.0);
    CHECK(config.groups[1].n_beams == 12);
    CHECK(config.total_users() == 12);
    CHECK(config.total_beams() == 32);

    CHECK(config.architectures == all_sweep_architectures());
    CHECK(config.loss_profile == LossProfile::sub5ghz());

    REQUIRE(config.rho_grid_db.size() == 16);
    CHECK(config.rho_grid_db.front() == 0.0);
    CHECK(config.rho_grid_db.back() == 30.0);
    CHECK(config.rho_grid_db[1] == 2.0);

    CHECK(config.realizations == 1000);
    CHECK(config.master_seed == 1);
    CHECK(config.power == PowerModel{});
}

TEST_CASE("configuration errors carry the offending path")
{
    SECTION("unknown top-level key")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
            "fax_number": 1})";
        CHECK_THROWS_WITH(parse_config(text), Catch::Matchers::ContainsSubstring("fax_number"));
    }

    SECTION("unknown nested key")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2, "nbeams": 3}]})";
        CHECK_THROWS_WITH(parse_config(text),
                          Catch::Matchers::ContainsSubstring("groups[0].nbeams"));
    }

    SECTION("missing required keys")
    {
        CHECK_THROWS_AS(parse_config(R"({"geometry": {"n_antennas": 8}})"), ConfigError);
        CHECK_THROWS_WITH(parse_config(R"({"n_rf_chains": 4,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}]})"),
                          Catch::Matchers::ContainsSubstring("geometry"));
    }

    SECTION("invalid JSON")
    {
        CHECK_THROWS_WITH(parse_config("{"), Catch::Matchers::ContainsSubstring("invalid JSON"));
    }

    SECTION("semantic validation still applies")
    {
        // 33 beams into 32 chains.
        const std::string text = R"({"geometry": {"n_antennas": 64}, "n_rf_chains": 32,
            "groups": [
              {"center_angle_deg": -45.0, "n_users": 4, "n_beams": 11},
              {"center_angle_deg": 0.0, "n_users": 4, "n_beams": 12},
              {"center_angle_deg": 45.0, "n_users": 4, "n_beams": 10}
            ]})";
        CHECK_THROWS_AS(parse_config(text), ConfigError);
    }

    SECTION("bad architecture name includes its position")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
            "architectures": ["fully_digital", "analog_only"]})";
        CHECK_THROWS_WITH(parse_config(text),
                          Catch::Matchers::ContainsSubstring("architectures[1]"));
    }
}

TEST_CASE("rho grid forms")
{
    SECTION("explicit array")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
            "sweep": {"rho_db": [-5, 0, 5]}})";
        const ScenarioConfig config = parse_config(text);
        CHECK(config.rho_grid_db == std::vector<double>{-5.0, 0.0, 5.0});
    }

    SECTION("from/to/step range, inclusive endpoint")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
            "sweep": {"rho_db": {"from": 0, "to": 30, "step": 5}}})";
        const ScenarioConfig config = parse_config(text);
        REQUIRE(config.rho_grid_db.size() == 7);
        CHECK(config.rho_grid_db.back() == Catch::Approx(30.0));
    }

    SECTION("a non-positive step is rejected")
    {
        const std::string text = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
            "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
            "sweep": {"rho_db": {"from": 0, "to": 30, "step": 0}}})";
        CHECK_THROWS_WITH(parse_config(text), Catch::Matchers::ContainsSubstring("step"));
    }
}

TEST_CASE("loss profile forms")
{
    const std::string prefix = R"({"geometry": {"n_antennas": 8}, "n_rf_chains": 2,
        "groups": [{"center_angle_deg": 0, "n_users": 1, "n_beams": 2}],
        "loss_profile": )";

    SECTION("named profiles")
    {
        CHECK(parse_config(prefix + R"("ideal"})").loss_profile == LossProfile::ideal());
        CHECK(parse_config(prefix + R"("sub5ghz"})").loss_profile == LossProfile::sub5ghz());
        CHECK(parse_config(prefix + R"("mmwave"})").loss_profile == LossProfile::mmwave());
    }

    SECTION("explicit component losses")
    {
        const ScenarioConfig config = parse_config(
            prefix + R"({"divider_combiner_db": 0.4, "hybrid_coupler_db": 0.2,
                         "variable_phase_shifter_db": 2.0, "fixed_phase_shifter_db": 0.3}})");
        CHECK(config.loss_profile.divider_combiner_db == 0.4);
        CHECK(config.loss_profile.hybrid_coupler_db == 0.2);
        CHECK(config.loss_profile.variable_phase_shifter_db == 2.0);
        CHECK(config.loss_profile.fixed_phase_shifter_db == 0.3);
        CHECK(config.loss_profile.band_tag == "custom");
    }

    SECTION("unknown profile name")
    {
        CHECK_THROWS_WITH(parse_config(prefix + R"("60ghz"})"),
                          Catch::Matchers::ContainsSubstring("loss_profile"));
    }
}

TEST_CASE("serialization round-trips losslessly")
{
    const ScenarioConfig config = parse_config(minimal_reference_json);
    const std::string serialized = serialize_config(config);
    const ScenarioConfig reparsed = parse_config(serialized);

    CHECK(reparsed == config);
    CHECK(serialize_config(reparsed) == serialized);

    // A non-default configuration survives as well.
    ScenarioConfig custom = config;
    custom.master_seed = 123456789012345ULL;
    custom.realizations = 17;
    custom.loss_profile = LossProfile::mmwave();
    custom.architectures = {SweepArchitecture::ButlerIdeal, SweepArchitecture::FullyDigital};
    custom.rho_grid_db = {1.5, 2.5};
    custom.power.pa_efficiency = 0.5;
    CHECK(parse_config(serialize_config(custom)) == custom);
}

TEST_CASE("results CSV")
{
    SECTION("empty table prints only the fixed header")
    {
        CHECK(results_csv({}) ==
              "architecture,rho_db,sum_se_bits_s_hz,se_stderr,ee_bits_per_joule,"
              "realizations,seed\n");
    }

    SECTION("energy efficiency in the file is recomputable from the SE column")
    {
        const std::vector<PointResult> table = tiny_table();
        std::istringstream csv(results_csv(table));
        std::string line;
        std::getline(csv, line); // header

        const arma::uword chains[] = {64, 32};
        for (int row = 0; std::getline(csv, line); ++row)
        {
            std::istringstream fields(line);
            std::string architecture, rho, se, stderr_field, ee;
            std::getline(fields, architecture, ',');
            std::getline(fields, rho, ',');
            std::getline(fields, se, ',');
            std::getline(fields, stderr_field, ',');
            std::getline(fields, ee, ',');

            const double parsed_se = std::stod(se);
            const double parsed_ee = std::stod(ee);
            const double recomputed =
                energy_efficiency_bits_per_joule(parsed_se, PowerModel{}, chains[row]);
            CHECK(std::abs(parsed_ee - recomputed) <= 1e-9 * recomputed);
        }
    }

    SECTION("identical tables print identical bytes")
    {
        CHECK(results_csv(tiny_table()) == results_csv(tiny_table()));
    }
}

TEST_CASE("plot tables")
{
    ScenarioConfig config = parse_config(minimal_reference_json);
    config.rho_grid_db = {0.0, 10.0};

    std::vector<PointResult> table = tiny_table();
    table[0].rho_db = 0.0;
    table[1].rho_db = 10.0;

    const std::string se_table = plot_table(table, config, PlotMetric::SpectralEfficiency);

    std::istringstream lines(se_table);
    std::string comment, header, row0, row1;
    REQUIRE(std::getline(lines, comment));
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row0));
    REQUIRE(std::getline(lines, row1));

    CHECK(comment.rfind("#", 0) == 0);
    CHECK(header.find("rho_db") != std::string::npos);
    CHECK(header.find("fully_digital") != std::string::npos);
    CHECK(header.find("butler_realistic") != std::string::npos);

    // Each architecture has data at exactly one rho; the other cell is nan.
    CHECK(row0.find("12.345678901") != std::string::npos);
    CHECK(row0.find("nan") != std::string::npos);
    CHECK(row1.find("7.654321") != std::string::npos);
    CHECK(row1.find("nan") != std::string::npos);
}

TEST_CASE("emit_results writes the full output set")
{
    TempDir dir;
    ScenarioConfig config = parse_config(minimal_reference_json);
    config.rho_grid_db = {0.0, 10.0};

    emit_results(tiny_table(), config, dir.path.string());

    CHECK(read_text_file(dir.path / "results.csv") == results_csv(tiny_table()));
    CHECK(read_text_file(dir.path / "se_vs_rho.dat") ==
          plot_table(tiny_table(), config, PlotMetric::SpectralEfficiency));
    CHECK(read_text_file(dir.path / "ee_vs_rho.dat") ==
          plot_table(tiny_table(), config, PlotMetric::EnergyEfficiency));
}

TEST_CASE("run manifests resolve back to their configuration")
{
    TempDir dir;

    RunManifest manifest;
    manifest.config_path = "scenarios/reference.json";
    manifest.output_dir = dir.path.string();
    manifest.tool_version = "0.1.0";
    manifest.timestamp_utc = "2026-01-01T00:00:00Z";
    manifest.resolved_config = parse_config(minimal_reference_json);

    write_manifest(manifest, dir.path.string());

    const ScenarioConfig recovered =
        load_config_file((dir.path / "manifest.json").string());
    CHECK(recovered == manifest.resolved_config);
}

TEST_CASE("load_config_file reports missing files")
{
    CHECK_THROWS_AS(load_config_file("/nonexistent/path/config.json"), ConfigError);
}
