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

#include "hybridbf/sim.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

using namespace hybridbf;

namespace
{

ScenarioConfig make_test_config()
{
    ScenarioConfig config;
    config.geometry = ArrayGeometry{16, 0.5};
    config.groups = {UserGroup{-30.0, 15.0, 2, 4}, UserGroup{30.0, 15.0, 2, 4}};
    config.n_rf_chains = 8;
    config.rho_grid_db = {0.0, 10.0, 20.0};
    config.realizations = 50;
    config.master_seed = 7;
    return config;
}

const PointResult &cell(const SweepOutcome &outcome, SweepArchitecture architecture,
                        double rho_db)
{
    for (const PointResult &result : outcome.results)
        if (result.architecture == architecture && result.rho_db == rho_db)
            return result;
    throw std::logic_error("missing sweep cell");
}

bool identical(const PointResult &a, const PointResult &b)
{
    return a.architecture == b.architecture && a.rho_db == b.rho_db &&
           a.mean_sum_se_bits_s_hz == b.mean_sum_se_bits_s_hz && a.se_stderr == b.se_stderr &&
           a.ee_bits_per_joule == b.ee_bits_per_joule && a.realizations == b.realizations &&
           a.seed == b.seed &&
           arma::all(a.per_user_mean_sinr_db == b.per_user_mean_sinr_db);
}

} // namespace

TEST_CASE("architecture names round-trip")
{
    for (SweepArchitecture architecture : all_sweep_architectures())
        CHECK(parse_sweep_architecture(to_string(architecture)) == architecture);
    CHECK(to_string(SweepArchitecture::FcRealistic) == "fc_realistic");
    CHECK(to_string(SweepArchitecture::FullyDigital) == "fully_digital");
    CHECK_THROWS_AS(parse_sweep_architecture("butler"), std::invalid_argument);
}

TEST_CASE("scenario configuration validation")
{
    CHECK_NOTHROW(validate(make_test_config()));

    SECTION("Butler networks need a power-of-two array")
    {
        ScenarioConfig config = make_test_config();
        config.geometry.n_antennas = 24;
        CHECK_THROWS_AS(validate(config), std::invalid_argument);

        // Without Butler variants the same array is acceptable.
        config.architectures = {SweepArchitecture::FullyDigital, SweepArchitecture::FcRealistic};
        CHECK_NOTHROW(validate(config));
    }

    SECTION("beam budget must fit the chain count and the array")
    {
        ScenarioConfig config = make_test_config();
        config.n_rf_chains = 7; // sum of beams is 8
        CHECK_THROWS_AS(validate(config), std::invalid_argument);

        config = make_test_config();
        config.n_rf_chains = 17; // exceeds 16 antennas
        CHECK_THROWS_AS(validate(config), std::invalid_argument);
    }

    SECTION("users must not exceed chains, grids must be sane")
    {
        ScenarioConfig config = make_test_config();
        config.groups[0].n_users = 7; // 9 users > 8 chains
        CHECK_THROWS_AS(validate(config), std::invalid_argument);

        config = make_test_config();
        config.rho_grid_db.clear();
        CHECK_THROWS_AS(validate(config), std::invalid_argument);

        config = make_test_config();
        config.rho_grid_db.push_back(arma::datum::inf);
        CHECK_THROWS_AS(validate(config), std::invalid_argument);

        config = make_test_config();
        config.realizations = 0;
        CHECK_THROWS_AS(validate(config), std::invalid_argument);
    }
}

TEST_CASE("scenario construction exposes shared state")
{
    const Scenario scenario(make_test_config());

    CHECK(scenario.groups().size() == 2);
    CHECK(scenario.allocation().total() == 8);

    const RfNetwork &butler = scenario.network(SweepArchitecture::ButlerRealistic);
    CHECK(butler.n_antennas == 16);
    CHECK(butler.n_rf_chains == 8);
    CHECK(butler.architecture == Architecture::Butler);

    const RfNetwork &digital = scenario.network(SweepArchitecture::FullyDigital);
    CHECK(digital.architecture == Architecture::Identity);
    CHECK(digital.n_rf_chains == 16);

    CHECK(scenario.power_chain_count(SweepArchitecture::FullyDigital) == 16);
    CHECK(scenario.power_chain_count(SweepArchitecture::ButlerIdeal) == 8);
    CHECK(scenario.power_chain_count(SweepArchitecture::FcRealistic) == 8);

    // Ideal and realistic variants share the same beam layout.
    const RfNetwork &ideal = scenario.network(SweepArchitecture::ButlerIdeal);
    CHECK(ideal.beam_indices == butler.beam_indices);
    CHECK(ideal.static_loss_db == 0.0);
    CHECK(butler.static_loss_db > 0.0);
}

TEST_CASE("sweep determinism")
{
    const Scenario scenario(make_test_config());

    SECTION("same scenario, same results, bit for bit")
    {
        const SweepOutcome first = sweep(scenario, 2);
        const SweepOutcome second = sweep(scenario, 2);
        REQUIRE(first.results.size() == second.results.size());
        CHECK(first.errors.empty());
        for (std::size_t i = 0; i < first.results.size(); ++i)
            CHECK(identical(first.results[i], second.results[i]));
    }

    SECTION("worker count does not change any bit of the output")
    {
        const SweepOutcome serial = sweep(scenario, 1);
        const SweepOutcome parallel = sweep(scenario, 4);
        REQUIRE(serial.results.size() == parallel.results.size());
        for (std::size_t i = 0; i < serial.results.size(); ++i)
            CHECK(identical(serial.results[i], parallel.results[i]));
    }

    SECTION("run_point reproduces the matching sweep cell")
    {
        const SweepOutcome outcome = sweep(scenario, 2);
        const PointResult direct =
            run_point(scenario, SweepArchitecture::ButlerRealistic, 10.0, 3);
        CHECK(identical(direct, cell(outcome, SweepArchitecture::ButlerRealistic, 10.0)));
    }

    SECTION("the master seed actually matters")
    {
        ScenarioConfig reseeded_config = make_test_config();
        reseeded_config.master_seed = 8;
        const Scenario reseeded(reseeded_config);

        const PointResult a = run_point(scenario, SweepArchitecture::FullyDigital, 10.0, 2);
        const PointResult b = run_point(reseeded, SweepArchitecture::FullyDigital, 10.0, 2);
        CHECK(a.mean_sum_se_bits_s_hz != b.mean_sum_se_bits_s_hz);
        CHECK(a.seed == 7);
        CHECK(b.seed == 8);
        CHECK(a.realizations == 50);
    }
}

TEST_CASE("sweep orderings expected on physical grounds")
{
    const Scenario scenario(make_test_config());
    const SweepOutcome outcome = sweep(scenario, 4);
    REQUIRE(outcome.errors.empty());
    REQUIRE(outcome.results.size() == 15); // 5 architectures x 3 rho points

    SECTION("the unconstrained digital transmitter dominates every hybrid")
    {
        for (double rho : {0.0, 10.0, 20.0})
        {
            const double digital =
                cell(outcome, SweepArchitecture::FullyDigital, rho).mean_sum_se_bits_s_hz;
            for (SweepArchitecture architecture :
                 {SweepArchitecture::FcIdeal, SweepArchitecture::FcRealistic,
                  SweepArchitecture::ButlerIdeal, SweepArchitecture::ButlerRealistic})
                CHECK(digital >= cell(outcome, architecture, rho).mean_sum_se_bits_s_hz);
        }
    }

    SECTION("component losses only ever hurt")
    {
        for (double rho : {0.0, 10.0, 20.0})
        {
            CHECK(cell(outcome, SweepArchitecture::FcIdeal, rho).mean_sum_se_bits_s_hz >=
                  cell(outcome, SweepArchitecture::FcRealistic, rho).mean_sum_se_bits_s_hz);
            CHECK(cell(outcome, SweepArchitecture::ButlerIdeal, rho).mean_sum_se_bits_s_hz >=
                  cell(outcome, SweepArchitecture::ButlerRealistic, rho).mean_sum_se_bits_s_hz);
        }
    }

    SECTION("the lossless Butler network beats the lossless fully-connected one")
    {
        for (double rho : {0.0, 10.0, 20.0})
            CHECK(cell(outcome, SweepArchitecture::ButlerIdeal, rho).mean_sum_se_bits_s_hz >=
                  cell(outcome, SweepArchitecture::FcIdeal, rho).mean_sum_se_bits_s_hz);
    }

    SECTION("spectral efficiency is nondecreasing in rho")
    {
        for (SweepArchitecture architecture : all_sweep_architectures())
        {
            const double low = cell(outcome, architecture, 0.0).mean_sum_se_bits_s_hz;
            const double mid = cell(outcome, architecture, 10.0).mean_sum_se_bits_s_hz;
            const double high = cell(outcome, architecture, 20.0).mean_sum_se_bits_s_hz;
            CHECK(low <= mid);
            CHECK(mid <= high);
        }
    }

    SECTION("per-user SINR summaries are populated and finite")
    {
        const PointResult &result = cell(outcome, SweepArchitecture::ButlerRealistic, 20.0);
        REQUIRE(result.per_user_mean_sinr_db.n_elem == 4);
        CHECK(result.per_user_mean_sinr_db.is_finite());
        CHECK(result.se_stderr > 0.0);
        CHECK(result.ee_bits_per_joule > 0.0);
    }
}

TEST_CASE("ideal fully-connected and Butler transmitters are power-shifted twins")
{
    // Entrywise, the lossless fully-connected matrix built on the DFT phases is
    // the Butler matrix divided by sqrt(N_RF); zero forcing absorbs any common
    // scale into the digital stage, so the SINRs coincide once rho is shifted
    // by 10*log10(N_RF) = 9.0309 dB for 8 chains.
    const Scenario scenario(make_test_config());
    const double shift_db = 10.0 * std::log10(8.0);

    for (double rho : {0.0, 12.0})
    {
        const PointResult butler = run_point(scenario, SweepArchitecture::ButlerIdeal, rho, 4);
        const PointResult fc =
            run_point(scenario, SweepArchitecture::FcIdeal, rho + shift_db, 4);
        CHECK(std::abs(butler.mean_sum_se_bits_s_hz - fc.mean_sum_se_bits_s_hz) < 1e-6);
    }
}

TEST_CASE("high-rho digital slope approaches the multiplexing gain")
{
    ScenarioConfig config = make_test_config();
    config.rho_grid_db = {30.0, 33.0};
    config.architectures = {SweepArchitecture::FullyDigital};
    const Scenario scenario(config);

    const double se_low = run_point(scenario, SweepArchitecture::FullyDigital, 30.0, 4)
                              .mean_sum_se_bits_s_hz;
    const double se_high = run_point(scenario, SweepArchitecture::FullyDigital, 33.0, 4)
                               .mean_sum_se_bits_s_hz;
    // 4 users x log2(10^0.3) bits per 3 dB once every user is interference free
    // and deep in the log-linear region.
    const double expected_gain = 4.0 * std::log2(std::pow(10.0, 0.3));
    CHECK(std::abs((se_high - se_low) - expected_gain) < 0.2);
}

TEST_CASE("insertion loss budget report")
{
    SECTION("16-antenna, 8-chain sub-5GHz scenario")
    {
        const std::vector<LossBudgetRow> rows = loss_budget(make_test_config());
        REQUIRE(rows.size() == 5);

        for (const LossBudgetRow &row : rows)
        {
            switch (row.architecture)
            {
            case SweepArchitecture::FcRealistic:
                // 0.5*4 + 3.5 + 0.5*3 = 7.0 dB static plus the combining loss.
                CHECK(std::abs(row.static_db - 7.0) < 1e-12);
                CHECK(std::abs(row.dynamic_db - 10.0 * std::log10(8.0)) < 1e-12);
                break;
            case SweepArchitecture::ButlerRealistic:
                // 3 fixed-shifter stages at 0.5 dB plus 4 hybrid stages at 0.15 dB.
                CHECK(std::abs(row.static_db - 2.1) < 1e-12);
                CHECK(row.dynamic_db == 0.0);
                break;
            case SweepArchitecture::FcIdeal:
                CHECK(row.static_db == 0.0);
                CHECK(std::abs(row.dynamic_db - 10.0 * std::log10(8.0)) < 1e-12);
                break;
            case SweepArchitecture::ButlerIdeal:
            case SweepArchitecture::FullyDigital:
                CHECK(row.static_db == 0.0);
                CHECK(row.dynamic_db == 0.0);
                break;
            }
        }
    }

    SECTION("64-antenna, 32-chain reference layout")
    {
        ScenarioConfig config;
        config.geometry = ArrayGeometry{64, 0.5};
        config.groups = {UserGroup{-45.0, 15.0, 4, 10}, UserGroup{0.0, 15.0, 4, 12},
                         UserGroup{45.0, 15.0, 4, 10}};
        config.n_rf_chains = 32;
        config.rho_grid_db = {0.0};

        for (const LossBudgetRow &row : loss_budget(config))
        {
            if (row.architecture == SweepArchitecture::FcRealistic)
            {
                CHECK(std::abs(row.static_db - 9.0) < 1e-12);
                CHECK(std::abs(row.dynamic_db - 15.051499783199059) < 1e-9);
            }
        }
    }
}

TEST_CASE("failing architectures are reported, not silently dropped")
{
    // An operating point so extreme that the noise power underflows to zero:
    // every realization fails inside the SINR evaluation, and the sweep must
    // say which architecture broke and at which realization instead of
    // returning a partial table.
    ScenarioConfig config;
    config.geometry = ArrayGeometry{8, 0.5};
    config.groups = {UserGroup{0.0, 15.0, 2, 2}};
    config.n_rf_chains = 2;
    config.architectures = {SweepArchitecture::ButlerRealistic};
    config.rho_grid_db = {3100.0};
    config.realizations = 3;
    const Scenario scenario(config);

    const SweepOutcome outcome = sweep(scenario, 2);
    CHECK(outcome.results.empty());
    REQUIRE(outcome.errors.size() == 1);
    CHECK(outcome.errors[0].find("butler_realistic") != std::string::npos);
    CHECK(outcome.errors[0].find("realization") != std::string::npos);

    CHECK_THROWS_AS(run_point(scenario, SweepArchitecture::ButlerRealistic, 3100.0, 1),
                    std::runtime_error);
}

TEST_CASE("an empty architecture list is a valid no-op sweep")
{
    ScenarioConfig config = make_test_config();
    config.architectures.clear();
    const Scenario scenario(config);
    const SweepOutcome outcome = sweep(scenario, 2);
    CHECK(outcome.results.empty());
    CHECK(outcome.errors.empty());
}
