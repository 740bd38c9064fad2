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
#include "hybridbf/sim.hpp"
#include "hybridbf/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>
#include <thread>

namespace
{

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm split{};
    gmtime_r(&now, &split);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &split);
    return buffer;
}

int command_run(const std::string &config_path, const std::string &out_dir,
                const std::uint64_t *seed_override, const std::uint64_t *realizations_override,
                unsigned workers)
{
    hybridbf::ScenarioConfig config = hybridbf::load_config_file(config_path);
    if (seed_override != nullptr)
        config.master_seed = *seed_override;
    if (realizations_override != nullptr)
        config.realizations = arma::uword(*realizations_override);

    const hybridbf::Scenario scenario(config); // fails fast on a bad setup

    hybridbf::RunManifest manifest;
    manifest.config_path = config_path;
    manifest.output_dir = out_dir;
    manifest.tool_version = hybridbf::version_string;
    manifest.timestamp_utc = utc_timestamp();
    manifest.resolved_config = config;
    hybridbf::write_manifest(manifest, out_dir);

    std::printf("scenario: N=%llu, N_RF=%llu, K=%llu, %zu group(s), profile=%s\n",
                (unsigned long long)config.geometry.n_antennas,
                (unsigned long long)config.n_rf_chains, (unsigned long long)config.total_users(),
                config.groups.size(), config.loss_profile.band_tag.c_str());
    std::printf("running %llu realizations x %zu rho point(s) x %zu architecture(s), %u worker(s)\n",
                (unsigned long long)config.realizations, config.rho_grid_db.size(),
                config.architectures.size(), workers);

    const hybridbf::SweepOutcome outcome = hybridbf::sweep(scenario, workers);
    hybridbf::emit_results(outcome.results, config, out_dir);

    std::printf("%-18s %8s %14s %12s %16s\n", "architecture", "rho[dB]", "sumSE[b/s/Hz]", "stderr",
                "EE[bits/J]");
    for (const hybridbf::PointResult &point : outcome.results)
        std::printf("%-18s %8.2f %14.4f %12.5f %16.1f\n",
                    std::string(to_string(point.architecture)).c_str(), point.rho_db,
                    point.mean_sum_se_bits_s_hz, point.se_stderr, point.ee_bits_per_joule);
    std::printf("wrote %s/results.csv, se_vs_rho.dat, ee_vs_rho.dat, manifest.json\n",
                out_dir.c_str());

    if (!outcome.errors.empty())
    {
        for (const std::string &error : outcome.errors)
            std::fprintf(stderr, "error: %s\n", error.c_str());
        return 1;
    }
    return 0;
}

int command_lossbudget(const std::string &config_path)
{
    const hybridbf::ScenarioConfig config = hybridbf::load_config_file(config_path);
    const std::vector<hybridbf::LossBudgetRow> rows = hybridbf::loss_budget(config);

    std::printf("loss budget for N=%llu, N_RF=%llu, profile=%s\n",
                (unsigned long long)config.geometry.n_antennas,
                (unsigned long long)config.n_rf_chains, config.loss_profile.band_tag.c_str());
    std::printf("%-18s %12s %13s %11s\n", "architecture", "static[dB]", "dynamic[dB]", "total[dB]");
    for (const hybridbf::LossBudgetRow &row : rows)
        std::printf("%-18s %12.4f %13.4f %11.4f\n",
                    std::string(to_string(row.architecture)).c_str(), row.static_db, row.dynamic_db,
                    row.static_db + row.dynamic_db);
    return 0;
}

int command_butler_check(std::uint64_t n)
{
    const hybridbf::StageFactorization factorization =
        hybridbf::synthesize_butler_stages(arma::uword(n));
    const double max_error =
        arma::abs(factorization.permuted_product() - hybridbf::dft_matrix(arma::uword(n))).max();

    std::printf("butler-check N=%llu: %zu stage(s), max |product - DFT| = %.3e\n",
                (unsigned long long)n, factorization.stages.size(), max_error);
    const bool pass = max_error < 1e-10;
    std::printf("%s\n", pass ? "OK (below 1e-10)" : "FAILED (tolerance 1e-10)");
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"link-level simulator for hybrid analog-digital precoding with lossy "
                 "RF beamforming networks"};
    app.set_version_flag("--version", hybridbf::version_string);
    app.require_subcommand(1);

    // ---- run ----
    std::string run_config;
    std::string run_out = "results";
    std::uint64_t run_seed = 0;
    std::uint64_t run_realizations = 0;
    unsigned run_workers = std::max(1u, std::thread::hardware_concurrency());
    CLI::App *run = app.add_subcommand("run", "run a sweep from a scenario config (or manifest)");
    run->add_option("config", run_config, "scenario config JSON")->required();
    run->add_option("--out", run_out, "output directory (default: results)");
    CLI::Option *seed_option = run->add_option("--seed", run_seed, "override the master seed");
    CLI::Option *realizations_option =
        run->add_option("--realizations", run_realizations, "override the realization count");
    run->add_option("--workers", run_workers, "worker thread count");

    // ---- lossbudget ----
    std::string budget_config;
    CLI::App *budget = app.add_subcommand("lossbudget", "print the per-architecture loss budget");
    budget->add_option("config", budget_config, "scenario config JSON")->required();

    // ---- butler-check ----
    std::uint64_t check_n = 0;
    CLI::App *check = app.add_subcommand("butler-check",
                                         "verify the stage factorization against the DFT");
    check->add_option("N", check_n, "array size (power of two)")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            if (run_workers < 1)
                run_workers = 1;
            if (realizations_option->count() > 0 && run_realizations < 1)
                throw std::invalid_argument("--realizations must be >= 1");
            return command_run(run_config, run_out,
                               seed_option->count() > 0 ? &run_seed : nullptr,
                               realizations_option->count() > 0 ? &run_realizations : nullptr,
                               run_workers);
        }
        if (budget->parsed())
            return command_lossbudget(budget_config);
        if (check->parsed())
            return command_butler_check(check_n);
    }
    catch (const std::exception &error)
    {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 1;
    }
    return 0;
}
