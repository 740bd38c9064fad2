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
#include "hybridbf/rng.hpp"

#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace hybridbf
{

// ----------------------------- ARCHITECTURE NAMES ---------------------------

std::string_view to_string(SweepArchitecture architecture)
{
    switch (architecture)
    {
    case SweepArchitecture::FullyDigital:
        return "fully_digital";
    case SweepArchitecture::FcIdeal:
        return "fc_ideal";
    case SweepArchitecture::FcRealistic:
        return "fc_realistic";
    case SweepArchitecture::ButlerIdeal:
        return "butler_ideal";
    case SweepArchitecture::ButlerRealistic:
        return "butler_realistic";
    }
    throw std::invalid_argument("to_string: unknown SweepArchitecture");
}

SweepArchitecture parse_sweep_architecture(std::string_view name)
{
    for (SweepArchitecture architecture : all_sweep_architectures())
        if (name == to_string(architecture))
            return architecture;
    throw std::invalid_argument("unknown architecture '" + std::string(name) +
                                "' (expected one of: fully_digital, fc_ideal, fc_realistic, "
                                "butler_ideal, butler_realistic)");
}

const std::vector<SweepArchitecture> &all_sweep_architectures()
{
    static const std::vector<SweepArchitecture> all = {
        SweepArchitecture::FullyDigital, SweepArchitecture::FcIdeal, SweepArchitecture::FcRealistic,
        SweepArchitecture::ButlerIdeal, SweepArchitecture::ButlerRealistic};
    return all;
}

// ------------------------------- CONFIGURATION ------------------------------

arma::uword ScenarioConfig::total_users() const noexcept
{
    arma::uword count = 0;
    for (const UserGroup &group : groups)
        count += group.n_users;
    return count;
}

arma::uword ScenarioConfig::total_beams() const noexcept
{
    arma::uword count = 0;
    for (const UserGroup &group : groups)
        count += group.n_beams;
    return count;
}

void validate(const ScenarioConfig &config)
{
    validate(config.geometry);
    if (config.groups.empty())
        throw std::invalid_argument("ScenarioConfig: groups must be non-empty");
    for (const UserGroup &group : config.groups)
        validate(group);
    if (config.n_rf_chains < 1)
        throw std::invalid_argument("ScenarioConfig: n_rf_chains must be >= 1");
    if (config.n_rf_chains > config.geometry.n_antennas)
        throw std::invalid_argument("ScenarioConfig: n_rf_chains must not exceed n_antennas");
    if (config.total_users() > config.n_rf_chains)
        throw std::invalid_argument("ScenarioConfig: total users exceed n_rf_chains");
    if (config.total_beams() > config.n_rf_chains)
        throw std::invalid_argument("ScenarioConfig: total beam demand exceeds n_rf_chains");
    if (config.rho_grid_db.empty())
        throw std::invalid_argument("ScenarioConfig: rho_grid_db must be non-empty");
    for (double rho_db : config.rho_grid_db)
        if (!std::isfinite(rho_db))
            throw std::invalid_argument("ScenarioConfig: rho_grid_db entries must be finite");
    if (config.realizations < 1)
        throw std::invalid_argument("ScenarioConfig: realizations must be >= 1");
    validate(config.loss_profile);
    validate(config.power);

    for (SweepArchitecture architecture : config.architectures)
        if ((architecture == SweepArchitecture::ButlerIdeal ||
             architecture == SweepArchitecture::ButlerRealistic) &&
            (!is_power_of_two(config.geometry.n_antennas) || config.geometry.n_antennas < 2))
            throw std::invalid_argument(
                "ScenarioConfig: Butler architectures require n_antennas to be a power of two >= 2");
}

// -------------------------------- LOSS BUDGET -------------------------------

std::vector<LossBudgetRow> loss_budget(const ScenarioConfig &config)
{
    validate(config);
    const arma::uword n = config.geometry.n_antennas;
    const arma::uword n_rf = config.n_rf_chains;
    const LossProfile ideal = LossProfile::ideal();

    std::vector<LossBudgetRow> rows;
    rows.reserve(config.architectures.size());
    for (SweepArchitecture architecture : config.architectures)
    {
        LossBudgetRow row;
        row.architecture = architecture;
        switch (architecture)
        {
        case SweepArchitecture::FullyDigital:
            break;
        case SweepArchitecture::FcIdeal:
            row.static_db = static_loss_db(ideal, Architecture::FullyConnected, n, n_rf);
            row.dynamic_db = 10.0 * std::log10(double(n_rf));
            break;
        case SweepArchitecture::FcRealistic:
            row.static_db = static_loss_db(config.loss_profile, Architecture::FullyConnected, n, n_rf);
            row.dynamic_db = 10.0 * std::log10(double(n_rf));
            break;
        case SweepArchitecture::ButlerIdeal:
            row.static_db = static_loss_db(ideal, Architecture::Butler, n, n_rf);
            break;
        case SweepArchitecture::ButlerRealistic:
            row.static_db = static_loss_db(config.loss_profile, Architecture::Butler, n, n_rf);
            break;
        }
        rows.push_back(row);
    }
    return rows;
}

// --------------------------------- SCENARIO ---------------------------------

Scenario::Scenario(ScenarioConfig config) : config_(std::move(config))
{
    validate(config_);

    groups_.reserve(config_.groups.size());
    for (const UserGroup &group : config_.groups)
        groups_.emplace_back(group, one_ring_covariance(config_.geometry, group.center_angle_deg,
                                                        group.angular_spread_deg));

    // Force the square-root factorization now so an indefinite covariance
    // fails construction rather than the first sampled realization.
    for (auto &[group, covariance] : groups_)
        covariance.sqrt_factor();

    allocation_ = allocate_beams(groups_, config_.n_rf_chains);
    const std::vector<arma::uword> beams = allocation_.flattened();
    const arma::uword active_ports = arma::uword(beams.size());

    for (SweepArchitecture architecture : config_.architectures)
    {
        if (networks_.count(architecture))
            continue;
        switch (architecture)
        {
        case SweepArchitecture::FullyDigital:
            networks_.emplace(architecture, identity_rf_network(config_.geometry.n_antennas));
            break;
        case SweepArchitecture::FcIdeal:
        case SweepArchitecture::FcRealistic:
        {
            const LossProfile &profile = architecture == SweepArchitecture::FcIdeal
                                             ? LossProfile::ideal()
                                             : config_.loss_profile;
            const arma::vec phases =
                arma::vectorise(dft_beam_phases(config_.geometry.n_antennas, beams));
            networks_.emplace(architecture,
                              compose_fc_abfn(config_.geometry, active_ports, phases, profile));
            break;
        }
        case SweepArchitecture::ButlerIdeal:
        case SweepArchitecture::ButlerRealistic:
        {
            const LossProfile &profile = architecture == SweepArchitecture::ButlerIdeal
                                             ? LossProfile::ideal()
                                             : config_.loss_profile;
            networks_.emplace(architecture, butler_rf_matrix(config_.geometry, beams, profile));
            break;
        }
        }
    }
}

const RfNetwork &Scenario::network(SweepArchitecture architecture) const
{
    const auto found = networks_.find(architecture);
    if (found == networks_.end())
        throw std::invalid_argument("Scenario: architecture not part of this scenario");
    return found->second;
}

arma::uword Scenario::power_chain_count(SweepArchitecture architecture) const noexcept
{
    return architecture == SweepArchitecture::FullyDigital ? config_.geometry.n_antennas
                                                           : config_.n_rf_chains;
}

// ---------------------------------- ENGINE ----------------------------------

namespace
{

// Per-architecture failure record; only the lowest-realization message is kept
// so reported errors do not depend on thread scheduling.
struct FailureLog
{
    std::mutex mutex;
    std::vector<std::uint64_t> first_realization;
    std::vector<std::string> message;
    std::unique_ptr<std::atomic<bool>[]> failed;

    explicit FailureLog(std::size_t n_architectures)
        : first_realization(n_architectures, ~std::uint64_t(0)), message(n_architectures),
          failed(new std::atomic<bool>[n_architectures])
    {
        for (std::size_t a = 0; a < n_architectures; ++a)
            failed[a] = false;
    }

    void record(std::size_t architecture, std::uint64_t realization, const std::string &what)
    {
        failed[architecture] = true;
        const std::lock_guard<std::mutex> lock(mutex);
        if (realization < first_realization[architecture])
        {
            first_realization[architecture] = realization;
            message[architecture] = what;
        }
    }

    bool any() const
    {
        for (std::size_t a = 0; a < message.size(); ++a)
            if (failed[a])
                return true;
        return false;
    }
};

// Monte-Carlo core shared by run_point and sweep. Every realization writes its
// sum SE and per-user SINRs into preallocated slots; the reduction then walks
// realizations in index order, so results are independent of the worker count
// and schedule. If errors_out is null the first failure is rethrown, otherwise
// failed architectures are dropped and reported in errors_out.
std::vector<PointResult> run_engine(const Scenario &scenario,
                                    const std::vector<SweepArchitecture> &architectures,
                                    const std::vector<double> &rho_grid_db, unsigned workers,
                                    std::vector<std::string> *errors_out)
{
    const ScenarioConfig &config = scenario.config();
    const std::size_t n_architectures = architectures.size();
    const std::size_t n_points = rho_grid_db.size();
    const arma::uword n_users = config.total_users();
    const std::uint64_t n_realizations = config.realizations;

    std::vector<double> sigma2(n_points);
    for (std::size_t p = 0; p < n_points; ++p)
    {
        if (!std::isfinite(rho_grid_db[p]))
            throw std::invalid_argument("run_engine: rho_db must be finite");
        sigma2[p] = double(n_users) / std::pow(10.0, rho_grid_db[p] / 10.0);
    }

    if (n_architectures == 0 || n_points == 0)
        return {};

    // Slot layout: realization-major, then architecture, then rho point.
    const std::size_t cells = std::size_t(n_realizations) * n_architectures * n_points;
    std::vector<double> se_slots(cells, 0.0);
    std::vector<double> gamma_slots(cells * n_users, 0.0);
    const auto cell_index = [&](std::uint64_t r, std::size_t a, std::size_t p)
    { return (std::size_t(r) * n_architectures + a) * n_points + p; };

    FailureLog failures(n_architectures);

    const auto process_realization = [&](std::uint64_t r)
    {
        ChannelMatrix channel;
        try
        {
            channel = sample_group_channels(scenario.groups(),
                                            derive_stream_seed(config.master_seed, r));
        }
        catch (const std::exception &error)
        {
            for (std::size_t a = 0; a < n_architectures; ++a)
                failures.record(a, r, std::string("channel sampling: ") + error.what());
            return;
        }

        for (std::size_t a = 0; a < n_architectures; ++a)
        {
            if (failures.failed[a])
                continue;
            try
            {
                const SweepArchitecture architecture = architectures[a];
                const PrecoderSet precoders =
                    architecture == SweepArchitecture::FullyDigital
                        ? fully_digital_zf(channel)
                        : per_group_zf(channel, scenario.network(architecture), scenario.allocation());
                const arma::cx_mat cross_gains = channel.entries.t() * precoders.composite;

                for (std::size_t p = 0; p < n_points; ++p)
                {
                    SinrReport report;
                    report.sigma2 = sigma2[p];
                    report.gamma = sinr_from_cross_gains(cross_gains, sigma2[p]);
                    const std::size_t cell = cell_index(r, a, p);
                    se_slots[cell] = sum_spectral_efficiency(report);
                    for (arma::uword k = 0; k < n_users; ++k)
                        gamma_slots[cell * n_users + k] = report.gamma(k);
                }
            }
            catch (const std::exception &error)
            {
                failures.record(a, r, error.what());
            }
        }
    };

    const unsigned n_workers =
        std::max<unsigned>(1, std::min<unsigned>(workers, unsigned(std::min<std::uint64_t>(
                                                              n_realizations, 1u << 16))));
    if (n_workers == 1)
    {
        for (std::uint64_t r = 0; r < n_realizations; ++r)
            process_realization(r);
    }
    else
    {
        std::atomic<std::uint64_t> next_realization{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back(
                [&]
                {
                    for (;;)
                    {
                        const std::uint64_t r = next_realization.fetch_add(1);
                        if (r >= n_realizations)
                            return;
                        process_realization(r);
                    }
                });
        for (std::thread &worker : pool)
            worker.join();
    }

    // Deterministic reduction in realization order.
    std::vector<PointResult> results;
    results.reserve(n_architectures * n_points);
    for (std::size_t a = 0; a < n_architectures; ++a)
    {
        if (failures.failed[a])
        {
            const std::string description = "architecture " +
                                            std::string(to_string(architectures[a])) +
                                            ", realization " +
                                            std::to_string(failures.first_realization[a]) + ": " +
                                            failures.message[a];
            if (errors_out == nullptr)
                throw std::runtime_error(description);
            errors_out->push_back(description);
            continue;
        }

        for (std::size_t p = 0; p < n_points; ++p)
        {
            double se_sum = 0.0;
            for (std::uint64_t r = 0; r < n_realizations; ++r)
                se_sum += se_slots[cell_index(r, a, p)];
            const double se_mean = se_sum / double(n_realizations);

            double squared_deviation = 0.0;
            for (std::uint64_t r = 0; r < n_realizations; ++r)
            {
                const double deviation = se_slots[cell_index(r, a, p)] - se_mean;
                squared_deviation += deviation * deviation;
            }
            const double variance =
                n_realizations > 1 ? squared_deviation / double(n_realizations - 1) : 0.0;

            PointResult point;
            point.architecture = architectures[a];
            point.rho_db = rho_grid_db[p];
            point.mean_sum_se_bits_s_hz = se_mean;
            point.se_stderr = std::sqrt(variance / double(n_realizations));
            point.ee_bits_per_joule = energy_efficiency_bits_per_joule(
                se_mean, config.power, scenario.power_chain_count(architectures[a]));
            point.per_user_mean_sinr_db.set_size(n_users);
            for (arma::uword k = 0; k < n_users; ++k)
            {
                double gamma_sum = 0.0;
                for (std::uint64_t r = 0; r < n_realizations; ++r)
                    gamma_sum += gamma_slots[cell_index(r, a, p) * n_users + k];
                point.per_user_mean_sinr_db(k) = 10.0 * std::log10(gamma_sum / double(n_realizations));
            }
            point.realizations = n_realizations;
            point.seed = config.master_seed;
            results.push_back(std::move(point));
        }
    }
    return results;
}

} // namespace

PointResult run_point(const Scenario &scenario, SweepArchitecture architecture, double rho_db,
                      unsigned workers)
{
    std::vector<PointResult> results =
        run_engine(scenario, {architecture}, {rho_db}, workers, nullptr);
    return results.front();
}

SweepOutcome sweep(const Scenario &scenario, unsigned workers)
{
    SweepOutcome outcome;
    outcome.results = run_engine(scenario, scenario.config().architectures,
                                 scenario.config().rho_grid_db, workers, &outcome.errors);
    return outcome;
}

} // namespace hybridbf
