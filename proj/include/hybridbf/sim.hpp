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

#pragma once

#include "hybridbf/channel.hpp"
#include "hybridbf/power.hpp"
#include "hybridbf/precoding.hpp"
#include "hybridbf/rf_network.hpp"

#include <armadillo>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridbf
{

// ----------------------------- SWEEP ARCHITECTURES --------------------------

// The five transmitter variants compared by the harness. "Ideal" variants use
// a lossless component profile (topology losses such as the fully-connected
// 1/N_RF combining loss remain); "realistic" variants use the configured one.
enum class SweepArchitecture
{
    FullyDigital,
    FcIdeal,
    FcRealistic,
    ButlerIdeal,
    ButlerRealistic
};

std::string_view to_string(SweepArchitecture architecture);
SweepArchitecture parse_sweep_architecture(std::string_view name);
const std::vector<SweepArchitecture> &all_sweep_architectures();

// ------------------------------- CONFIGURATION ------------------------------

struct ScenarioConfig
{
    ArrayGeometry geometry{};
    std::vector<UserGroup> groups;
    arma::uword n_rf_chains = 0;
    std::vector<SweepArchitecture> architectures = all_sweep_architectures();
    LossProfile loss_profile = LossProfile::sub5ghz();
    std::vector<double> rho_grid_db; // operating points rho = K / sigma^2 [dB]
    arma::uword realizations = 1000;
    std::uint64_t master_seed = 1;
    PowerModel power{};

    arma::uword total_users() const noexcept;
    arma::uword total_beams() const noexcept;

    friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
};

void validate(const ScenarioConfig &config);

// --------------------------------- RESULTS ----------------------------------

// One (architecture, rho) cell of the sweep, averaged over all realizations.
struct PointResult
{
    SweepArchitecture architecture = SweepArchitecture::FullyDigital;
    double rho_db = 0.0;
    double mean_sum_se_bits_s_hz = 0.0;
    double se_stderr = 0.0; // standard error of the mean sum SE
    double ee_bits_per_joule = 0.0;
    arma::vec per_user_mean_sinr_db;
    arma::uword realizations = 0;
    std::uint64_t seed = 0;
};

struct SweepOutcome
{
    std::vector<PointResult> results;
    std::vector<std::string> errors; // one entry per architecture that failed
};

// Static/dynamic insertion-loss budget of one architecture in a scenario.
struct LossBudgetRow
{
    SweepArchitecture architecture = SweepArchitecture::FullyDigital;
    double static_db = 0.0;
    double dynamic_db = 0.0; // fully-connected combining loss 10*log10(N_RF)
};

std::vector<LossBudgetRow> loss_budget(const ScenarioConfig &config);

// --------------------------------- SCENARIO ---------------------------------

// Immutable per-scenario state shared by all realizations: the group
// covariances (with cached square roots), the joint beam allocation, and one
// analog network per requested architecture. Construction performs all
// configuration validation and fails fast on an infeasible setup.
class Scenario
{
  public:
    explicit Scenario(ScenarioConfig config);

    const ScenarioConfig &config() const noexcept
    {
        return config_;
    }

    const std::vector<std::pair<UserGroup, CovarianceMatrix>> &groups() const noexcept
    {
        return groups_;
    }

    const GroupBeamAllocation &allocation() const noexcept
    {
        return allocation_;
    }

    const RfNetwork &network(SweepArchitecture architecture) const;

    // RF chains charged to the power model: N for the fully-digital reference,
    // the configured chain count otherwise.
    arma::uword power_chain_count(SweepArchitecture architecture) const noexcept;

  private:
    ScenarioConfig config_;
    std::vector<std::pair<UserGroup, CovarianceMatrix>> groups_;
    GroupBeamAllocation allocation_;
    std::map<SweepArchitecture, RfNetwork> networks_;
};

// ---------------------------------- ENGINE ----------------------------------

// Monte-Carlo average of one (architecture, rho) cell. Realization r draws its
// channel with substream seed derive_stream_seed(master_seed, r), so the same
// channels are reused at every rho and for every architecture (common random
// numbers). Results are bit-identical for any worker count: per-realization
// outputs land in preallocated slots and are reduced in realization order.
// Throws on the first failing realization.
PointResult run_point(const Scenario &scenario, SweepArchitecture architecture, double rho_db,
                      unsigned workers = 1);

// Full Cartesian sweep (architecture-major, rho-minor). Architectures whose
// realizations fail numerically are dropped from the result table and reported
// in SweepOutcome::errors after the remaining work has finished.
SweepOutcome sweep(const Scenario &scenario, unsigned workers = 1);

} // namespace hybridbf
