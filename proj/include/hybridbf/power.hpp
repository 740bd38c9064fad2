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

#include <armadillo>
#include <cmath>
#include <stdexcept>

namespace hybridbf
{

// ------------------------------- POWER MODEL -------------------------------

// Transmitter power bookkeeping: total consumption is the PA output power
// referred through the PA efficiency, plus a per-RF-chain overhead, plus one
// frequency synthesizer. Defaults model a 46 dBm macro transmitter.
struct PowerModel
{
    double pa_output_w = 40.0;     // radiated PA output power [W]
    double pa_efficiency = 0.39;   // PA drain efficiency, in (0, 1]
    double per_chain_w = 1.0;      // RF chain overhead [W] per chain
    double synthesizer_w = 2.0;    // shared frequency synthesizer [W]
    double bandwidth_hz = 2.0e7;   // signal bandwidth [Hz]

    friend bool operator==(const PowerModel &, const PowerModel &) = default;
};

inline void validate(const PowerModel &model)
{
    if (!(model.pa_output_w > 0.0) || !std::isfinite(model.pa_output_w))
        throw std::invalid_argument("PowerModel: pa_output_w must be positive and finite");
    if (!(model.pa_efficiency > 0.0) || model.pa_efficiency > 1.0)
        throw std::invalid_argument("PowerModel: pa_efficiency must be in (0, 1]");
    if (model.per_chain_w < 0.0 || !std::isfinite(model.per_chain_w))
        throw std::invalid_argument("PowerModel: per_chain_w must be non-negative and finite");
    if (model.synthesizer_w < 0.0 || !std::isfinite(model.synthesizer_w))
        throw std::invalid_argument("PowerModel: synthesizer_w must be non-negative and finite");
    if (!(model.bandwidth_hz > 0.0) || !std::isfinite(model.bandwidth_hz))
        throw std::invalid_argument("PowerModel: bandwidth_hz must be positive and finite");
}

// Total consumed power P_out / eta + n_rf_chains * P_chain + P_syn in watts.
inline double total_power_w(arma::uword n_rf_chains, const PowerModel &model)
{
    validate(model);
    if (n_rf_chains < 1)
        throw std::invalid_argument("total_power_w: n_rf_chains must be >= 1");
    return model.pa_output_w / model.pa_efficiency + double(n_rf_chains) * model.per_chain_w +
           model.synthesizer_w;
}

// Energy efficiency B * SE / P_total in bits per joule.
inline double energy_efficiency_bits_per_joule(double sum_se_bits_s_hz, const PowerModel &model,
                                               arma::uword n_rf_chains)
{
    if (sum_se_bits_s_hz < 0.0 || !std::isfinite(sum_se_bits_s_hz))
        throw std::invalid_argument("energy_efficiency_bits_per_joule: spectral efficiency must be "
                                    "non-negative and finite");
    return model.bandwidth_hz * sum_se_bits_s_hz / total_power_w(n_rf_chains, model);
}

} // namespace hybridbf
