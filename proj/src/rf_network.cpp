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

#include "hybridbf/rf_network.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace hybridbf
{

namespace
{

constexpr double k_pi = 3.141592653589793238462643383279502884;
constexpr double k_two_pi = 2.0 * k_pi;

} // namespace

// ------------------------------- LOSS PROFILE ------------------------------

LossProfile LossProfile::ideal()
{
    return LossProfile{0.0, 0.0, 0.0, 0.0, "ideal"};
}

LossProfile LossProfile::sub5ghz()
{
    return LossProfile{0.5, 0.15, 3.5, 0.5, "sub5ghz"};
}

LossProfile LossProfile::mmwave()
{
    return LossProfile{0.6, 0.5, 0.5, 0.5, "mmwave"};
}

void validate(const LossProfile &profile)
{
    const auto check = [](double value, const char *name)
    {
        if (value < 0.0 || !std::isfinite(value))
            throw std::invalid_argument(std::string("LossProfile: ") + name +
                                        " must be non-negative and finite (loss, not gain)");
    };
    check(profile.divider_combiner_db, "divider_combiner_db");
    check(profile.hybrid_coupler_db, "hybrid_coupler_db");
    check(profile.variable_phase_shifter_db, "variable_phase_shifter_db");
    check(profile.fixed_phase_shifter_db, "fixed_phase_shifter_db");
}

std::string_view to_string(Architecture architecture)
{
    switch (architecture)
    {
    case Architecture::FullyConnected:
        return "fully_connected";
    case Architecture::Butler:
        return "butler";
    case Architecture::Identity:
        return "identity";
    }
    throw std::invalid_argument("to_string: unknown Architecture");
}

// --------------------------------- HELPERS ---------------------------------

double db_to_power_ratio(double loss_db)
{
    return std::pow(10.0, loss_db / 10.0);
}

double loss_amplitude(double loss_db)
{
    return std::pow(10.0, -loss_db / 20.0);
}

bool is_power_of_two(arma::uword n)
{
    return n >= 1 && (n & (n - 1)) == 0;
}

arma::uword ceil_log2(arma::uword n)
{
    if (n < 1)
        throw std::invalid_argument("ceil_log2: n must be >= 1");
    arma::uword stages = 0;
    arma::uword reach = 1;
    while (reach < n)
    {
        reach *= 2;
        ++stages;
    }
    return stages;
}

arma::cx_mat dft_matrix(arma::uword n)
{
    if (n < 1)
        throw std::invalid_argument("dft_matrix: n must be >= 1");
    const double scale = 1.0 / std::sqrt(double(n));
    arma::cx_mat dft(n, n);
    // Reduce m*k modulo n before forming the angle so large indices do not
    // lose precision in the trigonometric argument.
    for (arma::uword k = 0; k < n; ++k)
        for (arma::uword m = 0; m < n; ++m)
            dft.at(m, k) = std::polar(scale, -k_two_pi * double((m * k) % n) / double(n));
    return dft;
}

arma::mat dft_beam_phases(arma::uword n_antennas, const std::vector<arma::uword> &beams)
{
    if (n_antennas < 1)
        throw std::invalid_argument("dft_beam_phases: n_antennas must be >= 1");
    arma::mat phases(n_antennas, beams.size());
    for (std::size_t j = 0; j < beams.size(); ++j)
    {
        if (beams[j] >= n_antennas)
            throw std::invalid_argument("dft_beam_phases: beam index out of range");
        for (arma::uword i = 0; i < n_antennas; ++i)
            phases(i, arma::uword(j)) = -k_two_pi * double((i * beams[j]) % n_antennas) / double(n_antennas);
    }
    return phases;
}

// ----------------------------- COMPONENT STAGES -----------------------------

arma::cx_mat divider_matrix(arma::uword n_antennas, arma::uword n_rf, double loss_linear)
{
    if (n_antennas < 1 || n_rf < 1)
        throw std::invalid_argument("divider_matrix: dimensions must be >= 1");
    if (loss_linear < 1.0)
        throw std::invalid_argument("divider_matrix: loss_linear must be >= 1 (gain not physical)");

    const double amplitude = std::sqrt(1.0 / (loss_linear * double(n_antennas)));
    arma::cx_mat divider(n_antennas * n_rf, n_rf, arma::fill::zeros);
    for (arma::uword j = 0; j < n_rf; ++j)
        for (arma::uword i = 0; i < n_antennas; ++i)
            divider.at(j * n_antennas + i, j) = amplitude;
    return divider;
}

arma::cx_mat phase_shift_matrix(const arma::vec &phases_rad, double loss_linear)
{
    if (phases_rad.n_elem < 1)
        throw std::invalid_argument("phase_shift_matrix: phases must be non-empty");
    if (!phases_rad.is_finite())
        throw std::invalid_argument("phase_shift_matrix: phases must be finite");
    if (loss_linear < 1.0)
        throw std::invalid_argument("phase_shift_matrix: loss_linear must be >= 1 (gain not physical)");

    const double amplitude = std::sqrt(1.0 / loss_linear);
    arma::cx_mat shifter(phases_rad.n_elem, phases_rad.n_elem, arma::fill::zeros);
    for (arma::uword m = 0; m < phases_rad.n_elem; ++m)
        shifter.at(m, m) = std::polar(amplitude, phases_rad(m));
    return shifter;
}

arma::cx_mat combiner_matrix(arma::uword n_antennas, arma::uword n_rf, double loss_linear)
{
    if (n_antennas < 1 || n_rf < 1)
        throw std::invalid_argument("combiner_matrix: dimensions must be >= 1");
    if (loss_linear < 1.0)
        throw std::invalid_argument("combiner_matrix: loss_linear must be >= 1 (gain not physical)");

    const double amplitude = std::sqrt(1.0 / (loss_linear * double(n_rf)));
    arma::cx_mat combiner(n_antennas, n_antennas * n_rf, arma::fill::zeros);
    for (arma::uword j = 0; j < n_rf; ++j)
        for (arma::uword i = 0; i < n_antennas; ++i)
            combiner.at(i, j * n_antennas + i) = amplitude;
    return combiner;
}

// ------------------------------- ARCHITECTURES ------------------------------

RfNetwork compose_fc_abfn(const ArrayGeometry &geometry, arma::uword n_rf,
                          const arma::vec &phases_rad, const LossProfile &profile)
{
    validate(geometry);
    validate(profile);
    if (n_rf < 1)
        throw std::invalid_argument("compose_fc_abfn: n_rf must be >= 1");
    const arma::uword n = geometry.n_antennas;
    if (phases_rad.n_elem != n * n_rf)
        throw std::invalid_argument("compose_fc_abfn: phases_rad must have n_antennas * n_rf entries");
    if (!phases_rad.is_finite())
        throw std::invalid_argument("compose_fc_abfn: phases must be finite");

    const double divider_db = profile.divider_combiner_db * double(ceil_log2(n));
    const double shifter_db = profile.variable_phase_shifter_db;
    const double combiner_db = profile.divider_combiner_db * double(ceil_log2(n_rf));

    // F_RF = F_C * F_PS * F_D. The diagonal F_PS is applied as a row scaling
    // of F_D, which is arithmetically identical to the dense diagonal product
    // without materializing the (N * N_RF)^2 matrix.
    arma::cx_mat staged = divider_matrix(n, n_rf, db_to_power_ratio(divider_db));
    const double shifter_amplitude = std::sqrt(1.0 / db_to_power_ratio(shifter_db));
    arma::cx_vec shifter_diag(n * n_rf);
    for (arma::uword m = 0; m < n * n_rf; ++m)
        shifter_diag(m) = std::polar(shifter_amplitude, phases_rad(m));
    staged.each_col() %= shifter_diag;

    RfNetwork network;
    network.matrix = combiner_matrix(n, n_rf, db_to_power_ratio(combiner_db)) * staged;
    network.architecture = Architecture::FullyConnected;
    network.static_loss_db = static_loss_db(profile, Architecture::FullyConnected, n, n_rf);
    network.n_antennas = n;
    network.n_rf_chains = n_rf;
    return network;
}

RfNetwork butler_rf_matrix(const ArrayGeometry &geometry,
                           const std::vector<arma::uword> &beam_indices,
                           const LossProfile &profile)
{
    validate(geometry);
    validate(profile);
    const arma::uword n = geometry.n_antennas;
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument("butler_rf_matrix: n_antennas must be a power of two >= 2");
    if (beam_indices.empty())
        throw std::invalid_argument("butler_rf_matrix: beam index list must be non-empty");
    std::set<arma::uword> unique_beams(beam_indices.begin(), beam_indices.end());
    if (unique_beams.size() != beam_indices.size())
        throw std::invalid_argument("butler_rf_matrix: beam indices must be distinct");
    if (*unique_beams.rbegin() >= n)
        throw std::invalid_argument("butler_rf_matrix: beam index out of range");

    const double loss_db = static_loss_db(profile, Architecture::Butler, n, arma::uword(beam_indices.size()));
    const double kappa = loss_amplitude(loss_db);

    const arma::cx_mat dft = dft_matrix(n);
    RfNetwork network;
    network.matrix.set_size(n, beam_indices.size());
    for (std::size_t j = 0; j < beam_indices.size(); ++j)
        network.matrix.col(arma::uword(j)) = kappa * dft.col(beam_indices[j]);
    network.architecture = Architecture::Butler;
    network.static_loss_db = loss_db;
    network.beam_indices = beam_indices;
    network.n_antennas = n;
    network.n_rf_chains = arma::uword(beam_indices.size());
    return network;
}

RfNetwork identity_rf_network(arma::uword n_antennas)
{
    if (n_antennas < 1)
        throw std::invalid_argument("identity_rf_network: n_antennas must be >= 1");
    RfNetwork network;
    network.matrix = arma::cx_mat(n_antennas, n_antennas, arma::fill::eye);
    network.architecture = Architecture::Identity;
    network.static_loss_db = 0.0;
    network.n_antennas = n_antennas;
    network.n_rf_chains = n_antennas;
    return network;
}

// --------------------------- BUTLER FACTORIZATION ---------------------------

namespace
{

arma::uword bit_reverse(arma::uword value, arma::uword bits)
{
    arma::uword reversed = 0;
    for (arma::uword b = 0; b < bits; ++b)
        if (value & (arma::uword(1) << b))
            reversed |= arma::uword(1) << (bits - 1 - b);
    return reversed;
}

} // namespace

arma::cx_mat StageFactorization::permuted_product() const
{
    if (stages.empty())
        throw std::invalid_argument("StageFactorization: no stages");
    arma::cx_mat product = stages.front();
    for (std::size_t s = 1; s < stages.size(); ++s)
        product = stages[s] * product;

    arma::cx_mat result(product.n_rows, product.n_cols);
    for (arma::uword j = 0; j < product.n_cols; ++j)
        result.col(j) = product.col(input_permutation[j]);
    return result;
}

StageFactorization synthesize_butler_stages(arma::uword n)
{
    if (!is_power_of_two(n) || n < 2)
        throw std::invalid_argument("synthesize_butler_stages: n must be a power of two >= 2");

    const arma::uword levels = ceil_log2(n);
    StageFactorization factorization;
    factorization.stages.reserve(2 * levels - 1);

    // Radix-2 decimation in time, unitary normalization: each level s applies
    // a bank of 90-degree hybrids (Hadamard butterflies of half-size 2^(s-1))
    // preceded, for s >= 2, by the fixed twiddle phases of that level. Input
    // ports are wired in bit-reversed order.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (arma::uword s = 1; s <= levels; ++s)
    {
        const arma::uword block = arma::uword(1) << s;
        const arma::uword half = block / 2;

        if (s >= 2)
        {
            arma::cx_mat phase(n, n, arma::fill::eye);
            for (arma::uword offset = 0; offset < n; offset += block)
                for (arma::uword t = 0; t < half; ++t)
                    phase.at(offset + half + t, offset + half + t) =
                        std::polar(1.0, -k_two_pi * double(t) / double(block));
            factorization.stages.push_back(std::move(phase));
        }

        arma::cx_mat hybrid(n, n, arma::fill::zeros);
        for (arma::uword offset = 0; offset < n; offset += block)
            for (arma::uword t = 0; t < half; ++t)
            {
                hybrid.at(offset + t, offset + t) = inv_sqrt2;
                hybrid.at(offset + t, offset + half + t) = inv_sqrt2;
                hybrid.at(offset + half + t, offset + t) = inv_sqrt2;
                hybrid.at(offset + half + t, offset + half + t) = -inv_sqrt2;
            }
        factorization.stages.push_back(std::move(hybrid));
    }

    factorization.input_permutation.resize(n);
    for (arma::uword j = 0; j < n; ++j)
        factorization.input_permutation[j] = bit_reverse(j, levels);
    return factorization;
}

// -------------------------------- LOSS BUDGET -------------------------------

double static_loss_db(const LossProfile &profile, Architecture architecture,
                      arma::uword n_antennas, arma::uword n_rf)
{
    validate(profile);
    if (n_antennas < 1 || n_rf < 1)
        throw std::invalid_argument("static_loss_db: dimensions must be >= 1");

    switch (architecture)
    {
    case Architecture::FullyConnected:
        return profile.divider_combiner_db * double(ceil_log2(n_antennas)) +
               profile.variable_phase_shifter_db +
               profile.divider_combiner_db * double(ceil_log2(n_rf));
    case Architecture::Butler:
    {
        const arma::uword hybrid_stages = ceil_log2(n_antennas);
        const arma::uword shifter_stages = hybrid_stages > 0 ? hybrid_stages - 1 : 0;
        return double(shifter_stages) * profile.fixed_phase_shifter_db +
               double(hybrid_stages) * profile.hybrid_coupler_db;
    }
    case Architecture::Identity:
        return 0.0;
    }
    throw std::invalid_argument("static_loss_db: unknown Architecture");
}

double power_transfer_ratio(const RfNetwork &network, const arma::cx_vec &input)
{
    if (input.n_elem != network.n_rf_chains)
        throw std::invalid_argument("power_transfer_ratio: input length must equal n_rf_chains");
    const double input_norm = arma::norm(input);
    if (input_norm == 0.0)
        throw std::invalid_argument("power_transfer_ratio: input must be nonzero");
    const double ratio = arma::norm(network.matrix * input) / input_norm;
    return ratio * ratio;
}

} // namespace hybridbf
