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

#include <armadillo>
#include <string>
#include <string_view>
#include <vector>

namespace hybridbf
{

// ------------------------------- LOSS MODEL --------------------------------

// Per-component insertion losses in dB, all >= 0. Divider and combiner trees
// are binary, so an N-way stage costs log2(N) three-port hops; Butler matrices
// cost one hybrid coupler per stage plus fixed delay lines between stages.
struct LossProfile
{
    double divider_combiner_db = 0.0;       // per three-port divider/combiner stage
    double hybrid_coupler_db = 0.0;         // per 90-degree hybrid stage
    double variable_phase_shifter_db = 0.0; // adjustable shifter (fully-connected)
    double fixed_phase_shifter_db = 0.0;    // fixed line between Butler stages
    std::string band_tag = "ideal";

    static LossProfile ideal();
    static LossProfile sub5ghz(); // measured-component budget below 5 GHz
    static LossProfile mmwave();  // measured-component budget at mmWave

    friend bool operator==(const LossProfile &, const LossProfile &) = default;
};

void validate(const LossProfile &profile);

// ------------------------------ NETWORK TYPES ------------------------------

enum class Architecture
{
    FullyConnected, // divider / phase-shifter bank / combiner cascade
    Butler,         // hybrid-coupler Butler matrix (selected DFT columns)
    Identity        // no analog network (fully-digital reference)
};

std::string_view to_string(Architecture architecture);

// Analog beamforming network as seen between the RF-chain ports and the
// antenna ports: x = matrix * (digital precoder output). The matrix absorbs
// every static insertion loss and, for fully-connected networks, the dynamic
// combining loss, so downstream code treats it as an opaque linear map.
struct RfNetwork
{
    arma::cx_mat matrix; // n_antennas x n_rf_chains
    Architecture architecture = Architecture::Identity;
    double static_loss_db = 0.0;
    std::vector<arma::uword> beam_indices; // Butler only: DFT column behind each port
    arma::uword n_antennas = 0;
    arma::uword n_rf_chains = 0;
};

// Radix-2 stage factorization of the N x N unitary DFT: sparse hybrid-coupler
// stages interleaved with fixed phase stages, applied to bit-reversed input
// ports. stages are stored in application order (stages.front() acts first).
struct StageFactorization
{
    std::vector<arma::cx_mat> stages;
    std::vector<arma::uword> input_permutation; // bit-reversal of the input ports

    // (stages.back() * ... * stages.front()) with input columns relabeled by
    // input_permutation; equals dft_matrix(n) up to rounding.
    arma::cx_mat permuted_product() const;
};

// --------------------------------- HELPERS ---------------------------------

// Linear power ratio of a loss given in dB: 10^(dB/10) >= 1 for dB >= 0.
double db_to_power_ratio(double loss_db);

// Amplitude scale factor of a loss given in dB: 10^(-dB/20) <= 1 for dB >= 0.
double loss_amplitude(double loss_db);

bool is_power_of_two(arma::uword n);

// Smallest s with 2^s >= n (number of binary tree stages for an n-way split).
arma::uword ceil_log2(arma::uword n);

// Unitary DFT, entry (m, k) = exp(-j*2*pi*m*k/n) / sqrt(n).
arma::cx_mat dft_matrix(arma::uword n);

// Phase settings that steer a fully-connected network onto the given DFT
// columns: entry (i, j) is the phase of dft_matrix(n_antennas)(i, beams[j]).
arma::mat dft_beam_phases(arma::uword n_antennas, const std::vector<arma::uword> &beams);

// ----------------------------- COMPONENT STAGES -----------------------------

// Divider bank F_D (N*N_RF x N_RF): column j carries input j to its block of N
// branch ports with amplitude sqrt(1 / (loss_linear * N)). loss_linear is the
// linear power loss of the whole divider tree (>= 1).
arma::cx_mat divider_matrix(arma::uword n_antennas, arma::uword n_rf, double loss_linear);

// Phase-shifter bank F_PS: diagonal with unit-modulus phases scaled by the
// shifter loss, entry m = exp(j*phases_rad(m)) / sqrt(loss_linear).
arma::cx_mat phase_shift_matrix(const arma::vec &phases_rad, double loss_linear);

// Combiner bank F_C (N x N*N_RF): horizontal concatenation of N_RF identity
// blocks scaled by sqrt(1 / (loss_linear * N_RF)); antenna i sums branch i of
// every RF chain.
arma::cx_mat combiner_matrix(arma::uword n_antennas, arma::uword n_rf, double loss_linear);

// ------------------------------- ARCHITECTURES ------------------------------

// Fully-connected analog network F_RF = F_C * F_PS * F_D with the stage losses
// derived from the profile (divider: log2(N) stages, combiner: log2(N_RF)
// stages, one variable shifter per branch). phases_rad has N * n_rf entries in
// antenna-major order: entry j*N + i is the shifter between chain j and
// antenna i. Every entry of the result has magnitude
// 1 / sqrt(L_S * L_PS * L_C * N * n_rf).
RfNetwork compose_fc_abfn(const ArrayGeometry &geometry, arma::uword n_rf,
                          const arma::vec &phases_rad, const LossProfile &profile);

// Butler network: the selected unitary DFT columns scaled by the cascade loss
// of log2(N) hybrid stages and log2(N)-1 fixed phase-shifter stages. Requires
// N a power of two (>= 2) and distinct beam indices in [0, N).
RfNetwork butler_rf_matrix(const ArrayGeometry &geometry,
                           const std::vector<arma::uword> &beam_indices,
                           const LossProfile &profile);

// No analog network: N x N identity (fully-digital reference).
RfNetwork identity_rf_network(arma::uword n_antennas);

// Lossless radix-2 decimation-in-time factorization of dft_matrix(n); the
// physical blueprint of an N x N Butler matrix. Requires n a power of two.
StageFactorization synthesize_butler_stages(arma::uword n);

// Static insertion loss of an architecture in dB (excludes the 1/N_RF dynamic
// combining loss of fully-connected networks, which is a property of the
// network topology rather than of any component).
double static_loss_db(const LossProfile &profile, Architecture architecture,
                      arma::uword n_antennas, arma::uword n_rf);

// ||matrix * input||^2 / ||input||^2 for a nonzero input of length n_rf_chains.
double power_transfer_ratio(const RfNetwork &network, const arma::cx_vec &input);

} // namespace hybridbf
