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
#include "hybridbf/rf_network.hpp"

#include <armadillo>
#include <utility>
#include <vector>

namespace hybridbf
{

// ------------------------------ ALLOCATION ---------------------------------

// Disjoint DFT beam indices assigned to each user group; beams_per_group[g]
// is ordered by decreasing captured energy for group g.
struct GroupBeamAllocation
{
    std::vector<std::vector<arma::uword>> beams_per_group;

    arma::uword n_groups() const noexcept
    {
        return arma::uword(beams_per_group.size());
    }

    arma::uword total() const noexcept;

    // Concatenation in group order; defines the RF-chain port order used to
    // build the analog network (group g occupies a contiguous block of ports).
    std::vector<arma::uword> flattened() const;
};

// ------------------------------- PRECODERS ---------------------------------

// Digital precoder plus its composite effect through the analog network.
// f_bb is n_rf x n_users with ||f_bb||_F^2 == n_users; composite is
// n_antennas x n_users, column k the effective beamformer of user k.
struct PrecoderSet
{
    arma::cx_mat f_bb;
    arma::cx_mat composite;
    GroupBeamAllocation allocation;
};

struct SinrReport
{
    arma::vec gamma; // linear SINR per user
    double sigma2 = 0.0;
};

// ---------------------------------- OPS ------------------------------------

// Eigenvalues of the circulant approximation of the covariance, ordered so
// that entry n is the energy proxy of unitary DFT column n (the beam actually
// wired to port n of a Butler network). Computed from the Toeplitz lags
// c(m) = ((N-m)*r(m) + m*conj(r(N-m))) / N followed by the DFT pairing.
arma::vec circulant_beam_spectrum(const CovarianceMatrix &covariance);

// Indices of the n_beams largest circulant eigenvalues, in decreasing order of
// eigenvalue; ties break toward the lower index. Deterministic.
std::vector<arma::uword> circulant_beam_select(const CovarianceMatrix &covariance,
                                               arma::uword n_beams);

// Jointly allocates disjoint beam index sets to all groups: one global greedy
// pass over (eigenvalue, group, index) candidates in decreasing eigenvalue
// order (ties toward lower group then lower index); a group claims a still
// free index while below its quota. Requires sum(n_beams) <= n_rf <= N.
GroupBeamAllocation allocate_beams(const std::vector<std::pair<UserGroup, CovarianceMatrix>> &groups,
                                   arma::uword n_rf);

// Per-group zero-forcing through the analog network: for each group g with
// effective channel Heff = Fg^H * Hg (Fg = the group's block of RF ports),
// W_g = Heff * (Heff^H * Heff)^(-1) computed via QR, assembled block-diagonally
// and rescaled globally so that ||f_bb||_F^2 == n_users. Throws on a singular
// or near-singular effective channel (condition number > 1e12).
PrecoderSet per_group_zf(const ChannelMatrix &channel, const RfNetwork &network,
                         const GroupBeamAllocation &allocation);

// Zero-forcing with no analog constraint: F_BB = H * (H^H * H)^(-1), rescaled
// to ||F_BB||_F^2 == n_users; the composite equals F_BB.
PrecoderSet fully_digital_zf(const ChannelMatrix &channel);

// SINR of each user k: |h_k^H f_k|^2 / (sum_{i != k} |h_k^H f_i|^2 + sigma2).
SinrReport sinr_per_user(const ChannelMatrix &channel, const PrecoderSet &precoders,
                         double sigma2);

// Same, starting from the cross-gain matrix G(k, i) = h_k^H f_i. Shared by
// sinr_per_user and the Monte-Carlo harness so both use identical arithmetic.
arma::vec sinr_from_cross_gains(const arma::cx_mat &cross_gains, double sigma2);

// Sum rate sum_k log2(1 + gamma_k) in bits/s/Hz.
double sum_spectral_efficiency(const SinrReport &report);

} // namespace hybridbf
