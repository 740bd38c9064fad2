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

#include "hybridbf/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hybridbf
{

namespace
{

constexpr double k_two_pi = 6.283185307179586476925286766559;
constexpr double k_ln2 = 0.69314718055994530941723212145818;
constexpr double k_max_condition = 1e12;

} // namespace

// ------------------------------- ALLOCATION --------------------------------

arma::uword GroupBeamAllocation::total() const noexcept
{
    arma::uword count = 0;
    for (const auto &beams : beams_per_group)
        count += arma::uword(beams.size());
    return count;
}

std::vector<arma::uword> GroupBeamAllocation::flattened() const
{
    std::vector<arma::uword> all;
    all.reserve(total());
    for (const auto &beams : beams_per_group)
        all.insert(all.end(), beams.begin(), beams.end());
    return all;
}

// ----------------------------- BEAM SELECTION ------------------------------

arma::vec circulant_beam_spectrum(const CovarianceMatrix &covariance)
{
    const arma::uword n = covariance.n();

    // First column of the circulant approximant of the Toeplitz covariance.
    arma::cx_vec circulant(n);
    circulant(0) = covariance.lag(0);
    for (arma::uword m = 1; m < n; ++m)
        circulant(m) = (double(n - m) * covariance.lag(m) + double(m) * std::conj(covariance.lag(n - m))) /
                       double(n);

    // Eigenvalue n of a circulant with first column c, paired with unitary DFT
    // column n as its eigenvector: lambda_n = sum_m c(m) * exp(+j*2*pi*n*m/n).
    // The + sign matches the exp(-j...) DFT convention used for the beams, so
    // index n here is the energy behind Butler port n (not its mirror image).
    arma::vec spectrum(n);
    for (arma::uword k = 0; k < n; ++k)
    {
        std::complex<double> accumulator = 0.0;
        for (arma::uword m = 0; m < n; ++m)
            accumulator += circulant(m) * std::polar(1.0, k_two_pi * double((k * m) % n) / double(n));
        spectrum(k) = accumulator.real();
    }
    return spectrum;
}

namespace
{

// Indices of the spectrum sorted by decreasing value, ties toward lower index.
std::vector<arma::uword> rank_spectrum(const arma::vec &spectrum)
{
    std::vector<arma::uword> order(spectrum.n_elem);
    std::iota(order.begin(), order.end(), arma::uword(0));
    std::sort(order.begin(), order.end(),
              [&spectrum](arma::uword a, arma::uword b)
              {
                  if (spectrum(a) != spectrum(b))
                      return spectrum(a) > spectrum(b);
                  return a < b;
              });
    return order;
}

} // namespace

std::vector<arma::uword> circulant_beam_select(const CovarianceMatrix &covariance,
                                               arma::uword n_beams)
{
    if (n_beams < 1 || n_beams > covariance.n())
        throw std::invalid_argument("circulant_beam_select: n_beams must be in [1, N]");

    std::vector<arma::uword> order = rank_spectrum(circulant_beam_spectrum(covariance));
    order.resize(n_beams);
    return order;
}

GroupBeamAllocation allocate_beams(const std::vector<std::pair<UserGroup, CovarianceMatrix>> &groups,
                                   arma::uword n_rf)
{
    if (groups.empty())
        throw std::invalid_argument("allocate_beams: group list must be non-empty");

    const arma::uword n = groups.front().second.n();
    arma::uword demand = 0;
    for (const auto &[group, covariance] : groups)
    {
        validate(group);
        if (covariance.n() != n)
            throw std::invalid_argument("allocate_beams: covariances must share one array size");
        if (group.n_beams > n)
            throw std::invalid_argument("allocate_beams: a group requests more beams than antennas");
        demand += group.n_beams;
    }
    if (demand > n_rf)
        throw std::invalid_argument("allocate_beams: total beam demand " + std::to_string(demand) +
                                    " exceeds n_rf " + std::to_string(n_rf));
    if (n_rf > n)
        throw std::invalid_argument("allocate_beams: n_rf must not exceed the antenna count");

    // One global greedy pass over all (eigenvalue, group, index) candidates in
    // decreasing eigenvalue order; ties toward lower group then lower index.
    // Each group claims still-free indices while below its quota, which keeps
    // the per-group lists in decreasing-eigenvalue order and all lists disjoint.
    struct Candidate
    {
        double value;
        arma::uword group;
        arma::uword beam;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(groups.size() * n);
    for (arma::uword g = 0; g < groups.size(); ++g)
    {
        const arma::vec spectrum = circulant_beam_spectrum(groups[g].second);
        for (arma::uword beam = 0; beam < n; ++beam)
            candidates.push_back({spectrum(beam), g, beam});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate &a, const Candidate &b)
              {
                  if (a.value != b.value)
                      return a.value > b.value;
                  if (a.group != b.group)
                      return a.group < b.group;
                  return a.beam < b.beam;
              });

    GroupBeamAllocation allocation;
    allocation.beams_per_group.resize(groups.size());
    std::vector<char> claimed(n, 0);
    for (const Candidate &candidate : candidates)
    {
        auto &list = allocation.beams_per_group[candidate.group];
        if (list.size() >= groups[candidate.group].first.n_beams || claimed[candidate.beam])
            continue;
        claimed[candidate.beam] = 1;
        list.push_back(candidate.beam);
    }

    for (arma::uword g = 0; g < groups.size(); ++g)
        if (allocation.beams_per_group[g].size() != groups[g].first.n_beams)
            throw std::runtime_error("allocate_beams: could not fill group " + std::to_string(g) +
                                     " with distinct beam indices");
    return allocation;
}

// ------------------------------ ZERO FORCING -------------------------------

namespace
{

// Unnormalized ZF precoder Heff * (Heff^H * Heff)^(-1) via the thin QR of
// Heff; throws if the effective channel is rank-deficient or extremely
// ill-conditioned (users inseparable through the chosen beams).
arma::cx_mat zf_pseudoinverse_columns(const arma::cx_mat &effective_channel,
                                      const std::string &context)
{
    const arma::uword rows = effective_channel.n_rows;
    const arma::uword cols = effective_channel.n_cols;
    if (rows < cols)
        throw std::invalid_argument(context + ": effective channel has fewer beams than users");

    arma::cx_mat q_factor, r_factor;
    if (!arma::qr_econ(q_factor, r_factor, effective_channel))
        throw std::runtime_error(context + ": QR decomposition failed");

    const arma::vec singular_values = arma::svd(r_factor);
    const double smallest = singular_values.min();
    if (smallest <= 0.0 || singular_values.max() / smallest > k_max_condition)
        throw std::runtime_error(context +
                                 ": singular or near-singular effective channel (condition > 1e12); "
                                 "users are not separable through the allocated beams");

    // W = Q * R^(-H) so that Heff^H * W == I.
    return arma::solve(arma::trimatu(r_factor), q_factor.t()).t();
}

} // namespace

PrecoderSet per_group_zf(const ChannelMatrix &channel, const RfNetwork &network,
                         const GroupBeamAllocation &allocation)
{
    const arma::uword n = channel.n_antennas();
    const arma::uword n_users = channel.n_users();
    if (n_users < 1)
        throw std::invalid_argument("per_group_zf: channel must contain at least one user");
    if (network.n_antennas != n)
        throw std::invalid_argument("per_group_zf: network and channel antenna counts differ");
    if (network.n_rf_chains != allocation.total())
        throw std::invalid_argument("per_group_zf: network ports must match the allocation size");
    if (channel.group_index_of_user.size() != n_users)
        throw std::invalid_argument("per_group_zf: channel group labels are inconsistent");

    const arma::uword n_groups = allocation.n_groups();
    std::vector<std::vector<arma::uword>> users_per_group(n_groups);
    for (arma::uword k = 0; k < n_users; ++k)
    {
        const arma::uword g = channel.group_index_of_user[k];
        if (g >= n_groups)
            throw std::invalid_argument("per_group_zf: user assigned to a group without beams");
        users_per_group[g].push_back(k);
    }

    PrecoderSet precoders;
    precoders.f_bb.zeros(network.n_rf_chains, n_users);
    precoders.allocation = allocation;

    arma::uword port_offset = 0;
    for (arma::uword g = 0; g < n_groups; ++g)
    {
        const arma::uword n_beams = arma::uword(allocation.beams_per_group[g].size());
        const auto &users = users_per_group[g];
        if (!users.empty())
        {
            arma::cx_mat group_channel(n, users.size());
            for (std::size_t u = 0; u < users.size(); ++u)
                group_channel.col(arma::uword(u)) = channel.entries.col(users[u]);

            const arma::cx_mat group_ports =
                network.matrix.cols(port_offset, port_offset + n_beams - 1);
            const arma::cx_mat effective = group_ports.t() * group_channel;
            const arma::cx_mat weights =
                zf_pseudoinverse_columns(effective, "per_group_zf (group " + std::to_string(g) + ")");

            for (std::size_t u = 0; u < users.size(); ++u)
                precoders.f_bb.submat(port_offset, users[u], port_offset + n_beams - 1, users[u]) =
                    weights.col(arma::uword(u));
        }
        port_offset += n_beams;
    }

    const double frobenius = arma::norm(precoders.f_bb, "fro");
    if (frobenius == 0.0)
        throw std::runtime_error("per_group_zf: precoder collapsed to zero");
    precoders.f_bb *= std::sqrt(double(n_users)) / frobenius;
    precoders.composite = network.matrix * precoders.f_bb;
    return precoders;
}

PrecoderSet fully_digital_zf(const ChannelMatrix &channel)
{
    const arma::uword n = channel.n_antennas();
    const arma::uword n_users = channel.n_users();
    if (n_users < 1)
        throw std::invalid_argument("fully_digital_zf: channel must contain at least one user");
    if (n < n_users)
        throw std::invalid_argument("fully_digital_zf: more users than antennas");

    PrecoderSet precoders;
    precoders.f_bb = zf_pseudoinverse_columns(channel.entries, "fully_digital_zf");

    const double frobenius = arma::norm(precoders.f_bb, "fro");
    if (frobenius == 0.0)
        throw std::runtime_error("fully_digital_zf: precoder collapsed to zero");
    precoders.f_bb *= std::sqrt(double(n_users)) / frobenius;
    precoders.composite = precoders.f_bb;

    // The implicit analog stage is the identity: every antenna is a "beam".
    precoders.allocation.beams_per_group.resize(1);
    precoders.allocation.beams_per_group[0].resize(n);
    std::iota(precoders.allocation.beams_per_group[0].begin(),
              precoders.allocation.beams_per_group[0].end(), arma::uword(0));
    return precoders;
}

// ---------------------------------- SINR -----------------------------------

arma::vec sinr_from_cross_gains(const arma::cx_mat &cross_gains, double sigma2)
{
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("sinr_from_cross_gains: sigma2 must be positive and finite");
    if (cross_gains.n_rows != cross_gains.n_cols)
        throw std::invalid_argument("sinr_from_cross_gains: cross-gain matrix must be square");

    const arma::uword n_users = cross_gains.n_rows;
    arma::vec gamma(n_users);
    for (arma::uword k = 0; k < n_users; ++k)
    {
        double signal = 0.0;
        double interference = 0.0;
        for (arma::uword i = 0; i < n_users; ++i)
        {
            const double power = std::norm(cross_gains.at(k, i));
            if (i == k)
                signal = power;
            else
                interference += power;
        }
        gamma(k) = signal / (interference + sigma2);
    }
    return gamma;
}

SinrReport sinr_per_user(const ChannelMatrix &channel, const PrecoderSet &precoders, double sigma2)
{
    if (precoders.composite.n_rows != channel.n_antennas())
        throw std::invalid_argument("sinr_per_user: precoder and channel antenna counts differ");
    if (precoders.composite.n_cols != channel.n_users())
        throw std::invalid_argument("sinr_per_user: precoder and channel user counts differ");

    SinrReport report;
    report.sigma2 = sigma2;
    report.gamma = sinr_from_cross_gains(channel.entries.t() * precoders.composite, sigma2);
    return report;
}

double sum_spectral_efficiency(const SinrReport &report)
{
    double sum_se = 0.0;
    for (arma::uword k = 0; k < report.gamma.n_elem; ++k)
    {
        const double gamma = report.gamma(k);
        if (gamma < 0.0 || !std::isfinite(gamma))
            throw std::invalid_argument("sum_spectral_efficiency: SINR must be non-negative and finite");
        sum_se += std::log1p(gamma) / k_ln2;
    }
    return sum_se;
}

} // namespace hybridbf
