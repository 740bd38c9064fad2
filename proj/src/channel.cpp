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

#include "hybridbf/channel.hpp"
#include "hybridbf/rng.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hybridbf
{

// ------------------------------- VALIDATION --------------------------------

void validate(const ArrayGeometry &geometry)
{
    if (geometry.n_antennas < 1)
        throw std::invalid_argument("ArrayGeometry: n_antennas must be >= 1");
    if (!(geometry.spacing_wavelengths > 0.0) || !std::isfinite(geometry.spacing_wavelengths))
        throw std::invalid_argument("ArrayGeometry: spacing_wavelengths must be positive and finite");
}

void validate(const UserGroup &group)
{
    if (!std::isfinite(group.center_angle_deg))
        throw std::invalid_argument("UserGroup: center_angle_deg must be finite");
    if (!(group.angular_spread_deg > 0.0) || !(group.angular_spread_deg < 90.0))
        throw std::invalid_argument("UserGroup: angular_spread_deg must be in (0, 90)");
    if (group.n_users < 1)
        throw std::invalid_argument("UserGroup: n_users must be >= 1");
    if (group.n_beams < group.n_users)
        throw std::invalid_argument("UserGroup: n_beams must be >= n_users");
}

// --------------------------- COVARIANCE MATRIX -----------------------------

struct CovarianceMatrix::SqrtCache
{
    std::once_flag once;
    arma::cx_mat factor;
};

CovarianceMatrix::CovarianceMatrix(const arma::cx_vec &lags) : cache_(std::make_shared<SqrtCache>())
{
    if (lags.n_elem < 1)
        throw std::invalid_argument("CovarianceMatrix: lag vector must be non-empty");
    if (lags(0) != std::complex<double>(1.0, 0.0))
        throw std::invalid_argument("CovarianceMatrix: lag 0 must be exactly 1 (unit diagonal)");
    if (!lags.is_finite())
        throw std::invalid_argument("CovarianceMatrix: lags must be finite");

    const arma::uword n = lags.n_elem;
    entries_.set_size(n, n);
    for (arma::uword j = 0; j < n; ++j)
        for (arma::uword i = 0; i < n; ++i)
            entries_.at(i, j) = (i >= j) ? lags(i - j) : std::conj(lags(j - i));
}

const arma::cx_mat &CovarianceMatrix::sqrt_factor() const
{
    std::call_once(cache_->once, [this] { cache_->factor = covariance_sqrt(*this); });
    return cache_->factor;
}

// ------------------------------- QUADRATURE --------------------------------

namespace
{

constexpr double k_pi = 3.141592653589793238462643383279502884;

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 16> gl16_nodes = {
    -9.89400934991649939e-01, -9.44575023073232600e-01, -8.65631202387831755e-01,
    -7.55404408355002999e-01, -6.17876244402643771e-01, -4.58016777657227370e-01,
    -2.81603550779258915e-01, -9.50125098376374544e-02, 9.50125098376374544e-02,
    2.81603550779258915e-01,  4.58016777657227370e-01,  6.17876244402643771e-01,
    7.55404408355002999e-01,  8.65631202387831755e-01,  9.44575023073232600e-01,
    9.89400934991649939e-01};

constexpr std::array<double, 16> gl16_weights = {
    2.71524594117540374e-02, 6.22535239386477063e-02, 9.51585116824925914e-02,
    1.24628971255534030e-01, 1.49595988816576764e-01, 1.69156519395002619e-01,
    1.82603415044923612e-01, 1.89450610455068585e-01, 1.89450610455068585e-01,
    1.82603415044923612e-01, 1.69156519395002619e-01, 1.49595988816576764e-01,
    1.24628971255534030e-01, 9.51585116824925914e-02, 6.22535239386477063e-02,
    2.71524594117540374e-02};

} // namespace

// -------------------------- ONE-RING COVARIANCE ----------------------------

CovarianceMatrix one_ring_covariance(const ArrayGeometry &geometry, double theta_deg,
                                     double delta_deg, arma::uword quad_points)
{
    validate(geometry);
    if (!std::isfinite(theta_deg) || !std::isfinite(delta_deg))
        throw std::invalid_argument("one_ring_covariance: angles must be finite");
    if (!(delta_deg > 0.0))
        throw std::invalid_argument("one_ring_covariance: delta_deg must be positive");
    if (quad_points < 64)
        throw std::invalid_argument("one_ring_covariance: quad_points must be >= 64");

    const arma::uword n = geometry.n_antennas;
    const double theta = theta_deg * k_pi / 180.0;
    const double delta = delta_deg * k_pi / 180.0;
    const double two_pi_spacing = 2.0 * k_pi * geometry.spacing_wavelengths;

    // Composite Gauss-Legendre over [theta - delta, theta + delta] with the
    // 1/(2*delta) averaging folded into the weights. The lag at separation 0
    // is pinned to 1 exactly (the integrand is identically 1 there).
    const arma::uword panels = (quad_points + 15) / 16;
    const double panel_width = 2.0 * delta / double(panels);
    const double half_width = 0.5 * panel_width;

    arma::cx_vec lags(n, arma::fill::zeros);
    lags(0) = 1.0;
    for (arma::uword p = 0; p < panels; ++p)
    {
        const double center = (theta - delta) + (double(p) + 0.5) * panel_width;
        for (std::size_t q = 0; q < gl16_nodes.size(); ++q)
        {
            const double angle = center + half_width * gl16_nodes[q];
            const double weight = gl16_weights[q] * half_width / (2.0 * delta);
            const double phase_step = two_pi_spacing * std::cos(angle);
            for (arma::uword m = 1; m < n; ++m)
                lags(m) += weight * std::polar(1.0, phase_step * double(m));
        }
    }

    return CovarianceMatrix(lags);
}

// ----------------------------- PSD SQUARE ROOT -----------------------------

arma::cx_mat covariance_sqrt(const CovarianceMatrix &covariance)
{
    arma::vec eigenvalues;
    arma::cx_mat eigenvectors;
    if (!arma::eig_sym(eigenvalues, eigenvectors, covariance.entries()))
        throw std::runtime_error("covariance_sqrt: eigendecomposition failed");

    const double epsilon = covariance.psd_epsilon();
    if (eigenvalues.min() < -epsilon)
        throw std::runtime_error("covariance_sqrt: covariance is not PSD (min eigenvalue " +
                                 std::to_string(eigenvalues.min()) +
                                 " < -epsilon); quadrature too coarse or inputs inconsistent");

    eigenvalues.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return eigenvectors * arma::diagmat(eigenvalues) * eigenvectors.t();
}

// ----------------------------- CHANNEL SAMPLING ----------------------------

ChannelMatrix sample_group_channels(const std::vector<std::pair<UserGroup, CovarianceMatrix>> &groups,
                                    std::uint64_t seed)
{
    if (groups.empty())
        throw std::invalid_argument("sample_group_channels: group list must be non-empty");

    const arma::uword n = groups.front().second.n();
    arma::uword n_users = 0;
    for (const auto &[group, covariance] : groups)
    {
        validate(group);
        if (covariance.n() != n)
            throw std::invalid_argument("sample_group_channels: covariances must share one array size");
        n_users += group.n_users;
    }

    CounterRng rng(seed);
    ChannelMatrix channel;
    channel.entries.set_size(n, n_users);
    channel.group_index_of_user.reserve(n_users);

    arma::cx_vec white(n);
    arma::uword column = 0;
    for (arma::uword g = 0; g < groups.size(); ++g)
    {
        const arma::cx_mat &factor = groups[g].second.sqrt_factor();
        for (arma::uword u = 0; u < groups[g].first.n_users; ++u)
        {
            for (arma::uword i = 0; i < n; ++i)
                white(i) = rng.next_cgauss();
            channel.entries.col(column) = factor * white;
            channel.group_index_of_user.push_back(g);
            ++column;
        }
    }
    return channel;
}

} // namespace hybridbf
