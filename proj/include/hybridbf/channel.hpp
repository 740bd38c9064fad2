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
#include <complex>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace hybridbf
{

// ------------------------------- BASIC TYPES -------------------------------

// Uniform linear array at the transmitter.
struct ArrayGeometry
{
    arma::uword n_antennas = 1;
    double spacing_wavelengths = 0.5; // element spacing d / lambda

    friend bool operator==(const ArrayGeometry &, const ArrayGeometry &) = default;
};

// A co-located cluster of users sharing one angular region: all users in the
// group see the same one-ring covariance centered at center_angle_deg with
// half-spread angular_spread_deg, and the group is served through n_beams
// dedicated RF ports.
struct UserGroup
{
    double center_angle_deg = 0.0;    // azimuth of the scatterer ring center
    double angular_spread_deg = 15.0; // one-sided angular spread, (0, 90) deg
    arma::uword n_users = 1;
    arma::uword n_beams = 1;

    friend bool operator==(const UserGroup &, const UserGroup &) = default;
};

void validate(const ArrayGeometry &geometry);
void validate(const UserGroup &group);

// --------------------------- SPATIAL COVARIANCE ----------------------------

// Hermitian Toeplitz spatial correlation matrix with unit diagonal, stored
// together with a lazily computed PSD square-root factor. Instances are
// immutable; copies share the cached factor, so the expensive eigendecomposition
// runs at most once per covariance even when sampling from many threads.
class CovarianceMatrix
{
  public:
    // Builds the Hermitian Toeplitz matrix from its first column ("lags"):
    // entries(i, j) = lags(i - j) for i >= j and conj(lags(j - i)) otherwise.
    // Requires lags(0) == 1 (unit diagonal) and a non-empty lag vector.
    explicit CovarianceMatrix(const arma::cx_vec &lags);

    const arma::cx_mat &entries() const noexcept
    {
        return entries_;
    }

    arma::uword n() const noexcept
    {
        return entries_.n_rows;
    }

    // Correlation at antenna separation m (first column entry).
    std::complex<double> lag(arma::uword m) const
    {
        return entries_.at(m, 0);
    }

    // Eigenvalue clipping threshold: eigenvalues below -psd_epsilon() signal a
    // broken covariance, eigenvalues in [-psd_epsilon(), 0) are rounding noise
    // and are clipped to zero when factoring.
    double psd_epsilon() const noexcept
    {
        return 1e-8 * double(n());
    }

    // Factor S with S * S^H == entries(), computed on first use and cached.
    const arma::cx_mat &sqrt_factor() const;

  private:
    struct SqrtCache;

    arma::cx_mat entries_;
    std::shared_ptr<SqrtCache> cache_;
};

// Channel realization for all users: column k is the N-vector of user k, and
// group_index_of_user maps each column back to the group it was drawn for.
struct ChannelMatrix
{
    arma::cx_mat entries; // n_antennas x n_users
    std::vector<arma::uword> group_index_of_user;

    arma::uword n_antennas() const noexcept
    {
        return entries.n_rows;
    }

    arma::uword n_users() const noexcept
    {
        return entries.n_cols;
    }
};

// ---------------------------------- OPS ------------------------------------

// One-ring correlation of a uniform linear array: entry (i, j) is the average
// of the plane-wave phase difference exp(j*2*pi*(d/lambda)*(i-j)*cos(angle))
// over arrival angles uniform on [theta - delta, theta + delta]. The integral
// is evaluated with composite 16-point Gauss-Legendre panels; quad_points is
// the total node budget (rounded up to a whole number of panels).
CovarianceMatrix one_ring_covariance(const ArrayGeometry &geometry, double theta_deg,
                                     double delta_deg, arma::uword quad_points = 512);

// Hermitian PSD square root via eigendecomposition. Eigenvalues in
// [-psd_epsilon, 0) are clipped to zero; anything below -psd_epsilon throws,
// since a spatial covariance must be PSD up to quadrature rounding.
arma::cx_mat covariance_sqrt(const CovarianceMatrix &covariance);

// Draws h = S * z with z ~ CN(0, I) for every user of every group, in group
// order then user order, with a fixed per-user draw order of the z entries.
// The same (groups, seed) pair always produces the same matrix.
ChannelMatrix sample_group_channels(const std::vector<std::pair<UserGroup, CovarianceMatrix>> &groups,
                                    std::uint64_t seed);

} // namespace hybridbf
