// SPDX-License-Identifier: Apache-2.0
//
// sphcov - spherical coverage evaluation for millimeter-wave UE antenna designs
// Copyright (C) 2026 The sphcov authors
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
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "error.hpp"

namespace sphcov
{

using Vec3 = std::array<double, 3>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

constexpr double deg2rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / pi; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Linear to dB with a -400 dB floor so zero gains stay finite and sortable.
inline double linear_to_db(double lin)
{
    constexpr double floor_lin = 1e-40;
    return 10.0 * std::log10(std::max(lin, floor_lin));
}

/// Wraps an azimuth into [0, 360).
inline double wrap_azimuth(double phi_deg)
{
    double p = std::fmod(phi_deg, 360.0);
    if (p < 0.0)
        p += 360.0;
    if (p >= 360.0) // fmod of tiny negatives can round up to 360
        p = 0.0;
    return p;
}

/// A point on the unit sphere. Zenith angle theta in [0, 180] degrees, azimuth phi in [0, 360) degrees.
class Direction
{
public:
    Direction() = default;

    Direction(double theta_deg, double phi_deg) : theta_(theta_deg), phi_(wrap_azimuth(phi_deg))
    {
        if (!std::isfinite(theta_deg) || !std::isfinite(phi_deg))
            throw ConfigError("Direction: angles must be finite");
        if (theta_deg < 0.0 || theta_deg > 180.0)
            throw ConfigError("Direction: theta must lie in [0, 180] degrees, got " + std::to_string(theta_deg));
    }

    double theta() const noexcept { return theta_; }
    double phi() const noexcept { return phi_; }
    double theta_rad() const noexcept { return deg2rad(theta_); }
    double phi_rad() const noexcept { return deg2rad(phi_); }

    friend bool operator==(const Direction &, const Direction &) = default;

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

/// [sin t cos p, sin t sin p, cos t]
inline Vec3 unit_vector(const Direction &d) noexcept
{
    const double st = std::sin(d.theta_rad()), ct = std::cos(d.theta_rad());
    const double sp = std::sin(d.phi_rad()), cp = std::cos(d.phi_rad());
    return {st * cp, st * sp, ct};
}

inline double dot(const Vec3 &a, const Vec3 &b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3 &a) noexcept { return std::sqrt(dot(a, a)); }

inline Vec3 cross(const Vec3 &a, const Vec3 &b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 normalized(const Vec3 &a)
{
    const double n = norm(a);
    if (!(n > 0.0))
        throw ConfigError("normalized: zero-length vector");
    return {a[0] / n, a[1] / n, a[2] / n};
}

/// Inverse of unit_vector. The vector need not be normalized. At the poles phi is 0.
inline Direction direction_from_vector(const Vec3 &v)
{
    const Vec3 u = normalized(v);
    const double theta = rad2deg(std::acos(std::clamp(u[2], -1.0, 1.0)));
    const double rho = std::hypot(u[0], u[1]);
    const double phi = rho < 1e-15 ? 0.0 : rad2deg(std::atan2(u[1], u[0]));
    return {theta, phi};
}

/// Angle between two directions in degrees.
inline double angular_distance(const Direction &a, const Direction &b)
{
    const Vec3 ua = unit_vector(a), ub = unit_vector(b);
    // atan2 form stays accurate near 0 and 180 degrees
    return rad2deg(std::atan2(norm(cross(ua, ub)), dot(ua, ub)));
}

/**
 * Uniform (theta, phi) grid of cell centers over the full sphere.
 *
 * Cell (k, m) is centered at theta = (k + 1/2) * theta_step, phi = (m + 1/2) * phi_step and points are stored
 * theta-major (index = k * n_phi + m). The weight of a cell is its exact solid angle,
 * (cos t_lo - cos t_hi) * dphi = 2 sin(t_c) sin(dtheta / 2) dphi, i.e. the midpoint value sin(t_c) dtheta dphi
 * with dtheta replaced by 2 sin(dtheta / 2). The weights then sum to 4 pi up to rounding.
 */
class SphereGrid
{
public:
    SphereGrid(double theta_step_deg, double phi_step_deg);

    double theta_step() const noexcept { return theta_step_; }
    double phi_step() const noexcept { return phi_step_; }
    std::size_t n_theta() const noexcept { return n_theta_; }
    std::size_t n_phi() const noexcept { return n_phi_; }
    std::size_t size() const noexcept { return points_.size(); }

    std::span<const Direction> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const Vec3> unit_vectors() const noexcept { return units_; }

    const Direction &point(std::size_t i) const { return points_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }

    std::size_t index(std::size_t k_theta, std::size_t m_phi) const noexcept { return k_theta * n_phi_ + m_phi; }

    /// Index of the cell containing d (cells are half-open; theta = 180 maps to the last row).
    std::size_t nearest_index(const Direction &d) const noexcept
    {
        auto k = static_cast<std::size_t>(d.theta() / theta_step_);
        auto m = static_cast<std::size_t>(d.phi() / phi_step_);
        k = std::min(k, n_theta_ - 1);
        m = std::min(m, n_phi_ - 1);
        return index(k, m);
    }

    double total_weight() const noexcept { return total_weight_; }

    bool same_layout(const SphereGrid &o) const noexcept
    {
        return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_;
    }

private:
    double theta_step_, phi_step_;
    std::size_t n_theta_ = 0, n_phi_ = 0;
    std::vector<Direction> points_;
    std::vector<double> weights_;
    std::vector<Vec3> units_;
    double total_weight_ = 0.0;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

namespace detail
{
// Number of steps of size `step` in `span`; throws unless it is a positive integer (to 1e-9 relative).
inline std::size_t exact_division(double span, double step, const char *what)
{
    if (!std::isfinite(step) || step <= 0.0)
        throw ConfigError(std::string("make_grid: ") + what + " step must be positive");
    const double q = span / step;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * r)
        throw ConfigError(std::string("make_grid: ") + what + " step " + std::to_string(step) +
                          " does not divide " + std::to_string(span));
    return static_cast<std::size_t>(r);
}
} // namespace detail

inline SphereGrid::SphereGrid(double theta_step_deg, double phi_step_deg)
    : theta_step_(theta_step_deg), phi_step_(phi_step_deg)
{
    n_theta_ = detail::exact_division(180.0, theta_step_deg, "theta");
    n_phi_ = detail::exact_division(360.0, phi_step_deg, "phi");
    const std::size_t n = n_theta_ * n_phi_;
    points_.reserve(n);
    weights_.reserve(n);
    units_.reserve(n);

    const double dphi = deg2rad(phi_step_);
    const double half_dtheta = 0.5 * deg2rad(theta_step_);
    std::vector<double> band(n_theta_);
    // mirrored so rows k and n-1-k carry bit-identical weights
    for (std::size_t k = 0; k < (n_theta_ + 1) / 2; ++k)
    {
        band[k] = 2.0 * std::sin(deg2rad((k + 0.5) * theta_step_)) * std::sin(half_dtheta) * dphi;
        band[n_theta_ - 1 - k] = band[k];
    }

    for (std::size_t k = 0; k < n_theta_; ++k)
        for (std::size_t m = 0; m < n_phi_; ++m)
        {
            points_.emplace_back((k + 0.5) * theta_step_, (m + 0.5) * phi_step_);
            weights_.push_back(band[k]);
            units_.push_back(unit_vector(points_.back()));
        }

    // Pairwise-ish accumulation: per-row sums first keeps rounding far below 1e-12.
    for (std::size_t k = 0; k < n_theta_; ++k)
        total_weight_ += band[k] * static_cast<double>(n_phi_);
}

/// Builds a shared grid; both steps in degrees, must divide 180 and 360 respectively.
inline GridPtr make_grid(double theta_step_deg, double phi_step_deg)
{
    return std::make_shared<const SphereGrid>(theta_step_deg, phi_step_deg);
}

/// Sum of f(p) * weight(p) over the grid. f is called with (const Direction&) or, if that is not
/// viable, with the point index.
template <typename F>
    requires std::is_invocable_v<F &, const Direction &> || std::is_invocable_v<F &, std::size_t>
double integrate(const SphereGrid &grid, F &&f)
{
    // Neumaier compensated sum
    double sum = 0.0, comp = 0.0;
    const auto pts = grid.points();
    const auto w = grid.weights();
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        double term;
        if constexpr (std::is_invocable_v<F &, const Direction &>)
            term = static_cast<double>(f(pts[i])) * w[i];
        else
            term = static_cast<double>(f(i)) * w[i];
        const double t = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

/// Sum of values[i] * weight(i) for a field sampled on the grid.
inline double integrate(const SphereGrid &grid, std::span<const double> values)
{
    if (values.size() != grid.size())
        throw ConfigError("integrate: field size does not match grid");
    return integrate(grid, [&](std::size_t i) { return values[i]; });
}

} // namespace sphcov
