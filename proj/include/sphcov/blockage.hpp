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
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "gain_map.hpp"

namespace sphcov
{

/**
 * Rectangular hand-blockage region in (phi, theta): azimuth [phi1 - x1/2, phi1 + x1/2] (may wrap through 0)
 * and zenith [theta1 - y1/2, theta1 + y1/2]. All in degrees.
 */
struct BlockageRegion
{
    double phi1 = 0.0;   // center azimuth
    double x1 = 0.0;     // azimuth extent
    double theta1 = 90.0; // center zenith
    double y1 = 0.0;     // zenith extent

    double phi_lower() const noexcept { return phi1 - 0.5 * x1; }
    double phi_upper() const noexcept { return phi1 + 0.5 * x1; }
    double theta_lower() const noexcept { return theta1 - 0.5 * y1; }
    double theta_upper() const noexcept { return theta1 + 0.5 * y1; }

    static BlockageRegion portrait() { return {260.0, 120.0, 100.0, 80.0}; }
    static BlockageRegion landscape() { return {40.0, 160.0, 110.0, 75.0}; }
};

inline BlockageRegion parse_blockage_region(const std::string &s)
{
    if (s == "portrait")
        return BlockageRegion::portrait();
    if (s == "landscape")
        return BlockageRegion::landscape();
    throw ConfigError("unknown blockage region '" + s + "' (expected portrait or landscape)");
}

namespace detail
{
// Offset of phi from the interval start, in [0, 360).
inline double azimuth_offset(double phi_deg, double lower_deg) { return wrap_azimuth(phi_deg - lower_deg); }
} // namespace detail

/// Closed-interval membership in both angles, with azimuth wrap-around.
inline bool is_blocked(const Direction &d, const BlockageRegion &r)
{
    const double eps = 1e-9;
    if (d.theta() < r.theta_lower() - eps || d.theta() > r.theta_upper() + eps)
        return false;
    if (r.x1 >= 360.0)
        return true;
    const double off = detail::azimuth_offset(d.phi(), r.phi_lower());
    return off <= r.x1 + eps || off >= 360.0 - eps;
}

/**
 * Region indicator with the midpoint convention at its edges: 1 inside, 0 outside, 1/2 on a theta or phi
 * boundary (1/4 on a corner). Integrating this on a grid whose cell centers fall on the boundary gives the
 * region's solid angle to second order in the step, where the closed indicator overshoots by half a cell row.
 */
inline double region_indicator(const Direction &d, const BlockageRegion &r)
{
    const double eps = 1e-9;
    auto edge_value = [&](double dist_lo, double dist_hi) {
        // dist_* measured inward from each bound; negative means outside
        if (dist_lo < -eps || dist_hi < -eps)
            return 0.0;
        if (std::abs(dist_lo) <= eps || std::abs(dist_hi) <= eps)
            return 0.5;
        return 1.0;
    };
    const double ft = edge_value(d.theta() - r.theta_lower(), r.theta_upper() - d.theta());
    if (ft == 0.0)
        return 0.0;
    if (r.x1 >= 360.0)
        return ft;
    double off = detail::azimuth_offset(d.phi(), r.phi_lower());
    if (off >= 360.0 - eps)
        off -= 360.0;
    return ft * edge_value(off, r.x1 - off);
}

/// Share of the (phi, theta) rectangle, in percent: x1 * y1 / (360 * 180) * 100.
inline double physical_angle_fraction(const BlockageRegion &r)
{
    return r.x1 * r.y1 / (360.0 * 180.0) * 100.0;
}

/**
 * Solid-angle share of the region, in percent: x1 (cos theta_lower - cos theta_upper) / (4 pi) * 100.
 * Zenith bounds outside [0, 180] are clamped, with a warning on `warn` when given.
 */
inline double cdf_loss_fraction(const BlockageRegion &r, std::ostream *warn = &std::clog)
{
    double lo = r.theta_lower(), hi = r.theta_upper();
    if (lo < 0.0 || hi > 180.0)
    {
        if (warn)
            *warn << "warning: blockage zenith bounds [" << lo << ", " << hi << "] clamped to [0, 180]\n";
        lo = std::clamp(lo, 0.0, 180.0);
        hi = std::clamp(hi, 0.0, 180.0);
    }
    if (hi <= lo)
        return 0.0;
    const double x = deg2rad(std::min(r.x1, 360.0));
    return x * (std::cos(deg2rad(lo)) - std::cos(deg2rad(hi))) / four_pi * 100.0;
}

// ---------------------------------------------------------------------------------------------------------------

enum class BlockageVariant
{
    model1,     // flat 30 dB
    model2,     // i.i.d. Normal(15.3, 3.8) dB per direction
    model2_mean // flat 15.3 dB
};

inline const char *to_string(BlockageVariant v)
{
    switch (v)
    {
    case BlockageVariant::model1:
        return "1";
    case BlockageVariant::model2:
        return "2";
    default:
        return "2-mean";
    }
}

inline BlockageVariant parse_blockage_variant(const std::string &s)
{
    if (s == "1" || s == "model1")
        return BlockageVariant::model1;
    if (s == "2" || s == "model2")
        return BlockageVariant::model2;
    if (s == "2-mean" || s == "model2-mean")
        return BlockageVariant::model2_mean;
    throw ConfigError("unknown blockage model '" + s + "' (expected 1, 2 or 2-mean)");
}

struct BlockageModel
{
    BlockageVariant variant = BlockageVariant::model1;
    double flat_loss_db = 30.0;
    double mean_db = 15.3;
    double sigma_db = 3.8;

    static BlockageModel model1() { return {BlockageVariant::model1}; }
    static BlockageModel model2() { return {BlockageVariant::model2}; }
    static BlockageModel model2_mean() { return {BlockageVariant::model2_mean}; }
};

/// splitmix64 finalizer; decorrelates (seed, counter) keys.
inline std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t keyed_seed(std::uint64_t seed, std::uint64_t counter) noexcept
{
    return mix64(mix64(seed) ^ (counter * 0xd1342543de82ef95ULL + 1));
}

/// Loss in dB for direction index `cell`. Model 2 draws depend only on (seed, cell), so any evaluation order
/// gives the same map. Draws are not clamped at 0 dB.
inline double blockage_loss_db(const BlockageModel &m, std::optional<std::uint64_t> seed, std::uint64_t cell)
{
    switch (m.variant)
    {
    case BlockageVariant::model1:
        return m.flat_loss_db;
    case BlockageVariant::model2_mean:
        return m.mean_db;
    case BlockageVariant::model2: {
        if (!seed)
            throw ConfigError("blockage model 2 requires a seed");
        std::mt19937_64 gen(keyed_seed(*seed, cell));
        std::normal_distribution<double> dist(m.mean_db, m.sigma_db);
        return dist(gen);
    }
    }
    return 0.0;
}

/// Attenuates every blocked cell of the map (all components alike); cells outside the region are untouched.
inline GainMap apply_blockage(const GainMap &map, const BlockageRegion &region, const BlockageModel &model,
                              std::optional<std::uint64_t> seed = std::nullopt)
{
    map.validate();
    if (model.variant == BlockageVariant::model2 && !seed)
        throw ConfigError("apply_blockage: model 2 requires a seed");
    GainMap out = map;
    const auto &grid = *map.grid;
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!is_blocked(grid.point(i), region))
            continue;
        const double f = db_to_linear(-blockage_loss_db(model, seed, i));
        out.total[i] *= f;
        if (out.has_components())
        {
            out.theta[i] *= f;
            out.phi[i] *= f;
        }
    }
    return out;
}

} // namespace sphcov
