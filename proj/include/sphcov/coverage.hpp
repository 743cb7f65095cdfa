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
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "gain_map.hpp"

namespace sphcov
{

/**
 * Solid-angle weighted distribution of gain over the sphere, stored as an exact right-continuous step
 * function: F(gain_db[k]) = fraction[k], F is constant between steps, 0 below the first and 1 from the last.
 */
struct CoverageCdf
{
    std::vector<double> gain_db;  // strictly increasing
    std::vector<double> fraction; // nondecreasing, last is exactly 1

    std::string design, scheme, blockage = "none", metric = "total";

    std::string label() const
    {
        std::string l = design.empty() ? "run" : design;
        if (!scheme.empty())
            l += "-" + scheme;
        if (!blockage.empty() && blockage != "none")
            l += "-" + blockage;
        return l;
    }

    /// F(alpha): solid-angle share with gain <= alpha (dB).
    double operator()(double alpha_db) const
    {
        const auto it = std::upper_bound(gain_db.begin(), gain_db.end(), alpha_db);
        if (it == gain_db.begin())
            return 0.0;
        return fraction[static_cast<std::size_t>(it - gain_db.begin()) - 1];
    }
};

/// Discretized F(alpha) = (1 / 4 pi) * integral of 1{G <= alpha} sin(theta) dtheta dphi.
/// Normalizes by the grid's weight sum (4 pi to rounding) so F reaches 1 exactly.
inline CoverageCdf spherical_cdf(const GainMap &map)
{
    map.validate();
    const auto &grid = *map.grid;
    const std::size_t n = grid.size();
    std::vector<double> db(n);
    for (std::size_t i = 0; i < n; ++i)
        db[i] = linear_to_db(map.total[i]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return db[a] < db[b]; });

    CoverageCdf cdf;
    cdf.design = map.design;
    cdf.scheme = map.scheme;
    cdf.blockage = map.blockage;
    cdf.metric = map.metric;
    const double total = grid.total_weight();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
    {
        const std::size_t i = order[k];
        acc += grid.weight(i);
        if (k + 1 < n && db[order[k + 1]] == db[i])
            continue;
        cdf.gain_db.push_back(db[i]);
        cdf.fraction.push_back(std::min(acc / total, 1.0));
    }
    if (!cdf.fraction.empty())
        cdf.fraction.back() = 1.0;
    return cdf;
}

/// Smallest gain (dB) g with F(g) >= p, for 0 < p < 1. p is a CDF value: percentile(cdf, 0.3) is the gain that
/// 70% of the sphere meets or exceeds.
inline double percentile(const CoverageCdf &cdf, double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("percentile: p must lie in (0, 1)");
    if (cdf.fraction.empty())
        throw ConfigError("percentile: empty CDF");
    const auto it = std::lower_bound(cdf.fraction.begin(), cdf.fraction.end(), p);
    const auto k = it == cdf.fraction.end() ? cdf.fraction.size() - 1
                                            : static_cast<std::size_t>(it - cdf.fraction.begin());
    return cdf.gain_db[k];
}

struct ComparisonRow
{
    double percentile; // CDF value in (0, 1)
    std::vector<double> gain_db;
    std::vector<double> delta_db; // gain_db[0] - gain_db[k], k >= 1
};

struct Crossover
{
    std::size_t against; // index of the compared CDF
    double percentile;   // first percentile row with the new sign
};

struct ComparisonTable
{
    std::vector<std::string> labels;
    std::vector<ComparisonRow> rows;
    std::vector<Crossover> crossovers;
};

/// Head-to-head gains at the 5th..95th percentiles (5% steps) with deltas against the first CDF and the
/// percentiles where the sign of a delta flips.
inline ComparisonTable compare(const std::vector<CoverageCdf> &cdfs)
{
    if (cdfs.size() < 2)
        throw ConfigError("compare: need at least two CDFs");
    for (const auto &c : cdfs)
        if (c.metric != cdfs.front().metric)
            throw ConfigError("compare: mismatched metrics '" + cdfs.front().metric + "' and '" + c.metric + "'");

    ComparisonTable t;
    for (const auto &c : cdfs)
        t.labels.push_back(c.label());
    for (int pct = 5; pct <= 95; pct += 5)
    {
        ComparisonRow r{pct / 100.0, {}, {}};
        for (const auto &c : cdfs)
            r.gain_db.push_back(percentile(c, r.percentile));
        for (std::size_t k = 1; k < cdfs.size(); ++k)
            r.delta_db.push_back(r.gain_db[0] - r.gain_db[k]);
        t.rows.push_back(std::move(r));
    }
    for (std::size_t k = 1; k < cdfs.size(); ++k)
    {
        int last_sign = 0;
        for (const auto &r : t.rows)
        {
            const double d = r.delta_db[k - 1];
            const int sign = d > 1e-12 ? 1 : (d < -1e-12 ? -1 : 0);
            if (sign != 0 && last_sign != 0 && sign != last_sign)
                t.crossovers.push_back({k, r.percentile});
            if (sign != 0)
                last_sign = sign;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------------------------------------------
// CSV

inline void write_cdf_csv(const CoverageCdf &cdf, std::ostream &os)
{
    char buf[96];
    os << "gain_db,cdf_fraction\n";
    for (std::size_t k = 0; k < cdf.gain_db.size(); ++k)
    {
        std::snprintf(buf, sizeof buf, "%.6f,%.10f\n", cdf.gain_db[k], cdf.fraction[k]);
        os << buf;
    }
}

/// Two CDFs: `percentile,design_a_db,design_b_db,delta_db`. More: one gain column per CDF followed by
/// delta columns against the first.
inline void write_comparison_csv(const ComparisonTable &t, std::ostream &os)
{
    char buf[64];
    if (t.labels.size() == 2)
        os << "percentile,design_a_db,design_b_db,delta_db\n";
    else
    {
        os << "percentile";
        for (const auto &l : t.labels)
            os << ',' << l << "_db";
        for (std::size_t k = 1; k < t.labels.size(); ++k)
            os << ",delta_" << t.labels[k] << "_db";
        os << '\n';
    }
    for (const auto &r : t.rows)
    {
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(std::lround(r.percentile * 100.0)));
        os << buf;
        for (double g : r.gain_db)
        {
            std::snprintf(buf, sizeof buf, ",%.6f", g);
            os << buf;
        }
        for (double d : r.delta_db)
        {
            std::snprintf(buf, sizeof buf, ",%.6f", d);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace sphcov
