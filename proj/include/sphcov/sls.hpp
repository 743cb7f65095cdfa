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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "beamforming.hpp"
#include "blockage.hpp"

namespace sphcov
{

inline constexpr double speed_of_light = 299792458.0;

/// Single-link parameters; defaults are the indoor 28 GHz scenario.
struct LinkBudget
{
    double eirp_dbm = 45.0;
    double bandwidth_hz = 100e6;
    double noise_figure_db = 10.0;
    double ple = 3.46;
    double shadow_sigma_db = 8.31;
    double distance_m = 30.0;
    double carrier_hz = 28e9;
    std::size_t num_clusters = 4;
    double bs_sector_azimuth_deg = 120.0;
    double bs_sector_elevation_deg = 30.0;
    double se_cap_bps_hz = 7.4;

    /// Thermal noise over the band plus noise figure, dBm.
    double noise_dbm() const { return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db; }
};

/// Close-in model: FSPL at 1 m plus 10 * ple * log10(d).
inline double path_loss(double distance_m, double ple, double carrier_hz)
{
    if (!(distance_m >= 1.0))
        throw ConfigError("path_loss: distance must be at least 1 m");
    if (!(carrier_hz > 0.0))
        throw ConfigError("path_loss: carrier must be positive");
    const double lambda = speed_of_light / carrier_hz;
    return 20.0 * std::log10(4.0 * pi / lambda) + 10.0 * ple * std::log10(distance_m);
}

struct Cluster
{
    Direction aoa; // at the UE, chassis frame
    Direction aod; // at the base-station, array frame (boresight +x)
    cplx amplitude;
    double pol_phase_theta = 0.0; // radians
    double pol_phase_phi = 0.0;
};

struct ChannelRealization
{
    std::vector<Cluster> clusters;
    double shadow_db = 0.0;
};

/// Random clusters: AoD uniform in the BS sector, AoA uniform on the sphere, exponential powers normalized to
/// sum 1, shadowing Normal(0, sigma).
inline ChannelRealization draw_channel(const LinkBudget &b, std::uint64_t seed)
{
    std::mt19937_64 gen(keyed_seed(seed, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> shadow(0.0, b.shadow_sigma_db);

    ChannelRealization ch;
    double total = 0.0;
    for (std::size_t c = 0; c < b.num_clusters; ++c)
    {
        const double az = (u01(gen) - 0.5) * b.bs_sector_azimuth_deg;
        const double el = (u01(gen) - 0.5) * b.bs_sector_elevation_deg;
        const double cos_t = 2.0 * u01(gen) - 1.0;
        const double phi = 360.0 * u01(gen);
        const double p = expo(gen);
        const double phase = 2.0 * pi * u01(gen);
        Cluster cl{Direction(rad2deg(std::acos(cos_t)), phi), Direction(90.0 - el, az), std::polar(std::sqrt(p), phase),
                   2.0 * pi * u01(gen), 2.0 * pi * u01(gen)};
        ch.clusters.push_back(cl);
        total += p;
    }
    for (auto &cl : ch.clusters)
        cl.amplitude /= std::sqrt(total);
    ch.shadow_db = shadow(gen);
    return ch;
}

/// Orthogonal DFT beams of a (1 x ny x nz) base-station array (boresight +x): `count` azimuth beams at
/// sin(az) = (2k + 1 - count) / count, no elevation steering.
inline std::vector<std::vector<cplx>> make_bs_codebook(std::size_t ny = 16, std::size_t nz = 4, std::size_t count = 16)
{
    if (count == 0 || ny == 0 || nz == 0)
        throw ConfigError("make_bs_codebook: empty array or codebook");
    const ArrayDims dims{1, ny, nz};
    std::vector<std::vector<cplx>> beams;
    for (std::size_t k = 0; k < count; ++k)
    {
        const double u = (2.0 * k + 1.0 - static_cast<double>(count)) / static_cast<double>(count);
        const Direction target(90.0, rad2deg(std::asin(u)));
        std::vector<cplx> w;
        for (std::size_t n = 1; n <= dims.count(); ++n)
            w.push_back(ideal_array_response(dims, n, target).e_theta);
        beams.push_back(std::move(w));
    }
    return beams;
}

struct BsArray
{
    std::size_t ny = 16, nz = 4;
    std::vector<std::vector<cplx>> beams = make_bs_codebook(16, 4, 16);

    /// Normalized array gain (peak 1) of beam b toward d.
    double gain(std::size_t b, const Direction &d) const
    {
        const ArrayDims dims{1, ny, nz};
        cplx acc{};
        for (std::size_t n = 1; n <= dims.count(); ++n)
            acc += std::conj(beams[b][n - 1]) * ideal_array_response(dims, n, d).e_theta;
        return std::norm(acc);
    }
};

enum class UeCombining
{
    codebook,
    mrc // per-direction best-subarray MRC; an upper bound for any codebook
};

struct LinkOptions
{
    UeCombining ue = UeCombining::codebook;
    std::optional<BlockageRegion> blockage;
    BlockageModel blockage_model;
    std::uint64_t blockage_seed = 0;
};

struct LayerResult
{
    std::ptrdiff_t subarray = -1;
    Polarization feed = Polarization::theta;
    std::ptrdiff_t bs_beam = -1;
    std::ptrdiff_t ue_beam = -1; // -1 with MRC combining
    double snr_db = -400.0;
    double se_bps_hz = 0.0;
};

struct LinkResult
{
    std::vector<LayerResult> layers; // the feeds of the selected UE subarray, one layer each
    LayerResult best;                // strongest layer
    double se_per_layer = 0.0;       // mean over layers
};

inline double capped_se(double snr_db, double cap)
{
    return std::min(std::log2(1.0 + std::pow(10.0, snr_db / 10.0)), cap);
}

/// Dual-polarized pairs: subarrays of one module sharing element positions and boresight with opposite feeds.
/// Unpaired subarrays form singleton groups. Groups are ordered by their first member.
inline std::vector<std::vector<std::size_t>> polarization_groups(const UeDesign &design)
{
    const auto &subs = design.subarrays();
    std::vector<char> used(subs.size(), 0);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < subs.size(); ++i)
    {
        if (used[i])
            continue;
        used[i] = 1;
        std::vector<std::size_t> g{i};
        for (std::size_t j = i + 1; j < subs.size(); ++j)
        {
            const auto *a = subs[i];
            const auto *b = subs[j];
            if (used[j] || a->module() != b->module() || a->feed() == b->feed() ||
                a->positions() != b->positions() || angular_distance(a->boresight(), b->boresight()) > 1e-9)
                continue;
            used[j] = 1;
            g.push_back(j);
            break;
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

/**
 * Exhaustive search over (BS beam, UE subarray group). Each feed of the group is one layer, served by the UE
 * beam of that feed maximizing the received power summed over clusters, sum_c |a_c|^2 G_bs(b, aod_c)
 * G_ue(u, aoa_c). SNR = EIRP - PL - SF + 10 log10(power) - noise. The pair with the highest mean per-layer SE
 * wins; ties go to the higher total power, then to the lowest indices.
 */
inline LinkResult spectral_efficiency(const UeDesign &design, const Codebook &ue_codebook, const BsArray &bs,
                                      const ChannelRealization &ch, const LinkBudget &budget,
                                      const LinkOptions &opt = {})
{
    if (bs.beams.empty())
        throw ConfigError("spectral_efficiency: empty base-station codebook");
    if (opt.ue == UeCombining::codebook && ue_codebook.beams.empty())
        throw ConfigError("spectral_efficiency: empty UE codebook");
    if (opt.ue == UeCombining::codebook)
        detail::check_codebook(design, ue_codebook);

    const std::size_t nc = ch.clusters.size();
    std::vector<double> cluster_power(nc), block(nc, 1.0);
    for (std::size_t c = 0; c < nc; ++c)
    {
        cluster_power[c] = std::norm(ch.clusters[c].amplitude);
        if (opt.blockage && is_blocked(ch.clusters[c].aoa, *opt.blockage))
            block[c] = db_to_linear(-blockage_loss_db(opt.blockage_model, opt.blockage_seed, c));
    }

    // BS gains [beam][cluster]
    std::vector<std::vector<double>> g_bs(bs.beams.size(), std::vector<double>(nc));
    for (std::size_t b = 0; b < bs.beams.size(); ++b)
        for (std::size_t c = 0; c < nc; ++c)
            g_bs[b][c] = bs.gain(b, ch.clusters[c].aod);

    // UE candidates per subarray: gain per cluster (blockage included) and codebook index
    const auto &subs = design.subarrays();
    std::vector<std::vector<std::ptrdiff_t>> ids(subs.size());
    std::vector<std::vector<std::vector<double>>> g_ue(subs.size());
    for (std::size_t s = 0; s < subs.size(); ++s)
    {
        std::vector<std::vector<cplx>> resp(nc);
        for (std::size_t c = 0; c < nc; ++c)
            resp[c] = subs[s]->responses_at(ch.clusters[c].aoa, subs[s]->feed());
        if (opt.ue == UeCombining::mrc)
        {
            std::vector<double> g(nc);
            for (std::size_t c = 0; c < nc; ++c)
                g[c] = mrc_gain(resp[c]) * block[c];
            ids[s].push_back(-1);
            g_ue[s].push_back(std::move(g));
            continue;
        }
        for (std::size_t j = 0; j < ue_codebook.beams.size(); ++j)
        {
            const auto &beam = ue_codebook.beams[j];
            if (beam.subarray_id != s)
                continue;
            std::vector<double> g(nc);
            for (std::size_t c = 0; c < nc; ++c)
                g[c] = beam_gain(beam.weights, resp[c]) * block[c];
            ids[s].push_back(static_cast<std::ptrdiff_t>(j));
            g_ue[s].push_back(std::move(g));
        }
    }

    const double offset_db = budget.eirp_dbm - path_loss(budget.distance_m, budget.ple, budget.carrier_hz) -
                             ch.shadow_db - budget.noise_dbm();
    LinkResult out;
    double best_se = -1.0, best_power = -1.0;
    for (const auto &group : polarization_groups(design))
        for (std::size_t b = 0; b < bs.beams.size(); ++b)
        {
            std::vector<LayerResult> layers;
            double power_sum = 0.0, se_sum = 0.0;
            for (std::size_t s : group)
            {
                if (ids[s].empty())
                    continue;
                LayerResult layer;
                layer.subarray = static_cast<std::ptrdiff_t>(s);
                layer.feed = subs[s]->feed();
                layer.bs_beam = static_cast<std::ptrdiff_t>(b);
                double best = -1.0;
                for (std::size_t u = 0; u < ids[s].size(); ++u)
                {
                    double pw = 0.0;
                    for (std::size_t c = 0; c < nc; ++c)
                        pw += cluster_power[c] * g_bs[b][c] * g_ue[s][u][c];
                    if (pw > best)
                    {
                        best = pw;
                        layer.ue_beam = ids[s][u];
                    }
                }
                layer.snr_db = offset_db + linear_to_db(best);
                layer.se_bps_hz = capped_se(layer.snr_db, budget.se_cap_bps_hz);
                power_sum += best;
                se_sum += layer.se_bps_hz;
                layers.push_back(layer);
            }
            if (layers.empty())
                continue;
            const double se = se_sum / static_cast<double>(layers.size());
            if (se > best_se + 1e-12 || (se >= best_se - 1e-12 && power_sum > best_power))
            {
                best_se = se;
                best_power = power_sum;
                out.layers = std::move(layers);
            }
        }
    if (out.layers.empty())
        throw ConfigError("spectral_efficiency: no UE beams");
    out.best = out.layers.front();
    for (const auto &l : out.layers)
        if (l.snr_db > out.best.snr_db)
            out.best = l;
    out.se_per_layer = best_se;
    return out;
}

struct DropResult
{
    std::size_t drop;
    std::uint64_t seed;
    LinkResult link;
};

/// Independent drops; drop k uses seed keyed_seed(master_seed, k + 1).
inline std::vector<DropResult> run_drops(const UeDesign &design, const Codebook &ue_codebook, const LinkBudget &budget,
                                         std::size_t drops, std::uint64_t master_seed, LinkOptions opt = {})
{
    const BsArray bs;
    std::vector<DropResult> out;
    out.reserve(drops);
    for (std::size_t k = 0; k < drops; ++k)
    {
        const std::uint64_t s = keyed_seed(master_seed, k + 1);
        opt.blockage_seed = s;
        const auto ch = draw_channel(budget, s);
        out.push_back({k, s, spectral_efficiency(design, ue_codebook, bs, ch, budget, opt)});
    }
    return out;
}

/// `drop,seed,bs_beam,ue_beam,snr_db,se_bps_hz` with the strongest layer's beams and SNR and the per-layer SE.
inline void write_drops_csv(const std::vector<DropResult> &drops, std::ostream &os)
{
    char buf[160];
    os << "drop,seed,bs_beam,ue_beam,snr_db,se_bps_hz\n";
    for (const auto &d : drops)
    {
        std::snprintf(buf, sizeof buf, "%zu,%llu,%td,%td,%.6f,%.6f\n", d.drop, static_cast<unsigned long long>(d.seed),
                      d.link.best.bs_beam, d.link.best.ue_beam, d.link.best.snr_db, d.link.se_per_layer);
        os << buf;
    }
}

} // namespace sphcov
