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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "sphcov/sphcov.hpp"

using namespace sphcov;
using Catch::Matchers::WithinAbs;

namespace
{
// independent closed form: 20 log10(4 pi f / c) + 10 ple log10(d)
double pl_oracle(double d, double ple, double f = 28e9)
{
    return 20.0 * std::log10(4.0 * M_PI * f / 299792458.0) + 10.0 * ple * std::log10(d);
}

UeDesign ideal_design(const GridPtr &grid)
{
    SubarraySpec s = presets::patch("ideal4x1", Polarization::theta, presets::py, {presets::px}, {4}, {}, 0.0, {4}, 30.0);
    s.kind = ElementKind::ideal;
    return realize_design({"ideal", {{"front", {s}}}}, grid);
}

const UeDesign &face_design()
{
    static const UeDesign d = build_design("face", make_grid(5.0, 5.0));
    return d;
}
const Codebook &face_codebook()
{
    static const Codebook cb = generate_design_codebook(face_design());
    return cb;
}
} // namespace

TEST_CASE("path_loss", "[sls]")
{
    CHECK_THAT(path_loss(1.0, 3.46, 28e9), WithinAbs(61.3909, 1e-4));
    CHECK_THAT(path_loss(1.0, 3.46, 28e9), WithinAbs(pl_oracle(1.0, 3.46), 1e-12));
    CHECK_THAT(path_loss(30.0, 3.46, 28e9), WithinAbs(112.4993, 1e-4));
    CHECK_THAT(path_loss(10.0, 2.0, 28e9) - path_loss(1.0, 2.0, 28e9), WithinAbs(20.0, 1e-12));
    CHECK_THROWS_AS(path_loss(0.5, 3.46, 28e9), ConfigError);
    CHECK_THAT(LinkBudget{}.noise_dbm(), WithinAbs(-84.0, 1e-12));
}

TEST_CASE("draw_channel", "[sls]")
{
    const LinkBudget b;
    const auto a = draw_channel(b, 5);
    const auto a2 = draw_channel(b, 5);
    REQUIRE(a.clusters.size() == 4);
    CHECK(a.shadow_db == a2.shadow_db);
    double total = 0.0;
    for (std::size_t c = 0; c < 4; ++c)
    {
        CHECK(a.clusters[c].amplitude == a2.clusters[c].amplitude);
        CHECK(a.clusters[c].aoa == a2.clusters[c].aoa);
        total += std::norm(a.clusters[c].amplitude);
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
    CHECK(draw_channel(b, 6).shadow_db != a.shadow_db);

    double sum = 0.0, sq = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k)
    {
        const auto ch = draw_channel(b, static_cast<std::uint64_t>(k));
        sum += ch.shadow_db;
        sq += ch.shadow_db * ch.shadow_db;
        for (const auto &cl : ch.clusters)
        {
            const double az = cl.aod.phi() > 180.0 ? cl.aod.phi() - 360.0 : cl.aod.phi();
            CHECK(std::abs(az) <= 60.0);
            CHECK(std::abs(90.0 - cl.aod.theta()) <= 15.0);
        }
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 0.3);
    CHECK_THAT(std::sqrt(sq / n - mean * mean), WithinAbs(8.31, 0.2));
}

TEST_CASE("BS DFT codebook", "[sls]")
{
    const BsArray bs;
    REQUIRE(bs.beams.size() == 16);
    for (std::size_t k = 0; k < 16; ++k)
    {
        const double u = (2.0 * double(k) + 1.0 - 16.0) / 16.0;
        const Direction center(90.0, rad2deg(std::asin(u)));
        CHECK_THAT(bs.gain(k, center), WithinAbs(1.0, 1e-12));
        for (std::size_t j = 0; j < 16; ++j) // orthogonal beams
            if (j != k)
                CHECK(bs.gain(j, center) < 1e-20);
    }
}

TEST_CASE("single-cluster link matches the closed form", "[sls]")
{
    const auto grid = make_grid(5.0, 5.0);
    const auto d = ideal_design(grid);
    const auto &sub = *d.subarrays()[0];
    const auto targets = beam_targets(sub.spec());
    Codebook cb{"ideal", {}};
    for (const auto &t : targets)
        cb.beams.push_back(steering_beam(sub, t, 20));

    const LinkBudget budget;
    ChannelRealization ch;
    const Direction aod(90.0, rad2deg(std::asin(5.0 / 16.0))); // center of BS beam 10
    ch.clusters.push_back({targets[2], aod, cplx(1.0, 0.0)});
    const auto r = spectral_efficiency(d, cb, BsArray{}, ch, budget);
    REQUIRE(r.layers.size() == 1);
    const double snr = 45.0 - pl_oracle(30.0, 3.46) - (-174.0 + 80.0 + 10.0);
    CHECK_THAT(snr, WithinAbs(16.5007, 1e-4));
    CHECK_THAT(r.best.snr_db, WithinAbs(snr, 0.01));
    CHECK(r.best.bs_beam == 10);
    CHECK(r.best.ue_beam == 2);
    CHECK_THAT(r.se_per_layer, WithinAbs(std::log2(1.0 + std::pow(10.0, snr / 10.0)), 1e-3));

    auto weak = budget;
    weak.eirp_dbm = 0.0;
    const auto low = spectral_efficiency(d, cb, BsArray{}, ch, weak);
    CHECK(low.best.snr_db < -10.0);
    CHECK(low.se_per_layer >= 0.0);
    CHECK_THAT(low.se_per_layer, WithinAbs(std::pow(10.0, low.best.snr_db / 10.0) / std::log(2.0), 0.01));

    auto high = budget;
    high.eirp_dbm = 90.0;
    CHECK(spectral_efficiency(d, cb, BsArray{}, ch, high).se_per_layer == 7.4);
}

TEST_CASE("polarization groups pair the dual-polarized feeds", "[sls]")
{
    const auto grid = make_grid(10.0, 10.0);
    CHECK(polarization_groups(build_design("face", grid)).size() == 6);
    CHECK(polarization_groups(build_design("edge", grid)).size() == 3);
    const auto d3 = build_design("design3", grid);
    for (const auto &g : polarization_groups(d3))
    {
        if (g.size() == 2)
            CHECK(d3.subarrays()[g[0]]->feed() != d3.subarrays()[g[1]]->feed());
        else
            CHECK(d3.subarrays()[g[0]]->kind() == ElementKind::dipole);
    }
}

TEST_CASE("SE is monotone in EIRP, noise figure and distance", "[sls][property]")
{
    const BsArray bs;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u})
    {
        const LinkBudget base;
        const auto ch = draw_channel(base, seed);
        auto se = [&](LinkBudget b) { return spectral_efficiency(face_design(), face_codebook(), bs, ch, b).se_per_layer; };
        double prev = -1.0;
        for (double eirp = 20.0; eirp <= 70.0; eirp += 5.0)
        {
            auto b = base;
            b.eirp_dbm = eirp;
            const double v = se(b);
            CHECK(v >= prev);
            prev = v;
        }
        prev = 1e9;
        for (double nf = 0.0; nf <= 20.0; nf += 2.5)
        {
            auto b = base;
            b.noise_figure_db = nf;
            const double v = se(b);
            CHECK(v <= prev);
            prev = v;
        }
        prev = 1e9;
        for (double dist : {1.0, 5.0, 10.0, 30.0, 60.0, 120.0, 250.0})
        {
            auto b = base;
            b.distance_m = dist;
            const double v = se(b);
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("beam search ignores cluster order and global phase", "[sls][property]")
{
    const BsArray bs;
    const LinkBudget b;
    for (std::uint64_t seed = 10; seed < 30; ++seed)
    {
        const auto ch = draw_channel(b, seed);
        auto turned = ch;
        std::reverse(turned.clusters.begin(), turned.clusters.end());
        for (auto &cl : turned.clusters)
            cl.amplitude *= std::polar(1.0, 1.234);
        const auto r1 = spectral_efficiency(face_design(), face_codebook(), bs, ch, b);
        const auto r2 = spectral_efficiency(face_design(), face_codebook(), bs, turned, b);
        CHECK_THAT(r2.se_per_layer, WithinAbs(r1.se_per_layer, 1e-9));
        CHECK_THAT(r2.best.snr_db, WithinAbs(r1.best.snr_db, 1e-9));
        CHECK(r2.best.bs_beam == r1.best.bs_beam);
        CHECK(r2.best.ue_beam == r1.best.ue_beam);
    }
}

TEST_CASE("per-direction MRC bounds the codebook SE", "[sls][property]")
{
    const BsArray bs;
    const LinkBudget b;
    const auto grid = make_grid(5.0, 5.0);
    for (const auto &name : builtin_design_names())
    {
        const auto d = build_design(name, grid);
        const auto cb = generate_design_codebook(d);
        LinkOptions mrc;
        mrc.ue = UeCombining::mrc;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            const auto ch = draw_channel(b, seed);
            CHECK(spectral_efficiency(d, cb, bs, ch, b, mrc).se_per_layer >=
                  spectral_efficiency(d, cb, bs, ch, b).se_per_layer - 1e-12);
        }
    }
}

TEST_CASE("SLS errors", "[sls]")
{
    const LinkBudget b;
    const auto ch = draw_channel(b, 1);
    CHECK_THROWS_AS(spectral_efficiency(face_design(), Codebook{"face", {}}, BsArray{}, ch, b), ConfigError);
    BsArray empty;
    empty.beams.clear();
    CHECK_THROWS_AS(spectral_efficiency(face_design(), face_codebook(), empty, ch, b), ConfigError);
    CHECK_THROWS_AS(make_bs_codebook(16, 4, 0), ConfigError);
}

TEST_CASE("drops are reproducible and blockage lowers SE", "[sls]")
{
    const LinkBudget b;
    const auto a = run_drops(face_design(), face_codebook(), b, 40, 77);
    const auto a2 = run_drops(face_design(), face_codebook(), b, 40, 77);
    std::ostringstream s1, s2;
    write_drops_csv(a, s1);
    write_drops_csv(a2, s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind("drop,seed,bs_beam,ue_beam,snr_db,se_bps_hz\n0,", 0) == 0);

    LinkOptions blocked;
    blocked.blockage = BlockageRegion::portrait();
    const auto c = run_drops(face_design(), face_codebook(), b, 40, 77, blocked);
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        CHECK(c[k].seed == a[k].seed);
        CHECK(c[k].link.se_per_layer <= a[k].link.se_per_layer + 1e-12);
    }
}
