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
#include <map>
#include <random>
#include <sstream>

#include "sphcov/beamforming.hpp"

using namespace sphcov;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
double phase_error(cplx a, cplx b) { return std::abs(std::arg(a * std::conj(b))); }

UeDesign ideal_4x1(const GridPtr &grid)
{
    SubarraySpec s = presets::patch("ideal4x1", Polarization::theta, presets::py, {presets::px}, {4}, {}, 0.0, {4}, 30.0);
    s.kind = ElementKind::ideal;
    return realize_design({"ideal", {{"front", {s}}}}, grid);
}

bool on_phase_grid(cplx w, int bits)
{
    const double step = 2.0 * pi / double(1 << bits);
    const double k = std::arg(w) / step;
    return std::abs(k - std::round(k)) < 1e-9;
}
} // namespace

TEST_CASE("quantize_phase", "[codebook]")
{
    std::vector<cplx> on_grid{std::polar(0.5, 0.0), std::polar(0.5, pi / 2), std::polar(0.5, -pi / 4),
                              std::polar(0.5, 3 * pi / 8)};
    const auto q = quantize_phase(on_grid, 4);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(std::abs(q[i] - on_grid[i]) < 1e-15);

    const auto one = quantize_phase(std::vector<cplx>{std::polar(1.0, pi / 2 - 1e-6)}, 1);
    CHECK_THAT(one[0].real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(one[0].imag(), WithinAbs(0.0, 1e-15));

    std::mt19937_64 gen(4);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<cplx> w(6);
        for (auto &x : w)
            x = {g(gen), g(gen)};
        const double n = std::sqrt(squared_norm(w));
        for (auto &x : w)
            x /= n;
        const auto wq = quantize_phase(w, 5);
        CHECK_THAT(squared_norm(wq), WithinAbs(1.0, 1e-12));
        for (std::size_t i = 0; i < w.size(); ++i)
        {
            CHECK(phase_error(wq[i], w[i]) <= pi / 32 + 1e-12);
            CHECK_THAT(std::abs(wq[i]), WithinRel(std::abs(w[i]), 1e-12));
            CHECK(on_phase_grid(wq[i], 5));
        }
    }
    CHECK_THROWS_AS(quantize_phase(on_grid, 0), ConfigError);
}

TEST_CASE("steering_beam on an ideal 4x1 array", "[codebook]")
{
    const auto grid = make_grid(5.0, 5.0);
    const auto d = ideal_4x1(grid);
    const auto &sub = *d.subarrays()[0];

    const auto b0 = steering_beam(sub, sub.boresight(), 5);
    for (const auto &w : b0.weights)
    {
        CHECK_THAT(w.real(), WithinAbs(0.5, 1e-15));
        CHECK_THAT(w.imag(), WithinAbs(0.0, 1e-15));
    }

    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> t(0.0, 180.0), p(0.0, 360.0);
    const double bound_db = -10.0 * std::log10(std::pow(std::cos(pi / 32), 2));
    for (int trial = 0; trial < 200; ++trial)
    {
        const Direction target(t(gen), p(gen));
        const auto r = sub.responses_at(target, Polarization::theta);
        const auto fine = steering_beam(sub, target, 20);
        CHECK_THAT(beam_gain(fine.weights, r), WithinRel(egc_gain(r), 1e-9));

        const auto coarse = steering_beam(sub, target, 5);
        // per-element error within pi/32 of a common (irrelevant) phase offset
        std::vector<double> err;
        for (std::size_t i = 0; i < 4; ++i)
            err.push_back(std::arg(coarse.weights[i] * std::conj(fine.weights[i]) *
                                   std::conj(coarse.weights[0] * std::conj(fine.weights[0]))));
        const auto [lo, hi] = std::minmax_element(err.begin(), err.end());
        CHECK(*hi - *lo <= pi / 16 + 1e-6);
        const double loss_db = linear_to_db(egc_gain(r)) - linear_to_db(beam_gain(coarse.weights, r));
        CHECK(loss_db >= -1e-12);
        CHECK(loss_db <= bound_db + 1e-9);
        CHECK(loss_db <= 0.05);
    }
}

TEST_CASE("design codebook sizes", "[codebook]")
{
    const auto grid = make_grid(5.0, 5.0);
    struct Expect
    {
        const char *name;
        std::size_t total, per_module;
    };
    for (const auto &e : {Expect{"face", 24, 12}, Expect{"edge", 24, 8}, Expect{"design3", 48, 12},
                          Expect{"design4", 48, 12}})
    {
        const auto d = build_design(e.name, grid);
        const auto cb = generate_design_codebook(d);
        CHECK(cb.size() == e.total);
        std::map<std::size_t, std::size_t> per_module;
        for (const auto &b : cb.beams)
        {
            const auto *s = d.subarrays()[b.subarray_id];
            ++per_module[s->module()];
            CHECK(b.feed == s->feed());
            CHECK(b.weights.size() == s->size());
            for (const auto &w : b.weights)
            {
                CHECK_THAT(std::abs(w), WithinRel(1.0 / std::sqrt(double(s->size())), 1e-12));
                CHECK(on_phase_grid(w, 5));
            }
        }
        for (const auto &[m, n] : per_module)
            CHECK(n == e.per_module);
    }
}

TEST_CASE("face codebook: 4 beams per patch feed, 2 per dipole", "[codebook]")
{
    const auto grid = make_grid(5.0, 5.0);
    const auto d = build_design("face", grid);
    const auto cb = generate_design_codebook(d);
    std::map<std::size_t, std::size_t> per_sub;
    for (const auto &b : cb.beams)
        ++per_sub[b.subarray_id];
    for (const auto *s : d.subarrays())
        CHECK(per_sub[s->id()] == (s->kind() == ElementKind::patch ? 4u : 2u));
}

TEST_CASE("beam targets are symmetric about the boresight", "[codebook]")
{
    const auto spec = preset_design_spec("edge").modules[0].subarrays[0]; // +x, scanning along z
    const auto t = beam_targets(spec);
    REQUIRE(t.size() == 4);
    const Direction bore = direction_from_vector(spec.boresight);
    CHECK_THAT(angular_distance(t[0], bore), WithinAbs(45.0, 1e-9));
    CHECK_THAT(angular_distance(t[1], bore), WithinAbs(15.0, 1e-9));
    CHECK_THAT(angular_distance(t[2], bore), WithinAbs(15.0, 1e-9));
    CHECK_THAT(angular_distance(t[3], bore), WithinAbs(45.0, 1e-9));
    CHECK_THAT(angular_distance(t[0], t[1]), WithinAbs(30.0, 1e-9));

    const auto face_patch = preset_design_spec("face").modules[0].subarrays[0];
    const auto q = beam_targets(face_patch);
    REQUIRE(q.size() == 4);
    for (const auto &d : q) // (+-27.5, +-27.5) in two planes
        CHECK_THAT(angular_distance(d, direction_from_vector(face_patch.boresight)),
                   WithinAbs(rad2deg(std::atan(std::sqrt(2.0) * std::tan(deg2rad(27.5)))), 1e-9));
}

TEST_CASE("beamforming gain at each beam's target does not drop as phase bits increase", "[codebook][property]")
{
    const auto grid = make_grid(5.0, 5.0);
    for (const auto &name : builtin_design_names())
    {
        const auto d = build_design(name, grid);
        for (const auto *s : d.subarrays())
            for (const auto &target : beam_targets(s->spec()))
            {
                const auto r = s->responses_at(target, s->feed());
                double prev = 0.0;
                for (int bits = 1; bits <= 10; ++bits)
                {
                    const double g = beam_gain(steering_beam(*s, target, bits).weights, r);
                    CHECK(g >= prev * (1.0 - 1e-12));
                    prev = g;
                }
            }
    }
}

TEST_CASE("edge codebook tracks EGC over the subarray coverage regions", "[codebook][property]")
{
    const auto grid = make_grid(1.0, 1.0);
    const auto d = build_design("edge", grid);
    const auto cb = generate_design_codebook(d);
    const auto egc = evaluate_design(d, Scheme::egc);
    const auto cbk = evaluate_design(d, Scheme::cbk, cb);

    // union over subarrays of {EGC gain of that subarray within 3 dB of its own peak}
    std::vector<char> in_region(grid->size(), 0);
    for (const auto *s : d.subarrays())
    {
        std::vector<double> g(grid->size());
        std::vector<cplx> r;
        double peak = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i)
        {
            r.clear();
            for (std::size_t e = 0; e < s->size(); ++e)
                r.push_back(s->response(e, i, s->feed()));
            g[i] = egc_gain(r);
            peak = std::max(peak, g[i]);
        }
        for (std::size_t i = 0; i < grid->size(); ++i)
            in_region[i] |= g[i] >= 0.5 * peak;
    }
    double region = 0.0, good = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
    {
        if (!in_region[i])
            continue;
        region += grid->weight(i);
        for (auto [e, c] : {std::pair{egc.theta[i], cbk.theta[i]}, std::pair{egc.phi[i], cbk.phi[i]}})
            if (e > 0.0 && c >= 0.5 * e)
                good += 0.5 * grid->weight(i);
    }
    CHECK(good / region >= 0.95);
}

TEST_CASE("beam management overheads", "[codebook]")
{
    const auto grid = make_grid(10.0, 10.0);
    const auto face = build_design("face", grid);
    const auto edge = build_design("edge", grid);
    CHECK(acquisition_overhead(face) == 80.0);
    CHECK(acquisition_overhead(edge) == 60.0);
    CHECK(acquisition_overhead(face, 10.0) == 40.0);
    CHECK_THROWS_AS(acquisition_overhead(face, 0.0), ConfigError);

    CHECK(refinement_overhead(4, RefinementMode::csirs) == 0.5);
    CHECK(refinement_overhead(4, RefinementMode::ssb) == 80.0);
    CHECK(refinement_overhead(1, RefinementMode::csirs) == 0.25);
    CHECK_THAT(refinement_symbol_time(4), WithinAbs(16.0 * 0.25 / 14.0, 1e-15));
    CHECK(refinement_symbol_time(4) < 0.5);
    CHECK_THROWS_AS(refinement_overhead(0), ConfigError);
}

TEST_CASE("codebook text format", "[codebook][io]")
{
    const auto grid = make_grid(10.0, 10.0);
    const auto cb = generate_design_codebook(build_design("face", grid));
    std::stringstream ss;
    save_codebook(cb, ss);
    const auto back = load_codebook(ss, "face");
    REQUIRE(back.size() == cb.size());
    for (std::size_t j = 0; j < cb.size(); ++j)
    {
        CHECK(back.beams[j].subarray_id == cb.beams[j].subarray_id);
        CHECK(back.beams[j].feed == cb.beams[j].feed);
        CHECK(angular_distance(back.beams[j].boresight, cb.beams[j].boresight) < 1e-9);
        CHECK(back.beams[j].weights == cb.beams[j].weights);
    }

    std::stringstream bad1("0,theta,90,0,1,0,1,0\n");
    CHECK_THROWS_WITH(load_codebook(bad1), ContainsSubstring("unit norm"));
    std::stringstream bad2("0,theta,90,0,1\n");
    CHECK_THROWS_AS(load_codebook(bad2), ParseError);
    std::stringstream bad3("\n0,circular,90,0,1,0\n");
    try
    {
        load_codebook(bad3);
        FAIL("expected ParseError");
    }
    catch (const ParseError &e)
    {
        CHECK(e.line() == 2);
    }
}
