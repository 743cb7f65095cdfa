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

#include <random>
#include <sstream>

#include "sphcov/design.hpp"

using namespace sphcov;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("ideal_array_response closed-form examples", "[antenna]")
{
    const auto r1 = ideal_array_response({2, 1, 1}, 1, {37.0, 123.0});
    CHECK_THAT(std::abs(r1.e_theta), WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    CHECK_THAT(std::arg(r1.e_theta), WithinAbs(0.0, 1e-15));
    CHECK(r1.e_theta == r1.e_phi);

    // exponent pi * 1 * sin90 cos0 = pi
    const auto r2 = ideal_array_response({2, 1, 1}, 2, {90.0, 0.0});
    CHECK_THAT(r2.e_theta.real(), WithinAbs(-1.0 / std::sqrt(2.0), 1e-12));
    CHECK_THAT(r2.e_theta.imag(), WithinAbs(0.0, 1e-12));

    // n = 3 -> n_x = 2; exponent pi * 2 * sin90 cos90 = 0
    const auto r3 = ideal_array_response({4, 1, 1}, 3, {90.0, 90.0});
    CHECK_THAT(r3.e_theta.real(), WithinAbs(0.5, 1e-12));
    CHECK_THAT(r3.e_theta.imag(), WithinAbs(0.0, 1e-12));

    CHECK_THROWS_AS(ideal_array_response({2, 2, 1}, 0, {0.0, 0.0}), std::out_of_range);
    CHECK_THROWS_AS(ideal_array_response({2, 2, 1}, 5, {0.0, 0.0}), std::out_of_range);
}

TEST_CASE("ideal element magnitudes are exactly 1/sqrt(N)", "[antenna][property]")
{
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_real_distribution<double> t(0.0, 180.0), p(0.0, 360.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ArrayDims dims{dim(gen), dim(gen), dim(gen)};
        const Direction d(t(gen), p(gen));
        for (std::size_t n = 1; n <= dims.count(); ++n)
        {
            const auto r = ideal_array_response(dims, n, d);
            CHECK_THAT(std::abs(r.e_theta), WithinRel(1.0 / std::sqrt(double(dims.count())), 1e-14));
            CHECK_THAT(std::abs(r.e_phi), WithinRel(1.0 / std::sqrt(double(dims.count())), 1e-14));
        }
    }
}

TEST_CASE("ideal_element_pattern agrees with the half-wave array formula", "[antenna]")
{
    const auto grid = make_grid(10.0, 10.0);
    const ArrayDims dims{2, 3, 2};
    const auto pos = half_wave_positions(dims);
    for (std::size_t n = 1; n <= dims.count(); ++n)
    {
        const auto pat = ideal_element_pattern(pos[n - 1], dims.count(), grid);
        for (std::size_t i = 0; i < grid->size(); i += 7)
        {
            const auto ref = ideal_array_response(dims, n, grid->point(i));
            CHECK(std::abs(pat[i].e_theta - ref.e_theta) < 1e-12);
        }
    }
}

TEST_CASE("synthetic element: boresight and half-power", "[antenna]")
{
    const auto grid = make_grid(1.0, 1.0);
    const Direction bore(90.0, 90.0);
    const SyntheticElement e{ElementKind::patch, bore, 5.8, 100.0, Polarization::theta, {}};
    CHECK_THAT(linear_to_db(e(bore).total_gain()), WithinAbs(5.8, 1e-12));
    CHECK(e(bore).e_phi == cplx{});

    // 50 degrees off boresight in any plane
    for (const Direction &d : {Direction(40.0, 90.0), Direction(90.0, 140.0), Direction(140.0, 90.0)})
        CHECK_THAT(linear_to_db(e(d).total_gain()), WithinAbs(5.8 + 10.0 * std::log10(0.5), 0.05));

    // back lobe floor
    CHECK_THAT(linear_to_db(e(Direction(90.0, 270.0)).total_gain()), WithinAbs(5.8 - 20.0, 1e-9));

    const auto pat = synthetic_element_pattern(ElementKind::patch, bore, 5.8, 100.0, grid);
    CHECK(linear_to_db(pat.peak_gain()) <= 5.8 + 1e-12);
    CHECK(linear_to_db(pat.peak_gain()) > 5.8 - 0.01);
    CHECK_THAT(linear_to_db(pat.response_at(bore).total_gain()), WithinAbs(5.8, 1e-12));

    CHECK_THROWS_AS(synthetic_element_pattern(ElementKind::patch, bore, 5.8, 180.0, grid), ConfigError);
    CHECK_THROWS_AS(synthetic_element_pattern(ElementKind::patch, bore, 5.8, 200.0, grid), ConfigError);
    CHECK_THROWS_AS(synthetic_element_pattern(ElementKind::patch, bore, -1.0, 90.0, grid), ConfigError);
}

TEST_CASE("matched beamwidth radiates 4 pi", "[antenna]")
{
    const auto grid = make_grid(0.5, 0.5);
    for (double g : {4.7, 5.5, 5.8, 8.0})
    {
        const double bw = matched_beamwidth(g);
        CHECK(bw > 60.0);
        CHECK(bw < 179.0);
        const auto pat = synthetic_element_pattern(ElementKind::patch, {0.0, 0.0}, g, bw, grid);
        CHECK_THAT(pat.radiated_power(), WithinRel(four_pi, 2e-3));
    }
    CHECK_THROWS_AS(matched_beamwidth(30.0), ConfigError);
}

TEST_CASE("rotating the boresight preserves radiated power", "[antenna][property]")
{
    const auto grid = make_grid(1.0, 1.0);
    const auto ref = synthetic_element_pattern(ElementKind::dipole, {0.0, 0.0}, 4.7, 90.0, grid).radiated_power();
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> t(0.0, 180.0), p(0.0, 360.0);
    for (int i = 0; i < 8; ++i)
    {
        const Direction b(t(gen), p(gen));
        const auto pw = synthetic_element_pattern(ElementKind::dipole, b, 4.7, 90.0, grid).radiated_power();
        CHECK(std::abs(pw - ref) / ref < 1e-3);
    }
}

TEST_CASE("pattern file: isotropic element", "[antenna][io]")
{
    const auto grid = make_grid(1.0, 1.0);
    std::stringstream ss;
    ss << "1,1\n";
    for (const auto &d : grid->points())
        ss << d.theta() << ',' << d.phi() << ",1,0,0,0\n";
    const auto pat = load_pattern_file(ss);
    CHECK(pat.samples().size() == 64800);
    CHECK(pat[1234].e_theta == cplx{1.0, 0.0});
    CHECK_THAT(pat.radiated_power(), WithinRel(four_pi, 1e-12));
}

namespace
{
std::string file_with_rows(double step, std::size_t skip_row)
{
    const SphereGrid g(step, step);
    std::stringstream ss;
    ss << step << ',' << step << '\n';
    for (std::size_t i = 0; i < g.size(); ++i)
        if (i != skip_row)
            ss << g.point(i).theta() << ',' << g.point(i).phi() << ",1,0,0,0\n";
    return ss.str();
}
} // namespace

TEST_CASE("pattern file: error paths", "[antenna][io]")
{
    {
        std::stringstream ss(file_with_rows(30.0, 7)); // row 7 of a 6x12 grid: theta 15, phi 225
        try
        {
            load_pattern_file(ss);
            FAIL("expected ParseError");
        }
        catch (const ParseError &e)
        {
            CHECK_THAT(e.what(), ContainsSubstring("theta=15, phi=225"));
            CHECK(e.line() == 9);
        }
    }
    {
        std::stringstream ss(file_with_rows(30.0, 71)); // last row missing: file ends early
        CHECK_THROWS_WITH(load_pattern_file(ss), ContainsSubstring("theta=165, phi=345"));
    }
    {
        std::stringstream ss("30,30\n15,15,nan,0,0,0\n");
        CHECK_THROWS_AS(load_pattern_file(ss), ParseError);
    }
    {
        std::stringstream ss("30,30\n15,15,1,0,0\n");
        CHECK_THROWS_WITH(load_pattern_file(ss), ContainsSubstring("expected 6 fields"));
    }
    {
        std::stringstream ss("7,30\n");
        CHECK_THROWS_WITH(load_pattern_file(ss), ContainsSubstring("invalid grid header"));
    }
    {
        std::stringstream ss(file_with_rows(30.0, 9999));
        CHECK_THROWS_WITH(load_pattern_file(ss, make_grid(10.0, 10.0)), ContainsSubstring("does not match"));
    }
    {
        std::stringstream ss(file_with_rows(30.0, 9999) + "15,15,1,0,0,0\n");
        CHECK_THROWS_WITH(load_pattern_file(ss), ContainsSubstring("extra row"));
    }
    CHECK_THROWS(load_pattern_file(std::string("/nonexistent/pattern.csv")));
}

TEST_CASE("pattern file round-trip", "[antenna][io][property]")
{
    const auto grid = make_grid(2.0, 3.0);
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> t(0.0, 180.0), p(0.0, 360.0), g(2.0, 9.0), bw(40.0, 170.0);
    for (int trial = 0; trial < 4; ++trial)
    {
        const SyntheticElement e{trial % 2 ? ElementKind::patch : ElementKind::dipole,
                                 Direction(t(gen), p(gen)),
                                 g(gen),
                                 bw(gen),
                                 trial % 2 ? Polarization::theta : Polarization::phi,
                                 {0.5 * trial, -0.25, 1.0}};
        const auto pat = synthetic_element_pattern(e, grid);
        std::stringstream ss;
        save_pattern_file(pat, ss);
        const auto back = load_pattern_file(ss, grid);
        for (std::size_t i = 0; i < grid->size(); ++i)
        {
            CHECK(std::abs(back[i].e_theta - pat[i].e_theta) < 1e-6);
            CHECK(std::abs(back[i].e_phi - pat[i].e_phi) < 1e-6);
        }
    }
}

TEST_CASE("built-in designs match the published element counts", "[antenna][design]")
{
    const auto grid = make_grid(5.0, 5.0);
    struct Expect
    {
        const char *name;
        std::size_t modules, subarrays, elements;
    };
    for (const auto &e : {Expect{"face", 2, 8, 24}, Expect{"edge", 3, 6, 24}, Expect{"design3", 4, 12, 48},
                          Expect{"design4", 4, 16, 64}})
    {
        const auto d = build_design(e.name, grid);
        CHECK(d.name() == e.name);
        CHECK(d.modules().size() == e.modules);
        CHECK(d.subarray_count() == e.subarrays);
        CHECK(d.element_count() == e.elements);
        for (std::size_t i = 0; i < d.subarray_count(); ++i)
            CHECK(d.subarrays()[i]->id() == i);
    }
    CHECK_THROWS_AS(build_design("design5", grid), ConfigError);
}

TEST_CASE("face module structure", "[antenna][design]")
{
    const auto grid = make_grid(5.0, 5.0);
    const auto d = build_design("face", grid);
    for (const auto &m : d.modules())
    {
        std::size_t patch_elems = 0, dipole_elems = 0, theta = 0, phi = 0;
        for (const auto &s : m.subarrays)
        {
            (s.kind() == ElementKind::patch ? patch_elems : dipole_elems) += s.size();
            (s.feed() == Polarization::theta ? theta : phi) += 1;
            for (const auto &p : s.element_patterns())
            {
                const double peak = linear_to_db(p.response_at(s.boresight()).total_gain());
                CHECK_THAT(peak, WithinAbs(s.kind() == ElementKind::patch ? 5.8 : 4.7, 1e-9));
            }
        }
        CHECK(patch_elems == 8);
        CHECK(dipole_elems == 4);
        CHECK(theta == 2);
        CHECK(phi == 2);
    }
    CHECK(d.modules()[0].placement == "front");
    CHECK(d.modules()[0].subarrays[0].boresight() == Direction(90.0, 90.0));
    CHECK(d.modules()[1].subarrays[0].boresight() == Direction(90.0, 270.0));
}

TEST_CASE("edge design uses 5.5 dBi patches on three edges", "[antenna][design]")
{
    const auto grid = make_grid(5.0, 5.0);
    const auto d = build_design("edge", grid);
    for (const auto *s : d.subarrays())
    {
        CHECK(s->kind() == ElementKind::patch);
        CHECK(s->size() == 4);
        CHECK_THAT(linear_to_db(s->element_patterns()[0].response_at(s->boresight()).total_gain()),
                   WithinAbs(5.5, 1e-9));
        // nothing points at the bottom edge
        CHECK(s->boresight().theta() < 180.0);
    }
}

TEST_CASE("UeDesign copies keep a consistent subarray index", "[antenna][design]")
{
    const auto grid = make_grid(10.0, 10.0);
    const auto a = build_design("edge", grid);
    const UeDesign b = a;
    UeDesign c = build_design("face", grid);
    c = b;
    for (std::size_t i = 0; i < c.subarray_count(); ++i)
    {
        CHECK(c.subarrays()[i] != a.subarrays()[i]);
        CHECK(c.subarrays()[i]->label() == a.subarrays()[i]->label());
    }
}

TEST_CASE("design validation", "[antenna][design]")
{
    const auto grid = make_grid(10.0, 10.0);
    DesignSpec bad{"custom", {{"front", {presets::patch("p", Polarization::theta, presets::py, {presets::py}, {2}, {},
                                                        5.8, {2}, 30.0)}}}};
    CHECK_THROWS_WITH(realize_design(bad, grid), ContainsSubstring("orthogonal"));
    CHECK_THROWS_AS(realize_design(DesignSpec{"empty", {}}, grid), ConfigError);
}
