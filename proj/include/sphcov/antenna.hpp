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
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace sphcov
{

using cplx = std::complex<double>;

enum class Polarization
{
    theta,
    phi
};

inline const char *to_string(Polarization p) { return p == Polarization::theta ? "theta" : "phi"; }

inline Polarization parse_polarization(const std::string &s)
{
    if (s == "theta" || s == "Theta" || s == "T")
        return Polarization::theta;
    if (s == "phi" || s == "Phi" || s == "P")
        return Polarization::phi;
    throw ConfigError("unknown polarization '" + s + "' (expected theta or phi)");
}

/// Far-field complex response of one element in the Theta and Phi polarizations (linear amplitude).
/// |e_theta|^2 + |e_phi|^2 is the realized gain in that direction.
struct ComplexGainPair
{
    cplx e_theta{};
    cplx e_phi{};

    const cplx &operator[](Polarization p) const noexcept { return p == Polarization::theta ? e_theta : e_phi; }
    double total_gain() const noexcept { return std::norm(e_theta) + std::norm(e_phi); }
    bool finite() const noexcept
    {
        return std::isfinite(e_theta.real()) && std::isfinite(e_theta.imag()) && std::isfinite(e_phi.real()) &&
               std::isfinite(e_phi.imag());
    }
};

// ---------------------------------------------------------------------------------------------------------------
// Ideal arrays

struct ArrayDims
{
    std::size_t nx = 1, ny = 1, nz = 1;
    std::size_t count() const noexcept { return nx * ny * nz; }
};

/**
 * Ideal isotropic-element response of element n (1-based) of an (nx, ny, nz) array with half-wavelength
 * spacing on every axis. Both polarizations carry the same value
 *   (1 / sqrt(N)) exp(j pi (n_x sin t cos p + n_y sin t sin p + n_z cos t)),
 * with n - 1 = n_x + n_y nx + n_z nx ny.
 */
inline ComplexGainPair ideal_array_response(const ArrayDims &dims, std::size_t n, const Direction &d)
{
    const std::size_t N = dims.count();
    if (N == 0)
        throw ConfigError("ideal_array_response: empty array");
    if (n < 1 || n > N)
        throw std::out_of_range("ideal_array_response: element index " + std::to_string(n) + " outside 1.." +
                                std::to_string(N));
    const std::size_t i = n - 1;
    const double n_x = static_cast<double>(i % dims.nx);
    const double n_y = static_cast<double>((i / dims.nx) % dims.ny);
    const double n_z = static_cast<double>(i / (dims.nx * dims.ny));
    const Vec3 u = unit_vector(d);
    const cplx v = std::polar(1.0 / std::sqrt(static_cast<double>(N)), pi * (n_x * u[0] + n_y * u[1] + n_z * u[2]));
    return {v, v};
}

/// Element positions (in wavelengths) matching ideal_array_response's index order.
inline std::vector<Vec3> half_wave_positions(const ArrayDims &dims)
{
    std::vector<Vec3> pos;
    pos.reserve(dims.count());
    for (std::size_t z = 0; z < dims.nz; ++z)
        for (std::size_t y = 0; y < dims.ny; ++y)
            for (std::size_t x = 0; x < dims.nx; ++x)
                pos.push_back({0.5 * x, 0.5 * y, 0.5 * z});
    return pos;
}

// ---------------------------------------------------------------------------------------------------------------
// Element patterns

enum class ElementKind
{
    patch,
    dipole,
    ideal
};

inline const char *to_string(ElementKind k)
{
    switch (k)
    {
    case ElementKind::patch:
        return "patch";
    case ElementKind::dipole:
        return "dipole";
    default:
        return "ideal";
    }
}

inline ElementKind parse_element_kind(const std::string &s)
{
    if (s == "patch")
        return ElementKind::patch;
    if (s == "dipole")
        return ElementKind::dipole;
    if (s == "ideal")
        return ElementKind::ideal;
    throw ConfigError("unknown element kind '" + s + "' (expected patch, dipole or ideal)");
}

/// Samples of one element's response on a grid. Synthetic and ideal patterns also keep their closed form so
/// off-grid directions (beam steering targets, channel angles) are evaluated exactly.
class ElementPattern
{
public:
    using Evaluator = std::function<ComplexGainPair(const Direction &)>;

    ElementPattern(GridPtr grid, std::vector<ComplexGainPair> samples, Evaluator exact = {})
        : grid_(std::move(grid)), samples_(std::move(samples)), exact_(std::move(exact))
    {
        if (!grid_)
            throw ConfigError("ElementPattern: null grid");
        if (samples_.size() != grid_->size())
            throw ConfigError("ElementPattern: " + std::to_string(samples_.size()) + " samples for a grid of " +
                              std::to_string(grid_->size()) + " points");
        for (const auto &s : samples_)
            if (!s.finite())
                throw ConfigError("ElementPattern: non-finite sample");
    }

    /// Samples the evaluator on every grid point and keeps it for off-grid lookups.
    static ElementPattern from_function(GridPtr grid, Evaluator f)
    {
        std::vector<ComplexGainPair> s;
        s.reserve(grid->size());
        for (const auto &d : grid->points())
            s.push_back(f(d));
        return ElementPattern(std::move(grid), std::move(s), std::move(f));
    }

    const GridPtr &grid() const noexcept { return grid_; }
    std::span<const ComplexGainPair> samples() const noexcept { return samples_; }
    const ComplexGainPair &operator[](std::size_t i) const noexcept { return samples_[i]; }

    bool has_exact() const noexcept { return static_cast<bool>(exact_); }

    /// Exact value for analytic patterns, otherwise the sample of the containing grid cell.
    ComplexGainPair response_at(const Direction &d) const
    {
        return exact_ ? exact_(d) : samples_[grid_->nearest_index(d)];
    }

    /// Maximum of |e_theta|^2 + |e_phi|^2 over the grid (linear).
    double peak_gain() const noexcept
    {
        double m = 0.0;
        for (const auto &s : samples_)
            m = std::max(m, s.total_gain());
        return m;
    }

    /// Integral of the total gain over the sphere; 4 pi for a lossless element.
    double radiated_power() const
    {
        return integrate(*grid_, [&](std::size_t i) { return samples_[i].total_gain(); });
    }

private:
    GridPtr grid_;
    std::vector<ComplexGainPair> samples_;
    Evaluator exact_;
};

/// Normalized power pattern of the synthetic element: max(cos^q(psi), floor) with psi the angle off boresight
/// (cos^q taken as 0 beyond 90 degrees).
struct CosinePowerShape
{
    double exponent = 1.0;        // q
    double floor_linear = 0.01;   // -20 dB relative to peak

    double operator()(double psi_deg) const noexcept
    {
        const double c = std::cos(deg2rad(psi_deg));
        const double main = c > 0.0 ? std::pow(c, exponent) : 0.0;
        return std::max(main, floor_linear);
    }
};

inline constexpr double synthetic_backlobe_db = -20.0;

/// Exponent q with cos^q(beamwidth / 2) = 1/2.
inline double cosine_exponent_for_beamwidth(double beamwidth_deg)
{
    if (!(beamwidth_deg > 0.0) || beamwidth_deg >= 180.0)
        throw ConfigError("synthetic element: beamwidth must lie in (0, 180) degrees, got " +
                          std::to_string(beamwidth_deg));
    return std::log(0.5) / std::log(std::cos(deg2rad(0.5 * beamwidth_deg)));
}

/// Integral over the sphere of the normalized shape, in closed form: with c0 = f^{1/q},
/// 2 pi [ (1 - c0^{q+1}) / (q + 1) + f (1 + c0) ].
inline double shape_solid_angle(const CosinePowerShape &s)
{
    const double q = s.exponent, f = s.floor_linear;
    const double c0 = std::pow(f, 1.0 / q); // cos(psi) where cos^q meets the floor
    return 2.0 * pi * ((1.0 - std::pow(c0, q + 1.0)) / (q + 1.0) + f * (1.0 + c0));
}

/**
 * Half-power beamwidth for which a cos^q element with the -20 dB floor and the given peak gain radiates exactly
 * 4 pi (lossless). Used as the default synthetic beamwidth.
 */
inline double matched_beamwidth(double peak_gain_dbi)
{
    const double peak = db_to_linear(peak_gain_dbi);
    auto power = [&](double bw) {
        return peak * shape_solid_angle({cosine_exponent_for_beamwidth(bw), db_to_linear(synthetic_backlobe_db)});
    };
    double lo = 1.0, hi = 179.0;
    if (power(hi) < four_pi || power(lo) > four_pi)
        throw ConfigError("matched_beamwidth: no lossless cos^q pattern has peak gain " + std::to_string(peak_gain_dbi) +
                          " dBi");
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (power(mid) < four_pi ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Parameters of one synthetic element; position in wavelengths sets the phase center.
struct SyntheticElement
{
    ElementKind kind = ElementKind::patch;
    Direction boresight{90.0, 0.0};
    double peak_gain_dbi = 5.8;
    double beamwidth_deg = 120.0;
    Polarization feed = Polarization::theta;
    Vec3 position{0.0, 0.0, 0.0};

    /// Closed-form response. The fed polarization carries the whole pattern; cross-polarization is zero.
    ComplexGainPair operator()(const Direction &d) const { return evaluate(unit_vector(d)); }

    ComplexGainPair evaluate(const Vec3 &u) const
    {
        const Vec3 b = unit_vector(boresight);
        const double psi = rad2deg(std::atan2(norm(cross(u, b)), dot(u, b)));
        const CosinePowerShape shape{cosine_exponent_for_beamwidth(beamwidth_deg), db_to_linear(synthetic_backlobe_db)};
        const double amp = std::sqrt(db_to_linear(peak_gain_dbi) * shape(psi));
        const cplx v = std::polar(amp, 2.0 * pi * dot(position, u));
        return feed == Polarization::theta ? ComplexGainPair{v, {}} : ComplexGainPair{{}, v};
    }
};

/// Samples a cos^q synthetic element on the grid. beamwidth >= 180 degrees is rejected.
inline ElementPattern synthetic_element_pattern(const SyntheticElement &e, const GridPtr &grid)
{
    if (!(e.beamwidth_deg > 0.0) || e.beamwidth_deg >= 180.0)
        throw ConfigError("synthetic_element_pattern: beamwidth must lie in (0, 180) degrees");
    if (!std::isfinite(e.peak_gain_dbi))
        throw ConfigError("synthetic_element_pattern: peak gain must be finite");
    // Pre-resolve the shape so the sampling loop does not recompute q per point.
    const CosinePowerShape shape{cosine_exponent_for_beamwidth(e.beamwidth_deg), db_to_linear(synthetic_backlobe_db)};
    const Vec3 b = unit_vector(e.boresight);
    const double peak = db_to_linear(e.peak_gain_dbi);
    std::vector<ComplexGainPair> s;
    s.reserve(grid->size());
    for (const Vec3 &u : grid->unit_vectors())
    {
        const double psi = rad2deg(std::atan2(norm(cross(u, b)), dot(u, b)));
        const cplx v = std::polar(std::sqrt(peak * shape(psi)), 2.0 * pi * dot(e.position, u));
        s.push_back(e.feed == Polarization::theta ? ComplexGainPair{v, {}} : ComplexGainPair{{}, v});
    }
    return ElementPattern(grid, std::move(s), e);
}

inline ElementPattern synthetic_element_pattern(ElementKind kind, const Direction &boresight, double peak_gain_dbi,
                                                double beamwidth_deg, const GridPtr &grid,
                                                Polarization feed = Polarization::theta, Vec3 position = {})
{
    if (!(peak_gain_dbi > 0.0))
        throw ConfigError("synthetic_element_pattern: peak gain must be positive");
    return synthetic_element_pattern(SyntheticElement{kind, boresight, peak_gain_dbi, beamwidth_deg, feed, position},
                                     grid);
}

/// Generalized ideal element: amplitude 1/sqrt(N) in both polarizations, phase 2 pi <position, u>.
inline ElementPattern ideal_element_pattern(const Vec3 &position, std::size_t array_size, const GridPtr &grid)
{
    const double amp = 1.0 / std::sqrt(static_cast<double>(array_size));
    return ElementPattern::from_function(grid, [position, amp](const Direction &d) {
        const cplx v = std::polar(amp, 2.0 * pi * dot(position, unit_vector(d)));
        return ComplexGainPair{v, v};
    });
}

// ---------------------------------------------------------------------------------------------------------------
// Pattern-grid file format
//
//   theta_step,phi_step
//   theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi     (one row per cell center, theta-major)

inline void save_pattern_file(const ElementPattern &p, std::ostream &os)
{
    const auto &g = *p.grid();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.theta_step(), g.phi_step());
    os << buf;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const auto &d = g.point(i);
        const auto &s = p[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.theta(), d.phi(), s.e_theta.real(),
                      s.e_theta.imag(), s.e_phi.real(), s.e_phi.imag());
        os << buf;
    }
}

inline void save_pattern_file(const ElementPattern &p, const std::string &path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    save_pattern_file(p, os);
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

namespace detail
{
inline std::vector<double> parse_csv_numbers(const std::string &line, std::size_t expected, std::size_t line_no)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size())
    {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos)
            next = line.size();
        std::string tok = line.substr(pos, next - pos);
        // trim
        tok.erase(0, tok.find_first_not_of(" \t\r"));
        tok.erase(tok.find_last_not_of(" \t\r") + 1);
        if (tok.empty())
            throw ParseError("empty field " + std::to_string(out.size() + 1), line_no);
        std::size_t used = 0;
        double v;
        try
        {
            v = std::stod(tok, &used);
        }
        catch (const std::exception &)
        {
            throw ParseError("cannot parse number '" + tok + "'", line_no);
        }
        if (used != tok.size())
            throw ParseError("cannot parse number '" + tok + "'", line_no);
        if (!std::isfinite(v))
            throw ParseError("non-finite value '" + tok + "'", line_no);
        out.push_back(v);
        pos = next + 1;
    }
    if (out.size() != expected)
        throw ParseError("expected " + std::to_string(expected) + " fields, got " + std::to_string(out.size()), line_no);
    return out;
}

inline std::string cell_name(const Direction &d)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "(theta=%g, phi=%g)", d.theta(), d.phi());
    return buf;
}
} // namespace detail

/// Reads a pattern-grid file. If `grid` is given, the declared steps must match it.
inline ElementPattern load_pattern_file(std::istream &is, GridPtr grid = nullptr)
{
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                return true;
        }
        return false;
    };

    if (!next_line())
        throw ParseError("empty pattern file: missing 'theta_step,phi_step' header", line_no);
    const auto header = detail::parse_csv_numbers(line, 2, line_no);
    GridPtr declared;
    try
    {
        declared = make_grid(header[0], header[1]);
    }
    catch (const ConfigError &e)
    {
        throw ParseError(std::string("invalid grid header: ") + e.what(), line_no);
    }
    if (grid && !(std::abs(grid->theta_step() - declared->theta_step()) < 1e-9 &&
                  std::abs(grid->phi_step() - declared->phi_step()) < 1e-9))
        throw ParseError("declared grid " + std::to_string(header[0]) + "x" + std::to_string(header[1]) +
                             " does not match the requested grid",
                         line_no);
    if (!grid)
        grid = declared;

    std::vector<ComplexGainPair> samples;
    samples.reserve(grid->size());
    const double tol = 1e-6;
    for (std::size_t i = 0; i < grid->size(); ++i)
    {
        const Direction &want = grid->point(i);
        if (!next_line())
            throw ParseError("missing row for cell " + detail::cell_name(want) + " (file ends after " +
                                 std::to_string(i) + " of " + std::to_string(grid->size()) + " rows)",
                             line_no);
        const auto v = detail::parse_csv_numbers(line, 6, line_no);
        const double dphi = std::abs(wrap_azimuth(v[1]) - want.phi());
        if (std::abs(v[0] - want.theta()) > tol || std::min(dphi, 360.0 - dphi) > tol)
            throw ParseError("expected cell " + detail::cell_name(want) + ", found (theta=" + std::to_string(v[0]) +
                                 ", phi=" + std::to_string(v[1]) + "); missing or out-of-order row",
                             line_no);
        samples.push_back({{v[2], v[3]}, {v[4], v[5]}});
    }
    if (next_line())
        throw ParseError("unexpected extra row beyond the " + std::to_string(grid->size()) + " grid cells", line_no);
    return ElementPattern(std::move(grid), std::move(samples));
}

inline ElementPattern load_pattern_file(const std::string &path, GridPtr grid = nullptr)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open pattern file '" + path + "'");
    try
    {
        return load_pattern_file(is, std::move(grid));
    }
    catch (const ParseError &e)
    {
        throw e.with_context(path);
    }
}

} // namespace sphcov
