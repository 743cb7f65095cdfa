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

#include <string>
#include <vector>

#include "antenna.hpp"

namespace sphcov
{

/**
 * Declarative description of one subarray. Element i of an (n1 x n2) subarray sits at
 * origin + 0.5 * (i1 * scan_axes[0] + i2 * scan_axes[1]) wavelengths.
 *
 * The codebook plan (beams_per_axis, beam_spacing_deg) places steering targets symmetrically about the
 * boresight in the plane spanned by the boresight and each scan axis.
 */
struct SubarraySpec
{
    std::string label;
    ElementKind kind = ElementKind::patch;
    Polarization feed = Polarization::theta;
    Vec3 boresight{1.0, 0.0, 0.0};
    std::vector<Vec3> scan_axes;             // one per array dimension, orthogonal to the boresight
    std::vector<std::size_t> elements_per_axis;
    Vec3 origin{0.0, 0.0, 0.0};              // wavelengths
    double peak_gain_dbi = 5.8;
    double beamwidth_deg = 0.0;              // 0: lossless-matched to peak_gain_dbi
    std::vector<std::size_t> beams_per_axis;
    double beam_spacing_deg = 30.0;
    std::vector<std::string> pattern_files;  // optional, one per element; overrides the synthetic model

    std::size_t element_count() const
    {
        std::size_t n = 1;
        for (auto e : elements_per_axis)
            n *= e;
        return n;
    }

    std::size_t beam_count() const
    {
        std::size_t n = 1;
        for (auto b : beams_per_axis)
            n *= b;
        return beams_per_axis.empty() ? 0 : n;
    }
};

struct ModuleSpec
{
    std::string placement; // front, back, edge-left, edge-right, edge-top, edge-bottom, ...
    std::vector<SubarraySpec> subarrays;
};

struct DesignSpec
{
    std::string name;
    std::vector<ModuleSpec> modules;
};

/// A realized subarray: a group of elements driven coherently by one polarization port.
class Subarray
{
public:
    Subarray(std::size_t id, std::size_t module, SubarraySpec spec, std::vector<Vec3> positions,
             std::vector<ElementPattern> patterns)
        : id_(id), module_(module), spec_(std::move(spec)), positions_(std::move(positions)),
          patterns_(std::move(patterns))
    {
        if (patterns_.empty())
            throw ConfigError("Subarray '" + spec_.label + "': needs at least one element");
    }

    std::size_t id() const noexcept { return id_; }
    std::size_t module() const noexcept { return module_; }
    const std::string &label() const noexcept { return spec_.label; }
    ElementKind kind() const noexcept { return spec_.kind; }
    Polarization feed() const noexcept { return spec_.feed; }
    Direction boresight() const { return direction_from_vector(spec_.boresight); }
    const SubarraySpec &spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return patterns_.size(); }
    const std::vector<ElementPattern> &element_patterns() const noexcept { return patterns_; }
    const std::vector<Vec3> &positions() const noexcept { return positions_; }

    /// Response of element i in polarization p at grid point `cell`.
    const cplx &response(std::size_t i, std::size_t cell, Polarization p) const noexcept
    {
        return patterns_[i][cell][p];
    }

    /// Responses of all elements at an arbitrary direction.
    std::vector<cplx> responses_at(const Direction &d, Polarization p) const
    {
        std::vector<cplx> r;
        r.reserve(patterns_.size());
        for (const auto &e : patterns_)
            r.push_back(e.response_at(d)[p]);
        return r;
    }

private:
    std::size_t id_, module_;
    SubarraySpec spec_;
    std::vector<Vec3> positions_;
    std::vector<ElementPattern> patterns_;
};

struct AntennaModule
{
    std::string placement;
    std::vector<Subarray> subarrays;
};

class UeDesign
{
public:
    UeDesign(std::string name, std::vector<AntennaModule> modules, GridPtr grid)
        : name_(std::move(name)), modules_(std::move(modules)), grid_(std::move(grid))
    {
        if (modules_.empty())
            throw ConfigError("UeDesign '" + name_ + "': no modules");
        for (auto &m : modules_)
        {
            if (m.subarrays.empty())
                throw ConfigError("UeDesign '" + name_ + "': module '" + m.placement + "' is empty");
            for (auto &s : m.subarrays)
                flat_.push_back(&s);
        }
    }

    // flat_ points into modules_, so copies must rebuild it.
    UeDesign(const UeDesign &o) : UeDesign(o.name_, o.modules_, o.grid_) {}
    UeDesign(UeDesign &&) noexcept = default;
    UeDesign &operator=(const UeDesign &o)
    {
        if (this != &o)
            *this = UeDesign(o);
        return *this;
    }
    UeDesign &operator=(UeDesign &&) noexcept = default;

    const std::string &name() const noexcept { return name_; }
    const std::vector<AntennaModule> &modules() const noexcept { return modules_; }
    const GridPtr &grid() const noexcept { return grid_; }

    /// All subarrays in module order; index equals Subarray::id().
    const std::vector<const Subarray *> &subarrays() const noexcept { return flat_; }

    std::size_t subarray_count() const noexcept { return flat_.size(); }

    std::size_t element_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto *s : flat_)
            n += s->size();
        return n;
    }

private:
    std::string name_;
    std::vector<AntennaModule> modules_;
    GridPtr grid_;
    std::vector<const Subarray *> flat_;
};

// ---------------------------------------------------------------------------------------------------------------
// Presets. Chassis frame: X across the width, Y out of the display (front), Z along the long axis (top).

namespace presets
{
inline constexpr Vec3 px{1, 0, 0}, nx{-1, 0, 0}, py{0, 1, 0}, ny{0, -1, 0}, pz{0, 0, 1}, nz{0, 0, -1};

inline constexpr double face_patch_dbi = 5.8;
inline constexpr double face_dipole_dbi = 4.7;
inline constexpr double edge_patch_dbi = 5.5;

inline SubarraySpec patch(std::string label, Polarization feed, Vec3 boresight, std::vector<Vec3> axes,
                          std::vector<std::size_t> dims, Vec3 origin, double gain, std::vector<std::size_t> beams,
                          double spacing)
{
    SubarraySpec s;
    s.label = std::move(label);
    s.kind = ElementKind::patch;
    s.feed = feed;
    s.boresight = boresight;
    s.scan_axes = std::move(axes);
    s.elements_per_axis = std::move(dims);
    s.origin = origin;
    s.peak_gain_dbi = gain;
    s.beams_per_axis = std::move(beams);
    s.beam_spacing_deg = spacing;
    return s;
}

/// Both feeds of one dual-polarized patch subarray (two Subarray instances).
inline void dual_pol_patch(std::vector<SubarraySpec> &out, const std::string &label, Vec3 boresight,
                           std::vector<Vec3> axes, std::vector<std::size_t> dims, Vec3 origin, double gain,
                           std::vector<std::size_t> beams, double spacing)
{
    out.push_back(patch(label + "-theta", Polarization::theta, boresight, axes, dims, origin, gain, beams, spacing));
    out.push_back(patch(label + "-phi", Polarization::phi, boresight, axes, dims, origin, gain, beams, spacing));
}

inline SubarraySpec dipole(std::string label, Polarization feed, Vec3 boresight, Vec3 axis, std::size_t n,
                           Vec3 origin, double gain, std::size_t beams, double spacing)
{
    SubarraySpec s = patch(std::move(label), feed, boresight, {axis}, {n}, origin, gain, {beams}, spacing);
    s.kind = ElementKind::dipole;
    return s;
}

// 2x2 dual-pol patch (8 elements, 4 beams per feed) + 2x1 and 1x2 dipoles (2 beams each) per module.
inline ModuleSpec face_module(const std::string &placement, Vec3 normal, Vec3 top, Vec3 side, Vec3 origin)
{
    ModuleSpec m{placement, {}};
    dual_pol_patch(m.subarrays, placement + "-patch2x2", normal, {px, pz}, {2, 2}, origin, face_patch_dbi, {2, 2},
                   55.0);
    m.subarrays.push_back(dipole(placement + "-dipole2x1", Polarization::theta, top, px, 2, origin, face_dipole_dbi,
                                 2, 54.0));
    m.subarrays.push_back(dipole(placement + "-dipole1x2", Polarization::phi, side, py, 2, origin, face_dipole_dbi, 2,
                                 54.0));
    return m;
}

inline DesignSpec face()
{
    return {"face",
            {face_module("front", py, pz, px, {2.5, 0.4, 6.5}), face_module("back", ny, nz, nx, {-2.5, -0.4, -6.5})}};
}

// 4x1 dual-pol patch on an edge, array axis along the edge.
inline ModuleSpec edge_module(const std::string &placement, Vec3 normal, Vec3 along, Vec3 origin, double gain,
                              std::size_t beams, double spacing)
{
    ModuleSpec m{placement, {}};
    dual_pol_patch(m.subarrays, placement + "-patch4x1", normal, {along}, {4}, origin, gain, {beams}, spacing);
    return m;
}

inline DesignSpec edge()
{
    return {"edge",
            {edge_module("edge-right", px, pz, {3.25, 0, 0}, edge_patch_dbi, 4, 30.0),
             edge_module("edge-left", nx, pz, {-3.25, 0, 0}, edge_patch_dbi, 4, 30.0),
             edge_module("edge-top", pz, px, {0, 0, 7.0}, edge_patch_dbi, 4, 30.0)}};
}

struct EdgeSlot
{
    const char *placement;
    Vec3 normal, along, origin, face_normal;
};

inline const std::vector<EdgeSlot> &four_edges()
{
    static const std::vector<EdgeSlot> slots{{"edge-right", px, pz, {3.25, 0, 0}, py},
                                             {"edge-left", nx, pz, {-3.25, 0, 0}, ny},
                                             {"edge-top", pz, px, {0, 0, 7.0}, ny},
                                             {"edge-bottom", nz, px, {0, 0, -7.0}, py}};
    return slots;
}

// Four edges, each a 4x1 dual-pol patch plus a 4x1 dipole facing one of the display faces.
inline DesignSpec design3()
{
    DesignSpec d{"design3", {}};
    for (const auto &e : four_edges())
    {
        ModuleSpec m = edge_module(e.placement, e.normal, e.along, e.origin, edge_patch_dbi, 4, 30.0);
        m.subarrays.push_back(dipole(std::string(e.placement) + "-dipole4x1", Polarization::phi, e.face_normal,
                                     e.along, 4, e.origin, face_dipole_dbi, 4, 30.0));
        d.modules.push_back(std::move(m));
    }
    return d;
}

// Four L-shaped modules: a 4x1 dual-pol patch on the edge and another on the adjoining face, 3 beams per feed.
inline DesignSpec design4()
{
    DesignSpec d{"design4", {}};
    for (const auto &e : four_edges())
    {
        ModuleSpec m = edge_module(e.placement, e.normal, e.along, e.origin, edge_patch_dbi, 3, 30.0);
        dual_pol_patch(m.subarrays, std::string(e.placement) + "-facepatch4x1", e.face_normal, {e.along}, {4},
                       e.origin, edge_patch_dbi, {3}, 30.0);
        d.modules.push_back(std::move(m));
    }
    return d;
}
} // namespace presets

inline const std::vector<std::string> &builtin_design_names()
{
    static const std::vector<std::string> names{"face", "edge", "design3", "design4"};
    return names;
}

inline DesignSpec preset_design_spec(const std::string &name)
{
    if (name == "face")
        return presets::face();
    if (name == "edge")
        return presets::edge();
    if (name == "design3")
        return presets::design3();
    if (name == "design4")
        return presets::design4();
    throw ConfigError("unknown design '" + name + "' (expected face, edge, design3 or design4)");
}

/// Element offsets (wavelengths, relative to origin) in row-major order over the scan axes.
inline std::vector<Vec3> element_positions(const SubarraySpec &s)
{
    if (s.scan_axes.size() != s.elements_per_axis.size())
        throw ConfigError("subarray '" + s.label + "': scan_axes and elements_per_axis differ in length");
    std::vector<Vec3> pos{s.origin};
    for (std::size_t a = 0; a < s.scan_axes.size(); ++a)
    {
        const Vec3 ax = normalized(s.scan_axes[a]);
        std::vector<Vec3> next;
        for (std::size_t k = 0; k < s.elements_per_axis[a]; ++k)
            for (const auto &p : pos)
                next.push_back({p[0] + 0.5 * k * ax[0], p[1] + 0.5 * k * ax[1], p[2] + 0.5 * k * ax[2]});
        pos = std::move(next);
    }
    return pos;
}

inline void validate(const SubarraySpec &s)
{
    if (s.element_count() == 0)
        throw ConfigError("subarray '" + s.label + "': zero elements");
    const Vec3 b = normalized(s.boresight);
    for (const auto &a : s.scan_axes)
        if (std::abs(dot(b, normalized(a))) > 1e-9)
            throw ConfigError("subarray '" + s.label + "': scan axis not orthogonal to boresight");
    if (!s.beams_per_axis.empty() && s.beams_per_axis.size() > s.scan_axes.size())
        throw ConfigError("subarray '" + s.label + "': more beam axes than scan axes");
    if (!s.pattern_files.empty() && s.pattern_files.size() != s.element_count())
        throw ConfigError("subarray '" + s.label + "': need one pattern file per element");
    if (s.beamwidth_deg < 0.0 || s.beamwidth_deg >= 180.0)
        throw ConfigError("subarray '" + s.label + "': beamwidth must lie in [0, 180)");
}

/// Builds the full hierarchy, sampling every element pattern on `grid`.
inline UeDesign realize_design(const DesignSpec &spec, const GridPtr &grid)
{
    std::vector<AntennaModule> modules;
    std::size_t next_id = 0;
    for (std::size_t mi = 0; mi < spec.modules.size(); ++mi)
    {
        const auto &ms = spec.modules[mi];
        AntennaModule m{ms.placement, {}};
        for (const auto &ss : ms.subarrays)
        {
            validate(ss);
            auto pos = element_positions(ss);
            std::vector<ElementPattern> pats;
            pats.reserve(pos.size());
            if (!ss.pattern_files.empty())
            {
                for (const auto &f : ss.pattern_files)
                    pats.push_back(load_pattern_file(f, grid));
            }
            else if (ss.kind == ElementKind::ideal)
            {
                for (const auto &p : pos)
                    pats.push_back(ideal_element_pattern(p, pos.size(), grid));
            }
            else
            {
                const double bw = ss.beamwidth_deg > 0.0 ? ss.beamwidth_deg : matched_beamwidth(ss.peak_gain_dbi);
                for (const auto &p : pos)
                    pats.push_back(synthetic_element_pattern(
                        SyntheticElement{ss.kind, direction_from_vector(ss.boresight), ss.peak_gain_dbi, bw, ss.feed, p},
                        grid));
            }
            m.subarrays.emplace_back(next_id++, mi, ss, std::move(pos), std::move(pats));
        }
        modules.push_back(std::move(m));
    }
    return UeDesign(spec.name, std::move(modules), grid);
}

/// One of the built-in designs: face, edge, design3, design4.
inline UeDesign build_design(const std::string &name, const GridPtr &grid)
{
    return realize_design(preset_design_spec(name), grid);
}

} // namespace sphcov
