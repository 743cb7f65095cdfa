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

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "design.hpp"

namespace sphcov
{

namespace detail
{
using nlohmann::json;

inline void require_keys(const json &j, const std::string &where, std::initializer_list<const char *> allowed)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto &item : j.items())
    {
        bool known = false;
        for (const char *k : allowed)
            known = known || item.key() == k;
        if (!known)
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
T get_as(const json &j, const std::string &where)
{
    try
    {
        return j.get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(where + ": wrong type (got " + std::string(j.type_name()) + ")");
    }
}

inline Vec3 get_vec3(const json &j, const std::string &where)
{
    const auto v = get_as<std::vector<double>>(j, where);
    if (v.size() != 3)
        throw ConfigError(where + ": expected 3 components");
    return {v[0], v[1], v[2]};
}

inline json vec3_json(const Vec3 &v) { return json::array({v[0], v[1], v[2]}); }
} // namespace detail

/// JSON form of a design, the same schema read by design_from_json.
inline nlohmann::json design_to_json(const DesignSpec &d)
{
    using nlohmann::json;
    json modules = json::array();
    for (const auto &m : d.modules)
    {
        json subs = json::array();
        for (const auto &s : m.subarrays)
        {
            json axes = json::array();
            for (const auto &a : s.scan_axes)
                axes.push_back(detail::vec3_json(a));
            json j{{"label", s.label},
                   {"kind", to_string(s.kind)},
                   {"feed", to_string(s.feed)},
                   {"boresight", detail::vec3_json(s.boresight)},
                   {"scan_axes", axes},
                   {"elements_per_axis", s.elements_per_axis},
                   {"origin", detail::vec3_json(s.origin)},
                   {"peak_gain_dbi", s.peak_gain_dbi},
                   {"beamwidth_deg", s.beamwidth_deg},
                   {"beams_per_axis", s.beams_per_axis},
                   {"beam_spacing_deg", s.beam_spacing_deg}};
            if (!s.pattern_files.empty())
                j["pattern_files"] = s.pattern_files;
            subs.push_back(std::move(j));
        }
        modules.push_back(json{{"placement", m.placement}, {"subarrays", std::move(subs)}});
    }
    return json{{"name", d.name}, {"modules", std::move(modules)}};
}

/**
 * Reads a design description. Unknown keys are errors. Relative pattern_files paths are resolved against
 * `base_dir`. Every subarray is checked with validate().
 */
inline DesignSpec design_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {})
{
    using detail::get_as;
    detail::require_keys(j, "design", {"name", "modules"});
    if (!j.contains("modules"))
        throw ConfigError("design: missing 'modules'");
    DesignSpec d;
    d.name = j.contains("name") ? get_as<std::string>(j["name"], "design.name") : "custom";
    const auto &mods = j["modules"];
    if (!mods.is_array() || mods.empty())
        throw ConfigError("design.modules: expected a non-empty array");
    for (std::size_t mi = 0; mi < mods.size(); ++mi)
    {
        const std::string mw = "design.modules[" + std::to_string(mi) + "]";
        const auto &mj = mods[mi];
        detail::require_keys(mj, mw, {"placement", "subarrays"});
        ModuleSpec m;
        m.placement = mj.contains("placement") ? get_as<std::string>(mj["placement"], mw + ".placement") : "";
        if (!mj.contains("subarrays") || !mj["subarrays"].is_array() || mj["subarrays"].empty())
            throw ConfigError(mw + ".subarrays: expected a non-empty array");
        for (std::size_t si = 0; si < mj["subarrays"].size(); ++si)
        {
            const std::string w = mw + ".subarrays[" + std::to_string(si) + "]";
            const auto &sj = mj["subarrays"][si];
            detail::require_keys(sj, w,
                                 {"label", "kind", "feed", "boresight", "scan_axes", "elements_per_axis", "origin",
                                  "peak_gain_dbi", "beamwidth_deg", "beams_per_axis", "beam_spacing_deg",
                                  "pattern_files"});
            for (const char *k : {"boresight", "elements_per_axis"})
                if (!sj.contains(k))
                    throw ConfigError(w + ": missing '" + k + "'");
            SubarraySpec s;
            s.label = sj.contains("label") ? get_as<std::string>(sj["label"], w + ".label")
                                           : "m" + std::to_string(mi) + "s" + std::to_string(si);
            if (sj.contains("kind"))
                s.kind = parse_element_kind(get_as<std::string>(sj["kind"], w + ".kind"));
            if (sj.contains("feed"))
                s.feed = parse_polarization(get_as<std::string>(sj["feed"], w + ".feed"));
            s.boresight = detail::get_vec3(sj["boresight"], w + ".boresight");
            if (sj.contains("scan_axes"))
            {
                if (!sj["scan_axes"].is_array())
                    throw ConfigError(w + ".scan_axes: expected an array");
                for (const auto &a : sj["scan_axes"])
                    s.scan_axes.push_back(detail::get_vec3(a, w + ".scan_axes"));
            }
            s.elements_per_axis = get_as<std::vector<std::size_t>>(sj["elements_per_axis"], w + ".elements_per_axis");
            if (sj.contains("origin"))
                s.origin = detail::get_vec3(sj["origin"], w + ".origin");
            if (sj.contains("peak_gain_dbi"))
                s.peak_gain_dbi = get_as<double>(sj["peak_gain_dbi"], w + ".peak_gain_dbi");
            if (sj.contains("beamwidth_deg"))
                s.beamwidth_deg = get_as<double>(sj["beamwidth_deg"], w + ".beamwidth_deg");
            if (sj.contains("beams_per_axis"))
                s.beams_per_axis = get_as<std::vector<std::size_t>>(sj["beams_per_axis"], w + ".beams_per_axis");
            if (sj.contains("beam_spacing_deg"))
                s.beam_spacing_deg = get_as<double>(sj["beam_spacing_deg"], w + ".beam_spacing_deg");
            if (sj.contains("pattern_files"))
                for (const auto &f : get_as<std::vector<std::string>>(sj["pattern_files"], w + ".pattern_files"))
                {
                    const std::filesystem::path p(f);
                    s.pattern_files.push_back(p.is_absolute() || base_dir.empty() ? p.string() : (base_dir / p).string());
                }
            try
            {
                validate(s);
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(w + ": " + e.what());
            }
            m.subarrays.push_back(std::move(s));
        }
        d.modules.push_back(std::move(m));
    }
    return d;
}

inline DesignSpec load_design_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open design file '" + path.string() + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
    return design_from_json(j, path.parent_path());
}

} // namespace sphcov
