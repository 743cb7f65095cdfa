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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "beamforming.hpp"
#include "blockage.hpp"
#include "design_io.hpp"
#include "sls.hpp"

namespace sphcov
{

/// Everything a CLI run depends on. Loaded from JSON and/or flags; validate() runs before any computation.
struct RunConfig
{
    std::string design = "face";
    std::string design_file; // overrides `design` when set
    std::string scheme = "cbk";
    std::string blockage = "none"; // none | portrait | landscape
    std::string model = "1";       // 1 | 2 | 2-mean
    std::optional<std::uint64_t> seed;
    double grid_step = 1.0; // degrees, both axes
    std::string combining = "subarray";
    std::string metric = "total";
    int phase_bits = 5;
    std::string out;

    // link-level runs
    std::size_t drops = 10000;
    std::string ue_combining = "codebook"; // codebook | mrc
    LinkBudget link;

    void validate() const
    {
        if (design_file.empty())
            (void)preset_design_spec(design);
        (void)parse_scheme(scheme);
        if (blockage != "none")
            (void)parse_blockage_region(blockage);
        const auto variant = parse_blockage_variant(model);
        if (blockage != "none" && variant == BlockageVariant::model2 && !seed)
            throw ConfigError("blockage model 2 needs a seed");
        if (!(grid_step > 0.0) || grid_step > 90.0)
            throw ConfigError("grid_step must lie in (0, 90]");
        (void)detail::exact_division(180.0, grid_step, "theta");
        (void)detail::exact_division(360.0, grid_step, "phi");
        (void)parse_combining_scope(combining);
        (void)parse_metric(metric);
        if (phase_bits < 1 || phase_bits > 16)
            throw ConfigError("phase_bits must lie in [1, 16]");
        if (drops == 0)
            throw ConfigError("drops must be positive");
        if (ue_combining != "codebook" && ue_combining != "mrc")
            throw ConfigError("unknown ue_combining '" + ue_combining + "' (expected codebook or mrc)");
        if (!(link.bandwidth_hz > 0.0) || !(link.carrier_hz > 0.0) || link.distance_m < 1.0 || link.num_clusters == 0 ||
            !(link.se_cap_bps_hz > 0.0) || link.shadow_sigma_db < 0.0 || link.ple < 0.0)
            throw ConfigError("link: invalid parameter");
    }

    std::optional<BlockageRegion> region() const
    {
        if (blockage == "none")
            return std::nullopt;
        return parse_blockage_region(blockage);
    }
    BlockageModel blockage_model() const { return {parse_blockage_variant(model)}; }

    GridPtr make_run_grid() const { return make_grid(grid_step, grid_step); }

    DesignSpec design_spec() const
    {
        return design_file.empty() ? preset_design_spec(design) : load_design_file(design_file);
    }
};

inline nlohmann::json to_json(const RunConfig &c)
{
    nlohmann::json j{{"design", c.design},
                     {"scheme", c.scheme},
                     {"blockage", c.blockage},
                     {"model", c.model},
                     {"grid_step", c.grid_step},
                     {"combining", c.combining},
                     {"metric", c.metric},
                     {"phase_bits", c.phase_bits},
                     {"drops", c.drops},
                     {"ue_combining", c.ue_combining},
                     {"link",
                      {{"eirp_dbm", c.link.eirp_dbm},
                       {"bandwidth_hz", c.link.bandwidth_hz},
                       {"noise_figure_db", c.link.noise_figure_db},
                       {"ple", c.link.ple},
                       {"shadow_sigma_db", c.link.shadow_sigma_db},
                       {"distance_m", c.link.distance_m},
                       {"carrier_hz", c.link.carrier_hz},
                       {"num_clusters", c.link.num_clusters},
                       {"se_cap_bps_hz", c.link.se_cap_bps_hz}}}};
    j["design_file"] = c.design_file;
    j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
    j["out"] = c.out;
    return j;
}

/// Overlays the keys present in `j` onto `c`. Unknown keys are errors.
inline void apply_json(RunConfig &c, const nlohmann::json &j)
{
    using detail::get_as;
    detail::require_keys(j, "config",
                         {"design", "design_file", "scheme", "blockage", "model", "seed", "grid_step", "combining",
                          "metric", "phase_bits", "out", "drops", "ue_combining", "link"});
    auto str = [&](const char *k, std::string &dst) {
        if (j.contains(k))
            dst = get_as<std::string>(j[k], std::string("config.") + k);
    };
    str("design", c.design);
    str("design_file", c.design_file);
    str("scheme", c.scheme);
    str("blockage", c.blockage);
    str("combining", c.combining);
    str("metric", c.metric);
    str("out", c.out);
    str("ue_combining", c.ue_combining);
    if (j.contains("model"))
        c.model = j["model"].is_number_integer() ? std::to_string(j["model"].get<int>())
                                                  : get_as<std::string>(j["model"], "config.model");
    if (j.contains("seed"))
    {
        if (j["seed"].is_null())
            c.seed.reset();
        else
            c.seed = get_as<std::uint64_t>(j["seed"], "config.seed");
    }
    if (j.contains("grid_step"))
        c.grid_step = get_as<double>(j["grid_step"], "config.grid_step");
    if (j.contains("phase_bits"))
        c.phase_bits = get_as<int>(j["phase_bits"], "config.phase_bits");
    if (j.contains("drops"))
        c.drops = get_as<std::size_t>(j["drops"], "config.drops");
    if (j.contains("link"))
    {
        const auto &l = j["link"];
        detail::require_keys(l, "config.link",
                             {"eirp_dbm", "bandwidth_hz", "noise_figure_db", "ple", "shadow_sigma_db", "distance_m",
                              "carrier_hz", "num_clusters", "se_cap_bps_hz"});
        auto num = [&](const char *k, double &dst) {
            if (l.contains(k))
                dst = get_as<double>(l[k], std::string("config.link.") + k);
        };
        num("eirp_dbm", c.link.eirp_dbm);
        num("bandwidth_hz", c.link.bandwidth_hz);
        num("noise_figure_db", c.link.noise_figure_db);
        num("ple", c.link.ple);
        num("shadow_sigma_db", c.link.shadow_sigma_db);
        num("distance_m", c.link.distance_m);
        num("carrier_hz", c.link.carrier_hz);
        num("se_cap_bps_hz", c.link.se_cap_bps_hz);
        if (l.contains("num_clusters"))
            c.link.num_clusters = get_as<std::size_t>(l["num_clusters"], "config.link.num_clusters");
    }
}

inline RunConfig load_run_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
    RunConfig c;
    apply_json(c, j);
    return c;
}

} // namespace sphcov
