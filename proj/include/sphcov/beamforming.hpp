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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codebook.hpp"
#include "gain_map.hpp"

namespace sphcov
{

// Scalar schemes over the responses of one polarization, E_i = E_{X,i}(theta, phi).

inline void require_nonempty(std::span<const cplx> r, const char *who)
{
    if (r.empty())
        throw ConfigError(std::string(who) + ": empty response list");
}

/// Maximum ratio combining: sum_i |E_i|^2.
inline double mrc_gain(std::span<const cplx> responses)
{
    require_nonempty(responses, "mrc_gain");
    double g = 0.0;
    for (const auto &e : responses)
        g += std::norm(e);
    return g;
}

/// Equal gain combining: (sum_i |E_i|)^2 / N.
inline double egc_gain(std::span<const cplx> responses)
{
    require_nonempty(responses, "egc_gain");
    double s = 0.0;
    for (const auto &e : responses)
        s += std::abs(e);
    return s * s / static_cast<double>(responses.size());
}

/// |w^H E|^2 without validation.
inline double beam_gain(std::span<const cplx> w, std::span<const cplx> responses) noexcept
{
    cplx acc{};
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += std::conj(w[i]) * responses[i];
    return std::norm(acc);
}

inline constexpr double unit_norm_tolerance = 1e-9;

/// Best beam of a codebook: max_j |sum_i w_ij^* E_i|^2. Every beam must have unit two-norm and length N.
inline double codebook_gain(std::span<const std::vector<cplx>> beams, std::span<const cplx> responses)
{
    require_nonempty(responses, "codebook_gain");
    if (beams.empty())
        throw ConfigError("codebook_gain: empty codebook");
    double best = 0.0;
    for (const auto &w : beams)
    {
        if (w.size() != responses.size())
            throw ConfigError("codebook_gain: beam length " + std::to_string(w.size()) + " does not match " +
                              std::to_string(responses.size()) + " responses");
        if (std::abs(squared_norm(w) - 1.0) > unit_norm_tolerance)
            throw ConfigError("codebook_gain: beam weights are not unit norm");
        best = std::max(best, beam_gain(w, responses));
    }
    return best;
}

/// Index of the best beam (lowest index on ties) and its gain. Beams are not validated.
inline std::pair<std::size_t, double> best_beam(std::span<const std::vector<cplx>> beams, std::span<const cplx> responses)
{
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < beams.size(); ++j)
    {
        const double g = beam_gain(beams[j], responses);
        if (g > best)
        {
            best = g;
            arg = j;
        }
    }
    return {arg, best};
}

/// Single best element: max_i |E_i|^2.
inline double selection_gain(std::span<const cplx> responses)
{
    require_nonempty(responses, "selection_gain");
    double g = 0.0;
    for (const auto &e : responses)
        g = std::max(g, std::norm(e));
    return g;
}

/// Total gain seen in both polarizations.
inline double total_gain(double gain_theta, double gain_phi) noexcept { return gain_theta + gain_phi; }

/// Best single polarization. Underestimates coverage at subarray edges; kept for comparison studies.
inline double max_gain(double gain_theta, double gain_phi) noexcept { return std::max(gain_theta, gain_phi); }

// ---------------------------------------------------------------------------------------------------------------

enum class Scheme
{
    mrc,
    egc,
    cbk,
    antsel
};

inline const char *to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::mrc:
        return "mrc";
    case Scheme::egc:
        return "egc";
    case Scheme::cbk:
        return "cbk";
    default:
        return "antsel";
    }
}

inline Scheme parse_scheme(const std::string &s)
{
    if (s == "mrc")
        return Scheme::mrc;
    if (s == "egc")
        return Scheme::egc;
    if (s == "cbk")
        return Scheme::cbk;
    if (s == "antsel")
        return Scheme::antsel;
    throw ConfigError("unknown scheme '" + s + "' (expected mrc, egc, cbk or antsel)");
}

/// Which elements MRC/EGC may combine coherently.
enum class CombiningScope
{
    per_subarray, // best subarray per direction and polarization (one RF chain per polarization)
    per_module    // all elements of a module in that polarization
};

inline const char *to_string(CombiningScope s) { return s == CombiningScope::per_subarray ? "subarray" : "module"; }

inline CombiningScope parse_combining_scope(const std::string &s)
{
    if (s == "subarray")
        return CombiningScope::per_subarray;
    if (s == "module")
        return CombiningScope::per_module;
    throw ConfigError("unknown combining scope '" + s + "' (expected subarray or module)");
}

enum class Metric
{
    total, // G_theta + G_phi
    max    // max(G_theta, G_phi)
};

inline const char *to_string(Metric m) { return m == Metric::total ? "total" : "max"; }

inline Metric parse_metric(const std::string &s)
{
    if (s == "total")
        return Metric::total;
    if (s == "max")
        return Metric::max;
    throw ConfigError("unknown metric '" + s + "' (expected total or max)");
}

struct EvaluateOptions
{
    CombiningScope scope = CombiningScope::per_subarray;
    Metric metric = Metric::total;
};

namespace detail
{
inline void check_codebook(const UeDesign &design, const Codebook &cb)
{
    if (cb.beams.empty())
        throw ConfigError("evaluate_design: empty codebook");
    for (const auto &b : cb.beams)
    {
        if (b.subarray_id >= design.subarray_count())
            throw ConfigError("evaluate_design: beam refers to subarray " + std::to_string(b.subarray_id) +
                              " but the design has " + std::to_string(design.subarray_count()));
        if (b.weights.size() != design.subarrays()[b.subarray_id]->size())
            throw ConfigError("evaluate_design: beam length does not match its subarray");
        if (std::abs(squared_norm(b.weights) - 1.0) > unit_norm_tolerance)
            throw ConfigError("evaluate_design: beam weights are not unit norm");
    }
}
} // namespace detail

/// Gain of `scheme` in polarization p at grid cell `cell`. The codebook must already be validated.
inline double scheme_gain_at(const UeDesign &design, Scheme scheme, const Codebook *codebook, std::size_t cell,
                             Polarization p, CombiningScope scope, std::vector<cplx> &scratch)
{
    const auto &subs = design.subarrays();
    auto gather = [&](const Subarray &s) {
        for (std::size_t e = 0; e < s.size(); ++e)
            scratch.push_back(s.response(e, cell, p));
    };

    double best = 0.0;
    switch (scheme)
    {
    case Scheme::mrc:
    case Scheme::egc: {
        auto gain = scheme == Scheme::mrc ? mrc_gain : egc_gain;
        if (scope == CombiningScope::per_subarray)
        {
            for (const auto *s : subs)
            {
                scratch.clear();
                gather(*s);
                best = std::max(best, gain(scratch));
            }
        }
        else
        {
            for (const auto &m : design.modules())
            {
                scratch.clear();
                for (const auto &s : m.subarrays)
                    gather(s);
                best = std::max(best, gain(scratch));
            }
        }
        break;
    }
    case Scheme::cbk:
        for (const auto &b : codebook->beams)
        {
            scratch.clear();
            gather(*subs[b.subarray_id]);
            best = std::max(best, beam_gain(b.weights, scratch));
        }
        break;
    case Scheme::antsel:
        for (const auto *s : subs)
            for (std::size_t e = 0; e < s->size(); ++e)
                best = std::max(best, std::norm(s->response(e, cell, p)));
        break;
    }
    return best;
}

/**
 * Per-direction gain map of a design under one scheme. For each polarization, MRC and EGC pick the best
 * subarray (or module, per options.scope), the codebook scheme the best beam of any subarray, and antenna
 * selection the best element of the whole design. The two polarizations are then merged per options.metric.
 */
inline GainMap evaluate_design(const UeDesign &design, Scheme scheme, const Codebook *codebook = nullptr,
                               const EvaluateOptions &opt = {})
{
    if (scheme == Scheme::cbk)
    {
        if (!codebook)
            throw ConfigError("evaluate_design: scheme cbk requires a codebook");
        detail::check_codebook(design, *codebook);
    }
    const auto &grid = design.grid();
    GainMap map;
    map.grid = grid;
    map.design = design.name();
    map.scheme = to_string(scheme);
    map.metric = to_string(opt.metric);
    map.theta.resize(grid->size());
    map.phi.resize(grid->size());
    map.total.resize(grid->size());

    std::vector<cplx> scratch;
    for (std::size_t i = 0; i < grid->size(); ++i)
    {
        const double gt = scheme_gain_at(design, scheme, codebook, i, Polarization::theta, opt.scope, scratch);
        const double gp = scheme_gain_at(design, scheme, codebook, i, Polarization::phi, opt.scope, scratch);
        map.theta[i] = gt;
        map.phi[i] = gp;
        map.total[i] = opt.metric == Metric::total ? total_gain(gt, gp) : max_gain(gt, gp);
    }
    return map;
}

inline GainMap evaluate_design(const UeDesign &design, Scheme scheme, const Codebook &codebook,
                               const EvaluateOptions &opt = {})
{
    return evaluate_design(design, scheme, &codebook, opt);
}

} // namespace sphcov
