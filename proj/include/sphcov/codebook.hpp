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
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "design.hpp"

namespace sphcov
{

/// One analog beam: unit-norm weights on the elements of one subarray.
struct Beam
{
    std::vector<cplx> weights;
    std::size_t subarray_id = 0;
    Polarization feed = Polarization::theta;
    Direction boresight;
};

struct Codebook
{
    std::string design;
    std::vector<Beam> beams;

    std::size_t size() const noexcept { return beams.size(); }
};

inline double squared_norm(std::span<const cplx> w)
{
    double s = 0.0;
    for (const auto &x : w)
        s += std::norm(x);
    return s;
}

/// Snaps every phase to the nearest of 2^bits uniform levels (level 0 at phase 0), keeps magnitudes and
/// renormalizes to unit norm.
inline std::vector<cplx> quantize_phase(std::span<const cplx> weights, int bits)
{
    if (bits < 1 || bits > 48)
        throw ConfigError("quantize_phase: bits must lie in [1, 48], got " + std::to_string(bits));
    const auto levels = static_cast<std::int64_t>(1) << bits;
    const double step = 2.0 * pi / static_cast<double>(levels);
    std::vector<cplx> out;
    out.reserve(weights.size());
    for (const auto &w : weights)
    {
        const auto k = static_cast<std::int64_t>(std::llround(std::arg(w) / step));
        const auto k_wrapped = ((k % levels) + levels) % levels;
        out.push_back(std::polar(std::abs(w), step * static_cast<double>(k_wrapped)));
    }
    const double n = std::sqrt(squared_norm(out));
    if (n > 0.0)
        for (auto &x : out)
            x /= n;
    return out;
}

/// Equal-amplitude co-phasing weights w_i = exp(j arg r_i) / sqrt(N), phase-quantized to `bits`.
/// Phases are snapped after a common rotation chosen to maximize |w^H r|^2, which yields the best weight vector
/// on the level grid; gain at the target is nondecreasing in `bits`. The first element keeps the level nearest
/// its unquantized phase.
inline std::vector<cplx> steering_weights(std::span<const cplx> responses, int bits)
{
    if (responses.empty())
        throw ConfigError("steering_weights: no elements");
    if (bits < 1 || bits > 48)
        throw ConfigError("steering_weights: bits must lie in [1, 48], got " + std::to_string(bits));
    const std::size_t n = responses.size();
    const auto levels = static_cast<std::int64_t>(1) << bits;
    const double step = 2.0 * pi / static_cast<double>(levels);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i)
        phase[i] = std::abs(responses[i]) > 0.0 ? std::arg(responses[i]) : 0.0;

    // rounding of element i flips where (phase_i + offset) / step crosses a half-integer; the quantized vector
    // is constant between consecutive flips, so one offset per interval covers every candidate
    std::vector<double> flips(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double f = std::fmod(0.5 * step - phase[i], step);
        flips[i] = f < 0.0 ? f + step : f;
    }
    std::sort(flips.begin(), flips.end());

    auto snap = [&](double offset) {
        std::vector<std::int64_t> k(n);
        for (std::size_t i = 0; i < n; ++i)
            k[i] = static_cast<std::int64_t>(std::llround((phase[i] + offset) / step));
        return k;
    };
    auto gain = [&](const std::vector<std::int64_t> &k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += std::abs(responses[i]) * std::polar(1.0, phase[i] - step * static_cast<double>(k[i]));
        return std::norm(acc);
    };

    std::vector<std::int64_t> best = snap(0.0);
    double best_gain = gain(best);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double next = i + 1 < n ? flips[i + 1] : flips[0] + step;
        const auto k = snap(0.5 * (flips[i] + next));
        const double g = gain(k);
        if (g > best_gain * (1.0 + 1e-12))
        {
            best_gain = g;
            best = k;
        }
    }

    const auto shift = best[0] - static_cast<std::int64_t>(std::llround(phase[0] / step));
    std::vector<cplx> w(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto k = (((best[i] - shift) % levels) + levels) % levels;
        w[i] = std::polar(amp, step * static_cast<double>(k));
    }
    return w;
}

/// Conjugate-steering beam of `sub` toward `target`, using the subarray's feed polarization.
inline Beam steering_beam(const Subarray &sub, const Direction &target, int phase_bits)
{
    const auto r = sub.responses_at(target, sub.feed());
    return Beam{steering_weights(r, phase_bits), sub.id(), sub.feed(), target};
}

/// Steering targets from the subarray's codebook plan: a grid of offsets, symmetric about the boresight, with
/// beam_spacing_deg between neighbors along each scan axis.
inline std::vector<Direction> beam_targets(const SubarraySpec &s)
{
    const Vec3 b = normalized(s.boresight);
    std::vector<std::vector<double>> offsets;
    for (std::size_t a = 0; a < s.beams_per_axis.size(); ++a)
    {
        std::vector<double> o;
        const auto n = s.beams_per_axis[a];
        for (std::size_t k = 0; k < n; ++k)
            o.push_back((static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) * s.beam_spacing_deg);
        offsets.push_back(std::move(o));
    }
    std::vector<Direction> out;
    if (offsets.empty())
        return out;

    std::vector<std::size_t> idx(offsets.size(), 0);
    while (true)
    {
        Vec3 v = b;
        for (std::size_t a = 0; a < offsets.size(); ++a)
        {
            const Vec3 ax = normalized(s.scan_axes[a]);
            const double t = std::tan(deg2rad(offsets[a][idx[a]]));
            for (int c = 0; c < 3; ++c)
                v[c] += t * ax[c];
        }
        out.push_back(direction_from_vector(v));
        // odometer over axes, last axis fastest
        std::size_t a = offsets.size();
        while (a > 0)
        {
            --a;
            if (++idx[a] < offsets[a].size())
                break;
            idx[a] = 0;
            if (a == 0)
                return out;
        }
    }
}

/// Codebook for every subarray of the design per its plan (beam counts per Table-style presets).
inline Codebook generate_design_codebook(const UeDesign &design, int phase_bits = 5)
{
    Codebook cb{design.name(), {}};
    for (const auto *s : design.subarrays())
        for (const auto &t : beam_targets(s->spec()))
            cb.beams.push_back(steering_beam(*s, t, phase_bits));
    return cb;
}

// ---------------------------------------------------------------------------------------------------------------
// Beam management overhead

/// Initial acquisition: one SSB burst period per subarray-polarization instance, split across RF chains.
inline double acquisition_overhead(const UeDesign &design, double ssb_period_ms = 20.0, double rf_chains = 2.0)
{
    if (!(ssb_period_ms > 0.0) || !(rf_chains > 0.0))
        throw ConfigError("acquisition_overhead: inputs must be positive");
    return ssb_period_ms * static_cast<double>(design.subarray_count()) / rf_chains;
}

enum class RefinementMode
{
    csirs,
    ssb
};

struct Numerology
{
    double slot_ms = 0.25;            // 60 kHz subcarrier spacing
    std::size_t symbols_per_slot = 14;
    std::size_t symbols_per_beam = 4; // multi-symbol averaging
    double ssb_period_ms = 20.0;
};

/// Worst-case UE beam refinement time: slot-granular over CSI-RS, or one SSB period per narrow beam.
inline double refinement_overhead(std::size_t narrow_beams = 4, RefinementMode mode = RefinementMode::csirs,
                                  const Numerology &num = {})
{
    if (narrow_beams < 1)
        throw ConfigError("refinement_overhead: need at least one narrow beam");
    if (mode == RefinementMode::ssb)
        return num.ssb_period_ms * static_cast<double>(narrow_beams);
    const std::size_t symbols = num.symbols_per_beam * narrow_beams;
    const std::size_t slots = (symbols + num.symbols_per_slot - 1) / num.symbols_per_slot;
    return static_cast<double>(slots) * num.slot_ms;
}

/// Airtime actually occupied by the CSI-RS refinement symbols (no slot rounding).
inline double refinement_symbol_time(std::size_t narrow_beams = 4, const Numerology &num = {})
{
    return static_cast<double>(num.symbols_per_beam * narrow_beams) * num.slot_ms /
           static_cast<double>(num.symbols_per_slot);
}

// ---------------------------------------------------------------------------------------------------------------
// Text format: subarray_id,pol,boresight_theta,boresight_phi,re_1,im_1,...,re_N,im_N

inline void save_codebook(const Codebook &cb, std::ostream &os)
{
    char buf[64];
    for (const auto &b : cb.beams)
    {
        os << b.subarray_id << ',' << to_string(b.feed);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", b.boresight.theta(), b.boresight.phi());
        os << buf;
        for (const auto &w : b.weights)
        {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", w.real(), w.imag());
            os << buf;
        }
        os << '\n';
    }
}

inline Codebook load_codebook(std::istream &is, std::string design = {})
{
    Codebook cb{std::move(design), {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::vector<std::string> tok;
        std::size_t pos = 0;
        while (true)
        {
            const auto next = line.find(',', pos);
            tok.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
            if (next == std::string::npos)
                break;
            pos = next + 1;
        }
        if (tok.size() < 6 || (tok.size() - 4) % 2 != 0)
            throw ParseError("beam row needs subarray_id,pol,theta,phi and re,im pairs", line_no);
        auto num = [&](const std::string &t) {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(t, &used);
                if (used != t.size() || !std::isfinite(v))
                    throw std::invalid_argument(t);
                return v;
            }
            catch (const std::exception &)
            {
                throw ParseError("cannot parse number '" + t + "'", line_no);
            }
        };
        Beam b;
        const double id = num(tok[0]);
        if (id < 0 || id != std::floor(id))
            throw ParseError("subarray_id must be a nonnegative integer", line_no);
        b.subarray_id = static_cast<std::size_t>(id);
        try
        {
            b.feed = parse_polarization(tok[1]);
            b.boresight = Direction(num(tok[2]), num(tok[3]));
        }
        catch (const ConfigError &e)
        {
            throw ParseError(e.what(), line_no);
        }
        for (std::size_t i = 4; i < tok.size(); i += 2)
            b.weights.emplace_back(num(tok[i]), num(tok[i + 1]));
        if (std::abs(squared_norm(b.weights) - 1.0) > 1e-9)
            throw ParseError("beam weights are not unit norm", line_no);
        cb.beams.push_back(std::move(b));
    }
    return cb;
}

} // namespace sphcov
