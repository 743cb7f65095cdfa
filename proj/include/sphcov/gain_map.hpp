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
#include <string>
#include <vector>

#include "geometry.hpp"

namespace sphcov
{

/// Per-direction array gain on a grid (linear). `theta`/`phi` hold the per-polarization components when known.
struct GainMap
{
    GridPtr grid;
    std::vector<double> total;
    std::vector<double> theta;
    std::vector<double> phi;

    // labels carried into CDFs and reports
    std::string design;
    std::string scheme;
    std::string metric = "total";
    std::string blockage = "none";

    std::size_t size() const noexcept { return total.size(); }
    bool has_components() const noexcept { return theta.size() == total.size() && phi.size() == total.size(); }

    void validate() const
    {
        if (!grid)
            throw ConfigError("GainMap: null grid");
        if (total.size() != grid->size())
            throw ConfigError("GainMap: size does not match grid");
        for (double g : total)
            if (!(g >= 0.0) || !std::isfinite(g))
                throw ConfigError("GainMap: gains must be finite and nonnegative");
    }
};

} // namespace sphcov
