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

#include "geometry.hpp"
#include "antenna.hpp"
#include "design.hpp"
#include "codebook.hpp"
#include "gain_map.hpp"
#include "beamforming.hpp"
#include "blockage.hpp"
#include "coverage.hpp"
#include "sls.hpp"
#include "design_io.hpp"
#include "config.hpp"
