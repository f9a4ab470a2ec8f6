// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJLAB_TRAJLAB_HPP_
#define TRAJLAB_TRAJLAB_HPP_

// Umbrella header pulling in the whole library.

#include "trajlab/csv.hpp"
#include "trajlab/errors.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/interaction.hpp"
#include "trajlab/io.hpp"
#include "trajlab/lane_graph.hpp"
#include "trajlab/losses.hpp"
#include "trajlab/metrics.hpp"
#include "trajlab/pipeline.hpp"
#include "trajlab/pretext.hpp"
#include "trajlab/rng.hpp"
#include "trajlab/scenario.hpp"
#include "trajlab/scene.hpp"
#include "trajlab/svg.hpp"
#include "trajlab/trajectory.hpp"

#endif  // TRAJLAB_TRAJLAB_HPP_
