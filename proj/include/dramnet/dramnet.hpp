/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Convenience header pulling in the whole toolkit.

#pragma once

#include <string_view>

#include "dramnet/architecture.hpp"
#include "dramnet/dataset_io.hpp"
#include "dramnet/dram_sim.hpp"
#include "dramnet/errors.hpp"
#include "dramnet/imaging.hpp"
#include "dramnet/metrics.hpp"
#include "dramnet/model.hpp"
#include "dramnet/model_io.hpp"
#include "dramnet/pgm.hpp"
#include "dramnet/pipeline.hpp"
#include "dramnet/presets.hpp"
#include "dramnet/training.hpp"

namespace dramnet {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace dramnet
