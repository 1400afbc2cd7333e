// Copyright 2026 The Dresslab Authors
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


// JSON pipeline configuration. Every key is optional; unknown keys are an
// error so a typo cannot silently fall back to a default.

#ifndef DRESSLAB_TOOLS_CONFIG_IO_H_
#define DRESSLAB_TOOLS_CONFIG_IO_H_

#include <string>

#include <json.hpp>

#include "dresslab/pipeline.h"

namespace dresslab {

// Overlays `j` onto `base`. Throws RangeError on unknown keys or bad values.
PipelineConfig ParsePipelineConfig(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig LoadPipelineConfig(const std::string& path);
nlohmann::json PipelineConfigJson(const PipelineConfig& cfg);

}  // namespace dresslab

#endif  // DRESSLAB_TOOLS_CONFIG_IO_H_
