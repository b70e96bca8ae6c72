/******************************************************************************
 * Copyright 2026 The lrfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <filesystem>
#include <iosfwd>

#include "lrfusion/nn/autodiff.hpp"

namespace lrfusion::nn {

// Binary named-array container:
//   "LRFCKPT1" | u64 count | count x { u32 name_len | name | u64 rows |
//   u64 cols | rows*cols f64, column-major }
// Integers and doubles are little-endian. Only parameter values are stored;
// optimizer moments restart from zero on load.
void write_checkpoint(std::ostream& out, const ParamStore& params);
ParamStore read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params);
/// Throws Error(kCheckpointMissing) if the file does not exist and
/// Error(kIoFailure) if it is malformed.
ParamStore load_checkpoint(const std::filesystem::path& path);

}  // namespace lrfusion::nn
