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

#include <cstdint>
#include <string>
#include <vector>

#include "lrfusion/nn/autodiff.hpp"

namespace lrfusion::nn {

enum class Activation { kRelu, kIdentity };

// Fully-connected stack. widths = {input, hidden..., output}; layer i maps
// widths[i] -> widths[i + 1]. Hidden layers apply (optional) layer
// normalization with learnable gain/bias, then the activation. The final
// layer is purely affine.
struct MlpSpec {
  std::vector<int> widths;
  Activation activation = Activation::kRelu;
  std::vector<bool> layer_norm;  // one flag per layer; the last must be false
  double norm_eps = 1e-9;

  int num_layers() const { return static_cast<int>(widths.size()) - 1; }
  void validate() const;
};

/// Adds "<prefix>.<i>.{weight,bias,ln_gain,ln_bias}" to `params`. Weights are
/// He-normal, biases zero, norm gains one.
void init_mlp(const MlpSpec& spec, ParamStore& params, std::uint64_t seed,
              const std::string& prefix = "mlp");

/// Records the forward pass of `x` (widths[0] x batch) on `tape`.
Var mlp_apply(Tape& tape, const MlpSpec& spec, ParamStore& params, Var x,
              const std::string& prefix = "mlp");

struct MlpForward {
  Tape tape;
  Var output;

  const Matrix& value() const { return tape.value(output); }
};

/// Convenience wrapper: fresh tape, constant input, recorded forward pass.
/// Throws Error(kDimensionMismatch) if x.rows() != widths[0].
MlpForward mlp_forward(const MlpSpec& spec, ParamStore& params, const Matrix& x,
                       const std::string& prefix = "mlp");

/// Tape-free evaluation over frozen parameters; safe to call concurrently.
Matrix mlp_eval(const MlpSpec& spec, const ParamStore& params, const Matrix& x,
                const std::string& prefix = "mlp");

}  // namespace lrfusion::nn
