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

#include <functional>
#include <span>
#include <string>

#include "lrfusion/nn/autodiff.hpp"

namespace lrfusion::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of every parameter, then zeroes gradients.
void adam_step(ParamStore& params, const AdamConfig& cfg = {});

/// Elementwise smooth-l1 with transition at 1: 0.5x^2 if |x| < 1 else |x| - 0.5.
double smooth_l1(double x);
double smooth_l1(std::span<const double> xs);

/// -y log p - (1 - y) log(1 - p), with p clamped to [1e-7, 1 - 1e-7].
double binary_cross_entropy(double p, int y);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

// Builds a scalar loss on a fresh tape from the current parameter values.
using LossBuilder = std::function<Var(Tape&, ParamStore&)>;

/// Compares the tape gradient of every parameter entry against the
/// five-point central difference (fourth order), returning the max of
/// |a - n| / max(|a|, |n|, 1e-8). A stencil whose passes change the tape's
/// branch_pattern() straddles a kink; then a third-order one-sided stencil
/// on the unchanged side is used, or failing that the step shrinks 10x (at
/// most three times). Parameter gradients are left zeroed.
GradCheckResult grad_check(ParamStore& params, const LossBuilder& loss, double h = 3e-3);

}  // namespace lrfusion::nn
