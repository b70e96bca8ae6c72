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

#include "lrfusion/nn/optim.hpp"

#include <algorithm>
#include <cmath>

#include "lrfusion/error.hpp"

namespace lrfusion::nn {

void adam_step(ParamStore& params, const AdamConfig& cfg) {
  params.set_step_count(params.step_count() + 1);
  const double t = static_cast<double>(params.step_count());
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (Param& p : params) {
    p.m = cfg.beta1 * p.m + (1.0 - cfg.beta1) * p.grad;
    p.v = cfg.beta2 * p.v + (1.0 - cfg.beta2) * p.grad.cwiseAbs2();
    const Matrix m_hat = p.m / c1;
    const Matrix v_hat = p.v / c2;
    p.value.array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
    p.grad.setZero();
  }
}

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += smooth_l1(x);
  return s;
}

double binary_cross_entropy(double p, int y) {
  const double q = std::clamp(p, 1e-7, 1.0 - 1e-7);
  return y != 0 ? -std::log(q) : -std::log(1.0 - q);
}

namespace {

// A step that crosses a relu or smooth-l1 boundary is retried up to this
// many times, 10x smaller each time.
constexpr int kMaxStepShrinks = 4;

}  // namespace

GradCheckResult grad_check(ParamStore& params, const LossBuilder& loss, double h) {
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  params.zero_grad();
  {
    Tape tape;
    const Var out = loss(tape, params);
    tape.backward(out);
  }
  std::vector<Matrix> analytic;
  for (const Param& p : params) analytic.push_back(p.grad);
  params.zero_grad();

  std::vector<std::uint8_t> base_pattern;
  double base_value = 0.0;
  {
    Tape tape;
    base_value = tape.scalar(loss(tape, params));
    base_pattern = tape.branch_pattern();
  }

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = params[k];
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      double& theta = p.value.data()[i];
      const double saved = theta;
      // Loss at saved + offset, and whether that pass stayed on the base
      // pass's piecewise-smooth branch.
      auto at = [&](double offset, bool& same) {
        theta = saved + offset;
        Tape tape;
        const double v = tape.scalar(loss(tape, params));
        same = tape.branch_pattern() == base_pattern;
        theta = saved;
        return v;
      };
      double numeric = 0.0;
      double step = h;
      for (int shrink = 0; shrink < kMaxStepShrinks; ++shrink, step /= 10.0) {
        bool s_f1, s_f2, s_b1, s_b2;
        const double f1 = at(step, s_f1);
        const double f2 = at(2 * step, s_f2);
        const double b1 = at(-step, s_b1);
        const double b2 = at(-2 * step, s_b2);
        numeric = (8.0 * (f1 - b1) - (f2 - b2)) / (12.0 * step);
        if (s_f1 && s_f2 && s_b1 && s_b2) break;
        // A kink on one side only: third-order one-sided stencil on the
        // clean side, which differentiates the same piece as the tape.
        bool s_3 = false;
        if (s_f1 && s_f2) {
          const double f3 = at(3 * step, s_3);
          if (s_3) {
            numeric = (-11.0 * base_value + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * step);
            break;
          }
        }
        if (s_b1 && s_b2) {
          const double b3 = at(-3 * step, s_3);
          if (s_3) {
            numeric = -(-11.0 * base_value + 18.0 * b1 - 9.0 * b2 + 2.0 * b3) / (6.0 * step);
            break;
          }
        }
      }
      const double a = analytic[k].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p.name;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace lrfusion::nn
