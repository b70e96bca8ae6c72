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

#include "lrfusion/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "lrfusion/error.hpp"
#include "lrfusion/rng.hpp"

namespace lrfusion::nn {
namespace {

std::string pname(const std::string& prefix, int layer, const char* what) {
  return prefix + "." + std::to_string(layer) + "." + what;
}

void check_input(const MlpSpec& spec, const Matrix& x) {
  if (x.rows() != spec.widths.front()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "MLP expects " + std::to_string(spec.widths.front()) + " input rows, got " +
                    std::to_string(x.rows()));
  }
}

void check_param(const Param& p, Eigen::Index rows, Eigen::Index cols) {
  if (p.value.rows() != rows || p.value.cols() != cols) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter " + p.name + " has the wrong shape");
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (widths.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "MLP needs at least an input and an output width");
  }
  for (int w : widths) {
    if (w <= 0) throw Error(ErrorCode::kInvalidArgument, "MLP widths must be positive");
  }
  if (static_cast<int>(layer_norm.size()) != num_layers()) {
    throw Error(ErrorCode::kInvalidArgument, "MLP needs one layer_norm flag per layer");
  }
  if (layer_norm.back()) {
    throw Error(ErrorCode::kInvalidArgument, "the output layer cannot be normalized");
  }
}

void init_mlp(const MlpSpec& spec, ParamStore& params, std::uint64_t seed,
              const std::string& prefix) {
  spec.validate();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < spec.num_layers(); ++i) {
    const int in = spec.widths[i];
    const int out = spec.widths[i + 1];
    const double std_dev = std::sqrt(2.0 / in);
    Matrix w(out, in);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = std_dev * normal(rng);
    }
    params.add(pname(prefix, i, "weight"), std::move(w));
    params.add(pname(prefix, i, "bias"), Matrix::Zero(out, 1));
    if (spec.layer_norm[i]) {
      params.add(pname(prefix, i, "ln_gain"), Matrix::Ones(out, 1));
      params.add(pname(prefix, i, "ln_bias"), Matrix::Zero(out, 1));
    }
  }
}

Var mlp_apply(Tape& tape, const MlpSpec& spec, ParamStore& params, Var x,
              const std::string& prefix) {
  spec.validate();
  check_input(spec, tape.value(x));
  Var h = x;
  for (int i = 0; i < spec.num_layers(); ++i) {
    Param& w = params.at(pname(prefix, i, "weight"));
    Param& b = params.at(pname(prefix, i, "bias"));
    check_param(w, spec.widths[i + 1], spec.widths[i]);
    check_param(b, spec.widths[i + 1], 1);
    h = tape.add_bias(tape.matmul(tape.param(w), h), tape.param(b));
    if (i + 1 == spec.num_layers()) break;
    if (spec.layer_norm[i]) {
      h = tape.normalize_columns(h, spec.norm_eps);
      h = tape.scale_rows(h, tape.param(params.at(pname(prefix, i, "ln_gain"))));
      h = tape.add_bias(h, tape.param(params.at(pname(prefix, i, "ln_bias"))));
    }
    if (spec.activation == Activation::kRelu) h = tape.relu(h);
  }
  return h;
}

MlpForward mlp_forward(const MlpSpec& spec, ParamStore& params, const Matrix& x,
                       const std::string& prefix) {
  MlpForward fwd;
  fwd.output = mlp_apply(fwd.tape, spec, params, fwd.tape.constant(x), prefix);
  return fwd;
}

Matrix mlp_eval(const MlpSpec& spec, const ParamStore& params, const Matrix& x,
                const std::string& prefix) {
  spec.validate();
  check_input(spec, x);
  Matrix h = x;
  for (int i = 0; i < spec.num_layers(); ++i) {
    const Param& w = params.at(pname(prefix, i, "weight"));
    const Param& b = params.at(pname(prefix, i, "bias"));
    check_param(w, spec.widths[i + 1], spec.widths[i]);
    check_param(b, spec.widths[i + 1], 1);
    h = (w.value * h).colwise() + b.value.col(0);
    if (i + 1 == spec.num_layers()) break;
    if (spec.layer_norm[i]) {
      const double n = static_cast<double>(h.rows());
      const Eigen::RowVectorXd mean = h.colwise().sum() / n;
      const Matrix centered = h.rowwise() - mean;
      const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / n;
      const Eigen::RowVectorXd inv_std = (var.array() + spec.norm_eps).rsqrt();
      const Matrix xhat = centered.array().rowwise() * inv_std.array();
      h = params.at(pname(prefix, i, "ln_gain")).value.col(0).asDiagonal() * xhat;
      h = h.colwise() + params.at(pname(prefix, i, "ln_bias")).value.col(0);
    }
    if (spec.activation == Activation::kRelu) h = h.cwiseMax(0.0);
  }
  return h;
}

}  // namespace lrfusion::nn
