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

#include "lrfusion/nn/autodiff.hpp"

#include <algorithm>
#include <string>

#include "lrfusion/error.hpp"

namespace lrfusion::nn {
namespace {

void require_shape(bool ok, const char* op) {
  if (!ok) throw Error(ErrorCode::kDimensionMismatch, std::string("shape mismatch in ") + op);
}

}  // namespace

Param& ParamStore::add(const std::string& name, Matrix init) {
  if (find(name)) throw Error(ErrorCode::kInvalidArgument, "duplicate parameter " + name);
  Param p;
  p.name = name;
  p.grad = Matrix::Zero(init.rows(), init.cols());
  p.m = Matrix::Zero(init.rows(), init.cols());
  p.v = Matrix::Zero(init.rows(), init.cols());
  p.value = std::move(init);
  params_.push_back(std::move(p));
  return params_.back();
}

Param* ParamStore::find(std::string_view name) {
  for (Param& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Param* ParamStore::find(std::string_view name) const {
  for (const Param& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Param& ParamStore::at(std::string_view name) {
  if (Param* p = find(name)) return *p;
  throw Error(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(name));
}

const Param& ParamStore::at(std::string_view name) const {
  if (const Param* p = find(name)) return *p;
  throw Error(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(name));
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const Param& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (Param& p : params_) p.grad.setZero();
}

Var Tape::push(Matrix value, std::vector<Var> parents, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = std::any_of(parents.begin(), parents.end(),
                                [&](Var p) { return nodes_.at(p.id).requires_grad; });
  if (n.requires_grad) n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (n.requires_grad) n.grad += g;
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

Var Tape::param(Param& p) {
  Node n;
  n.value = p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return {nodes_.size() - 1};
}

double Tape::scalar(Var v) const {
  const Matrix& m = value(v);
  require_shape(m.rows() == 1 && m.cols() == 1, "scalar");
  return m(0, 0);
}

Var Tape::matmul(Var a, Var b) {
  require_shape(value(a).cols() == value(b).rows(), "matmul");
  return push(value(a) * value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs(a)) t.accumulate(a, g * t.value(b).transpose());
    if (t.needs(b)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var Tape::add(Var a, Var b) {
  require_shape(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "add");
  return push(value(a) + value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::sub(Var a, Var b) {
  require_shape(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "sub");
  return push(value(a) - value(b), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(a, g);
    if (t.needs(b)) t.accumulate(b, -g);
  });
}

Var Tape::add_bias(Var x, Var bias) {
  require_shape(value(bias).cols() == 1 && value(bias).rows() == value(x).rows(), "add_bias");
  Matrix out = value(x).colwise() + value(bias).col(0);
  return push(std::move(out), {x, bias}, [x, bias](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(x, g);
    if (t.needs(bias)) t.accumulate(bias, g.rowwise().sum());
  });
}

Var Tape::scale_rows(Var x, Var gain) {
  require_shape(value(gain).cols() == 1 && value(gain).rows() == value(x).rows(), "scale_rows");
  Matrix out = value(gain).col(0).asDiagonal() * value(x);
  return push(std::move(out), {x, gain}, [x, gain](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs(x)) t.accumulate(x, t.value(gain).col(0).asDiagonal() * g);
    if (t.needs(gain)) t.accumulate(gain, g.cwiseProduct(t.value(x)).rowwise().sum());
  });
}

Var Tape::scale(Var x, double s) {
  return push(value(x) * s, {x}, [x, s](Tape& t, std::size_t self) {
    t.accumulate(x, t.nodes_[self].grad * s);
  });
}

void Tape::record_branches(const Eigen::ArrayXXd& taken) {
  for (Eigen::Index i = 0; i < taken.size(); ++i) branches_.push_back(taken.data()[i] != 0.0);
}

Var Tape::relu(Var x) {
  record_branches((value(x).array() > 0.0).cast<double>());
  return push(value(x).cwiseMax(0.0), {x}, [x](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    t.accumulate(x, (t.value(x).array() > 0.0).select(g, 0.0));
  });
}

Var Tape::normalize_columns(Var x, double eps) {
  const Matrix& in = value(x);
  const double n = static_cast<double>(in.rows());
  const Eigen::RowVectorXd mean = in.colwise().sum() / n;
  const Matrix centered = in.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / n;
  const Eigen::RowVectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix out = centered.array().rowwise() * inv_std.array();
  return push(std::move(out), {x}, [x, inv_std](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& xhat = t.nodes_[self].value;
    const double rows = static_cast<double>(g.rows());
    const Eigen::RowVectorXd g_mean = g.colwise().sum() / rows;
    const Eigen::RowVectorXd gx_mean = g.cwiseProduct(xhat).colwise().sum() / rows;
    Matrix dx = (g.rowwise() - g_mean) - (xhat.array().rowwise() * gx_mean.array()).matrix();
    dx = dx.array().rowwise() * inv_std.array();
    t.accumulate(x, dx);
  });
}

Var Tape::concat_cols(Var a, Var b) {
  require_shape(value(a).rows() == value(b).rows(), "concat_cols");
  Matrix out(value(a).rows(), value(a).cols() + value(b).cols());
  out << value(a), value(b);
  const Eigen::Index split = value(a).cols();
  return push(std::move(out), {a, b}, [a, b, split](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs(a)) t.accumulate(a, g.leftCols(split));
    if (t.needs(b)) t.accumulate(b, g.rightCols(g.cols() - split));
  });
}

Var Tape::softmax_rows(Var x) {
  const Matrix& in = value(x);
  const Eigen::VectorXd row_max = in.rowwise().maxCoeff();
  Matrix e = (in.colwise() - row_max).array().exp();
  const Eigen::VectorXd denom = e.rowwise().sum();
  Matrix out = denom.cwiseInverse().asDiagonal() * e;
  return push(std::move(out), {x}, [x](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& y = t.nodes_[self].value;
    const Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    t.accumulate(x, y.cwiseProduct(g.colwise() - dot));
  });
}

Var Tape::smooth_l1(Var x) {
  const Matrix& in = value(x);
  record_branches((in.array().abs() < 1.0).cast<double>());
  const double loss =
      (in.array().abs() < 1.0).select(0.5 * in.array().square(), in.array().abs() - 0.5).sum();
  return push(Matrix::Constant(1, 1, loss), {x}, [x](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad(0, 0);
    const Matrix& v = t.value(x);
    const Matrix local = (v.array().abs() < 1.0).select(v, v.array().sign().matrix());
    t.accumulate(x, local * g);
  });
}

Var Tape::sum(Var x) {
  return push(Matrix::Constant(1, 1, value(x).sum()), {x}, [x](Tape& t, std::size_t self) {
    const double g = t.nodes_[self].grad(0, 0);
    const Matrix& v = t.value(x);
    t.accumulate(x, Matrix::Constant(v.rows(), v.cols(), g));
  });
}

void Tape::backward(Var out, const Matrix& upstream) {
  require_shape(upstream.rows() == value(out).rows() && upstream.cols() == value(out).cols(),
                "backward seed");
  for (Node& n : nodes_) {
    if (n.requires_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  if (!nodes_[out.id].requires_grad) return;
  nodes_[out.id].grad = upstream;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    if (n.param) {
      n.param->grad += n.grad;
    } else if (n.backprop) {
      n.backprop(*this, i);
    }
  }
}

void Tape::backward(Var out) { backward(out, Matrix::Ones(1, 1)); }

}  // namespace lrfusion::nn
