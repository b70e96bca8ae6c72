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

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace lrfusion::nn {

using Matrix = Eigen::MatrixXd;

// A trainable dense array with its gradient and Adam moments.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;
};

// Insertion-ordered parameter container. References returned by add() stay
// valid for the lifetime of the store.
class ParamStore {
 public:
  Param& add(const std::string& name, Matrix init);
  Param& at(std::string_view name);
  const Param& at(std::string_view name) const;
  Param* find(std::string_view name);
  const Param* find(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t num_scalars() const;
  Param& operator[](std::size_t i) { return params_[i]; }
  const Param& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();

  long step_count() const { return step_count_; }
  void set_step_count(long n) { step_count_ = n; }

 private:
  std::deque<Param> params_;
  long step_count_ = 0;
};

struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
};

// Reverse-mode tape over dense matrices. Columns are samples; rows are
// features. Nodes are evaluated eagerly and replayed backwards in creation
// order.
class Tape {
 public:
  Var constant(Matrix value);
  // Gradients reaching this node are added into p.grad by backward().
  Var param(Param& p);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var add_bias(Var x, Var bias);    // bias is rows x 1, broadcast over columns
  Var scale_rows(Var x, Var gain);  // gain is rows x 1, broadcast over columns
  Var scale(Var x, double s);
  Var relu(Var x);
  // Per-column standardization to zero mean and unit variance.
  Var normalize_columns(Var x, double eps);
  Var concat_cols(Var a, Var b);
  Var softmax_rows(Var x);
  Var smooth_l1(Var x);  // 1x1 sum of elementwise smooth-l1 (transition at 1)
  Var sum(Var x);        // 1x1

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  const Matrix& grad(Var v) const { return nodes_.at(v.id).grad; }
  double scalar(Var v) const;

  /// Seeds d(out) = upstream, propagates to every node, and accumulates into
  /// the gradients of the referenced parameters. Node gradients are reset on
  /// each call; parameter gradients are not.
  void backward(Var out, const Matrix& upstream);
  void backward(Var out);

  std::size_t size() const { return nodes_.size(); }
  void clear() {
    nodes_.clear();
    branches_.clear();
  }

  /// Which side of each piecewise boundary every recorded element fell on:
  /// relu (x > 0) and smooth_l1 (|x| < 1), in recording order. Two forward
  /// passes with equal patterns lie on the same smooth piece.
  const std::vector<std::uint8_t>& branch_pattern() const { return branches_; }

 private:
  using Backprop = std::function<void(Tape&, std::size_t self)>;
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Param* param = nullptr;
    Backprop backprop;
  };

  Var push(Matrix value, std::vector<Var> parents, Backprop backprop);
  Node& node(Var v) { return nodes_.at(v.id); }
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  void accumulate(Var v, const Matrix& g);

  void record_branches(const Eigen::ArrayXXd& taken);

  std::vector<Node> nodes_;
  std::vector<std::uint8_t> branches_;
};

}  // namespace lrfusion::nn
