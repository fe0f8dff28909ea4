// Copyright 2026 The S2DN Authors. All Rights Reserved.
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

// Minimal reverse-mode automatic differentiation over dense row-major
// matrices. A forward pass builds a DAG of shared nodes; `backward` walks it
// in reverse topological order and accumulates into every node that
// requires a gradient. Parameter nodes outlive the graph and keep their
// accumulated gradient until explicitly zeroed.

#ifndef S2DN_AUTODIFF_HPP_
#define S2DN_AUTODIFF_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace s2dn::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Node {
  Matrix value;
  Matrix grad;  // empty until the first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void accumulate(const Matrix& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var constant(Matrix value);

  const Matrix& value() const { return node_->value; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates.
void backward(const Var& root);

// --- linear algebra
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // element-wise
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
// a (n x m) + b (1 x m) broadcast over rows.
Var add_row(const Var& a, const Var& b);
// a (n x m) scaled row-wise by c (n x 1).
Var mul_col(const Var& a, const Var& c);
// a (n x m) scaled column-wise by r (1 x m).
Var mul_row(const Var& a, const Var& r);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var sum_vars(std::span<const Var> parts);

// --- element-wise maps
Var sigmoid(const Var& a);
Var relu(const Var& a);
Var tanh(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var pow_scalar(const Var& a, double p);
// Gradient passes only where lo < a < hi.
Var clamp(const Var& a, double lo, double hi);

// --- row-wise reductions
Var softmax_rows(const Var& a);
Var log_softmax_rows(const Var& a);
Var rows_dot(const Var& a, const Var& b);      // n x 1
Var rows_cosine(const Var& a, const Var& b);   // n x 1; 0 for a zero row
Var mean_rows(const Var& a);                   // 1 x m
Var sum(const Var& a);                         // 1 x 1
Var sum_squares(const Var& a);                 // 1 x 1

// --- indexing
Var gather_rows(const Var& a, std::span<const std::uint32_t> idx);
// out (n x m): out[idx[e]] += a[e].
Var scatter_add_rows(const Var& a, std::span<const std::uint32_t> idx, Index n);

// Forward value `forward`, gradient routed unchanged into `surrogate`.
Var straight_through(Matrix forward, const Var& surrogate);

}  // namespace s2dn::ad

#endif  // S2DN_AUTODIFF_HPP_
