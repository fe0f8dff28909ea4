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

#include "s2dn/autodiff.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "s2dn/errors.hpp"

namespace s2dn::ad {

namespace {

using Fn = std::function<void(Node&)>;

Var make(Matrix value, std::vector<std::shared_ptr<Node>> parents, Fn fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const auto& p : parents) {
    if (p->requires_grad) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(fn);
  }
  return Var(std::move(node));
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

// Element-wise map with derivative expressed through input and output.
template <typename F, typename D>
Var unary(const Var& a, F f, D df) {
  Matrix y = a.value().unaryExpr(f);
  return make(std::move(y), {a.node()}, [df](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Matrix g = self.grad.array() *
               p.value.binaryExpr(self.value, df).array();
    p.accumulate(g);
  });
}

}  // namespace

Var Var::constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

void backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) {
    throw ShapeError("backward: root must be 1x1");
  }
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->grad.size() != 0) n->backward_fn(*n);
  }
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix y = a.value() * b.value();
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad * pb.value.transpose());
    if (pb.requires_grad) pb.accumulate(pa.value.transpose() * self.grad);
  });
}

Var transpose(const Var& a) {
  Matrix y = a.value().transpose();
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (p.requires_grad) p.accumulate(self.grad.transpose());
  });
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  Matrix y = a.value() + b.value();
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) p->accumulate(self.grad);
    }
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  Matrix y = a.value() - b.value();
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
    if (self.parents[1]->requires_grad) self.parents[1]->accumulate(-self.grad);
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  Matrix y = a.value().cwiseProduct(b.value());
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad.cwiseProduct(pb.value));
    if (pb.requires_grad) pb.accumulate(self.grad.cwiseProduct(pa.value));
  });
}

Var scale(const Var& a, double s) {
  Matrix y = a.value() * s;
  return make(std::move(y), {a.node()}, [s](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad * s);
  });
}

Var add_scalar(const Var& a, double s) {
  Matrix y = a.value().array() + s;
  return make(std::move(y), {a.node()}, [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
  });
}

Var add_row(const Var& a, const Var& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ShapeError("add_row: bias must be 1x" + std::to_string(a.cols()));
  }
  Matrix y = a.value().rowwise() + b.value().row(0);
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
    if (self.parents[1]->requires_grad) {
      self.parents[1]->accumulate(self.grad.colwise().sum());
    }
  });
}

Var mul_col(const Var& a, const Var& c) {
  if (c.cols() != 1 || c.rows() != a.rows()) {
    throw ShapeError("mul_col: scale must be " + std::to_string(a.rows()) + "x1");
  }
  Matrix y = a.value().array().colwise() * c.value().col(0).array();
  return make(std::move(y), {a.node(), c.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pc = *self.parents[1];
    if (pa.requires_grad) {
      Matrix g = self.grad.array().colwise() * pc.value.col(0).array();
      pa.accumulate(g);
    }
    if (pc.requires_grad) {
      Matrix g = self.grad.cwiseProduct(pa.value).rowwise().sum();
      pc.accumulate(g);
    }
  });
}

Var mul_row(const Var& a, const Var& r) {
  if (r.rows() != 1 || r.cols() != a.cols()) {
    throw ShapeError("mul_row: scale must be 1x" + std::to_string(a.cols()));
  }
  Matrix y = a.value().array().rowwise() * r.value().row(0).array();
  return make(std::move(y), {a.node(), r.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pr = *self.parents[1];
    if (pa.requires_grad) {
      Matrix g = self.grad.array().rowwise() * pr.value.row(0).array();
      pa.accumulate(g);
    }
    if (pr.requires_grad) {
      Matrix g = self.grad.cwiseProduct(pa.value).colwise().sum();
      pr.accumulate(g);
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Index rows = parts[0].rows();
  Index cols = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row mismatch");
    cols += p.cols();
    parents.push_back(p.node());
  }
  Matrix y(rows, cols);
  Index off = 0;
  for (const auto& p : parts) {
    y.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return make(std::move(y), std::move(parents), [](Node& self) {
    Index off = 0;
    for (auto& p : self.parents) {
      Index c = p->value.cols();
      if (p->requires_grad) p->accumulate(self.grad.middleCols(off, c));
      off += c;
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Index cols = parts[0].cols();
  Index rows = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column mismatch");
    rows += p.rows();
    parents.push_back(p.node());
  }
  Matrix y(rows, cols);
  Index off = 0;
  for (const auto& p : parts) {
    y.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return make(std::move(y), std::move(parents), [](Node& self) {
    Index off = 0;
    for (auto& p : self.parents) {
      Index r = p->value.rows();
      if (p->requires_grad) p->accumulate(self.grad.middleRows(off, r));
      off += r;
    }
  });
}

Var sum_vars(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("sum_vars: no inputs");
  Matrix y = parts[0].value();
  std::vector<std::shared_ptr<Node>> parents{parts[0].node()};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    check_same_shape(parts[0], parts[i], "sum_vars");
    y += parts[i].value();
    parents.push_back(parts[i].node());
  }
  return make(std::move(y), std::move(parents), [](Node& self) {
    for (auto& p : self.parents) {
      if (p->requires_grad) p->accumulate(self.grad);
    }
  });
}

Var sigmoid(const Var& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Var relu(const Var& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var tanh(const Var& a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var exp(const Var& a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var pow_scalar(const Var& a, double p) {
  return unary(
      a, [p](double x) { return std::pow(x, p); },
      [p](double x, double) { return p * std::pow(x, p - 1.0); });
}

Var clamp(const Var& a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Var softmax_rows(const Var& a) {
  Matrix y = a.value();
  for (Index i = 0; i < y.rows(); ++i) {
    double mx = y.row(i).maxCoeff();
    y.row(i) = (y.row(i).array() - mx).exp();
    y.row(i) /= y.row(i).sum();
  }
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Matrix gy = self.grad.cwiseProduct(self.value);
    Eigen::VectorXd dot = gy.rowwise().sum();
    Matrix g = gy - (self.value.array().colwise() * dot.array()).matrix();
    p.accumulate(g);
  });
}

Var log_softmax_rows(const Var& a) {
  Matrix y = a.value();
  for (Index i = 0; i < y.rows(); ++i) {
    double mx = y.row(i).maxCoeff();
    double lse = mx + std::log((y.row(i).array() - mx).exp().sum());
    y.row(i).array() -= lse;
  }
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Eigen::VectorXd gs = self.grad.rowwise().sum();
    Matrix soft = self.value.array().exp();
    Matrix g = self.grad - (soft.array().colwise() * gs.array()).matrix();
    p.accumulate(g);
  });
}

Var rows_dot(const Var& a, const Var& b) {
  check_same_shape(a, b, "rows_dot");
  Matrix y = a.value().cwiseProduct(b.value()).rowwise().sum();
  return make(std::move(y), {a.node(), b.node()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      pa.accumulate((pb.value.array().colwise() * self.grad.col(0).array()).matrix());
    }
    if (pb.requires_grad) {
      pb.accumulate((pa.value.array().colwise() * self.grad.col(0).array()).matrix());
    }
  });
}

Var rows_cosine(const Var& a, const Var& b) {
  check_same_shape(a, b, "rows_cosine");
  const Index n = a.rows();
  Matrix y(n, 1);
  Eigen::VectorXd na = a.value().rowwise().norm();
  Eigen::VectorXd nb = b.value().rowwise().norm();
  for (Index i = 0; i < n; ++i) {
    double denom = na(i) * nb(i);
    y(i, 0) = denom > 1e-12 ? a.value().row(i).dot(b.value().row(i)) / denom : 0.0;
  }
  return make(std::move(y), {a.node(), b.node()}, [na, nb](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const Index n = self.value.rows();
    Matrix ga = Matrix::Zero(n, pa.value.cols());
    Matrix gb = Matrix::Zero(n, pb.value.cols());
    for (Index i = 0; i < n; ++i) {
      double denom = na(i) * nb(i);
      if (denom <= 1e-12) continue;
      double c = self.value(i, 0);
      double g = self.grad(i, 0);
      ga.row(i) = g * (pb.value.row(i) / denom - c * pa.value.row(i) / (na(i) * na(i)));
      gb.row(i) = g * (pa.value.row(i) / denom - c * pb.value.row(i) / (nb(i) * nb(i)));
    }
    if (pa.requires_grad) pa.accumulate(ga);
    if (pb.requires_grad) pb.accumulate(gb);
  });
}

Var mean_rows(const Var& a) {
  if (a.rows() == 0) throw ShapeError("mean_rows: empty input");
  Matrix y = a.value().colwise().mean();
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    const Index n = p.value.rows();
    Matrix g = self.grad.replicate(n, 1) / static_cast<double>(n);
    p.accumulate(g);
  });
}

Var sum(const Var& a) {
  Matrix y(1, 1);
  y(0, 0) = a.value().sum();
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.accumulate(Matrix::Constant(p.value.rows(), p.value.cols(), self.grad(0, 0)));
  });
}

Var sum_squares(const Var& a) {
  Matrix y(1, 1);
  y(0, 0) = a.value().squaredNorm();
  return make(std::move(y), {a.node()}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.accumulate(p.value * (2.0 * self.grad(0, 0)));
  });
}

Var gather_rows(const Var& a, std::span<const std::uint32_t> idx) {
  Matrix y(static_cast<Index>(idx.size()), a.cols());
  for (std::size_t e = 0; e < idx.size(); ++e) {
    if (idx[e] >= a.rows()) throw ShapeError("gather_rows: index out of range");
    y.row(static_cast<Index>(e)) = a.value().row(idx[e]);
  }
  std::vector<std::uint32_t> index(idx.begin(), idx.end());
  return make(std::move(y), {a.node()}, [index = std::move(index)](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Matrix g = Matrix::Zero(p.value.rows(), p.value.cols());
    for (std::size_t e = 0; e < index.size(); ++e) {
      g.row(index[e]) += self.grad.row(static_cast<Index>(e));
    }
    p.accumulate(g);
  });
}

Var scatter_add_rows(const Var& a, std::span<const std::uint32_t> idx, Index n) {
  if (static_cast<Index>(idx.size()) != a.rows()) {
    throw ShapeError("scatter_add_rows: index count must equal row count");
  }
  Matrix y = Matrix::Zero(n, a.cols());
  for (std::size_t e = 0; e < idx.size(); ++e) {
    if (idx[e] >= n) throw ShapeError("scatter_add_rows: index out of range");
    y.row(idx[e]) += a.value().row(static_cast<Index>(e));
  }
  std::vector<std::uint32_t> index(idx.begin(), idx.end());
  return make(std::move(y), {a.node()}, [index = std::move(index)](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    Matrix g(static_cast<Index>(index.size()), self.grad.cols());
    for (std::size_t e = 0; e < index.size(); ++e) {
      g.row(static_cast<Index>(e)) = self.grad.row(index[e]);
    }
    p.accumulate(g);
  });
}

Var straight_through(Matrix forward, const Var& surrogate) {
  if (forward.rows() != surrogate.rows() || forward.cols() != surrogate.cols()) {
    throw ShapeError("straight_through: shape mismatch");
  }
  return make(std::move(forward), {surrogate.node()}, [](Node& self) {
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(self.grad);
  });
}

}  // namespace s2dn::ad
