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

#include "s2dn/parameters.hpp"

#include <cmath>

#include "s2dn/errors.hpp"

namespace s2dn {

Parameter::Parameter(std::string name, Matrix init)
    : name_(std::move(name)), node_(std::make_shared<ad::Node>()) {
  node_->grad = Matrix::Zero(init.rows(), init.cols());
  node_->value = std::move(init);
  node_->requires_grad = true;
}

Parameter ParameterStore::add(const std::string& name, Matrix init) {
  if (find(name)) throw ArgumentError("duplicate parameter name " + name);
  params_.emplace_back(name, std::move(init));
  return params_.back();
}

const Parameter* ParameterStore::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.name() == name) return &p;
  }
  return nullptr;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value().size());
  return n;
}

Matrix xavier_uniform(ad::Index rows, ad::Index cols, DetRng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (ad::Index i = 0; i < rows; ++i) {
    for (ad::Index j = 0; j < cols; ++j) m(i, j) = (2.0 * rng.uniform01() - 1.0) * a;
  }
  return m;
}

AdamOptimizer::AdamOptimizer(const ParameterStore& store, Options options)
    : params_(store.all()), options_(options) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.value().rows(), p.value().cols()));
    v_.push_back(Matrix::Zero(p.value().rows(), p.value().cols()));
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    const Matrix& g = p.grad();
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
    p.value().array() -= options_.learning_rate * (m_[i].array() / bc1) /
                         ((v_[i].array() / bc2).sqrt() + options_.epsilon);
  }
}

}  // namespace s2dn
