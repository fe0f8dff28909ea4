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

#ifndef S2DN_PARAMETERS_HPP_
#define S2DN_PARAMETERS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "s2dn/autodiff.hpp"
#include "s2dn/rng.hpp"

namespace s2dn {

using ad::Matrix;

// Train mode draws stochastic noise (Gumbel, concrete); infer mode is a
// pure function of the inputs.
enum class Mode { kTrain, kInfer };

// Handle to a trainable tensor. Copies share storage.
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Matrix init);

  const std::string& name() const { return name_; }
  ad::Var var() const { return ad::Var(node_); }
  Matrix& value() { return node_->value; }
  const Matrix& value() const { return node_->value; }
  Matrix& grad() { return node_->grad; }
  const Matrix& grad() const { return node_->grad; }
  void zero_grad() { node_->grad.setZero(); }

 private:
  std::string name_;
  std::shared_ptr<ad::Node> node_;
};

// Ordered registry of every trainable tensor (Θ). Names are canonical and
// used as checkpoint keys.
class ParameterStore {
 public:
  Parameter add(const std::string& name, Matrix init);
  const std::vector<Parameter>& all() const { return params_; }
  const Parameter* find(const std::string& name) const;
  void zero_grad();
  std::size_t num_scalars() const;

 private:
  std::vector<Parameter> params_;
};

// U(-a, a) with a = sqrt(6 / (rows + cols)).
Matrix xavier_uniform(ad::Index rows, ad::Index cols, DetRng& rng);

class AdamOptimizer {
 public:
  struct Options {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  AdamOptimizer(const ParameterStore& store, Options options);

  // Applies one update from the accumulated gradients.
  void step();
  long steps() const { return t_; }

 private:
  std::vector<Parameter> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  Options options_;
  long t_ = 0;
};

}  // namespace s2dn

#endif  // S2DN_PARAMETERS_HPP_
