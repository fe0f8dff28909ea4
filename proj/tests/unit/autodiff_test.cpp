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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "s2dn/parameters.hpp"
#include "support/fixtures.hpp"

namespace s2dn {
namespace {

using testing::finite_difference_check;

Parameter random_param(const std::string& name, ad::Index r, ad::Index c, std::uint64_t seed,
                       double lo = -1.0, double hi = 1.0) {
  DetRng rng(seed);
  Matrix m(r, c);
  for (ad::Index i = 0; i < m.size(); ++i) m.data()[i] = lo + (hi - lo) * rng.uniform01();
  return Parameter(name, std::move(m));
}

// Reduces any output to a scalar with fixed, non-uniform weights so that
// every output entry contributes a distinct gradient.
ad::Var weighted_sum(const ad::Var& v) {
  Matrix w(v.rows(), v.cols());
  for (ad::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.3 + 0.17 * static_cast<double>(i % 7);
  return ad::sum(ad::mul(v, ad::Var::constant(std::move(w))));
}

struct UnaryCase {
  const char* name;
  std::function<ad::Var(const ad::Var&)> op;
  double lo;
  double hi;
};

class UnaryGradTest : public ::testing::TestWithParam<UnaryCase> {};

TEST_P(UnaryGradTest, MatchesFiniteDifferences) {
  const auto& c = GetParam();
  auto a = random_param("a", 3, 4, 11, c.lo, c.hi);
  auto check = finite_difference_check([&] { return weighted_sum(c.op(a.var())); }, {a});
  EXPECT_LT(check.max_rel_error, 1e-6) << c.name;
}

INSTANTIATE_TEST_SUITE_P(
    Ops, UnaryGradTest,
    ::testing::Values(
        UnaryCase{"transpose", [](const ad::Var& a) { return ad::transpose(a); }, -1, 1},
        UnaryCase{"scale", [](const ad::Var& a) { return ad::scale(a, -2.5); }, -1, 1},
        UnaryCase{"add_scalar", [](const ad::Var& a) { return ad::add_scalar(a, 0.7); }, -1, 1},
        UnaryCase{"sigmoid", [](const ad::Var& a) { return ad::sigmoid(a); }, -3, 3},
        UnaryCase{"relu", [](const ad::Var& a) { return ad::relu(a); }, 0.1, 2},
        UnaryCase{"tanh", [](const ad::Var& a) { return ad::tanh(a); }, -2, 2},
        UnaryCase{"exp", [](const ad::Var& a) { return ad::exp(a); }, -1, 1},
        UnaryCase{"log", [](const ad::Var& a) { return ad::log(a); }, 0.5, 2},
        UnaryCase{"pow", [](const ad::Var& a) { return ad::pow_scalar(a, 1.5); }, 0.5, 2},
        UnaryCase{"clamp", [](const ad::Var& a) { return ad::clamp(a, -0.5, 0.5); }, -0.4, 0.4},
        UnaryCase{"softmax", [](const ad::Var& a) { return ad::softmax_rows(a); }, -2, 2},
        UnaryCase{"log_softmax", [](const ad::Var& a) { return ad::log_softmax_rows(a); }, -2, 2},
        UnaryCase{"mean_rows", [](const ad::Var& a) { return ad::mean_rows(a); }, -1, 1},
        UnaryCase{"sum_squares", [](const ad::Var& a) { return ad::sum_squares(a); }, -1, 1},
        UnaryCase{"gather",
                  [](const ad::Var& a) {
                    std::vector<std::uint32_t> idx{2, 0, 2, 1};
                    return ad::gather_rows(a, idx);
                  },
                  -1, 1},
        UnaryCase{"scatter",
                  [](const ad::Var& a) {
                    std::vector<std::uint32_t> idx{4, 0, 4};
                    return ad::scatter_add_rows(a, idx, 5);
                  },
                  -1, 1}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(AutodiffTest, BinaryOpsMatchFiniteDifferences) {
  auto a = random_param("a", 3, 4, 1);
  auto b = random_param("b", 3, 4, 2);
  auto m = random_param("m", 4, 2, 3);
  auto row = random_param("row", 1, 4, 4);
  auto col = random_param("col", 3, 1, 5);
  std::vector<std::pair<const char*, std::function<ad::Var()>>> cases = {
      {"matmul", [&] { return ad::matmul(a.var(), m.var()); }},
      {"add", [&] { return ad::add(a.var(), b.var()); }},
      {"sub", [&] { return ad::sub(a.var(), b.var()); }},
      {"mul", [&] { return ad::mul(a.var(), b.var()); }},
      {"add_row", [&] { return ad::add_row(a.var(), row.var()); }},
      {"mul_row", [&] { return ad::mul_row(a.var(), row.var()); }},
      {"mul_col", [&] { return ad::mul_col(a.var(), col.var()); }},
      {"rows_dot", [&] { return ad::rows_dot(a.var(), b.var()); }},
      {"rows_cosine", [&] { return ad::rows_cosine(a.var(), b.var()); }},
      {"concat_cols",
       [&] {
         std::vector<ad::Var> p{a.var(), col.var(), b.var()};
         return ad::concat_cols(p);
       }},
      {"concat_rows",
       [&] {
         std::vector<ad::Var> p{a.var(), row.var(), b.var()};
         return ad::concat_rows(p);
       }},
      {"sum_vars",
       [&] {
         std::vector<ad::Var> p{a.var(), b.var(), a.var()};
         return ad::sum_vars(p);
       }},
  };
  for (const auto& [name, fn] : cases) {
    auto check = finite_difference_check([&] { return weighted_sum(fn()); },
                                          {a, b, m, row, col});
    EXPECT_LT(check.max_rel_error, 1e-6) << name << " worst " << check.worst;
  }
}

TEST(AutodiffTest, ChainedExpression) {
  auto w = random_param("w", 4, 3, 9);
  auto x = random_param("x", 5, 4, 10);
  auto loss = [&] {
    auto h = ad::tanh(ad::matmul(x.var(), w.var()));
    auto p = ad::log_softmax_rows(ad::add_scalar(ad::mul(h, h), 0.1));
    return ad::add(ad::sum(p), ad::scale(ad::sum_squares(w.var()), 0.5));
  };
  auto check = finite_difference_check(loss, {w, x});
  EXPECT_LT(check.max_rel_error, 1e-6) << check.worst;
}

TEST(AutodiffTest, SharedParameterAccumulates) {
  Parameter a("a", Matrix::Constant(1, 1, 3.0));
  auto y = ad::add(ad::mul(a.var(), a.var()), a.var());  // a^2 + a
  ad::backward(y);
  EXPECT_DOUBLE_EQ(a.grad()(0, 0), 7.0);
}

TEST(AutodiffTest, ConstantsCarryNoGraph) {
  auto c = ad::Var::constant(Matrix::Ones(2, 2));
  auto y = ad::sigmoid(ad::matmul(c, c));
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(y.node()->parents.empty());
}

TEST(AutodiffTest, StraightThroughForwardAndBackward) {
  Parameter s("s", (Matrix(1, 3) << 0.2, 0.5, 0.3).finished());
  Matrix hard = (Matrix(1, 3) << 0, 1, 0).finished();
  auto y = ad::straight_through(hard, s.var());
  EXPECT_EQ(y.value(), hard);
  ad::backward(weighted_sum(y));
  Matrix expected = (Matrix(1, 3) << 0.3, 0.47, 0.64).finished();
  EXPECT_TRUE(s.grad().isApprox(expected, 1e-12));
}

TEST(AutodiffTest, CosineOfZeroRowIsZero) {
  auto a = ad::Var::constant(Matrix::Zero(1, 3));
  auto b = ad::Var::constant(Matrix::Ones(1, 3));
  EXPECT_EQ(ad::rows_cosine(a, b).scalar(), 0.0);
}

TEST(AutodiffTest, SoftmaxIsStableForLargeInputs) {
  auto a = ad::Var::constant((Matrix(1, 3) << 1000, 1001, 999).finished());
  auto s = ad::softmax_rows(a);
  EXPECT_TRUE(s.value().allFinite());
  EXPECT_NEAR(s.value().sum(), 1.0, 1e-12);
  EXPECT_TRUE(ad::log_softmax_rows(a).value().allFinite());
}

}  // namespace
}  // namespace s2dn
