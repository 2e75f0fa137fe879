// creaklab/adam.hpp

// Copyright 2026  The creaklab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CREAKLAB_ADAM_HPP_
#define CREAKLAB_ADAM_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "creaklab/autograd.hpp"
#include "creaklab/error.hpp"

namespace creaklab::nn {

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long step_count = 0;
  std::vector<std::vector<double>> first_moment;   // one buffer per parameter
  std::vector<std::vector<double>> second_moment;
};

/// One Adam update over parallel lists of parameter and gradient buffers.
/// Moment buffers are created on the first call and must keep their shapes.
inline void adam_step(AdamState &state, std::span<const std::span<double>> params,
                      std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size())
    fail(ErrorKind::ShapeMismatch, "adam_step: " + std::to_string(params.size()) +
                                       " parameters but " +
                                       std::to_string(grads.size()) + " gradients");
  if (state.first_moment.empty()) {
    for (const auto &p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size())
    fail(ErrorKind::ShapeMismatch, "adam_step: parameter list changed size");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].size() != grads[i].size() ||
        params[i].size() != state.first_moment[i].size())
      fail(ErrorKind::ShapeMismatch,
           "adam_step: parameter " + std::to_string(i) + " has " +
               std::to_string(params[i].size()) + " values, gradient " +
               std::to_string(grads[i].size()));

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto &m = state.first_moment[i];
    auto &v = state.second_moment[i];
    for (std::size_t j = 0; j < params[i].size(); ++j) {
      const double g = grads[i][j];
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      params[i][j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

/// Tensor overload; parameters without an accumulated gradient count as
/// zero-gradient.
inline void adam_step(AdamState &state, std::span<Tensor> params) {
  std::vector<std::span<double>> values;
  std::vector<std::span<const double>> grads;
  std::vector<std::vector<double>> zeros;
  zeros.reserve(params.size());
  for (auto &p : params) {
    values.push_back(p.mutable_data());
    if (p.grad().size() == p.numel()) {
      grads.push_back(p.grad());
    } else {
      zeros.emplace_back(p.numel(), 0.0);
      grads.push_back(zeros.back());
    }
  }
  adam_step(state, values, grads);
}

}  // namespace creaklab::nn

#endif  // CREAKLAB_ADAM_HPP_
