// creaklab/autograd.hpp

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

// Define-by-run reverse-mode differentiation over dense f64 tensors.
//
// Every op returns a new Tensor whose node remembers its inputs and a closure
// that pushes the node's gradient into them. Tensor::backward() orders the
// graph topologically and runs the closures once each. Leaf gradients
// accumulate across backward() calls until zero_grad(); interior gradients
// are rebuilt on every call.
//
// Only the handful of ops the creak models need are provided: 1-D strided
// convolution, fully connected layers, ReLU, inverted dropout, sigmoid and
// masked binary cross-entropy on logits, plus a few elementwise helpers.
// Matrix products go through Eigen on a single thread, so results are
// bitwise reproducible for a given build.

#ifndef CREAKLAB_AUTOGRAD_HPP_
#define CREAKLAB_AUTOGRAD_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "creaklab/error.hpp"
#include "creaklab/rng.hpp"

namespace creaklab::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape &s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_str(const Shape &s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first needed
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node &)> backward_fn;  // null for leaves
  const char *op = "leaf";

  std::vector<double> &grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    auto n = std::make_shared<Node>();
    n->value.assign(shape_numel(shape), 0.0);
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false) {
    if (shape_numel(shape) != data.size())
      fail(ErrorKind::ShapeMismatch, "data of length " +
                                         std::to_string(data.size()) +
                                         " for shape " + shape_str(shape));
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  bool defined() const { return node_ != nullptr; }
  const Shape &shape() const { return node_->shape; }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> data() const { return node_->value; }
  /// Mutable access for optimizers and initializers; do not use on tensors
  /// that are part of a live graph.
  std::span<double> mutable_data() { return node_->value; }

  /// Empty span when no gradient has been accumulated yet.
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad_buffer(); }

  void zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
  }

  double item() const {
    if (numel() != 1)
      fail(ErrorKind::ShapeMismatch, "item() on tensor of shape " +
                                         shape_str(shape()));
    return node_->value[0];
  }

  void backward() const;

  Node &node() const { return *node_; }
  const std::shared_ptr<Node> &node_ptr() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// While alive, ops on this thread record no graph (inference mode).
class NoGradGuard {
 public:
  NoGradGuard() : previous_(enabled()) { enabled() = false; }
  ~NoGradGuard() { enabled() = previous_; }
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

  static bool &enabled() {
    thread_local bool grad_enabled = true;
    return grad_enabled;
  }

 private:
  bool previous_;
};

namespace detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

inline MapMat as_mat(std::vector<double> &v, std::size_t rows, std::size_t cols) {
  return MapMat(v.data(), static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(cols));
}
inline ConstMapMat as_mat(const std::vector<double> &v, std::size_t rows,
                          std::size_t cols) {
  return ConstMapMat(v.data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
}

/// Builds an op result. The backward closure is kept only when some input
/// needs a gradient.
inline Tensor make_result(Shape shape, std::vector<double> value,
                          std::vector<std::shared_ptr<Node>> inputs,
                          std::function<void(Node &)> backward_fn,
                          const char *op) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->op = op;
  if (NoGradGuard::enabled())
    for (const auto &in : inputs)
      n->requires_grad = n->requires_grad || in->requires_grad;
  if (n->requires_grad) {
    n->inputs = std::move(inputs);
    n->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(n));
}

inline void require_same_shape(const Tensor &a, const Tensor &b,
                               const char *op) {
  if (a.shape() != b.shape())
    fail(ErrorKind::ShapeMismatch, std::string(op) + ": shapes " +
                                       shape_str(a.shape()) + " and " +
                                       shape_str(b.shape()));
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

inline void check_finite(const Tensor &t, const std::string &what) {
  for (double v : t.data())
    if (!std::isfinite(v))
      fail(ErrorKind::NonFinite, what + " contains NaN or Inf");
}

inline void Tensor::backward() const {
  if (numel() != 1)
    fail(ErrorKind::NonScalarLoss, "backward() needs a scalar, got shape " +
                                       shape_str(shape()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto &[n, next] = stack.back();
    if (next < n->inputs.size()) {
      Node *child = n->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second)
        stack.push_back({child, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (Node *n : order)
    if (n->backward_fn) n->grad.assign(n->value.size(), 0.0);
  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward_fn) (*it)->backward_fn(**it);

  for (Node *n : order) {
    if (n->backward_fn) continue;
    for (double g : n->grad)
      if (!std::isfinite(g))
        fail(ErrorKind::NonFinite, "gradient contains NaN or Inf");
  }
}

// ---------------------------------------------------------------------------
// Elementwise helpers

inline Tensor add(const Tensor &a, const Tensor &b) {
  detail::require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()},
      [](Node &self) {
        for (auto &in : self.inputs) {
          if (!in->requires_grad) continue;
          auto &g = in->grad_buffer();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
      },
      "add");
}

inline Tensor mul(const Tensor &a, const Tensor &b) {
  detail::require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()},
      [](Node &self) {
        Node &x = *self.inputs[0], &y = *self.inputs[1];
        if (x.requires_grad) {
          auto &g = x.grad_buffer();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
        }
        if (y.requires_grad) {
          auto &g = y.grad_buffer();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
        }
      },
      "mul");
}

inline Tensor scale(const Tensor &a, double c) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr()},
      [c](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * c;
      },
      "scale");
}

inline Tensor sum(const Tensor &a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  return detail::make_result(
      {1}, {acc}, {a.node_ptr()},
      [](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (double &v : g) v += self.grad[0];
      },
      "sum");
}

inline Tensor relu(const Tensor &a) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, a.data()[i]);
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr()},
      [](Node &self) {
        Node &x = *self.inputs[0];
        auto &g = x.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i)
          if (x.value[i] > 0.0) g[i] += self.grad[i];
      },
      "relu");
}

inline Tensor sigmoid(const Tensor &a) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = detail::stable_sigmoid(a.data()[i]);
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr()},
      [](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i)
          g[i] += self.grad[i] * self.value[i] * (1.0 - self.value[i]);
      },
      "sigmoid");
}

/// Inverted dropout: survivors are scaled by 1/(1-p) during training, so
/// inference is the identity. With p == 0 or training == false the input
/// tensor itself is returned.
inline Tensor dropout(const Tensor &a, double p, Rng &rng, bool training) {
  if (!(p >= 0.0 && p < 1.0))
    fail(ErrorKind::InvalidInput, "dropout rate must be in [0, 1)");
  if (!training || p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  auto mask = std::make_shared<std::vector<double>>(a.numel());
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*mask)[i] = rng.uniform() >= p ? keep_scale : 0.0;
    out[i] = a.data()[i] * (*mask)[i];
  }
  return detail::make_result(
      a.shape(), std::move(out), {a.node_ptr()},
      [mask](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*mask)[i];
      },
      "dropout");
}

inline Tensor reshape(const Tensor &a, Shape shape) {
  if (shape_numel(shape) != a.numel())
    fail(ErrorKind::ShapeMismatch, "reshape " + shape_str(a.shape()) + " to " +
                                       shape_str(shape));
  std::vector<double> out(a.data().begin(), a.data().end());
  return detail::make_result(
      std::move(shape), std::move(out), {a.node_ptr()},
      [](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      },
      "reshape");
}

// ---------------------------------------------------------------------------
// Layers

/// x: [N, in], weight: [out, in], bias: [out] -> [N, out].
inline Tensor linear(const Tensor &x, const Tensor &weight, const Tensor &bias) {
  if (x.rank() != 2 || weight.rank() != 2 || bias.rank() != 1 ||
      x.dim(1) != weight.dim(1) || bias.dim(0) != weight.dim(0))
    fail(ErrorKind::ShapeMismatch, "linear: x " + shape_str(x.shape()) +
                                       ", weight " + shape_str(weight.shape()) +
                                       ", bias " + shape_str(bias.shape()));
  const std::size_t n = x.dim(0), in = x.dim(1), out_dim = weight.dim(0);
  std::vector<double> out(n * out_dim);
  {
    auto y = detail::as_mat(out, n, out_dim);
    auto xm = detail::as_mat(x.node().value, n, in);
    auto wm = detail::as_mat(weight.node().value, out_dim, in);
    y.noalias() = xm * wm.transpose();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < out_dim; ++c)
        out[r * out_dim + c] += bias.data()[c];
  }
  return detail::make_result(
      {n, out_dim}, std::move(out),
      {x.node_ptr(), weight.node_ptr(), bias.node_ptr()},
      [n, in, out_dim](Node &self) {
        Node &xn = *self.inputs[0], &wn = *self.inputs[1], &bn = *self.inputs[2];
        auto dy = detail::as_mat(self.grad, n, out_dim);
        if (xn.requires_grad)
          detail::as_mat(xn.grad_buffer(), n, in).noalias() +=
              dy * detail::as_mat(wn.value, out_dim, in);
        if (wn.requires_grad)
          detail::as_mat(wn.grad_buffer(), out_dim, in).noalias() +=
              dy.transpose() * detail::as_mat(xn.value, n, in);
        if (bn.requires_grad) {
          auto &gb = bn.grad_buffer();
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < out_dim; ++c)
              gb[c] += self.grad[r * out_dim + c];
        }
      },
      "linear");
}

inline std::size_t conv1d_output_length(std::size_t length, std::size_t kernel,
                                        std::size_t stride,
                                        std::size_t padding) {
  if (stride == 0) fail(ErrorKind::ShapeMismatch, "conv1d: stride must be >= 1");
  if (kernel == 0 || kernel > length + 2 * padding)
    fail(ErrorKind::ShapeMismatch,
         "conv1d: kernel " + std::to_string(kernel) + " longer than padded "
         "input " + std::to_string(length + 2 * padding));
  return (length + 2 * padding - kernel) / stride + 1;
}

/// Cross-correlation. input: [C_in, T] or [B, C_in, T]; weight:
/// [C_out, C_in, K]; bias: [C_out]. Output keeps the input's rank with
/// T' = floor((T + 2*padding - K) / stride) + 1.
inline Tensor conv1d(const Tensor &input, const Tensor &weight,
                     const Tensor &bias, std::size_t stride,
                     std::size_t padding) {
  const bool batched = input.rank() == 3;
  if (!(input.rank() == 2 || batched) || weight.rank() != 3 || bias.rank() != 1)
    fail(ErrorKind::ShapeMismatch, "conv1d: input " + shape_str(input.shape()) +
                                       ", weight " + shape_str(weight.shape()));
  const std::size_t batch = batched ? input.dim(0) : 1;
  const std::size_t c_in = input.dim(batched ? 1 : 0);
  const std::size_t length = input.dim(batched ? 2 : 1);
  const std::size_t c_out = weight.dim(0), kernel = weight.dim(2);
  if (weight.dim(1) != c_in || bias.dim(0) != c_out)
    fail(ErrorKind::ShapeMismatch,
         "conv1d: input channels " + std::to_string(c_in) + " vs weight " +
             shape_str(weight.shape()) + ", bias " + shape_str(bias.shape()));
  const std::size_t out_len =
      conv1d_output_length(length, kernel, stride, padding);

  // im2col: cols(c*K + k, b*T' + t) = x[b, c, t*stride + k - padding].
  const std::size_t rows = c_in * kernel, cols_n = batch * out_len;
  auto cols = std::make_shared<std::vector<double>>(rows * cols_n, 0.0);
  const auto &x = input.node().value;
  for (std::size_t c = 0; c < c_in; ++c) {
    for (std::size_t k = 0; k < kernel; ++k) {
      double *row = cols->data() + (c * kernel + k) * cols_n;
      for (std::size_t b = 0; b < batch; ++b) {
        const double *src = x.data() + (b * c_in + c) * length;
        double *dst = row + b * out_len;
        for (std::size_t t = 0; t < out_len; ++t) {
          const long long pos = static_cast<long long>(t * stride + k) -
                                static_cast<long long>(padding);
          if (pos >= 0 && pos < static_cast<long long>(length))
            dst[t] = src[pos];
        }
      }
    }
  }

  std::vector<double> y(c_out * cols_n);
  detail::as_mat(y, c_out, cols_n).noalias() =
      detail::as_mat(weight.node().value, c_out, rows) *
      detail::as_mat(*cols, rows, cols_n);
  std::vector<double> out(batch * c_out * out_len);
  for (std::size_t o = 0; o < c_out; ++o) {
    const double bo = bias.data()[o];
    for (std::size_t b = 0; b < batch; ++b) {
      const double *src = y.data() + o * cols_n + b * out_len;
      double *dst = out.data() + (b * c_out + o) * out_len;
      for (std::size_t t = 0; t < out_len; ++t) dst[t] = src[t] + bo;
    }
  }

  Shape out_shape = batched ? Shape{batch, c_out, out_len} : Shape{c_out, out_len};
  return detail::make_result(
      std::move(out_shape), std::move(out),
      {input.node_ptr(), weight.node_ptr(), bias.node_ptr()},
      [=](Node &self) {
        Node &xn = *self.inputs[0], &wn = *self.inputs[1], &bn = *self.inputs[2];
        // dY in GEMM layout [C_out, B*T'].
        std::vector<double> dy(c_out * cols_n);
        for (std::size_t o = 0; o < c_out; ++o)
          for (std::size_t b = 0; b < batch; ++b) {
            const double *src = self.grad.data() + (b * c_out + o) * out_len;
            double *dst = dy.data() + o * cols_n + b * out_len;
            std::copy(src, src + out_len, dst);
          }
        auto dym = detail::as_mat(dy, c_out, cols_n);
        if (wn.requires_grad)
          detail::as_mat(wn.grad_buffer(), c_out, rows).noalias() +=
              dym * detail::as_mat(*cols, rows, cols_n).transpose();
        if (bn.requires_grad) {
          auto &gb = bn.grad_buffer();
          for (std::size_t o = 0; o < c_out; ++o) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cols_n; ++j) acc += dy[o * cols_n + j];
            gb[o] += acc;
          }
        }
        if (xn.requires_grad) {
          std::vector<double> dcols(rows * cols_n);
          detail::as_mat(dcols, rows, cols_n).noalias() =
              detail::as_mat(wn.value, c_out, rows).transpose() * dym;
          auto &gx = xn.grad_buffer();
          for (std::size_t c = 0; c < c_in; ++c)
            for (std::size_t k = 0; k < kernel; ++k) {
              const double *row = dcols.data() + (c * kernel + k) * cols_n;
              for (std::size_t b = 0; b < batch; ++b) {
                double *dst = gx.data() + (b * c_in + c) * length;
                const double *src = row + b * out_len;
                for (std::size_t t = 0; t < out_len; ++t) {
                  const long long pos = static_cast<long long>(t * stride + k) -
                                        static_cast<long long>(padding);
                  if (pos >= 0 && pos < static_cast<long long>(length))
                    dst[pos] += src[t];
                }
              }
            }
        }
      },
      "conv1d");
}

/// [B, C, T] -> [B * count, C]: frames begin..begin+count of every batch
/// item, one row per frame.
inline Tensor frames(const Tensor &x, std::size_t begin, std::size_t count) {
  if (x.rank() != 3 || begin + count > x.dim(2) || count == 0)
    fail(ErrorKind::ShapeMismatch, "frames: " + shape_str(x.shape()) +
                                       " cannot supply frames " +
                                       std::to_string(begin) + "+" +
                                       std::to_string(count));
  const std::size_t batch = x.dim(0), ch = x.dim(1), len = x.dim(2);
  std::vector<double> out(batch * count * ch);
  const auto &v = x.node().value;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t t = 0; t < count; ++t)
        out[(b * count + t) * ch + c] = v[(b * ch + c) * len + begin + t];
  return detail::make_result(
      {batch * count, ch}, std::move(out), {x.node_ptr()},
      [=](Node &self) {
        auto &g = self.inputs[0]->grad_buffer();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t c = 0; c < ch; ++c)
            for (std::size_t t = 0; t < count; ++t)
              g[(b * ch + c) * len + begin + t] +=
                  self.grad[(b * count + t) * ch + c];
      },
      "frames");
}

/// Mean over frames with mask[i] of the binary cross-entropy between
/// sigmoid(logits[i]) and targets[i], in the overflow-free form
///   max(l, 0) - l*y + log(1 + exp(-|l|)).
inline Tensor bce_with_logits(const Tensor &logits,
                              const std::vector<bool> &targets,
                              const std::vector<bool> &mask) {
  const std::size_t n = logits.numel();
  if (targets.size() != n || mask.size() != n)
    fail(ErrorKind::ShapeMismatch,
         "bce_with_logits: " + std::to_string(n) + " logits, " +
             std::to_string(targets.size()) + " targets, " +
             std::to_string(mask.size()) + " mask entries");
  std::size_t active = 0;
  for (bool m : mask) active += m ? 1 : 0;
  if (active == 0) fail(ErrorKind::EmptyMask, "bce_with_logits: mask selects no frame");
  const double inv = 1.0 / static_cast<double>(active);
  double acc = 0.0;
  const auto &l = logits.node().value;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double y = targets[i] ? 1.0 : 0.0;
    acc += std::max(l[i], 0.0) - l[i] * y + std::log1p(std::exp(-std::abs(l[i])));
  }
  const double loss = acc * inv;
  if (!std::isfinite(loss))
    fail(ErrorKind::NonFinite, "bce_with_logits produced a non-finite loss");
  return detail::make_result(
      {1}, {loss}, {logits.node_ptr()},
      [targets, mask, inv](Node &self) {
        Node &ln = *self.inputs[0];
        auto &g = ln.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (!mask[i]) continue;
          const double y = targets[i] ? 1.0 : 0.0;
          g[i] += self.grad[0] * inv * (detail::stable_sigmoid(ln.value[i]) - y);
        }
      },
      "bce_with_logits");
}

/// Kaiming-uniform (fan-in, ReLU gain): U(-sqrt(6/fan_in), sqrt(6/fan_in)).
inline void kaiming_uniform(Tensor &t, std::size_t fan_in, Rng &rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (double &v : t.mutable_data()) v = rng.uniform(-bound, bound);
}

}  // namespace creaklab::nn

#endif  // CREAKLAB_AUTOGRAD_HPP_
