// Copyright 2026 The QLAM Authors
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
/**
 * @file
 * Classical building blocks shared by the hybrid model and the recurrent
 * baseline: named parameter tensors, affine maps, the loss, Adam, the
 * cosine schedule, and an Elman RNN.
 */
#pragma once

#include "qlam/error.hpp"
#include "qlam/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qlam {

/// Named, row-major array of trainable values.
struct Tensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::string name, std::vector<std::size_t> shape);

    [[nodiscard]] std::size_t size() const noexcept { return data.size(); }
    void fill(double v);
    void init_uniform(CounterRng &rng, double lo, double hi);
    [[nodiscard]] bool all_finite() const noexcept;

    friend bool operator==(const Tensor &, const Tensor &) = default;
};

/// y = W x + b, W is (out x in).
struct Affine {
    Tensor weight;
    Tensor bias;

    Affine() = default;
    Affine(const std::string &name, std::size_t out, std::size_t in);

    [[nodiscard]] std::size_t in_dim() const noexcept { return weight.shape[1]; }
    [[nodiscard]] std::size_t out_dim() const noexcept { return weight.shape[0]; }

    void forward(std::span<const double> x, std::span<double> y) const;
    /// Accumulates dW, db into `grad` (same shapes) and, if non-empty,
    /// writes dL/dx into dx (overwriting).
    void backward(std::span<const double> x, std::span<const double> dy,
                  Affine &grad, std::span<double> dx) const;
    /// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and bias.
    void init(CounterRng &rng);

    friend bool operator==(const Affine &, const Affine &) = default;
};

template <typename Bundle> std::size_t count_params(const Bundle &b) {
    std::size_t n = 0;
    for (const Tensor *t : b.tensors()) {
        n += t->size();
    }
    return n;
}

/// Concatenates every tensor of a bundle in canonical order.
template <typename Bundle> std::vector<double> flatten(const Bundle &b) {
    std::vector<double> out;
    for (const Tensor *t : b.tensors()) {
        out.insert(out.end(), t->data.begin(), t->data.end());
    }
    return out;
}

template <typename Bundle>
void unflatten(std::span<const double> flat, Bundle &b) {
    QLAM_REQUIRE(flat.size() == count_params(b), ErrorKind::Shape,
                 "flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, bundle holds " + std::to_string(count_params(b)));
    std::size_t off = 0;
    for (Tensor *t : b.tensors()) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), t->size(),
                    t->data.begin());
        off += t->size();
    }
}

/// Zero-filled bundle with the same shapes as `like`.
template <typename Bundle> Bundle zeros_like(const Bundle &like) {
    Bundle z = like;
    for (Tensor *t : z.tensors()) {
        t->fill(0.0);
    }
    return z;
}

struct LossGrad {
    double loss;
    std::vector<double> dlogits;
};

/// Log-sum-exp stable cross entropy; dlogits = softmax - onehot(label).
LossGrad softmax_cross_entropy(std::span<const double> logits,
                               std::size_t label);

/// Lowest index among maximal entries.
std::size_t argmax(std::span<const double> values);

double cosine_lr(std::size_t epoch, std::size_t total_epochs, double base_lr);

/// Scales grads in place so their global L2 norm is at most max_norm.
/// Returns the pre-clip norm.
double clip_global_norm(std::span<double> grads, double max_norm);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double base_lr = 1e-3;
    std::size_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n_params = 0, double base_lr = 1e-3);
};

/// Bias-corrected Adam update over flat arrays.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, double lr);

/// h_t = tanh(W_in x_t + b_in + W_rec h_{t-1}), logits = W_out h_T + b_out.
struct ElmanParams {
    Affine input;     ///< d_h x 1
    Tensor recurrent; ///< d_h x d_h
    Affine readout;   ///< n_classes x d_h

    ElmanParams() = default;
    ElmanParams(std::size_t hidden, std::size_t n_classes);

    [[nodiscard]] std::size_t hidden() const noexcept {
        return recurrent.shape[0];
    }
    void init(CounterRng &rng);

    std::vector<Tensor *> tensors();
    std::vector<const Tensor *> tensors() const;
};

struct ElmanTrace {
    std::vector<double> hidden; ///< T x d_h, h_1..h_T
    std::vector<double> logits;
};

ElmanTrace elman_forward(std::span<const double> tokens, const ElmanParams &p);

struct ElmanGrad {
    double loss;
    std::vector<double> logits;
    ElmanParams grad;
};

/// Cross-entropy loss and full backprop-through-time gradient.
ElmanGrad elman_loss_and_grad(std::span<const double> tokens, std::size_t label,
                              const ElmanParams &p);

} // namespace qlam
