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
#include "qlam/classical_nn.hpp"

#include "qlam/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qlam {

Tensor::Tensor(std::string name_, std::vector<std::size_t> shape_)
    : name(std::move(name_)), shape(std::move(shape_)) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(),
                                          std::size_t{1}, std::multiplies<>());
    data.assign(n, 0.0);
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

void Tensor::init_uniform(CounterRng &rng, double lo, double hi) {
    for (auto &x : data) {
        x = rng.uniform(lo, hi);
    }
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data.begin(), data.end(),
                       [](double x) { return std::isfinite(x); });
}

Affine::Affine(const std::string &name, std::size_t out, std::size_t in)
    : weight(name + ".weight", {out, in}), bias(name + ".bias", {out}) {}

void Affine::forward(std::span<const double> x, std::span<double> y) const {
    const std::size_t out = out_dim();
    const std::size_t in = in_dim();
    QLAM_REQUIRE(x.size() == in && y.size() == out, ErrorKind::Shape,
                 weight.name + ": input/output size mismatch");
    for (std::size_t r = 0; r < out; ++r) {
        const double *row = weight.data.data() + r * in;
        double acc = bias.data[r];
        for (std::size_t c = 0; c < in; ++c) {
            acc += row[c] * x[c];
        }
        y[r] = acc;
    }
}

void Affine::backward(std::span<const double> x, std::span<const double> dy,
                      Affine &grad, std::span<double> dx) const {
    const std::size_t out = out_dim();
    const std::size_t in = in_dim();
    if (!dx.empty()) {
        std::fill(dx.begin(), dx.end(), 0.0);
    }
    for (std::size_t r = 0; r < out; ++r) {
        const double g = dy[r];
        if (g == 0.0) {
            continue;
        }
        grad.bias.data[r] += g;
        double *grow = grad.weight.data.data() + r * in;
        const double *row = weight.data.data() + r * in;
        for (std::size_t c = 0; c < in; ++c) {
            grow[c] += g * x[c];
        }
        if (!dx.empty()) {
            for (std::size_t c = 0; c < in; ++c) {
                dx[c] += g * row[c];
            }
        }
    }
}

void Affine::init(CounterRng &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim()));
    weight.init_uniform(rng, -bound, bound);
    bias.init_uniform(rng, -bound, bound);
}

LossGrad softmax_cross_entropy(std::span<const double> logits,
                               std::size_t label) {
    QLAM_REQUIRE(!logits.empty(), ErrorKind::Shape, "empty logits");
    QLAM_REQUIRE(label < logits.size(), ErrorKind::Index,
                 "label " + std::to_string(label) + " out of range");
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (const double l : logits) {
        sum += std::exp(l - mx);
    }
    const double lse = mx + std::log(sum);
    LossGrad out{lse - logits[label], std::vector<double>(logits.size())};
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out.dlogits[c] = std::exp(logits[c] - lse);
    }
    out.dlogits[label] -= 1.0;
    return out;
}

std::size_t argmax(std::span<const double> values) {
    QLAM_REQUIRE(!values.empty(), ErrorKind::Shape, "argmax of empty array");
    // max_element returns the first maximal element
    return static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
}

double cosine_lr(std::size_t epoch, std::size_t total_epochs, double base_lr) {
    QLAM_REQUIRE(total_epochs >= 1, ErrorKind::Config, "total_epochs must be >= 1");
    QLAM_REQUIRE(epoch <= total_epochs, ErrorKind::Config,
                 "epoch beyond schedule length");
    const double frac =
        static_cast<double>(epoch) / static_cast<double>(total_epochs);
    return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

double clip_global_norm(std::span<double> grads, double max_norm) {
    double sq = 0.0;
    for (const double g : grads) {
        sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (auto &g : grads) {
            g *= scale;
        }
    }
    return norm;
}

AdamState::AdamState(std::size_t n_params, double lr)
    : base_lr(lr), m(n_params, 0.0), v(n_params, 0.0) {}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState &state, double lr) {
    QLAM_REQUIRE(params.size() == grads.size() &&
                     params.size() == state.m.size() &&
                     params.size() == state.v.size(),
                 ErrorKind::Shape, "Adam parameter/gradient/moment size mismatch");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

ElmanParams::ElmanParams(std::size_t hidden, std::size_t n_classes)
    : input("elman.input", hidden, 1),
      recurrent("elman.recurrent.weight", {hidden, hidden}),
      readout("elman.readout", n_classes, hidden) {}

void ElmanParams::init(CounterRng &rng) {
    input.init(rng);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden()));
    recurrent.init_uniform(rng, -bound, bound);
    readout.init(rng);
}

std::vector<Tensor *> ElmanParams::tensors() {
    return {&input.weight, &input.bias, &recurrent, &readout.weight,
            &readout.bias};
}

std::vector<const Tensor *> ElmanParams::tensors() const {
    return {&input.weight, &input.bias, &recurrent, &readout.weight,
            &readout.bias};
}

ElmanTrace elman_forward(std::span<const double> tokens, const ElmanParams &p) {
    QLAM_REQUIRE(!tokens.empty(), ErrorKind::Validation, "empty token sequence");
    const std::size_t dh = p.hidden();
    ElmanTrace tr;
    tr.hidden.assign(tokens.size() * dh, 0.0);
    std::vector<double> pre(dh);
    std::vector<double> prev(dh, 0.0);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        p.input.forward(tokens.subspan(t, 1), pre);
        for (std::size_t r = 0; r < dh; ++r) {
            const double *row = p.recurrent.data.data() + r * dh;
            double acc = pre[r];
            for (std::size_t c = 0; c < dh; ++c) {
                acc += row[c] * prev[c];
            }
            tr.hidden[t * dh + r] = std::tanh(acc);
        }
        std::copy_n(tr.hidden.begin() + static_cast<std::ptrdiff_t>(t * dh), dh,
                    prev.begin());
    }
    tr.logits.assign(p.readout.out_dim(), 0.0);
    p.readout.forward(prev, tr.logits);
    return tr;
}

ElmanGrad elman_loss_and_grad(std::span<const double> tokens, std::size_t label,
                              const ElmanParams &p) {
    const ElmanTrace tr = elman_forward(tokens, p);
    const auto [loss, dlogits] = softmax_cross_entropy(tr.logits, label);
    ElmanGrad out{loss, tr.logits, zeros_like(p)};
    const std::size_t dh = p.hidden();
    const std::size_t T = tokens.size();
    auto h_at = [&](std::size_t t) {
        return std::span<const double>(tr.hidden).subspan(t * dh, dh);
    };

    std::vector<double> dh_next(dh);
    p.readout.backward(h_at(T - 1), dlogits, out.grad.readout, dh_next);
    std::vector<double> dpre(dh);
    const std::vector<double> zero(dh, 0.0);
    for (std::size_t t = T; t-- > 0;) {
        const auto h = h_at(t);
        for (std::size_t r = 0; r < dh; ++r) {
            dpre[r] = dh_next[r] * (1.0 - h[r] * h[r]);
        }
        p.input.backward(tokens.subspan(t, 1), dpre, out.grad.input, {});
        const std::span<const double> prev = t > 0 ? h_at(t - 1) : zero;
        std::fill(dh_next.begin(), dh_next.end(), 0.0);
        for (std::size_t r = 0; r < dh; ++r) {
            const double g = dpre[r];
            double *grow = out.grad.recurrent.data.data() + r * dh;
            const double *row = p.recurrent.data.data() + r * dh;
            for (std::size_t c = 0; c < dh; ++c) {
                grow[c] += g * prev[c];
                dh_next[c] += g * row[c];
            }
        }
    }
    return out;
}

} // namespace qlam
