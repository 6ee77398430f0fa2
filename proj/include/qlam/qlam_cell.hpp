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
 * The quantum long-attention memory cell.
 *
 * For each token x_t:
 *
 *     e_t    = embed(x_t)                       (R^n, one angle per qubit)
 *     psi_t  = U_var(theta) U_enc(e_t) psi_{t-1},  psi_0 = |0...0>
 *     q_t    = W_Q e_t
 *     gamma  = decoder_h(q_t)                   (R^p, per head h)
 *     r_t[h] = <psi_t| sum_i gamma_i P_i |psi_t>
 *
 * The classifier reads the concatenation of the last `t_keep` readout
 * vectors (oldest first). Only 2^n amplitudes of memory are held at any
 * time, independent of sequence length.
 */
#pragma once

#include "qlam/circuits.hpp"
#include "qlam/classical_nn.hpp"
#include "qlam/observables.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qlam {

struct QlamConfig {
    AnsatzConfig ansatz{};
    std::size_t d_q = 8;
    std::size_t n_heads = 8;
    std::size_t decoder_hidden = 16;
    std::size_t n_classes = 10;
    std::size_t t_keep = 1;
    /// Clamp out-of-range tokens into [0, 1] instead of rejecting them.
    bool clamp_tokens = false;

    [[nodiscard]] std::size_t n_qubits() const noexcept {
        return ansatz.n_qubits;
    }
    [[nodiscard]] std::size_t pool_size() const;
    [[nodiscard]] std::size_t feature_dim() const noexcept {
        return n_heads * t_keep;
    }
    void validate() const;
};

/// Two-layer tanh perceptron mapping a query to observable coordinates.
struct ObservableDecoder {
    Affine hidden; ///< decoder_hidden x d_q
    Affine out;    ///< p x decoder_hidden

    /// Writes gamma (length p); `hidden_act` receives tanh activations.
    void forward(std::span<const double> q, std::span<double> hidden_act,
                 std::span<double> gamma) const;
};

struct QlamParams {
    Affine embed; ///< n_qubits x 1
    Tensor theta; ///< ansatz angles
    Tensor w_q;   ///< d_q x n_qubits, no bias
    std::vector<ObservableDecoder> decoders;
    Affine classifier; ///< n_classes x (n_heads * t_keep)

    QlamParams() = default;
    /// Zero-initialized parameters shaped for cfg.
    explicit QlamParams(const QlamConfig &cfg);

    /// Affine maps: uniform(+-1/sqrt(fan_in)); angles: uniform(+-0.1).
    void init(CounterRng &rng);

    std::vector<Tensor *> tensors();
    std::vector<const Tensor *> tensors() const;
    [[nodiscard]] bool all_finite() const;
    /// Throws Shape when the arrays do not match cfg.
    void check_shapes(const QlamConfig &cfg) const;

    friend bool operator==(const QlamParams &a, const QlamParams &b) {
        return flatten(a) == flatten(b);
    }
};

struct ReadoutTrace {
    std::size_t n_steps = 0;
    std::size_t n_heads = 0;
    std::vector<double> readouts; ///< n_steps x n_heads
    std::vector<double> gamma_l1; ///< sum_i |gamma_i| for each (t, head)
    std::vector<double> features;
    std::vector<double> logits;
    /// Amplitude count of the memory held during the pass.
    std::size_t memory_amplitudes = 0;

    [[nodiscard]] std::span<const double> readout(std::size_t t) const {
        return std::span<const double>(readouts).subspan(t * n_heads, n_heads);
    }
};

/// Perturbs one ansatz angle at one timestep only; used by the
/// parameter-shift oracle for angles shared across steps.
struct AngleShift {
    std::size_t timestep;
    std::size_t theta_index;
    double delta;
};

/// e = embed(token)
void embed_token(double token, const QlamParams &params, std::span<double> e);

/// q = W_Q e
std::vector<double> query(std::span<const double> embedding,
                          const QlamParams &params);

/// O(q) = sum_i gamma_i P_i with gamma = decoder_head(q).
Observable decode_observable(std::span<const double> q, std::size_t head,
                             const QlamParams &params,
                             std::span<const PauliString> pool);

/// Checks tokens are non-empty and in [0,1]; returns a clamped copy when
/// cfg.clamp_tokens is set.
std::vector<double> validate_tokens(std::span<const double> tokens,
                                    const QlamConfig &cfg);

ReadoutTrace forward(std::span<const double> tokens, const QlamParams &params,
                     const QlamConfig &cfg, const ShotConfig &shot = {},
                     std::uint64_t sample_index = 0,
                     std::optional<AngleShift> shift = std::nullopt);

std::size_t predict(std::span<const double> tokens, const QlamParams &params,
                    const QlamConfig &cfg, const ShotConfig &shot = {},
                    std::uint64_t sample_index = 0);

} // namespace qlam
