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
 * Reverse-mode differentiation of the hybrid model.
 *
 * The quantum part uses the adjoint method: with lambda = dL/d<psi| the
 * derivative of a rotation exp(-i a P / 2) is Im<lambda|P|psi> evaluated
 * just after the gate, after which both vectors are pulled back through
 * the inverse gate. Readouts inject lambda += sum_i c_i P_i |psi_t>.
 *
 * States entering each step are checkpointed every `checkpoint_interval`
 * steps on the forward pass; the backward pass recomputes one window at a
 * time, so memory is O(T / K + K) state vectors.
 */
#pragma once

#include "qlam/data.hpp"
#include "qlam/qlam_cell.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qlam {

inline constexpr std::size_t kDefaultCheckpointInterval = 32;

struct GradBundle {
    double loss = 0.0;
    std::vector<double> logits;
    QlamParams grad; ///< shape-mirrors the parameters
};

/// Cross-entropy loss and gradient for one sample (exact expectations).
/// Throws Numeric, naming the timestep, if a non-finite value appears.
GradBundle loss_and_grad(std::span<const double> tokens, std::size_t label,
                         const QlamParams &params, const QlamConfig &cfg,
                         std::size_t checkpoint_interval = kDefaultCheckpointInterval);

inline GradBundle loss_and_grad(const SequenceSample &sample,
                                const QlamParams &params, const QlamConfig &cfg) {
    return loss_and_grad(sample.tokens, sample.label, params, cfg);
}

/// Gradient of the expectation objective sum_{t,h} c[t,h] * r_t[h], where
/// `cotangent` is T x n_heads. Classifier gradients are zero.
QlamParams readout_gradient(std::span<const double> tokens,
                            const QlamParams &params, const QlamConfig &cfg,
                            std::span<const double> cotangent,
                            std::size_t checkpoint_interval = kDefaultCheckpointInterval);

/// Parameter-shift derivative of the same expectation objective with
/// respect to theta[theta_index]. The angle is shared by every step, so
/// each occurrence is shifted by +-shift separately and the halved
/// differences summed. `shift` defaults to pi/2; passing -pi/2 swaps the
/// directions.
double param_shift_readout_grad(std::span<const double> tokens,
                                const QlamParams &params, const QlamConfig &cfg,
                                std::span<const double> cotangent,
                                std::size_t theta_index, double shift);
double param_shift_readout_grad(std::span<const double> tokens,
                                const QlamParams &params, const QlamConfig &cfg,
                                std::span<const double> cotangent,
                                std::size_t theta_index);

/// Loss derivative for theta[theta_index]: per-readout parameter shifts
/// chained through dL/dr_t computed at the unshifted point.
double param_shift_grad(std::span<const double> tokens, std::size_t label,
                        const QlamParams &params, const QlamConfig &cfg,
                        std::size_t theta_index);

/// Mean loss and mean gradient over `batch` (indices into `samples`).
/// Per-sample results are computed on up to `workers` threads and reduced
/// in batch order, so the result is bitwise independent of `workers`.
GradBundle batch_loss_and_grad(std::span<const SequenceSample> samples,
                               std::span<const std::size_t> batch,
                               const QlamParams &params, const QlamConfig &cfg,
                               std::size_t workers = 1);

} // namespace qlam
