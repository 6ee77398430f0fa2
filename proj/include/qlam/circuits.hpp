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
 * The per-token memory update U(x, theta) = U_var(theta) U_enc(x).
 *
 * U_enc applies RY(e_j) to qubit j. U_var is a hardware-efficient ansatz:
 * each layer applies RY then RZ to every qubit, followed by a CNOT
 * entangler (ring j -> j+1 mod n, or linear j -> j+1).
 */
#pragma once

#include "qlam/statevector.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qlam {

enum class Entangler { Ring, Linear };

struct AnsatzConfig {
    std::size_t n_qubits = 4;
    std::size_t n_layers = 2;
    Entangler entangler = Entangler::Ring;

    [[nodiscard]] std::size_t params_per_layer() const noexcept {
        return 2 * n_qubits;
    }
    [[nodiscard]] std::size_t num_params() const noexcept {
        return n_layers * params_per_layer();
    }
    /// Index of the RY (slot 0) or RZ (slot 1) angle of `qubit` in `layer`.
    [[nodiscard]] std::size_t theta_index(std::size_t layer, std::size_t qubit,
                                          std::size_t slot) const noexcept {
        return (layer * n_qubits + qubit) * 2 + slot;
    }
    void validate() const;
};

/// Trainable ansatz angles in radians, laid out by AnsatzConfig::theta_index.
struct CircuitParams {
    std::vector<double> theta;
};

enum class GateKind : std::uint8_t { RY, RZ, CNOT };
enum class AngleSource : std::uint8_t { None, Embedding, Theta };

/// One gate of the step circuit, in application order. Rotations take their
/// angle from embedding[index] or theta[index].
struct StepOp {
    GateKind kind;
    std::size_t q0; ///< target for rotations, control for CNOT
    std::size_t q1; ///< CNOT target
    AngleSource source;
    std::size_t index;
};

/// Flat gate list for one step: encoding first, then the ansatz layers.
std::vector<StepOp> step_ops(const AnsatzConfig &cfg);

/// CNOT pairs of one entangling layer (empty when n_qubits == 1).
std::vector<std::pair<std::size_t, std::size_t>>
entangler_pairs(const AnsatzConfig &cfg);

void apply_encoding(StateVector &state, std::span<const double> embedding);
void apply_ansatz(StateVector &state, const AnsatzConfig &cfg,
                  std::span<const double> theta);
inline void apply_ansatz(StateVector &state, const AnsatzConfig &cfg,
                         const CircuitParams &params) {
    apply_ansatz(state, cfg, params.theta);
}

/// Encoding acts first, then the ansatz.
void step(StateVector &state, std::span<const double> embedding,
          const AnsatzConfig &cfg, std::span<const double> theta);

/// Applies a single op, or its inverse when `inverse` is set.
void apply_op(StateVector &state, const StepOp &op,
              std::span<const double> embedding, std::span<const double> theta,
              bool inverse = false);

} // namespace qlam
