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
#include "qlam/circuits.hpp"

#include "qlam/error.hpp"

#include <string>

namespace qlam {

void AnsatzConfig::validate() const {
    QLAM_REQUIRE(n_qubits >= 1 && n_qubits <= kMaxQubits, ErrorKind::Config,
                 "n_qubits must be in [1, 12]");
    QLAM_REQUIRE(n_layers >= 1, ErrorKind::Config, "n_layers must be >= 1");
}

std::vector<std::pair<std::size_t, std::size_t>>
entangler_pairs(const AnsatzConfig &cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t n = cfg.n_qubits;
    if (n == 1) {
        return pairs;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        pairs.emplace_back(j, j + 1);
    }
    if (cfg.entangler == Entangler::Ring) {
        pairs.emplace_back(n - 1, 0);
    }
    return pairs;
}

std::vector<StepOp> step_ops(const AnsatzConfig &cfg) {
    cfg.validate();
    std::vector<StepOp> ops;
    for (std::size_t j = 0; j < cfg.n_qubits; ++j) {
        ops.push_back({GateKind::RY, j, 0, AngleSource::Embedding, j});
    }
    const auto pairs = entangler_pairs(cfg);
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        for (std::size_t j = 0; j < cfg.n_qubits; ++j) {
            ops.push_back({GateKind::RY, j, 0, AngleSource::Theta,
                           cfg.theta_index(l, j, 0)});
            ops.push_back({GateKind::RZ, j, 0, AngleSource::Theta,
                           cfg.theta_index(l, j, 1)});
        }
        for (const auto &[c, t] : pairs) {
            ops.push_back({GateKind::CNOT, c, t, AngleSource::None, 0});
        }
    }
    return ops;
}

void apply_encoding(StateVector &state, std::span<const double> embedding) {
    QLAM_REQUIRE(embedding.size() == state.num_qubits(), ErrorKind::Shape,
                 "embedding length " + std::to_string(embedding.size()) +
                     " != n_qubits " + std::to_string(state.num_qubits()));
    for (std::size_t j = 0; j < embedding.size(); ++j) {
        state.apply_ry(j, embedding[j]);
    }
}

void apply_ansatz(StateVector &state, const AnsatzConfig &cfg,
                  std::span<const double> theta) {
    cfg.validate();
    QLAM_REQUIRE(cfg.n_qubits == state.num_qubits(), ErrorKind::Shape,
                 "ansatz / state qubit-count mismatch");
    QLAM_REQUIRE(theta.size() == cfg.num_params(), ErrorKind::Shape,
                 "theta length " + std::to_string(theta.size()) +
                     " != expected " + std::to_string(cfg.num_params()));
    const auto pairs = entangler_pairs(cfg);
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        for (std::size_t j = 0; j < cfg.n_qubits; ++j) {
            state.apply_ry(j, theta[cfg.theta_index(l, j, 0)]);
            state.apply_rz(j, theta[cfg.theta_index(l, j, 1)]);
        }
        for (const auto &[c, t] : pairs) {
            state.apply_cnot(c, t);
        }
    }
}

void step(StateVector &state, std::span<const double> embedding,
          const AnsatzConfig &cfg, std::span<const double> theta) {
    apply_encoding(state, embedding);
    apply_ansatz(state, cfg, theta);
}

void apply_op(StateVector &state, const StepOp &op,
              std::span<const double> embedding, std::span<const double> theta,
              bool inverse) {
    double angle = 0.0;
    if (op.source == AngleSource::Embedding) {
        angle = embedding[op.index];
    } else if (op.source == AngleSource::Theta) {
        angle = theta[op.index];
    }
    if (inverse) {
        angle = -angle;
    }
    switch (op.kind) {
    case GateKind::RY:
        state.apply_ry(op.q0, angle);
        break;
    case GateKind::RZ:
        state.apply_rz(op.q0, angle);
        break;
    case GateKind::CNOT:
        state.apply_cnot(op.q0, op.q1);
        break;
    }
}

} // namespace qlam
