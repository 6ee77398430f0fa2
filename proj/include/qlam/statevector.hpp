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
 * Dense statevector holding the recurrent quantum memory, plus in-place
 * stride kernels for the handful of gates the model uses.
 *
 * Basis index i encodes |i>, with qubit 0 as the least-significant bit.
 */
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qlam {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 12;

/// 2x2 single-qubit gate, row-major.
struct Gate1Q {
    std::array<Complex, 4> m;

    static Gate1Q identity();
    static Gate1Q pauli_x();
    static Gate1Q pauli_y();
    static Gate1Q pauli_z();
    static Gate1Q hadamard();
    static Gate1Q ry(double angle);
    static Gate1Q rz(double angle);

    [[nodiscard]] Gate1Q adjoint() const;
    /// max |(M^dagger M - I)_{ij}|
    [[nodiscard]] double unitarity_defect() const;
};

class StateVector {
  public:
    /// |0...0> on n_qubits qubits; throws Config outside [1, kMaxQubits].
    explicit StateVector(std::size_t n_qubits);
    /// Adopts raw amplitudes; length must be a power of two in range.
    /// No normalization is enforced so invalid states can be inspected.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    [[nodiscard]] const Complex &operator[](std::size_t i) const {
        return amps_[i];
    }
    [[nodiscard]] Complex &operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double norm() const noexcept;
    /// True when |norm - 1| <= tol.
    [[nodiscard]] bool is_normalized(double tol = 1e-10) const noexcept;
    /// <this|other>
    [[nodiscard]] Complex inner(const StateVector &other) const;

    void apply_gate(const Gate1Q &gate, std::size_t target);
    void apply_ry(std::size_t target, double angle);
    void apply_rz(std::size_t target, double angle);
    void apply_cnot(std::size_t control, std::size_t target);

    void set_zero_state() noexcept;

    friend bool operator==(const StateVector &, const StateVector &) = default;

  private:
    StateVector() = default;
    void check_target(std::size_t target) const;

    std::size_t n_qubits_ = 0;
    std::vector<Complex> amps_;
};

/// Convenience wrapper matching the functional spelling used in tests.
inline StateVector new_zero_state(std::size_t n_qubits) {
    return StateVector(n_qubits);
}

} // namespace qlam
