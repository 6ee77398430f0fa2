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
#include "qlam/statevector.hpp"

#include "qlam/error.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

namespace qlam {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Config:
        return "config";
    case ErrorKind::Index:
        return "index";
    case ErrorKind::Shape:
        return "shape";
    case ErrorKind::Numeric:
        return "numeric";
    case ErrorKind::Validation:
        return "validation";
    case ErrorKind::Parse:
        return "parse";
    case ErrorKind::Io:
        return "io";
    }
    return "unknown";
}

Gate1Q Gate1Q::identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
Gate1Q Gate1Q::pauli_x() { return {{0.0, 1.0, 1.0, 0.0}}; }
Gate1Q Gate1Q::pauli_y() {
    return {{0.0, Complex{0.0, -1.0}, Complex{0.0, 1.0}, 0.0}};
}
Gate1Q Gate1Q::pauli_z() { return {{1.0, 0.0, 0.0, -1.0}}; }
Gate1Q Gate1Q::hadamard() {
    const double s = 1.0 / std::numbers::sqrt2;
    return {{s, s, s, -s}};
}
Gate1Q Gate1Q::ry(double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    return {{c, -s, s, c}};
}
Gate1Q Gate1Q::rz(double angle) {
    return {{std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2)}};
}

Gate1Q Gate1Q::adjoint() const {
    return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
}

double Gate1Q::unitarity_defect() const {
    const Gate1Q a = adjoint();
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            const Complex v = a.m[2 * r] * m[c] + a.m[2 * r + 1] * m[2 + c];
            worst = std::max(worst, std::abs(v - Complex{r == c ? 1.0 : 0.0}));
        }
    }
    return worst;
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    QLAM_REQUIRE(n_qubits >= 1 && n_qubits <= kMaxQubits, ErrorKind::Config,
                 "n_qubits must be in [1, 12], got " + std::to_string(n_qubits));
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t len = amplitudes.size();
    QLAM_REQUIRE(len >= 2 && std::has_single_bit(len) &&
                     len <= (std::size_t{1} << kMaxQubits),
                 ErrorKind::Shape,
                 "amplitude count must be 2^n with 1 <= n <= 12, got " +
                     std::to_string(len));
    StateVector sv;
    sv.n_qubits_ = static_cast<std::size_t>(std::countr_zero(len));
    sv.amps_ = std::move(amplitudes);
    return sv;
}

double StateVector::norm() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return std::sqrt(acc);
}

bool StateVector::is_normalized(double tol) const noexcept {
    return std::abs(norm() - 1.0) <= tol;
}

Complex StateVector::inner(const StateVector &other) const {
    QLAM_REQUIRE(other.n_qubits_ == n_qubits_, ErrorKind::Shape,
                 "inner product of states with different qubit counts");
    Complex acc{0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += std::conj(amps_[i]) * other.amps_[i];
    }
    return acc;
}

void StateVector::set_zero_state() noexcept {
    std::fill(amps_.begin(), amps_.end(), Complex{0.0});
    amps_[0] = 1.0;
}

void StateVector::check_target(std::size_t target) const {
    QLAM_REQUIRE(target < n_qubits_, ErrorKind::Index,
                 "qubit index " + std::to_string(target) + " out of range for " +
                     std::to_string(n_qubits_) + " qubits");
}

// Pairs (i0, i1) differ only in bit `target`. The outer loop walks blocks of
// 2*stride, the inner loop the stride within a block.
void StateVector::apply_gate(const Gate1Q &gate, std::size_t target) {
    check_target(target);
    assert(gate.unitarity_defect() < 1e-12);
    const std::size_t stride = std::size_t{1} << target;
    const std::size_t dim = amps_.size();
    const auto [m00, m01, m10, m11] = gate.m;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t k = 0; k < stride; ++k) {
            Complex &a0 = amps_[base + k];
            Complex &a1 = amps_[base + k + stride];
            const Complex v0 = a0;
            const Complex v1 = a1;
            a0 = m00 * v0 + m01 * v1;
            a1 = m10 * v0 + m11 * v1;
        }
    }
}

void StateVector::apply_ry(std::size_t target, double angle) {
    check_target(target);
    QLAM_REQUIRE(std::isfinite(angle), ErrorKind::Numeric,
                 "non-finite RY angle");
    const std::size_t stride = std::size_t{1} << target;
    const std::size_t dim = amps_.size();
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t k = 0; k < stride; ++k) {
            Complex &a0 = amps_[base + k];
            Complex &a1 = amps_[base + k + stride];
            const Complex v0 = a0;
            a0 = c * v0 - s * a1;
            a1 = s * v0 + c * a1;
        }
    }
}

void StateVector::apply_rz(std::size_t target, double angle) {
    check_target(target);
    QLAM_REQUIRE(std::isfinite(angle), ErrorKind::Numeric,
                 "non-finite RZ angle");
    const Complex p0 = std::polar(1.0, -angle / 2);
    const Complex p1 = std::polar(1.0, angle / 2);
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        amps_[i] *= (i & mask) ? p1 : p0;
    }
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    check_target(control);
    check_target(target);
    QLAM_REQUIRE(control != target, ErrorKind::Config,
                 "CNOT control and target must differ");
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        // visit each swapped pair once, from its target-bit-0 member
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amps_[i], amps_[i | tmask]);
        }
    }
}

} // namespace qlam
