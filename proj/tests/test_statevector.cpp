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
#include "oracles.hpp"

#include "qlam/error.hpp"
#include "qlam/statevector.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qlam;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

bool kind_is(ErrorKind k, const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind() == k;
    }
    return false;
}

void check_amps(const StateVector &s, std::vector<Complex> want, double tol = 1e-15) {
    REQUIRE(s.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(s[i] - want[i]) <= tol);
    }
}

} // namespace

TEST_CASE("zero state") {
    check_amps(new_zero_state(1), {1.0, 0.0});
    check_amps(new_zero_state(2), {1.0, 0.0, 0.0, 0.0});
    CHECK(new_zero_state(5).norm() == 1.0);
    CHECK(new_zero_state(3).norm() == 1.0);
    CHECK(new_zero_state(12).size() == 4096);
}

TEST_CASE("qubit count outside [1, 12] is a configuration error") {
    CHECK(kind_is(ErrorKind::Config, [] { StateVector s(0); }));
    CHECK(kind_is(ErrorKind::Config, [] { StateVector s(13); }));
    CHECK(kind_is(ErrorKind::Shape,
                  [] { StateVector::from_amplitudes(std::vector<Complex>(3)); }));
}

TEST_CASE("single-qubit gate examples") {
    StateVector s(1);
    s.apply_gate(Gate1Q::pauli_x(), 0);
    check_amps(s, {0.0, 1.0});

    StateVector h(1);
    h.apply_gate(Gate1Q::hadamard(), 0);
    check_amps(h, {kInvSqrt2, kInvSqrt2});

    CounterRng rng(7);
    auto r = oracle::random_state(3, rng);
    const auto before = r;
    r.apply_gate(Gate1Q::identity(), 1);
    CHECK(r == before);
}

TEST_CASE("target outside the register is an index error") {
    StateVector s(2);
    CHECK(kind_is(ErrorKind::Index, [&] { s.apply_gate(Gate1Q::pauli_x(), 2); }));
    CHECK(kind_is(ErrorKind::Index, [&] { s.apply_ry(5, 0.1); }));
    CHECK(kind_is(ErrorKind::Index, [&] { s.apply_cnot(0, 2); }));
}

TEST_CASE("ry examples") {
    CounterRng rng(11);
    auto r = oracle::random_state(2, rng);
    const auto before = r;
    r.apply_ry(1, 0.0);
    CHECK(r == before);

    StateVector s(1);
    s.apply_ry(0, std::numbers::pi);
    check_amps(s, {0.0, 1.0}, 2e-16);

    StateVector h(1);
    h.apply_ry(0, std::numbers::pi / 2);
    check_amps(h, {kInvSqrt2, kInvSqrt2}, 2e-16);

    CHECK(kind_is(ErrorKind::Numeric, [&] { h.apply_ry(0, std::nan("")); }));
    CHECK(kind_is(ErrorKind::Numeric, [&] { h.apply_rz(0, INFINITY); }));
}

TEST_CASE("rz examples") {
    StateVector s(1);
    s.apply_rz(0, 1.234);
    CHECK(std::abs(s[0]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(s[1]) == 0.0);

    StateVector p(1);
    p.apply_gate(Gate1Q::hadamard(), 0);
    p.apply_rz(0, std::numbers::pi);
    check_amps(p, {std::polar(kInvSqrt2, -std::numbers::pi / 2),
                   std::polar(kInvSqrt2, std::numbers::pi / 2)},
               1e-15);

    CounterRng rng(5);
    auto r = oracle::random_state(2, rng);
    const auto before = r;
    r.apply_rz(0, 0.0);
    CHECK(r == before);
}

TEST_CASE("cnot examples") {
    // |01> in index notation is index 1: qubit 0 set.
    auto s = StateVector::from_amplitudes({0.0, 1.0, 0.0, 0.0});
    s.apply_cnot(0, 1);
    check_amps(s, {0.0, 0.0, 0.0, 1.0});

    StateVector z(2);
    z.apply_cnot(0, 1);
    check_amps(z, {1.0, 0.0, 0.0, 0.0});

    CounterRng rng(3);
    auto r = oracle::random_state(3, rng);
    const auto before = r;
    r.apply_cnot(2, 0);
    r.apply_cnot(2, 0);
    CHECK(r == before);

    CHECK(kind_is(ErrorKind::Config, [&] { r.apply_cnot(1, 1); }));
}

TEST_CASE("norm examples") {
    CounterRng rng(17);
    StateVector s(4);
    for (int k = 0; k < 100; ++k) {
        const auto q = static_cast<std::size_t>(rng.below(4));
        switch (rng.below(3)) {
        case 0:
            s.apply_ry(q, rng.uniform(-4, 4));
            break;
        case 1:
            s.apply_rz(q, rng.uniform(-4, 4));
            break;
        default:
            s.apply_cnot(q, (q + 1 + rng.below(3)) % 4);
        }
    }
    CHECK(std::abs(s.norm() - 1.0) < 1e-10);

    auto zero = StateVector::from_amplitudes(std::vector<Complex>(4));
    CHECK(zero.norm() == 0.0);
    CHECK_FALSE(zero.is_normalized());
}

TEST_CASE("property: norm preserved over 10^4 random gates on up to 8 qubits") {
    CounterRng rng(derive_key(2024, {1}));
    for (std::size_t n : {1u, 3u, 8u}) {
        StateVector s = oracle::random_state(n, rng);
        for (int k = 0; k < 10000; ++k) {
            const auto q = static_cast<std::size_t>(rng.below(n));
            const auto kind = n > 1 ? rng.below(4) : rng.below(3);
            if (kind == 0) {
                s.apply_ry(q, rng.uniform(-10, 10));
            } else if (kind == 1) {
                s.apply_rz(q, rng.uniform(-10, 10));
            } else if (kind == 2) {
                s.apply_gate(Gate1Q::hadamard(), q);
            } else {
                s.apply_cnot(q, (q + 1 + rng.below(n - 1)) % n);
            }
        }
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("property: kernels match Kronecker matrices for n <= 4") {
    CounterRng rng(derive_key(99, {2}));
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng.below(4);
        auto s = oracle::random_state(n, rng);
        const auto psi = oracle::amplitudes(s);
        const auto q = static_cast<std::size_t>(rng.below(n));
        const double a = rng.uniform(-7, 7);
        oracle::Mat m;
        switch (rng.below(4)) {
        case 0:
            s.apply_ry(q, a);
            m = oracle::embed_1q(oracle::ry_mat(a), q, n);
            break;
        case 1:
            s.apply_rz(q, a);
            m = oracle::embed_1q(oracle::rz_mat(a), q, n);
            break;
        case 2:
            s.apply_gate(Gate1Q::pauli_y(), q);
            m = oracle::embed_1q(oracle::pauli_mat(Pauli::Y), q, n);
            break;
        default:
            if (n == 1) {
                s.apply_gate(Gate1Q::hadamard(), q);
                m = oracle::embed_1q(
                    oracle::mat2(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2), q, n);
            } else {
                const auto t = (q + 1 + rng.below(n - 1)) % n;
                s.apply_cnot(q, t);
                m = oracle::cnot_mat(q, t, n);
            }
        }
        CHECK(oracle::max_abs_diff(oracle::amplitudes(s), oracle::matvec(m, psi)) <
              1e-12);
    }
}

TEST_CASE("property: involutions X^2, H^2, CNOT^2 within 1e-12") {
    CounterRng rng(derive_key(5, {3}));
    for (int trial = 0; trial < 50; ++trial) {
        auto s = oracle::random_state(3, rng);
        const auto psi = oracle::amplitudes(s);
        const auto q = static_cast<std::size_t>(rng.below(3));
        s.apply_gate(Gate1Q::pauli_x(), q);
        s.apply_gate(Gate1Q::pauli_x(), q);
        s.apply_gate(Gate1Q::hadamard(), q);
        s.apply_gate(Gate1Q::hadamard(), q);
        s.apply_cnot(q, (q + 1) % 3);
        s.apply_cnot(q, (q + 1) % 3);
        CHECK(oracle::max_abs_diff(oracle::amplitudes(s), psi) < 1e-12);
    }
}

TEST_CASE("gate matrices are unitary and adjoints invert") {
    for (const auto &g : {Gate1Q::identity(), Gate1Q::pauli_x(), Gate1Q::pauli_y(),
                          Gate1Q::pauli_z(), Gate1Q::hadamard(), Gate1Q::ry(0.7),
                          Gate1Q::rz(-2.1)}) {
        CHECK(g.unitarity_defect() < 1e-15);
    }
    CounterRng rng(1);
    auto s = oracle::random_state(2, rng);
    const auto psi = oracle::amplitudes(s);
    s.apply_gate(Gate1Q::ry(0.9), 1);
    s.apply_gate(Gate1Q::ry(0.9).adjoint(), 1);
    CHECK(oracle::max_abs_diff(oracle::amplitudes(s), psi) < 1e-15);
}

TEST_CASE("determinism: same gates, bitwise same amplitudes") {
    auto run = [] {
        CounterRng rng(42);
        auto s = oracle::random_state(4, rng);
        for (int k = 0; k < 200; ++k) {
            s.apply_ry(k % 4, 0.01 * k);
            s.apply_cnot(k % 4, (k + 1) % 4);
        }
        return s;
    };
    CHECK(run() == run());
}

TEST_CASE("inner product") {
    StateVector a(1);
    auto b = a;
    b.apply_gate(Gate1Q::hadamard(), 0);
    CHECK(std::abs(a.inner(b) - Complex(kInvSqrt2, 0)) < 1e-15);
    CHECK(kind_is(ErrorKind::Shape, [&] { (void)a.inner(StateVector(2)); }));
}
