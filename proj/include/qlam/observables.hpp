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
 * Pauli strings, real-weighted Pauli sums, and their expectation values.
 *
 * Expectations never materialize a 2^n x 2^n matrix: a Pauli string acts on
 * a basis state as P|b> = i^{#Y} (-1)^{popcount(b & (Z|Y))} |b ^ (X|Y)>.
 */
#pragma once

#include "qlam/statevector.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlam {

enum class Pauli : std::uint8_t { I, X, Y, Z };

class PauliString {
  public:
    /// All-identity on n_qubits.
    explicit PauliString(std::size_t n_qubits);
    /// labels[j] acts on qubit j.
    explicit PauliString(std::vector<Pauli> labels);
    /// Parses e.g. "ZIX" where character j acts on qubit j.
    static PauliString parse(std::string_view text);
    /// Single non-identity factor `p` on qubit `q`.
    static PauliString single(std::size_t n_qubits, std::size_t q, Pauli p);

    [[nodiscard]] std::size_t num_qubits() const noexcept {
        return labels_.size();
    }
    [[nodiscard]] Pauli operator[](std::size_t q) const { return labels_[q]; }
    [[nodiscard]] std::span<const Pauli> labels() const noexcept {
        return labels_;
    }
    PauliString &set(std::size_t q, Pauli p);

    /// Basis bits flipped by the string (X or Y factors).
    [[nodiscard]] std::uint64_t flip_mask() const noexcept { return flip_; }
    /// Basis bits contributing a sign (Z or Y factors).
    [[nodiscard]] std::uint64_t sign_mask() const noexcept { return sign_; }
    [[nodiscard]] unsigned num_y() const noexcept { return n_y_; }

    /// Writes P|in> into out (sizes must match in and the string).
    void apply(std::span<const Complex> in, std::span<Complex> out) const;
    /// Accumulates coeff * P|in> into out.
    void apply_add(std::span<const Complex> in, double coeff,
                   std::span<Complex> out) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const PauliString &a, const PauliString &b) {
        return a.labels_ == b.labels_;
    }

  private:
    void recompute_masks() noexcept;

    std::vector<Pauli> labels_;
    std::uint64_t flip_ = 0;
    std::uint64_t sign_ = 0;
    unsigned n_y_ = 0;
};

/// sum_i gamma_i P_i with real gamma_i; Hermitian by construction.
class Observable {
  public:
    struct Term {
        double gamma;
        PauliString pauli;
    };

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::span<const Term> terms() const noexcept { return terms_; }
    /// sum_i |gamma_i|, an upper bound on |<O>| for any state.
    [[nodiscard]] double gamma_l1() const noexcept;

    friend Observable build_observable(std::span<const double> gammas,
                                       std::span<const PauliString> pauli_set);

  private:
    std::size_t n_qubits_ = 0;
    std::vector<Term> terms_;
};

enum class ShotMode { Exact, Sampled };

struct ShotConfig {
    ShotMode mode = ShotMode::Exact;
    std::uint64_t shots_per_term = 1000;
    std::uint64_t rng_seed = 0;

    /// Throws Config when sampled mode asks for fewer than one shot.
    void validate() const;
};

/// <psi|P|psi>
double pauli_expectation(const StateVector &state, const PauliString &pauli);

/// Throws Shape on length mismatch / mixed qubit counts, Numeric on
/// non-finite gammas.
Observable build_observable(std::span<const double> gammas,
                            std::span<const PauliString> pauli_set);

/// sum_i gamma_i <psi|P_i|psi>
double expectation_exact(const StateVector &state, const Observable &obs);

/// Draws shots_per_term independent +-1 outcomes per term with
/// P(+1) = (1 + <P_i>)/2 and returns sum_i gamma_i * mean_i. Term i uses
/// the stream derive_key(cfg.rng_seed, {stream, i}), so results depend only
/// on (state, obs, cfg, stream).
double expectation_sampled(const StateVector &state, const Observable &obs,
                           const ShotConfig &cfg, std::uint64_t stream = 0);

/// Mean of m shots of a +-1 observable with exact expectation `expval`.
double sample_pauli_mean(double expval, std::uint64_t shots,
                         std::uint64_t key);

/// Z_j for every qubit, X_j for every qubit, then Z_j Z_{j+1 mod n} ring
/// pairs with duplicates removed (n=2 has one pair, n=1 none).
std::vector<PauliString> default_pauli_pool(std::size_t n_qubits);

} // namespace qlam
