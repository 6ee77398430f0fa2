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
#include "qlam/observables.hpp"

#include "qlam/error.hpp"
#include "qlam/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace qlam {

namespace {

// i^k for k mod 4
Complex i_power(unsigned k) {
    switch (k & 3U) {
    case 0:
        return {1.0, 0.0};
    case 1:
        return {0.0, 1.0};
    case 2:
        return {-1.0, 0.0};
    default:
        return {0.0, -1.0};
    }
}

} // namespace

PauliString::PauliString(std::size_t n_qubits)
    : labels_(n_qubits, Pauli::I) {
    QLAM_REQUIRE(n_qubits >= 1 && n_qubits <= kMaxQubits, ErrorKind::Config,
                 "Pauli string length must be in [1, 12]");
}

PauliString::PauliString(std::vector<Pauli> labels) : labels_(std::move(labels)) {
    QLAM_REQUIRE(!labels_.empty() && labels_.size() <= kMaxQubits,
                 ErrorKind::Config, "Pauli string length must be in [1, 12]");
    recompute_masks();
}

PauliString PauliString::parse(std::string_view text) {
    std::vector<Pauli> labels;
    labels.reserve(text.size());
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        switch (c) {
        case 'I':
            labels.push_back(Pauli::I);
            break;
        case 'X':
            labels.push_back(Pauli::X);
            break;
        case 'Y':
            labels.push_back(Pauli::Y);
            break;
        case 'Z':
            labels.push_back(Pauli::Z);
            break;
        default:
            throw ParseError(k, std::string("invalid Pauli label '") + c + "'");
        }
    }
    return PauliString(std::move(labels));
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t q, Pauli p) {
    PauliString s(n_qubits);
    s.set(q, p);
    return s;
}

PauliString &PauliString::set(std::size_t q, Pauli p) {
    QLAM_REQUIRE(q < labels_.size(), ErrorKind::Index,
                 "Pauli label index out of range");
    labels_[q] = p;
    recompute_masks();
    return *this;
}

void PauliString::recompute_masks() noexcept {
    flip_ = sign_ = 0;
    n_y_ = 0;
    for (std::size_t q = 0; q < labels_.size(); ++q) {
        const std::uint64_t bit = std::uint64_t{1} << q;
        switch (labels_[q]) {
        case Pauli::I:
            break;
        case Pauli::X:
            flip_ |= bit;
            break;
        case Pauli::Y:
            flip_ |= bit;
            sign_ |= bit;
            ++n_y_;
            break;
        case Pauli::Z:
            sign_ |= bit;
            break;
        }
    }
}

void PauliString::apply(std::span<const Complex> in,
                        std::span<Complex> out) const {
    std::fill(out.begin(), out.end(), Complex{0.0});
    apply_add(in, 1.0, out);
}

void PauliString::apply_add(std::span<const Complex> in, double coeff,
                            std::span<Complex> out) const {
    QLAM_REQUIRE(in.size() == out.size() &&
                     in.size() == (std::size_t{1} << labels_.size()),
                 ErrorKind::Shape, "Pauli string / state size mismatch");
    const Complex phase = coeff * i_power(n_y_);
    for (std::size_t b = 0; b < in.size(); ++b) {
        const bool odd = std::popcount(b & sign_) & 1U;
        out[b ^ flip_] += (odd ? -phase : phase) * in[b];
    }
}

std::string PauliString::to_string() const {
    std::string s;
    for (const auto p : labels_) {
        s.push_back("IXYZ"[static_cast<int>(p)]);
    }
    return s;
}

double Observable::gamma_l1() const noexcept {
    double acc = 0.0;
    for (const auto &t : terms_) {
        acc += std::abs(t.gamma);
    }
    return acc;
}

void ShotConfig::validate() const {
    QLAM_REQUIRE(mode == ShotMode::Exact || shots_per_term >= 1,
                 ErrorKind::Config, "shots_per_term must be >= 1");
}

double pauli_expectation(const StateVector &state, const PauliString &pauli) {
    QLAM_REQUIRE(state.num_qubits() == pauli.num_qubits(), ErrorKind::Shape,
                 "Pauli string acts on " + std::to_string(pauli.num_qubits()) +
                     " qubits but state has " +
                     std::to_string(state.num_qubits()));
    const auto amps = state.amplitudes();
    const std::uint64_t flip = pauli.flip_mask();
    const std::uint64_t sign = pauli.sign_mask();
    // <psi|P|psi> = sum_b conj(psi[b ^ flip]) * phase(b) * psi[b]
    Complex acc{0.0};
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const Complex v = std::conj(amps[b ^ flip]) * amps[b];
        acc += (std::popcount(b & sign) & 1U) ? -v : v;
    }
    return (i_power(pauli.num_y()) * acc).real();
}

Observable build_observable(std::span<const double> gammas,
                            std::span<const PauliString> pauli_set) {
    QLAM_REQUIRE(gammas.size() == pauli_set.size(), ErrorKind::Shape,
                 "observable needs one gamma per Pauli string: " +
                     std::to_string(gammas.size()) + " vs " +
                     std::to_string(pauli_set.size()));
    QLAM_REQUIRE(!pauli_set.empty(), ErrorKind::Shape,
                 "observable needs at least one term");
    Observable obs;
    obs.n_qubits_ = pauli_set.front().num_qubits();
    obs.terms_.reserve(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        QLAM_REQUIRE(std::isfinite(gammas[i]), ErrorKind::Numeric,
                     "non-finite gamma at term " + std::to_string(i));
        QLAM_REQUIRE(pauli_set[i].num_qubits() == obs.n_qubits_,
                     ErrorKind::Shape, "Pauli strings of mixed length");
        obs.terms_.push_back({gammas[i], pauli_set[i]});
    }
    return obs;
}

double expectation_exact(const StateVector &state, const Observable &obs) {
    QLAM_REQUIRE(state.num_qubits() == obs.num_qubits(), ErrorKind::Shape,
                 "observable / state qubit-count mismatch");
    double acc = 0.0;
    for (const auto &t : obs.terms()) {
        acc += t.gamma * pauli_expectation(state, t.pauli);
    }
    return acc;
}

double sample_pauli_mean(double expval, std::uint64_t shots, std::uint64_t key) {
    const double p_plus = std::clamp(0.5 * (1.0 + expval), 0.0, 1.0);
    CounterRng rng(key);
    // the count of +1 outcomes over m shots is Binomial(m, p_plus)
    std::binomial_distribution<std::uint64_t> dist(shots, p_plus);
    const auto n_plus = static_cast<double>(dist(rng));
    const auto m = static_cast<double>(shots);
    return (2.0 * n_plus - m) / m;
}

double expectation_sampled(const StateVector &state, const Observable &obs,
                           const ShotConfig &cfg, std::uint64_t stream) {
    QLAM_REQUIRE(cfg.mode == ShotMode::Sampled, ErrorKind::Config,
                 "expectation_sampled requires sampled shot mode");
    cfg.validate();
    QLAM_REQUIRE(state.num_qubits() == obs.num_qubits(), ErrorKind::Shape,
                 "observable / state qubit-count mismatch");
    double acc = 0.0;
    const auto terms = obs.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double ev = pauli_expectation(state, terms[i].pauli);
        acc += terms[i].gamma *
               sample_pauli_mean(ev, cfg.shots_per_term,
                                 derive_key(cfg.rng_seed, {stream, i}));
    }
    return acc;
}

std::vector<PauliString> default_pauli_pool(std::size_t n_qubits) {
    std::vector<PauliString> pool;
    for (std::size_t j = 0; j < n_qubits; ++j) {
        pool.push_back(PauliString::single(n_qubits, j, Pauli::Z));
    }
    for (std::size_t j = 0; j < n_qubits; ++j) {
        pool.push_back(PauliString::single(n_qubits, j, Pauli::X));
    }
    for (std::size_t j = 0; j < n_qubits && n_qubits > 1; ++j) {
        PauliString zz(n_qubits);
        zz.set(j, Pauli::Z).set((j + 1) % n_qubits, Pauli::Z);
        if (std::find(pool.begin(), pool.end(), zz) == pool.end()) {
            pool.push_back(std::move(zz));
        }
    }
    return pool;
}

} // namespace qlam
