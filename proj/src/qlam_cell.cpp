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
#include "qlam/qlam_cell.hpp"

#include "qlam/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qlam {

std::size_t QlamConfig::pool_size() const {
    return default_pauli_pool(n_qubits()).size();
}

void QlamConfig::validate() const {
    ansatz.validate();
    QLAM_REQUIRE(d_q >= 1, ErrorKind::Config, "d_q must be >= 1");
    QLAM_REQUIRE(n_heads >= 1, ErrorKind::Config, "n_heads must be >= 1");
    QLAM_REQUIRE(decoder_hidden >= 1, ErrorKind::Config,
                 "decoder_hidden must be >= 1");
    QLAM_REQUIRE(n_classes >= 2, ErrorKind::Config, "n_classes must be >= 2");
    QLAM_REQUIRE(t_keep >= 1, ErrorKind::Config, "t_keep must be >= 1");
}

void ObservableDecoder::forward(std::span<const double> q,
                                std::span<double> hidden_act,
                                std::span<double> gamma) const {
    hidden.forward(q, hidden_act);
    for (auto &h : hidden_act) {
        h = std::tanh(h);
    }
    out.forward(hidden_act, gamma);
}

QlamParams::QlamParams(const QlamConfig &cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_qubits();
    const std::size_t p = cfg.pool_size();
    embed = Affine("embed", n, 1);
    theta = Tensor("circuit.theta", {cfg.ansatz.num_params()});
    w_q = Tensor("query.weight", {cfg.d_q, n});
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
        const std::string prefix = "decoder." + std::to_string(h);
        decoders.push_back({Affine(prefix + ".hidden", cfg.decoder_hidden, cfg.d_q),
                            Affine(prefix + ".out", p, cfg.decoder_hidden)});
    }
    classifier = Affine("classifier", cfg.n_classes, cfg.feature_dim());
}

void QlamParams::init(CounterRng &rng) {
    embed.init(rng);
    theta.init_uniform(rng, -0.1, 0.1);
    const double bound = 1.0 / std::sqrt(static_cast<double>(w_q.shape[1]));
    w_q.init_uniform(rng, -bound, bound);
    for (auto &d : decoders) {
        d.hidden.init(rng);
        d.out.init(rng);
    }
    classifier.init(rng);
}

std::vector<Tensor *> QlamParams::tensors() {
    std::vector<Tensor *> out{&embed.weight, &embed.bias, &theta, &w_q};
    for (auto &d : decoders) {
        out.insert(out.end(), {&d.hidden.weight, &d.hidden.bias, &d.out.weight,
                               &d.out.bias});
    }
    out.insert(out.end(), {&classifier.weight, &classifier.bias});
    return out;
}

std::vector<const Tensor *> QlamParams::tensors() const {
    std::vector<const Tensor *> out{&embed.weight, &embed.bias, &theta, &w_q};
    for (const auto &d : decoders) {
        out.insert(out.end(), {&d.hidden.weight, &d.hidden.bias, &d.out.weight,
                               &d.out.bias});
    }
    out.insert(out.end(), {&classifier.weight, &classifier.bias});
    return out;
}

bool QlamParams::all_finite() const {
    const auto ts = tensors();
    return std::all_of(ts.begin(), ts.end(),
                       [](const Tensor *t) { return t->all_finite(); });
}

void QlamParams::check_shapes(const QlamConfig &cfg) const {
    const QlamParams ref(cfg);
    const auto mine = tensors();
    const auto want = ref.tensors();
    QLAM_REQUIRE(mine.size() == want.size(), ErrorKind::Shape,
                 "parameter bundle has " + std::to_string(mine.size()) +
                     " arrays, config expects " + std::to_string(want.size()));
    for (std::size_t i = 0; i < mine.size(); ++i) {
        QLAM_REQUIRE(mine[i]->shape == want[i]->shape &&
                         mine[i]->size() == want[i]->size(),
                     ErrorKind::Shape,
                     "parameter '" + want[i]->name + "' has the wrong shape");
    }
}

void embed_token(double token, const QlamParams &params, std::span<double> e) {
    params.embed.forward(std::span<const double>(&token, 1), e);
}

std::vector<double> query(std::span<const double> embedding,
                          const QlamParams &params) {
    const std::size_t dq = params.w_q.shape[0];
    const std::size_t n = params.w_q.shape[1];
    QLAM_REQUIRE(embedding.size() == n, ErrorKind::Shape,
                 "query: embedding length mismatch");
    std::vector<double> q(dq, 0.0);
    for (std::size_t r = 0; r < dq; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            acc += params.w_q.data[r * n + c] * embedding[c];
        }
        q[r] = acc;
    }
    return q;
}

Observable decode_observable(std::span<const double> q, std::size_t head,
                             const QlamParams &params,
                             std::span<const PauliString> pool) {
    QLAM_REQUIRE(head < params.decoders.size(), ErrorKind::Index,
                 "decoder head out of range");
    const auto &dec = params.decoders[head];
    QLAM_REQUIRE(dec.out.out_dim() == pool.size(), ErrorKind::Shape,
                 "decoder emits " + std::to_string(dec.out.out_dim()) +
                     " coordinates but the Pauli pool has " +
                     std::to_string(pool.size()));
    std::vector<double> hidden(dec.hidden.out_dim());
    std::vector<double> gamma(pool.size());
    dec.forward(q, hidden, gamma);
    return build_observable(gamma, pool);
}

std::vector<double> validate_tokens(std::span<const double> tokens,
                                    const QlamConfig &cfg) {
    QLAM_REQUIRE(!tokens.empty(), ErrorKind::Validation, "empty token sequence");
    std::vector<double> out(tokens.begin(), tokens.end());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const double x = out[t];
        QLAM_REQUIRE(std::isfinite(x), ErrorKind::Numeric,
                     "non-finite token at position " + std::to_string(t));
        if (x < 0.0 || x > 1.0) {
            QLAM_REQUIRE(cfg.clamp_tokens, ErrorKind::Validation,
                         "token " + std::to_string(x) + " at position " +
                             std::to_string(t) + " outside [0, 1]");
            out[t] = std::clamp(x, 0.0, 1.0);
        }
    }
    return out;
}

ReadoutTrace forward(std::span<const double> raw_tokens, const QlamParams &params,
                     const QlamConfig &cfg, const ShotConfig &shot,
                     std::uint64_t sample_index, std::optional<AngleShift> shift) {
    cfg.validate();
    shot.validate();
    params.check_shapes(cfg);
    const std::vector<double> tokens = validate_tokens(raw_tokens, cfg);
    const std::vector<PauliString> pool = default_pauli_pool(cfg.n_qubits());
    const std::size_t T = tokens.size();
    const std::size_t H = cfg.n_heads;
    const std::size_t p = pool.size();

    ReadoutTrace tr;
    tr.n_steps = T;
    tr.n_heads = H;
    tr.readouts.assign(T * H, 0.0);
    tr.gamma_l1.assign(T * H, 0.0);

    StateVector psi(cfg.n_qubits());
    tr.memory_amplitudes = psi.size();
    std::vector<double> e(cfg.n_qubits());
    std::vector<double> z(p);
    std::vector<double> hidden(cfg.decoder_hidden);
    std::vector<double> gamma(p);
    std::vector<double> shifted_theta;

    for (std::size_t t = 0; t < T; ++t) {
        embed_token(tokens[t], params, e);
        std::span<const double> theta = params.theta.data;
        if (shift && shift->timestep == t) {
            shifted_theta = params.theta.data;
            shifted_theta.at(shift->theta_index) += shift->delta;
            theta = shifted_theta;
        }
        step(psi, e, cfg.ansatz, theta);
        for (std::size_t i = 0; i < p; ++i) {
            z[i] = pauli_expectation(psi, pool[i]);
        }
        const std::vector<double> q = query(e, params);
        for (std::size_t h = 0; h < H; ++h) {
            params.decoders[h].forward(q, hidden, gamma);
            double r = 0.0;
            double l1 = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                l1 += std::abs(gamma[i]);
                if (shot.mode == ShotMode::Exact) {
                    r += gamma[i] * z[i];
                } else {
                    const auto key = derive_key(
                        shot.rng_seed, {sample_index, t, h * p + i});
                    r += gamma[i] * sample_pauli_mean(z[i], shot.shots_per_term, key);
                }
            }
            tr.readouts[t * H + h] = r;
            tr.gamma_l1[t * H + h] = l1;
        }
    }

    // features = r_{T-k+1} .. r_T, zero-padded at the front when T < t_keep
    tr.features.assign(cfg.feature_dim(), 0.0);
    for (std::size_t k = 0; k < cfg.t_keep; ++k) {
        const std::size_t back = cfg.t_keep - 1 - k;
        if (back < T) {
            const auto r = tr.readout(T - 1 - back);
            std::copy(r.begin(), r.end(),
                      tr.features.begin() + static_cast<std::ptrdiff_t>(k * H));
        }
    }
    tr.logits.assign(cfg.n_classes, 0.0);
    params.classifier.forward(tr.features, tr.logits);
    return tr;
}

std::size_t predict(std::span<const double> tokens, const QlamParams &params,
                    const QlamConfig &cfg, const ShotConfig &shot,
                    std::uint64_t sample_index) {
    return argmax(forward(tokens, params, cfg, shot, sample_index).logits);
}

} // namespace qlam
