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
#include "qlam/gradients.hpp"

#include "qlam/error.hpp"
#include "qlam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlam {

namespace {

/// Im<lambda|P_q|psi> for P = Y or Z on one qubit.
double generator_overlap(const StateVector &lambda, const StateVector &psi,
                         GateKind kind, std::size_t q) {
    const std::size_t mask = std::size_t{1} << q;
    const auto l = lambda.amplitudes();
    const auto s = psi.amplitudes();
    Complex acc{0.0};
    if (kind == GateKind::RZ) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            const Complex v = std::conj(l[b]) * s[b];
            acc += (b & mask) ? -v : v;
        }
    } else {
        // (Y psi)[b] = +i psi[b ^ m] if bit set, -i psi[b ^ m] otherwise
        for (std::size_t b = 0; b < s.size(); ++b) {
            const Complex v = std::conj(l[b]) * s[b ^ mask];
            acc += (b & mask) ? v : -v;
        }
        acc *= Complex{0.0, 1.0};
    }
    return acc.imag();
}

bool row_is_zero(std::span<const double> row) {
    return std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; });
}

void require_finite(std::span<const double> xs, std::size_t t,
                    const char *what) {
    for (const double x : xs) {
        QLAM_REQUIRE(std::isfinite(x), ErrorKind::Numeric,
                     std::string("non-finite ") + what + " at timestep " +
                         std::to_string(t));
    }
}

/// Forward pass that records entry states every `interval` steps.
struct Tape {
    std::vector<double> tokens;
    std::vector<StateVector> checkpoints; ///< state entering step k*interval
    std::size_t interval;
};

Tape record(std::span<const double> raw_tokens, const QlamParams &params,
            const QlamConfig &cfg, std::size_t interval) {
    QLAM_REQUIRE(interval >= 1, ErrorKind::Config,
                 "checkpoint interval must be >= 1");
    Tape tape{validate_tokens(raw_tokens, cfg), {}, interval};
    StateVector psi(cfg.n_qubits());
    std::vector<double> e(cfg.n_qubits());
    for (std::size_t t = 0; t < tape.tokens.size(); ++t) {
        if (t % interval == 0) {
            tape.checkpoints.push_back(psi);
        }
        embed_token(tape.tokens[t], params, e);
        step(psi, e, cfg.ansatz, params.theta.data);
    }
    return tape;
}

/// Accumulates into `grad` the gradient of sum_{t,h} c[t,h] r_t[h] for all
/// non-classifier parameters.
void backprop_readouts(const Tape &tape, const QlamParams &params,
                       const QlamConfig &cfg, std::span<const double> cotangent,
                       QlamParams &grad) {
    const std::size_t T = tape.tokens.size();
    const std::size_t H = cfg.n_heads;
    const std::size_t n = cfg.n_qubits();
    const std::size_t dq = cfg.d_q;
    QLAM_REQUIRE(cotangent.size() == T * H, ErrorKind::Shape,
                 "readout cotangent must be T x n_heads");
    const std::vector<PauliString> pool = default_pauli_pool(n);
    const std::size_t p = pool.size();
    const std::vector<StepOp> ops = step_ops(cfg.ansatz);

    // last step with a non-zero cotangent; nothing later contributes
    std::size_t last = T;
    for (std::size_t t = T; t-- > 0;) {
        if (!row_is_zero(cotangent.subspan(t * H, H))) {
            last = t;
            break;
        }
    }
    if (last == T) {
        return;
    }

    StateVector lambda(n);
    std::fill(lambda.amplitudes().begin(), lambda.amplitudes().end(), Complex{0.0});
    std::vector<StateVector> window;
    std::vector<double> e(n);
    std::vector<double> de(n);
    std::vector<double> dq_vec(dq);
    std::vector<double> z(p);
    std::vector<double> dz(p);
    std::vector<double> hidden(cfg.decoder_hidden);
    std::vector<double> gamma(p);
    std::vector<double> dgamma(p);
    std::vector<double> dhidden(cfg.decoder_hidden);
    std::vector<double> dq_head(dq);

    const std::size_t interval = tape.interval;
    for (std::size_t w = last / interval + 1; w-- > 0;) {
        const std::size_t begin = w * interval;
        const std::size_t end = std::min(begin + interval, last + 1);
        // window[k] = state after step begin + k
        window.clear();
        StateVector psi = tape.checkpoints[w];
        for (std::size_t t = begin; t < end; ++t) {
            embed_token(tape.tokens[t], params, e);
            step(psi, e, cfg.ansatz, params.theta.data);
            window.push_back(psi);
        }

        for (std::size_t t = end; t-- > begin;) {
            psi = window[t - begin];
            embed_token(tape.tokens[t], params, e);
            std::fill(de.begin(), de.end(), 0.0);

            const auto c_row = cotangent.subspan(t * H, H);
            if (!row_is_zero(c_row)) {
                for (std::size_t i = 0; i < p; ++i) {
                    z[i] = pauli_expectation(psi, pool[i]);
                }
                const std::vector<double> q = query(e, params);
                std::fill(dz.begin(), dz.end(), 0.0);
                std::fill(dq_vec.begin(), dq_vec.end(), 0.0);
                for (std::size_t h = 0; h < H; ++h) {
                    const double c = c_row[h];
                    if (c == 0.0) {
                        continue;
                    }
                    const auto &dec = params.decoders[h];
                    auto &gdec = grad.decoders[h];
                    dec.forward(q, hidden, gamma);
                    for (std::size_t i = 0; i < p; ++i) {
                        dgamma[i] = c * z[i];
                        dz[i] += c * gamma[i];
                    }
                    dec.out.backward(hidden, dgamma, gdec.out, dhidden);
                    for (std::size_t k = 0; k < hidden.size(); ++k) {
                        dhidden[k] *= 1.0 - hidden[k] * hidden[k];
                    }
                    dec.hidden.backward(q, dhidden, gdec.hidden, dq_head);
                    for (std::size_t k = 0; k < dq; ++k) {
                        dq_vec[k] += dq_head[k];
                    }
                }
                // q = W_Q e
                for (std::size_t r = 0; r < dq; ++r) {
                    for (std::size_t col = 0; col < n; ++col) {
                        grad.w_q.data[r * n + col] += dq_vec[r] * e[col];
                        de[col] += params.w_q.data[r * n + col] * dq_vec[r];
                    }
                }
                // d<P_i>/d<psi| = P_i |psi>
                for (std::size_t i = 0; i < p; ++i) {
                    if (dz[i] != 0.0) {
                        pool[i].apply_add(psi.amplitudes(), dz[i],
                                          lambda.amplitudes());
                    }
                }
            }

            for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
                const StepOp &op = *it;
                if (op.kind != GateKind::CNOT) {
                    const double g = generator_overlap(lambda, psi, op.kind, op.q0);
                    if (op.source == AngleSource::Theta) {
                        grad.theta.data[op.index] += g;
                    } else {
                        de[op.index] += g;
                    }
                }
                apply_op(psi, op, e, params.theta.data, /*inverse=*/true);
                apply_op(lambda, op, e, params.theta.data, /*inverse=*/true);
            }

            require_finite(de, t, "embedding gradient");
            const double x = tape.tokens[t];
            params.embed.backward(std::span<const double>(&x, 1), de, grad.embed,
                                  {});
        }
    }
}

std::vector<double> readouts_of(std::span<const double> tokens,
                                const QlamParams &params, const QlamConfig &cfg,
                                std::optional<AngleShift> shift) {
    return forward(tokens, params, cfg, {}, 0, shift).readouts;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

} // namespace

GradBundle loss_and_grad(std::span<const double> tokens, std::size_t label,
                         const QlamParams &params, const QlamConfig &cfg,
                         std::size_t checkpoint_interval) {
    const ReadoutTrace tr = forward(tokens, params, cfg);
    require_finite(tr.logits, tr.n_steps - 1, "logit");
    auto [loss, dlogits] = softmax_cross_entropy(tr.logits, label);
    QLAM_REQUIRE(std::isfinite(loss), ErrorKind::Numeric, "non-finite loss");

    GradBundle out{loss, tr.logits, zeros_like(params)};
    std::vector<double> dfeatures(cfg.feature_dim());
    params.classifier.backward(tr.features, dlogits, out.grad.classifier,
                               dfeatures);

    const std::size_t T = tr.n_steps;
    const std::size_t H = cfg.n_heads;
    std::vector<double> cotangent(T * H, 0.0);
    for (std::size_t k = 0; k < cfg.t_keep; ++k) {
        const std::size_t back = cfg.t_keep - 1 - k;
        if (back < T) {
            std::copy_n(dfeatures.begin() + static_cast<std::ptrdiff_t>(k * H), H,
                        cotangent.begin() +
                            static_cast<std::ptrdiff_t>((T - 1 - back) * H));
        }
    }
    const Tape tape = record(tokens, params, cfg, checkpoint_interval);
    backprop_readouts(tape, params, cfg, cotangent, out.grad);
    return out;
}

QlamParams readout_gradient(std::span<const double> tokens,
                            const QlamParams &params, const QlamConfig &cfg,
                            std::span<const double> cotangent,
                            std::size_t checkpoint_interval) {
    cfg.validate();
    params.check_shapes(cfg);
    QlamParams grad = zeros_like(params);
    const Tape tape = record(tokens, params, cfg, checkpoint_interval);
    backprop_readouts(tape, params, cfg, cotangent, grad);
    return grad;
}

double param_shift_readout_grad(std::span<const double> tokens,
                                const QlamParams &params, const QlamConfig &cfg,
                                std::span<const double> cotangent,
                                std::size_t theta_index, double shift) {
    QLAM_REQUIRE(theta_index < params.theta.size(), ErrorKind::Index,
                 "theta index out of range");
    QLAM_REQUIRE(cotangent.size() == tokens.size() * cfg.n_heads,
                 ErrorKind::Shape, "readout cotangent must be T x n_heads");
    double total = 0.0;
    for (std::size_t s = 0; s < tokens.size(); ++s) {
        const auto plus = readouts_of(tokens, params, cfg,
                                      AngleShift{s, theta_index, shift});
        const auto minus = readouts_of(tokens, params, cfg,
                                       AngleShift{s, theta_index, -shift});
        total += 0.5 * (dot(cotangent, plus) - dot(cotangent, minus));
    }
    return total;
}

double param_shift_readout_grad(std::span<const double> tokens,
                                const QlamParams &params, const QlamConfig &cfg,
                                std::span<const double> cotangent,
                                std::size_t theta_index) {
    return param_shift_readout_grad(tokens, params, cfg, cotangent, theta_index,
                                    std::numbers::pi / 2);
}

double param_shift_grad(std::span<const double> tokens, std::size_t label,
                        const QlamParams &params, const QlamConfig &cfg,
                        std::size_t theta_index) {
    const ReadoutTrace tr = forward(tokens, params, cfg);
    const auto dlogits = softmax_cross_entropy(tr.logits, label).dlogits;
    // dL/dfeatures = W_c^T dlogits
    const std::size_t F = cfg.feature_dim();
    std::vector<double> dfeatures(F, 0.0);
    for (std::size_t c = 0; c < cfg.n_classes; ++c) {
        for (std::size_t f = 0; f < F; ++f) {
            dfeatures[f] += params.classifier.weight.data[c * F + f] * dlogits[c];
        }
    }
    const std::size_t T = tr.n_steps;
    const std::size_t H = cfg.n_heads;
    std::vector<double> cotangent(T * H, 0.0);
    for (std::size_t k = 0; k < cfg.t_keep; ++k) {
        const std::size_t back = cfg.t_keep - 1 - k;
        if (back < T) {
            for (std::size_t h = 0; h < H; ++h) {
                cotangent[(T - 1 - back) * H + h] = dfeatures[k * H + h];
            }
        }
    }
    return param_shift_readout_grad(tokens, params, cfg, cotangent, theta_index);
}

GradBundle batch_loss_and_grad(std::span<const SequenceSample> samples,
                               std::span<const std::size_t> batch,
                               const QlamParams &params, const QlamConfig &cfg,
                               std::size_t workers) {
    QLAM_REQUIRE(!batch.empty(), ErrorKind::Config, "empty batch");
    std::vector<GradBundle> per_sample(batch.size());
    parallel_for(batch.size(), workers, [&](std::size_t k) {
        const auto &s = samples[batch[k]];
        per_sample[k] = loss_and_grad(s.tokens, s.label, params, cfg);
    });

    GradBundle out{0.0, {}, zeros_like(params)};
    auto dst = out.grad.tensors();
    for (const auto &g : per_sample) {
        out.loss += g.loss;
        const auto src = g.grad.tensors();
        for (std::size_t k = 0; k < dst.size(); ++k) {
            for (std::size_t i = 0; i < dst[k]->size(); ++i) {
                dst[k]->data[i] += src[k]->data[i];
            }
        }
    }
    const auto b = static_cast<double>(batch.size());
    out.loss /= b;
    for (Tensor *t : dst) {
        for (auto &x : t->data) {
            x /= b;
        }
    }
    return out;
}

} // namespace qlam
