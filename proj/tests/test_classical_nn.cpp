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

#include "qlam/classical_nn.hpp"
#include "qlam/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace qlam;

TEST_CASE("softmax cross entropy examples") {
    const std::vector<double> flat(10, 0.37);
    const auto u = softmax_cross_entropy(flat, 4);
    CHECK(u.loss == doctest::Approx(std::log(10.0)).epsilon(1e-15));

    const std::vector<double> sat{50.0, -50.0};
    const auto s = softmax_cross_entropy(sat, 0);
    CHECK(std::abs(s.loss) < 1e-10);
    CHECK(std::abs(s.dlogits[0]) < 1e-10);
    CHECK(std::abs(s.dlogits[1]) < 1e-10);

    const std::vector<double> huge{1000.0, 0.0, -1000.0};
    CHECK(softmax_cross_entropy(huge, 2).loss == doctest::Approx(2000.0));

    CounterRng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto z = oracle::uniform_vec(7, -5, 5, rng);
        const auto g = softmax_cross_entropy(z, rng.below(7));
        CHECK(std::abs(std::accumulate(g.dlogits.begin(), g.dlogits.end(), 0.0)) < 1e-15);
    }
    CHECK_THROWS_AS((void)softmax_cross_entropy(sat, 2), Error);
}

TEST_CASE("argmax ties go to the lowest index") {
    const std::vector<double> a{0.1, 0.2, 0.0, 3.0, 0.5};
    CHECK(argmax(a) == 3);
    const std::vector<double> b{0.0, 2.0, 1.0, 0.0, 2.0};
    CHECK(argmax(b) == 1);
}

TEST_CASE("cosine schedule examples") {
    CHECK(cosine_lr(0, 10, 1e-3) == 1e-3);
    CHECK(std::abs(cosine_lr(10, 10, 1e-3)) < 1e-19);
    CHECK(cosine_lr(5, 10, 1e-3) == doctest::Approx(5e-4).epsilon(1e-12));
    CHECK_THROWS_AS((void)cosine_lr(11, 10, 1e-3), Error);
    CHECK_THROWS_AS((void)cosine_lr(0, 0, 1e-3), Error);
}

TEST_CASE("adam examples") {
    std::vector<double> p{1.0, -2.0, 0.5};
    AdamState st(3, 1e-3);
    const std::vector<double> zero(3, 0.0);
    adam_step(p, zero, st, 1e-3);
    CHECK(p == std::vector<double>{1.0, -2.0, 0.5});

    std::vector<double> q{1.0, -2.0, 0.5};
    AdamState s2(3, 1e-3);
    const std::vector<double> g{100.0, -1e-3, 3.0};
    adam_step(q, g, s2, 1e-3);
    for (std::size_t i = 0; i < 3; ++i) {
        const double d = std::abs(q[i] - std::vector<double>{1.0, -2.0, 0.5}[i]);
        CHECK(d <= 1e-3 * (1 + 1e-6));
        CHECK(d > 0.9e-3);
    }
    // moments decay under a zero gradient
    const auto m = s2.m;
    adam_step(q, zero, s2, 1e-3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(s2.m[i]) == doctest::Approx(0.9 * std::abs(m[i])));

    std::vector<double> a{0.1, 0.2}, b{0.1, 0.2};
    AdamState sa(2, 1e-3), sb(2, 1e-3);
    const std::vector<double> ga{0.3, -0.7};
    adam_step(a, ga, sa, 1e-3);
    adam_step(b, ga, sb, 1e-3);
    CHECK(a == b);
}

TEST_CASE("adam matches a direct transcription of the update") {
    CounterRng rng(3);
    std::vector<double> p = oracle::uniform_vec(5, -1, 1, rng);
    std::vector<double> ref = p, m(5, 0.0), v(5, 0.0);
    AdamState st(5, 1e-2);
    for (int t = 1; t <= 10; ++t) {
        const auto g = oracle::uniform_vec(5, -1, 1, rng);
        adam_step(p, g, st, 1e-2);
        for (std::size_t i = 0; i < 5; ++i) {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(0.9, t));
            const double vh = v[i] / (1 - std::pow(0.999, t));
            ref[i] -= 1e-2 * mh / (std::sqrt(vh) + 1e-8);
        }
    }
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(std::abs(p[i] - ref[i]) < 1e-14);
}

TEST_CASE("global norm clipping") {
    std::vector<double> g{3.0, 4.0};
    CHECK(clip_global_norm(g, 1.0) == 5.0);
    CHECK(g[0] == doctest::Approx(0.6));
    CHECK(g[1] == doctest::Approx(0.8));
    std::vector<double> small{0.3, 0.4};
    CHECK(clip_global_norm(small, 1.0) == doctest::Approx(0.5));
    CHECK(small == std::vector<double>{0.3, 0.4});
}

TEST_CASE("affine forward/backward against finite differences") {
    CounterRng rng(4);
    Affine a("a", 3, 4);
    a.init(rng);
    for (double w : a.weight.data)
        CHECK(std::abs(w) <= 0.5);
    const auto x = oracle::uniform_vec(4, -1, 1, rng);
    const auto c = oracle::uniform_vec(3, -1, 1, rng);
    auto f = [&](const std::vector<double> &flat) {
        Affine b = a;
        b.weight.data.assign(flat.begin(), flat.begin() + 12);
        b.bias.data.assign(flat.begin() + 12, flat.end());
        std::vector<double> y(3);
        b.forward(x, y);
        return std::inner_product(y.begin(), y.end(), c.begin(), 0.0);
    };
    Affine grad("a", 3, 4);
    std::vector<double> dx(4);
    a.backward(x, c, grad, dx);
    std::vector<double> flat = a.weight.data;
    flat.insert(flat.end(), a.bias.data.begin(), a.bias.data.end());
    for (std::size_t i = 0; i < 15; ++i) {
        const double g = i < 12 ? grad.weight.data[i] : grad.bias.data[i - 12];
        CHECK(oracle::rel_err(g, oracle::central_diff(f, flat, i)) < 1e-8);
    }
    for (std::size_t j = 0; j < 4; ++j) {
        double want = 0.0;
        for (std::size_t r = 0; r < 3; ++r)
            want += c[r] * a.weight.data[r * 4 + j];
        CHECK(std::abs(dx[j] - want) < 1e-15);
    }
}

TEST_CASE("elman examples") {
    ElmanParams zero(5, 4);
    zero.readout.bias.data = {0.1, 0.2, -0.3, 0.0};
    const std::vector<double> tok{0.3, 0.9, 0.1};
    CHECK(elman_forward(tok, zero).logits == zero.readout.bias.data);

    CounterRng rng(5);
    ElmanParams p(6, 3);
    for (Tensor *t : p.tensors())
        for (auto &x : t->data)
            x = rng.uniform(-3, 3);
    const auto tr = elman_forward(oracle::uniform_vec(30, 0, 1, rng), p);
    for (double h : tr.hidden)
        CHECK(std::abs(h) <= 1.0);
    CHECK(count_params(ElmanParams(48, 10)) == 48 + 48 + 48 * 48 + 480 + 10);
}

TEST_CASE("elman gradient matches central differences (T=16)") {
    CounterRng rng(derive_key(6, {1}));
    ElmanParams p(5, 3);
    p.init(rng);
    const auto tok = oracle::uniform_vec(16, 0, 1, rng);
    const auto g = elman_loss_and_grad(tok, 1, p);
    const auto flat = flatten(p);
    const auto gflat = flatten(g.grad);
    auto f = [&](const std::vector<double> &x) {
        ElmanParams q = p;
        unflatten(x, q);
        return softmax_cross_entropy(elman_forward(tok, q).logits, 1).loss;
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i)
        worst = std::max(worst, oracle::rel_err(gflat[i], oracle::central_diff(f, flat, i)));
    CHECK(worst < 1e-5);
}

TEST_CASE("loss decreases monotonically on a separable toy set") {
    // Two classes separated by the mean token value.
    CounterRng rng(derive_key(7, {2}));
    std::vector<std::pair<std::vector<double>, std::size_t>> data;
    for (int i = 0; i < 16; ++i) {
        const std::size_t y = i % 2;
        data.push_back({oracle::uniform_vec(6, y ? 0.6 : 0.0, y ? 1.0 : 0.4, rng), y});
    }
    ElmanParams p(4, 2);
    p.init(rng);
    AdamState st(count_params(p), 1e-2);
    double prev = INFINITY;
    int decreases = 0;
    for (int step = 0; step < 20; ++step) {
        std::vector<double> grad(count_params(p), 0.0);
        double loss = 0.0;
        for (const auto &[tok, y] : data) {
            const auto g = elman_loss_and_grad(tok, y, p);
            const auto f = flatten(g.grad);
            for (std::size_t k = 0; k < f.size(); ++k)
                grad[k] += f[k] / data.size();
            loss += g.loss / data.size();
        }
        decreases += loss < prev;
        prev = loss;
        auto flat = flatten(p);
        adam_step(flat, grad, st, 1e-2);
        unflatten(flat, p);
    }
    CHECK(decreases == 20);
}

TEST_CASE("flatten/unflatten round trip and shape checks") {
    CounterRng rng(8);
    ElmanParams p(3, 2);
    p.init(rng);
    const auto flat = flatten(p);
    ElmanParams q(3, 2);
    unflatten(flat, q);
    CHECK(flatten(q) == flat);
    const std::vector<double> short_flat(flat.size() - 1, 0.0);
    CHECK_THROWS_AS(unflatten(short_flat, q), Error);
}
