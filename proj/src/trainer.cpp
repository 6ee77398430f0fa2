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
#include "qlam/trainer.hpp"

#include "qlam/checkpoint.hpp"
#include "qlam/error.hpp"
#include "qlam/gradients.hpp"
#include "qlam/parallel.hpp"
#include "qlam/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace qlam {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// stream tags for derive_key
constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kShuffleTag = 0x73687566ULL;

} // namespace

std::size_t default_epochs(DatasetKind kind) {
    return kind == DatasetKind::SCifar10 ? 50 : 30;
}

void TrainConfig::validate() const {
    QLAM_REQUIRE(epochs >= 1, ErrorKind::Config, "epochs must be >= 1");
    QLAM_REQUIRE(batch_size >= 1, ErrorKind::Config, "batch_size must be >= 1");
    QLAM_REQUIRE(std::isfinite(base_lr) && base_lr > 0.0, ErrorKind::Config,
                 "base_lr must be a positive finite number");
    QLAM_REQUIRE(clip_norm > 0.0, ErrorKind::Config, "clip_norm must be > 0");
    QLAM_REQUIRE(n_folds >= 2 || split_mode == SplitMode::Holdout,
                 ErrorKind::Config, "k-fold mode needs n_folds >= 2");
    QLAM_REQUIRE(fold < n_folds, ErrorKind::Config,
                 "fold " + std::to_string(fold) + " outside [0, n_folds)");
    QLAM_REQUIRE(elman_hidden >= 1, ErrorKind::Config, "elman_hidden must be >= 1");
    QLAM_REQUIRE(workers >= 1, ErrorKind::Config, "workers must be >= 1");
    shots.validate();
    model_config().validate();
}

QlamConfig TrainConfig::model_config() const {
    QlamConfig mc;
    mc.ansatz = {n_qubits, n_layers, entangler};
    mc.d_q = d_q;
    mc.n_heads = n_heads;
    mc.decoder_hidden = decoder_hidden;
    mc.n_classes = 10;
    mc.t_keep = t_keep;
    mc.clamp_tokens = clamp_tokens;
    return mc;
}

fs::path TrainConfig::metrics_path() const {
    return fs::path(out_dir) / ("metrics_seed" + std::to_string(seed) + "_fold" +
                                std::to_string(fold) + ".csv");
}

fs::path TrainConfig::checkpoint_path() const {
    return fs::path(out_dir) / ("checkpoint_seed" + std::to_string(seed) +
                                "_fold" + std::to_string(fold) + ".bin");
}

void apply_config_json(TrainConfig &cfg, const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ParseError(e.byte, std::string("config is not valid JSON: ") + e.what());
    }
    QLAM_REQUIRE(j.is_object(), ErrorKind::Config, "config must be a JSON object");
    try {
        for (const auto &[key, v] : j.items()) {
            if (key == "dataset") {
                cfg.dataset = parse_dataset_kind(v.get<std::string>());
                if (!j.contains("epochs")) {
                    cfg.epochs = default_epochs(cfg.dataset);
                }
            } else if (key == "data_dir") {
                cfg.data_dir = v.get<std::string>();
            } else if (key == "model") {
                const auto m = v.get<std::string>();
                QLAM_REQUIRE(m == "qlam" || m == "elman", ErrorKind::Config,
                             "model must be 'qlam' or 'elman'");
                cfg.model = m == "qlam" ? ModelKind::Qlam : ModelKind::Elman;
            } else if (key == "n_qubits") {
                cfg.n_qubits = v.get<std::size_t>();
            } else if (key == "n_layers") {
                cfg.n_layers = v.get<std::size_t>();
            } else if (key == "entangler") {
                const auto e = v.get<std::string>();
                QLAM_REQUIRE(e == "ring" || e == "linear", ErrorKind::Config,
                             "entangler must be 'ring' or 'linear'");
                cfg.entangler = e == "ring" ? Entangler::Ring : Entangler::Linear;
            } else if (key == "n_heads") {
                cfg.n_heads = v.get<std::size_t>();
            } else if (key == "d_q") {
                cfg.d_q = v.get<std::size_t>();
            } else if (key == "decoder_hidden") {
                cfg.decoder_hidden = v.get<std::size_t>();
            } else if (key == "t_keep") {
                cfg.t_keep = v.get<std::size_t>();
            } else if (key == "elman_hidden") {
                cfg.elman_hidden = v.get<std::size_t>();
            } else if (key == "epochs") {
                cfg.epochs = v.get<std::size_t>();
            } else if (key == "batch_size") {
                cfg.batch_size = v.get<std::size_t>();
            } else if (key == "base_lr") {
                cfg.base_lr = v.get<double>();
            } else if (key == "clip_norm") {
                cfg.clip_norm = v.get<double>();
            } else if (key == "seed") {
                cfg.seed = v.get<std::uint64_t>();
            } else if (key == "fold") {
                cfg.fold = v.get<std::size_t>();
            } else if (key == "n_folds") {
                cfg.n_folds = v.get<std::size_t>();
            } else if (key == "split_mode") {
                const auto s = v.get<std::string>();
                QLAM_REQUIRE(s == "holdout" || s == "kfold", ErrorKind::Config,
                             "split_mode must be 'holdout' or 'kfold'");
                cfg.split_mode = s == "holdout" ? SplitMode::Holdout : SplitMode::KFold;
            } else if (key == "train_size") {
                cfg.train_size = v.get<std::size_t>();
            } else if (key == "test_size") {
                cfg.test_size = v.get<std::size_t>();
            } else if (key == "shot_mode") {
                const auto s = v.get<std::string>();
                QLAM_REQUIRE(s == "exact" || s == "sampled", ErrorKind::Config,
                             "shot_mode must be 'exact' or 'sampled'");
                cfg.shots.mode = s == "exact" ? ShotMode::Exact : ShotMode::Sampled;
            } else if (key == "shots") {
                cfg.shots.shots_per_term = v.get<std::uint64_t>();
            } else if (key == "shot_seed") {
                cfg.shots.rng_seed = v.get<std::uint64_t>();
            } else if (key == "clamp_tokens") {
                cfg.clamp_tokens = v.get<bool>();
            } else if (key == "workers") {
                cfg.workers = v.get<std::size_t>();
            } else if (key == "out_dir") {
                cfg.out_dir = v.get<std::string>();
            } else if (key == "wall_clock") {
                cfg.wall_clock = v.get<bool>();
            } else if (key == "verbose") {
                cfg.verbose = v.get<bool>();
            } else {
                throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Config, std::string("bad config value: ") + e.what());
    }
}

TrainConfig load_train_config(const fs::path &path) {
    std::ifstream f(path);
    QLAM_REQUIRE(f.good(), ErrorKind::Io, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    TrainConfig cfg;
    apply_config_json(cfg, ss.str());
    return cfg;
}

std::string format_metrics_row(const MetricsRow &r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%.17g,%.6f,%llu,%zu",
                  r.epoch, r.split.c_str(), r.loss, r.accuracy, r.lr,
                  r.wall_seconds, static_cast<unsigned long long>(r.seed), r.fold);
    return buf;
}

std::vector<MetricsRow> read_metrics_csv(const fs::path &path) {
    std::ifstream f(path);
    QLAM_REQUIRE(f.good(), ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::string line;
    std::getline(f, line);
    QLAM_REQUIRE(line == kMetricsHeader, ErrorKind::Parse,
                 "unexpected metrics header in '" + path.string() + "'");
    std::vector<MetricsRow> rows;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        QLAM_REQUIRE(cells.size() == 8, ErrorKind::Parse,
                     "metrics line " + std::to_string(lineno) + " has " +
                         std::to_string(cells.size()) + " fields");
        try {
            rows.push_back({std::stoul(cells[0]), cells[1], std::stod(cells[2]),
                            std::stod(cells[3]), std::stod(cells[4]),
                            std::stod(cells[5]), std::stoull(cells[6]),
                            std::stoul(cells[7])});
        } catch (const std::logic_error &) {
            throw Error(ErrorKind::Parse,
                        "malformed number on metrics line " + std::to_string(lineno));
        }
    }
    return rows;
}

RunData select_fold(const TrainConfig &cfg, std::vector<SequenceSample> train_pool,
                    std::vector<SequenceSample> test_pool) {
    RunData out;
    auto pick = [](const std::vector<SequenceSample> &pool,
                   const std::vector<std::size_t> &idx) {
        std::vector<SequenceSample> v;
        v.reserve(idx.size());
        for (const auto i : idx) {
            v.push_back(pool[i]);
        }
        return v;
    };
    if (cfg.split_mode == SplitMode::Holdout) {
        const std::size_t ntr = cfg.train_size ? cfg.train_size : train_pool.size();
        const std::size_t nte = cfg.test_size ? cfg.test_size : test_pool.size();
        const HoldoutRun run = make_holdout_run(train_pool.size(), test_pool.size(),
                                                ntr, nte, cfg.seed, cfg.fold);
        out.train = pick(train_pool, run.train);
        out.test = pick(test_pool, run.test);
    } else {
        std::vector<SequenceSample> pool = std::move(train_pool);
        pool.insert(pool.end(), std::make_move_iterator(test_pool.begin()),
                    std::make_move_iterator(test_pool.end()));
        const std::size_t want = cfg.train_size + cfg.test_size;
        if (want > 0 && want < pool.size()) {
            const HoldoutRun sub =
                make_holdout_run(pool.size(), 0, want, 0, cfg.seed, 0);
            pool = pick(pool, sub.train);
        }
        const FoldPlan plan = make_folds(pool.size(), cfg.seed, cfg.n_folds);
        out.train = pick(pool, plan.folds[cfg.fold].train);
        out.test = pick(pool, plan.folds[cfg.fold].test);
    }
    return out;
}

RunData prepare_data(const TrainConfig &cfg) {
    const fs::path root =
        cfg.data_dir.empty() ? resolve_data_root("data") : fs::path(cfg.data_dir);
    return select_fold(cfg, load_dataset(cfg.dataset, root, Split::Train),
                       load_dataset(cfg.dataset, root, Split::Test));
}

QlamParams initial_qlam_params(const TrainConfig &cfg) {
    QlamParams p(cfg.model_config());
    CounterRng rng(derive_key(cfg.seed, {kInitTag, cfg.fold}));
    p.init(rng);
    return p;
}

ElmanParams initial_elman_params(const TrainConfig &cfg) {
    ElmanParams p(cfg.elman_hidden, 10);
    CounterRng rng(derive_key(cfg.seed, {kInitTag, cfg.fold}));
    p.init(rng);
    return p;
}

namespace {

struct SampleEval {
    double loss = 0.0;
    bool correct = false;
};

EvalResult reduce_evals(const std::vector<SampleEval> &evals) {
    EvalResult r;
    r.total = evals.size();
    for (const auto &e : evals) {
        r.loss += e.loss;
        r.correct += e.correct ? 1 : 0;
    }
    if (r.total > 0) {
        r.loss /= static_cast<double>(r.total);
        r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
    }
    return r;
}

/// Per-sample loss, prediction, and flat gradient, reduced in batch order.
struct BatchOutcome {
    double loss = 0.0;
    std::size_t correct = 0;
    std::vector<double> grad;
};

struct QlamAdapter {
    QlamConfig mc;
    QlamParams params;

    [[nodiscard]] BatchOutcome batch(const std::vector<SequenceSample> &data,
                                     std::span<const std::size_t> idx,
                                     std::size_t workers) const {
        std::vector<GradBundle> per(idx.size());
        parallel_for(idx.size(), workers, [&](std::size_t k) {
            const auto &s = data[idx[k]];
            per[k] = loss_and_grad(s.tokens, s.label, params, mc);
        });
        return reduce(per, data, idx);
    }

    static BatchOutcome reduce(const std::vector<GradBundle> &per,
                               const std::vector<SequenceSample> &data,
                               std::span<const std::size_t> idx) {
        BatchOutcome out;
        for (std::size_t k = 0; k < per.size(); ++k) {
            const auto g = flatten(per[k].grad);
            if (out.grad.empty()) {
                out.grad.assign(g.size(), 0.0);
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                out.grad[i] += g[i];
            }
            out.loss += per[k].loss;
            out.correct += argmax(per[k].logits) == data[idx[k]].label ? 1 : 0;
        }
        return out;
    }

    [[nodiscard]] std::vector<double> flat() const { return flatten(params); }
    void set_flat(std::span<const double> f) { unflatten(f, params); }
    [[nodiscard]] bool finite() const { return params.all_finite(); }
};

struct ElmanAdapter {
    ElmanParams params;

    [[nodiscard]] BatchOutcome batch(const std::vector<SequenceSample> &data,
                                     std::span<const std::size_t> idx,
                                     std::size_t workers) const {
        std::vector<std::optional<ElmanGrad>> per(idx.size());
        parallel_for(idx.size(), workers, [&](std::size_t k) {
            const auto &s = data[idx[k]];
            per[k] = elman_loss_and_grad(s.tokens, s.label, params);
        });
        BatchOutcome out;
        for (std::size_t k = 0; k < per.size(); ++k) {
            const auto g = flatten(per[k]->grad);
            if (out.grad.empty()) {
                out.grad.assign(g.size(), 0.0);
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                out.grad[i] += g[i];
            }
            out.loss += per[k]->loss;
            out.correct += argmax(per[k]->logits) == data[idx[k]].label ? 1 : 0;
        }
        return out;
    }

    [[nodiscard]] std::vector<double> flat() const { return flatten(params); }
    void set_flat(std::span<const double> f) { unflatten(f, params); }
    [[nodiscard]] bool finite() const {
        const auto ts = params.tensors();
        return std::all_of(ts.begin(), ts.end(),
                           [](const Tensor *t) { return t->all_finite(); });
    }
};

class MetricsWriter {
  public:
    explicit MetricsWriter(const fs::path &path) : path_(path) {
        std::error_code ec;
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path(), ec);
        }
        std::ofstream f(path, std::ios::trunc);
        QLAM_REQUIRE(f.good(), ErrorKind::Io,
                     "cannot write metrics file '" + path.string() + "'");
        f << kMetricsHeader << '\n';
    }
    void append(const MetricsRow &row) {
        std::ofstream f(path_, std::ios::app);
        QLAM_REQUIRE(f.good(), ErrorKind::Io,
                     "cannot append to metrics file '" + path_.string() + "'");
        f << format_metrics_row(row) << '\n';
    }

  private:
    fs::path path_;
};

template <typename Adapter, typename EvalFn>
TrainResult train_loop(const TrainConfig &cfg, const RunData &data,
                       Adapter &model, EvalFn &&eval_test) {
    QLAM_REQUIRE(!data.train.empty(), ErrorKind::Config, "empty training set");
    TrainResult result;
    result.metrics_path = cfg.metrics_path();
    result.checkpoint_path = cfg.checkpoint_path();
    MetricsWriter writer(result.metrics_path);

    std::vector<double> flat = model.flat();
    result.n_params = flat.size();
    AdamState adam(flat.size(), cfg.base_lr);
    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] {
        if (!cfg.wall_clock) {
            return 0.0;
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cosine_lr(epoch, cfg.epochs, cfg.base_lr);
        CounterRng shuffle_rng(derive_key(cfg.seed, {kShuffleTag, cfg.fold, epoch}));
        shuffle_rng.shuffle(std::span<std::size_t>(order));

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t step = 0;
        for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++step) {
            const std::size_t hi = std::min(lo + cfg.batch_size, order.size());
            const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
            BatchOutcome b;
            try {
                b = model.batch(data.train, idx, cfg.workers);
            } catch (const Error &e) {
                throw Error(e.kind(), "epoch " + std::to_string(epoch + 1) + " step " +
                                          std::to_string(step) + ": " + e.what());
            }
            QLAM_REQUIRE(std::isfinite(b.loss), ErrorKind::Numeric,
                         "non-finite loss at epoch " + std::to_string(epoch + 1) +
                             " step " + std::to_string(step));
            loss_sum += b.loss;
            correct += b.correct;
            const auto n = static_cast<double>(idx.size());
            for (auto &g : b.grad) {
                g /= n;
            }
            clip_global_norm(b.grad, cfg.clip_norm);
            adam_step(flat, b.grad, adam, lr);
            model.set_flat(flat);
            QLAM_REQUIRE(model.finite(), ErrorKind::Numeric,
                         "non-finite parameters after epoch " +
                             std::to_string(epoch + 1) + " step " +
                             std::to_string(step));
        }
        const auto ntr = static_cast<double>(data.train.size());
        MetricsRow train_row{epoch + 1, "train", loss_sum / ntr,
                             static_cast<double>(correct) / ntr, lr, seconds(),
                             cfg.seed, cfg.fold};
        writer.append(train_row);
        result.rows.push_back(train_row);

        const EvalResult test = eval_test();
        MetricsRow test_row{epoch + 1, "test", test.loss, test.accuracy, lr,
                            seconds(), cfg.seed, cfg.fold};
        writer.append(test_row);
        result.rows.push_back(test_row);
        result.final_test = test;
        if (cfg.verbose) {
            std::cerr << "epoch " << epoch + 1 << "/" << cfg.epochs
                      << " train_loss " << train_row.loss << " train_acc "
                      << train_row.accuracy << " test_acc " << test.accuracy
                      << "\n";
        }
    }
    save_checkpoint(result.checkpoint_path, model.params);
    return result;
}

} // namespace

EvalResult evaluate_qlam(const QlamParams &params, const TrainConfig &cfg,
                         const std::vector<SequenceSample> &samples) {
    const QlamConfig mc = cfg.model_config();
    std::vector<SampleEval> evals(samples.size());
    parallel_for(samples.size(), cfg.workers, [&](std::size_t k) {
        const auto tr = forward(samples[k].tokens, params, mc, cfg.shots, k);
        evals[k] = {softmax_cross_entropy(tr.logits, samples[k].label).loss,
                    argmax(tr.logits) == samples[k].label};
    });
    return reduce_evals(evals);
}

EvalResult evaluate_elman(const ElmanParams &params, const TrainConfig &cfg,
                          const std::vector<SequenceSample> &samples) {
    std::vector<SampleEval> evals(samples.size());
    parallel_for(samples.size(), cfg.workers, [&](std::size_t k) {
        const auto tr = elman_forward(samples[k].tokens, params);
        evals[k] = {softmax_cross_entropy(tr.logits, samples[k].label).loss,
                    argmax(tr.logits) == samples[k].label};
    });
    return reduce_evals(evals);
}

TrainResult train(const TrainConfig &cfg, const RunData &data) {
    cfg.validate();
    if (cfg.model == ModelKind::Qlam) {
        QlamAdapter model{cfg.model_config(), initial_qlam_params(cfg)};
        return train_loop(cfg, data, model, [&] {
            return evaluate_qlam(model.params, cfg, data.test);
        });
    }
    ElmanAdapter model{initial_elman_params(cfg)};
    return train_loop(cfg, data, model, [&] {
        return evaluate_elman(model.params, cfg, data.test);
    });
}

TrainResult train(const TrainConfig &cfg) {
    cfg.validate();
    return train(cfg, prepare_data(cfg));
}

EvalResult evaluate(const fs::path &checkpoint, const TrainConfig &cfg,
                    const RunData &data) {
    cfg.validate();
    if (cfg.model == ModelKind::Qlam) {
        QlamParams p(cfg.model_config());
        load_checkpoint(checkpoint, p);
        return evaluate_qlam(p, cfg, data.test);
    }
    ElmanParams p(cfg.elman_hidden, 10);
    load_checkpoint(checkpoint, p);
    return evaluate_elman(p, cfg, data.test);
}

EvalResult evaluate(const fs::path &checkpoint, const TrainConfig &cfg) {
    cfg.validate();
    return evaluate(checkpoint, cfg, prepare_data(cfg));
}

FoldSummary run_folds(const TrainConfig &cfg,
                      const std::vector<SequenceSample> &train_pool,
                      const std::vector<SequenceSample> &test_pool) {
    FoldSummary summary;
    for (std::size_t k = 0; k < cfg.n_folds; ++k) {
        TrainConfig fc = cfg;
        fc.fold = k;
        const TrainResult r = train(fc, select_fold(fc, train_pool, test_pool));
        summary.accuracies.push_back(r.final_test.accuracy);
    }
    const auto n = static_cast<double>(summary.accuracies.size());
    summary.mean =
        std::accumulate(summary.accuracies.begin(), summary.accuracies.end(), 0.0) / n;
    double ss = 0.0;
    for (const double a : summary.accuracies) {
        ss += (a - summary.mean) * (a - summary.mean);
    }
    summary.std = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;

    summary.summary_path =
        fs::path(cfg.out_dir) / ("folds_seed" + std::to_string(cfg.seed) + ".csv");
    std::ofstream f(summary.summary_path, std::ios::trunc);
    QLAM_REQUIRE(f.good(), ErrorKind::Io,
                 "cannot write '" + summary.summary_path.string() + "'");
    char buf[64];
    f << "fold,accuracy\n";
    for (std::size_t k = 0; k < summary.accuracies.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", summary.accuracies[k]);
        f << k << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", summary.mean);
    f << "mean," << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", summary.std);
    f << "std," << buf << '\n';
    return summary;
}

FoldSummary run_folds(const TrainConfig &cfg) {
    cfg.validate();
    const fs::path root =
        cfg.data_dir.empty() ? resolve_data_root("data") : fs::path(cfg.data_dir);
    return run_folds(cfg, load_dataset(cfg.dataset, root, Split::Train),
                     load_dataset(cfg.dataset, root, Split::Test));
}

} // namespace qlam
