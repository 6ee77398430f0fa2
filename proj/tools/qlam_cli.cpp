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

// qlam: train, evaluate, and cross-validate sequence classifiers.
//
//   qlam train --config run.json [--seed 3 --fold 1 --epochs 5 ...]
//   qlam eval  --config run.json --checkpoint runs/checkpoint_seed3_fold1.bin
//   qlam folds --config run.json
//
// Exit codes: 0 ok, 1 unexpected, 2 config, 3 index/shape, 4 numeric,
// 5 validation, 6 parse, 7 io.

#include "qlam/classical_nn.hpp"
#include "qlam/error.hpp"
#include "qlam/trainer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

int exit_code(qlam::ErrorKind kind) {
    switch (kind) {
    case qlam::ErrorKind::Config:
        return 2;
    case qlam::ErrorKind::Index:
    case qlam::ErrorKind::Shape:
        return 3;
    case qlam::ErrorKind::Numeric:
        return 4;
    case qlam::ErrorKind::Validation:
        return 5;
    case qlam::ErrorKind::Parse:
        return 6;
    case qlam::ErrorKind::Io:
        return 7;
    }
    return 1;
}

struct Overrides {
    std::string config;
    std::optional<std::string> dataset;
    std::optional<std::string> data_dir;
    std::optional<std::string> model;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> fold;
    std::optional<std::size_t> n_folds;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> qubits;
    std::optional<std::size_t> heads;
    std::optional<std::size_t> t_keep;
    std::optional<std::size_t> train_size;
    std::optional<std::size_t> test_size;
    std::optional<std::uint64_t> shots;
    std::optional<std::size_t> workers;
    std::optional<std::string> out_dir;
    bool verbose = false;

    void attach(CLI::App *cmd) {
        cmd->add_option("--config", config, "JSON run configuration");
        cmd->add_option("--dataset", dataset,
                        "smnist, sfashion, scifar10, smnist8, smnist16");
        cmd->add_option("--data-dir", data_dir, "dataset root directory");
        cmd->add_option("--model", model, "qlam or elman");
        cmd->add_option("--seed", seed);
        cmd->add_option("--fold", fold);
        cmd->add_option("--folds", n_folds, "number of folds");
        cmd->add_option("--epochs", epochs);
        cmd->add_option("--qubits", qubits);
        cmd->add_option("--heads", heads);
        cmd->add_option("--t-keep", t_keep, "readout steps fed to the classifier");
        cmd->add_option("--train-size", train_size, "0 uses the whole split");
        cmd->add_option("--test-size", test_size, "0 uses the whole split");
        cmd->add_option("--shots", shots,
                        "shots per Pauli term at evaluation; omit for exact");
        cmd->add_option("--workers", workers, "threads for per-sample work");
        cmd->add_option("--out-dir", out_dir);
        cmd->add_flag("-v,--verbose", verbose, "per-epoch progress on stderr");
    }

    [[nodiscard]] qlam::TrainConfig resolve() const {
        qlam::TrainConfig cfg =
            config.empty() ? qlam::TrainConfig{} : qlam::load_train_config(config);
        if (dataset) {
            cfg.dataset = qlam::parse_dataset_kind(*dataset);
            if (!epochs) {
                cfg.epochs = qlam::default_epochs(cfg.dataset);
            }
        }
        if (data_dir) {
            cfg.data_dir = *data_dir;
        }
        if (model) {
            QLAM_REQUIRE(*model == "qlam" || *model == "elman",
                         qlam::ErrorKind::Config, "model must be 'qlam' or 'elman'");
            cfg.model = *model == "qlam" ? qlam::ModelKind::Qlam
                                         : qlam::ModelKind::Elman;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (fold) {
            cfg.fold = *fold;
        }
        if (n_folds) {
            cfg.n_folds = *n_folds;
        }
        if (epochs) {
            cfg.epochs = *epochs;
        }
        if (qubits) {
            cfg.n_qubits = *qubits;
        }
        if (heads) {
            cfg.n_heads = *heads;
        }
        if (t_keep) {
            cfg.t_keep = *t_keep;
        }
        if (train_size) {
            cfg.train_size = *train_size;
        }
        if (test_size) {
            cfg.test_size = *test_size;
        }
        if (shots) {
            cfg.shots.mode = qlam::ShotMode::Sampled;
            cfg.shots.shots_per_term = *shots;
        }
        if (workers) {
            cfg.workers = *workers;
        }
        if (out_dir) {
            cfg.out_dir = *out_dir;
        }
        cfg.verbose = cfg.verbose || verbose;
        cfg.validate();
        return cfg;
    }
};

std::size_t param_count(const qlam::TrainConfig &cfg) {
    if (cfg.model == qlam::ModelKind::Qlam) {
        return qlam::count_params(qlam::QlamParams(cfg.model_config()));
    }
    return qlam::count_params(qlam::ElmanParams(cfg.elman_hidden, 10));
}

const char *model_name(const qlam::TrainConfig &cfg) {
    return cfg.model == qlam::ModelKind::Qlam ? "qlam" : "elman";
}

int run_train(const Overrides &o) {
    const auto cfg = o.resolve();
    std::printf("model %s, %zu parameters, dataset %s, seed %llu, fold %zu\n",
                model_name(cfg), param_count(cfg),
                std::string(qlam::to_string(cfg.dataset)).c_str(),
                static_cast<unsigned long long>(cfg.seed), cfg.fold);
    const auto r = qlam::train(cfg);
    std::printf("test accuracy %.4f (%zu/%zu), loss %.6f\n", r.final_test.accuracy,
                r.final_test.correct, r.final_test.total, r.final_test.loss);
    std::printf("metrics %s\ncheckpoint %s\n", r.metrics_path.string().c_str(),
                r.checkpoint_path.string().c_str());
    return 0;
}

int run_eval(const Overrides &o, const std::string &checkpoint) {
    const auto cfg = o.resolve();
    const auto r = qlam::evaluate(checkpoint, cfg);
    std::printf("test accuracy %.4f (%zu/%zu), loss %.6f\n", r.accuracy, r.correct,
                r.total, r.loss);
    return 0;
}

int run_folds(const Overrides &o) {
    auto cfg = o.resolve();
    std::printf("model %s, %zu parameters, %zu folds\n", model_name(cfg),
                param_count(cfg), cfg.n_folds);
    const auto s = qlam::run_folds(cfg);
    for (std::size_t k = 0; k < s.accuracies.size(); ++k) {
        std::printf("fold %zu accuracy %.4f\n", k, s.accuracies[k]);
    }
    std::printf("mean %.4f std %.4f\nsummary %s\n", s.mean, s.std,
                s.summary_path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"QLAM sequence classifier: train, eval, folds"};
    app.require_subcommand(1);

    Overrides train_opts;
    auto *train_cmd = app.add_subcommand("train", "train one seed/fold");
    train_opts.attach(train_cmd);

    Overrides eval_opts;
    std::string checkpoint;
    auto *eval_cmd = app.add_subcommand("eval", "score a checkpoint on the test split");
    eval_opts.attach(eval_cmd);
    eval_cmd->add_option("--checkpoint", checkpoint)->required();

    Overrides fold_opts;
    auto *folds_cmd = app.add_subcommand("folds", "train and score every fold");
    fold_opts.attach(folds_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) {
            return run_train(train_opts);
        }
        if (eval_cmd->parsed()) {
            return run_eval(eval_opts, checkpoint);
        }
        return run_folds(fold_opts);
    } catch (const qlam::Error &e) {
        std::fprintf(stderr, "error (%s): %s\n",
                     std::string(qlam::to_string(e.kind())).c_str(), e.what());
        return exit_code(e.kind());
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
