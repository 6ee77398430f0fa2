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
 * Training, evaluation, and fold orchestration.
 *
 * A run is fully determined by its TrainConfig: parameter init, batch
 * order, and shot noise all derive from `seed` (and `fold`), and batch
 * gradients are reduced in sample order, so `workers` only changes wall
 * time.
 */
#pragma once

#include "qlam/classical_nn.hpp"
#include "qlam/data.hpp"
#include "qlam/observables.hpp"
#include "qlam/qlam_cell.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qlam {

enum class ModelKind { Qlam, Elman };
enum class SplitMode { Holdout, KFold };

struct TrainConfig {
    DatasetKind dataset = DatasetKind::SMnist8;
    std::string data_dir; ///< empty: $QLAM_DATA_DIR, else "data"
    ModelKind model = ModelKind::Qlam;

    std::size_t n_qubits = 4;
    std::size_t n_layers = 2;
    Entangler entangler = Entangler::Ring;
    std::size_t n_heads = 8;
    std::size_t d_q = 8;
    std::size_t decoder_hidden = 16;
    std::size_t t_keep = 1;
    std::size_t elman_hidden = 48;

    std::size_t epochs = 30;
    std::size_t batch_size = 128;
    double base_lr = 1e-3;
    double clip_norm = 1.0;
    std::uint64_t seed = 0;
    std::size_t fold = 0;
    std::size_t n_folds = 10;
    SplitMode split_mode = SplitMode::Holdout;
    std::size_t train_size = 0; ///< 0: whole split
    std::size_t test_size = 0;  ///< 0: whole split

    ShotConfig shots{};
    bool clamp_tokens = false;
    std::size_t workers = 1;
    std::string out_dir = "runs";
    /// Write measured seconds into the metrics file. Off by default so
    /// that metrics files are bitwise reproducible.
    bool wall_clock = false;
    bool verbose = false;

    void validate() const;
    [[nodiscard]] QlamConfig model_config() const;
    [[nodiscard]] std::filesystem::path metrics_path() const;
    [[nodiscard]] std::filesystem::path checkpoint_path() const;
};

/// 30 for the MNIST family, 50 for sCIFAR-10.
std::size_t default_epochs(DatasetKind kind);

/// Reads a JSON object whose keys mirror TrainConfig field names; unknown
/// keys are rejected.
TrainConfig load_train_config(const std::filesystem::path &path);
void apply_config_json(TrainConfig &cfg, const std::string &json_text);

struct MetricsRow {
    std::size_t epoch = 0;
    std::string split; ///< "train" or "test"
    double loss = 0.0;
    double accuracy = 0.0;
    double lr = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::size_t fold = 0;

    friend bool operator==(const MetricsRow &, const MetricsRow &) = default;
};

inline constexpr const char *kMetricsHeader =
    "epoch,split,loss,accuracy,lr,wall_seconds,seed,fold";

std::string format_metrics_row(const MetricsRow &row);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path &path);

struct RunData {
    std::vector<SequenceSample> train;
    std::vector<SequenceSample> test;
};

/// Loads the configured dataset and selects this fold's train/test subsets.
RunData prepare_data(const TrainConfig &cfg);
/// Same selection applied to in-memory pools.
RunData select_fold(const TrainConfig &cfg, std::vector<SequenceSample> train_pool,
                    std::vector<SequenceSample> test_pool);

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t total = 0;
};

struct TrainResult {
    std::vector<MetricsRow> rows;
    EvalResult final_test;
    std::size_t n_params = 0;
    std::filesystem::path metrics_path;
    std::filesystem::path checkpoint_path;
};

TrainResult train(const TrainConfig &cfg);
TrainResult train(const TrainConfig &cfg, const RunData &data);

/// Freshly initialized parameters for cfg.seed (what train starts from).
QlamParams initial_qlam_params(const TrainConfig &cfg);
ElmanParams initial_elman_params(const TrainConfig &cfg);

EvalResult evaluate_qlam(const QlamParams &params, const TrainConfig &cfg,
                         const std::vector<SequenceSample> &samples);
EvalResult evaluate_elman(const ElmanParams &params, const TrainConfig &cfg,
                          const std::vector<SequenceSample> &samples);

/// Loads the checkpoint and scores this fold's test split.
EvalResult evaluate(const std::filesystem::path &checkpoint,
                    const TrainConfig &cfg);
EvalResult evaluate(const std::filesystem::path &checkpoint,
                    const TrainConfig &cfg, const RunData &data);

struct FoldSummary {
    std::vector<double> accuracies;
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation (n - 1)
    std::filesystem::path summary_path;
};

/// Trains and evaluates every fold 0..n_folds-1 and writes
/// folds_seed<seed>.csv (fold,accuracy rows then mean and std rows).
FoldSummary run_folds(const TrainConfig &cfg);
FoldSummary run_folds(const TrainConfig &cfg, const std::vector<SequenceSample> &train_pool,
                      const std::vector<SequenceSample> &test_pool);

} // namespace qlam
