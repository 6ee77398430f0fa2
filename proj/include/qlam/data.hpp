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
 * Dataset ingestion and image -> token sequence conversion.
 *
 * IDX (MNIST / Fashion-MNIST): 4-byte big-endian magic (0x00000803 images,
 * 0x00000801 labels), one 4-byte big-endian size per dimension, then raw
 * unsigned bytes. Gzip-compressed files are detected by their 0x1f 0x8b
 * prefix and inflated transparently.
 *
 * CIFAR-10 binary: records of 1 label byte + 3072 pixel bytes stored as
 * the 1024-byte R plane, then G, then B, each row-major over 32x32.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlam {

struct SequenceSample {
    std::vector<double> tokens; ///< values in [0, 1]
    std::size_t label = 0;
};

/// Images stored as interleaved (row, col, channel) intensities on the
/// 0..255 scale; doubles so pooled images stay exact.
struct Image {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t channels = 1;
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t r, std::size_t c,
                            std::size_t ch = 0) const {
        return values[(r * cols + c) * channels + ch];
    }
    double &at(std::size_t r, std::size_t c, std::size_t ch = 0) {
        return values[(r * cols + c) * channels + ch];
    }
};

/// Raw decoded dataset: `count` images sharing one geometry.
struct ImageSet {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> pixels; ///< count x rows x cols x channels
    std::vector<std::uint8_t> labels;

    [[nodiscard]] std::size_t image_bytes() const noexcept {
        return rows * cols * channels;
    }
    [[nodiscard]] Image image(std::size_t i) const;
};

/// Reads a whole file, inflating gzip content. Throws Io.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path);
void write_file_bytes(const std::filesystem::path &path,
                      std::span<const std::uint8_t> bytes);

/// Decoded IDX tensor of unsigned bytes.
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Throws ParseError carrying the offending byte offset: bad magic at 0,
/// missing dimension words at their offset, short payload at end of data.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes,
                    std::uint32_t expected_magic);
std::vector<std::uint8_t> serialize_idx(const IdxTensor &t);

/// Parses an image file + label file pair; counts must agree.
ImageSet parse_idx_pair(std::span<const std::uint8_t> image_bytes,
                        std::span<const std::uint8_t> label_bytes);
ImageSet load_idx(const std::filesystem::path &images,
                  const std::filesystem::path &labels);

inline constexpr std::size_t kCifarRecordBytes = 3073;

/// Throws ParseError at the trailing partial record when the size is not a
/// multiple of 3073, or at a label byte > 9.
ImageSet parse_cifar10(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_cifar10(const ImageSet &set);
ImageSet load_cifar10_bin(const std::filesystem::path &path);

enum class SequenceLayout {
    GrayscaleRaster, ///< row-major pixels
    RgbChannelConcat ///< full R plane, then G, then B
};

/// Flattens to tokens in [0, 1] (value / 255).
std::vector<double> to_sequence(const Image &image, SequenceLayout layout);

/// Non-overlapping factor x factor average pooling; sides must divide.
Image downsample(const Image &image, std::size_t factor);
Image crop_center(const Image &image, std::size_t side);
Image pad_center(const Image &image, std::size_t side);
/// Square resize by cropping (when the side holds at least two blocks) or
/// zero-padding to a multiple of `side`, then average pooling.
/// 28 -> 8: crop 24, pool 3. 28 -> 16: pad 32, pool 2.
Image resize_to(const Image &image, std::size_t side);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct FoldPlan {
    std::size_t n_folds = 10;
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
};

/// Seeded shuffle, then contiguous near-equal slices; fold k tests on
/// slice k and trains on the rest.
FoldPlan make_folds(std::size_t n_samples, std::uint64_t seed,
                    std::size_t n_folds = 10);

/// Dataset shipped with a fixed train/test split: each run draws its own
/// seeded subsample of each split.
struct HoldoutRun {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
HoldoutRun make_holdout_run(std::size_t n_train_pool, std::size_t n_test_pool,
                            std::size_t n_train, std::size_t n_test,
                            std::uint64_t seed, std::size_t run);

enum class DatasetKind { SMnist, SFashion, SCifar10, SMnist8, SMnist16 };

DatasetKind parse_dataset_kind(std::string_view name);
std::string_view to_string(DatasetKind kind);
/// Tokens per sample: 784, 784, 3072, 64, 256.
std::size_t sequence_length(DatasetKind kind);

enum class Split { Train, Test };

/// Directory layout under `root`: mnist/, fashion-mnist/ (IDX files named
/// {train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz]) and
/// cifar-10-batches-bin/ (data_batch_1..5.bin, test_batch.bin).
std::vector<SequenceSample> load_dataset(DatasetKind kind,
                                         const std::filesystem::path &root,
                                         Split split);

/// $QLAM_DATA_DIR if set, otherwise `fallback`.
std::filesystem::path resolve_data_root(const std::filesystem::path &fallback);

} // namespace qlam
