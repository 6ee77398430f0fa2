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
#include "qlam/data.hpp"

#include "qlam/error.hpp"
#include "qlam/rng.hpp"

#include <zlib.h>

#include <cstdlib>
#include <fstream>
#include <numeric>

namespace qlam {

namespace fs = std::filesystem;

Image ImageSet::image(std::size_t i) const {
    QLAM_REQUIRE(i < count, ErrorKind::Index, "image index out of range");
    Image img{rows, cols, channels, {}};
    const std::size_t n = image_bytes();
    img.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        img.values[k] = pixels[i * n + k];
    }
    return img;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path &path) {
    // gzread passes non-gzip content through unchanged
    gzFile f = gzopen(path.c_str(), "rb");
    QLAM_REQUIRE(f != nullptr, ErrorKind::Io,
                 "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(1 << 16);
    for (;;) {
        const int got = gzread(f, buf.data(), static_cast<unsigned>(buf.size()));
        if (got < 0) {
            gzclose(f);
            throw Error(ErrorKind::Io, "read error in '" + path.string() + "'");
        }
        if (got == 0) {
            break;
        }
        out.insert(out.end(), buf.begin(), buf.begin() + got);
    }
    gzclose(f);
    return out;
}

void write_file_bytes(const fs::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    QLAM_REQUIRE(f.good(), ErrorKind::Io,
                 "cannot open '" + path.string() + "' for writing");
    f.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    QLAM_REQUIRE(f.good(), ErrorKind::Io, "write failed for '" + path.string() + "'");
}

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
           (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void write_be32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

} // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes,
                    std::uint32_t expected_magic) {
    if (bytes.size() < 4) {
        throw ParseError(bytes.size(), "IDX file shorter than its magic number");
    }
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != expected_magic) {
        throw ParseError(0, "bad IDX magic " + hex32(magic) + ", expected " +
                                hex32(expected_magic));
    }
    IdxTensor t;
    const std::size_t ndims = expected_magic & 0xffU;
    std::size_t off = 4;
    std::uint64_t payload = 1;
    for (std::size_t d = 0; d < ndims; ++d, off += 4) {
        if (bytes.size() < off + 4) {
            throw ParseError(off, "IDX header truncated in dimension " +
                                      std::to_string(d));
        }
        t.dims.push_back(read_be32(bytes, off));
        payload *= t.dims.back();
    }
    const std::size_t have = bytes.size() - off;
    if (have < payload) {
        throw ParseError(bytes.size(), "IDX payload truncated: expected " +
                                           std::to_string(payload) +
                                           " bytes, found " + std::to_string(have));
    }
    if (have > payload) {
        throw ParseError(off + payload, "IDX file has trailing bytes");
    }
    t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off), bytes.end());
    return t;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor &t) {
    std::vector<std::uint8_t> out;
    const std::uint32_t magic =
        0x00000800U | static_cast<std::uint32_t>(t.dims.size());
    write_be32(out, magic);
    for (const auto d : t.dims) {
        write_be32(out, d);
    }
    out.insert(out.end(), t.data.begin(), t.data.end());
    return out;
}

ImageSet parse_idx_pair(std::span<const std::uint8_t> image_bytes,
                        std::span<const std::uint8_t> label_bytes) {
    IdxTensor img = parse_idx(image_bytes, kIdxImageMagic);
    IdxTensor lbl = parse_idx(label_bytes, kIdxLabelMagic);
    if (img.dims[0] != lbl.dims[0]) {
        // offset of the item count in the label file
        throw ParseError(4, "label count " + std::to_string(lbl.dims[0]) +
                                " does not match image count " +
                                std::to_string(img.dims[0]));
    }
    ImageSet set;
    set.count = img.dims[0];
    set.rows = img.dims[1];
    set.cols = img.dims[2];
    set.channels = 1;
    set.pixels = std::move(img.data);
    set.labels = std::move(lbl.data);
    return set;
}

ImageSet load_idx(const fs::path &images, const fs::path &labels) {
    return parse_idx_pair(read_file_bytes(images), read_file_bytes(labels));
}

ImageSet parse_cifar10(std::span<const std::uint8_t> bytes) {
    if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
        const std::size_t whole = bytes.size() / kCifarRecordBytes;
        throw ParseError(whole * kCifarRecordBytes,
                         "CIFAR-10 file size " + std::to_string(bytes.size()) +
                             " is not a positive multiple of 3073");
    }
    ImageSet set;
    set.count = bytes.size() / kCifarRecordBytes;
    set.rows = 32;
    set.cols = 32;
    set.channels = 3;
    set.pixels.resize(set.count * 3072);
    set.labels.resize(set.count);
    for (std::size_t r = 0; r < set.count; ++r) {
        const std::size_t off = r * kCifarRecordBytes;
        if (bytes[off] > 9) {
            throw ParseError(off, "CIFAR-10 label byte " +
                                      std::to_string(bytes[off]) + " > 9");
        }
        set.labels[r] = bytes[off];
        const auto planes = bytes.subspan(off + 1, 3072);
        std::uint8_t *dst = set.pixels.data() + r * 3072;
        for (std::size_t ch = 0; ch < 3; ++ch) {
            for (std::size_t px = 0; px < 1024; ++px) {
                dst[px * 3 + ch] = planes[ch * 1024 + px];
            }
        }
    }
    return set;
}

std::vector<std::uint8_t> serialize_cifar10(const ImageSet &set) {
    QLAM_REQUIRE(set.rows == 32 && set.cols == 32 && set.channels == 3,
                 ErrorKind::Shape, "CIFAR-10 records are 32x32x3");
    std::vector<std::uint8_t> out;
    out.reserve(set.count * kCifarRecordBytes);
    for (std::size_t r = 0; r < set.count; ++r) {
        out.push_back(set.labels[r]);
        const std::uint8_t *src = set.pixels.data() + r * 3072;
        for (std::size_t ch = 0; ch < 3; ++ch) {
            for (std::size_t px = 0; px < 1024; ++px) {
                out.push_back(src[px * 3 + ch]);
            }
        }
    }
    return out;
}

ImageSet load_cifar10_bin(const fs::path &path) {
    return parse_cifar10(read_file_bytes(path));
}

std::vector<double> to_sequence(const Image &image, SequenceLayout layout) {
    std::vector<double> tokens;
    tokens.reserve(image.values.size());
    if (layout == SequenceLayout::GrayscaleRaster) {
        QLAM_REQUIRE(image.channels == 1, ErrorKind::Shape,
                     "grayscale raster layout needs a single channel");
        for (const double v : image.values) {
            tokens.push_back(v / 255.0);
        }
    } else {
        for (std::size_t ch = 0; ch < image.channels; ++ch) {
            for (std::size_t r = 0; r < image.rows; ++r) {
                for (std::size_t c = 0; c < image.cols; ++c) {
                    tokens.push_back(image.at(r, c, ch) / 255.0);
                }
            }
        }
    }
    return tokens;
}

Image downsample(const Image &image, std::size_t factor) {
    QLAM_REQUIRE(factor >= 1, ErrorKind::Config, "pooling factor must be >= 1");
    QLAM_REQUIRE(image.rows % factor == 0 && image.cols % factor == 0,
                 ErrorKind::Shape, "image sides must be divisible by the factor");
    Image out{image.rows / factor, image.cols / factor, image.channels, {}};
    out.values.assign(out.rows * out.cols * out.channels, 0.0);
    const double area = static_cast<double>(factor * factor);
    for (std::size_t r = 0; r < out.rows; ++r) {
        for (std::size_t c = 0; c < out.cols; ++c) {
            for (std::size_t ch = 0; ch < image.channels; ++ch) {
                double acc = 0.0;
                for (std::size_t dr = 0; dr < factor; ++dr) {
                    for (std::size_t dc = 0; dc < factor; ++dc) {
                        acc += image.at(r * factor + dr, c * factor + dc, ch);
                    }
                }
                out.at(r, c, ch) = acc / area;
            }
        }
    }
    return out;
}

Image crop_center(const Image &image, std::size_t side) {
    QLAM_REQUIRE(side <= image.rows && side <= image.cols, ErrorKind::Shape,
                 "crop larger than image");
    const std::size_t r0 = (image.rows - side) / 2;
    const std::size_t c0 = (image.cols - side) / 2;
    Image out{side, side, image.channels, {}};
    out.values.resize(side * side * image.channels);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            for (std::size_t ch = 0; ch < image.channels; ++ch) {
                out.at(r, c, ch) = image.at(r0 + r, c0 + c, ch);
            }
        }
    }
    return out;
}

Image pad_center(const Image &image, std::size_t side) {
    QLAM_REQUIRE(side >= image.rows && side >= image.cols, ErrorKind::Shape,
                 "padded side smaller than image");
    const std::size_t r0 = (side - image.rows) / 2;
    const std::size_t c0 = (side - image.cols) / 2;
    Image out{side, side, image.channels, {}};
    out.values.assign(side * side * image.channels, 0.0);
    for (std::size_t r = 0; r < image.rows; ++r) {
        for (std::size_t c = 0; c < image.cols; ++c) {
            for (std::size_t ch = 0; ch < image.channels; ++ch) {
                out.at(r0 + r, c0 + c, ch) = image.at(r, c, ch);
            }
        }
    }
    return out;
}

Image resize_to(const Image &image, std::size_t side) {
    QLAM_REQUIRE(side >= 1 && image.rows == image.cols, ErrorKind::Shape,
                 "resize_to expects a square image and a positive side");
    const std::size_t n = image.rows;
    if (n % side == 0) {
        return downsample(image, n / side);
    }
    const std::size_t floor_factor = n / side;
    if (floor_factor >= 2) {
        return downsample(crop_center(image, floor_factor * side), floor_factor);
    }
    const std::size_t ceil_factor = (n + side - 1) / side;
    return downsample(pad_center(image, ceil_factor * side), ceil_factor);
}

FoldPlan make_folds(std::size_t n_samples, std::uint64_t seed,
                    std::size_t n_folds) {
    QLAM_REQUIRE(n_folds >= 2, ErrorKind::Config, "need at least two folds");
    QLAM_REQUIRE(n_samples >= n_folds, ErrorKind::Config,
                 "fewer samples than folds");
    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_key(seed, {0x666f6c64ULL}));
    rng.shuffle(std::span<std::size_t>(order));

    FoldPlan plan{n_folds, seed, {}};
    plan.folds.resize(n_folds);
    for (std::size_t k = 0; k < n_folds; ++k) {
        const std::size_t lo = k * n_samples / n_folds;
        const std::size_t hi = (k + 1) * n_samples / n_folds;
        for (std::size_t i = 0; i < n_samples; ++i) {
            (i >= lo && i < hi ? plan.folds[k].test : plan.folds[k].train)
                .push_back(order[i]);
        }
    }
    return plan;
}

HoldoutRun make_holdout_run(std::size_t n_train_pool, std::size_t n_test_pool,
                            std::size_t n_train, std::size_t n_test,
                            std::uint64_t seed, std::size_t run) {
    QLAM_REQUIRE(n_train <= n_train_pool && n_test <= n_test_pool,
                 ErrorKind::Config, "subsample larger than available split");
    auto draw = [&](std::size_t pool, std::size_t k, std::uint64_t tag) {
        std::vector<std::size_t> idx(pool);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        CounterRng rng(derive_key(seed, {tag, run}));
        rng.shuffle(std::span<std::size_t>(idx));
        idx.resize(k);
        return idx;
    };
    return {draw(n_train_pool, n_train, 0x747261696eULL),
            draw(n_test_pool, n_test, 0x74657374ULL)};
}

DatasetKind parse_dataset_kind(std::string_view name) {
    if (name == "smnist") {
        return DatasetKind::SMnist;
    }
    if (name == "sfashion") {
        return DatasetKind::SFashion;
    }
    if (name == "scifar10") {
        return DatasetKind::SCifar10;
    }
    if (name == "smnist8") {
        return DatasetKind::SMnist8;
    }
    if (name == "smnist16") {
        return DatasetKind::SMnist16;
    }
    throw Error(ErrorKind::Config, "unknown dataset '" + std::string(name) + "'");
}

std::string_view to_string(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::SMnist:
        return "smnist";
    case DatasetKind::SFashion:
        return "sfashion";
    case DatasetKind::SCifar10:
        return "scifar10";
    case DatasetKind::SMnist8:
        return "smnist8";
    case DatasetKind::SMnist16:
        return "smnist16";
    }
    return "unknown";
}

std::size_t sequence_length(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::SMnist:
    case DatasetKind::SFashion:
        return 784;
    case DatasetKind::SCifar10:
        return 3072;
    case DatasetKind::SMnist8:
        return 64;
    case DatasetKind::SMnist16:
        return 256;
    }
    return 0;
}

namespace {

fs::path find_idx(const fs::path &dir, const std::string &stem) {
    for (const auto *suffix : {"", ".gz"}) {
        const fs::path p = dir / (stem + suffix);
        if (fs::exists(p)) {
            return p;
        }
    }
    throw Error(ErrorKind::Io, "missing dataset file '" + (dir / stem).string() +
                                   "[.gz]'");
}

} // namespace

std::vector<SequenceSample> load_dataset(DatasetKind kind, const fs::path &root,
                                         Split split) {
    ImageSet set;
    SequenceLayout layout = SequenceLayout::GrayscaleRaster;
    if (kind == DatasetKind::SCifar10) {
        layout = SequenceLayout::RgbChannelConcat;
        const fs::path dir = root / "cifar-10-batches-bin";
        std::vector<fs::path> files;
        if (split == Split::Train) {
            for (int b = 1; b <= 5; ++b) {
                files.push_back(dir / ("data_batch_" + std::to_string(b) + ".bin"));
            }
        } else {
            files.push_back(dir / "test_batch.bin");
        }
        for (const auto &f : files) {
            ImageSet part = load_cifar10_bin(f);
            set.rows = part.rows;
            set.cols = part.cols;
            set.channels = part.channels;
            set.count += part.count;
            set.pixels.insert(set.pixels.end(), part.pixels.begin(), part.pixels.end());
            set.labels.insert(set.labels.end(), part.labels.begin(), part.labels.end());
        }
    } else {
        const fs::path dir =
            root / (kind == DatasetKind::SFashion ? "fashion-mnist" : "mnist");
        const std::string prefix = split == Split::Train ? "train" : "t10k";
        set = load_idx(find_idx(dir, prefix + "-images-idx3-ubyte"),
                       find_idx(dir, prefix + "-labels-idx1-ubyte"));
    }

    std::vector<SequenceSample> out;
    out.reserve(set.count);
    for (std::size_t i = 0; i < set.count; ++i) {
        Image img = set.image(i);
        if (kind == DatasetKind::SMnist8) {
            img = resize_to(img, 8);
        } else if (kind == DatasetKind::SMnist16) {
            img = resize_to(img, 16);
        }
        QLAM_REQUIRE(set.labels[i] <= 9, ErrorKind::Parse,
                     "label out of range at item " + std::to_string(i));
        out.push_back({to_sequence(img, layout), set.labels[i]});
    }
    return out;
}

fs::path resolve_data_root(const fs::path &fallback) {
    if (const char *env = std::getenv("QLAM_DATA_DIR"); env && *env) {
        return env;
    }
    return fallback;
}

} // namespace qlam
