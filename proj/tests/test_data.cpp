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
#include "fixtures.hpp"
#include "oracles.hpp"

#include "qlam/data.hpp"
#include "qlam/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace qlam;

namespace {

/// Offset carried by the ParseError fn throws, or SIZE_MAX.
std::size_t parse_offset(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const ParseError &e) {
        return e.offset();
    }
    return SIZE_MAX;
}

Image gray(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return Image{rows, cols, 1, std::move(v)};
}

} // namespace

TEST_CASE("IDX fixture parses to exact pixels and re-serializes byte-identically") {
    const auto img = fixture::idx_images_2x2x3();
    const auto lbl = fixture::idx_labels({3, 9});
    const auto set = parse_idx_pair(img, lbl);
    CHECK(set.count == 2);
    CHECK(set.rows == 2);
    CHECK(set.cols == 3);
    CHECK(set.labels == std::vector<std::uint8_t>{3, 9});
    CHECK(set.pixels[0] == 1);
    CHECK(set.pixels[5] == 13);
    CHECK(set.pixels[6] == 41);
    CHECK(set.image(1).at(1, 2) == 53.0);

    const auto t = parse_idx(img, kIdxImageMagic);
    CHECK(t.dims == std::vector<std::uint32_t>{2, 2, 3});
    CHECK(serialize_idx(t) == img);
    CHECK(serialize_idx(parse_idx(lbl, kIdxLabelMagic)) == lbl);
}

TEST_CASE("malformed IDX fixtures fail at documented offsets") {
    const auto img = fixture::idx_images_2x2x3();
    auto bad_magic = img;
    bad_magic[3] = 0x01;
    CHECK(parse_offset([&] { (void)parse_idx(bad_magic, kIdxImageMagic); }) == 0);

    const std::vector<std::uint8_t> tiny(img.begin(), img.begin() + 3);
    CHECK(parse_offset([&] { (void)parse_idx(tiny, kIdxImageMagic); }) == 3);

    // header cut inside the third dimension word (bytes 12..15)
    const std::vector<std::uint8_t> short_hdr(img.begin(), img.begin() + 13);
    CHECK(parse_offset([&] { (void)parse_idx(short_hdr, kIdxImageMagic); }) == 12);

    auto truncated = img;
    truncated.resize(img.size() - 4);
    CHECK(parse_offset([&] { (void)parse_idx(truncated, kIdxImageMagic); }) ==
          truncated.size());

    auto trailing = img;
    trailing.push_back(0);
    CHECK(parse_offset([&] { (void)parse_idx(trailing, kIdxImageMagic); }) == img.size());

    const auto three = fixture::idx_labels({1, 2, 3});
    CHECK(parse_offset([&] { (void)parse_idx_pair(img, three); }) == 4);
}

TEST_CASE("CIFAR-10 fixture round trip and plane decoding") {
    const auto rec = fixture::cifar_one_record();
    const auto set = parse_cifar10(rec);
    CHECK(set.count == 1);
    CHECK(set.channels == 3);
    CHECK(set.labels[0] == 7);
    const auto im = set.image(0);
    CHECK(im.at(0, 5, 0) == 5.0);
    CHECK(im.at(0, 5, 1) == 250.0);
    CHECK(im.at(0, 5, 2) == double(5 ^ 0x5a));
    CHECK(im.at(31, 31, 0) == double(1023 & 0xff));
    CHECK(serialize_cifar10(set) == rec);

    auto two = rec;
    two.insert(two.end(), rec.begin(), rec.end());
    CHECK(parse_cifar10(two).count == 2);
}

TEST_CASE("malformed CIFAR-10 fixtures fail at documented offsets") {
    auto rec = fixture::cifar_one_record();
    auto partial = rec;
    partial.insert(partial.end(), rec.begin(), rec.begin() + 100);
    CHECK(parse_offset([&] { (void)parse_cifar10(partial); }) == 3073);

    const std::vector<std::uint8_t> empty;
    CHECK(parse_offset([&] { (void)parse_cifar10(empty); }) == 0);

    auto bad_label = rec;
    bad_label.insert(bad_label.end(), rec.begin(), rec.end());
    bad_label[3073] = 10;
    CHECK(parse_offset([&] { (void)parse_cifar10(bad_label); }) == 3073);
}

TEST_CASE("file round trip through gzip-transparent reader") {
    const auto dir = oracle::temp_dir("data_io");
    const auto img = fixture::idx_images_2x2x3();
    write_file_bytes(dir / "images", img);
    write_file_bytes(dir / "labels", fixture::idx_labels({0, 1}));
    CHECK(read_file_bytes(dir / "images") == img);
    CHECK(load_idx(dir / "images", dir / "labels").count == 2);
    try {
        (void)read_file_bytes(dir / "missing");
        CHECK(false);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("to_sequence examples") {
    const auto seq = to_sequence(gray(2, 2, {0, 255, 128, 64}), SequenceLayout::GrayscaleRaster);
    CHECK(seq == std::vector<double>{0.0, 1.0, 128.0 / 255, 64.0 / 255});
    CHECK(to_sequence(gray(3, 3, std::vector<double>(9, 0.0)),
                      SequenceLayout::GrayscaleRaster) == std::vector<double>(9, 0.0));

    // 2x2x3 interleaved; value = 100*ch + 10*r + c
    Image rgb{2, 2, 3, std::vector<double>(12)};
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t ch = 0; ch < 3; ++ch)
                rgb.at(r, c, ch) = 100.0 * ch + 10.0 * r + c;
    const auto s = to_sequence(rgb, SequenceLayout::RgbChannelConcat);
    const std::vector<double> want{0, 1, 10, 11, 100, 101, 110, 111, 200, 201, 210, 211};
    REQUIRE(s.size() == 12);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(s[i] == want[i] / 255.0);
}

TEST_CASE("downsample examples") {
    const auto c = downsample(gray(4, 4, std::vector<double>(16, 77.0)), 2);
    CHECK(c.values == std::vector<double>(4, 77.0));

    // 2x2-block checkerboard of 0 and 1 sampled at factor 4 averages to 0.5
    Image cb = gray(4, 4, std::vector<double>(16));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t col = 0; col < 4; ++col)
            cb.at(r, col) = ((r / 2 + col / 2) % 2) ? 1.0 : 0.0;
    CHECK(downsample(cb, 4).values == std::vector<double>{0.5});

    Image px = gray(4, 4, std::vector<double>(16));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t col = 0; col < 4; ++col)
            px.at(r, col) = (r + col) % 2;
    CHECK(downsample(px, 2).values == std::vector<double>(4, 0.5));

    // block sums 1+2+5+6=14, 3+4+7+8=22, 9+10+13+14=46, 11+12+15+16=54
    std::vector<double> v(16);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(downsample(gray(4, 4, v), 2).values == std::vector<double>{3.5, 5.5, 11.5, 13.5});

    CHECK_THROWS_AS((void)downsample(gray(5, 5, std::vector<double>(25)), 2), Error);
}

TEST_CASE("resize plans") {
    std::vector<double> v(28 * 28);
    std::iota(v.begin(), v.end(), 0.0);
    const auto im = gray(28, 28, v);
    const auto r8 = resize_to(im, 8);
    CHECK(r8.rows == 8);
    // crop 24 (offset 2), pool 3: first block rows 2..4, cols 2..4
    double s = 0;
    for (std::size_t r = 2; r < 5; ++r)
        for (std::size_t c = 2; c < 5; ++c)
            s += im.at(r, c);
    CHECK(r8.at(0, 0) == s / 9);

    const auto r16 = resize_to(im, 16);
    CHECK(r16.rows == 16);
    // pad to 32 (2 zero rows/cols each side), pool 2: block (0,0) holds one pixel
    CHECK(r16.at(0, 0) == 0.0);
    CHECK(r16.at(1, 1) == (im.at(0, 0) + im.at(0, 1) + im.at(1, 0) + im.at(1, 1)) / 4);
}

TEST_CASE("fold plans") {
    const auto plan = make_folds(100, 5);
    REQUIRE(plan.folds.size() == 10);
    std::set<std::size_t> seen;
    for (const auto &f : plan.folds) {
        CHECK(f.test.size() == 10);
        CHECK(f.train.size() == 90);
        for (auto i : f.test)
            CHECK(seen.insert(i).second);
        std::set<std::size_t> tr(f.train.begin(), f.train.end());
        for (auto i : f.test)
            CHECK(tr.count(i) == 0);
    }
    CHECK(seen.size() == 100);
    CHECK(make_folds(100, 5).folds[3].test == plan.folds[3].test);
    CHECK(make_folds(100, 6).folds[3].test != plan.folds[3].test);

    const auto uneven = make_folds(23, 1, 4);
    std::size_t total = 0;
    for (const auto &f : uneven.folds) {
        CHECK(f.test.size() + f.train.size() == 23);
        total += f.test.size();
    }
    CHECK(total == 23);
}

TEST_CASE("holdout runs are seeded subsamples") {
    const auto a = make_holdout_run(100, 50, 20, 10, 3, 0);
    CHECK(a.train.size() == 20);
    CHECK(a.test.size() == 10);
    CHECK(std::set<std::size_t>(a.train.begin(), a.train.end()).size() == 20);
    CHECK(make_holdout_run(100, 50, 20, 10, 3, 0).train == a.train);
    CHECK(make_holdout_run(100, 50, 20, 10, 3, 1).train != a.train);
    CHECK_THROWS_AS((void)make_holdout_run(10, 10, 11, 1, 0, 0), Error);
}

TEST_CASE("dataset kinds") {
    CHECK(parse_dataset_kind("smnist8") == DatasetKind::SMnist8);
    CHECK(sequence_length(DatasetKind::SMnist) == 784);
    CHECK(sequence_length(DatasetKind::SCifar10) == 3072);
    CHECK(sequence_length(DatasetKind::SMnist8) == 64);
    CHECK(sequence_length(DatasetKind::SMnist16) == 256);
    CHECK(to_string(DatasetKind::SFashion) == "sfashion");
    CHECK_THROWS_AS((void)parse_dataset_kind("imagenet"), Error);
}

TEST_CASE("bundled MNIST subset: shapes, labels, token range") {
    const auto root = std::filesystem::path(QLAM_SOURCE_DIR) / "data";
    const auto train = load_dataset(DatasetKind::SMnist8, root, Split::Train);
    const auto test = load_dataset(DatasetKind::SMnist, root, Split::Test);
    CHECK(train.size() == 8000);
    CHECK(test.size() == 2000);
    bool in_range = true;
    std::set<std::size_t> labels;
    for (const auto &s : train) {
        CHECK(s.tokens.size() == 64);
        labels.insert(s.label);
        for (double x : s.tokens)
            in_range = in_range && x >= 0.0 && x <= 1.0;
    }
    for (const auto &s : test) {
        CHECK(s.tokens.size() == 784);
        for (double x : s.tokens)
            in_range = in_range && x >= 0.0 && x <= 1.0;
    }
    CHECK(in_range);
    CHECK(labels.size() == 10);

    try {
        (void)load_dataset(DatasetKind::SCifar10, root, Split::Train);
        CHECK(false);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}
