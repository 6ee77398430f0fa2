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

// Hand-assembled IDX and CIFAR-10 byte fixtures, written field by field
// independently of the library serializers.
#pragma once

#include <cstdint>
#include <vector>

namespace fixture {

inline void put_be32(std::vector<std::uint8_t> &b, std::uint32_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 24));
    b.push_back(static_cast<std::uint8_t>(v >> 16));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}

/// Two 2x3 images: pixel (i, r, c) = 40*i + 10*r + c + 1.
inline std::vector<std::uint8_t> idx_images_2x2x3() {
    std::vector<std::uint8_t> b;
    put_be32(b, 0x00000803);
    put_be32(b, 2);
    put_be32(b, 2);
    put_be32(b, 3);
    for (std::uint8_t i = 0; i < 2; ++i)
        for (std::uint8_t r = 0; r < 2; ++r)
            for (std::uint8_t c = 0; c < 3; ++c)
                b.push_back(static_cast<std::uint8_t>(40 * i + 10 * r + c + 1));
    return b;
}

inline std::vector<std::uint8_t> idx_labels(std::vector<std::uint8_t> labels) {
    std::vector<std::uint8_t> b;
    put_be32(b, 0x00000801);
    put_be32(b, static_cast<std::uint32_t>(labels.size()));
    b.insert(b.end(), labels.begin(), labels.end());
    return b;
}

/// One record: label 7, R plane = k, G plane = 255 - k, B plane = k ^ 0x5a
/// for pixel index k = 32*r + c (mod 256).
inline std::vector<std::uint8_t> cifar_one_record() {
    std::vector<std::uint8_t> b{7};
    for (int plane = 0; plane < 3; ++plane)
        for (int k = 0; k < 1024; ++k) {
            const auto v = static_cast<std::uint8_t>(k & 0xff);
            b.push_back(plane == 0   ? v
                        : plane == 1 ? static_cast<std::uint8_t>(255 - v)
                                     : static_cast<std::uint8_t>(v ^ 0x5a));
        }
    return b;
}

} // namespace fixture
