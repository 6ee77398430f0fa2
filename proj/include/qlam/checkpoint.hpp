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
 * Parameter checkpoint files (version 1). All integers little-endian.
 *
 *     offset  size  field
 *     0       8     magic "QLAMCKPT"
 *     8       4     u32 format version (1)
 *     12      4     u32 array count N
 *     then N arrays, each:
 *             4     u32 name length L
 *             L     name bytes (UTF-8, no terminator)
 *             4     u32 rank R
 *             8*R   u64 dimensions
 *             8*K   f64 values, K = product of dimensions, IEEE-754 LE
 *
 * Arrays appear in the bundle's canonical tensor order.
 */
#pragma once

#include "qlam/classical_nn.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qlam {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_tensors(std::span<const Tensor *const> tensors);
/// Throws ParseError with the offending offset.
std::vector<Tensor> decode_tensors(std::span<const std::uint8_t> bytes);

/// Copies decoded arrays into `dst`, requiring identical names and shapes.
void assign_tensors(const std::vector<Tensor> &src,
                    std::span<Tensor *const> dst);

template <typename Bundle>
void save_checkpoint(const std::filesystem::path &path, const Bundle &b);

template <typename Bundle>
void load_checkpoint(const std::filesystem::path &path, Bundle &b);

void write_checkpoint_bytes(const std::filesystem::path &path,
                            std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_checkpoint_bytes(const std::filesystem::path &path);

template <typename Bundle>
void save_checkpoint(const std::filesystem::path &path, const Bundle &b) {
    const auto ts = b.tensors();
    write_checkpoint_bytes(path, encode_tensors(ts));
}

template <typename Bundle>
void load_checkpoint(const std::filesystem::path &path, Bundle &b) {
    const auto ts = b.tensors();
    assign_tensors(decode_tensors(read_checkpoint_bytes(path)), ts);
}

} // namespace qlam
