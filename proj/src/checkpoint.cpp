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
#include "qlam/checkpoint.hpp"

#include "qlam/data.hpp"
#include "qlam/error.hpp"

#include <bit>
#include <cstring>
#include <string_view>

namespace qlam {

namespace {

constexpr std::string_view kMagic = "QLAMCKPT";

template <typename T> void put_le(std::vector<std::uint8_t> &out, T v) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    template <typename T> T get(const char *what) {
        need(sizeof(T), what);
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(bytes_[off_ + i]) << (8 * i);
        }
        off_ += sizeof(T);
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n, const char *what) {
        need(n, what);
        auto s = bytes_.subspan(off_, n);
        off_ += n;
        return s;
    }
    [[nodiscard]] std::size_t offset() const noexcept { return off_; }
    [[nodiscard]] bool done() const noexcept { return off_ == bytes_.size(); }

  private:
    void need(std::size_t n, const char *what) const {
        if (bytes_.size() - off_ < n) {
            throw ParseError(off_, std::string("checkpoint truncated reading ") + what);
        }
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t off_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_tensors(std::span<const Tensor *const> tensors) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    put_le<std::uint32_t>(out, kCheckpointVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const Tensor *t : tensors) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t->name.size()));
        out.insert(out.end(), t->name.begin(), t->name.end());
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t->shape.size()));
        for (const auto d : t->shape) {
            put_le<std::uint64_t>(out, d);
        }
        for (const double x : t->data) {
            put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
        }
    }
    return out;
}

std::vector<Tensor> decode_tensors(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(kMagic.size(), "magic");
    if (std::memcmp(magic.data(), kMagic.data(), kMagic.size()) != 0) {
        throw ParseError(0, "not a checkpoint file (bad magic)");
    }
    const std::size_t version_off = r.offset();
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw ParseError(version_off, "unsupported checkpoint version " +
                                          std::to_string(version));
    }
    const auto count = r.get<std::uint32_t>("array count");
    std::vector<Tensor> out;
    for (std::uint32_t a = 0; a < count; ++a) {
        const auto name_len = r.get<std::uint32_t>("name length");
        const auto name = r.take(name_len, "name");
        const auto rank = r.get<std::uint32_t>("rank");
        std::vector<std::size_t> shape;
        std::uint64_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape.push_back(r.get<std::uint64_t>("dimension"));
            n *= shape.back();
        }
        if (n > (bytes.size() - r.offset()) / 8) {
            throw ParseError(r.offset(), "checkpoint truncated in array values");
        }
        Tensor t(std::string(name.begin(), name.end()), std::move(shape));
        for (auto &x : t.data) {
            x = std::bit_cast<double>(r.get<std::uint64_t>("value"));
        }
        out.push_back(std::move(t));
    }
    if (!r.done()) {
        throw ParseError(r.offset(), "trailing bytes after last checkpoint array");
    }
    return out;
}

void assign_tensors(const std::vector<Tensor> &src,
                    std::span<Tensor *const> dst) {
    QLAM_REQUIRE(src.size() == dst.size(), ErrorKind::Shape,
                 "checkpoint holds " + std::to_string(src.size()) +
                     " arrays, model expects " + std::to_string(dst.size()));
    for (std::size_t i = 0; i < src.size(); ++i) {
        QLAM_REQUIRE(src[i].name == dst[i]->name, ErrorKind::Shape,
                     "checkpoint array '" + src[i].name + "' where '" +
                         dst[i]->name + "' was expected");
        QLAM_REQUIRE(src[i].shape == dst[i]->shape, ErrorKind::Shape,
                     "checkpoint array '" + src[i].name + "' has the wrong shape");
        dst[i]->data = src[i].data;
    }
}

void write_checkpoint_bytes(const std::filesystem::path &path,
                            std::span<const std::uint8_t> bytes) {
    write_file_bytes(path, bytes);
}

std::vector<std::uint8_t> read_checkpoint_bytes(const std::filesystem::path &path) {
    return read_file_bytes(path);
}

} // namespace qlam
