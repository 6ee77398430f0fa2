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
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qlam {

/// Calls fn(k) for k in [0, n) over up to `workers` threads, each owning a
/// contiguous block. The first exception (by block order) is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn &&fn) {
    if (n == 0) {
        return;
    }
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1) {
        for (std::size_t k = 0; k < n; ++k) {
            fn(k);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = std::min(w * chunk, n);
            const std::size_t hi = std::min(lo + chunk, n);
            threads.emplace_back([&fn, &errors, w, lo, hi] {
                try {
                    for (std::size_t k = lo; k < hi; ++k) {
                        fn(k);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto &err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

} // namespace qlam
