#!/usr/bin/env python3
# Copyright 2026 The QLAM Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Build gzipped IDX files from the 10k MNIST digits bundled in the npm
`mnist` package (https://github.com/cazala/mnist).

Usage:
    npm pack mnist && tar xzf mnist-*.tgz
    python3 scripts/mnist_from_npm.py package/src/digits data/mnist

The digits are shuffled with a fixed seed and split 8000 / 2000 into
train-* and t10k-* files. Pixel values in the package are k/255 rounded to
three decimals, so round(v * 255) recovers the original byte exactly.
"""

import gzip
import json
import random
import struct
import sys
from pathlib import Path

SEED = 20240611
N_TRAIN = 8000


def write_idx(path, magic, dims, payload):
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(struct.pack(">I", magic))
        for d in dims:
            f.write(struct.pack(">I", d))
        f.write(payload)


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    samples = []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        assert len(flat) % 784 == 0
        for k in range(len(flat) // 784):
            px = bytes(round(v * 255) for v in flat[k * 784:(k + 1) * 784])
            samples.append((px, digit))
    random.Random(SEED).shuffle(samples)
    splits = {"train": samples[:N_TRAIN], "t10k": samples[N_TRAIN:]}
    for name, part in splits.items():
        write_idx(dst / f"{name}-images-idx3-ubyte.gz", 0x803,
                  [len(part), 28, 28], b"".join(p for p, _ in part))
        write_idx(dst / f"{name}-labels-idx1-ubyte.gz", 0x801,
                  [len(part)], bytes(lbl for _, lbl in part))
        print(name, len(part))


if __name__ == "__main__":
    main()
