#!/usr/bin/env python3
# Copyright 2026 The qiml Authors
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
"""Build a 10,000-digit MNIST corpus in IDX format from the `mnist` npm package.

The package ships real MNIST digits as JSON (pixel / 255, three decimals),
which round back to the original bytes. Every fifth digit of each class goes
to the t10k files (8004 train / 1996 t10k).

    scripts/fetch_mnist_npm.py [--package DIR] [--out data/mnist]

Without --package the tarball is fetched with `npm pack mnist@1.1.0`.
"""

import argparse
import json
import pathlib
import struct
import subprocess
import sys
import tarfile
import tempfile


def write_idx(path, magic, dims, payload):
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        for d in dims:
            f.write(struct.pack(">I", d))
        f.write(bytes(payload))


def load_digits(package):
    train, test = [], []
    for label in range(10):
        data = json.loads((package / "src" / "digits" / f"{label}.json").read_text())["data"]
        if len(data) % 784:
            sys.exit(f"{label}.json: length {len(data)} is not a multiple of 784")
        for i in range(len(data) // 784):
            px = [round(v * 255) for v in data[i * 784:(i + 1) * 784]]
            if any(p < 0 or p > 255 for p in px):
                sys.exit(f"{label}.json: pixel outside 0..255")
            (test if i % 5 == 4 else train).append((px, label))
    return train, test


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--package", type=pathlib.Path, help="extracted npm package directory")
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data/mnist"))
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        package = args.package
        if package is None:
            subprocess.run(["npm", "pack", "mnist@1.1.0", "--silent"], cwd=tmp, check=True,
                           stdout=subprocess.DEVNULL)
            tgz = next(pathlib.Path(tmp).glob("mnist-*.tgz"))
            with tarfile.open(tgz) as t:
                t.extractall(tmp, filter="data")
            package = pathlib.Path(tmp) / "package"
        train, test = load_digits(package)

    args.out.mkdir(parents=True, exist_ok=True)
    for name, rows in (("train", train), ("t10k", test)):
        pixels = [p for px, _ in rows for p in px]
        write_idx(args.out / f"{name}-images-idx3-ubyte", 0x803, (len(rows), 28, 28), pixels)
        write_idx(args.out / f"{name}-labels-idx1-ubyte", 0x801, (len(rows),), [lab for _, lab in rows])
        print(f"{name}: {len(rows)} images -> {args.out}")


if __name__ == "__main__":
    main()
