#!/usr/bin/env python3
# Copyright 2026 The PANN Authors. All Rights Reserved.
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
"""Generates the bundled toy task: 8x8 digit features and a dense ReLU model.

Offline tooling only. The C++ library never trains; it loads the files this
script writes into data/.

    python3 tools/train_toy_model.py --out data
"""

import argparse
import json
import os

import numpy as np
from sklearn.datasets import load_digits
from sklearn.neural_network import MLPClassifier

FORMAT_VERSION = 1
SPLITS = (("train", 1000), ("calib", 200), ("val", 297), ("test", 300))


def write_split(path, labels, features):
    with open(path, "w") as f:
        f.write(f"# format_version={FORMAT_VERSION}\n")
        for y, row in zip(labels, features):
            f.write(str(int(y)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data")
    parser.add_argument("--seed", type=int, default=20240611)
    parser.add_argument("--hidden", type=int, default=32)
    args = parser.parse_args()

    digits = load_digits()
    x = digits.data / 16.0  # exact in binary: multiples of 1/16
    y = digits.target
    rng = np.random.default_rng(args.seed)
    order = rng.permutation(len(y))

    parts = {}
    start = 0
    for name, count in SPLITS:
        idx = order[start:start + count]
        parts[name] = (x[idx], y[idx])
        start += count
    assert start == len(y)

    clf = MLPClassifier(hidden_layer_sizes=(args.hidden,), activation="relu",
                        alpha=1e-3, max_iter=2000, random_state=args.seed)
    clf.fit(*parts["train"])

    layers = []
    for i, (w, b) in enumerate(zip(clf.coefs_, clf.intercepts_)):
        layers.append({
            "weights": [[float(v) for v in row] for row in w.T],
            "bias": [float(v) for v in b],
            "relu": i + 1 < len(clf.coefs_),
        })
    accuracy = {name: float(clf.score(*parts[name])) for name, _ in SPLITS}
    model = {
        "format_version": FORMAT_VERSION,
        "name": "digits-mlp-64-%d-10" % args.hidden,
        "reference_accuracy": accuracy,
        "layers": layers,
    }

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "digits_model.json"), "w") as f:
        json.dump(model, f, indent=1)
        f.write("\n")
    for name, _ in SPLITS:
        write_split(os.path.join(args.out, "digits_%s.csv" % name), *parts[name][::-1])
    print(json.dumps(accuracy))


if __name__ == "__main__":
    main()
