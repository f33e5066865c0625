#!/usr/bin/env python3
# Copyright 2026 The madfold Authors. All Rights Reserved.
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

"""Runs every madfold command on small generated inputs and validates the
JSON it prints against the schema files."""

import argparse
import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def load(schema_dir: Path, name: str) -> dict:
    return json.loads((schema_dir / f"{name}.json").read_text())


def write_csv(path: Path, header: list[str], rows: list[list]) -> str:
    path.write_text(",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))
    return str(path)


def make_inputs(tmp: Path) -> dict[str, str]:
    rng = random.Random(5)
    lin = [[x1, x2, round(1 + 2 * x1 - x2 + rng.gauss(0, 0.1), 6)]
           for x1, x2 in ((round(rng.uniform(-1, 1), 6), round(rng.uniform(-1, 1), 6)) for _ in range(200))]
    logit = []
    for _ in range(300):
        x = round(rng.uniform(-2, 2), 6)
        logit.append([x, int(rng.random() < 1 / (1 + 2.718281828 ** -x))])
    blobs = [[round(c + rng.gauss(0, 0.3), 6), round(c + rng.gauss(0, 0.3), 6)]
             for c in (0.0, 5.0) for _ in range(100)]
    ratings = [[i, j, round(rng.gauss(0, 1), 6)] for i in range(6) for j in range(5)]
    items = [[f"w{int(rng.paretovariate(1.2))}"] for _ in range(500)]
    return {
        "lin": write_csv(tmp / "lin.csv", ["x1", "x2", "y"], lin),
        "logit": write_csv(tmp / "logit.csv", ["x", "y"], logit),
        "blobs": write_csv(tmp / "blobs.csv", ["a", "b"], blobs),
        "ratings": write_csv(tmp / "ratings.csv", ["i", "j", "r"], ratings),
        "items": write_csv(tmp / "items.csv", ["item"], items),
    }


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("binary")
    parser.add_argument("schemas", type=Path)
    args = parser.parse_args()

    report = load(args.schemas, "report")
    error = load(args.schemas, "error")
    failures = 0

    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        data = make_inputs(tmp)
        state = str(tmp / "state.fm")
        runs = [
            ("linregr", 0, ["--data", data["lin"], "--label", "y", "--intercept", "linregr"]),
            ("logregr", 0, ["--data", data["logit"], "--label", "y", "--intercept", "logregr"]),
            ("logregr", 2, ["--data", data["logit"], "--label", "y", "--intercept", "logregr", "--max-iter", "1"]),
            ("kmeans", 0, ["--data", data["blobs"], "--seed", "3", "--partitions", "2", "kmeans", "--k", "2"]),
            ("sgd", 0, ["--data", data["lin"], "--label", "y", "sgd", "--objective", "lasso",
                        "--alpha0", "1e-3", "--epochs", "4", "--mu", "0.1"]),
            ("sgd", 0, ["--data", data["logit"], "--label", "y", "sgd", "--objective", "hinge",
                        "--alpha0", "1e-3", "--epochs", "3"]),
            ("sgd", 0, ["--data", data["ratings"], "--label", "r", "--features", "i,j", "sgd",
                        "--objective", "recommendation", "--alpha0", "0.01", "--rank", "2", "--epochs", "3"]),
            ("sketch", 0, ["--data", data["items"], "sketch", "cm", "--query", "w1", "--query", "w2"]),
            ("sketch", 0, ["--data", data["items"], "sketch", "fm", "--save", state]),
            ("sketch", 0, ["sketch", "fm", "--load", state]),
            ("bench", 0, ["bench", "--vars", "2,4", "--rows", "2000", "--threads", "1,2", "--repeats", "2"]),
            ("error", 1, ["kmeans", "--k", "2"]),
            ("error", 1, ["--data", data["blobs"], "kmeans", "--k", "1000"]),
            ("error", 1, ["linregr", "--nope"]),
            ("error", 1, ["bench", "--vars", "80", "--rows", "1000000000000"]),
        ]
        for name, expected_code, argv in runs:
            proc = subprocess.run([args.binary, "--json", *argv], capture_output=True, text=True)
            label = " ".join(argv)
            try:
                if proc.returncode != expected_code:
                    raise AssertionError(f"exit {proc.returncode}, expected {expected_code}: {proc.stderr}")
                if name == "error":
                    if proc.stdout:
                        raise AssertionError("stdout not empty on failure")
                    jsonschema.validate(json.loads(proc.stderr), error)
                elif name == "bench":
                    jsonschema.validate(json.loads(proc.stdout), load(args.schemas, "bench"))
                else:
                    doc = json.loads(proc.stdout)
                    jsonschema.validate(doc, report)
                    if doc["command"] != name:
                        raise AssertionError(f"command field {doc['command']!r}")
                    jsonschema.validate(doc["result"], load(args.schemas, name))
                print(f"ok    {label}")
            except (AssertionError, json.JSONDecodeError, jsonschema.ValidationError) as e:
                failures += 1
                print(f"FAIL  {label}\n      {str(e).splitlines()[0]}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
