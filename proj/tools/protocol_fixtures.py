#!/usr/bin/env python3
# Copyright 2026 The Calum Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Records or replays HTTP protocol fixtures.

  record --calum BIN --out FILE   start `calum serve-stub` (order-sensitive,
                                  seed 0, model "stub") and record exchanges
  check  --endpoint URL FILE      replay the fixtures against a server

Exchanges with "exact": true must reproduce the recorded body; the others
only pin the status, the response shape and label-set membership, so any
conforming server passes them.
"""

import argparse
import json
import socket
import subprocess
import sys
import time

import requests

LABELS = {
    "mnli": ["entailment", "neutral", "contradiction"],
    "qnli": ["entailment", "not_entailment"],
    "rte": ["entailment", "not_entailment"],
    "qqp": ["equivalent", "not_equivalent"],
    "mrpc": ["equivalent", "not_equivalent"],
}

REQUESTS = [
    ("health", "GET", "/v1/health", None, False),
    ("classify_rte_pair", "POST", "/v1/classify", {
        "task": "rte", "model": "stub",
        "inputs": [{"segment_a": "Sentence1: a", "segment_b": "Sentence2: b"},
                   {"segment_a": "Sentence2: b", "segment_b": "Sentence1: a"},
                   {"segment_a": "[Sentence1] a", "segment_b": "[Sentence2] b"}],
    }, True),
    ("classify_mnli_unicode", "POST", "/v1/classify", {
        "task": "mnli", "model": "stub",
        "inputs": [{"segment_a": "Premise: 비가 온다",
                    "segment_b": "Hypothesis: 땅이 젖었다"},
                   {"segment_a": "Premise: it rains",
                    "segment_b": "Hypothesis: it is wet"}],
    }, True),
    ("classify_empty_batch", "POST", "/v1/classify",
     {"task": "qqp", "model": "stub", "inputs": []}, True),
    ("generate_mrpc", "POST", "/v1/generate", {
        "task": "mrpc", "model": "stub",
        "inputs": [{"text": "mrpc sentence1: a sentence2: b"},
                   {"text": "mrpc [sentence1] a [sentence2] b"}],
    }, True),
    ("classify_unknown_task", "POST", "/v1/classify",
     {"task": "nope", "model": "stub",
      "inputs": [{"segment_a": "A: x", "segment_b": "B: y"}]}, False),
    ("classify_malformed_json", "POST", "/v1/classify", "{not json", False),
    ("classify_missing_segment", "POST", "/v1/classify",
     {"task": "rte", "model": "stub", "inputs": [{"segment_a": "Sentence1: a"}]},
     False),
]


def send(base, method, path, body):
    if method == "GET":
        return requests.get(base + path, timeout=10)
    data = body if isinstance(body, str) else json.dumps(body)
    return requests.post(base + path, data=data.encode("utf-8"), timeout=10,
                         headers={"Content-Type": "application/json"})


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def record(args):
    port = free_port()
    proc = subprocess.Popen([args.calum, "serve-stub", "--kind",
                             "order-sensitive", "--seed", "0", "--model",
                             "stub", "--host", "127.0.0.1", "--port",
                             str(port)])
    base = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                send(base, "GET", "/v1/health", None)
                break
            except requests.ConnectionError:
                time.sleep(0.05)
        fixtures = []
        for name, method, path, body, exact in REQUESTS:
            r = send(base, method, path, body)
            fixtures.append({"name": name, "method": method, "path": path,
                             "request": body, "status": r.status_code,
                             "response": r.json(), "exact": exact})
    finally:
        proc.terminate()
        proc.wait()
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(fixtures, f, indent=2, ensure_ascii=False)
        f.write("\n")


def conforms(fx, r):
    if r.status_code // 100 != fx["status"] // 100:
        return f"status {r.status_code}, want {fx['status']}"
    body = r.json()
    if fx["exact"] and body != fx["response"]:
        return f"body {body}, want {fx['response']}"
    if fx["status"] >= 400:
        return None if isinstance(body.get("error"), str) else "no error text"
    if fx["path"] == "/v1/health":
        return None if body.get("status") == "ok" else "status not ok"
    key = "predictions" if fx["path"] == "/v1/classify" else "generations"
    out = body.get(key)
    if not isinstance(out, list) or len(out) != len(fx["request"]["inputs"]):
        return f"{key} has the wrong shape"
    if key == "predictions":
        labels = LABELS[fx["request"]["task"]]
        if any(p not in labels for p in out):
            return "label outside the task's set"
    return None


def check(args):
    with open(args.fixtures, encoding="utf-8") as f:
        fixtures = json.load(f)
    failed = 0
    for fx in fixtures:
        problem = conforms(fx, send(args.endpoint, fx["method"], fx["path"],
                                    fx["request"]))
        print(f"{'PASS' if problem is None else 'FAIL'} {fx['name']}"
              + ("" if problem is None else f": {problem}"))
        failed += problem is not None
    return 1 if failed else 0


def main():
    p = argparse.ArgumentParser()
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("record")
    r.add_argument("--calum", required=True)
    r.add_argument("--out", required=True)
    c = sub.add_parser("check")
    c.add_argument("--endpoint", required=True)
    c.add_argument("fixtures")
    args = p.parse_args()
    if args.cmd == "record":
        record(args)
        return 0
    return check(args)


if __name__ == "__main__":
    sys.exit(main())
