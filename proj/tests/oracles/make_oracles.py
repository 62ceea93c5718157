#!/usr/bin/env python3
# Copyright 2026 The Harness Authors
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
"""Freezes oracle outputs into tests/oracles/frozen/.

Run once; the C++ tests read the frozen files and never call Python.
"""

import json
import pathlib
import random

import oracle

OUT = pathlib.Path(__file__).resolve().parent / "frozen"
DIM = 64

EMBED_SAMPLES = [
    "Arc flash during breaker racking",
    "arc FLASH during breaker racking",
    "lockout/tagout: verify zero energy!",
    "Café naïve résumé",
    "  spaced\tout \n text  ",
    "480V, 13.8kV and 4160 V",
    "a",
]


def write(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def embed_oracle():
    rows = []
    for text in EMBED_SAMPLES:
        for dim in (8, 64):
            rows.append({"text": text, "dim": dim, "tokens": oracle.lower_tokens(text),
                         "vector": oracle.mock_embed(text, dim)})
    write("mock_embed.json", rows)


def cosine_oracle(rng):
    vocab = [f"w{i:03d}" for i in range(150)] + ["breaker", "crane", "vault", "acid", "weld", "ladder"]
    docs = []
    for i in range(200):
        body = " ".join(rng.choice(vocab) for _ in range(rng.randint(8, 30)))
        docs.append({"doc_id": f"D{i:03d}", "event_name": f"event {i}", "summary": "synthetic record",
                     "body": body, "source_tag": "oracle"})
    rows = [(d["doc_id"] + "#0000", oracle.as_float32(oracle.mock_embed(d["body"], DIM))) for d in docs]
    queries = []
    for qi in range(50):
        text = " ".join(rng.choice(vocab) for _ in range(rng.randint(3, 10)))
        q = oracle.mock_embed(text, DIM)
        top = oracle.brute_force_top_k(rows, q, 20)
        plan = {"doc_id": f"Q{qi:02d}", "event_name": " ".join(rng.choice(vocab) for _ in range(3)),
                "summary": " ".join(rng.choice(vocab) for _ in range(5)), "body": text}
        canonical = " ".join(oracle.normalize(plan[f]) for f in ("event_name", "summary", "body"))
        docs_top = oracle.brute_force_top_k(rows, oracle.mock_embed(canonical, DIM), 10)
        queries.append({
            "text": text,
            "top_k": [{"chunk_id": cid, "score": s} for s, cid in top],
            "workplan": plan,
            "pure_rag": [{"doc_id": cid.split("#")[0], "score": s} for s, cid in docs_top],
        })
    with open(OUT / "cosine_corpus.jsonl", "w") as f:
        for d in docs:
            f.write(json.dumps(d, sort_keys=True) + "\n")
    write("cosine_queries.json", {"dim": DIM, "k": 20, "final_k": 10, "queries": queries})


def bucket(word):
    return oracle.fnv1a64(word.encode()) % DIM


def tau_oracle():
    """Parent/candidate pairs whose cosine sits below, on and above 0.8."""
    chosen, used = [], set()
    for w in (f"term{i}" for i in range(1000)):
        b = bucket(w)
        if b not in used:
            used.add(b)
            chosen.append(w)
        if len(chosen) == 16:
            break
    p5, p10, extra = chosen[:5], chosen[:10], chosen[10:]
    groups = [
        (p5, {
            "reordered": list(reversed(p5)),
            "four_of_five_plus_one": p5[:4] + extra[:1],
            "three_of_five_plus_two": p5[:3] + extra[:2],
            "four_of_five_plus_two": p5[:4] + extra[:2],
            "all_plus_one": p5 + extra[:1],
            "four_of_five": p5[:4],
            "all_plus_two": p5 + extra[:2],
            "disjoint": extra[:5],
        }),
        (p10, {
            "seven_of_ten_plus_one": p10[:7] + extra[:1],
            "eight_of_ten_plus_two": p10[:8] + extra[:2],
            "nine_of_ten_plus_three": p10[:9] + extra[:3],
            "eight_of_ten_plus_one": p10[:8] + extra[:1],
        }),
    ]
    out = []
    for parent, candidates in groups:
        v = oracle.mock_embed(" ".join(parent), DIM)
        rows = []
        for name, words in candidates.items():
            text = " ".join(words)
            c = oracle.cosine(oracle.mock_embed(text, DIM), v)
            rows.append({"name": name, "text": text, "cosine": c, "kept": c >= 0.8})
        out.append({"parent": " ".join(parent), "candidates": rows})
    write("tau_expansions.json", {"tau": 0.8, "dim": DIM, "groups": out})


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(4242)
    embed_oracle()
    cosine_oracle(rng)
    tau_oracle()


if __name__ == "__main__":
    main()
