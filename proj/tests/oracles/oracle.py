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
"""Reference computations written from the documented contracts only.

Nothing here imports or shells out to the C++ code.
"""

import math
import struct
import unicodedata

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK64
    return h


def normalize(text: str) -> str:
    text = unicodedata.normalize("NFC", text)
    text = "".join(c for c in text if not unicodedata.category(c).startswith("C") or c in " \t\n\r")
    return " ".join(text.split())


def tokens(text: str):
    """Word runs (ASCII alphanumerics and any non-ASCII code point) or single
    ASCII punctuation characters; whitespace separates."""
    out, word = [], []
    for c in text:
        if c.isascii() and c.isalnum() or not c.isascii() and not c.isspace():
            word.append(c)
            continue
        if word:
            out.append("".join(word))
            word = []
        if not c.isspace():
            out.append(c)
    if word:
        out.append("".join(word))
    return out


def lower_tokens(text: str):
    return ["".join(c.lower() if c.isascii() else c for c in t) for t in tokens(normalize(text))]


def mock_embed(text: str, dim: int):
    v = [0.0] * dim
    for t in lower_tokens(text):
        v[fnv1a64(t.encode("utf-8")) % dim] += 1.0
    sq = 0.0
    for x in v:
        sq += x * x
    n = math.sqrt(sq)
    return [x / n for x in v] if n > 0 else v


def cosine(u, v):
    dot = uu = vv = 0.0
    for a, b in zip(u, v):
        dot += a * b
        uu += a * a
        vv += b * b
    return max(-1.0, min(1.0, dot / (math.sqrt(uu) * math.sqrt(vv))))


def as_float32(v):
    return [struct.unpack("<f", struct.pack("<f", x))[0] for x in v]


def stored_cosine(row32, q):
    """Cosine of a query against a row held in float32, accumulated in double."""
    dot = rr = qq = 0.0
    for a in row32:
        rr += a * a
    for b in q:
        qq += b * b
    for a, b in zip(row32, q):
        dot += a * b
    return max(-1.0, min(1.0, dot / (math.sqrt(rr) * math.sqrt(qq))))


def brute_force_top_k(rows, query, k):
    """rows: list of (id, float32 vector). Score descending, ties by id."""
    scored = [(stored_cosine(vec, query), rid) for rid, vec in rows]
    scored.sort(key=lambda s: (-s[0], s[1]))
    return scored[:k]
