"""String and piece-of-data distances."""

from __future__ import annotations

import enum
import math
from collections import Counter
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from blockclean.mln_index import Gamma


class MetricKind(str, enum.Enum):
    LEVENSHTEIN = "levenshtein"
    COSINE = "cosine"


@lru_cache(maxsize=1 << 18)
def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert, delete, substitute)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def _shingles(text: str) -> Counter[str]:
    if len(text) < 2:
        return Counter(text)
    return Counter(text[i : i + 2] for i in range(len(text) - 1))


@lru_cache(maxsize=1 << 18)
def cosine_distance(a: str, b: str) -> float:
    """1 - cosine similarity of character-bigram count vectors.

    Strings shorter than two characters use their unigram vector. The empty
    string has a zero vector and is at distance 1 from every other string.
    """
    if a == b:
        return 0.0
    va, vb = _shingles(a), _shingles(b)
    if not va or not vb:
        return 1.0
    dot = sum(n * vb[k] for k, n in va.items())
    norm = math.sqrt(sum(n * n for n in va.values())) * math.sqrt(sum(n * n for n in vb.values()))
    return max(0.0, 1.0 - dot / norm)


def string_distance(a: str, b: str, metric: MetricKind = MetricKind.LEVENSHTEIN) -> float:
    if metric is MetricKind.LEVENSHTEIN:
        return float(levenshtein(a, b))
    if metric is MetricKind.COSINE:
        return cosine_distance(a, b)
    raise ValueError(f"unknown metric {metric!r}")


def values_distance(xs: Sequence[str], ys: Sequence[str], metric: MetricKind = MetricKind.LEVENSHTEIN) -> float:
    """Per-position sum of string distances over two equally long value lists."""
    if len(xs) != len(ys):
        raise ValueError(f"value layouts differ in length ({len(xs)} vs {len(ys)})")
    return sum(string_distance(x, y, metric) for x, y in zip(xs, ys))


def gamma_distance(g1: Gamma, g2: Gamma, metric: MetricKind = MetricKind.LEVENSHTEIN) -> float:
    if len(g1.reason_values) != len(g2.reason_values) or len(g1.result_values) != len(g2.result_values):
        raise ValueError("pieces of data come from blocks with different attribute layouts")
    return values_distance(g1.values, g2.values, metric)
