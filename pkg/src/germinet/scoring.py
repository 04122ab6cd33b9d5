"""Community scoring: conductance, sweep profiles, stopping rule, metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph, check_node_set


def conductance(g: Graph, nodes: Sequence[int]) -> float:
    """Cut edges divided by the smaller of the set's volume and its
    complement's volume. Undefined (ValueError) for the empty set and for
    the full node set."""
    nodes = check_node_set(g, nodes)
    if len(nodes) == 0 or len(nodes) == g.n:
        raise ValueError("conductance undefined for empty set or whole graph")
    mask = np.zeros(g.n, dtype=bool)
    mask[nodes] = True
    vol = int(g.degrees[mask].sum())
    cut = 0
    for v in nodes:
        cut += int(np.count_nonzero(~mask[g.neighbors(v)]))
    denom = min(vol, 2 * g.m - vol)
    if denom == 0:
        raise ValueError("conductance undefined: set covers all edges")
    return cut / denom


class GrowingCut:
    """Incremental cut size / volume of a node set grown one node at a time."""

    def __init__(self, g: Graph):
        self.g = g
        self.mask = np.zeros(g.n, dtype=bool)
        self.vol = 0
        self.cut = 0
        self.size = 0

    def add(self, v: int) -> None:
        inside = int(np.count_nonzero(self.mask[self.g.neighbors(v)]))
        d = self.g.degree(v)
        self.cut += d - 2 * inside
        self.vol += d
        self.mask[v] = True
        self.size += 1

    def conductance(self) -> float | None:
        """Conductance of the current set, or None where it is undefined."""
        denom = min(self.vol, 2 * self.g.m - self.vol)
        if self.size == 0 or self.size == self.g.n or denom == 0:
            return None
        return self.cut / denom


@dataclass
class SweepProfile:
    """Node ordering with one community score per growth prefix.

    scores[j] is the score of ordering[:offset + j]; offset is the prefix
    length scored first (the seed count for greedy growth, 1 for a score
    sweep). selected, when set, indexes scores at the chosen stopping point.
    """

    ordering: list[int]
    scores: list[float]
    offset: int
    selected: int | None = None

    def prefix_length(self, score_index: int) -> int:
        return self.offset + score_index

    def selected_nodes(self) -> list[int]:
        if self.selected is None:
            return list(self.ordering)
        return list(self.ordering[: self.offset + self.selected])

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("prefix,conductance\n")
            for j, s in enumerate(self.scores):
                fh.write(f"{self.offset + j},{s!r}\n")


def detect_first_local_min(
    scores: Sequence[float], rise_threshold: float, min_prefix: int = 0
) -> int | None:
    """First qualifying local minimum of a score sequence.

    A candidate index i (i >= min_prefix) is a local minimum when
    scores[i] < scores[i-1] and scores[i] <= scores[i+1]; it qualifies when
    the sequence later rises to at least (1 + rise_threshold) * scores[i]
    before any later value undercuts scores[i]. Returns None when no
    candidate qualifies (callers then keep the whole sequence).
    """
    if rise_threshold <= 0:
        raise ValueError("rise_threshold must be positive")
    n = len(scores)
    for i in range(max(min_prefix, 1), n - 1):
        if not (scores[i] < scores[i - 1] and scores[i] <= scores[i + 1]):
            continue
        bar = scores[i] * (1.0 + rise_threshold)
        for j in range(i + 1, n):
            if scores[j] < scores[i]:
                break
            if scores[j] >= bar:
                return i
    return None


def precision_recall_f1(
    estimate: Sequence[int], truth: Sequence[int]
) -> tuple[float, float, float]:
    """Precision, recall and F1 of an estimated node set against the truth.

    An empty estimate has undefined precision and is scored as all zeros.
    """
    truth_set = set(truth)
    if not truth_set:
        raise ValueError("truth set must be nonempty")
    est_set = set(estimate)
    if not est_set:
        return 0.0, 0.0, 0.0
    hit = len(est_set & truth_set)
    precision = hit / len(est_set)
    recall = hit / len(truth_set)
    f1 = 0.0 if hit == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


@dataclass
class PRCurve:
    """Precision/recall per prefix of a node ordering (1-indexed lengths)."""

    precisions: np.ndarray
    recalls: np.ndarray

    def __len__(self):
        return len(self.precisions)

    def precision_at_recall(self, level: float) -> float:
        """Best precision among prefixes achieving at least the given recall
        (0.0 when the recall level is never reached)."""
        ok = self.recalls >= level - 1e-12
        return float(self.precisions[ok].max()) if ok.any() else 0.0

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("prefix,precision,recall\n")
            for k in range(len(self.precisions)):
                fh.write(f"{k + 1},{self.precisions[k]!r},{self.recalls[k]!r}\n")


def pr_curve(ordering: Sequence[int], truth: Sequence[int]) -> PRCurve:
    """Precision-recall curve over every prefix of the ordering."""
    truth_set = set(int(v) for v in truth)
    if not ordering:
        raise ValueError("ordering must be nonempty")
    precisions = np.empty(len(ordering))
    recalls = np.empty(len(ordering))
    hit = 0
    for k, v in enumerate(ordering):
        if int(v) in truth_set:
            hit += 1
        precisions[k] = hit / (k + 1)
        recalls[k] = hit / len(truth_set)
    return PRCurve(precisions, recalls)
