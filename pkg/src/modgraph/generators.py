"""Seeded random-graph generators: G(n,p), G(n,m), and planted k-block graphs.

All randomness flows through numpy's PCG64 bit generator seeded via
SeedSequence, so streams are portable and reproducible bit-for-bit.
Parallel sweeps must derive independent substreams from
(seed, task indices) with :func:`substream`; generator state is never
shared.

G(n,p) uses geometric gap-skipping over the linear pair index instead of
n(n-1)/2 Bernoulli draws, so runtime is O(n + output edges) and n = 1e6
sweeps at p = c/n are cheap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .graph import Graph

__all__ = [
    "Model",
    "GeneratorSpec",
    "LabeledGraph",
    "MTooLargeError",
    "RateOutOfRangeError",
    "substream",
    "gen_gnp",
    "gen_gnm",
    "gen_planted",
    "sample",
]


class MTooLargeError(ValueError):
    """Requested edge count exceeds n(n-1)/2."""


class RateOutOfRangeError(ValueError):
    """Planted-model rate outside (0, n] for alpha or [0, n] for beta."""


class Model(str, Enum):
    GNP = "gnp"
    GNM = "gnm"
    PLANTED = "planted"


_SPEC_KEYS = ("model", "n", "p", "m", "alpha", "beta", "k", "seed")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters plus seed for one random-graph draw.

    Exactly the fields of the selected model may be set: p for GNP, m for
    GNM, (alpha, beta, k) for PLANTED.
    """

    model: Model
    n: int
    seed: int
    p: Optional[float] = None
    m: Optional[int] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        required = {Model.GNP: ("p",), Model.GNM: ("m",),
                    Model.PLANTED: ("alpha", "beta", "k")}[self.model]
        for name in ("p", "m", "alpha", "beta", "k"):
            val = getattr(self, name)
            if name in required and val is None:
                raise ValueError(f"model {self.model.value} requires field {name!r}")
            if name not in required and val is not None:
                raise ValueError(f"model {self.model.value} forbids field {name!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.model is Model.GNP and not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")
        if self.model is Model.GNM and not (0 <= self.m <= self.n * (self.n - 1) // 2):
            raise MTooLargeError(f"m={self.m} exceeds pair count for n={self.n}")
        if self.model is Model.PLANTED:
            if not (0.0 < self.alpha <= self.n):
                raise RateOutOfRangeError("alpha/n must lie in (0, 1]")
            if not (0.0 <= self.beta <= self.n):
                raise RateOutOfRangeError("beta/n must lie in [0, 1]")
            if self.k < 2:
                raise ValueError("planted model needs k >= 2 blocks")

    def to_json(self) -> str:
        payload = {key: getattr(self, key) for key in _SPEC_KEYS}
        payload["model"] = self.model.value
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        raw = json.loads(text)
        unknown = set(raw) - set(_SPEC_KEYS)
        if unknown:
            raise ValueError(f"unknown GeneratorSpec keys: {sorted(unknown)}")
        kwargs = {key: raw.get(key) for key in _SPEC_KEYS if raw.get(key) is not None}
        kwargs["model"] = Model(str(raw["model"]).lower())
        return cls(**kwargs)


@dataclass(frozen=True)
class LabeledGraph:
    """Planted-model output: the graph plus the block label of each vertex."""

    graph: Graph
    labels: np.ndarray
    k: int

    def __post_init__(self):
        if self.labels.shape != (self.graph.n,):
            raise ValueError("labels must have length n")
        if self.labels.size and not (0 <= int(self.labels.min())
                                     and int(self.labels.max()) < self.k):
            raise ValueError("block id out of range")
        self.labels.setflags(write=False)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream derived by hashing (seed, key indices)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def _bernoulli_positions(rng: np.random.Generator, count: int, p: float) -> np.ndarray:
    """Sorted positions of successes in `count` Bernoulli(p) trials.

    Gaps between successes are iid Geometric(p), sampled by exact inversion
    of unit exponentials (floor(E / -log1p(-p)) + 1) in vectorized chunks;
    distributionally identical to `count` independent coin flips.
    """
    if count <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(count, dtype=np.int64)
    lam = -math.log1p(-p)
    chunks = []
    last = -1
    while True:
        remaining = count - 1 - last
        size = max(1024, int(remaining * p * 1.02) + 64)
        buf = rng.standard_exponential(size)
        buf /= lam
        np.floor(buf, out=buf)
        gaps = buf.astype(np.int64)
        del buf
        gaps += 1
        np.cumsum(gaps, out=gaps)
        gaps += last
        if gaps[-1] >= count:
            chunks.append(gaps[gaps < count])
            break
        chunks.append(gaps)
        last = int(gaps[-1])
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _row_starts(n: int) -> np.ndarray:
    """Start of row u in the linear index over pairs (u, v), u < v."""
    starts = np.zeros(n, dtype=np.int64)
    if n > 1:
        np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64), out=starts[1:])
    return starts


def _pairs_from_index(pos: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear pair indices to (u, v); consumes `pos` as the v buffer."""
    starts = _row_starts(n)
    u = np.searchsorted(starts, pos, side="right")
    u -= 1
    v = pos
    v -= starts[u]
    v += u
    v += 1
    dtype = np.int32 if n <= np.iinfo(np.int32).max else np.int64
    return u.astype(dtype), v.astype(dtype)


def gen_gnp(n: int, p: float, seed) -> Graph:
    """G(n,p): each of the n(n-1)/2 pairs is an edge independently with
    probability p.  Deterministic given (n, p, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    rng = _rng(seed)
    count = n * (n - 1) // 2
    pos = _bernoulli_positions(rng, count, p)
    u, v = _pairs_from_index(pos, n)
    del pos
    return Graph.from_arrays(n, u, v, presorted=True, _trusted=True)


def gen_gnm(n: int, m: int, seed) -> Graph:
    """G(n,m): uniform over m-edge graphs, via Floyd's subset sampling of
    pair indices.  Deterministic given (n, m, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    count = n * (n - 1) // 2
    if not (0 <= m <= count):
        raise MTooLargeError(f"m={m} exceeds pair count {count}")
    rng = _rng(seed)
    chosen: set[int] = set()
    for j in range(count - m, count):
        t = int(rng.integers(0, j + 1))
        if t in chosen:
            chosen.add(j)
        else:
            chosen.add(t)
    pos = np.fromiter(chosen, dtype=np.int64, count=len(chosen))
    pos.sort()
    u, v = _pairs_from_index(pos, n)
    return Graph.from_arrays(n, u, v, presorted=True, _trusted=True)


def gen_planted(n: int, alpha: float, beta: float, k: int, seed) -> LabeledGraph:
    """Planted k-block graph: labels iid uniform on 0..k-1; a pair is an edge
    with probability alpha/n when the labels agree and beta/n otherwise.
    Labels are retained in the output (callers may discard them)."""
    if k < 2:
        raise ValueError("planted model needs k >= 2 blocks")
    if not (0.0 < alpha <= n):
        raise RateOutOfRangeError("alpha/n must lie in (0, 1]")
    if not (0.0 <= beta <= n):
        raise RateOutOfRangeError("beta/n must lie in [0, 1]")
    rng = _rng(seed)
    labels = rng.integers(0, k, size=n)
    blocks = [np.flatnonzero(labels == i) for i in range(k)]
    p_in = alpha / n
    p_out = beta / n
    eu_chunks: list[np.ndarray] = []
    ev_chunks: list[np.ndarray] = []
    for i in range(k):
        verts_i = blocks[i]
        s_i = verts_i.size
        # within-block pairs
        pos = _bernoulli_positions(rng, s_i * (s_i - 1) // 2, p_in)
        if pos.size:
            lu, lv = _pairs_from_index(pos, s_i)
            eu_chunks.append(verts_i[lu])
            ev_chunks.append(verts_i[lv])
        # cross-block pairs against every later block
        for j in range(i + 1, k):
            verts_j = blocks[j]
            s_j = verts_j.size
            pos = _bernoulli_positions(rng, s_i * s_j, p_out)
            if pos.size:
                a, b = np.divmod(pos, s_j)
                gu = verts_i[a]
                gv = verts_j[b]
                eu_chunks.append(np.minimum(gu, gv))
                ev_chunks.append(np.maximum(gu, gv))
    if eu_chunks:
        eu = np.concatenate(eu_chunks)
        ev = np.concatenate(ev_chunks)
    else:
        eu = np.empty(0, dtype=np.int64)
        ev = np.empty(0, dtype=np.int64)
    graph = Graph.from_arrays(n, eu, ev, presorted=False)
    return LabeledGraph(graph=graph, labels=labels, k=k)


def sample(spec: GeneratorSpec):
    """Draw from a GeneratorSpec: a Graph for GNP/GNM, a LabeledGraph for
    PLANTED."""
    if spec.model is Model.GNP:
        return gen_gnp(spec.n, spec.p, spec.seed)
    if spec.model is Model.GNM:
        return gen_gnm(spec.n, spec.m, spec.seed)
    return gen_planted(spec.n, spec.alpha, spec.beta, spec.k, spec.seed)
