"""Synthetic temporal graphs: random base graphs, stretched copies, bursts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import TemporalGraph

__all__ = ["GenSpec", "DAY", "DEFAULT_P", "generate_base", "stretch_perturb", "inject_burst"]

DAY = 86_400
# expected 25,000 edges for 100 vertices over one day
DEFAULT_P = 25_000 / (100 * DAY)


@dataclass(frozen=True)
class GenSpec:
    n: int = 100
    p: float = DEFAULT_P
    duration: int = DAY
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need at least two vertices")
        if not 0 < self.p < 1:
            raise ValueError("p must lie strictly between 0 and 1")
        if self.duration < 1:
            raise ValueError("duration must be positive")


def generate_base(spec: GenSpec) -> TemporalGraph:
    """Every vertex, every second, sends an edge with probability ``p``.

    The target is uniform over the other vertices. Successes of the
    ``n * duration`` Bernoulli trials are drawn by geometric skipping, which
    gives the same distribution as visiting each trial. All ``n`` vertices are
    part of the graph, including those that never send or receive.
    """
    rng = np.random.default_rng(spec.seed)
    n, p = spec.n, spec.p
    trials = n * spec.duration
    expect = trials * p
    chunk = int(expect + 6 * math.sqrt(expect) + 16)
    positions = []
    last = -1
    while last < trials:
        steps = rng.geometric(p, size=chunk)
        pos = last + np.cumsum(steps)
        positions.append(pos)
        last = int(pos[-1])
    pos = np.concatenate(positions)
    pos = pos[pos < trials]
    second = pos // n
    src = pos % n
    dst = (src + rng.integers(1, n, size=len(src))) % n
    active = set(np.union1d(src, dst).tolist())
    return TemporalGraph.from_arrays(
        src, dst, second,
        vertex_labels=tuple(str(i) for i in range(n)),
        isolated=frozenset(set(range(n)) - active),
    )


def stretch_perturb(
    g: TemporalGraph,
    extra_days: int,
    sigma: float = DAY / 6,
    seed: int = 0,
    day: int = DAY,
) -> TemporalGraph:
    """Stretch the timeline by ``extra_days`` and jitter every timestamp.

    Times are rescaled linearly about the first timestamp so that the span
    grows by ``extra_days * day``, shifted by zero-mean Gaussian noise with
    standard deviation ``sigma``, clamped to the stretched span and rounded
    to whole seconds. Endpoints and edge ids are untouched.
    """
    if extra_days < 0:
        raise ValueError("extra_days must be >= 0")
    if not len(g):
        return g
    t0, t1 = g.span
    old = t1 - t0
    new = old + extra_days * day
    t = g.time.astype(np.float64)
    scaled = t0 + (t - t0) * (new / old) if old > 0 else np.full_like(t, float(t0))
    if sigma > 0:
        rng = np.random.default_rng(seed)
        scaled = scaled + rng.normal(0.0, sigma, size=len(t))
    stamped = np.rint(np.clip(scaled, t0, t0 + new)).astype(np.int64)
    return g.with_times(stamped)


def inject_burst(
    g: TemporalGraph,
    window: tuple[int, int],
    multiplier: int,
    seed: int = 0,
    fresh_fraction: float = 0.7,
    fresh_pool: float = 10.0,
) -> TemporalGraph:
    """Add ``multiplier`` times the window's edge count inside ``[start, end)``.

    A ``fresh_fraction`` share of the new edges joins two vertices that did not
    exist before, drawn from ``fresh_pool`` new vertices per such edge, so most
    newcomers interact once. The remaining new edges join two existing
    vertices chosen uniformly.
    """
    start, end = window
    if multiplier < 0:
        raise ValueError("multiplier must be >= 0")
    inside = int(np.count_nonzero((g.time >= start) & (g.time < end)))
    if inside == 0:
        raise ValueError("burst window contains no edges")
    if multiplier == 0:
        return g
    rng = np.random.default_rng(seed)
    count = multiplier * inside
    existing = np.union1d(g.src, g.dst)
    next_vertex = max(len(g.vertex_labels), int(existing.max()) + 1)
    f = int(rng.binomial(count, fresh_fraction))
    pool = max(2, int(math.ceil(fresh_pool * f)))

    def distinct_pairs(choices: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
        a = rng.choice(choices, size=size)
        b = rng.choice(choices, size=size)
        same = a == b
        while same.any():
            b[same] = rng.choice(choices, size=int(same.sum()))
            same = a == b
        return a, b

    fs, fd = distinct_pairs(next_vertex + np.arange(pool), f)
    es, ed = distinct_pairs(existing, count - f) if len(existing) > 1 else distinct_pairs(fs, 0)
    times = rng.integers(start, end, size=count)
    eids = int(g.eid.max()) + 1 + np.arange(count)

    labels = list(g.vertex_labels) + [str(i) for i in range(len(g.vertex_labels), next_vertex)]
    labels += [f"burst{i}" for i in range(pool)]
    return TemporalGraph.from_arrays(
        np.concatenate([g.src, fs, es]),
        np.concatenate([g.dst, fd, ed]),
        np.concatenate([g.time, times]),
        np.concatenate([g.eid, eids]),
        vertex_labels=tuple(labels),
        isolated=g.isolated,
    )
