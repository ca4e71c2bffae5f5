"""Temporal graph data model, edge-list ingestion and window slicing."""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "TemporalEdge",
    "TemporalGraph",
    "WindowGraph",
    "EdgeListError",
    "load_edge_list",
    "load_vertex_file",
    "window_partition",
    "birth_times",
    "graph_stats",
]

_TIME_SCALE = {"raw": 1, "seconds": 1, "ms": 1}
_SPLIT = re.compile(r"[\s,]+")


class EdgeListError(ValueError):
    """Raised for a malformed edge-list line."""

    def __init__(self, line_no: int, line: str, reason: str = "expected 'src dst time'"):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no


class TemporalEdge(NamedTuple):
    src: int
    dst: int
    time: int
    eid: int


class EdgeIndex:
    """Time-ordered adjacency of a graph.

    Every edge gets an integer ``okey``: its position under the (time, edge-id)
    order. Strict comparison of okeys is the arrival order used for motif
    matching, so equal timestamps are broken by load order.
    """

    def __init__(self, g: "TemporalGraph") -> None:
        order = np.lexsort((g.eid, g.time))
        src = g.src[order].tolist()
        dst = g.dst[order].tolist()
        time = g.time[order].tolist()
        eid = g.eid[order].tolist()
        self.src = src
        self.dst = dst
        self.time = time
        self.eid = eid
        # okey is the list position: edges are stored in arrival order
        out: dict[int, list[int]] = {}
        inc: dict[int, list[int]] = {}
        pair: dict[tuple[int, int], list[int]] = {}
        loops: dict[int, list[int]] = {}
        plain: list[int] = []
        all_loops: list[int] = []
        for k in range(len(src)):
            u, v = src[k], dst[k]
            if u == v:
                loops.setdefault(u, []).append(k)
                all_loops.append(k)
                continue
            plain.append(k)
            out.setdefault(u, []).append(k)
            inc.setdefault(v, []).append(k)
            pair.setdefault((u, v), []).append(k)
        self.out = out
        self.inc = inc
        self.pair = pair
        self.loops = loops
        self.plain = plain
        self.all_loops = all_loops

    def __len__(self) -> int:
        return len(self.src)


@dataclass(frozen=True, eq=False)
class TemporalGraph:
    """Directed temporal multigraph.

    Edges are held as parallel integer arrays sorted by (time, src, dst, eid).
    ``vertex_labels`` maps dense vertex ids back to the ids used in the input.
    Instances are immutable; slicing and edge removal return new graphs that
    share the label table.
    """

    src: np.ndarray
    dst: np.ndarray
    time: np.ndarray
    eid: np.ndarray
    vertex_labels: tuple[str, ...] = ()
    isolated: frozenset[int] = frozenset()

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Sequence[int]],
        *,
        isolated: Iterable[int] = (),
        vertex_labels: Sequence[str] | None = None,
    ) -> "TemporalGraph":
        """Build a graph from ``(src, dst, time)`` or ``(src, dst, time, eid)`` rows.

        Edge ids default to the row position. Vertex ids are used as given.
        """
        rows = [tuple(e) for e in edges]
        n = len(rows)
        src = np.fromiter((r[0] for r in rows), dtype=np.int64, count=n)
        dst = np.fromiter((r[1] for r in rows), dtype=np.int64, count=n)
        time = np.fromiter((r[2] for r in rows), dtype=np.int64, count=n)
        if rows and len(rows[0]) > 3:
            eid = np.fromiter((r[3] for r in rows), dtype=np.int64, count=n)
        else:
            eid = np.arange(n, dtype=np.int64)
        iso = frozenset(int(v) for v in isolated)
        if vertex_labels is None:
            top = max(
                [int(src.max()) if n else -1, int(dst.max()) if n else -1, *iso, -1]
            )
            vertex_labels = [str(i) for i in range(top + 1)]
        return cls.from_arrays(src, dst, time, eid, vertex_labels=tuple(vertex_labels), isolated=iso)

    @classmethod
    def from_arrays(
        cls,
        src: np.ndarray,
        dst: np.ndarray,
        time: np.ndarray,
        eid: np.ndarray | None = None,
        *,
        vertex_labels: tuple[str, ...] = (),
        isolated: frozenset[int] = frozenset(),
    ) -> "TemporalGraph":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        time = np.asarray(time, dtype=np.int64)
        if eid is None:
            eid = np.arange(len(src), dtype=np.int64)
        eid = np.asarray(eid, dtype=np.int64)
        if not (len(src) == len(dst) == len(time) == len(eid)):
            raise ValueError("edge arrays differ in length")
        if len(np.unique(eid)) != len(eid):
            raise ValueError("edge ids must be unique")
        order = np.lexsort((eid, dst, src, time))
        g = cls(src[order], dst[order], time[order], eid[order], tuple(vertex_labels), frozenset(isolated))
        for a in (g.src, g.dst, g.time, g.eid):
            a.setflags(write=False)
        return g

    @classmethod
    def empty(cls) -> "TemporalGraph":
        z = np.zeros(0, dtype=np.int64)
        return cls.from_arrays(z, z, z, z)

    # -- basic accessors ------------------------------------------------

    def __len__(self) -> int:
        return len(self.eid)

    @property
    def num_edges(self) -> int:
        return len(self.eid)

    @property
    def edges(self) -> list[TemporalEdge]:
        return [
            TemporalEdge(*row)
            for row in zip(self.src.tolist(), self.dst.tolist(), self.time.tolist(), self.eid.tolist())
        ]

    @cached_property
    def vertices(self) -> frozenset[int]:
        ends = np.union1d(self.src, self.dst).tolist()
        return frozenset(ends) | self.isolated

    @property
    def span(self) -> tuple[int, int] | None:
        if not len(self):
            return None
        return int(self.time[0]), int(self.time[-1])

    @cached_property
    def index(self) -> EdgeIndex:
        return EdgeIndex(self)

    def label(self, v: int) -> str:
        if 0 <= v < len(self.vertex_labels):
            return self.vertex_labels[v]
        return str(v)

    # -- derived graphs -------------------------------------------------

    def _subset(self, mask: np.ndarray, isolated: frozenset[int] | None = None) -> "TemporalGraph":
        g = TemporalGraph(
            self.src[mask],
            self.dst[mask],
            self.time[mask],
            self.eid[mask],
            self.vertex_labels,
            self.isolated if isolated is None else isolated,
        )
        return g

    def slice_time(self, start: int, end: int) -> "TemporalGraph":
        """Edges with ``start <= time < end``; isolated vertices are not carried."""
        lo = int(np.searchsorted(self.time, start, side="left"))
        hi = int(np.searchsorted(self.time, end, side="left"))
        mask = np.zeros(len(self), dtype=bool)
        mask[lo:hi] = True
        return self._subset(mask, frozenset())

    def remove_edges(self, eids: Iterable[int]) -> "TemporalGraph":
        drop = np.fromiter(eids, dtype=np.int64)
        if not len(drop):
            return self
        mask = ~np.isin(self.eid, drop)
        return self._subset(mask)

    def relabel(self, mapping: dict[int, int] | Sequence[int]) -> "TemporalGraph":
        """Apply a bijective vertex renaming; edge ids and times are kept."""
        if isinstance(mapping, dict):
            top = max(list(mapping) + [int(self.src.max()) if len(self) else 0,
                                       int(self.dst.max()) if len(self) else 0])
            table = np.arange(top + 1, dtype=np.int64)
            for k, v in mapping.items():
                table[k] = v
        else:
            table = np.asarray(mapping, dtype=np.int64)
        iso = frozenset(int(table[v]) for v in self.isolated)
        n = int(table.max()) + 1 if len(table) else 0
        labels = [str(i) for i in range(n)]
        for old, new in enumerate(table.tolist()):
            if old < len(self.vertex_labels):
                labels[new] = self.vertex_labels[old]
        return TemporalGraph.from_arrays(
            table[self.src], table[self.dst], self.time, self.eid,
            vertex_labels=tuple(labels), isolated=iso,
        )

    def with_times(self, time: np.ndarray) -> "TemporalGraph":
        """Same edges (ids, endpoints) with new timestamps, re-sorted."""
        return TemporalGraph.from_arrays(
            self.src, self.dst, np.asarray(time, dtype=np.int64), self.eid,
            vertex_labels=self.vertex_labels, isolated=self.isolated,
        )

    def write_edge_list(self, fh: IO[str]) -> None:
        for u, v, t in zip(self.src.tolist(), self.dst.tolist(), self.time.tolist()):
            fh.write(f"{self.label(u)} {self.label(v)} {t}\n")


@dataclass(frozen=True)
class WindowGraph:
    window_id: int
    start: int
    end: int
    graph: TemporalGraph
    importance: float


# -- loading -------------------------------------------------------------


def _text_stream(source) -> IO[str]:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"))
    if isinstance(source, str):
        return open(source, encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return io.StringIO(data)


def load_edge_list(
    source,
    *,
    delimiter: str | None = None,
    has_header: bool = False,
    time_unit: str = "raw",
    vertex_source=None,
) -> TemporalGraph:
    """Read a ``src dst time`` edge list.

    ``source`` may be a path, bytes, or an open text/binary stream. Fields are
    split on whitespace or commas unless ``delimiter`` is given; columns past
    the third are ignored and ``#`` lines are skipped. Vertex ids are interned
    to dense integers in order of first appearance. Edge ids follow file order.

    ``time_unit="ms"`` floors millisecond stamps to seconds.
    """
    if time_unit not in _TIME_SCALE:
        raise ValueError(f"unknown time unit {time_unit!r}")
    intern: dict[str, int] = {}
    labels: list[str] = []
    src: list[int] = []
    dst: list[int] = []
    time: list[int] = []

    def vid(name: str) -> int:
        v = intern.get(name)
        if v is None:
            v = intern[name] = len(labels)
            labels.append(name)
        return v

    fh = _text_stream(source)
    try:
        header_pending = has_header
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                continue
            if header_pending:
                header_pending = False
                continue
            parts = line.split(delimiter) if delimiter else _SPLIT.split(line)
            parts = [p.strip() for p in parts if p.strip() != ""]
            if len(parts) < 3:
                raise EdgeListError(line_no, line)
            try:
                t = float(parts[2])
            except ValueError:
                raise EdgeListError(line_no, line, "timestamp is not numeric") from None
            if not math.isfinite(t):
                raise EdgeListError(line_no, line, "timestamp is not finite")
            if time_unit == "ms":
                t = t / 1000.0
            src.append(vid(parts[0]))
            dst.append(vid(parts[1]))
            time.append(int(math.floor(t)))
    finally:
        if isinstance(source, str):
            fh.close()

    isolated: set[int] = set()
    if vertex_source is not None:
        for name in load_vertex_file(vertex_source):
            isolated.add(vid(name))
    endpoints = set(src) | set(dst)
    isolated -= endpoints
    return TemporalGraph.from_arrays(
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        np.asarray(time, dtype=np.int64),
        vertex_labels=tuple(labels),
        isolated=frozenset(isolated),
    )


def load_vertex_file(source) -> list[str]:
    fh = _text_stream(source)
    try:
        names = []
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                names.append(line.split()[0])
        return names
    finally:
        if isinstance(source, str):
            fh.close()


# -- windows and statistics ----------------------------------------------


def window_partition(
    g: TemporalGraph,
    *,
    duration: int | None = None,
    count: int | None = None,
) -> list[WindowGraph]:
    """Split ``g`` into half-open time windows aligned at the first timestamp.

    Exactly one of ``duration`` or ``count`` must be given. With ``count`` the
    span is divided into equal integer-length windows; the last window is
    closed on the right so that ``t_max`` is covered. Window importance is the
    fraction of all edges that fall inside it.
    """
    if (duration is None) == (count is None):
        raise ValueError("give exactly one of duration or count")
    if duration is not None and duration <= 0:
        raise ValueError("window duration must be positive")
    if count is not None and count < 1:
        raise ValueError("window count must be >= 1")
    if not len(g):
        return []
    t0, t1 = g.span
    if count is not None:
        duration = max(1, -(-(t1 - t0 + 1) // count))
        n_windows = count
    else:
        n_windows = (t1 - t0) // duration + 1
    total = len(g)
    starts = [t0 + i * duration for i in range(n_windows)]
    bounds = np.searchsorted(g.time, starts + [t0 + n_windows * duration], side="left")
    bounds[-1] = total
    windows = []
    for i in range(n_windows):
        lo, hi = int(bounds[i]), int(bounds[i + 1])
        mask = np.zeros(total, dtype=bool)
        mask[lo:hi] = True
        sub = g._subset(mask, frozenset())
        windows.append(
            WindowGraph(
                window_id=i,
                start=starts[i],
                end=starts[i] + duration,
                graph=sub,
                importance=(hi - lo) / total,
            )
        )
    return windows


def birth_times(g: TemporalGraph) -> dict[int, int]:
    """First incident timestamp of every non-isolated vertex."""
    births: dict[int, int] = {}
    # edges are time-sorted, so the first sighting wins
    for u, v, t in zip(g.src.tolist(), g.dst.tolist(), g.time.tolist()):
        if u not in births:
            births[u] = t
        if v not in births:
            births[v] = t
    return births


def graph_stats(g: TemporalGraph) -> dict:
    if len(g):
        pairs = np.unique(np.stack([g.src, g.dst], axis=1), axis=0)
        static = len(pairs)
    else:
        static = 0
    span = g.span or (0, 0)
    return {
        "num_vertices": len(g.vertices),
        "num_temporal_edges": len(g),
        "num_static_edges": static,
        "span": [int(span[0]), int(span[1])],
    }
