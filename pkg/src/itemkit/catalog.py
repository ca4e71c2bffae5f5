"""Atomic motif shapes, their automorphisms, orbits and temporal orderings."""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations
from typing import Iterable, Sequence

__all__ = [
    "AtomicMotif",
    "TemporalMotif",
    "MotifCatalog",
    "CatalogError",
    "default_catalog",
    "temporal_variants",
    "parse_catalog",
    "serialize_catalog",
    "role_automorphisms",
    "edge_automorphisms",
    "orbit_partition",
]

KINDS = ("fringe", "core", "residual")
MAX_ORDER = 4


class CatalogError(ValueError):
    pass


def role_automorphisms(order: int, edges: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Role permutations that map the edge multiset onto itself."""
    target = sorted(edges)
    return [
        p
        for p in permutations(range(order))
        if sorted((p[u], p[v]) for u, v in edges) == target
    ]


def edge_automorphisms(order: int, edges: Sequence[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Edge permutations induced by automorphisms.

    ``s`` is included when some role automorphism ``p`` sends template edge
    ``j`` onto template edge ``s[j]`` for every ``j``. Parallel template edges
    are interchangeable, so a multi-edge contributes its swaps here.
    """
    autos = role_automorphisms(order, edges)
    found = set()
    for s in permutations(range(len(edges))):
        for p in autos:
            if all(edges[s[j]] == (p[u], p[v]) for j, (u, v) in enumerate(edges)):
                found.add(s)
                break
    return sorted(found)


def orbit_partition(order: int, edges: Sequence[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    autos = role_automorphisms(order, edges)
    seen: set[int] = set()
    orbits = []
    for r in range(order):
        if r in seen:
            continue
        orb = tuple(sorted({p[r] for p in autos}))
        seen.update(orb)
        orbits.append(orb)
    return tuple(orbits)


def _connected(order: int, edges: Sequence[tuple[int, int]]) -> bool:
    if order <= 1:
        return True
    adj: dict[int, set[int]] = {r: set() for r in range(order)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    stack, seen = [0], {0}
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == order


@dataclass(frozen=True)
class AtomicMotif:
    """A small directed pattern over roles ``0..order-1``."""

    id: str
    order: int
    edges: tuple[tuple[int, int], ...]
    kind: str = "core"

    def __post_init__(self) -> None:
        if not 1 <= self.order <= MAX_ORDER:
            raise CatalogError(f"{self.id}: order must be between 1 and {MAX_ORDER}")
        if self.kind not in KINDS:
            raise CatalogError(f"{self.id}: unknown kind {self.kind!r}")
        for u, v in self.edges:
            if not (0 <= u < self.order and 0 <= v < self.order):
                raise CatalogError(f"{self.id}: edge ({u},{v}) uses an undeclared role")
        if not _connected(self.order, self.edges):
            raise CatalogError(f"{self.id}: edge template is disconnected")
        if self.kind == "residual" and (len(self.edges) != 1 or self.order != 2):
            raise CatalogError(f"{self.id}: residual motif must be a single edge on two roles")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        return orbit_partition(self.order, self.edges)

    @cached_property
    def role_orbit(self) -> tuple[int, ...]:
        out = [0] * self.order
        for i, orb in enumerate(self.orbits):
            for r in orb:
                out[r] = i
        return tuple(out)

    @property
    def isolation(self) -> str | None:
        """Fringe shapes matched by isolation rather than by enumeration."""
        if self.kind != "fringe":
            return None
        if self.order == 1 and not self.edges:
            return "isolated_vertex"
        if self.order == 2 and self.edges == ((0, 1),):
            return "isolated_edge"
        return None

    @cached_property
    def variants(self) -> tuple["TemporalMotif", ...]:
        return tuple(temporal_variants(self))


@dataclass(frozen=True)
class TemporalMotif:
    """An atomic motif with one canonical edge-arrival ordering.

    ``ranks[j]`` is the 1-based arrival rank of template edge ``j``.
    """

    atomic: AtomicMotif = field(repr=False)
    index: int
    ranks: tuple[int, ...]

    @property
    def id(self) -> str:
        return f"{self.atomic.id}.{self.index}"

    @property
    def by_rank(self) -> tuple[int, ...]:
        """Template edge indices in arrival order."""
        inv = [0] * len(self.ranks)
        for j, r in enumerate(self.ranks):
            inv[r - 1] = j
        return tuple(inv)


def temporal_variants(m: AtomicMotif) -> list[TemporalMotif]:
    """Edge orderings of ``m`` up to automorphism.

    Each class is represented by its lexicographically smallest rank tuple and
    classes are numbered in that order.
    """
    if not m.edges:
        raise CatalogError(f"no temporal variants for edgeless motif {m.id}")
    group = edge_automorphisms(m.order, m.edges)
    k = len(m.edges)
    canon = set()
    for perm in permutations(range(1, k + 1)):
        images = []
        for s in group:
            img = [0] * k
            for j in range(k):
                img[s[j]] = perm[j]
            images.append(tuple(img))
        canon.add(min(images))
    return [TemporalMotif(m, i, r) for i, r in enumerate(sorted(canon))]


def _default_order(motifs: Sequence[AtomicMotif]) -> tuple[str, ...]:
    fringe = [m for m in motifs if m.kind == "fringe"]
    # unmatched-by-isolation fringe shapes keep file order after the isolation ones
    fringe.sort(key=lambda m: 0 if m.isolation else 1)
    core = sorted(
        (m for m in motifs if m.kind == "core"),
        key=lambda m: (-m.num_edges, m.order),
    )
    residual = [m for m in motifs if m.kind == "residual"]
    return tuple(m.id for m in fringe + core + residual)


@dataclass(frozen=True)
class MotifCatalog:
    motifs: tuple[AtomicMotif, ...]
    search_order: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ids = [m.id for m in self.motifs]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise CatalogError(f"duplicate motif id(s): {', '.join(dup)}")
        residual = [m for m in self.motifs if m.kind == "residual"]
        if not residual:
            raise CatalogError("catalog has no residual motif (m15)")
        if len(residual) > 1:
            raise CatalogError("catalog has more than one residual motif")
        if not self.search_order:
            object.__setattr__(self, "search_order", _default_order(self.motifs))
        order = self.search_order
        if sorted(order) != sorted(ids):
            raise CatalogError("search order must list every motif exactly once")
        if order[-1] != residual[0].id:
            raise CatalogError("the residual motif must come last in the search order")
        first_core = min(
            (i for i, mid in enumerate(order) if self[mid].kind == "core"), default=len(order)
        )
        for i, mid in enumerate(order):
            if self[mid].isolation and i > first_core:
                raise CatalogError(f"{mid} must be searched before every core motif")

    def __getitem__(self, motif_id: str) -> AtomicMotif:
        for m in self.motifs:
            if m.id == motif_id:
                return m
        raise KeyError(motif_id)

    def __iter__(self):
        return iter(self.motifs)

    def __len__(self) -> int:
        return len(self.motifs)

    @property
    def ids(self) -> list[str]:
        return [m.id for m in self.motifs]

    @property
    def residual(self) -> AtomicMotif:
        return next(m for m in self.motifs if m.kind == "residual")

    def reordered(self, order: Sequence[str]) -> "MotifCatalog":
        return MotifCatalog(self.motifs, tuple(order))

    def digest(self) -> str:
        return hashlib.sha256(serialize_catalog(self).encode("utf-8")).hexdigest()


_DEFAULT_SHAPES: list[tuple[str, int, list[tuple[int, int]], str]] = [
    ("m1", 1, [], "fringe"),  # isolated vertex
    ("m2", 2, [(0, 1)], "fringe"),  # isolated edge
    ("m3", 1, [(0, 0)], "fringe"),  # self-loop
    ("m4", 2, [(0, 1), (0, 1)], "fringe"),  # multi-edge
    ("m5", 3, [(0, 1), (1, 2), (2, 0)], "core"),  # cyclic triangle
    ("m6", 3, [(0, 1), (1, 2), (0, 2)], "core"),  # feed-forward triangle
    ("m7", 4, [(0, 1), (1, 2), (2, 0), (0, 3)], "core"),  # tailed triangle
    ("m8", 4, [(0, 1), (1, 2), (2, 3), (3, 0)], "core"),  # 4-cycle
    ("m9", 4, [(0, 2), (0, 3), (1, 2), (1, 3)], "core"),  # bi-fan
    ("m10", 4, [(1, 0), (2, 0), (3, 0)], "core"),  # in-star
    ("m11", 4, [(0, 1), (0, 2), (0, 3)], "core"),  # out-star
    ("m12", 3, [(0, 1), (0, 2)], "core"),  # divergent wedge
    ("m13", 3, [(0, 2), (1, 2)], "core"),  # convergent wedge
    ("m14", 3, [(0, 1), (1, 2)], "core"),  # 2-path
    ("m15", 2, [(0, 1)], "residual"),  # residual edge
]


def default_catalog() -> MotifCatalog:
    """The fifteen built-in motifs, searched fringe first and residual last."""
    motifs = tuple(AtomicMotif(i, d, tuple(e), k) for i, d, e, k in _DEFAULT_SHAPES)
    return MotifCatalog(motifs)


# -- text format -----------------------------------------------------------


def serialize_catalog(cat: MotifCatalog) -> str:
    out = io.StringIO()
    for m in cat.motifs:
        out.write(f"motif {m.id} vertices={m.order}\n")
        for u, v in m.edges:
            out.write(f"edge {u} {v}\n")
        out.write(f"kind={m.kind}\n\n")
    out.write("search_order " + " ".join(cat.search_order) + "\n")
    return out.getvalue()


def parse_catalog(source) -> MotifCatalog:
    """Parse the block format written by :func:`serialize_catalog`.

    Orbits and variants are always derived from the edge lines. A missing
    ``search_order`` line falls back to the default ordering rule.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")

    blocks: list[dict] = []
    order: tuple[str, ...] = ()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "motif":
                mid = rest[0]
                opts = dict(tok.split("=", 1) for tok in rest[1:])
                blocks.append({"id": mid, "order": int(opts["vertices"]), "edges": [], "kind": "core"})
            elif head == "edge":
                blocks[-1]["edges"].append((int(rest[0]), int(rest[1])))
            elif head.startswith("kind="):
                blocks[-1]["kind"] = head.split("=", 1)[1]
            elif head == "search_order":
                order = tuple(rest)
            else:
                raise CatalogError(f"line {line_no}: unrecognised directive {head!r}")
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, CatalogError):
                raise
            raise CatalogError(f"line {line_no}: malformed catalog line {raw!r}") from None
    motifs = tuple(AtomicMotif(b["id"], b["order"], tuple(b["edges"]), b["kind"]) for b in blocks)
    return MotifCatalog(motifs, order)


def load_catalog(path: str) -> MotifCatalog:
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(fh.read())


def catalog_from_ids(ids: Iterable[str]) -> MotifCatalog:
    base = default_catalog()
    wanted = list(ids)
    return MotifCatalog(tuple(base[i] for i in wanted))
