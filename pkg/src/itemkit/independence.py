"""Edge-disjoint instance selection and the sequential extraction pipeline."""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

from .catalog import MotifCatalog
from .enumeration import (
    EnumerationConfig,
    InstanceLimitExceeded,
    MotifInstance,
    find_fringe,
    find_instances,
)
from .graph import TemporalGraph

__all__ = [
    "OverlapGraph",
    "MotifResult",
    "ITeMResult",
    "SelectionRefused",
    "build_overlap_graph",
    "select_independent",
    "extract_items",
    "extract_many",
    "instance_structural_contribution",
    "orbit_occupancy",
    "vertex_orbit_counts",
    "EXACT_LIMIT",
]

EXACT_LIMIT = 40
MODES = {
    "greedy": "greedy_temporal",
    "greedy_temporal": "greedy_temporal",
    "luby": "luby_random",
    "luby_random": "luby_random",
    "exact": "exact",
}


class SelectionRefused(ValueError):
    pass


@dataclass
class OverlapGraph:
    """Instances as vertices, joined when they share a temporal edge.

    The graph is kept in bucket form: ``edge_map`` sends each shared key (a
    temporal edge id) to the labels containing it, and ``members`` is the
    inverse. Pairwise edges are only materialised on demand, since one busy
    temporal edge in k instances implies k*(k-1)/2 overlap edges.
    """

    vertices: list[str]
    edge_map: dict[Hashable, list[str]]
    members: dict[str, tuple]
    priority: dict[str, tuple] = field(default_factory=dict)

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str]],
        priority: dict[str, tuple] | None = None,
    ) -> "OverlapGraph":
        """Wrap an abstract simple graph; each edge becomes its own bucket."""
        verts = list(dict.fromkeys(vertices))
        em: dict[Hashable, list[str]] = {}
        mem: dict[str, list] = {v: [] for v in verts}
        for i, (a, b) in enumerate(edges):
            if a == b:
                continue
            em[i] = [a, b]
            mem[a].append(i)
            mem[b].append(i)
        return cls(verts, em, {k: tuple(v) for k, v in mem.items()}, dict(priority or {}))

    @cached_property
    def edges(self) -> set[tuple[str, str]]:
        out = set()
        for labels in self.edge_map.values():
            for i, a in enumerate(labels):
                for b in labels[i + 1:]:
                    if a != b:
                        out.add((a, b) if a < b else (b, a))
        return out

    def neighbors(self, v: str) -> set[str]:
        out = set()
        for key in self.members.get(v, ()):
            out.update(self.edge_map[key])
        out.discard(v)
        return out

    def key(self, v: str) -> tuple:
        return self.priority.get(v, (v,))


def build_overlap_graph(instances: Sequence[MotifInstance]) -> OverlapGraph:
    em: dict[int, list[str]] = defaultdict(list)
    members: dict[str, tuple] = {}
    priority: dict[str, tuple] = {}
    verts: list[str] = []
    for inst in instances:
        lab = inst.label
        if lab in members:
            continue
        verts.append(lab)
        members[lab] = inst.edges
        priority[lab] = inst.sort_key()
        for e in inst.edges:
            em[e].append(lab)
    return OverlapGraph(verts, dict(em), members, priority)


# -- selection ---------------------------------------------------------------


def _greedy(h: OverlapGraph) -> set[str]:
    blocked: set = set()
    chosen = set()
    for v in sorted(h.vertices, key=h.key):
        keys = h.members.get(v, ())
        if any(k in blocked for k in keys):
            continue
        chosen.add(v)
        blocked.update(keys)
    return chosen


def _luby(h: OverlapGraph, seed) -> set[str]:
    rng = random.Random(seed)
    order = sorted(h.vertices)
    active = set(order)
    live = {k: labs for k, labs in h.edge_map.items() if len(labs) > 1}
    chosen: set[str] = set()
    while active:
        order = [v for v in order if v in active]
        pri = {v: (rng.random(), v) for v in order}
        winners = set(order)
        dead = []
        for k, labs in live.items():
            act = [v for v in labs if v in active]
            if len(act) < 2:
                dead.append(k)
                continue
            low = min(act, key=pri.__getitem__)
            winners.difference_update(v for v in act if v != low)
        for k in dead:
            del live[k]
        chosen |= winners
        for v in winners:
            active.discard(v)
            for k in h.members.get(v, ()):
                for u in h.edge_map[k]:
                    active.discard(u)
    return chosen


def _components(h: OverlapGraph) -> list[list[str]]:
    seen: set[str] = set()
    comps = []
    for v in sorted(h.vertices):
        if v in seen:
            continue
        seen.add(v)
        comp, stack = [], [v]
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in h.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def _max_independent_mask(adj: list[int], n: int) -> int:
    best = [0, 0]  # size, mask

    def rec(cand: int, cur: int, size: int) -> None:
        if size + cand.bit_count() <= best[0]:
            return
        if not cand:
            best[0], best[1] = size, cur
            return
        # a vertex of degree <= 1 inside cand can always be taken
        pick, pick_deg, hub, hub_deg = -1, 99, -1, -1
        c = cand
        while c:
            low = c & -c
            v = low.bit_length() - 1
            c ^= low
            d = (adj[v] & cand).bit_count()
            if d < pick_deg:
                pick, pick_deg = v, d
            if d > hub_deg:
                hub, hub_deg = v, d
        if pick_deg <= 1:
            rec(cand & ~adj[pick] & ~(1 << pick), cur | (1 << pick), size + 1)
            return
        rec(cand & ~adj[hub] & ~(1 << hub), cur | (1 << hub), size + 1)
        rec(cand & ~(1 << hub), cur, size)

    rec((1 << n) - 1, 0, 0)
    return best[1]


def _exact(h: OverlapGraph) -> set[str]:
    chosen: set[str] = set()
    for comp in _components(h):
        if len(comp) > EXACT_LIMIT:
            raise SelectionRefused(
                f"exact selection handles overlap components of at most {EXACT_LIMIT} "
                f"instances, found {len(comp)}"
            )
        pos = {v: i for i, v in enumerate(comp)}
        adj = [0] * len(comp)
        for v in comp:
            for u in h.neighbors(v):
                adj[pos[v]] |= 1 << pos[u]
        mask = _max_independent_mask(adj, len(comp))
        chosen.update(v for v in comp if mask >> pos[v] & 1)
    return chosen


def select_independent(h: OverlapGraph, mode: str = "greedy_temporal", seed=0) -> set[str]:
    """A maximal independent set of ``h``.

    ``greedy_temporal`` scans vertices by priority (earliest completing
    instance first). ``luby_random`` runs rounds of random priorities seeded by
    ``seed``. ``exact`` returns a maximum independent set by branch and bound,
    one connected component at a time.
    """
    mode = MODES.get(mode, mode)
    if mode == "greedy_temporal":
        return _greedy(h)
    if mode == "luby_random":
        return _luby(h, seed)
    if mode == "exact":
        return _exact(h)
    raise ValueError(f"unknown selection mode {mode!r}")


# -- pipeline ----------------------------------------------------------------


@dataclass
class MotifResult:
    motif_id: str
    order: int
    kind: str
    selected: list[MotifInstance]
    overlap_count: int
    variant_overlap: list[int]
    variant_selected: list[int]

    @property
    def item_count(self) -> int:
        return len(self.selected)

    @cached_property
    def unique_vertices(self) -> int:
        return len({v for inst in self.selected for v in inst.vertices})

    @property
    def dm(self) -> float:
        if not self.overlap_count:
            return 0.0
        return self.item_count / self.overlap_count

    @property
    def dv(self) -> float:
        if not self.overlap_count:
            return 0.0
        return self.unique_vertices / (self.overlap_count * self.order)


@dataclass
class ITeMResult:
    motifs: dict[str, MotifResult]
    num_edges: int
    residual_id: str
    mode: str = "greedy_temporal"

    @property
    def residual_count(self) -> int:
        return self.motifs[self.residual_id].item_count

    def instances(self) -> Iterator[MotifInstance]:
        for res in self.motifs.values():
            yield from res.selected

    @property
    def consumed(self) -> dict[str, list[int]]:
        return {
            mid: sorted(e for inst in res.selected for e in inst.edges)
            for mid, res in self.motifs.items()
        }


def _seed_for(seed, motif_id: str) -> str:
    return f"{seed}:{motif_id}"


def extract_items(
    g: TemporalGraph,
    catalog: MotifCatalog,
    cfg: EnumerationConfig | None = None,
    mode: str = "greedy_temporal",
    seed=0,
) -> ITeMResult:
    """Independent temporal motif instances of ``g``.

    Motifs are processed in ``catalog.search_order``. For each one every
    temporal variant is enumerated on the edges not yet consumed, the pooled
    instances are reduced to an edge-disjoint set, and the chosen edges are
    removed before the next motif. Whatever is left at the end becomes
    residual instances.
    """
    cfg = cfg or EnumerationConfig()
    mode = MODES.get(mode, mode)
    if mode not in MODES.values():
        raise ValueError(f"unknown selection mode {mode!r}")
    remainder = g
    out: dict[str, MotifResult] = {}
    for mid in catalog.search_order:
        m = catalog[mid]
        n_var = len(m.variants) if m.edges else 0
        var_over = [0] * n_var
        if m.kind == "residual":
            idx = remainder.index
            chosen = [
                MotifInstance(
                    mid, 0, (idx.src[k], idx.dst[k]), (idx.eid[k],), (idx.time[k],), ((0, 1),)
                )
                for k in range(len(idx))
            ]
            chosen.sort(key=MotifInstance.sort_key)
            var_over = [len(chosen)]
            pool_size = len(chosen)
        elif m.isolation:
            found = find_fringe(g, m.isolation, motif_id=mid)
            if m.isolation == "isolated_edge" and len(remainder) != len(g):
                alive = set(remainder.eid.tolist())
                found = [i for i in found if i.edges[0] in alive]
            chosen = found
            pool_size = len(found)
            if n_var:
                var_over = [pool_size]
        else:
            pool: list[MotifInstance] = []
            for v in m.variants:
                try:
                    found = find_instances(remainder, v, cfg)
                except InstanceLimitExceeded as exc:
                    raise InstanceLimitExceeded(v.id, exc.count, exc.limit) from None
                var_over[v.index] = len(found)
                pool.extend(found)
                if cfg.max_instances is not None and len(pool) > cfg.max_instances:
                    raise InstanceLimitExceeded(mid, len(pool), cfg.max_instances)
            pool.sort(key=MotifInstance.sort_key)
            pool_size = len(pool)
            h = build_overlap_graph(pool)
            keep = select_independent(h, mode, _seed_for(seed, mid))
            chosen = [inst for inst in pool if inst.label in keep]
        var_sel = [0] * n_var
        for inst in chosen:
            if inst.variant >= 0:
                var_sel[inst.variant] += 1
        out[mid] = MotifResult(mid, m.order, m.kind, chosen, pool_size, var_over, var_sel)
        used = [e for inst in chosen for e in inst.edges]
        if used:
            remainder = remainder.remove_edges(used)
    return ITeMResult(out, len(g), catalog.residual.id, mode)


def _extract_job(args) -> ITeMResult:
    g, catalog, cfg, mode, seed = args
    return extract_items(g, catalog, cfg, mode, seed)


def extract_many(
    graphs: Sequence[TemporalGraph],
    catalog: MotifCatalog,
    cfg: EnumerationConfig | None = None,
    mode: str = "greedy_temporal",
    seed=0,
    threads: int = 1,
) -> list[ITeMResult]:
    """Run :func:`extract_items` on independent graphs, results in input order."""
    jobs = [(g, catalog, cfg, mode, seed) for g in graphs]
    if threads <= 1 or len(jobs) <= 1:
        return [_extract_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(_extract_job, jobs, chunksize=1))


# -- per-instance measures --------------------------------------------------------


def instance_structural_contribution(inst: MotifInstance, births: dict[int, int]) -> dict[str, int]:
    """Edges added, and vertices born, by one instance.

    A bound vertex is new when its birth time equals the time of the first
    instance edge touching it.
    """
    first: dict[int, int] = {}
    for (u, v), t in zip(inst.endpoints, inst.times):
        first.setdefault(u, t)
        first.setdefault(v, t)
    new_vertices = sum(1 for v, t in first.items() if births.get(v) == t)
    return {"new_vertices": new_vertices, "new_edges": len(inst.edges)}


def orbit_occupancy(result: ITeMResult, catalog: MotifCatalog) -> dict[tuple[str, int], int]:
    counts: Counter = Counter()
    for mid, res in result.motifs.items():
        role_orbit = catalog[mid].role_orbit
        for inst in res.selected:
            for r in range(len(inst.vertices)):
                counts[(mid, role_orbit[r])] += 1
    return dict(counts)


def vertex_orbit_counts(result: ITeMResult, catalog: MotifCatalog) -> dict[int, Counter]:
    per: dict[int, Counter] = defaultdict(Counter)
    for mid, res in result.motifs.items():
        role_orbit = catalog[mid].role_orbit
        for inst in res.selected:
            for r, v in enumerate(inst.vertices):
                per[v][(mid, role_orbit[r])] += 1
    return dict(per)
