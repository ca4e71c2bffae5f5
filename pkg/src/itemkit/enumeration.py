"""Overlapping (F1) enumeration of temporal motif instances."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations

from .catalog import AtomicMotif, TemporalMotif
from .graph import TemporalGraph

__all__ = [
    "MotifInstance",
    "EnumerationConfig",
    "InstanceLimitExceeded",
    "GraphTooLarge",
    "find_instances",
    "find_fringe",
    "brute_force_instances",
    "DEFAULT_MAX_INSTANCES",
]

DEFAULT_MAX_INSTANCES = 10_000_000
BRUTE_FORCE_LIMIT = 30
_EDGE = ((0, 1),)


class InstanceLimitExceeded(RuntimeError):
    def __init__(self, motif_id: str, count: int, limit: int):
        super().__init__(
            f"{motif_id}: more than {limit} overlapping instances (stopped at {count}); "
            "restrict delta or use smaller windows"
        )
        self.motif_id = motif_id
        self.count = count
        self.limit = limit


class GraphTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationConfig:
    delta: int | None = None
    max_instances: int | None = DEFAULT_MAX_INSTANCES

    def __post_init__(self) -> None:
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.max_instances is not None and self.max_instances < 1:
            raise ValueError("max_instances must be >= 1")


@dataclass(frozen=True, slots=True)
class MotifInstance:
    """A binding of one temporal motif to graph edges.

    ``vertices[r]`` is the vertex playing role ``r``; ``edges`` and ``times``
    are in arrival-rank order and ``pattern`` holds the template role pair of
    each rank (shared between instances of one variant). ``variant`` is -1
    for edgeless instances.
    """

    motif_id: str
    variant: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    times: tuple[int, ...]
    pattern: tuple[tuple[int, int], ...] = field(default=(), compare=False, repr=False)

    @property
    def label(self) -> str:
        if not self.edges:
            return "v" + "-".join(map(str, self.vertices))
        return "-".join(map(str, self.edges))

    @property
    def t_first(self) -> int | None:
        return self.times[0] if self.times else None

    @property
    def t_last(self) -> int | None:
        return self.times[-1] if self.times else None

    @property
    def duration(self) -> int:
        return self.times[-1] - self.times[0] if self.times else 0

    @property
    def endpoints(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[a], vs[b]) for a, b in self.pattern]

    def sort_key(self) -> tuple:
        return (self.times[-1] if self.times else -1, self.label)


def _plan(t: TemporalMotif) -> list[tuple]:
    """Processing order for the join.

    Template edges are taken in arrival rank, except that the next edge must
    touch an already bound role so that candidates come from adjacency lists.
    Each step records which earlier steps bound its rank neighbours.
    """
    tmpl = t.atomic.edges
    ranks = t.ranks
    todo = list(t.by_rank)
    steps: list[int] = [todo.pop(0)]
    bound = set(tmpl[steps[0]])
    while todo:
        nxt = next((j for j in todo if tmpl[j][0] in bound or tmpl[j][1] in bound), todo[0])
        todo.remove(nxt)
        steps.append(nxt)
        bound.update(tmpl[nxt])

    plan = []
    seen_roles: set[int] = set()
    for s, j in enumerate(steps):
        a, b = tmpl[j]
        r = ranks[j]
        earlier = [(ranks[steps[q]], q) for q in range(s)]
        below = [x for x in earlier if x[0] < r]
        above = [x for x in earlier if x[0] > r]
        lo = max(below)[1] if below else -1
        hi = min(above)[1] if above else -1
        plan.append((j, a, b, a in seen_roles, b in seen_roles, lo, hi, r - 1))
        seen_roles.update((a, b))
    return plan


def find_instances(
    g: TemporalGraph,
    t: TemporalMotif,
    cfg: EnumerationConfig | None = None,
) -> list[MotifInstance]:
    """All instances of ``t`` in ``g``, sorted by (t_last, label).

    Arrival order is (time, edge id), so equal timestamps count as ordered by
    load order. Distinct roles bind distinct vertices and self-loop edges only
    match self-loop template edges.
    """
    cfg = cfg or EnumerationConfig()
    atomic = t.atomic
    m = atomic.num_edges
    if m == 0 or not len(g):
        return []
    idx = g.index
    src, dst, time, eid = idx.src, idx.dst, idx.time, idx.eid
    out_adj, in_adj, pair_adj, loop_adj = idx.out, idx.inc, idx.pair, idx.loops
    plan = _plan(t)
    delta = cfg.delta
    limit = cfg.max_instances
    motif_id = atomic.id
    variant = t.index
    pattern = tuple(atomic.edges[j] for j in t.by_rank)

    role = [-1] * atomic.order
    ok = [0] * m  # okey chosen at each step
    by_rank = [0] * m
    tlo = [0] * (m + 1)  # running min / max time
    thi = [0] * (m + 1)
    bound_vertices: set[int] = set()
    found: list[MotifInstance] = []
    empty: list[int] = []
    big = len(src)

    def emit() -> None:
        if limit is not None and len(found) >= limit:
            raise InstanceLimitExceeded(motif_id, len(found), limit)
        eids = tuple(eid[k] for k in by_rank)
        found.append(
            MotifInstance(
                motif_id, variant, tuple(role), eids, tuple(time[k] for k in by_rank), pattern
            )
        )

    def extend(s: int) -> None:
        if s == m:
            emit()
            return
        _, a, b, a_bound, b_bound, lo_s, hi_s, rpos = plan[s]
        lo = ok[lo_s] + 1 if lo_s >= 0 else 0
        hi = ok[hi_s] if hi_s >= 0 else big
        if a == b:
            cands = loop_adj.get(role[a], empty) if a_bound else idx.all_loops
            new_role = -1 if a_bound else a
            side = 0
        elif a_bound and b_bound:
            cands = pair_adj.get((role[a], role[b]), empty)
            new_role, side = -1, 0
        elif a_bound:
            cands = out_adj.get(role[a], empty)
            new_role, side = b, 2
        elif b_bound:
            cands = in_adj.get(role[b], empty)
            new_role, side = a, 1
        else:
            cands = idx.plain
            new_role, side = -1, 3
        if not cands:
            return
        if s:
            tmin, tmax = tlo[s], thi[s]
        for pos in range(bisect_left(cands, lo), len(cands)):
            k = cands[pos]
            if k >= hi:
                break
            tk = time[k]
            if delta is not None and s:
                if tk - tmin > delta:
                    break
                if tmax - tk > delta:
                    continue
            if side == 2:
                w = dst[k]
                if w in bound_vertices:
                    continue
            elif side == 1:
                w = src[k]
                if w in bound_vertices:
                    continue
            elif side == 3:
                u, w = src[k], dst[k]
                role[a] = u
                role[b] = w
                bound_vertices.add(u)
                bound_vertices.add(w)
            elif new_role >= 0:
                w = src[k]
                if w in bound_vertices:
                    continue
                role[a] = w
                bound_vertices.add(w)
            if side in (1, 2):
                role[new_role] = w
                bound_vertices.add(w)
            ok[s] = k
            by_rank[rpos] = k
            if s:
                tlo[s + 1] = tmin if tmin < tk else tk
                thi[s + 1] = tmax if tmax > tk else tk
            else:
                tlo[1] = thi[1] = tk
            extend(s + 1)
            if side in (1, 2):
                bound_vertices.discard(w)
                role[new_role] = -1
            elif side == 3:
                bound_vertices.discard(u)
                bound_vertices.discard(w)
                role[a] = role[b] = -1
            elif new_role >= 0:
                bound_vertices.discard(w)
                role[a] = -1

    extend(0)
    found.sort(key=MotifInstance.sort_key)
    return found


def find_fringe(
    g: TemporalGraph,
    kind: str,
    motif_id: str | None = None,
) -> list[MotifInstance]:
    """Isolated vertices or isolated edges of ``g``.

    An isolated edge is a non-loop edge whose endpoints touch no other edge;
    a self-loop at an endpoint counts as another edge.
    """
    if kind == "isolated_vertex":
        mid = motif_id or "m1"
        ends = set(g.src.tolist()) | set(g.dst.tolist())
        return [MotifInstance(mid, -1, (v,), (), ()) for v in sorted(g.isolated - ends)]
    if kind != "isolated_edge":
        raise ValueError(f"unknown fringe kind {kind!r}")
    mid = motif_id or "m2"
    deg: dict[int, int] = {}
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    found = [
        MotifInstance(mid, 0, (e.src, e.dst), (e.eid,), (e.time,), _EDGE)
        for e in g.edges
        if e.src != e.dst and deg[e.src] == 1 and deg[e.dst] == 1
    ]
    found.sort(key=MotifInstance.sort_key)
    return found


def brute_force_instances(
    g: TemporalGraph,
    t: TemporalMotif,
    cfg: EnumerationConfig | None = None,
) -> list[MotifInstance]:
    """Reference enumeration over every edge subset of size |E(t)|.

    Refuses graphs with more than 30 edges.
    """
    if len(g) > BRUTE_FORCE_LIMIT:
        raise GraphTooLarge(f"brute force limited to {BRUTE_FORCE_LIMIT} edges, graph has {len(g)}")
    cfg = cfg or EnumerationConfig()
    atomic: AtomicMotif = t.atomic
    tmpl = atomic.edges
    edges = sorted(g.edges, key=lambda e: (e.time, e.eid))
    rank_tmpl = [tmpl[j] for j in t.by_rank]
    found = []
    for combo in combinations(edges, len(tmpl)):
        # combinations keep arrival order, so combo[r] is the rank-r edge
        if cfg.delta is not None and combo[-1].time - combo[0].time > cfg.delta:
            continue
        binding: dict[int, int] = {}
        good = True
        for (a, b), e in zip(rank_tmpl, combo):
            for r, v in ((a, e.src), (b, e.dst)):
                if binding.setdefault(r, v) != v:
                    good = False
                    break
            if not good:
                break
        if not good or len(set(binding.values())) != len(binding):
            continue
        found.append(
            MotifInstance(
                atomic.id,
                t.index,
                tuple(binding[r] for r in range(atomic.order)),
                tuple(e.eid for e in combo),
                tuple(e.time for e in combo),
                tuple(rank_tmpl),
            )
        )
    found.sort(key=MotifInstance.sort_key)
    return found
