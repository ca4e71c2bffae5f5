import random
from itertools import combinations

import pytest

from itemkit import (
    EnumerationConfig,
    MotifCatalog,
    OverlapGraph,
    SelectionRefused,
    build_overlap_graph,
    default_catalog,
    extract_items,
    find_instances,
    instance_structural_contribution,
    orbit_occupancy,
    select_independent,
)
from itemkit.catalog import catalog_from_ids
from itemkit.independence import EXACT_LIMIT, vertex_orbit_counts

from conftest import graph, random_graph

CAT = default_catalog()
MODES = ("greedy_temporal", "luby_random", "exact")


def _pool(g, mid):
    return [i for v in CAT[mid].variants for i in find_instances(g, v)]


def _is_independent(h, s):
    return all(not (h.neighbors(v) & s) for v in s)


def _is_maximal(h, s):
    return all(v in s or h.neighbors(v) & s for v in h.vertices)


def _ref_max(h):
    """Largest independent set size by exhaustive search (small graphs only)."""
    vs = list(h.vertices)
    edges = h.edges
    for k in range(len(vs), 0, -1):
        for combo in combinations(vs, k):
            if not any((a, b) in edges or (b, a) in edges for a, b in combinations(combo, 2)):
                return k
    return 0


def test_triangles_sharing_an_edge():
    g = graph((1, 2, 10), (2, 3, 20), (3, 1, 30), (3, 4, 35), (4, 2, 40))
    h = build_overlap_graph(_pool(g, "m5"))
    assert len(h.vertices) == 2
    assert len(h.edges) == 1


def test_disjoint_instances_no_overlap():
    g = graph((1, 2, 1), (2, 3, 2), (3, 1, 3), (4, 5, 4), (5, 6, 5), (6, 4, 6))
    h = build_overlap_graph(_pool(g, "m5"))
    assert len(h.vertices) == 2 and not h.edges


def test_three_instances_on_one_edge_form_triangle():
    g = graph((1, 2, 1), (2, 3, 2), (2, 4, 3), (2, 5, 4))
    pool = [i for i in _pool(g, "m14") if 0 in i.edges]
    h = build_overlap_graph(pool)
    assert len(h.vertices) == 3 and len(h.edges) == 3


def test_edgeless_overlap_graph_selects_all():
    h = OverlapGraph.from_edges("abcd", [])
    for mode in MODES:
        assert select_independent(h, mode) == set("abcd")


def test_single_edge_greedy_prefers_earlier():
    h = OverlapGraph.from_edges("ab", [("a", "b")], {"a": (1, "a"), "b": (2, "b")})
    assert select_independent(h, "greedy_temporal") == {"a"}


def test_five_cycle():
    h = OverlapGraph.from_edges("abcde", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")])
    assert _ref_max(h) == 2
    for mode in MODES:
        s = select_independent(h, mode, seed=4)
        assert len(s) == 2 and _is_independent(h, s) and _is_maximal(h, s)


def test_exact_matches_exhaustive_reference():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 11)
        vs = [f"v{i}" for i in range(n)]
        es = [(a, b) for a, b in combinations(vs, 2) if rng.random() < 0.35]
        h = OverlapGraph.from_edges(vs, es)
        s = select_independent(h, "exact")
        assert _is_independent(h, s) and len(s) == _ref_max(h)


def test_exact_refuses_large_components():
    vs = [f"v{i}" for i in range(EXACT_LIMIT + 1)]
    h = OverlapGraph.from_edges(vs, list(zip(vs, vs[1:])))
    with pytest.raises(SelectionRefused):
        select_independent(h, "exact")


def test_luby_is_seeded():
    rng = random.Random(2)
    vs = [f"v{i}" for i in range(30)]
    es = [(a, b) for a, b in combinations(vs, 2) if rng.random() < 0.2]
    h = OverlapGraph.from_edges(vs, es)
    assert select_independent(h, "luby", seed=1) == select_independent(h, "luby", seed=1)


def test_motif_independence_half():
    g = graph((1, 2, 10), (2, 3, 20), (3, 1, 30), (3, 4, 35), (4, 2, 40))
    res = extract_items(g, catalog_from_ids(["m5", "m15"]))
    m5 = res.motifs["m5"]
    assert m5.overlap_count == 2 and m5.item_count == 1
    assert m5.dm == 0.5
    assert res.residual_count == 2


def test_disjoint_triangles_saturate_ratios():
    k = 4
    rows = []
    for i in range(k):
        a, b, c = 3 * i, 3 * i + 1, 3 * i + 2
        rows += [(a, b, 10 * i + 1), (b, c, 10 * i + 2), (c, a, 10 * i + 3)]
    res = extract_items(graph(*rows), CAT)
    m5 = res.motifs["m5"]
    assert m5.item_count == k
    assert m5.dm == 1.0 and m5.dv == 1.0


def test_default_order_prefers_tailed_triangle():
    g = graph((1, 2, 10), (2, 3, 20), (3, 1, 30), (3, 4, 35), (4, 2, 40))
    res = extract_items(g, CAT)
    assert res.motifs["m7"].item_count == 1


def test_pipeline_disjoint_and_conserving():
    rng = random.Random(5)
    for mode in ("greedy", "luby"):
        g = random_graph(rng, 12, 150, 60)
        res = extract_items(g, CAT, mode=mode, seed=3)
        used = [e for inst in res.instances() for e in inst.edges]
        assert len(used) == len(set(used)) == len(g)


def test_isolated_fringe_uses_initial_graph():
    g = graph((1, 2, 5), (3, 4, 6), (4, 5, 7), isolated=[9])
    res = extract_items(g, CAT)
    assert res.motifs["m1"].item_count == 1
    assert res.motifs["m2"].item_count == 1
    assert res.motifs["m2"].selected[0].edges == (0,)


def test_residual_only_graph_rerun_has_no_core_motifs():
    rng = random.Random(9)
    g = random_graph(rng, 8, 60, 30)
    res = extract_items(g, CAT)
    left = [inst.edges[0] for inst in res.motifs["m15"].selected]
    rest = g.remove_edges(set(g.eid.tolist()) - set(left))
    again = extract_items(rest, CAT)
    for m in CAT:
        if m.kind == "core":
            assert again.motifs[m.id].item_count == 0


def test_structural_contribution_examples():
    fresh = graph((1, 2, 10), (2, 3, 20), (3, 1, 30))
    (inst,) = _pool(fresh, "m5")
    births = {1: 10, 2: 10, 3: 20}
    assert instance_structural_contribution(inst, births) == {"new_vertices": 3, "new_edges": 3}
    # vertices 1 and 2 existed before the triangle started
    old = graph((1, 2, 1), (1, 2, 10), (2, 3, 20), (3, 1, 30))
    births = {1: 1, 2: 1, 3: 20}
    tri = [i for i in _pool(old, "m5") if 0 not in i.edges][0]
    assert instance_structural_contribution(tri, births)["new_vertices"] == 1


def test_orbit_occupancy_in_star():
    g = graph((1, 0, 1), (2, 0, 2), (3, 0, 3))
    res = extract_items(g, catalog_from_ids(["m10", "m15"]))
    occ = orbit_occupancy(res, catalog_from_ids(["m10", "m15"]))
    hub = CAT["m10"].role_orbit[0]
    leaf = CAT["m10"].role_orbit[1]
    assert occ[("m10", hub)] == 1 and occ[("m10", leaf)] == 3
    empty = extract_items(graph(), catalog_from_ids(["m10", "m15"]))
    assert orbit_occupancy(empty, catalog_from_ids(["m10", "m15"])) == {}


def test_two_path_middle_orbit_counts():
    cat = catalog_from_ids(["m14", "m15"])
    g = graph((1, 2, 1), (2, 3, 2), (4, 2, 3), (2, 5, 4))
    res = extract_items(g, cat)
    counts = vertex_orbit_counts(res, cat)
    middle = CAT["m14"].role_orbit[1]
    assert res.motifs["m14"].item_count == 2
    assert counts[2][("m14", middle)] == 2


def test_metric_bounds():
    rng = random.Random(13)
    for _ in range(10):
        res = extract_items(random_graph(rng, 7, 40, 25), CAT)
        for m in res.motifs.values():
            assert 0.0 <= m.dm <= 1.0 and 0.0 <= m.dv <= 1.0


def test_dm_is_one_exactly_when_overlap_graph_is_edgeless():
    rng = random.Random(17)
    for _ in range(20):
        g = random_graph(rng, 6, 20, 15, loops=False)
        for mid in ("m5", "m12", "m14"):
            pool = _pool(g, mid)
            if not pool:
                continue
            h = build_overlap_graph(pool)
            res = extract_items(g, catalog_from_ids([mid, "m15"]))
            assert (res.motifs[mid].dm == 1.0) == (not h.edges)
