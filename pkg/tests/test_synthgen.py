import io
import math
from collections import Counter

import numpy as np
import pytest

from itemkit import GenSpec, generate_base, inject_burst, stretch_perturb
from itemkit.synthgen import DAY

SMALL = GenSpec(n=100, p=2000 / (100 * DAY), duration=DAY, seed=0)


def _static(g):
    return Counter(zip(g.src.tolist(), g.dst.tolist()))


def test_default_population_and_duration():
    s = GenSpec()
    assert s.n == 100 and s.duration == 86_400


def test_invalid_spec():
    with pytest.raises(ValueError):
        GenSpec(n=1)
    with pytest.raises(ValueError):
        GenSpec(p=0.0)


def test_edge_count_within_three_sigma():
    spec = SMALL
    trials = spec.n * spec.duration
    mean = trials * spec.p
    sd = math.sqrt(trials * spec.p * (1 - spec.p))
    for seed in range(20):
        g = generate_base(GenSpec(spec.n, spec.p, spec.duration, seed))
        assert abs(len(g) - mean) <= 3 * sd


def test_same_seed_same_bytes():
    def dump(g):
        buf = io.StringIO()
        g.write_edge_list(buf)
        return buf.getvalue()

    assert dump(generate_base(SMALL)) == dump(generate_base(SMALL))


def test_no_self_loops_and_times_in_range():
    g = generate_base(SMALL)
    assert not np.any(g.src == g.dst)
    assert g.time.min() >= 0 and g.time.max() < DAY
    assert len(g.vertices) == 100


def test_stretch_identity():
    g = generate_base(SMALL)
    assert stretch_perturb(g, 0, sigma=0).time.tolist() == g.time.tolist()


def test_stretch_preserves_structure_and_extends_span():
    g = generate_base(SMALL)
    for seed in range(10):
        s = stretch_perturb(g, 3, seed=seed)
        assert len(s) == len(g)
        assert _static(s) == _static(g)
        grown = (s.span[1] - s.span[0]) - (g.span[1] - g.span[0])
        assert abs(grown - 3 * DAY) <= DAY / 2


def test_burst_multiplier_zero_is_identity():
    g = generate_base(SMALL)
    assert inject_burst(g, (0, 3600), 0) is g


def test_burst_adds_edges_inside_window():
    g = generate_base(SMALL)
    window = (3600, 7200)
    inside = int(np.count_nonzero((g.time >= 3600) & (g.time < 7200)))
    b = inject_burst(g, window, 10, seed=1)
    after = int(np.count_nonzero((b.time >= 3600) & (b.time < 7200)))
    assert after == 11 * inside
    assert len(b) - len(g) == 10 * inside
    new = b.remove_edges(g.eid.tolist())
    fresh = (new.src >= 100) | (new.dst >= 100)
    assert 0.55 < fresh.mean() < 0.85


def test_burst_rejects_empty_window():
    g = generate_base(SMALL)
    with pytest.raises(ValueError):
        inject_burst(g, (DAY * 5, DAY * 6), 3)


def test_determinism_per_seed():
    g = generate_base(SMALL)
    a = stretch_perturb(g, 2, seed=5)
    b = stretch_perturb(g, 2, seed=5)
    assert a.time.tolist() == b.time.tolist()
    x = inject_burst(g, (0, 7200), 2, seed=9)
    y = inject_burst(g, (0, 7200), 2, seed=9)
    assert x.src.tolist() == y.src.tolist() and x.time.tolist() == y.time.tolist()
