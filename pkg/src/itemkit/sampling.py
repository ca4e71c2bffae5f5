"""Window-importance estimation of motif frequencies from a subset of windows."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .catalog import MotifCatalog
from .enumeration import EnumerationConfig
from .graph import WindowGraph
from .independence import ITeMResult, extract_many

__all__ = [
    "SamplingPlan",
    "SampledDistribution",
    "select_windows",
    "estimate_distribution",
    "estimate_from_counts",
]

FULL_FORM = "mean_over_all_windows"
SAMPLED_FORM = "mean_over_selected_windows"


@dataclass(frozen=True)
class SamplingPlan:
    total: int
    selected: tuple[int, ...]
    seed: int
    fraction: float

    @property
    def indicators(self) -> list[int]:
        chosen = set(self.selected)
        return [1 if i in chosen else 0 for i in range(self.total)]

    @property
    def t_x(self) -> int:
        return len(self.selected)


@dataclass
class SampledDistribution:
    """Per-window exact counts and the importance-weighted estimate.

    ``counts[k][i]`` is the ITeM count of motif ``k`` in window ``i`` (None for
    unselected windows) and ``normalized[k][i]`` the same count divided by the
    window importance.
    """

    motif_ids: list[str]
    plan: SamplingPlan
    importances: list[float]
    counts: dict[str, list[int | None]]
    normalized: dict[str, list[float | None]]
    estimate: dict[str, float]
    form: str
    results: dict[int, ITeMResult] = field(default_factory=dict, repr=False)

    @property
    def vector(self) -> list[float]:
        return [self.estimate[k] for k in self.motif_ids]


def select_windows(total: int, fraction: float = 1.0, seed: int = 0) -> SamplingPlan:
    """Choose ``ceil(fraction * total)`` windows uniformly without replacement."""
    if total <= 0:
        raise ValueError("no windows to sample from")
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    k = max(1, math.ceil(fraction * total - 1e-12))
    if k >= total:
        chosen = tuple(range(total))
    else:
        chosen = tuple(sorted(random.Random(seed).sample(range(total), k)))
    return SamplingPlan(total, chosen, seed, fraction)


def estimate_from_counts(
    counts: dict[str, Sequence[int | None]],
    importances: Sequence[float],
    plan: SamplingPlan,
) -> tuple[dict[str, list[float | None]], dict[str, float], str]:
    """Normalise per-window counts by importance and average them.

    Windows with zero importance contribute zero. All windows selected gives
    the mean over ``t`` windows; otherwise the mean over the ``t_x`` selected.
    """
    if len(importances) != plan.total:
        raise ValueError(f"plan covers {plan.total} windows but {len(importances)} were given")
    form = FULL_FORM if plan.t_x == plan.total else SAMPLED_FORM
    denom = plan.total if form == FULL_FORM else plan.t_x
    normalized: dict[str, list[float | None]] = {}
    estimate: dict[str, float] = {}
    for k, row in counts.items():
        f: list[float | None] = [None] * plan.total
        acc = 0.0
        for i in plan.selected:
            c = row[i]
            f[i] = c / importances[i] if importances[i] > 0 else 0.0
            acc += f[i]
        normalized[k] = f
        estimate[k] = acc / denom
    return normalized, estimate, form


def estimate_distribution(
    windows: Sequence[WindowGraph],
    plan: SamplingPlan,
    catalog: MotifCatalog,
    cfg: EnumerationConfig | None = None,
    mode: str = "greedy_temporal",
    seed=0,
    threads: int = 1,
) -> SampledDistribution:
    """Exact extraction on the selected windows, then the weighted estimate.

    Importances must come from the full window set, as produced by
    :func:`~itemkit.graph.window_partition`.
    """
    if len(windows) != plan.total:
        raise ValueError(f"plan covers {plan.total} windows but {len(windows)} were given")
    picked = [windows[i] for i in plan.selected]
    results = extract_many([w.graph for w in picked], catalog, cfg, mode, seed, threads)
    by_window = dict(zip(plan.selected, results))
    ids = catalog.ids
    counts: dict[str, list[int | None]] = {k: [None] * plan.total for k in ids}
    for i, res in by_window.items():
        for k in ids:
            counts[k][i] = res.motifs[k].item_count
    importances = [w.importance for w in windows]
    normalized, estimate, form = estimate_from_counts(counts, importances, plan)
    return SampledDistribution(ids, plan, importances, counts, normalized, estimate, form, by_window)
