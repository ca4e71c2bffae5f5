"""Feature vectors, cohort normalisation, distances and window-series scoring."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Mapping, Sequence

import numpy as np

from .catalog import MotifCatalog
from .independence import ITeMResult, instance_structural_contribution, orbit_occupancy
from .sampling import SampledDistribution

__all__ = [
    "FeatureVector",
    "SimilarityMatrix",
    "SchemaMismatch",
    "SCHEMA_VERSION",
    "feature_schema",
    "feature_vector",
    "normalize",
    "distance",
    "pairwise_and_gap_aggregate",
    "series_anomaly",
    "burst_growth",
    "write_vectors_csv",
    "write_matrix_csv",
]

SCHEMA_VERSION = 1
PER_MOTIF = ("freq", "dm", "dv", "duration", "gap", "new_vertices")
_L1_BLOCKS = ("freq", "orbit")
_MINMAX_BLOCKS = ("duration", "gap", "new_vertices")


class SchemaMismatch(ValueError):
    pass


def feature_schema(catalog: MotifCatalog) -> tuple[str, ...]:
    """Column names: six statistics per motif, then one count per orbit."""
    cols = [f"{m.id}.{stat}" for m in catalog for stat in PER_MOTIF]
    cols += [f"{m.id}.orbit{o}" for m in catalog for o in range(len(m.orbits))]
    return tuple(cols)


def _block(col: str) -> str:
    stat = col.rsplit(".", 1)[1]
    return "orbit" if stat.startswith("orbit") else stat


@dataclass(frozen=True)
class FeatureVector:
    schema: tuple[str, ...]
    values: tuple[float, ...]
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if len(self.schema) != len(self.values):
            raise SchemaMismatch("schema and values differ in length")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.schema, self.values))

    def select(self, blocks: Sequence[str]) -> "FeatureVector":
        """Keep only the columns of the named blocks (e.g. ``["freq"]``)."""
        keep = [i for i, c in enumerate(self.schema) if _block(c) in blocks]
        return FeatureVector(
            tuple(self.schema[i] for i in keep),
            tuple(self.values[i] for i in keep),
            self.schema_version,
        )


@dataclass(frozen=True)
class SimilarityMatrix:
    labels: tuple[str, ...]
    distances: np.ndarray


def _instance_stats(instances, births):
    """Integer sums so that the means are exact up to one final division."""
    n = dur = n_gaps = newv = 0
    for inst in instances:
        n += 1
        if inst.times:
            # consecutive gaps telescope to the formation time
            dur += inst.times[-1] - inst.times[0]
            n_gaps += len(inst.times) - 1
        newv += instance_structural_contribution(inst, births)["new_vertices"]
    return n, dur, n_gaps, newv


def _mean(total: int, count: int) -> float:
    return total / count if count else 0.0


def feature_vector(
    result: ITeMResult | SampledDistribution,
    births: Mapping[int, int],
    catalog: MotifCatalog,
) -> FeatureVector:
    """Fixed-length description of one graph.

    Per motif: ITeM frequency, motif independence, vertex independence, mean
    formation time (last minus first edge time), mean gap between consecutive
    edges, and mean number of vertices born in the instance. Then the number
    of vertex visits per (motif, orbit). Motifs without instances get zeros.

    A :class:`SampledDistribution` contributes its importance-weighted
    frequency and orbit estimates; the other statistics are pooled over the
    selected windows.
    """
    schema = feature_schema(catalog)
    if isinstance(result, SampledDistribution):
        per_window = [result.results[i] for i in result.plan.selected]
    else:
        per_window = [result]
    for res in per_window:
        if set(res.motifs) != set(catalog.ids):
            raise SchemaMismatch("result was produced with a different catalog")

    values: list[float] = []
    for m in catalog:
        k = m.id
        picked = [inst for res in per_window for inst in res.motifs[k].selected]
        n, dur, n_gaps, newv = _instance_stats(picked, births)
        over = sum(res.motifs[k].overlap_count for res in per_window)
        uniq = sum(res.motifs[k].unique_vertices for res in per_window)
        if isinstance(result, SampledDistribution):
            freq = result.estimate[k]
        else:
            freq = float(n)
        dm = n / over if over else 0.0
        dv = uniq / (over * m.order) if over else 0.0
        values += [freq, dm, dv, _mean(dur, n), _mean(dur, n_gaps), _mean(newv, n)]

    if isinstance(result, SampledDistribution):
        occ: dict = {}
        plan = result.plan
        denom = plan.total if plan.t_x == plan.total else plan.t_x
        for i in plan.selected:
            imp = result.importances[i]
            if imp <= 0:
                continue
            for key, c in orbit_occupancy(result.results[i], catalog).items():
                occ[key] = occ.get(key, 0.0) + c / imp
        occ = {key: v / denom for key, v in occ.items()}
    else:
        occ = orbit_occupancy(result, catalog)
    for m in catalog:
        for o in range(len(m.orbits)):
            values.append(float(occ.get((m.id, o), 0)))
    return FeatureVector(schema, tuple(float(v) for v in values))


def normalize(vectors: Sequence[FeatureVector], scheme: str = "l1_freq_minmax_rest") -> list[FeatureVector]:
    """Cohort normalisation.

    Frequency and orbit blocks are scaled to unit L1 norm per vector; formation
    time, gap and new-vertex columns are min-max scaled across the cohort
    (constant columns become 0); DM and DV are already ratios and stay as is.
    Distances between normalised vectors are only comparable within a cohort.
    """
    if scheme != "l1_freq_minmax_rest":
        raise ValueError(f"unknown normalisation scheme {scheme!r}")
    if not vectors:
        return []
    schema = vectors[0].schema
    for v in vectors:
        if v.schema != schema:
            raise SchemaMismatch("vectors use different schemas")
    data = np.array([v.as_array() for v in vectors], dtype=float)
    blocks = [_block(c) for c in schema]
    out = data.copy()
    for name in _L1_BLOCKS:
        cols = [i for i, b in enumerate(blocks) if b == name]
        if not cols:
            continue
        sums = np.abs(data[:, cols]).sum(axis=1, keepdims=True)
        safe = np.where(sums > 0, sums, 1.0)
        out[:, cols] = data[:, cols] / safe
    for i, b in enumerate(blocks):
        if b in _MINMAX_BLOCKS:
            col = data[:, i]
            lo, hi = col.min(), col.max()
            out[:, i] = (col - lo) / (hi - lo) if hi > lo else 0.0
    return [FeatureVector(schema, tuple(row.tolist()), vectors[0].schema_version) for row in out]


def distance(a: FeatureVector, b: FeatureVector) -> float:
    if a.schema != b.schema or a.schema_version != b.schema_version:
        raise SchemaMismatch("cannot compare vectors with different schemas")
    return float(np.linalg.norm(a.as_array() - b.as_array()))


def pairwise_and_gap_aggregate(
    vectors: Sequence[FeatureVector],
    labels: Sequence[str] | None = None,
    stretch: Sequence[int] | None = None,
) -> dict:
    """Distance matrix and, given stretch indices, mean distance per index gap."""
    n = len(vectors)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = distance(vectors[i], vectors[j])
    curve: dict[int, float] = {}
    if stretch is not None:
        if len(stretch) != n:
            raise ValueError("one stretch index per vector is required")
        buckets: dict[int, list[float]] = {}
        for i in range(n):
            for j in range(i + 1, n):
                buckets.setdefault(abs(stretch[i] - stretch[j]), []).append(mat[i, j])
        curve = {g: float(np.mean(d)) for g, d in sorted(buckets.items())}
    return {"matrix": SimilarityMatrix(labels, mat), "gap_curve": curve}


def series_anomaly(
    series: Mapping[str, Sequence[float]] | np.ndarray,
    z_threshold: float = 3.0,
    *,
    window_ids: Sequence[int] | None = None,
    rel_floor: float = 0.1,
    abs_floor: float = 1.0,
) -> list[int]:
    """Windows whose value in some series stands out from the other windows.

    For window ``i`` and each series, the mean and sample standard deviation
    of the remaining windows give ``z = (x_i - mean) / scale`` with ``scale``
    floored at ``rel_floor * |mean|`` and at ``abs_floor``, so a few counts of
    noise in quiet or near-constant series do not raise flags. A window is
    flagged when any ``z`` exceeds ``z_threshold``.
    """
    data = np.asarray(list(series.values()) if isinstance(series, Mapping) else series, dtype=float)
    if isinstance(series, Mapping):
        data = data.T if data.ndim == 2 else data.reshape(-1, 1)
    elif data.ndim == 1:
        data = data.reshape(-1, 1)
    n = data.shape[0]
    if n < 3:
        raise ValueError("series_anomaly needs at least three windows")
    ids = list(window_ids) if window_ids is not None else list(range(n))
    flagged = []
    for i in range(n):
        others = np.delete(data, i, axis=0)
        mu = others.mean(axis=0)
        sd = others.std(axis=0, ddof=1)
        scale = np.maximum(np.maximum(sd, rel_floor * np.abs(mu)), abs_floor)
        z = (data[i] - mu) / scale
        if np.any(z > z_threshold):
            flagged.append(ids[i])
    return flagged


def burst_growth(series: Mapping[str, Sequence[float]], window: int) -> dict[str, float]:
    """Ratio of a window's value to the mean of the other windows, add-one smoothed."""
    out = {}
    for k, row in series.items():
        row = list(row)
        others = row[:window] + row[window + 1:]
        base = sum(others) / len(others) if others else 0.0
        out[k] = (row[window] + 1.0) / (base + 1.0)
    return out


def write_vectors_csv(fh: IO[str], vectors: Sequence[FeatureVector], labels: Sequence[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["graph", *vectors[0].schema] if vectors else ["graph"])
    for lab, v in zip(labels, vectors):
        w.writerow([lab, *(repr(x) for x in v.values)])


def write_matrix_csv(fh: IO[str], mat: SimilarityMatrix) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["", *mat.labels])
    for lab, row in zip(mat.labels, mat.distances.tolist()):
        w.writerow([lab, *(repr(float(x)) for x in row)])


def log10p1(x: float) -> float:
    return math.log10(1.0 + x)
