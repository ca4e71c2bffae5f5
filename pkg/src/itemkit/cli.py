"""Command-line frontend: ``itemkit analyze | windows | compare | generate``.

Exit codes: 0 success, 1 usage or validation error, 2 input/output error,
3 enumeration blow-up (instance limit or refused exact selection).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from scipy.stats import spearmanr

from . import __version__
from .catalog import CatalogError, MotifCatalog, default_catalog, load_catalog
from .enumeration import DEFAULT_MAX_INSTANCES, EnumerationConfig, InstanceLimitExceeded
from .features import (
    SCHEMA_VERSION,
    FeatureVector,
    SchemaMismatch,
    feature_vector,
    log10p1,
    normalize,
    pairwise_and_gap_aggregate,
    series_anomaly,
    write_matrix_csv,
)
from .graph import EdgeListError, TemporalGraph, birth_times, graph_stats, load_edge_list, window_partition
from .independence import SelectionRefused, extract_items
from .sampling import SampledDistribution, estimate_distribution, select_windows
from .synthgen import DAY, DEFAULT_P, GenSpec, generate_base, stretch_perturb

log = logging.getLogger("itemkit")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BLOWUP = 0, 1, 2, 3
REPORT_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument parsing ------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", action="extend", nargs="+", default=[], metavar="PATH",
                   help="edge list 'src dst time' (repeatable)")
    p.add_argument("--vertex-file", help="one vertex id per line; adds isolated vertices")
    p.add_argument("--time-unit", choices=("raw", "seconds", "ms"), default="raw")
    p.add_argument("--delimiter", default=None, help="field separator (default: whitespace or comma)")
    p.add_argument("--header", action="store_true", help="skip the first data line")
    win = p.add_mutually_exclusive_group()
    win.add_argument("--window-duration", type=int)
    win.add_argument("--window-count", type=int)
    p.add_argument("--delta", type=int, default=None, help="max span of one motif instance")
    p.add_argument("--sample-fraction", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("greedy", "luby", "exact"), default="greedy")
    p.add_argument("--catalog", help="motif catalog file (default: built-in m1..m15)")
    p.add_argument("--search-order", help="comma-separated motif ids")
    p.add_argument("--max-instances", type=int, default=DEFAULT_MAX_INSTANCES)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="itemkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"itemkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="ITeM report for each input")
    _common(a)

    w = sub.add_parser("windows", help="per-window series and burst flags")
    _common(w)
    w.add_argument("--z-threshold", type=float, default=3.0)

    c = sub.add_parser("compare", help="distance matrix between reports or edge lists")
    _common(c)
    c.add_argument("--stretch", help="comma-separated stretch index per input, enables the gap curve")
    c.add_argument("--features", choices=("full", "freq"), default="full",
                   help="compare full vectors or the frequency block only")

    g = sub.add_parser("generate", help="synthetic base graph and stretched variants")
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--p", type=float, default=DEFAULT_P)
    g.add_argument("--duration", type=int, default=DAY)
    g.add_argument("--variants", type=int, default=0)
    g.add_argument("--sigma", type=float, default=DAY / 6)
    g.add_argument("--day", type=int, default=DAY, help="length of one stretch step")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--manifest", help="re-run the generation recorded in this manifest")
    g.add_argument("--out", default=".")
    g.add_argument("-v", "--verbose", action="store_true")
    return parser


# -- shared helpers --------------------------------------------------------------


def _config_echo(args: argparse.Namespace) -> dict:
    """Everything that shapes the output. Thread count is left out on purpose."""
    keys = (
        "command", "input", "vertex_file", "time_unit", "delimiter", "header",
        "window_duration", "window_count", "delta", "sample_fraction", "seed", "mode",
        "catalog", "search_order", "max_instances", "format",
    )
    echo = {k: getattr(args, k, None) for k in keys}
    for extra in ("z_threshold", "stretch", "features"):
        if hasattr(args, extra):
            echo[extra] = getattr(args, extra)
    return echo


def _validate(args: argparse.Namespace) -> None:
    if args.delta is not None and args.delta <= 0:
        raise UsageError("--delta must be positive")
    if not 0 < args.sample_fraction <= 1:
        raise UsageError("--sample-fraction must be in (0, 1]")
    if args.window_duration is not None and args.window_duration <= 0:
        raise UsageError("--window-duration must be positive")
    if args.window_count is not None and args.window_count <= 0:
        raise UsageError("--window-count must be positive")
    if args.sample_fraction < 1 and args.window_duration is None and args.window_count is None:
        raise UsageError("--sample-fraction needs --window-duration or --window-count")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if args.max_instances is not None and args.max_instances < 1:
        raise UsageError("--max-instances must be >= 1")


def _catalog(args: argparse.Namespace) -> MotifCatalog:
    cat = load_catalog(args.catalog) if args.catalog else default_catalog()
    if args.search_order:
        cat = cat.reordered([s.strip() for s in args.search_order.split(",") if s.strip()])
    return cat


def _load(path: str, args: argparse.Namespace) -> TemporalGraph:
    return load_edge_list(
        path,
        delimiter=args.delimiter,
        has_header=args.header,
        time_unit=args.time_unit,
        vertex_source=args.vertex_file,
    )


def _windows(g: TemporalGraph, args: argparse.Namespace):
    if args.window_duration is not None:
        return window_partition(g, duration=args.window_duration)
    return window_partition(g, count=args.window_count)


def _dump(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _num(x: float) -> float | int:
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


# -- analyze ---------------------------------------------------------------------


def analyze_graph(g: TemporalGraph, args: argparse.Namespace, cat: MotifCatalog) -> dict:
    """Build the ITeM report body for one graph (no provenance fields)."""
    cfg = EnumerationConfig(delta=args.delta, max_instances=args.max_instances)
    births = birth_times(g)
    windowed = args.window_duration is not None or args.window_count is not None
    window_info = None
    if windowed and len(g):
        wins = _windows(g, args)
        plan = select_windows(len(wins), args.sample_fraction, args.seed)
        dist = estimate_distribution(wins, plan, cat, cfg, args.mode, args.seed, args.threads)
        per_window = [dist.results[i] for i in plan.selected]
        fv = feature_vector(dist, births, cat)
        window_info = {
            "total": plan.total,
            "selected": list(plan.selected),
            "t_x": plan.t_x,
            "estimator_form": dist.form,
            "importances": [float(x) for x in dist.importances],
        }
    else:
        res = extract_items(g, cat, cfg, args.mode, args.seed)
        per_window = [res]
        dist = None
        fv = feature_vector(res, births, cat)

    values = fv.as_dict()
    motifs = {}
    for m in cat:
        mid = m.id
        parts = [r.motifs[mid] for r in per_window]
        items = sum(p.item_count for p in parts)
        freq = values[f"{mid}.freq"]
        entry = {
            "kind": m.kind,
            "order": m.order,
            "item_count": items,
            "item_count_log10": log10p1(items),
            "frequency": _num(freq),
            "frequency_log10": log10p1(freq),
            "overlap_count": sum(p.overlap_count for p in parts),
            "dm": values[f"{mid}.dm"],
            "dv": values[f"{mid}.dv"],
            "mean_duration": values[f"{mid}.duration"],
            "mean_gap": values[f"{mid}.gap"],
            "mean_new_vertices": values[f"{mid}.new_vertices"],
            "orbit_occupancy": [_num(values[f"{mid}.orbit{o}"]) for o in range(len(m.orbits))],
            "orbits": [list(o) for o in m.orbits],
        }
        if m.edges:
            n_var = len(m.variants)
            entry["variants"] = {
                "overlap": [sum(p.variant_overlap[i] for p in parts) for i in range(n_var)],
                "selected": [sum(p.variant_selected[i] for p in parts) for i in range(n_var)],
            }
        motifs[mid] = entry
    residual = cat.residual.id
    return {
        "graph_stats": graph_stats(g),
        "windows": window_info,
        "motifs": motifs,
        "residual_count": motifs[residual]["item_count"],
        "feature_vector": {"schema": list(fv.schema), "values": list(fv.values),
                           "schema_version": fv.schema_version},
    }


def _report(body: dict, args: argparse.Namespace, cat: MotifCatalog, source: str) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": "itemkit",
        "tool_version": __version__,
        "source": source,
        "config": _config_echo(args),
        "seed": args.seed,
        "catalog": {"hash": cat.digest(), "search_order": list(cat.search_order)},
        "mode": {"greedy": "greedy_temporal", "luby": "luby_random"}.get(args.mode, args.mode),
        **body,
    }


def _stem(path: str, taken: set[str]) -> str:
    stem = Path(path).name
    for suffix in (".txt", ".csv", ".tsv", ".edges", ".gz"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    base, k = stem or "graph", 1
    while stem in taken:
        k += 1
        stem = f"{base}_{k}"
    taken.add(stem)
    return stem


def _write_report_csv(path: Path, report: dict) -> None:
    import csv

    path.parent.mkdir(parents=True, exist_ok=True)
    cols = ["motif", "kind", "order", "item_count", "item_count_log10", "frequency",
            "frequency_log10", "overlap_count", "dm", "dv", "mean_duration", "mean_gap",
            "mean_new_vertices", "orbit_occupancy"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for mid, e in report["motifs"].items():
            row = [mid] + [e[c] for c in cols[1:-1]]
            row.append(" ".join(str(x) for x in e["orbit_occupancy"]))
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def cmd_analyze(args: argparse.Namespace) -> int:
    _validate(args)
    if not args.input:
        raise UsageError("analyze needs at least one --input")
    cat = _catalog(args)
    out = Path(args.out)
    taken: set[str] = set()
    for path in args.input:
        started = time.perf_counter()
        g = _load(path, args)
        report = _report(analyze_graph(g, args, cat), args, cat, path)
        stem = _stem(path, taken)
        if args.format == "json":
            _dump(out / f"{stem}.report.json", report)
        else:
            _write_report_csv(out / f"{stem}.report.csv", report)
        wall = time.perf_counter() - started
        # wall time lives outside the report so reruns stay byte-identical
        _dump(out / f"{stem}.timing.json", {"source": path, "wall_time_s": wall, "threads": args.threads})
        log.info("%s: %d edges in %.2fs", path, len(g), wall)
    return EXIT_OK


# -- windows ---------------------------------------------------------------------


def cmd_windows(args: argparse.Namespace) -> int:
    import csv

    _validate(args)
    if args.window_duration is None and args.window_count is None:
        raise UsageError("windows needs --window-duration or --window-count")
    if len(args.input) != 1:
        raise UsageError("windows takes exactly one --input")
    cat = _catalog(args)
    cfg = EnumerationConfig(delta=args.delta, max_instances=args.max_instances)
    path = args.input[0]
    g = _load(path, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = _stem(path, set())
    wins = _windows(g, args)

    flags: list[int] = []
    note = None
    if wins:
        plan = select_windows(len(wins), args.sample_fraction, args.seed)
        dist: SampledDistribution | None = estimate_distribution(
            wins, plan, cat, cfg, args.mode, args.seed, args.threads
        )
        selected = list(plan.selected)
        if len(selected) >= 3:
            series = {k: [dist.counts[k][i] for i in selected] for k in cat.ids}
            flags = series_anomaly(series, args.z_threshold, window_ids=selected)
        else:
            note = "fewer than three windows analysed; no anomaly scoring"
    else:
        plan, dist, selected = None, None, []
        note = "empty input; no windows"

    with open(out / f"{stem}.series.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window", "start", "end", "importance", "selected",
                    *(f"{k}.count" for k in cat.ids), *(f"{k}.normalized" for k in cat.ids)])
        for win in wins:
            i = win.window_id
            on = dist is not None and i in dist.results
            counts = [dist.counts[k][i] if on else "" for k in cat.ids]
            normed = [repr(dist.normalized[k][i]) if on else "" for k in cat.ids]
            w.writerow([i, win.start, win.end, repr(win.importance), int(on), *counts, *normed])

    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": "itemkit",
        "tool_version": __version__,
        "source": path,
        "config": _config_echo(args),
        "seed": args.seed,
        "catalog": {"hash": cat.digest(), "search_order": list(cat.search_order)},
        "windows": {
            "total": len(wins),
            "selected": selected,
            "t_x": len(selected),
            "estimator_form": dist.form if dist else None,
            "bounds": [[w.start, w.end] for w in wins],
        },
        "estimate": {k: dist.estimate[k] for k in cat.ids} if dist else {},
        "flagged": flags,
        "z_threshold": args.z_threshold,
        "note": note,
    }
    _dump(out / f"{stem}.flags.json", payload)
    return EXIT_OK


# -- compare ---------------------------------------------------------------------


def _vector_from_report(path: str) -> tuple[FeatureVector, str, int]:
    with open(path, encoding="utf-8") as fh:
        try:
            rep = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: not a JSON report ({exc})") from None
    try:
        fv = rep["feature_vector"]
        vec = FeatureVector(tuple(fv["schema"]), tuple(float(x) for x in fv["values"]),
                            int(fv.get("schema_version", SCHEMA_VERSION)))
        return vec, rep["catalog"]["hash"], int(rep.get("schema_version", REPORT_SCHEMA_VERSION))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: report lacks a usable feature vector ({exc})") from None


def cmd_compare(args: argparse.Namespace) -> int:
    _validate(args)
    if len(args.input) < 2:
        raise UsageError("compare needs at least two inputs")
    stretch = None
    if args.stretch:
        try:
            stretch = [int(s) for s in args.stretch.split(",")]
        except ValueError:
            raise UsageError("--stretch takes comma-separated integers") from None
        if len(stretch) != len(args.input):
            raise UsageError("--stretch needs one index per input")
    cat = _catalog(args)
    vectors, hashes, versions, labels = [], [], [], []
    taken: set[str] = set()
    for path in args.input:
        if path.endswith(".json"):
            vec, digest, version = _vector_from_report(path)
        else:
            body = analyze_graph(_load(path, args), args, cat)
            fv = body["feature_vector"]
            vec = FeatureVector(tuple(fv["schema"]), tuple(fv["values"]), fv["schema_version"])
            digest, version = cat.digest(), REPORT_SCHEMA_VERSION
        vectors.append(vec)
        hashes.append(digest)
        versions.append((version, vec.schema_version))
        labels.append(_stem(path.removesuffix(".json").removesuffix(".report"), taken))
    if len(set(hashes)) > 1:
        raise UsageError("inputs were produced with different motif catalogs: "
                         + ", ".join(f"{lab}={h[:12]}" for lab, h in zip(labels, hashes)))
    if len(set(versions)) > 1 or len({v.schema for v in vectors}) > 1:
        raise UsageError("inputs use different feature schemas or schema versions")

    vectors = normalize(vectors)
    if args.features == "freq":
        vectors = [v.select(["freq"]) for v in vectors]
    agg = pairwise_and_gap_aggregate(vectors, labels, stretch)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "matrix.csv", "w", encoding="utf-8", newline="") as fh:
        write_matrix_csv(fh, agg["matrix"])
    if stretch is not None:
        curve = agg["gap_curve"]
        gaps = sorted(curve)
        rho = None
        if len(gaps) >= 2:
            r = spearmanr(gaps, [curve[k] for k in gaps]).statistic
            rho = None if math.isnan(r) else float(r)
        _dump(out / "gap_curve.json", {
            "gap_curve": {str(k): curve[k] for k in gaps},
            "spearman_rho": rho,
            "features": args.features,
            "catalog_hash": hashes[0],
            "labels": labels,
        })
    return EXIT_OK


# -- generate --------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def generate_files(spec: GenSpec, variants: int, sigma: float, day: int, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    base = generate_base(spec)
    files = []
    for i in range(variants + 1):
        vseed = spec.seed + i
        g = base if i == 0 else stretch_perturb(base, i, sigma=sigma, seed=vseed, day=day)
        name = f"G_{i}.txt"
        with open(out / name, "w", encoding="utf-8") as fh:
            g.write_edge_list(fh)
        files.append({"name": name, "stretch_days": i, "seed": vseed if i else None,
                      "edges": len(g), "sha256": _sha256(out / name)})
    return {
        "tool": "itemkit",
        "tool_version": __version__,
        "generator": {"n": spec.n, "p": spec.p, "duration": spec.duration, "seed": spec.seed,
                      "variants": variants, "sigma": sigma, "day": day},
        "files": files,
    }


def cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            try:
                gen = json.load(fh)["generator"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise UsageError(f"{args.manifest}: not a generator manifest ({exc})") from None
        spec_args = (gen["n"], gen["p"], gen["duration"], gen["seed"])
        variants, sigma, day = gen["variants"], gen["sigma"], gen["day"]
    else:
        spec_args = (args.n, args.p, args.duration, args.seed)
        variants, sigma, day = args.variants, args.sigma, args.day
    if variants < 0:
        raise UsageError("--variants must be >= 0")
    try:
        spec = GenSpec(*spec_args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    manifest = generate_files(spec, variants, sigma, day, out)
    _dump(out / "manifest.json", manifest)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------

COMMANDS = {"analyze": cmd_analyze, "windows": cmd_windows, "compare": cmd_compare,
            "generate": cmd_generate}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, CatalogError, SchemaMismatch) as exc:
        print(f"itemkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceLimitExceeded, SelectionRefused, MemoryError) as exc:
        print(f"itemkit: enumeration blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (OSError, EdgeListError, UnicodeDecodeError) as exc:
        print(f"itemkit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"itemkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
