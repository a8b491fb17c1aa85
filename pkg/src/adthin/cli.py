"""Command-line front end: ``adthin synthesize | sweep | exhaust``.

Every output lands in ``<out>/<run_id>/``. Apart from the first line of each
file (a ``created`` stamp that also carries wall time), reruns with the same
configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import contextlib
import copy
import csv
import datetime as _dt
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .afpa import InfeasibleMaskError, feasible_samples, solve_afpa
from .autocorr import AutocorrTarget, autocorrelation, consistent_me_count, target_fpe, target_me
from .config import ConfigError, RunConfig, build_mask, load_json, parse_run_config
from .layout import GridSpec, sample_mask
from .optimizer import SynthesisResult, fpe_default_count, run_fpe_ad, run_me_ad
from .oracle import exhaust_landscape
from .pattern import power_pattern
from .pd_baseline import run_pd

log = logging.getLogger("adthin")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_CAP_EXCEEDED = 4


def _stamp(wall_time: float | None = None) -> str:
    now = _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"created {now}" + (f" wall_time_s={wall_time:.4f}" if wall_time is not None else "")


def _write_json(path: Path, payload: dict, stamp: str) -> None:
    body = json.dumps(payload, indent=2, sort_keys=True)
    # the stamp goes on the first line inside the object so the rest stays reproducible
    text = "{\n" + f'  "_created": {json.dumps(stamp)},\n' + body[2:] + "\n"
    path.write_text(text)


@contextlib.contextmanager
def _single_thread(enabled: bool):
    if not enabled:
        yield
        return
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=1):
        yield


def synthesize(cfg: RunConfig) -> SynthesisResult:
    mask = cfg.mask()
    common = dict(constrain_count=cfg.constrain_count, dense_factor=cfg.dense_factor, metric=cfg.metric)
    if cfg.mode == "me-ad":
        return run_me_ad(mask, cfg.grid, cfg.num_elements, cfg.ga, **common)
    if cfg.mode == "fpe-ad":
        return run_fpe_ad(mask, cfg.grid, cfg.num_elements, cfg.ga,
                          afpa_objective=cfg.afpa_objective, **common)
    N = cfg.num_elements
    if N is None:
        # match the fill factor the FPE route would pick for this mask
        N = fpe_default_count(solve_afpa(mask, cfg.grid, objective=cfg.afpa_objective))
    return run_pd(mask, cfg.grid, N, cfg.ga, **common)


def write_outputs(cfg: RunConfig, res: SynthesisResult, out_dir: Path) -> Path:
    run_dir = out_dir / cfg.resolved_run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    stamp = _stamp(res.trace.wall_time)
    mask = cfg.mask()
    payload = {"config": cfg.to_dict(), "result": res.summary()}
    _write_json(run_dir / "layout.json", payload, stamp)
    power_pattern(res.layout, cfg.grid, dense_factor=cfg.dense_factor).to_csv(
        run_dir / "pattern.csv", mask=mask, comment=stamp)
    res.trace.to_csv(run_dir / "trace.csv", comment=stamp)
    if res.target is not None:
        g_parent = autocorrelation(res.parent)
        g_layout = autocorrelation(res.layout)
        with open(run_dir / "autocorrelation.csv", "w", newline="") as fh:
            fh.write(f"# {stamp}\n")
            w = csv.writer(fh)
            w.writerow(["lag", "target", "parent", "layout"])
            for s in range(cfg.grid.num_slots):
                w.writerow([s, f"{res.target.values[s]:.12g}", int(g_parent[s]), int(g_layout[s])])
    if res.aux is not None:
        res.aux.to_csv(run_dir / "aux_excitations.csv", comment=stamp)
    return run_dir


def cmd_synthesize(args) -> int:
    data = load_json(args.config)
    if args.seed is not None:
        data = dict(data, seed=args.seed)
    cfg = parse_run_config(data, base_dir=Path(args.config).parent)
    with _single_thread(args.timing or args.threads == 1):
        res = synthesize(cfg)
    run_dir = write_outputs(cfg, res, Path(args.out))
    print(f"{cfg.mode}: xi={res.xi:.6g} sll={res.sll:.2f} dB N={res.num_elements} "
          f"shift={res.shift} -> {run_dir}")
    return EXIT_OK


# -- sweeps ------------------------------------------------------------------

_SWEEP_KEYS = {"axis", "values", "modes", "seeds", "base", "me_count", "run_id"}


def _point_config(base: dict, axis: str, value, mode: str, seed: int, me_count) -> RunConfig:
    data = copy.deepcopy(base)
    data["mode"] = mode
    data["seed"] = seed
    if axis == "sll":
        mask = data.get("mask", {})
        if mask.get("type") != "flat":
            raise ConfigError("an 'sll' sweep needs a base mask of type 'flat'")
        mask["sll_db"] = value
    else:
        data.setdefault("grid", {})["num_slots"] = value
    if mode == "me-ad" and data.get("num_elements") is None:
        if me_count == "auto":
            grid = GridSpec(**data["grid"])
            data["num_elements"] = consistent_me_count(sample_mask(build_mask(data["mask"], grid), grid))
        else:
            data["num_elements"] = me_count
    return parse_run_config(data)


def _run_point(task):
    base, axis, value, mode, seed, me_count, timing = task
    try:
        cfg = _point_config(base, axis, value, mode, seed, me_count)
        with _single_thread(timing):
            res = synthesize(cfg)
        return dict(value=value, mode=mode, seed=seed, xi=res.xi, sll=res.sll,
                    wall_time=res.trace.wall_time, i_conv=res.trace.i_conv,
                    N=res.num_elements, status="ok")
    except (ConfigError, InfeasibleMaskError, ValueError) as exc:
        return dict(value=value, mode=mode, seed=seed, xi=float("nan"), sll=float("nan"),
                    wall_time=float("nan"), i_conv=-1, N=-1, status=f"error: {exc}")


def run_sweep(spec: dict, threads: int = 1, timing: bool = False) -> tuple[list, list]:
    """Run every (value, mode, seed) point; return (per-run rows, best-of-seeds rows)."""
    if not isinstance(spec, dict):
        raise ConfigError("sweep config must be an object")
    extra = sorted(set(spec) - _SWEEP_KEYS)
    if extra:
        raise ConfigError(f"unknown key '{extra[0]}'")
    axis = spec.get("axis")
    if axis not in ("sll", "aperture"):
        raise ConfigError(f"'axis' must be 'sll' or 'aperture', got {axis!r}")
    for key in ("values", "modes", "base"):
        if key not in spec:
            raise ConfigError(f"missing key '{key}'")
    seeds = spec.get("seeds", [0])
    me_count = spec.get("me_count", "auto")
    tasks = [(spec["base"], axis, v, m, s, me_count, timing)
             for v in spec["values"] for m in spec["modes"] for s in seeds]
    if timing:
        workers = 1
    else:
        workers = (os.cpu_count() or 1) if threads == 0 else threads
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_point, tasks))
    else:
        runs = [_run_point(t) for t in tasks]

    best = []
    for v in spec["values"]:
        for m in spec["modes"]:
            group = [r for r in runs if r["value"] == v and r["mode"] == m]
            ok = [r for r in group if r["status"] == "ok"]
            if not ok:
                best.append(dict(group[0], seed=-1))
                continue
            top = min(ok, key=lambda r: (r["xi"], r["sll"]))
            best.append(dict(top, wall_time=float(np.mean([r["wall_time"] for r in ok]))))
    return runs, best


def _write_rows(path: Path, rows: list, axis: str, stamp: str) -> None:
    cols = ["value", "mode", "seed", "xi", "sll", "wall_time", "i_conv", "N", "status"]
    names = [axis, "mode", "seed", "xi_opt", "sll_db", "wall_time_s", "i_conv", "N", "status"]
    with open(path, "w", newline="") as fh:
        fh.write(f"# {stamp}\n")
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow([f"{r[c]:.10g}" if isinstance(r[c], float) else r[c] for c in cols])


def cmd_sweep(args) -> int:
    spec = load_json(args.config)
    if args.seed is not None:
        spec = dict(spec, seeds=[args.seed])
    start = time.perf_counter()
    runs, best = run_sweep(spec, threads=args.threads, timing=args.timing)
    run_dir = Path(args.out) / spec.get("run_id", f"sweep-{spec['axis']}")
    run_dir.mkdir(parents=True, exist_ok=True)
    # wall-time columns are inherently run-dependent; the stamp line records total time
    stamp = _stamp(time.perf_counter() - start)
    _write_rows(run_dir / "sweep.csv", best, spec["axis"], stamp)
    _write_rows(run_dir / "sweep_runs.csv", runs, spec["axis"], stamp)
    for r in best:
        print(f"{spec['axis']}={r['value']} {r['mode']}: xi={r['xi']:.4g} sll={r['sll']:.2f} "
              f"dt={r['wall_time']:.3f}s {r['status']}")
    return EXIT_OK


# -- exhaustive landscapes ---------------------------------------------------

_EXHAUST_KEYS = {"grid", "mask", "objectives", "N_filter", "ad_target", "num_elements",
                 "bin_width", "dense_factor", "metric", "run_id", "planted"}


def _exhaust_target(spec: dict, mask, grid: GridSpec) -> AutocorrTarget | None:
    kind = spec.get("ad_target", "me")
    if "planted" in spec:
        g = autocorrelation(spec["planted"]).astype(float)
        return AutocorrTarget(values=g, kind="planted", num_elements=int(np.sum(spec["planted"])))
    samples = sample_mask(mask, grid)
    N = spec.get("num_elements", "auto")
    if kind == "me":
        return target_me(samples, consistent_me_count(samples) if N == "auto" else N)
    if kind == "fpe":
        aux = solve_afpa(mask, grid)
        return target_fpe(feasible_samples(aux, grid), fpe_default_count(aux) if N == "auto" else N)
    if kind == "me-per-count":
        return None
    raise ConfigError(f"'ad_target' must be 'me', 'fpe' or 'me-per-count', got {kind!r}")


def cmd_exhaust(args) -> int:
    spec = load_json(args.config)
    if not isinstance(spec, dict):
        raise ConfigError("exhaust config must be an object")
    extra = sorted(set(spec) - _EXHAUST_KEYS)
    if extra:
        raise ConfigError(f"unknown key '{extra[0]}'")
    if "grid" not in spec:
        raise ConfigError("missing key 'grid'")
    try:
        grid = GridSpec(**spec["grid"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid 'grid': {exc}") from exc
    mask = build_mask(spec["mask"], grid, Path(args.config).parent) if "mask" in spec else None
    objectives = spec.get("objectives", ["pd", "ad"])
    if mask is None and ("pd" in objectives or "planted" not in spec):
        raise ConfigError("missing key 'mask'")
    bin_width = spec.get("bin_width", 1e-3)
    run_dir = Path(args.out) / spec.get("run_id", f"exhaust-P{grid.num_slots}")

    results = {}
    start = time.perf_counter()
    for obj in objectives:
        if obj not in ("pd", "ad"):
            raise ConfigError(f"'objectives' entries must be 'pd' or 'ad', got {obj!r}")
        target = _exhaust_target(spec, mask, grid) if obj == "ad" else None
        results[obj] = exhaust_landscape(
            grid.num_slots, mask, grid, N_filter=spec.get("N_filter"), objective=obj,
            target=target, dense_factor=spec.get("dense_factor", 20), metric=spec.get("metric", "step"))
    run_dir.mkdir(parents=True, exist_ok=True)
    stamp = _stamp(time.perf_counter() - start)
    summary = {}
    for obj, land in results.items():
        land.to_histogram_csv(run_dir / f"histogram_{obj}.csv", bin_width, comment=stamp)
        land.to_raw_csv(run_dir / f"costs_{obj}.csv", comment=stamp)
        _write_json(run_dir / f"witnesses_{obj}.json", json.loads(land.witnesses_json()), stamp)
        summary[obj] = {"min_cost": land.min_cost, "num_witnesses": len(land.witnesses),
                        "near_optimal_1pct": land.near_optimal_count(0.01)}
        print(f"{obj}: min={land.min_cost:.6g} witnesses={len(land.witnesses)} "
              f"near-optimal(1%)={summary[obj]['near_optimal_1pct']}")
    _write_json(run_dir / "summary.json", summary, stamp)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adthin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [("synthesize", "run one ME-AD, FPE-AD or PD synthesis"),
                           ("sweep", "sweep SLL or aperture over several modes and seeds"),
                           ("exhaust", "enumerate all 2^P layouts and emit cost landscapes")]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", default="runs", help="output directory (default: runs)")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweeps (0 = auto)")
        p.add_argument("--timing", action="store_true", help="force single-threaded execution")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


_COMMANDS = {"synthesize": cmd_synthesize, "sweep": cmd_sweep, "exhaust": cmd_exhaust}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except InfeasibleMaskError as exc:
        print(f"error: auxiliary array infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        if "capped" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CAP_EXCEEDED
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
