"""Exhaustive enumeration over all 2^P layouts for small P.

Used for cost-landscape histograms, global optima, and as brute-force
references in the test suite.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .autocorr import AutocorrTarget, autocorrelation_batch, idft_coefficients
from .layout import GridSpec, Mask, as_bits, sample_mask
from .pattern import normalized_power, violation_measure

log = logging.getLogger(__name__)

AD_CAP = 24
PD_CAP = 16
_CHUNK = 1 << 16
_PROGRESS_EVERY = 1 << 20
# costs are rounded to this many decimals before counting ties
_COST_DECIMALS = 10


def brute_autocorrelation(bits) -> list:
    """Naive double loop over lags and slots, kept independent of the numpy path."""
    a = [int(x) for x in as_bits(bits)]
    P = len(a)
    out = []
    for s in range(P):
        total = 0
        for p in range(P):
            q = p + s
            if q >= P:
                q -= P
            total += a[p] * a[q]
        out.append(total)
    return out


def enumerate_chunk(P: int, start: int, stop: int) -> np.ndarray:
    """Rows are the binary expansions of start..stop-1, slot 0 = least significant bit."""
    h = np.arange(start, stop, dtype=np.int64)
    return ((h[:, None] >> np.arange(P)[None, :]) & 1).astype(np.int8)


@dataclass
class Landscape:
    objective: str
    P: int
    costs: np.ndarray  # per enumerated sequence, in enumeration order
    codes: np.ndarray  # integer code of each sequence
    min_cost: float
    witnesses: list = field(default_factory=list)

    def raw_counts(self) -> tuple[np.ndarray, np.ndarray]:
        vals, counts = np.unique(np.round(self.costs, _COST_DECIMALS), return_counts=True)
        return vals, counts

    def histogram(self, bin_width: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
        """(bin left edges, relative frequency) with bins anchored at zero."""
        idx = np.floor(self.costs / bin_width + 1e-9).astype(np.int64)
        bins, counts = np.unique(idx, return_counts=True)
        return bins * bin_width, counts / self.costs.size

    def near_optimal_count(self, quantile: float = 0.01) -> int:
        """Sequences at or below the given cost quantile, excluding exact optima."""
        q = np.quantile(self.costs, quantile)
        tol = 10.0 ** -_COST_DECIMALS
        return int(np.count_nonzero((self.costs <= q + tol) & (self.costs > self.min_cost + tol)))

    def to_histogram_csv(self, path, bin_width: float = 1e-3, comment: str | None = None) -> None:
        edges, freq = self.histogram(bin_width)
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("cost_bin,relative_frequency\n")
            for e, f in zip(edges, freq):
                fh.write(f"{e:.10g},{f:.10g}\n")

    def to_raw_csv(self, path, comment: str | None = None) -> None:
        vals, counts = self.raw_counts()
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("cost,count\n")
            for v, c in zip(vals, counts):
                fh.write(f"{v:.10g},{c}\n")

    def witnesses_json(self) -> str:
        return json.dumps({"objective": self.objective, "P": self.P, "min_cost": self.min_cost,
                           "witnesses": [list(map(int, w)) for w in self.witnesses]}, indent=2)


def exhaust_landscape(P: int, mask: Mask | None = None, grid: GridSpec | None = None,
                      N_filter: int | None = None, objective: str = "ad",
                      target: AutocorrTarget | None = None, dense_factor: int = 20,
                      metric: str = "step", max_witnesses: int = 4096) -> Landscape:
    """Evaluate every nonempty P-slot layout under the PD or AD objective.

    For ``objective="ad"`` without an explicit ``target``, each sequence is
    scored against the mask-equality target for its own element count.
    """
    if objective not in ("ad", "pd"):
        raise ValueError(f"objective must be 'ad' or 'pd', got {objective!r}")
    cap = AD_CAP if objective == "ad" else PD_CAP
    if P > cap:
        raise ValueError(f"exhaustive {objective.upper()} enumeration is capped at P <= {cap}, got {P}")
    if grid is None:
        grid = GridSpec(P)
    if grid.num_slots != P:
        raise ValueError("grid size does not match P")
    if objective == "pd" or target is None:
        if mask is None:
            raise ValueError("a mask is required for this objective")
    if target is not None and target.P != P:
        raise ValueError("target length does not match P")

    if objective == "ad" and target is None:
        mu = idft_coefficients(sample_mask(mask, grid))
    u = grid.dense_grid(dense_factor)
    mask_u = mask(u) if mask is not None else None

    all_costs, all_codes = [], []
    total = 1 << P
    for start in range(1, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        pop = enumerate_chunk(P, start, stop)
        codes = np.arange(start, stop, dtype=np.int64)
        counts = pop.sum(axis=1, dtype=np.int64)
        if N_filter is not None:
            keep = counts == N_filter
            pop, codes, counts = pop[keep], codes[keep], counts[keep]
            if not pop.shape[0]:
                continue
        if objective == "ad":
            gam = autocorrelation_batch(pop)
            tgt = target.values[None, :] if target is not None else (counts ** 2)[:, None] * mu[None, :]
            costs = np.mean((gam - tgt) ** 2, axis=1)
        else:
            costs = violation_measure(normalized_power(pop, grid, u), mask_u, u, metric)
        all_costs.append(costs)
        all_codes.append(codes)
        if (start - 1) // _PROGRESS_EVERY != (stop - 1) // _PROGRESS_EVERY:
            log.info("enumerated %d / %d sequences", stop, total)

    if not all_costs:
        raise ValueError("no sequences match the element-count filter")
    costs = np.concatenate(all_costs)
    codes = np.concatenate(all_codes)
    min_cost = float(costs.min())
    at_min = np.flatnonzero(costs <= min_cost + 10.0 ** -_COST_DECIMALS)[:max_witnesses]
    witnesses = [((int(codes[i]) >> np.arange(P)) & 1).astype(np.int8) for i in at_min]
    return Landscape(objective=objective, P=P, costs=costs, codes=codes,
                     min_cost=min_cost, witnesses=witnesses)
