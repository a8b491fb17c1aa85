"""Genetic search over parent sequences in the autocorrelation domain.

The GA only has to find a parent whose autocorrelation matches the target;
every cyclic shift of that parent shares the same cost, and the shift that
best fits the mask is picked afterwards by :func:`post_ga_cyclic_shift`.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .afpa import AuxExcitations, feasible_samples, solve_afpa
from .autocorr import (
    AutocorrTarget,
    autocorrelation,
    autocorrelation_batch,
    target_fpe,
    target_me,
)
from .layout import GridSpec, Mask, all_shifts, as_bits, sample_mask
from .pattern import normalized_power, power_pattern, sidelobe_level, violation_measure


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 20
    max_iterations: int = 200
    stagnation_window: int = 10
    stagnation_threshold: float = 1e-9
    crossover_probability: float = 0.9
    mutation_probability: float | None = None  # None -> 1/P
    tournament_size: int = 3
    elite_count: int = 1
    rng_seed: int = 0
    fixed_N: int | None = None

    def __post_init__(self):
        def check(ok, msg):
            if not ok:
                raise ValueError(msg)

        check(self.population_size >= 2, "population_size must be >= 2")
        check(self.max_iterations >= 1, "max_iterations must be >= 1")
        check(self.stagnation_window >= 1, "stagnation_window must be >= 1")
        check(self.stagnation_threshold >= 0, "stagnation_threshold must be >= 0")
        check(0 <= self.crossover_probability <= 1, "crossover_probability must lie in [0, 1]")
        check(self.mutation_probability is None or 0 <= self.mutation_probability <= 1,
              "mutation_probability must lie in [0, 1]")
        check(self.tournament_size >= 2, "tournament_size must be >= 2")
        check(0 <= self.elite_count < self.population_size,
              "elite_count must satisfy 0 <= elite_count < population_size")
        check(0 <= self.rng_seed < 2 ** 64, "rng_seed must be an unsigned 64-bit integer")
        check(self.fixed_N is None or self.fixed_N >= 0, "fixed_N must be non-negative")

    def mutation_rate(self, P: int) -> float:
        return 1.0 / P if self.mutation_probability is None else self.mutation_probability


@dataclass
class RunTrace:
    best_costs: list = field(default_factory=list)
    i_conv: int = 0
    reason: str = "max-iterations"
    wall_time: float = 0.0
    evaluations: int = 0

    def to_csv(self, path, comment: str | None = None) -> None:
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("iteration,best_cost\n")
            for i, c in enumerate(self.best_costs):
                fh.write(f"{i},{c:.12g}\n")


def _finite_or_none(x: float):
    return float(x) if np.isfinite(x) else None


@dataclass
class SynthesisResult:
    mode: str
    parent: np.ndarray
    layout: np.ndarray
    shift: int
    cost: float
    xi: float
    xi_parent: float
    sll: float
    sll_parent: float
    trace: RunTrace
    shift_errors: np.ndarray | None = None
    target: AutocorrTarget | None = None
    aux: AuxExcitations | None = None

    @property
    def num_elements(self) -> int:
        return int(self.layout.sum())

    def summary(self) -> dict:
        out = {
            "mode": self.mode,
            "bits": self.layout.astype(int).tolist(),
            "parent_bits": self.parent.astype(int).tolist(),
            "N": self.num_elements,
            "shift": int(self.shift),
            "cost": float(self.cost),
            "xi": float(self.xi),
            "xi_parent": float(self.xi_parent),
            "sll_db": _finite_or_none(self.sll),
            "sll_parent_db": _finite_or_none(self.sll_parent),
            "i_conv": int(self.trace.i_conv),
            "termination": self.trace.reason,
            "evaluations": int(self.trace.evaluations),
        }
        if self.aux is not None:
            out["aux_weights"] = [float(f"{w:.12g}") for w in self.aux.weights]
        return out


def _stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([tag, int(seed)])


def repair_count(pop: np.ndarray, N: int, rng: np.random.Generator) -> np.ndarray:
    """Force exactly N ones per row by random flips toward the quota.

    Ones are ranked before zeros, each group in random order; the first N
    ranked positions are kept. Rows already at N are left unchanged.
    """
    Q, P = pop.shape
    if not 0 <= N <= P:
        raise ValueError(f"fixed_N={N} is outside [0, {P}]")
    keys = rng.random((Q, P)) + np.where(pop == 1, 0.0, 2.0)
    keep = np.argsort(keys, axis=1, kind="stable")[:, :N]
    out = np.zeros_like(pop)
    np.put_along_axis(out, keep, 1, axis=1)
    return out


def initialize_me(config: GaConfig, P: int) -> np.ndarray:
    """Independent fair random bits, optionally repaired to ``config.fixed_N`` ones."""
    if config.fixed_N is not None and config.fixed_N > P:
        raise ValueError(f"fixed_N={config.fixed_N} exceeds P={P}")
    rng = _stream(config.rng_seed, 0)
    pop = rng.integers(0, 2, size=(config.population_size, P), dtype=np.int8)
    if config.fixed_N is not None:
        pop = repair_count(pop, config.fixed_N, rng)
    return pop


def initialize_fpe(config: GaConfig, w: AuxExcitations | np.ndarray) -> np.ndarray:
    """Row q holds the rounded auxiliary excitations cyclically shifted by q."""
    weights = w.weights if isinstance(w, AuxExcitations) else np.asarray(w, dtype=float)
    P = weights.size
    Q = config.population_size
    base = (weights >= 0.5).astype(np.int8)
    rows = min(Q, P)
    idx = (np.arange(P)[None, :] + np.arange(rows)[:, None]) % P
    pop = base[idx]
    if Q > P:
        pop = np.vstack([pop, initialize_me(replace(config, fixed_N=None), P)[: Q - P]])
    if config.fixed_N is not None:
        pop = repair_count(pop, config.fixed_N, _stream(config.rng_seed, 2))
    return pop


def cost_ad(bits, target: AutocorrTarget) -> float:
    a = as_bits(bits)
    if a.size != target.P:
        raise ValueError(f"length mismatch: {a.size} vs target {target.P}")
    diff = autocorrelation(a) - target.values
    return float(np.mean(diff ** 2))


def cost_ad_batch(population, target: AutocorrTarget) -> np.ndarray:
    diff = autocorrelation_batch(population) - target.values[None, :]
    return np.mean(diff ** 2, axis=1)


def _tournament(costs: np.ndarray, n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    entrants = rng.integers(0, costs.size, size=(n, k))
    return entrants[np.arange(n), np.argmin(costs[entrants], axis=1)]


def evolve(population, cost, config: GaConfig) -> tuple[np.ndarray, RunTrace]:
    """Run the GA from ``population``; return the best-ever individual and its trace.

    ``cost`` is an :class:`AutocorrTarget` or any callable mapping a (Q, P)
    array to Q costs.
    """
    start = time.perf_counter()
    batch_cost: Callable = (
        (lambda pop: cost_ad_batch(pop, cost)) if isinstance(cost, AutocorrTarget) else cost
    )
    pop = np.array(population, dtype=np.int8, copy=True)
    Q, P = pop.shape
    if Q != config.population_size:
        raise ValueError(f"population has {Q} rows, config expects {config.population_size}")
    rng = _stream(config.rng_seed, 1)
    pm = config.mutation_rate(P)
    L, thr = config.stagnation_window, config.stagnation_threshold
    n_child = Q - config.elite_count

    costs = np.asarray(batch_cost(pop), dtype=float)
    trace = RunTrace(evaluations=Q)
    b = int(np.argmin(costs))
    best_cost, best = float(costs[b]), pop[b].copy()
    trace.best_costs.append(best_cost)
    trace.i_conv = config.max_iterations

    for i in range(1, config.max_iterations + 1):
        elite = np.argsort(costs, kind="stable")[: config.elite_count]
        n_pairs = (n_child + 1) // 2
        p1 = pop[_tournament(costs, n_pairs, config.tournament_size, rng)]
        p2 = pop[_tournament(costs, n_pairs, config.tournament_size, rng)]
        cut = rng.integers(1, P, size=n_pairs)
        do_cross = rng.random(n_pairs) < config.crossover_probability
        head = (np.arange(P)[None, :] < cut[:, None]) & do_cross[:, None]
        c1 = np.where(head, p1, p2)
        c2 = np.where(head, p2, p1)
        # without crossover the parents pass through unchanged
        c1 = np.where(do_cross[:, None], c1, p1)
        c2 = np.where(do_cross[:, None], c2, p2)
        children = np.vstack([c1, c2])[:n_child]
        flips = rng.random(children.shape) < pm
        children = np.where(flips, 1 - children, children).astype(np.int8)
        if config.fixed_N is not None:
            children = repair_count(children, config.fixed_N, rng)

        child_costs = np.asarray(batch_cost(children), dtype=float)
        trace.evaluations += children.shape[0]
        pop = np.vstack([pop[elite], children])
        costs = np.concatenate([costs[elite], child_costs])

        b = int(np.argmin(costs))
        if costs[b] < best_cost:
            best_cost, best = float(costs[b]), pop[b].copy()
        trace.best_costs.append(best_cost)

        if i > L:
            window = np.mean(trace.best_costs[i - L: i])
            if abs(best_cost - window) <= thr:
                trace.i_conv = i
                trace.reason = "stagnation"
                break

    trace.wall_time = time.perf_counter() - start
    return best, trace


def post_ga_cyclic_shift(parent, mask: Mask, grid: GridSpec, dense_factor: int = 20,
                         metric: str = "step"):
    """Pick the cyclic shift of ``parent`` with the smallest mask matching error.

    Returns ``(layout, shift, xi, errors)`` where ``errors[s]`` is the error of
    shift s. Exactly P patterns are evaluated; ties go to the smallest shift.
    """
    shifts = all_shifts(as_bits(parent, grid.num_slots))
    u = grid.dense_grid(dense_factor)
    errors = violation_measure(normalized_power(shifts, grid, u), mask(u), u, metric)
    s = int(np.argmin(errors))
    return shifts[s], s, float(errors[s]), errors


def _sll_or_nan(curve, mask: Mask) -> float:
    # a mask with no sidelobe region leaves the SLL undefined
    if np.all(mask.in_mainlobe(curve.u)):
        return float("nan")
    return sidelobe_level(curve, mask)


def _finish(mode, parent, trace, cost, mask, grid, dense_factor, metric, shift_step=True,
            target=None, aux=None) -> SynthesisResult:
    u = grid.dense_grid(dense_factor)
    parent_curve = power_pattern(parent, grid, u)
    xi_parent = float(violation_measure(parent_curve.values, mask(u), u, metric))
    if shift_step:
        layout, shift, xi, errors = post_ga_cyclic_shift(parent, mask, grid, dense_factor, metric)
    else:
        layout, shift, xi, errors = parent.copy(), 0, xi_parent, None
    return SynthesisResult(
        mode=mode,
        parent=parent,
        layout=layout,
        shift=shift,
        cost=float(cost),
        xi=xi,
        xi_parent=xi_parent,
        sll=_sll_or_nan(power_pattern(layout, grid, u), mask),
        sll_parent=_sll_or_nan(parent_curve, mask),
        trace=trace,
        shift_errors=errors,
        target=target,
        aux=aux,
    )


def _with_count(config: GaConfig, N: int, constrain_count: bool) -> GaConfig:
    return replace(config, fixed_N=N) if constrain_count else config


def run_me_ad(mask: Mask, grid: GridSpec, N: int, config: GaConfig = GaConfig(), *,
              constrain_count: bool = True, dense_factor: int = 20,
              metric: str = "step") -> SynthesisResult:
    if N is None or N < 1:
        raise ValueError("ME synthesis needs an element count N >= 1")
    start = time.perf_counter()
    target = target_me(sample_mask(mask, grid), N)
    cfg = _with_count(config, N, constrain_count)
    parent, trace = evolve(initialize_me(cfg, grid.num_slots), target, cfg)
    res = _finish("me-ad", parent, trace, cost_ad(parent, target), mask, grid, dense_factor,
                  metric, target=target)
    trace.wall_time = time.perf_counter() - start
    return res


def fpe_default_count(aux: AuxExcitations) -> int:
    return max(1, int(aux.rounded().sum()))


def run_fpe_ad(mask: Mask, grid: GridSpec, N: int | None = None, config: GaConfig = GaConfig(), *,
               constrain_count: bool = True, dense_factor: int = 20, metric: str = "step",
               aux: AuxExcitations | None = None, afpa_objective: str = "gain") -> SynthesisResult:
    """Two-step synthesis: auxiliary array first, then autocorrelation matching.

    Raises :class:`adthin.afpa.InfeasibleMaskError` before any GA work when the
    mask admits no auxiliary array.
    """
    start = time.perf_counter()
    if aux is None:
        aux = solve_afpa(mask, grid, objective=afpa_objective)
    if N is None:
        N = fpe_default_count(aux)
    if N < 1:
        raise ValueError("FPE synthesis needs an element count N >= 1")
    target = target_fpe(feasible_samples(aux, grid), N)
    cfg = _with_count(config, N, constrain_count)
    parent, trace = evolve(initialize_fpe(cfg, aux), target, cfg)
    res = _finish("fpe-ad", parent, trace, cost_ad(parent, target), mask, grid, dense_factor,
                  metric, target=target, aux=aux)
    trace.wall_time = time.perf_counter() - start
    return res


def config_dict(config: GaConfig) -> dict:
    return asdict(config)
