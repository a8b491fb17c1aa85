"""Pattern-domain reference: the same GA minimizing the mask matching error directly."""

from __future__ import annotations

import time

import numpy as np

from .layout import GridSpec, Mask, as_bits
from .optimizer import GaConfig, _finish, _with_count, evolve, initialize_me
from .pattern import normalized_power, violation_measure


def cost_pd_batch(population, mask: Mask, grid: GridSpec, dense_factor: int = 20,
                  metric: str = "step") -> np.ndarray:
    u = grid.dense_grid(dense_factor)
    return violation_measure(normalized_power(population, grid, u), mask(u), u, metric)


def cost_pd(bits, mask: Mask, grid: GridSpec, dense_factor: int = 20, metric: str = "step") -> float:
    a = as_bits(bits, grid.num_slots)
    return float(cost_pd_batch(a[None, :], mask, grid, dense_factor, metric)[0])


def run_pd(mask: Mask, grid: GridSpec, N: int, config: GaConfig = GaConfig(), *,
           constrain_count: bool = True, dense_factor: int = 20, metric: str = "step"):
    if N is None or N < 1:
        raise ValueError("PD synthesis needs an element count N >= 1")
    start = time.perf_counter()
    cfg = _with_count(config, N, constrain_count)
    u = grid.dense_grid(dense_factor)
    mask_u = mask(u)

    def fitness(pop):
        return violation_measure(normalized_power(pop, grid, u), mask_u, u, metric)

    parent, trace = evolve(initialize_me(cfg, grid.num_slots), fitness, cfg)
    cost = float(fitness(parent[None, :])[0])
    # shifts are not cost-equivalent in the pattern domain, so no shift step
    res = _finish("pd", parent, trace, cost, mask, grid, dense_factor, metric, shift_step=False)
    trace.wall_time = time.perf_counter() - start
    return res
