"""Auxiliary fully populated array: mask-compliant real excitations.

The excitations are restricted to be symmetric and real, so the array factor
is real and the mask bounds become linear inequalities. Two objectives are
available:

``"gain"`` (default)
    maximize AF(0) = sum(w) with 0 <= w <= 1 subject to
    |AF(u_i)| <= sqrt(M(u_i)) * AF(0). The unit bound plays the role of the
    isophoric element excitation, so an unconstrained mask returns w = 1.
``"margin"``
    fix AF(0) = 1 and maximize t subject to |AF(u_i)| <= (1 - t) sqrt(M(u_i)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .layout import GridSpec, Mask, candidate_positions

# The LP's own tolerances sit around 1e-9; anything below this is treated as
# an empty array (no nonzero excitation meets the mask).
_FEASIBLE_GAIN = 1e-6
_MAX_REFINE = 30


class InfeasibleMaskError(RuntimeError):
    """No symmetric real excitation satisfies the mask on the constraint grid."""


@dataclass(frozen=True)
class AuxExcitations:
    weights: np.ndarray
    objective: str = "gain"
    margin: float | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("excitations must be a 1-D array of length >= 2")
        if not np.allclose(w, w[::-1], rtol=0, atol=1e-12):
            raise ValueError("auxiliary excitations must be symmetric")
        object.__setattr__(self, "weights", w)

    @property
    def P(self) -> int:
        return self.weights.size

    def rounded(self) -> np.ndarray:
        return (self.weights >= 0.5).astype(np.int8)

    def to_csv(self, path, comment: str | None = None) -> None:
        with open(path, "w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            wr = csv.writer(fh)
            wr.writerow(["slot", "weight"])
            for p, v in enumerate(self.weights):
                wr.writerow([p, f"{v:.12g}"])


def constraint_grid(mask: Mask, size: int) -> np.ndarray:
    """Points in [0, 1] outside the mainlobe plus the mask breakpoints.

    Both halves of the visible range are represented by folding: the real
    symmetric array factor satisfies AF(-u) = AF(u), so a point u carries the
    tighter of M(u) and M(-u).
    """
    u = np.linspace(0.0, 1.0, max(int(size), 2))
    edges = np.abs(mask.edges)
    u = np.unique(np.concatenate([u, edges[(edges >= 0) & (edges <= 1)]]))
    side = ~(mask.in_mainlobe(u) & mask.in_mainlobe(-u))
    return u[side]


def _folded_mask(mask: Mask, u: np.ndarray) -> np.ndarray:
    return np.minimum(mask(u), mask(-u))


def _half_basis(grid: GridSpec, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """AF(u) = basis @ c for symmetric weights with half-vector c."""
    P = grid.num_slots
    H = (P + 1) // 2
    d = np.abs(candidate_positions(grid)[:H])
    mult = np.where(np.arange(H) == P // 2, 1.0, 2.0) if P % 2 else np.full(H, 2.0)
    return mult * np.cos(2.0 * np.pi * np.outer(u, d)), mult


def _expand(c: np.ndarray, P: int) -> np.ndarray:
    return np.concatenate([c, c[::-1][P % 2:]])


def _solve_lp(grid: GridSpec, u: np.ndarray, root: np.ndarray, objective: str):
    B, mult = _half_basis(grid, u)
    H = mult.size
    if objective == "gain":
        A_ub = np.vstack([B - root[:, None] * mult, -B - root[:, None] * mult])
        res = linprog(-mult, A_ub=A_ub, b_ub=np.zeros(A_ub.shape[0]),
                      bounds=[(0.0, 1.0)] * H, method="highs")
        if res.status != 0:
            raise InfeasibleMaskError(f"linear program failed: {res.message}")
        if -res.fun < _FEASIBLE_GAIN:
            raise InfeasibleMaskError("only the all-zero excitation satisfies the mask")
        return res.x, None
    col = root[:, None]
    A_ub = np.vstack([np.hstack([B, col]), np.hstack([-B, col])])
    b_ub = np.concatenate([root, root])
    A_eq = np.concatenate([mult, [0.0]])[None, :]
    res = linprog(np.r_[np.zeros(H), -1.0], A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0.0, None)] * H + [(None, 1.0)], method="highs")
    if res.status != 0:
        raise InfeasibleMaskError(f"linear program failed: {res.message}")
    margin = float(res.x[-1])
    if margin < -1e-9:
        raise InfeasibleMaskError(f"best achievable margin {margin:.3g} violates the mask")
    return res.x[:H], margin


def solve_afpa(mask: Mask, grid: GridSpec, constraint_grid_size: int | None = None,
               objective: str = "gain") -> AuxExcitations:
    P = grid.num_slots
    if not mask.in_mainlobe(np.array([0.0]))[0]:
        raise ValueError("mask mainlobe must contain broadside (u = 0)")
    size = 10 * P if constraint_grid_size is None else constraint_grid_size
    u = constraint_grid(mask, size)
    if u.size == 0:
        # nothing below the mainlobe level: uniform excitation is optimal
        return AuxExcitations(np.ones(P), objective=objective, margin=None)

    if objective not in ("gain", "margin"):
        raise ValueError(f"unknown AFPA objective {objective!r}")
    check = np.linspace(0.0, 1.0, 20 * max(int(size), 2) + 1)
    check = check[~(mask.in_mainlobe(check) & mask.in_mainlobe(-check))]
    check_root = np.sqrt(_folded_mask(mask, check))
    for _ in range(_MAX_REFINE):
        c, margin = _solve_lp(grid, u, np.sqrt(_folded_mask(mask, u)), objective)
        B, mult = _half_basis(grid, check)
        af = B @ c
        bound = check_root * (mult @ c) * (1.0 + 1e-9)
        bad = np.abs(af) > bound
        if not np.any(bad):
            break
        # add the worst offender of every violating run
        runs = np.split(np.flatnonzero(bad), np.flatnonzero(np.diff(np.flatnonzero(bad)) > 1) + 1)
        extra = [r[np.argmax(np.abs(af[r]) - bound[r])] for r in runs]
        u = np.unique(np.concatenate([u, check[extra]]))

    w = _expand(c, P)
    w = np.where(np.abs(w) < 1e-12, 0.0, w)
    return AuxExcitations(w / np.max(np.abs(w)), objective=objective, margin=margin)


def excitation_pattern(w, grid: GridSpec, u) -> np.ndarray:
    """Normalized power pattern E(u; w) / E(0; w) of real excitations."""
    w = np.asarray(w, dtype=float)
    d = candidate_positions(grid)
    af0 = w.sum()
    if abs(af0) < 1e-15:
        raise ValueError("array factor vanishes at broadside")
    af = np.exp(2j * np.pi * np.outer(np.asarray(u, dtype=float), d)) @ w
    return np.abs(af) ** 2 / af0 ** 2


def feasible_samples(w: AuxExcitations | np.ndarray, grid: GridSpec) -> np.ndarray:
    """Normalized auxiliary pattern at u_k = k / (P dz)."""
    weights = w.weights if isinstance(w, AuxExcitations) else np.asarray(w, dtype=float)
    if weights.size != grid.num_slots:
        raise ValueError("excitation length does not match the grid")
    out = excitation_pattern(weights, grid, grid.sample_points())
    out[0] = 1.0
    return out
