"""Power patterns, mask-violation metrics and sidelobe levels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .autocorr import sequence_spectrum
from .layout import GridSpec, Mask, as_bits, linear_to_db

# Relative slack on the mask comparison so that a pattern touching the mask
# (e.g. an exact sample match) is not flagged through rounding.
COMPLIANCE_RTOL = 1e-9


@dataclass(frozen=True)
class ElementPattern:
    """Embedded element power pattern |F(u)|^2; ``None`` tables mean isotropic."""

    u: np.ndarray | None = None
    power: np.ndarray | None = None

    def __post_init__(self):
        if (self.u is None) != (self.power is None):
            raise ValueError("give both u and power, or neither")
        if self.u is None:
            return
        u = np.asarray(self.u, dtype=float)
        pw = np.asarray(self.power, dtype=float)
        if u.shape != pw.shape or u.ndim != 1 or u.size < 2:
            raise ValueError("element pattern table must be two equal-length 1-D arrays")
        if np.any(np.diff(u) <= 0):
            raise ValueError("element pattern u-grid must be strictly increasing")
        if np.any(pw < 0):
            raise ValueError("element power pattern must be non-negative")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "power", pw)
        if not self(np.array([0.0]))[0] > 0:
            raise ValueError("element pattern must be positive at broadside")

    @property
    def isotropic(self) -> bool:
        return self.u is None

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.isotropic:
            return np.ones_like(u)
        return np.interp(u, self.u, self.power)


ISOTROPIC = ElementPattern()


@dataclass(frozen=True)
class PatternCurve:
    u: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.u.shape != self.values.shape:
            raise ValueError("u and values must have the same shape")
        if np.any(np.diff(self.u) <= 0):
            raise ValueError("pattern grid must be strictly increasing")

    @property
    def db(self) -> np.ndarray:
        return linear_to_db(self.values)

    def to_csv(self, path, mask: Mask | None = None, comment: str | None = None) -> None:
        with open(path, "w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            w = csv.writer(fh)
            w.writerow(["u", "value_dB"] + (["mask_dB"] if mask is not None else []))
            mask_db = mask.level_db(self.u) - mask.peak_db if mask is not None else None
            for i, (u, v) in enumerate(zip(self.u, self.db)):
                row = [f"{u:.10g}", f"{v:.10g}"]
                if mask_db is not None:
                    row.append(f"{mask_db[i]:.10g}")
                w.writerow(row)


@lru_cache(maxsize=32)
def _steering(P: int, spacing: float, u_key: bytes) -> np.ndarray:
    u = np.frombuffer(u_key, dtype=float)
    d = (np.arange(P) - (P - 1) / 2.0) * spacing
    S = np.exp(2j * np.pi * np.outer(u, d))
    S.setflags(write=False)
    return S


def steering_matrix(grid: GridSpec, u) -> np.ndarray:
    """(len(u), P) matrix of exp(j 2 pi d_p u); cached per grid/u pair."""
    u = np.ascontiguousarray(u, dtype=float)
    return _steering(grid.num_slots, grid.spacing, u.tobytes())


def normalized_power(population, grid: GridSpec, u, element: ElementPattern = ISOTROPIC) -> np.ndarray:
    """Normalized power patterns of a (Q, P) population on the points ``u``.

    Shared by :func:`power_pattern` and the pattern-domain cost so both go
    through one code path.
    """
    pop = np.asarray(population, dtype=float)
    counts = pop.sum(axis=1)
    if np.any(counts < 1):
        raise ValueError("pattern undefined for an empty layout (N = 0)")
    af = pop @ steering_matrix(grid, u).T
    out = (af.real ** 2 + af.imag ** 2) / (counts ** 2)[:, None]
    if not element.isotropic:
        out *= element(u)[None, :] / element(np.array([0.0]))[0]
    return out


def power_pattern(bits, grid: GridSpec, u=None, element: ElementPattern = ISOTROPIC,
                  dense_factor: int = 20) -> PatternCurve:
    a = as_bits(bits, grid.num_slots)
    u = grid.dense_grid(dense_factor) if u is None else np.asarray(u, dtype=float)
    return PatternCurve(u=u, values=normalized_power(a[None, :], grid, u, element)[0])


def pattern_samples(bits, grid: GridSpec) -> np.ndarray:
    """Normalized pattern at u_k, obtained from the spectrum as Gamma_k / N^2."""
    a = as_bits(bits, grid.num_slots)
    N = int(a.sum())
    if N < 1:
        raise ValueError("pattern undefined for an empty layout (N = 0)")
    return sequence_spectrum(a).values / N ** 2


def interpolation_kernel(nu, P: int) -> np.ndarray:
    """sin(P nu/2) / (P sin(nu/2)) * exp(j (P-1) nu / 2), equal to 1 at nu = 2 pi m."""
    nu = np.asarray(nu, dtype=float)
    half = np.sin(nu / 2.0)
    singular = np.abs(half) < 1e-12
    safe = np.where(singular, 1.0, half)
    ratio = np.sin(P * nu / 2.0) / (P * safe)
    val = ratio * np.exp(1j * (P - 1) * nu / 2.0)
    return np.where(singular, 1.0 + 0j, val)


def interpolated_pattern(bits, grid: GridSpec, u=None, dense_factor: int = 20) -> PatternCurve:
    """Rebuild the normalized pattern from the spectrum magnitudes and phases."""
    a = as_bits(bits, grid.num_slots)
    N = int(a.sum())
    if N < 1:
        raise ValueError("pattern undefined for an empty layout (N = 0)")
    u = grid.dense_grid(dense_factor) if u is None else np.asarray(u, dtype=float)
    P = grid.num_slots
    spec = sequence_spectrum(a)
    coef = np.sqrt(spec.values) * np.exp(1j * spec.phases)
    nu = 2.0 * np.pi * grid.spacing * u[:, None] - 2.0 * np.pi * np.arange(P)[None, :] / P
    field = interpolation_kernel(nu, P) @ coef
    return PatternCurve(u=u, values=np.abs(field) ** 2 / N ** 2)


def _check_covers(u: np.ndarray) -> None:
    if u.size < 2 or abs(u[0] + 1.0) > 1e-9 or abs(u[-1] - 1.0) > 1e-9:
        raise ValueError("pattern grid must span the visible range [-1, 1]")


def violation_measure(values, mask_values, u, metric: str = "step") -> np.ndarray:
    """Row-wise mask matching error for patterns sampled on ``u``.

    ``values`` may be 1-D or (Q, len(u)). ``metric="step"`` integrates the
    indicator of mask violation; ``"ramp"`` integrates the excess power.
    """
    excess = np.asarray(values) - mask_values * (1.0 + COMPLIANCE_RTOL)
    if metric == "step":
        integrand = (excess > 0).astype(float)
    elif metric == "ramp":
        integrand = np.maximum(excess, 0.0)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return np.trapezoid(integrand, u, axis=-1) / np.trapezoid(mask_values, u)


def mask_matching_error(curve: PatternCurve, mask: Mask, metric: str = "step") -> float:
    _check_covers(curve.u)
    return float(violation_measure(curve.values, mask(curve.u), curve.u, metric))


def sidelobe_level(curve: PatternCurve, mask: Mask) -> float:
    """Peak of the pattern outside the mask's mainlobe region, in dB."""
    side = ~mask.in_mainlobe(curve.u)
    if not np.any(side):
        raise ValueError("mask mainlobe covers the whole grid; no sidelobe region")
    return float(linear_to_db(np.max(curve.values[side])))
