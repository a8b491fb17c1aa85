"""Grid geometry, binary layout descriptors, cyclic shifts and pattern masks.

All lengths are in wavelengths. A thinning sequence is a plain 1-D numpy
array of 0/1 values (``int8``); :func:`as_bits` validates and normalizes
whatever the caller hands in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Breakpoint comparisons; mask edges and sample points are computed from the
# same expressions, so this only has to absorb rounding.
_EDGE_ATOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    num_slots: int
    spacing: float = 0.5

    def __post_init__(self):
        if int(self.num_slots) != self.num_slots or self.num_slots < 2:
            raise ValueError(f"num_slots must be an integer >= 2, got {self.num_slots!r}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")
        object.__setattr__(self, "num_slots", int(self.num_slots))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def P(self) -> int:
        return self.num_slots

    def sample_points(self) -> np.ndarray:
        """Unwrapped pattern sampling points u_k = k / (P dz), k = 0..P-1."""
        return np.arange(self.num_slots) / (self.num_slots * self.spacing)

    def dense_grid(self, factor: int = 20) -> np.ndarray:
        """Uniform grid of ``factor * P`` points spanning [-1, 1] inclusive."""
        return np.linspace(-1.0, 1.0, factor * self.num_slots)


def candidate_positions(grid: GridSpec) -> np.ndarray:
    P = grid.num_slots
    return (np.arange(P) - (P - 1) / 2.0) * grid.spacing


def as_bits(bits, length: int | None = None) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("thinning sequence must be one-dimensional")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("thinning sequence entries must be 0 or 1")
    if length is not None and arr.size != length:
        raise ValueError(f"expected {length} slots, got {arr.size}")
    return arr.astype(np.int8)


def element_count(bits) -> int:
    return int(np.sum(as_bits(bits), dtype=np.int64))


def cyclic_shift(bits, shift: int) -> np.ndarray:
    """Return the sequence whose p-th bit is ``bits[(p + shift) % P]``."""
    a = as_bits(bits)
    P = a.size
    if not 0 <= shift < P:
        raise ValueError(f"shift must lie in [0, {P}), got {shift}")
    return np.roll(a, -shift)


def all_shifts(bits) -> np.ndarray:
    """(P, P) array; row s is ``cyclic_shift(bits, s)``."""
    a = as_bits(bits)
    P = a.size
    idx = (np.arange(P)[:, None] + np.arange(P)[None, :]) % P
    return a[idx]


def hamming_distance(a, b) -> int:
    a = as_bits(a)
    b = as_bits(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return int(np.count_nonzero(a != b))


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def wrap_visible(u) -> np.ndarray:
    """Alias u into [-1, 1) by subtracting a multiple of 2."""
    u = np.asarray(u, dtype=float)
    return np.mod(u + 1.0, 2.0) - 1.0


class MaskError(ValueError):
    pass


@dataclass(frozen=True)
class Mask:
    """Piecewise-constant upper envelope over u in [-1, 1], levels in dB.

    ``segments`` is a tuple of ``(u_start, u_end, level_db)``. At a shared
    breakpoint the lower of the two adjacent levels applies, so a strict
    inequality such as ``-a < u < a`` for the mainlobe is honoured.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(a), float(b), float(lv)) for a, b, lv in self.segments)
        if not segs:
            raise MaskError("mask has no segments")
        if abs(segs[0][0] + 1.0) > _EDGE_ATOL:
            raise MaskError(f"mask must start at u=-1, starts at {segs[0][0]}")
        if abs(segs[-1][1] - 1.0) > _EDGE_ATOL:
            raise MaskError(f"mask must end at u=1, ends at {segs[-1][1]}")
        for i, (a, b, lv) in enumerate(segs):
            if not b > a:
                raise MaskError(f"segment {i} is empty or reversed: ({a}, {b})")
            if not np.isfinite(lv):
                raise MaskError(f"segment {i} has non-finite level {lv}")
            if i and abs(segs[i - 1][1] - a) > _EDGE_ATOL:
                kind = "gap" if a > segs[i - 1][1] else "overlap"
                raise MaskError(f"{kind} between segment {i - 1} and {i} at u={segs[i - 1][1]}")
        top = max(lv for _, _, lv in segs)
        at_top = [i for i, (_, _, lv) in enumerate(segs) if lv == top]
        if at_top != list(range(at_top[0], at_top[-1] + 1)):
            raise MaskError("maximum mask level must occupy one contiguous region")
        object.__setattr__(self, "segments", segs)

    @property
    def edges(self) -> np.ndarray:
        return np.array([s[0] for s in self.segments] + [self.segments[-1][1]])

    @property
    def levels_db(self) -> np.ndarray:
        return np.array([s[2] for s in self.segments])

    @property
    def peak_db(self) -> float:
        return float(self.levels_db.max())

    @property
    def mainlobe(self) -> tuple[float, float]:
        """Open interval where the mask attains its maximum level."""
        lv = self.levels_db
        idx = np.flatnonzero(lv == lv.max())
        return self.segments[idx[0]][0], self.segments[idx[-1]][1]

    def in_mainlobe(self, u) -> np.ndarray:
        lo, hi = self.mainlobe
        u = np.asarray(u, dtype=float)
        inside = (u > lo + _EDGE_ATOL) & (u < hi - _EDGE_ATOL)
        # a mainlobe touching the range end keeps that endpoint
        if lo <= -1.0 + _EDGE_ATOL:
            inside |= np.abs(u - lo) <= _EDGE_ATOL
        if hi >= 1.0 - _EDGE_ATOL:
            inside |= np.abs(u - hi) <= _EDGE_ATOL
        return inside

    def level_db(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if np.any(u < -1.0 - _EDGE_ATOL) or np.any(u > 1.0 + _EDGE_ATOL):
            raise MaskError("mask evaluated outside the visible range [-1, 1]")
        edges = self.edges
        lv = self.levels_db
        inner = edges[1:-1]
        seg = np.searchsorted(inner, u, side="right")
        out = lv[seg]
        # breakpoints take the lower neighbouring level
        near = np.searchsorted(inner, u - _EDGE_ATOL, side="left")
        near = np.clip(near, 0, max(inner.size - 1, 0))
        if inner.size:
            on_edge = np.abs(inner[near] - u) <= _EDGE_ATOL
            out = np.where(on_edge, np.minimum(lv[near], lv[near + 1]), out)
        return out

    def __call__(self, u) -> np.ndarray:
        """Linear (power) mask value relative to the mainlobe peak."""
        return db_to_linear(self.level_db(u) - self.peak_db)

    def to_dict(self) -> dict:
        return {
            "segments": [
                {"u_start": a, "u_end": b, "level_db": lv} for a, b, lv in self.segments
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mask":
        if not isinstance(data, dict) or set(data) != {"segments"}:
            raise MaskError("mask file must be an object with the single key 'segments'")
        segs = []
        for i, item in enumerate(data["segments"]):
            if isinstance(item, dict):
                missing = {"u_start", "u_end", "level_db"} - set(item)
                extra = set(item) - {"u_start", "u_end", "level_db"}
                if missing or extra:
                    raise MaskError(f"segment {i}: missing {sorted(missing)}, unknown {sorted(extra)}")
                segs.append((item["u_start"], item["u_end"], item["level_db"]))
            elif isinstance(item, (list, tuple)) and len(item) == 3:
                segs.append(tuple(item))
            else:
                raise MaskError(f"segment {i} must be an object or a 3-element list")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in segs[-1]):
                raise MaskError(f"segment {i} has non-numeric fields")
        return cls(tuple(segs))

    @classmethod
    def load(cls, path) -> "Mask":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise MaskError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(data)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def sample_mask(mask: Mask, grid: GridSpec) -> np.ndarray:
    """Linear mask values at the wrapped pattern sampling points."""
    return mask(wrap_visible(grid.sample_points()))


def default_halfwidth(grid: GridSpec) -> float:
    """First null of the fully populated array, 1 / (P dz)."""
    return 1.0 / (grid.num_slots * grid.spacing)


def flat_mask(grid: GridSpec, sll_db: float, halfwidth: float | None = None) -> Mask:
    """0 dB for |u| < halfwidth, ``sll_db`` elsewhere."""
    h = default_halfwidth(grid) if halfwidth is None else halfwidth
    if not 0 < h < 1:
        raise MaskError(f"mainlobe half-width must lie in (0, 1), got {h}")
    return Mask(((-1.0, -h, sll_db), (-h, h, 0.0), (h, 1.0, sll_db)))


def tapered_mask(grid: GridSpec, near_db: float = -15.0, far_db: float = -22.0,
                 steps: int = 4, halfwidth: float | None = None) -> Mask:
    """Sidelobe envelope descending in ``steps`` equal stairs from the mainlobe edge to |u| = 1."""
    h = default_halfwidth(grid) if halfwidth is None else halfwidth
    edges = np.linspace(h, 1.0, steps + 1)
    levels = np.linspace(near_db, far_db, steps)
    right = [(float(edges[i]), float(edges[i + 1]), float(levels[i])) for i in range(steps)]
    left = [(-b, -a, lv) for a, b, lv in reversed(right)]
    return Mask(tuple(left + [(-h, h, 0.0)] + right))


def irregular_mask(grid: GridSpec, kind: int = 1, halfwidth: float | None = None) -> Mask:
    """Asymmetric stepped sidelobe masks used by the benchmark scripts."""
    h = default_halfwidth(grid) if halfwidth is None else halfwidth
    if kind == 1:
        body = [(-1.0, -0.6, -20.0), (-0.6, -h, -14.0), (-h, h, 0.0),
                (h, 0.35, -14.0), (0.35, 0.65, -19.0), (0.65, 1.0, -16.0)]
    elif kind == 2:
        body = [(-1.0, -0.5, -18.0), (-0.5, -h, -14.0), (-h, h, 0.0),
                (h, 0.4, -14.0), (0.4, 1.0, -17.0)]
    else:
        raise MaskError(f"unknown irregular mask kind {kind}")
    for a, b, _ in body:
        if b <= a:
            raise MaskError("mainlobe too wide for the irregular mask breakpoints")
    return Mask(tuple(body))
