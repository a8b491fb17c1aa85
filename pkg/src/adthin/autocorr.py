"""Cyclic autocorrelation, its DFT, and autocorrelation targets.

Transforms use the sign convention of the pattern model: the forward DFT
carries ``exp(+j 2 pi s k / P)`` and the inverse carries ``exp(-j ...)`` with
the ``1/P`` factor. Direct O(P^2) summation is the default; ``method="fft"``
routes through numpy's FFT.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .layout import as_bits

IMAG_DISCARD_RTOL = 1e-9
IMAG_WARN_RTOL = 1e-6


class ImaginaryResidueWarning(RuntimeWarning):
    pass


@lru_cache(maxsize=64)
def _kernel(P: int, sign: int) -> np.ndarray:
    n = np.arange(P)
    # reduce the integer product mod P first so large P keeps full phase accuracy
    phase = 2.0 * np.pi * (np.outer(n, n) % P) / P
    K = np.exp(sign * 1j * phase)
    K.setflags(write=False)
    return K


def forward_dft(x, method: str = "direct") -> np.ndarray:
    """X_k = sum_s x_s exp(+j 2 pi s k / P)."""
    x = np.asarray(x)
    P = x.shape[-1]
    if method == "fft":
        return np.fft.ifft(x, axis=-1) * P
    if method != "direct":
        raise ValueError(f"unknown transform method {method!r}")
    return x @ _kernel(P, +1)


def inverse_dft(X, method: str = "direct") -> np.ndarray:
    """x_s = (1/P) sum_k X_k exp(-j 2 pi k s / P)."""
    X = np.asarray(X)
    P = X.shape[-1]
    if method == "fft":
        return np.fft.fft(X, axis=-1) / P
    if method != "direct":
        raise ValueError(f"unknown transform method {method!r}")
    return (X @ _kernel(P, -1)) / P


def _real_part(z: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    scale = max(float(np.max(np.abs(z.real), initial=0.0)), np.finfo(float).tiny)
    residue = float(np.max(np.abs(z.imag), initial=0.0)) / scale
    if residue > IMAG_WARN_RTOL:
        warnings.warn(
            f"{what}: imaginary residue {residue:.3g} (relative) suggests asymmetric input",
            ImaginaryResidueWarning,
            stacklevel=3,
        )
    return z.real.copy(), residue


def autocorrelation(bits) -> np.ndarray:
    """gamma_s = sum_p a_p a_{(p+s) mod P}, exact integers."""
    a = as_bits(bits).astype(np.int64)
    P = a.size
    idx = (np.arange(P)[:, None] + np.arange(P)[None, :]) % P  # [s, p] -> p+s
    return a[idx] @ a


def autocorrelation_batch(population) -> np.ndarray:
    """Row-wise cyclic autocorrelation of a (Q, P) 0/1 array.

    Computed as the inverse FFT of the row power spectra and rounded; entries
    are integers bounded by P, so rounding recovers them exactly while the
    float error stays far below 0.5.
    """
    pop = np.asarray(population, dtype=float)
    if pop.ndim != 2:
        raise ValueError("population must be a 2-D array")
    P = pop.shape[1]
    F = np.fft.rfft(pop, axis=1)
    g = np.fft.irfft(F.real ** 2 + F.imag ** 2, n=P, axis=1)
    return np.rint(g).astype(np.int64)


@dataclass(frozen=True)
class SpectrumSamples:
    values: np.ndarray
    phases: np.ndarray | None = None
    imag_residue: float = 0.0


def spectrum(gamma, method: str = "direct") -> SpectrumSamples:
    """DFT of an autocorrelation vector; real by the cyclic symmetry of gamma."""
    g = np.asarray(gamma, dtype=float)
    values, residue = _real_part(forward_dft(g, method), "spectrum")
    return SpectrumSamples(values=values, imag_residue=residue)


def sequence_spectrum(bits, method: str = "direct") -> SpectrumSamples:
    """|DFT(a)_k|^2 and the phases psi_k of the descriptor DFT."""
    A = forward_dft(as_bits(bits).astype(float), method)
    return SpectrumSamples(values=np.abs(A) ** 2, phases=np.angle(A))


def idft_coefficients(samples, method: str = "direct", return_residue: bool = False):
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    # transform round-off can leave zeros slightly negative
    floor = -1e-9 * max(1.0, float(np.max(np.abs(s), initial=0.0)))
    if np.any(s < floor):
        raise ValueError("pattern samples must be non-negative")
    mu, residue = _real_part(inverse_dft(s, method), "idft_coefficients")
    if return_residue:
        return mu, residue
    return mu


@dataclass(frozen=True)
class AutocorrTarget:
    values: np.ndarray
    kind: str
    num_elements: int
    imag_residue: float = field(default=0.0, compare=False)

    @property
    def P(self) -> int:
        return self.values.size


def _target(samples, N: int, kind: str) -> AutocorrTarget:
    if int(N) != N or N < 1:
        raise ValueError(f"element count must be a positive integer, got {N!r}")
    mu, residue = idft_coefficients(samples, return_residue=True)
    return AutocorrTarget(values=N * N * mu, kind=kind, num_elements=int(N), imag_residue=residue)


def target_me(mask_samples, N: int) -> AutocorrTarget:
    """Target autocorrelation that forces the pattern samples onto the mask."""
    return _target(mask_samples, N, "ME")


def target_fpe(feasible_samples, N: int) -> AutocorrTarget:
    """Target autocorrelation of the auxiliary fully populated array's pattern."""
    return _target(feasible_samples, N, "FPE")


def consistent_me_count(mask_samples) -> int:
    """Element count for which the ME target's zero-lag term equals N.

    gamma*_0 = N^2 * mean(M) must equal N for a binary sequence, which pins
    N = P / sum(M). Useful as a default when the caller has no preference.
    """
    m = np.asarray(mask_samples, dtype=float)
    return max(1, int(round(m.size / m.sum())))
