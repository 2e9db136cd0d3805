"""Initial states: Gaussian packets, superpositions, momentum diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qgrid import Grid, WaveFunction, inner

__all__ = [
    "GaussianSpec",
    "gaussian",
    "superpose",
    "negative_momentum_fraction",
    "overlap_matrix",
]


@dataclass(frozen=True)
class GaussianSpec:
    """Parameters of a Gaussian packet: center ``q0``, momentum ``p0``,
    spatial width ``sigma``.

    ``q0 >= 5 sigma`` keeps the left tail beyond ``x = 0`` below ~3e-7 in
    probability, so the packet genuinely starts on the positive half-line.
    Arrival-time runs use ``p0 < 0``; positive ``p0`` is permitted here for
    mirror/diagnostic states.
    """

    q0: float
    p0: float
    sigma: float

    def __post_init__(self):
        if not (self.q0 > 0 and np.isfinite(self.q0)):
            raise ValueError(f"q0 must be positive, got {self.q0}")
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not np.isfinite(self.p0):
            raise ValueError(f"p0 must be finite, got {self.p0}")
        if self.q0 < 5.0 * self.sigma:
            raise ValueError(
                f"q0 = {self.q0} violates the leakage guard q0 >= 5 sigma "
                f"(sigma = {self.sigma})"
            )


def gaussian(spec: GaussianSpec, grid: Grid) -> WaveFunction:
    """Normalized Gaussian packet ``exp(-(x-q0)^2/(4 sigma^2) + i p0 x)``.

    Raises if the momentum support would exceed the Nyquist bound or the
    packet does not fit inside the box.
    """
    if abs(spec.p0) + 2.0 / spec.sigma >= grid.p_max:
        raise ValueError(
            f"momentum support |p0| + 2/sigma = {abs(spec.p0) + 2.0 / spec.sigma:g} "
            f"exceeds the Nyquist bound p_max = {grid.p_max:g}"
        )
    if spec.q0 + 5.0 * spec.sigma > grid.half_width:
        raise ValueError(
            f"packet at q0 = {spec.q0} with sigma = {spec.sigma} does not fit "
            f"inside the box of half-width {grid.half_width}"
        )
    x = grid.x
    amp = np.exp(-((x - spec.q0) ** 2) / (4.0 * spec.sigma ** 2) + 1j * spec.p0 * x)
    amp /= np.sqrt(grid.dx * np.sum(np.abs(amp) ** 2))
    return WaveFunction(grid, amp, 0.0)


def superpose(terms: Sequence[tuple[complex, WaveFunction]]) -> WaveFunction:
    """Normalized linear combination ``sum_i c_i psi_i``.

    All states must live on the same grid and carry the same time label.
    Raises on an (numerically) zero-norm result.
    """
    if len(terms) == 0:
        raise ValueError("superpose requires at least one term")
    _, first = terms[0]
    grid = first.grid
    acc = np.zeros(grid.n_points, dtype=np.complex128)
    for coeff, psi in terms:
        if not psi.grid.compatible(grid):
            raise ValueError("mismatched grids in superposition")
        if psi.time_label != first.time_label:
            raise ValueError("superposed states must share a time label")
        acc += complex(coeff) * psi.amplitudes
    nsq = grid.dx * np.sum(np.abs(acc) ** 2)
    if nsq < 1e-24:
        raise ValueError("superposition has zero norm")
    return WaveFunction(grid, acc / np.sqrt(nsq), first.time_label)


def negative_momentum_fraction(psi: WaveFunction) -> float:
    """Fraction of momentum-space probability carried by ``p < 0``.

    Arrival-time runs expect this to exceed ``1 - 1e-6``.
    """
    w = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    total = w.sum()
    if total == 0.0:
        raise ValueError("zero wave function has no momentum distribution")
    return float(w[psi.grid.p < 0].sum() / total)


def overlap_matrix(states: Sequence[WaveFunction]) -> np.ndarray:
    """Pairwise inner products; a diagnostic for "approximately orthogonal".

    Off-diagonal magnitudes below ~1e-3 are small enough that superposition
    components behave independently in history analyses.
    """
    n = len(states)
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = inner(states[i], states[j])
    return out
