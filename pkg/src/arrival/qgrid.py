"""Discretized 1D quantum states, exact free evolution, and the half-line
projectors.

The position lattice is offset by half a cell, ``x_j = -L + (j + 1/2) dx``,
so that no sample sits at ``x = 0``.  The step function ``theta(x)`` is then
unambiguous on the lattice and the two half-line projectors sum to the
identity exactly, amplitude by amplitude.

Units: ``hbar = 1`` throughout; the particle mass is carried by the grid.

Free evolution is performed spectrally (FFT, multiply by the kinetic phase,
inverse FFT), which is exact for band-limited states on the periodic box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "WaveFunction",
    "make_grid",
    "free_evolve",
    "project_positive",
    "project_negative",
    "inner",
    "norm",
    "norm_sq",
    "momentum_probabilities",
    "required_half_width",
]


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform position lattice on ``[-L, L)`` with its FFT momentum dual.

    Attributes
    ----------
    n_points : int
        Number of lattice sites; a power of two.
    half_width : float
        Box half-width ``L``; the lattice spans ``[-L, L)``.
    mass : float
        Particle mass (``hbar = 1``).
    dx : float
        Lattice spacing ``2 L / n_points``.
    offset : float
        Half-cell shift ``dx / 2`` applied to every site.
    x : ndarray
        Site positions ``x_j = -L + (j + 1/2) dx``.
    p : ndarray
        Momentum lattice in FFT order, ``p_k = 2 pi k / (2 L)``.
    """

    n_points: int
    half_width: float
    mass: float
    dx: float
    offset: float
    x: np.ndarray
    p: np.ndarray

    @property
    def p_max(self) -> float:
        """Nyquist momentum ``pi * n_points / (2 L)``."""
        return np.pi * self.n_points / (2.0 * self.half_width)

    @property
    def key(self) -> tuple:
        return (self.n_points, self.half_width, self.mass)

    def compatible(self, other: "Grid") -> bool:
        """True when two grids share lattice and mass (states may be mixed)."""
        return self.key == other.key


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a :class:`Grid`.

    ``time_label`` records which instant the snapshot represents.  Initial
    states are unit-normalized (``dx * sum |psi_j|^2 = 1``); history branch
    vectors are deliberately left unnormalized, their squared norms are the
    history probabilities.
    """

    grid: Grid
    amplitudes: np.ndarray
    time_label: float = 0.0

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=np.complex128)
        if arr.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitude vector has shape {arr.shape}, "
                f"expected ({self.grid.n_points},)"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    def norm_sq(self) -> float:
        return float(self.grid.dx * np.sum(np.abs(self.amplitudes) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))


def make_grid(n_points: int, half_width: float, mass: float = 1.0) -> Grid:
    """Build the offset position lattice and matching FFT momentum lattice.

    Parameters
    ----------
    n_points : int
        Power of two, at least 256.
    half_width : float
        Box half-width ``L > 0``.
    mass : float
        Particle mass, positive.
    """
    if n_points < 256 or (n_points & (n_points - 1)) != 0:
        raise ValueError(f"n_points must be a power of two >= 256, got {n_points}")
    if not (half_width > 0) or not np.isfinite(half_width):
        raise ValueError(f"half_width must be positive, got {half_width}")
    if not (mass > 0) or not np.isfinite(mass):
        raise ValueError(f"mass must be positive, got {mass}")
    dx = 2.0 * half_width / n_points
    x = -half_width + (np.arange(n_points) + 0.5) * dx
    p = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    x.setflags(write=False)
    p.setflags(write=False)
    return Grid(
        n_points=n_points,
        half_width=float(half_width),
        mass=float(mass),
        dx=dx,
        offset=0.5 * dx,
        x=x,
        p=p,
    )


def free_evolve(psi: WaveFunction, t: float) -> WaveFunction:
    """Evolve by the free Hamiltonian ``p^2 / 2m`` for time ``t``.

    Spectral propagation: exact for band-limited states, unitary to
    rounding.  ``t`` may be negative.  ``t == 0`` returns the input object.
    """
    if not np.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    if t == 0.0:
        return psi
    g = psi.grid
    phase = np.exp((-0.5j * t / g.mass) * g.p ** 2)
    out = np.fft.ifft(np.fft.fft(psi.amplitudes) * phase)
    return WaveFunction(g, out, psi.time_label + t)


def project_positive(psi: WaveFunction) -> WaveFunction:
    """Multiply amplitudes by the indicator of ``x > 0``; not renormalized."""
    out = np.where(psi.grid.x > 0, psi.amplitudes, 0.0)
    return WaveFunction(psi.grid, out, psi.time_label)


def project_negative(psi: WaveFunction) -> WaveFunction:
    """Multiply amplitudes by the indicator of ``x < 0``; not renormalized."""
    out = np.where(psi.grid.x < 0, psi.amplitudes, 0.0)
    return WaveFunction(psi.grid, out, psi.time_label)


def inner(phi: WaveFunction, psi: WaveFunction) -> complex:
    """L2 inner product ``dx * sum conj(phi_j) psi_j`` (antilinear in phi)."""
    if not phi.grid.compatible(psi.grid):
        raise ValueError("mismatched grids")
    return complex(phi.grid.dx * np.vdot(phi.amplitudes, psi.amplitudes))


def norm_sq(psi: WaveFunction) -> float:
    return psi.norm_sq()


def norm(psi: WaveFunction) -> float:
    return psi.norm()


def momentum_probabilities(psi: WaveFunction) -> tuple[np.ndarray, np.ndarray]:
    """Momentum lattice (FFT order) and the probability carried by each bin.

    Probabilities are normalized to sum to one, so the result is usable for
    spectral moments of any nonzero state regardless of its L2 norm.
    """
    w = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    total = w.sum()
    if total == 0.0:
        raise ValueError("zero wave function has no momentum distribution")
    return psi.grid.p, w / total


def required_half_width(
    q0: float, p0: float, sigma: float, tau: float, mass: float = 1.0
) -> float:
    """Smallest box half-width keeping a Gaussian packet clear of the edges.

    Covers the initial center plus ten widths, the ballistic excursion over
    the horizon ``tau``, and ten spread widths at the end of the horizon.
    Keeps periodic wrap-around leakage below ~1e-8 for the whole run.
    """
    spread = sigma * np.sqrt(1.0 + tau ** 2 / (4.0 * mass ** 2 * sigma ** 4))
    return q0 + 10.0 * sigma + abs(p0) * tau / mass + 10.0 * spread
