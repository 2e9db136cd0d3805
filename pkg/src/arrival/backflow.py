"""Backflow: the crossing operator on negative momenta and its spectrum.

The crossing operator for a time window, restricted to negative-momentum
plane waves, has the closed-form matrix elements

    K(p, p') = -(p + p') / (4 pi m) * integral_{t1}^{t2} exp(i (E - E') t) dt,

with ``E = p^2 / 2m``.  Discretized on a midpoint momentum lattice with the
quadrature weights absorbed symmetrically, it is a Hermitian matrix whose
spectrum is real; its negative eigenvalues are the backflow effect: states
built entirely from negative momenta whose crossing probability is negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericalError
from .qgrid import Grid, WaveFunction, free_evolve, inner, norm_sq, project_positive
from .states import negative_momentum_fraction

__all__ = [
    "BackflowKernel",
    "InterferenceWitness",
    "build_kernel",
    "min_eigenvalue",
    "backflow_state",
    "interference_witness",
    "natural_momentum_scale",
]


def natural_momentum_scale(t1: float, t2: float, mass: float = 1.0) -> float:
    """Momentum unit ``sqrt(m / (t2 - t1))`` set by the time window."""
    return float(np.sqrt(mass / (t2 - t1)))


@dataclass(frozen=True)
class BackflowKernel:
    """Crossing operator discretized on negative-momentum quadrature nodes.

    ``K`` carries the symmetrized weights ``sqrt(w_i w_j)``, so it is a plain
    Hermitian matrix and its eigenproblem is standard.
    """

    p_nodes: np.ndarray
    weights: np.ndarray
    t1: float
    t2: float
    mass: float
    K: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.p_nodes.size

    def quadratic_form(self, v: np.ndarray) -> float:
        """Expected crossing probability ``v^dag K v`` of a unit vector."""
        return float(np.real(np.conj(v) @ self.K @ v))


def build_kernel(
    n_nodes: int, p_max: float, t1: float, t2: float, mass: float = 1.0
) -> BackflowKernel:
    """Assemble the Hermitian crossing kernel on a midpoint momentum lattice.

    Parameters
    ----------
    n_nodes : int
        Number of quadrature nodes on ``(-p_max, 0)``.
    p_max : float
        Momentum cutoff; ~10 in units of ``sqrt(m / (t2 - t1))`` captures the
        backflow eigenvalue well.
    t1, t2 : float
        Crossing window, ``t1 < t2``.
    """
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if not (p_max > 0 and np.isfinite(p_max)):
        raise ValueError(f"p_max must be positive, got {p_max}")
    if not (np.isfinite(t1) and np.isfinite(t2)) or t2 <= t1:
        raise ValueError(f"degenerate interval [{t1}, {t2}]")
    if not (mass > 0 and np.isfinite(mass)):
        raise ValueError(f"mass must be positive, got {mass}")

    w = p_max / n_nodes
    p = -p_max + (np.arange(n_nodes) + 0.5) * w
    weights = np.full(n_nodes, w)

    energy = p ** 2 / (2.0 * mass)
    omega = energy[:, None] - energy[None, :]
    # Time integral of exp(i omega t); the diagonal is the omega -> 0 limit.
    with np.errstate(divide="ignore", invalid="ignore"):
        integral = (np.exp(1j * omega * t2) - np.exp(1j * omega * t1)) / (1j * omega)
    np.fill_diagonal(integral, t2 - t1)
    kernel = -(p[:, None] + p[None, :]) / (4.0 * np.pi * mass) * integral
    kernel *= np.sqrt(np.outer(weights, weights))
    kernel = 0.5 * (kernel + kernel.conj().T)
    return BackflowKernel(
        p_nodes=p, weights=weights, t1=float(t1), t2=float(t2), mass=float(mass),
        K=kernel,
    )


def min_eigenvalue(kernel: BackflowKernel) -> tuple[float, np.ndarray]:
    """Most negative eigenvalue of the kernel and its unit eigenvector.

    The eigenvector's global phase is fixed (largest component made real and
    positive) so repeated runs are bit-identical.
    """
    try:
        evals, evecs = np.linalg.eigh(kernel.K)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on backflow kernel: {exc}") from exc
    vec = evecs[:, 0].copy()
    pivot = np.argmax(np.abs(vec))
    phase = vec[pivot] / abs(vec[pivot])
    vec = vec / phase
    return float(evals[0]), vec


def backflow_state(
    kernel: BackflowKernel, eigvec: np.ndarray, grid: Grid
) -> WaveFunction:
    """Position-space state carrying the kernel eigenvector's momenta.

    The eigenvector samples a momentum amplitude density
    ``phi(p_i) = v_i / sqrt(w_i)``; that density is spread piecewise-constant
    over each quadrature cell and realized on the grid's momentum lattice, so
    the state is exactly band-limited and supported on ``p < 0``.  Requires
    the grid to resolve the cells: ``pi / L <= w`` and kernel cutoff below
    the grid Nyquist bound.
    """
    if eigvec.shape != (kernel.n_nodes,):
        raise ValueError("eigvec length does not match kernel nodes")
    p_cut = -kernel.p_nodes[0] + 0.5 * kernel.weights[0]
    if p_cut >= grid.p_max:
        raise ValueError(
            f"kernel momentum cutoff {p_cut:g} exceeds grid Nyquist bound "
            f"{grid.p_max:g}"
        )
    dp = np.pi / grid.half_width
    if dp > kernel.weights.min():
        raise ValueError(
            f"grid momentum resolution {dp:g} is coarser than the quadrature "
            f"cell width {kernel.weights.min():g}; enlarge half_width"
        )

    density = eigvec / np.sqrt(kernel.weights)
    cell_edges = np.concatenate(
        [kernel.p_nodes - 0.5 * kernel.weights, [kernel.p_nodes[-1] + 0.5 * kernel.weights[-1]]]
    )
    coeff = np.zeros(grid.n_points, dtype=np.complex128)
    idx = np.searchsorted(cell_edges, grid.p, side="right") - 1
    inside = (idx >= 0) & (idx < kernel.n_nodes) & (grid.p < 0)
    coeff[inside] = density[idx[inside]]

    # Spectral coefficients refer to exp(i p x); fold in the half-cell offset
    # phase before the inverse transform.
    phase = np.exp(1j * grid.p * (-grid.half_width + 0.5 * grid.dx))
    amp = np.fft.ifft(coeff * phase) * grid.n_points
    nsq = grid.dx * np.sum(np.abs(amp) ** 2)
    if nsq <= 0:
        raise NumericalError("backflow synthesis produced a zero state")
    out = WaveFunction(grid, amp / np.sqrt(nsq), 0.0)
    if negative_momentum_fraction(out) <= 1.0 - 1e-6:
        raise NumericalError("backflow state leaked positive-momentum weight")
    return out


class InterferenceWitness(NamedTuple):
    """Crossing expectation, its square, and their gap.

    ``witness = expC2 - expC`` measures the overlap between the crossing and
    non-crossing components: it vanishes when histories do not interfere, and
    a negative ``expC`` (backflow) forces it strictly positive.
    """

    expC: float
    expC2: float
    witness: float


def interference_witness(
    psi0: WaveFunction, t1: float, t2: float
) -> InterferenceWitness:
    """Evaluate the crossing operator ``P(t1) - P(t2)`` on a state."""
    if not (np.isfinite(t1) and np.isfinite(t2)) or t2 <= t1:
        raise ValueError(f"degenerate interval [{t1}, {t2}]")

    def projected(t: float) -> WaveFunction:
        return free_evolve(project_positive(free_evolve(psi0, t)), -t)

    b1 = projected(t1)
    b2 = projected(t2)
    branch = WaveFunction(psi0.grid, b1.amplitudes - b2.amplitudes, psi0.time_label)
    overlap = inner(psi0, branch)
    if abs(overlap.imag) > 1e-8:
        raise NumericalError(
            f"crossing expectation picked up an imaginary part {overlap.imag:.3e}"
        )
    exp_c = overlap.real
    exp_c2 = norm_sq(branch)
    return InterferenceWitness(expC=exp_c, expC2=exp_c2, witness=exp_c2 - exp_c)
