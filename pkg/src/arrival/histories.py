"""Class-operator branches, the decoherence functional, and sum rules.

A history partition fixes a fine time lattice ``t_k = origin + k * epsilon``
(``k = 1..n``) and groups the steps into intervals of width
``Delta = coarse_factor * epsilon``.  Branch vectors are built by alternating
exact free evolution with half-line projections:

* non-crossing branch: project onto ``x > 0`` at every lattice time;
* first-crossing branch ``k``: stay in ``x > 0`` at ``t_1 .. t_{k-1}``, be in
  ``x < 0`` at ``t_k``.

Because the projectors at each time are complementary, the branches resolve
the identity: the first-crossing family plus the non-crossing branch sums
back to the initial state, to rounding.  All branch vectors are returned in
the ``t = 0`` picture (the final inverse evolution is applied), so the
decoherence functional is a plain Gram matrix and the quasi-probability is an
overlap with the untouched initial state.

The semiclassical mode replaces each projector string by its endpoints,
``crossing in [t_a, t_b]  ->  P(t_a) - P(t_b)``, which is the operator whose
expectation is the integrated probability current over the interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .qgrid import (
    WaveFunction,
    free_evolve,
    project_negative,
    project_positive,
)

__all__ = [
    "HistoryPartition",
    "BranchSet",
    "DecoherenceReport",
    "non_crossing_branch",
    "first_crossing_branch",
    "first_crossing_branches",
    "coarse_grain",
    "exact_branches",
    "semiclassical_branches",
    "decoherence_analysis",
    "zeno_reflection_scan",
]

EXACT_MODE = "exact-projection"
SEMICLASSICAL_MODE = "semiclassical"

# Default decoherence threshold on |D(a,b)| / sqrt(p(a) p(b)); the customary
# working value in the decoherent-histories literature.
DEFAULT_EPS_DEC = 0.1

# Probabilities below this are treated as empty histories: their normalized
# off-diagonals are reported as not-applicable instead of divided by ~0.
NEGLIGIBLE_PROBABILITY = 1e-14


@dataclass(frozen=True)
class HistoryPartition:
    """Time lattice ``t_k = origin + k * epsilon`` with coarse intervals.

    Attributes
    ----------
    epsilon : float
        Fine time step; must stay above the Zeno time of the state for the
        projections not to act as a reflecting wall.
    n_steps : int
        Number of fine steps ``n``; the horizon is ``tau = n * epsilon``.
    coarse_factor : int
        Steps per interval; must divide ``n_steps``.  Interval width
        ``Delta = coarse_factor * epsilon``.
    origin : float
        Start of the monitored window.  The default 0 reproduces the plain
        lattice ``t_k = k epsilon``; a nonzero origin shifts the interval
        boundaries, e.g. to center a classical arrival time inside an
        interval.
    """

    epsilon: float
    n_steps: int
    coarse_factor: int = 1
    origin: float = 0.0

    def __post_init__(self):
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be non-negative, got {self.n_steps}")
        if self.coarse_factor < 1:
            raise ValueError(
                f"coarse_factor must be a positive integer, got {self.coarse_factor}"
            )
        if self.n_steps % self.coarse_factor != 0:
            raise ValueError(
                f"coarse_factor {self.coarse_factor} does not divide "
                f"n_steps {self.n_steps}"
            )
        if not np.isfinite(self.origin) or self.origin < 0:
            raise ValueError(f"origin must be finite and >= 0, got {self.origin}")

    @property
    def tau(self) -> float:
        return self.n_steps * self.epsilon

    @property
    def delta(self) -> float:
        return self.coarse_factor * self.epsilon

    @property
    def n_intervals(self) -> int:
        return self.n_steps // self.coarse_factor

    def step_time(self, k: int) -> float:
        """Lattice time ``t_k``, ``k = 0..n_steps``."""
        return self.origin + k * self.epsilon

    def interval_bounds(self, alpha: int) -> tuple[float, float]:
        """Boundaries of coarse interval ``alpha`` (0-based)."""
        return (
            self.origin + alpha * self.delta,
            self.origin + (alpha + 1) * self.delta,
        )


@dataclass
class BranchSet:
    """Coarse-grained crossing branches plus the non-crossing branch.

    ``crossing_branches[alpha]`` is the (unnormalized) branch vector for
    crossing during interval ``alpha``, mapped back to the ``t = 0`` picture.
    """

    partition: HistoryPartition
    initial: WaveFunction
    crossing_branches: list[WaveFunction]
    non_crossing: WaveFunction
    mode: str


@dataclass
class DecoherenceReport:
    """Decoherence functional and the derived (quasi-)probabilities.

    ``D[a, b]`` is the overlap of branch ``b`` with branch ``a``; its diagonal
    is the probability vector ``p``.  ``q[a]`` is the overlap of the initial
    state with branch ``a``; it is linear in the branch and sums to one when
    the branch set resolves the identity.  ``normalized_offdiag`` holds
    ``|D(a,b)| / sqrt(p(a) p(b))`` with NaN marking rows whose probability is
    negligible.
    """

    D: np.ndarray
    p: np.ndarray
    q: np.ndarray
    normalized_offdiag: np.ndarray
    max_offdiag: float
    decoherent: bool
    eps_dec: float
    includes_non_crossing: bool
    mode: str
    sum_rule_residual: float = field(default=np.nan)
    linearity_residual: float = field(default=np.nan)


def non_crossing_branch(psi: WaveFunction, part: HistoryPartition) -> WaveFunction:
    """Branch vector for remaining in ``x > 0`` at every lattice time.

    Alternates free evolution by ``epsilon`` with projection onto ``x > 0``,
    then evolves back to ``t = 0``.  With ``n_steps = 0`` this is the
    identity.
    """
    if part.n_steps == 0:
        return psi
    w = free_evolve(psi, part.origin)
    for _ in range(part.n_steps):
        w = project_positive(free_evolve(w, part.epsilon))
    return free_evolve(w, -part.step_time(part.n_steps))


def first_crossing_branches(
    psi: WaveFunction, part: HistoryPartition
) -> tuple[list[WaveFunction], WaveFunction]:
    """All fine first-crossing branches plus the non-crossing remainder.

    One sweep of ``n_steps`` evolutions: the running prefix
    ``P(t_{k-1}) ... P(t_1) |psi>`` is shared by every branch, so branch ``k``
    costs one extra projection and one inverse evolution.  Returns
    ``([C_1 psi, ..., C_n psi], C_nc psi)`` in the ``t = 0`` picture.
    """
    branches: list[WaveFunction] = []
    w = free_evolve(psi, part.origin)
    for k in range(1, part.n_steps + 1):
        v = free_evolve(w, part.epsilon)
        branches.append(free_evolve(project_negative(v), -part.step_time(k)))
        w = project_positive(v)
    non_crossing = free_evolve(w, -part.step_time(part.n_steps))
    return branches, non_crossing


def first_crossing_branch(
    psi: WaveFunction, part: HistoryPartition, k: int
) -> WaveFunction:
    """Branch vector for first crossing at lattice time ``t_k`` (1-based)."""
    if not 1 <= k <= part.n_steps:
        raise ValueError(f"k must be in [1, {part.n_steps}], got {k}")
    w = free_evolve(psi, part.origin)
    for _ in range(k - 1):
        w = project_positive(free_evolve(w, part.epsilon))
    v = free_evolve(w, part.epsilon)
    return free_evolve(project_negative(v), -part.step_time(k))


def coarse_grain(
    branches: list[WaveFunction], coarse_factor: int
) -> list[WaveFunction]:
    """Sum consecutive blocks of ``coarse_factor`` fine branches."""
    n = len(branches)
    if coarse_factor < 1 or n % coarse_factor != 0:
        raise ValueError(
            f"coarse_factor {coarse_factor} does not divide branch count {n}"
        )
    out = []
    for start in range(0, n, coarse_factor):
        block = branches[start : start + coarse_factor]
        acc = block[0].amplitudes.copy()
        for b in block[1:]:
            acc += b.amplitudes
        out.append(WaveFunction(block[0].grid, acc, block[0].time_label))
    return out


def exact_branches(psi: WaveFunction, part: HistoryPartition) -> BranchSet:
    """Exact-projection branch set: fine sweep, then coarse-grained sums."""
    fine, non_crossing = first_crossing_branches(psi, part)
    coarse = coarse_grain(fine, part.coarse_factor) if fine else []
    return BranchSet(
        partition=part,
        initial=psi,
        crossing_branches=coarse,
        non_crossing=non_crossing,
        mode=EXACT_MODE,
    )


def _projected_at(psi: WaveFunction, t: float) -> WaveFunction:
    """Heisenberg projection onto ``x > 0`` at time ``t``, in the t=0 picture."""
    return free_evolve(project_positive(free_evolve(psi, t)), -t)


def semiclassical_branches(psi: WaveFunction, part: HistoryPartition) -> BranchSet:
    """Endpoint-difference branches ``P(t_alpha) psi - P(t_{alpha+1}) psi``.

    Valid when intermediate projections barely disturb the state (interval
    width well above the Zeno time).  Needs one projected evolution per
    interval boundary, no fine sweep.  The non-crossing slot holds the
    final-time projection ``P(t_n) psi``.
    """
    bounds = [part.step_time(a * part.coarse_factor) for a in range(part.n_intervals + 1)]
    projected = [_projected_at(psi, t) for t in bounds]
    branches = []
    for a in range(part.n_intervals):
        amp = projected[a].amplitudes - projected[a + 1].amplitudes
        branches.append(WaveFunction(psi.grid, amp, psi.time_label))
    return BranchSet(
        partition=part,
        initial=psi,
        crossing_branches=branches,
        non_crossing=projected[-1],
        mode=SEMICLASSICAL_MODE,
    )


def decoherence_analysis(
    branches: BranchSet,
    include_nc: bool = True,
    eps_dec: float = DEFAULT_EPS_DEC,
) -> DecoherenceReport:
    """Decoherence functional, probabilities, quasi-probabilities, sum rules.

    ``D(a, b) = <C_b psi | C_a psi>``, ``p(a) = D(a, a)``,
    ``q(a) = <psi | C_a psi>``.  With the non-crossing branch included the
    exact-projection mode obeys two identities to rounding, and this routine
    enforces them at 1e-10: ``sum_a q(a) = 1`` and
    ``q(a) = p(a) + sum_{b != a} D(a, b)``.
    """
    vectors = list(branches.crossing_branches)
    if include_nc:
        vectors = vectors + [branches.non_crossing]
    if not vectors:
        raise ValueError("branch set is empty")
    grid = branches.initial.grid
    a_mat = np.stack([v.amplitudes for v in vectors])
    d_mat = grid.dx * (a_mat @ a_mat.conj().T)
    p = d_mat.diagonal().real.copy()
    q = grid.dx * (a_mat @ branches.initial.amplitudes.conj())

    sum_rule_residual = abs(q.sum() - 1.0)
    linearity_residual = float(np.max(np.abs(q - d_mat.sum(axis=1))))
    if branches.mode == EXACT_MODE and include_nc:
        if sum_rule_residual > 1e-10 or linearity_residual > 1e-10:
            raise NumericalError(
                "exact-projection branches lost the resolution of identity: "
                f"sum-rule residual {sum_rule_residual:.3e}, "
                f"linearity residual {linearity_residual:.3e}"
            )

    m = len(vectors)
    offdiag = np.full((m, m), np.nan)
    valid = p > NEGLIGIBLE_PROBABILITY
    denom = np.sqrt(np.outer(np.where(valid, p, 1.0), np.where(valid, p, 1.0)))
    both = np.outer(valid, valid)
    offdiag[both] = (np.abs(d_mat) / denom)[both]
    np.fill_diagonal(offdiag, 0.0)
    off_values = offdiag[~np.eye(m, dtype=bool)]
    finite = off_values[np.isfinite(off_values)]
    max_offdiag = float(finite.max()) if finite.size else 0.0

    return DecoherenceReport(
        D=d_mat,
        p=p,
        q=q,
        normalized_offdiag=offdiag,
        max_offdiag=max_offdiag,
        decoherent=bool(max_offdiag < eps_dec),
        eps_dec=eps_dec,
        includes_non_crossing=include_nc,
        mode=branches.mode,
        sum_rule_residual=float(sum_rule_residual),
        linearity_residual=linearity_residual,
    )


def zeno_reflection_scan(
    psi: WaveFunction, tau: float, eps_list: list[float]
) -> list[tuple[float, float]]:
    """Survival probability under projective monitoring, per step size.

    For each ``eps``, evolves and projects onto ``x > 0`` along
    ``tau / eps`` steps and records the surviving norm squared.  As
    ``eps -> 0`` the monitoring freezes the state on the half-line (total
    reflection) and the survival tends to one.
    """
    if not (tau > 0 and np.isfinite(tau)):
        raise ValueError(f"tau must be positive, got {tau}")
    out = []
    for eps in eps_list:
        if not (eps > 0 and np.isfinite(eps)):
            raise ValueError(f"eps must be positive, got {eps}")
        n = int(round(tau / eps))
        if n < 1 or abs(n * eps - tau) > 1e-9 * max(tau, 1.0):
            raise ValueError(f"eps = {eps} does not divide tau = {tau}")
        w = psi
        for _ in range(n):
            w = project_positive(free_evolve(w, eps))
        out.append((float(eps), w.norm_sq()))
    return out
