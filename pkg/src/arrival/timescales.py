"""Diagnostic timescales: classical arrival time, Zeno time, regime flags.

Two Zeno-time formulas coexist.  The general one is the inverse energy
spread ``1 / dH``; the packet one, ``m sigma / |p0|``, is the time the packet
takes to traverse its own width (its temporal imprint at the origin).  For a
momentum-peaked Gaussian they agree up to a constant factor of 2:
``1 / dH -> 2 m sigma / |p0|`` as ``|p0| sigma`` grows.  Both are reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .histories import HistoryPartition
from .qgrid import WaveFunction, momentum_probabilities
from .states import GaussianSpec

__all__ = [
    "TimescaleReport",
    "packet_arrival_time",
    "packet_zeno_time",
    "zeno_time_general",
    "regime_check",
]

# Operational thresholds for the qualitative regime conditions: interval
# width >= 5 Zeno times, arrival >= 2 Zeno times from the boundaries,
# momentum peaking |p0| sigma >= 10.
DELTA_FACTOR = 5.0
MARGIN_FACTOR = 2.0
PEAKING_MIN = 10.0


@dataclass(frozen=True)
class TimescaleReport:
    """Timescales of a packet against a history partition.

    ``margin`` is the distance of the arrival time from the nearest boundary
    of its interval, in units of the packet Zeno time (negative when the
    arrival time falls outside the monitored window).
    """

    arrival_time: float
    zeno_time: float
    zeno_time_general: float
    delta: float
    margin: float
    momentum_peaking: float
    regime_ok: bool
    interval_index: int | None


def packet_arrival_time(spec: GaussianSpec, mass: float = 1.0) -> float:
    """Classical arrival time of the packet center, ``m q0 / |p0|``."""
    if spec.p0 >= 0:
        raise ValueError("arrival time needs a left-moving packet (p0 < 0)")
    return mass * spec.q0 / abs(spec.p0)


def packet_zeno_time(spec: GaussianSpec, mass: float = 1.0) -> float:
    """Temporal imprint of the packet at the origin, ``m sigma / |p0|``."""
    if spec.p0 == 0:
        raise ValueError("Zeno time needs a moving packet (p0 != 0)")
    return mass * spec.sigma / abs(spec.p0)


def zeno_time_general(psi: WaveFunction) -> float:
    """Inverse energy spread ``1 / sqrt(<H^2> - <H>^2)``, evaluated spectrally.

    Raises for states whose energy variance is numerically zero (plane
    waves), for which the Zeno time is undefined.
    """
    p, prob = momentum_probabilities(psi)
    energy = p ** 2 / (2.0 * psi.grid.mass)
    mean = float(np.dot(prob, energy))
    var = float(np.dot(prob, (energy - mean) ** 2))
    if var <= (1e-6 * max(mean, 1e-300)) ** 2:
        raise ValueError(
            "energy variance is numerically zero; Zeno time undefined "
            "(plane-wave-like state)"
        )
    return 1.0 / np.sqrt(var)


def _gaussian_zeno_time_general(spec: GaussianSpec, mass: float) -> float:
    # Closed-form inverse energy spread of the Gaussian packet.
    dp = 1.0 / (2.0 * spec.sigma)
    dh = abs(spec.p0) * dp / mass * np.sqrt(1.0 + dp ** 2 / (2.0 * spec.p0 ** 2))
    return 1.0 / dh


def regime_check(
    spec: GaussianSpec,
    part: HistoryPartition,
    mass: float = 1.0,
    delta_factor: float = DELTA_FACTOR,
    margin_factor: float = MARGIN_FACTOR,
    peaking_min: float = PEAKING_MIN,
) -> TimescaleReport:
    """Evaluate whether the endpoint-projection approximation should hold.

    Requires the interval width to dominate the Zeno time, the classical
    arrival time to sit inside one interval with margin from its boundaries,
    and the packet to be strongly peaked in momentum.
    """
    t_a = packet_arrival_time(spec, mass)
    t_z = packet_zeno_time(spec, mass)
    delta = part.delta
    peaking = abs(spec.p0) * spec.sigma

    start = part.origin
    end = part.origin + part.tau
    if start < t_a < end:
        index = min(int((t_a - start) // delta), part.n_intervals - 1)
        lo, hi = part.interval_bounds(index)
        margin = min(t_a - lo, hi - t_a) / t_z
    else:
        index = None
        # Signed distance to the monitored window, kept negative.
        margin = -max(start - t_a, t_a - end, 0.0) / t_z

    ok = (
        delta >= delta_factor * t_z
        and index is not None
        and margin >= margin_factor
        and peaking >= peaking_min
    )
    return TimescaleReport(
        arrival_time=t_a,
        zeno_time=t_z,
        zeno_time_general=_gaussian_zeno_time_general(spec, mass),
        delta=delta,
        margin=float(margin),
        momentum_peaking=peaking,
        regime_ok=bool(ok),
        interval_index=index,
    )
