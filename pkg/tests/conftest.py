"""Shared fixtures and independent closed-form oracles.

The oracles here are derived analytically and evaluated with plain numpy
expressions; they never call the propagation or projection code they check.
"""

import numpy as np
import pytest

from arrival import GaussianSpec, gaussian, make_grid

REF_SPEC = GaussianSpec(q0=50.0, p0=-5.0, sigma=2.0)
REF_ARRIVAL = 10.0  # m q0 / |p0|
REF_ZENO = 0.4  # m sigma / |p0|


@pytest.fixture(scope="session")
def ref_grid():
    return make_grid(4096, 240.0)


@pytest.fixture(scope="session")
def ref_packet(ref_grid):
    return gaussian(REF_SPEC, ref_grid)


def spreading_gaussian(x, spec, t, mass=1.0):
    """Closed-form free evolution of the Gaussian packet.

    Obtained by Fourier transforming the initial packet, attaching the
    kinetic phase, and doing the Gaussian integral:
    ``a = sigma^2 + i t / 2m``, ``b = x - q0 - p0 t / m``.
    """
    a = spec.sigma**2 + 0.5j * t / mass
    b = x - spec.q0 - spec.p0 * t / mass
    pref = (2.0 * spec.sigma**2 / np.pi) ** 0.25 / np.sqrt(2.0 * a)
    return pref * np.exp(-(b**2) / (4.0 * a) + 1j * spec.p0 * (x - spec.p0 * t / (2.0 * mass)))


def gaussian_overlap(spec1, spec2):
    """Closed-form overlap of two equal-width Gaussian packets.

    ``<1|2> = exp(-dq^2/(8 sigma^2) - sigma^2 dp^2 / 2 + i dp (q1+q2)/2)``.
    """
    assert spec1.sigma == spec2.sigma
    dq = spec1.q0 - spec2.q0
    dp = spec2.p0 - spec1.p0
    qbar = 0.5 * (spec1.q0 + spec2.q0)
    return np.exp(
        -(dq**2) / (8.0 * spec1.sigma**2)
        - spec1.sigma**2 * dp**2 / 2.0
        + 1j * dp * qbar
    )


def gaussian_current_at_origin(spec, t, mass=1.0):
    """Closed-form current of the spreading packet at ``x = 0``.

    Differentiates the closed form: ``dpsi/dx = psi (-b/(2a) + i p0)``,
    then ``J = -(1/m) Im[conj(psi) dpsi]``.
    """
    a = spec.sigma**2 + 0.5j * t / mass
    b = -spec.q0 - spec.p0 * t / mass
    pref = (2.0 * spec.sigma**2 / np.pi) ** 0.25 / np.sqrt(2.0 * a)
    psi0 = pref * np.exp(-(b**2) / (4.0 * a) + 1j * spec.p0 * (-spec.p0 * t / (2.0 * mass)))
    dpsi0 = psi0 * (-b / (2.0 * a) + 1j * spec.p0)
    return float(-np.imag(np.conj(psi0) * dpsi0) / mass)


def l2_diff(psi, amplitudes):
    """L2 distance between a wave function and a raw amplitude vector."""
    return float(
        np.sqrt(psi.grid.dx * np.sum(np.abs(psi.amplitudes - amplitudes) ** 2))
    )
