import math

import numpy as np
import pytest
from conftest import REF_SPEC, gaussian_overlap

from arrival import (
    GaussianSpec,
    gaussian,
    inner,
    make_grid,
    negative_momentum_fraction,
    overlap_matrix,
    superpose,
)


def test_gaussian_spec_validation():
    GaussianSpec(q0=50.0, p0=-5.0, sigma=2.0)
    with pytest.raises(ValueError, match="leakage"):
        GaussianSpec(q0=5.0, p0=-5.0, sigma=2.0)
    with pytest.raises(ValueError):
        GaussianSpec(q0=-1.0, p0=-5.0, sigma=2.0)
    with pytest.raises(ValueError):
        GaussianSpec(q0=50.0, p0=-5.0, sigma=0.0)


def test_gaussian_normalized_on_large_grid():
    g = make_grid(4096, 400.0)
    psi = gaussian(REF_SPEC, g)
    assert abs(psi.norm() - 1.0) < 1e-12
    assert psi.time_label == 0.0


def test_gaussian_rejects_nyquist_violation():
    g = make_grid(256, 200.0)  # p_max ~ 2.0
    with pytest.raises(ValueError, match="Nyquist"):
        gaussian(GaussianSpec(q0=50.0, p0=-5.0, sigma=2.0), g)


def test_gaussian_rejects_packet_outside_box():
    g = make_grid(1024, 55.0)
    with pytest.raises(ValueError, match="fit"):
        gaussian(GaussianSpec(q0=50.0, p0=-2.0, sigma=2.0), g)


def test_momentum_distribution_peak_and_width(ref_grid, ref_packet):
    # independent oracle: explicit DFT of the constructed amplitudes on the
    # grid's momentum lattice (no np.fft in this check)
    p = np.sort(ref_grid.p)
    phases = np.exp(-1j * np.outer(p, ref_grid.x))
    phi = ref_grid.dx / np.sqrt(2 * np.pi) * (phases @ ref_packet.amplitudes)
    w = np.abs(phi) ** 2
    w /= w.sum()
    mean = np.dot(w, p)
    std = np.sqrt(np.dot(w, (p - mean) ** 2))
    assert mean == pytest.approx(-5.0, abs=1e-9)
    assert std == pytest.approx(1.0 / (2.0 * REF_SPEC.sigma), rel=1e-6)
    assert p[np.argmax(w)] == pytest.approx(-5.0, abs=2 * np.pi / (2 * 240.0) + 1e-12)


def test_superpose_singleton_is_identity(ref_packet):
    s = superpose([(1.0, ref_packet)])
    assert np.allclose(s.amplitudes, ref_packet.amplitudes, atol=1e-15)


def test_superpose_orthogonal_components_recoverable(ref_grid):
    a = gaussian(GaussianSpec(q0=40.0, p0=-5.0, sigma=1.0), ref_grid)
    b = gaussian(GaussianSpec(q0=80.0, p0=-5.0, sigma=1.0), ref_grid)  # 40 sigma apart
    assert abs(inner(a, b)) < 1e-10
    s = superpose([(1.0, a), (1.0, b)])
    assert abs(inner(a, s)) == pytest.approx(1 / np.sqrt(2), abs=1e-10)
    assert abs(inner(b, s)) == pytest.approx(1 / np.sqrt(2), abs=1e-10)


def test_superpose_norm_additivity_for_orthogonal_terms(ref_grid):
    a = gaussian(GaussianSpec(q0=40.0, p0=-5.0, sigma=1.0), ref_grid)
    b = gaussian(GaussianSpec(q0=80.0, p0=-5.0, sigma=1.0), ref_grid)
    c1, c2 = 0.3 + 0.4j, -0.7j
    raw = c1 * a.amplitudes + c2 * b.amplitudes
    raw_norm_sq = ref_grid.dx * np.sum(np.abs(raw) ** 2)
    assert raw_norm_sq == pytest.approx(abs(c1) ** 2 + abs(c2) ** 2, abs=1e-10)


def test_superpose_zero_norm_rejected(ref_packet):
    with pytest.raises(ValueError, match="zero norm"):
        superpose([(1.0, ref_packet), (-1.0, ref_packet)])


def test_superpose_rejects_mixed_grids(ref_packet):
    other = gaussian(REF_SPEC, make_grid(512, 120.0))
    with pytest.raises(ValueError, match="grids"):
        superpose([(1.0, ref_packet), (1.0, other)])


def test_negative_momentum_fraction_reference_packet(ref_packet):
    frac = negative_momentum_fraction(ref_packet)
    assert frac > 1.0 - 1e-10
    # erfc tail oracle: positive-momentum weight is erfc(sqrt(2) sigma |p0|)/2
    tail = 0.5 * math.erfc(math.sqrt(2.0) * REF_SPEC.sigma * abs(REF_SPEC.p0))
    assert 1.0 - frac <= tail + 1e-12


def test_negative_momentum_fraction_mirror_packet(ref_grid):
    mirror = gaussian(GaussianSpec(q0=50.0, p0=+5.0, sigma=2.0), ref_grid)
    assert negative_momentum_fraction(mirror) < 1e-10


def test_negative_momentum_fraction_balanced_superposition(ref_grid):
    left = gaussian(GaussianSpec(q0=50.0, p0=-5.0, sigma=2.0), ref_grid)
    right = gaussian(GaussianSpec(q0=50.0, p0=+5.0, sigma=2.0), ref_grid)
    s = superpose([(1.0, left), (1.0, right)])
    assert negative_momentum_fraction(s) == pytest.approx(0.5, abs=1e-6)


def test_overlap_matrix_diagnostic(ref_grid):
    specs = [
        GaussianSpec(q0=40.0, p0=-5.0, sigma=1.0),
        GaussianSpec(q0=48.0, p0=-5.0, sigma=1.0),
    ]
    states = [gaussian(s, ref_grid) for s in specs]
    ov = overlap_matrix(states)
    assert ov[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert ov[0, 1] == pytest.approx(gaussian_overlap(*specs), abs=1e-10)
    assert ov[1, 0] == pytest.approx(np.conj(ov[0, 1]), abs=1e-14)
