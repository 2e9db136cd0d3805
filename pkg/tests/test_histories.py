import numpy as np
import pytest
from conftest import REF_SPEC, REF_ZENO, l2_diff

from arrival import (
    GaussianSpec,
    HistoryPartition,
    coarse_grain,
    decoherence_analysis,
    exact_branches,
    first_crossing_branch,
    first_crossing_branches,
    free_evolve,
    gaussian,
    integrated_current,
    make_grid,
    non_crossing_branch,
    project_positive,
    semiclassical_branches,
    zeno_reflection_scan,
)


# ---------------------------------------------------------------------------
# partition
# ---------------------------------------------------------------------------


def test_partition_derived_quantities():
    part = HistoryPartition(epsilon=0.5, n_steps=40, coarse_factor=4, origin=1.0)
    assert part.tau == 20.0
    assert part.delta == 2.0
    assert part.n_intervals == 10
    assert part.step_time(3) == pytest.approx(2.5)
    assert part.interval_bounds(4) == (pytest.approx(9.0), pytest.approx(11.0))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(epsilon=0.0, n_steps=10),
        dict(epsilon=0.5, n_steps=-1),
        dict(epsilon=0.5, n_steps=10, coarse_factor=3),
        dict(epsilon=0.5, n_steps=10, coarse_factor=0),
        dict(epsilon=0.5, n_steps=10, origin=-1.0),
    ],
)
def test_partition_rejects_bad_inputs(kwargs):
    with pytest.raises(ValueError):
        HistoryPartition(**kwargs)


# ---------------------------------------------------------------------------
# non-crossing branch
# ---------------------------------------------------------------------------


def test_non_crossing_zero_steps_is_identity(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=0)
    assert non_crossing_branch(ref_packet, part) is ref_packet


def test_non_crossing_survives_before_arrival(ref_packet):
    # horizon well short of the arrival time: classically nothing crossed
    part = HistoryPartition(epsilon=0.5, n_steps=8)  # tau = 4 << t_a = 10
    branch = non_crossing_branch(ref_packet, part)
    assert branch.norm_sq() > 0.999


def test_non_crossing_depleted_after_crossing(ref_packet):
    part = HistoryPartition(epsilon=0.8, n_steps=25)  # eps = 2 t_z, tau = 20
    branch = non_crossing_branch(ref_packet, part)
    assert branch.norm_sq() < 0.01


# ---------------------------------------------------------------------------
# first-crossing branches
# ---------------------------------------------------------------------------


def test_first_crossing_annihilates_uncrossed_packet(ref_packet):
    part = HistoryPartition(epsilon=0.5, n_steps=4)
    k1 = first_crossing_branch(ref_packet, part, 1)
    assert k1.norm_sq() < 1e-20


def test_first_crossing_family_matches_single(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=12)
    family, _ = first_crossing_branches(ref_packet, part)
    for k in (1, 5, 12):
        single = first_crossing_branch(ref_packet, part, k)
        assert l2_diff(single, family[k - 1].amplitudes) < 1e-13


def test_first_crossing_k_out_of_range(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=5)
    with pytest.raises(ValueError):
        first_crossing_branch(ref_packet, part, 0)
    with pytest.raises(ValueError):
        first_crossing_branch(ref_packet, part, 6)


def test_resolution_of_identity(ref_grid, ref_packet):
    part = HistoryPartition(epsilon=0.5, n_steps=40)
    family, nc = first_crossing_branches(ref_packet, part)
    acc = nc.amplitudes.copy()
    for b in family:
        acc = acc + b.amplitudes
    assert l2_diff(ref_packet, acc) < 1e-10


def test_first_crossing_peaks_at_classical_arrival(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=20)
    family, _ = first_crossing_branches(ref_packet, part)
    norms = [b.norm_sq() for b in family]
    assert int(np.argmax(norms)) + 1 == 10  # t_a = 10 at epsilon = 1


# ---------------------------------------------------------------------------
# coarse graining
# ---------------------------------------------------------------------------


def test_coarse_grain_identity_and_full_sum(ref_grid, ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=12)
    family, nc = first_crossing_branches(ref_packet, part)
    same = coarse_grain(family, 1)
    for orig, kept in zip(family, same):
        assert np.array_equal(orig.amplitudes, kept.amplitudes)
    full = coarse_grain(family, 12)
    assert len(full) == 1
    # single branch telescopes to psi - C_nc psi
    expect = ref_packet.amplitudes - nc.amplitudes
    assert l2_diff(full[0], expect) < 1e-12


def test_coarse_grain_triangle_inequality(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=12)
    family, _ = first_crossing_branches(ref_packet, part)
    coarse = coarse_grain(family, 4)
    for a, block_start in zip(coarse, range(0, 12, 4)):
        bound = sum(np.sqrt(b.norm_sq()) for b in family[block_start : block_start + 4])
        assert np.sqrt(a.norm_sq()) <= bound + 1e-12


def test_coarse_grain_rejects_non_divisor(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=10)
    family, _ = first_crossing_branches(ref_packet, part)
    with pytest.raises(ValueError):
        coarse_grain(family, 3)


# ---------------------------------------------------------------------------
# semiclassical branches
# ---------------------------------------------------------------------------


def test_semiclassical_single_interval_full_crossing(ref_grid, ref_packet):
    part = HistoryPartition(epsilon=20.0, n_steps=1)
    bs = semiclassical_branches(ref_packet, part)
    assert len(bs.crossing_branches) == 1
    assert l2_diff(ref_packet, bs.crossing_branches[0].amplitudes) < 1e-9


def test_semiclassical_expectation_identity(ref_grid, ref_packet):
    part = HistoryPartition(epsilon=2.0, n_steps=10, coarse_factor=2)
    bs = semiclassical_branches(ref_packet, part)
    for alpha, branch in enumerate(bs.crossing_branches):
        lo, hi = part.interval_bounds(alpha)
        w1 = project_positive(free_evolve(ref_packet, lo)).norm_sq()
        w2 = project_positive(free_evolve(ref_packet, hi)).norm_sq()
        q = ref_grid.dx * np.vdot(ref_packet.amplitudes, branch.amplitudes)
        assert q.real == pytest.approx(w1 - w2, abs=1e-12)
        assert abs(q.imag) < 1e-12


def test_semiclassical_approaches_exact_for_large_steps(ref_grid, ref_packet):
    # endpoint branches vs exact projection strings on the crossing interval
    # [8, 12]; the gap is set by the projective (Zeno) reflection and shrinks
    # as epsilon grows
    diffs = {}
    for eps, mcg in [(0.8, 5), (4.0, 1)]:
        part = HistoryPartition(epsilon=eps, n_steps=int(round(20 / eps)), coarse_factor=mcg)
        ex = exact_branches(ref_packet, part)
        sc = semiclassical_branches(ref_packet, part)
        diffs[eps] = max(
            l2_diff(a, b.amplitudes)
            for a, b in zip(ex.crossing_branches, sc.crossing_branches)
        )
    assert diffs[0.8] < 0.1  # eps = 2 t_z
    assert diffs[4.0] < 0.05  # eps = 10 t_z
    assert diffs[4.0] < diffs[0.8]


# ---------------------------------------------------------------------------
# decoherence analysis
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def regime_report(ref_packet):
    part = HistoryPartition(epsilon=2.0, n_steps=10, coarse_factor=1, origin=1.0)
    bs = semiclassical_branches(ref_packet, part)
    return part, decoherence_analysis(bs, include_nc=True)


def test_decoherence_matrix_is_hermitian(regime_report):
    _, rep = regime_report
    assert np.max(np.abs(rep.D - rep.D.conj().T)) < 1e-12
    assert np.all(rep.p >= 0)
    assert np.allclose(rep.D.diagonal().real, rep.p, atol=1e-15)


def test_decoherent_regime_offdiagonals_small(regime_report, ref_packet):
    part, rep = regime_report
    assert rep.max_offdiag < 0.1
    assert rep.decoherent
    pk = int(np.argmax(rep.p[:-1]))
    assert part.interval_bounds(pk) == (pytest.approx(9.0), pytest.approx(11.0))
    # quasi-probability is real and close to the probability at the peak
    assert abs(rep.q[pk].imag) < 1e-12
    assert rep.q[pk].real == pytest.approx(rep.p[pk], rel=2e-3)


def test_peak_probability_matches_integrated_current(regime_report, ref_packet):
    part, rep = regime_report
    pk = int(np.argmax(rep.p[:-1]))
    lo, hi = part.interval_bounds(pk)
    flux = integrated_current(ref_packet, lo, hi, REF_ZENO / 20.0)
    assert rep.p[pk] == pytest.approx(flux, rel=5e-3)


def test_exact_mode_sum_rules(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=20, coarse_factor=2, origin=1.0)
    rep = decoherence_analysis(exact_branches(ref_packet, part), include_nc=True)
    assert rep.sum_rule_residual < 1e-10
    assert rep.linearity_residual < 1e-10
    # q(a) = p(a) + sum of off-diagonal row entries, explicitly
    for alpha in range(len(rep.p)):
        row = rep.D[alpha].sum() - rep.D[alpha, alpha]
        assert rep.q[alpha] == pytest.approx(rep.p[alpha] + row, abs=1e-10)


def test_exact_mode_peak_quasi_probability_near_probability(ref_packet):
    # in the regime (wide intervals, centered arrival, peaked momentum) the
    # peak-interval quasi-probability approximates the probability
    part = HistoryPartition(epsilon=1.0, n_steps=20, coarse_factor=2, origin=1.0)
    rep = decoherence_analysis(exact_branches(ref_packet, part), include_nc=True)
    pk = int(np.argmax(rep.p[:-1]))
    assert abs(rep.q[pk] - rep.p[pk]) / rep.p[pk] < 0.05


def test_coarse_graining_consistency(ref_packet):
    # analysis after coarse_grain equals block-summing the fine D matrix
    fine_part = HistoryPartition(epsilon=1.0, n_steps=20, coarse_factor=1, origin=1.0)
    fine_rep = decoherence_analysis(exact_branches(ref_packet, fine_part), include_nc=False)
    coarse_part = HistoryPartition(epsilon=1.0, n_steps=20, coarse_factor=4, origin=1.0)
    coarse_rep = decoherence_analysis(exact_branches(ref_packet, coarse_part), include_nc=False)
    m = 4
    blocks = fine_rep.D.reshape(5, m, 5, m).sum(axis=(1, 3))
    assert np.max(np.abs(blocks - coarse_rep.D)) < 1e-12


def test_negligible_probability_rows_reported_na(ref_grid):
    # a packet that never reaches the origin leaves all crossing slots empty
    psi = gaussian(GaussianSpec(q0=120.0, p0=-1.0, sigma=2.0), ref_grid)
    part = HistoryPartition(epsilon=1.0, n_steps=4, coarse_factor=2)
    rep = decoherence_analysis(semiclassical_branches(psi, part), include_nc=True)
    offdiag = rep.normalized_offdiag[0, 1]
    assert np.isnan(offdiag)
    assert rep.max_offdiag == 0.0 or np.isfinite(rep.max_offdiag)


def test_decoherence_empty_branch_set_rejected(ref_packet):
    part = HistoryPartition(epsilon=1.0, n_steps=4, coarse_factor=2)
    bs = semiclassical_branches(ref_packet, part)
    bs.crossing_branches = []
    with pytest.raises(ValueError):
        decoherence_analysis(bs, include_nc=False)


# ---------------------------------------------------------------------------
# Zeno scan
# ---------------------------------------------------------------------------


def test_zeno_single_projection_after_crossing(ref_packet):
    (eps, survival), = zeno_reflection_scan(ref_packet, 20.0, [20.0])
    assert eps == 20.0
    assert survival < 1e-6


def test_zeno_survival_monotone_in_monitoring_rate(ref_packet):
    sweep = zeno_reflection_scan(ref_packet, 20.0, [2.0, 1.0, 0.5, 0.25])
    survivals = [s for _, s in sweep]
    assert all(b >= a - 1e-3 for a, b in zip(survivals, survivals[1:]))
    assert survivals[-1] > survivals[0]


def test_zeno_rejects_non_divisor(ref_packet):
    with pytest.raises(ValueError, match="divide"):
        zeno_reflection_scan(ref_packet, 20.0, [0.3])
