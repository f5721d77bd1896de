"""Eigensolver, scaled states, split-step propagation and STA runs."""

import math

import numpy as np
import pytest

from stalab import potentials as P
from stalab import quantum1d as Q
from stalab import schedules as S
from stalab.errors import GridExtentError, LeakageError, ResolutionError

GRID = Q.SpatialGrid(2048, -16.0, 16.0)
HARMONIC = P.harmonic(1.0, 1.0)


@pytest.fixture(scope="module")
def harmonic_pairs():
    return Q.solve_eigenstates(HARMONIC, GRID, 4)


def test_grid_validation():
    with pytest.raises(ValueError):
        Q.SpatialGrid(100, -1, 1)
    with pytest.raises(ValueError):
        Q.SpatialGrid(300, -1, 1)  # not a power of two
    with pytest.raises(ValueError):
        Q.SpatialGrid(512, 1, -1)


def test_harmonic_spectrum():
    grid = Q.SpatialGrid(4096, -12.0, 12.0)
    pairs = Q.solve_eigenstates(HARMONIC, grid, 10)
    for n, pair in enumerate(pairs):
        exact = n + 0.5
        assert abs(pair.energy - exact) / exact < 1e-4


def test_box_spectrum():
    L, m = 2.0, 1.0
    grid = Q.SpatialGrid(2048, 0.0, L, boundary="dirichlet")
    pairs = Q.solve_eigenstates(P.box(L, m), grid, 9)
    for k, pair in enumerate(pairs):
        n = k + 1
        exact = n ** 2 * math.pi ** 2 / (2.0 * m * L ** 2)
        assert abs(pair.energy - exact) / exact < 1e-4


def test_orthonormality(harmonic_pairs):
    a, b = harmonic_pairs[0].state, harmonic_pairs[1].state
    assert abs(a.overlap(b)) < 1e-10
    assert a.norm() == pytest.approx(1.0, abs=1e-12)


def test_resolution_error():
    grid = Q.SpatialGrid(256, -30.0, 30.0)
    with pytest.raises(ResolutionError):
        Q.solve_eigenstates(HARMONIC, grid, 10)


def test_scaled_eigenstate_identity(harmonic_pairs):
    pair = harmonic_pairs[0]
    out = Q.scaled_eigenstate(pair, 1.0, 0.0)
    assert Q.fidelity(out, pair.state) == pytest.approx(1.0, abs=1e-12)


def test_scaled_eigenstate_width(harmonic_pairs):
    pair = harmonic_pairs[0]
    out = Q.scaled_eigenstate(pair, 2.0, 0.0)
    q = GRID.q
    var = float(np.trapezoid(q ** 2 * out.density(), dx=GRID.dq))
    var0 = float(np.trapezoid(q ** 2 * pair.state.density(), dx=GRID.dq))
    assert var == pytest.approx(4.0 * var0, rel=1e-6)


def test_scaled_eigenstate_is_scaled_eigenfunction():
    # H0(gamma) psi = (E_n / gamma^2) psi within interpolation error
    gamma = 2.0
    grid = Q.SpatialGrid(8192, -16.0, 16.0)
    pair = Q.solve_eigenstates(HARMONIC, grid, 1)[1]
    out = Q.scaled_eigenstate(pair, gamma, 0.0)
    q = grid.q
    u = np.asarray(HARMONIC.u0(q / gamma)) / gamma ** 2
    k = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.dq)
    from scipy.fft import fft, ifft
    h_psi = ifft(0.5 * k * k * fft(out.psi)) + u * out.psi
    e_scaled = pair.energy / gamma ** 2
    resid = h_psi - e_scaled * out.psi
    l2 = math.sqrt(float(np.trapezoid(np.abs(resid) ** 2, dx=grid.dq)))
    assert l2 < 1e-5 * abs(e_scaled)


def test_scaled_eigenstate_extent_error(harmonic_pairs):
    small = Q.SpatialGrid(512, -6.0, 6.0)
    pairs = Q.solve_eigenstates(HARMONIC, small, 0)
    with pytest.raises(GridExtentError):
        Q.scaled_eigenstate(pairs[0], 3.5, 0.0)


def test_static_propagation_keeps_ground_state(harmonic_pairs):
    pair = harmonic_pairs[0]
    out = Q.split_step_propagate(pair.state,
                                 lambda q, t: HARMONIC.u0(q), 0.0, 3.0, 1e-3)
    assert Q.fidelity(out, pair.state) == pytest.approx(1.0, abs=1e-8)
    assert out.norm() == pytest.approx(1.0, abs=1e-10)


def test_free_gaussian_spreading():
    sigma0 = 1.0
    grid = Q.SpatialGrid(2048, -40.0, 40.0)
    q = grid.q
    psi = np.exp(-q ** 2 / (4.0 * sigma0 ** 2)).astype(complex)
    wf = Q.WaveFunction(grid, psi).normalized()
    t1 = 3.0
    out = Q.split_step_propagate(wf, lambda q, t: np.zeros_like(q), 0.0, t1,
                                 2e-3)
    var = float(np.trapezoid(q ** 2 * out.density(), dx=grid.dq))
    expect = sigma0 ** 2 + (Q.HBAR * t1) ** 2 / (4.0 * sigma0 ** 2)
    assert var == pytest.approx(expect, rel=1e-8)


def test_split_step_second_order_convergence():
    # dt halving reduces the endpoint error ~4x on a driven run
    sched = S.make_quintic_schedule(1.5, 0.0, 1.5)
    dp = P.DrivenPotential(HARMONIC, sched)
    pair = Q.solve_eigenstates(HARMONIC, GRID, 0)[0]

    def run(dt):
        out = Q.split_step_propagate(pair.state,
                                     lambda q, t: dp.u_local_cd(q, t, clamp=True),
                                     0.0, 1.5, dt)
        return out.psi

    ref = run(2.5e-4)
    e1 = np.linalg.norm(run(4e-3) - ref)
    e2 = np.linalg.norm(run(2e-3) - ref)
    assert e1 / e2 == pytest.approx(4.0, rel=0.35)


def test_timestep_precondition():
    pair = Q.solve_eigenstates(HARMONIC, GRID, 0)[0]
    with pytest.raises(ValueError):
        Q.split_step_propagate(pair.state, lambda q, t: HARMONIC.u0(q),
                               0.0, 1.0, 0.5)


def test_leakage_detection():
    grid = Q.SpatialGrid(512, -10.0, 10.0)
    q = grid.q
    # fast packet headed at the wall
    psi = np.exp(-q ** 2 / 2.0 + 4.0j * q).astype(complex)
    wf = Q.WaveFunction(grid, psi).normalized()
    with pytest.raises(LeakageError):
        Q.split_step_propagate(wf, lambda q, t: np.zeros_like(q), 0.0, 4.0,
                               2e-3, record_times=np.linspace(0, 4.0, 9))


def test_cd_unitary_static_is_identity(harmonic_pairs):
    sched = S.make_quintic_schedule(2.0, 0.0, 1.0)
    pair = harmonic_pairs[0]
    out = Q.cd_unitary_apply(pair.state, sched, 0.0)
    assert np.allclose(out.psi, pair.state.psi, atol=1e-14)
    out_end = Q.cd_unitary_apply(pair.state, sched, 1.0)
    assert Q.fidelity(out_end, pair.state) == pytest.approx(1.0, abs=1e-12)


def test_cd_unitary_preserves_density_and_inverts(harmonic_pairs):
    sched = S.make_quintic_schedule(2.0, 1.0, 1.0)
    pair = harmonic_pairs[2]
    t = 0.37
    out = Q.cd_unitary_apply(pair.state, sched, t)
    assert np.allclose(np.abs(out.psi) ** 2, pair.state.density(), atol=1e-14)
    back = Q.cd_unitary_apply(out, sched, t, inverse=True)
    assert np.allclose(back.psi, pair.state.psi, atol=1e-13)


def test_target_state_phases(harmonic_pairs):
    pair = harmonic_pairs[0]
    sched = S.make_constant_schedule(1.0, 0.0, 2.0)
    t = 1.3
    tgt = Q.target_state(pair, sched, t)
    expect = pair.state.psi * np.exp(-1j * pair.energy * t)
    assert np.allclose(tgt.psi, expect, atol=1e-10)
    tgt0 = Q.target_state(pair, S.make_quintic_schedule(2.0, 0.0, 1.0), 0.0)
    assert np.allclose(tgt0.psi, pair.state.psi, atol=1e-12)


def test_target_density_is_scaled(harmonic_pairs):
    pair = harmonic_pairs[0]
    sched = S.make_quintic_schedule(2.0, 0.0, 1.0)
    t = 0.8
    g = float(sched.gamma(t))
    tgt = Q.target_state(pair, sched, t)
    base = Q.scaled_eigenstate(pair, g, 0.0)
    assert np.allclose(tgt.density(), base.density(), atol=1e-13)


def test_fidelity_basics(harmonic_pairs):
    a = harmonic_pairs[0].state
    b = harmonic_pairs[1].state
    assert Q.fidelity(a, a) == pytest.approx(1.0, abs=1e-12)
    assert Q.fidelity(a, b) < 1e-8
    # displaced Gaussian pair against the closed-form overlap
    grid = GRID
    s = 0.8
    shift = 0.9
    psi_a = np.exp(-grid.q ** 2 / (4.0 * s * s)).astype(complex)
    psi_b = np.exp(-(grid.q - shift) ** 2 / (4.0 * s * s)).astype(complex)
    wf_a = Q.WaveFunction(grid, psi_a).normalized()
    wf_b = Q.WaveFunction(grid, psi_b).normalized()
    expect = math.exp(-shift ** 2 / (4.0 * s * s))
    assert Q.fidelity(wf_a, wf_b) == pytest.approx(expect, rel=1e-10)
    with pytest.raises(ValueError):
        a.overlap(Q.WaveFunction(Q.SpatialGrid(512, -8, 8),
                                 np.zeros(512, complex)))


def test_eigenvalue_scaling_law():
    # rediagonalizing the scaled trap reproduces E_n / gamma^2
    for gamma in (0.5, 2.0):
        scaled = P.custom(lambda q, g=gamma: HARMONIC.u0(q / g) / g ** 2,
                          lambda q, g=gamma: HARMONIC.du0(q / g) / g ** 3)
        grid = Q.SpatialGrid(4096, -14.0, 14.0)
        pairs = Q.solve_eigenstates(scaled, grid, 5)
        base = Q.solve_eigenstates(HARMONIC, grid, 5)
        for n in range(6):
            expect = base[n].energy / gamma ** 2
            assert abs(pairs[n].energy - expect) / abs(expect) < 1e-4


def test_shortcut_run_harmonic_expansion():
    sched = S.make_quintic_schedule(2.0, 0.0, math.pi)
    cfg = Q.ShortcutConfig(grid=GRID, dt=2e-3, n_record=41)
    rep = Q.shortcut_run(HARMONIC, sched, 0, cfg)
    assert rep.stats["F_end"] >= 0.999
    assert rep.stats["F_dressed_min"] >= 0.999
    assert rep.stats["F_end"] - rep.stats["F_end_control"] >= 0.05
    assert rep.stats["norm_drift"] < 1e-10
    # mid-protocol the bare-target fidelity dips while the dressed one holds
    assert np.min(rep.columns["F_vs_target"]) < 0.999
    assert np.min(rep.columns["F_vs_Utarget"]) >= 0.999


def test_shortcut_run_transport():
    sched = S.make_quintic_schedule(1.0, 10.0, math.pi)
    grid = Q.SpatialGrid(2048, -6.0, 18.0)
    cfg = Q.ShortcutConfig(grid=grid, dt=5e-4, n_record=21)
    rep = Q.shortcut_run(HARMONIC, sched, 0, cfg)
    assert rep.stats["F_end"] >= 0.999
    assert rep.stats["F_dressed_min"] >= 0.999
    assert rep.stats["F_end_control"] < 0.5


def test_shortcut_adiabatic_limit():
    sched = S.make_quintic_schedule(2.0, 0.0, 12 * math.pi)
    grid = Q.SpatialGrid(1024, -16.0, 16.0)
    cfg = Q.ShortcutConfig(grid=grid, dt=4e-3, n_record=11)
    rep = Q.shortcut_run(HARMONIC, sched, 0, cfg)
    assert rep.stats["F_end"] >= 0.999
    assert rep.stats["F_end_control"] >= 0.999


def test_shortcut_self_convergence():
    # halving dt and doubling the grid changes F_end by < 1e-5
    sched = S.make_quintic_schedule(2.0, 0.0, math.pi)
    cfg1 = Q.ShortcutConfig(grid=Q.SpatialGrid(1024, -16.0, 16.0), dt=2e-3,
                            n_record=5, control=False)
    cfg2 = Q.ShortcutConfig(grid=Q.SpatialGrid(2048, -16.0, 16.0), dt=1e-3,
                            n_record=5, control=False)
    r1 = Q.shortcut_run(HARMONIC, sched, 0, cfg1)
    r2 = Q.shortcut_run(HARMONIC, sched, 0, cfg2)
    assert abs(r1.stats["F_end"] - r2.stats["F_end"]) < 1e-5
