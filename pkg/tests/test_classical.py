"""Classical frames, invariants, canonical maps and phase-space volumes."""

import math

import numpy as np
import pytest

from stalab import classical as C
from stalab import potentials as P
from stalab import schedules as S
from stalab.errors import UnboundedMotionError
from stalab.report import relative_drift


def static_dp(spec, gamma=1.0, f=0.0):
    return P.DrivenPotential(spec, S.make_constant_schedule(gamma, f, 1.0))


# --- Hamiltonian values ---------------------------------------------------

def test_cd_equals_bare_when_static():
    dp = static_dp(P.morse(1.0, 1.0, 0.5))
    z = C.PhasePoint(0.3, 0.4)
    assert C.hamiltonian_value(C.Frame.CD, dp, z, 0.5) == pytest.approx(
        C.hamiltonian_value(C.Frame.BARE, dp, z, 0.5), abs=1e-15)


def test_cd_cross_term_value():
    # (dgamma/gamma)(q - f) p + df p at q=1, p=1, gamma=1, dgamma=0.5 -> 0.5
    spec = P.custom(lambda q: np.zeros_like(q), lambda q: np.zeros_like(q))
    ts = np.linspace(0.0, 1.0, 2001)
    sched = S.make_custom_schedule(ts, 1.0 + 0.5 * ts, np.zeros_like(ts))
    dp = P.DrivenPotential(spec, sched)
    z = C.PhasePoint(1.0, 1.0)
    h_cd = C.hamiltonian_value(C.Frame.CD, dp, z, 0.0)
    h_bare = C.hamiltonian_value(C.Frame.BARE, dp, z, 0.0)
    assert h_cd - h_bare == pytest.approx(0.5, abs=1e-9)


def test_tilde_value_is_invariant_over_gamma_sq():
    spec = P.morse(1.0, 1.0, 0.5)
    dp = static_dp(spec, gamma=1.6)
    zt = C.PhasePoint(0.2, 0.3)
    h = C.hamiltonian_value(C.Frame.TILDE, dp, zt, 0.4)
    i_val = C.invariant_I(C.Frame.TILDE, dp, zt, 0.4)
    assert h == pytest.approx(i_val / 1.6 ** 2, rel=1e-14)


# --- phase-space volume ---------------------------------------------------

def test_volume_harmonic_closed_form():
    spec = P.harmonic(1.3, 0.7)
    for E in (0.1, 0.5, 2.0):
        assert C.phase_space_volume(spec, E) == pytest.approx(
            2.0 * math.pi * E / 1.3, rel=1e-10)
        assert C.phase_space_volume(spec, E, convention="half") == pytest.approx(
            math.pi * E / 1.3, rel=1e-10)


def test_volume_morse_closed_form():
    # unit-depth unit-width Morse at mass 1/2: area = 2 pi (1 - sqrt(-E g^2))
    spec = P.morse(1.0, 1.0, 0.5)
    val = C.phase_space_volume(spec, -0.5)
    assert val == pytest.approx(2.0 * math.pi * (1.0 - 1.0 / math.sqrt(2.0)),
                                rel=1e-10)


def test_volume_degenerate_shell():
    spec = P.morse(1.0, 1.0, 0.5)
    assert C.phase_space_volume(spec, -1.0) == 0.0


def test_volume_unbounded_errors():
    spec = P.morse(1.0, 1.0, 0.5)
    with pytest.raises(UnboundedMotionError):
        C.phase_space_volume(spec, 0.5)
    with pytest.raises(UnboundedMotionError):
        C.phase_space_volume(spec, -1.5)


def test_volume_box():
    spec = P.box(2.0, 1.0)
    E = 0.5  # |p| = 1
    assert C.phase_space_volume(spec, E) == pytest.approx(4.0, rel=1e-13)


def test_adiabatic_invariant_scaling_identity():
    rng = np.random.default_rng(11)
    spec = P.morse(1.0, 1.0, 0.5)
    for _ in range(6):
        g = rng.uniform(0.6, 1.8)
        f = rng.uniform(-0.5, 0.5)
        # bound state of the driven potential
        q = f + rng.uniform(-0.2, 1.0) * g
        u = float(spec.u0((q - f) / g)) / g ** 2
        p = rng.uniform(0.1, 0.8) * math.sqrt(max(-u, 1e-6))
        E = p * p + u
        if E >= 0.0:
            continue
        direct = C.phase_space_volume(spec, E, gamma=g, f=f)
        shortcut = C.phase_space_volume(spec, g * g * E, gamma=1.0, f=0.0)
        assert direct == pytest.approx(shortcut, rel=1e-9)


def test_adiabatic_invariant_harmonic_shell_independent():
    spec = P.harmonic(1.0, 1.0)
    dp = static_dp(spec)
    E = 0.7
    for phase in np.linspace(0.0, 2 * math.pi, 7):
        q = math.sqrt(2 * E) * math.cos(phase)
        p = math.sqrt(2 * E) * math.sin(phase)
        w = C.adiabatic_invariant(dp, C.PhasePoint(q, p), 0.0)
        assert w == pytest.approx(2.0 * math.pi * E, rel=1e-9)


# --- canonical maps -------------------------------------------------------

def test_maps_static_identity():
    sched = S.make_constant_schedule()
    z = C.PhasePoint(0.7, -0.4)
    assert C.to_local(z, sched, 0.3, 1.0) == z
    assert C.to_tilde(z, sched, 0.3) == z


def test_to_tilde_example():
    sched = S.make_constant_schedule(2.0, 0.0, 1.0)
    zt = C.to_tilde(C.PhasePoint(2.0, 1.0), sched, 0.5)
    assert zt == pytest.approx((1.0, 2.0))


def test_map_composition_and_inverses():
    rng = np.random.default_rng(5)
    sched = S.make_quintic_schedule(1.8, 0.9, 1.3)
    m = 0.7
    for _ in range(25):
        z = C.PhasePoint(rng.normal(), rng.normal())
        t = rng.uniform(0.0, 1.3)
        zbar = C.to_local(z, sched, t, m)
        zt_direct = C.to_tilde(z, sched, t)
        zt_via = C.local_to_tilde(zbar, sched, t, m)
        assert zt_via.q == pytest.approx(zt_direct.q, abs=1e-14)
        assert zt_via.p == pytest.approx(zt_direct.p, abs=1e-14)
        back = C.from_local(zbar, sched, t, m)
        assert back.q == pytest.approx(z.q, abs=1e-14)
        assert back.p == pytest.approx(z.p, abs=1e-14)
        back2 = C.from_tilde(zt_direct, sched, t)
        assert back2.q == pytest.approx(z.q, abs=1e-14)
        assert back2.p == pytest.approx(z.p, abs=1e-14)


def test_invariant_frame_consistency():
    rng = np.random.default_rng(9)
    spec = P.morse(1.0, 1.0, 0.5)
    sched = S.make_quintic_schedule(1.5, 0.4, 1.0)
    dp = P.DrivenPotential(spec, sched)
    for _ in range(20):
        z = C.PhasePoint(rng.uniform(-0.3, 1.0), rng.uniform(-0.6, 0.6))
        t = rng.uniform(0.0, 1.0)
        i_cd = C.invariant_I(C.Frame.CD, dp, z, t)
        i_loc = C.invariant_I(C.Frame.LOCAL, dp,
                              C.to_local(z, sched, t, spec.mass), t)
        i_til = C.invariant_I(C.Frame.TILDE, dp, C.to_tilde(z, sched, t), t)
        assert i_loc == pytest.approx(i_cd, rel=1e-12, abs=1e-13)
        assert i_til == pytest.approx(i_cd, rel=1e-12, abs=1e-13)
    with pytest.raises(ValueError):
        C.invariant_I(C.Frame.BARE, dp, C.PhasePoint(0, 0), 0.0)


# --- integration ------------------------------------------------------------

def test_static_harmonic_energy_drift():
    # tolerance 1e-13 is needed to hold the drift bound over 100 periods
    spec = P.harmonic(1.0, 1.0)
    dp = static_dp(spec)
    cfg = C.IntegratorConfig(rtol=1e-13, atol=1e-13, n_samples=200,
                             compute_omega=False)
    T = 2 * math.pi
    traj = C.integrate(C.Frame.BARE, dp, C.PhasePoint(1.0, 0.0), 0.0,
                       100 * T, cfg, clamp=True)
    assert relative_drift(traj.energy) < 1e-10


MORSE_SPEC = P.morse(1.0, 1.0, 0.5)
MORSE_Z0 = C.PhasePoint(0.0, math.sqrt(0.5))  # E = -1/2


def morse_drive(frac=0.2, gF=0.5):
    E0 = -0.5
    T_slow = math.pi / math.sqrt(-E0) * max(1.0, 1.0 / gF ** 2)
    tauF = frac * T_slow
    return P.DrivenPotential(MORSE_SPEC, S.make_quintic_schedule(gF, 0.0, tauF))


def test_cd_morse_omega_conserved_and_bare_contrast():
    dp = morse_drive()
    tauF = dp.schedule.duration
    cfg = C.IntegratorConfig(n_samples=120)
    cd = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, tauF, cfg)
    assert relative_drift(cd.omega) < 1e-8
    assert relative_drift(cd.invariant) < 1e-8
    bare = C.integrate(C.Frame.BARE, dp, MORSE_Z0, 0.0, tauF, cfg)
    assert abs(bare.omega[-1] - bare.omega[0]) / bare.omega[0] > 0.10


@pytest.mark.parametrize("name,spec,z0,gF,frac", [
    ("harmonic", P.harmonic(1.0, 1.0), C.PhasePoint(1.0, 0.0), 0.4, 0.10),
    ("power4", P.power_law(1.0, 4, 1.0), C.PhasePoint(0.9, 0.1), 0.4, 0.10),
    ("gauss", P.gaussian_well(4.0, 1.0, 1.0), C.PhasePoint(0.3, 1.5), 0.4, 0.08),
])
def test_cd_conservation_across_catalog(name, spec, z0, gF, frac):
    E0 = C.hamiltonian_value(C.Frame.BARE, static_dp(spec), z0, 0.0)
    T = C.orbit_period(spec, E0)
    tauF = frac * T * max(1.0, 1.0 / gF ** 2)
    dp = P.DrivenPotential(spec, S.make_quintic_schedule(gF, 0.0, tauF))
    cfg = C.IntegratorConfig(n_samples=80)
    cd = C.integrate(C.Frame.CD, dp, z0, 0.0, tauF, cfg)
    assert relative_drift(cd.omega) < 1e-7
    bare = C.integrate(C.Frame.BARE, dp, z0, 0.0, tauF, cfg)
    assert abs(bare.omega[-1] - bare.omega[0]) / abs(bare.omega[0]) > 0.10


def test_frame_equivalence_configuration_tracks():
    dp = morse_drive()
    tauF = dp.schedule.duration
    m = MORSE_SPEC.mass
    cfg = C.IntegratorConfig(n_samples=150, compute_omega=False)
    cd = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, tauF, cfg)
    zbar0 = C.to_local(MORSE_Z0, dp.schedule, 0.0, m)
    loc = C.integrate(C.Frame.LOCAL, dp, zbar0, 0.0, tauF, cfg)
    assert np.max(np.abs(cd.q - loc.q)) < 1e-6
    # momenta differ by exactly the shear shift
    for i in range(0, 150, 10):
        t = cd.t[i]
        mapped = C.to_local(C.PhasePoint(cd.q[i], cd.p[i]), dp.schedule,
                            float(t), m)
        assert mapped.p == pytest.approx(loc.p[i], abs=2e-7)


def test_endpoint_restoration_local_frame():
    # run from before the protocol to after it: omega returns to its
    # initial value even though it wanders in between
    dp = morse_drive()
    tauF = dp.schedule.duration
    cfg = C.IntegratorConfig(n_samples=140)
    traj = C.integrate(C.Frame.LOCAL, dp, MORSE_Z0, -0.2 * tauF, 1.2 * tauF,
                       cfg, clamp=True)
    before = traj.omega[traj.t <= 0.0]
    after = traj.omega[traj.t >= tauF]
    inside = traj.omega[(traj.t > 0.2 * tauF) & (traj.t < 0.8 * tauF)]
    assert abs(after[-1] - before[0]) / before[0] < 1e-7
    assert np.max(np.abs(inside - before[0])) / before[0] > 1e-3


def test_newton_residual_local_frame():
    # m qdd = -(1/g^3) U0'((q-f)/g) + m (ddg/g)(q-f) + m ddf, with qdd from
    # finite differences of the sampled track
    spec = P.harmonic(1.0, 1.0)
    sched = S.make_quintic_schedule(1.5, 0.8, 2.0)
    dp = P.DrivenPotential(spec, sched)
    cfg = C.IntegratorConfig(n_samples=4001, compute_omega=False)
    traj = C.integrate(C.Frame.LOCAL, dp, C.PhasePoint(0.9, 0.2), 0.0, 2.0, cfg)
    t = traj.t
    dt = t[1] - t[0]
    qdd = (traj.q[2:] - 2 * traj.q[1:-1] + traj.q[:-2]) / dt ** 2
    rhs = np.empty_like(qdd)
    m = spec.mass
    for i, ti in enumerate(t[1:-1]):
        g = float(sched.gamma(ti))
        f = float(sched.f(ti))
        rhs[i] = (-float(spec.du0((traj.q[i + 1] - f) / g)) / g ** 3 / m
                  + (float(sched.ddgamma(ti)) / g) * (traj.q[i + 1] - f)
                  + float(sched.ddf(ti)))
    resid = qdd - rhs
    assert math.sqrt(float(np.mean(resid ** 2))) < 1e-6


def test_reconstruct_from_tilde_static_identity():
    dp = static_dp(MORSE_SPEC)
    cfg = C.IntegratorConfig(n_samples=90)
    til = C.integrate(C.Frame.TILDE, dp, MORSE_Z0, 0.0, 1.0, cfg)
    cd, loc = C.reconstruct_from_tilde(til, dp)
    direct = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, 1.0, cfg)
    assert np.max(np.abs(cd.q - direct.q)) < 1e-8
    assert np.max(np.abs(cd.p - direct.p)) < 1e-8


def test_reconstruct_from_tilde_driven_morse():
    dp = morse_drive()
    tauF = dp.schedule.duration
    cfg = C.IntegratorConfig(n_samples=130, compute_omega=False)
    til = C.integrate(C.Frame.TILDE, dp, MORSE_Z0, 0.0, tauF, cfg)
    cd_rec, loc_rec = C.reconstruct_from_tilde(til, dp)
    cfg2 = C.IntegratorConfig(n_samples=130, compute_omega=False)
    for i in (0, 40, 90, 129):
        t = float(cd_rec.t[i])
        if t <= 0.0:
            continue
        seg = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, t, cfg2)
        assert abs(seg.q[-1] - cd_rec.q[i]) < 1e-6
        assert abs(seg.p[-1] - cd_rec.p[i]) < 1e-6
        segl = C.integrate(C.Frame.LOCAL, dp,
                           C.to_local(MORSE_Z0, dp.schedule, 0.0, 0.5),
                           0.0, t, cfg2)
        assert abs(segl.q[-1] - loc_rec.q[i]) < 1e-6
        assert abs(segl.p[-1] - loc_rec.p[i]) < 1e-6


def test_reconstruct_transport_only():
    # gamma = 1: qbar = qt(tau) + f(t), pbar = pt(tau) + m df
    spec = P.harmonic(1.0, 1.0)
    sched = S.make_quintic_schedule(1.0, 2.0, 1.5)
    dp = P.DrivenPotential(spec, sched)
    cfg = C.IntegratorConfig(n_samples=80, compute_omega=False)
    til = C.integrate(C.Frame.TILDE, dp, C.PhasePoint(0.5, 0.0), 0.0, 1.5, cfg)
    _, loc = C.reconstruct_from_tilde(til, dp)
    for i in (10, 40, 70):
        t = float(til.t[i])
        assert loc.q[i] == pytest.approx(til.q[i] + float(sched.f(t)),
                                         abs=1e-12)
        assert loc.p[i] == pytest.approx(til.p[i]
                                         + 1.0 * float(sched.df(t)), abs=1e-12)
    with pytest.raises(ValueError):
        C.reconstruct_from_tilde(
            C.integrate(C.Frame.CD, dp, C.PhasePoint(0.5, 0.0), 0.0, 1.0, cfg),
            dp)


def test_generator_condition_second_order():
    # omega(z + dz, lambda + dlambda) - omega(z, lambda) = O(dlambda^2) with
    # dz generated by xi_gamma = (q-f) p / gamma; Richardson ratio ~ 4
    spec = MORSE_SPEC
    z = C.PhasePoint(0.4, 0.3)
    base = static_dp(spec)
    w0 = C.adiabatic_invariant(base, z, 0.0)

    def deviation(dg):
        g2 = 1.0 + dg
        dz = C.PhasePoint(z.q + dg * z.q, z.p - dg * z.p)
        dp2 = static_dp(spec, gamma=g2)
        return abs(C.adiabatic_invariant(dp2, dz, 0.0) - w0)

    d1 = deviation(2e-3)
    d2 = deviation(1e-3)
    assert d1 / d2 == pytest.approx(4.0, rel=0.15)


def test_fixed_step_rk4_agrees_with_rk45():
    dp = morse_drive()
    tauF = dp.schedule.duration
    cfg45 = C.IntegratorConfig(n_samples=50, compute_omega=False)
    cfg4 = C.IntegratorConfig(method="rk4", step=2e-4, n_samples=50,
                              compute_omega=False)
    a = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, tauF, cfg45)
    b = C.integrate(C.Frame.CD, dp, MORSE_Z0, 0.0, tauF, cfg4)
    assert np.max(np.abs(a.q - b.q)) < 1e-8
