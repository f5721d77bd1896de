"""Classical dissipationless driving: Hamiltonian frames, invariants, box demo.

For a scale-invariant Hamiltonian H0 = p^2/2m + U0((q-f)/gamma)/gamma^2
the counterdiabatic term (dgamma/gamma)(q-f)p + df p keeps the adiabatic
invariant

    omega(z, lambda) = Omega(H0(z, lambda), lambda),
    Omega(E, lambda) = area of {z : H0(z, lambda) <= E},

exactly constant at any driving speed.  Three equivalent frames are
implemented:

    cd     H(q,p)     = H0 + (dgamma/gamma)(q-f)p + df p        (nonlocal)
    local  Hbar(q,pb) = pb^2/2m + U - (m/2)(ddgamma/gamma)(q-f)^2 - m ddf q
    tilde  Ht(qt,pt)  = (1/gamma^2)[pt^2/2m + U0(qt)]           (autonomous
                         in the reparametrized time tau)

linked by exact linear canonical maps, plus the bare frame (H0 alone) as
the control case.  The hard-wall box with a uniformly moving wall is
handled event-by-event with closed-form flights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import IntegrationFailure, UnboundedMotionError
from .potentials import DrivenPotential, PotentialSpec
from .schedules import DriveSchedule

__all__ = [
    "Frame",
    "PhasePoint",
    "Trajectory",
    "IntegratorConfig",
    "hamiltonian_value",
    "integrate",
    "phase_space_volume",
    "adiabatic_invariant",
    "invariant_I",
    "to_local",
    "from_local",
    "to_tilde",
    "from_tilde",
    "local_to_tilde",
    "reconstruct_from_tilde",
    "turning_points",
    "orbit_period",
    "box_simulate",
    "BoxDrive",
]


class Frame(enum.Enum):
    """Coordinate frame / Hamiltonian choice for a trajectory."""

    BARE = "bare"
    CD = "cd"
    LOCAL = "local"
    TILDE = "tilde"


class PhasePoint(NamedTuple):
    q: float
    p: float


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"       # "rk45" or "rk4"
    rtol: float = 1e-12
    atol: float = 1e-12
    step: float = 1e-3         # fixed step for rk4
    n_samples: int = 400
    event_tol: float = 1e-12
    compute_omega: bool = True

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.rtol <= 0 or self.atol <= 0 or self.step <= 0:
            raise ValueError("tolerances and step must be positive")


@dataclass
class Trajectory:
    frame: Frame
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy: np.ndarray
    omega: np.ndarray
    invariant: np.ndarray
    tau: np.ndarray | None = None   # filled for tilde-frame runs

    def __post_init__(self):
        if len(self.t) < 2:
            raise ValueError("trajectory needs at least 2 samples")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must increase strictly")

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(float(self.q[i]), float(self.p[i]))


# --- Hamiltonians and equations of motion -------------------------------

def _sched_vals(schedule: DriveSchedule, t: float, clamp: bool):
    g = float(schedule.gamma(t, clamp=clamp))
    dg = float(schedule.dgamma(t, clamp=clamp))
    ddg = float(schedule.ddgamma(t, clamp=clamp))
    f = float(schedule.f(t, clamp=clamp))
    df = float(schedule.df(t, clamp=clamp))
    ddf = float(schedule.ddf(t, clamp=clamp))
    return g, dg, ddg, f, df, ddf


def hamiltonian_value(frame: Frame, dp: DrivenPotential, z: PhasePoint,
                      t: float, clamp: bool = False) -> float:
    """Value of the frame Hamiltonian at phase point z and time t."""
    q, p = z
    m = dp.spec.mass
    g, dg, ddg, f, df, ddf = _sched_vals(dp.schedule, t, clamp)
    if frame is Frame.TILDE:
        return (p ** 2 / (2.0 * m) + float(dp.spec.u0(q))) / g ** 2
    u_driven = float(dp.spec.u0((q - f) / g)) / g ** 2
    h0 = p ** 2 / (2.0 * m) + u_driven
    if frame is Frame.BARE:
        return h0
    if frame is Frame.CD:
        return h0 + (dg / g) * (q - f) * p + df * p
    if frame is Frame.LOCAL:
        return (h0 - 0.5 * m * (ddg / g) * (q - f) ** 2 - m * ddf * q)
    raise ValueError(f"unknown frame {frame}")


def _rhs(frame: Frame, dp: DrivenPotential, clamp: bool):
    m = dp.spec.mass
    spec = dp.spec

    if frame is Frame.TILDE:
        def rhs(_tau, y):
            q, p = y
            return (p / m, -float(spec.du0(q)))
        return rhs

    sched = dp.schedule

    def rhs(t, y):
        q, p = y
        g, dg, ddg, f, df, ddf = _sched_vals(sched, t, clamp)
        dU = float(spec.du0((q - f) / g)) / g ** 3
        if frame is Frame.BARE:
            return (p / m, -dU)
        if frame is Frame.CD:
            return (p / m + (dg / g) * (q - f) + df,
                    -dU - (dg / g) * p)
        # LOCAL
        return (p / m,
                -dU + m * (ddg / g) * (q - f) + m * ddf)

    return rhs


# --- phase-space volume and adiabatic invariant --------------------------

def turning_points(spec: PotentialSpec, E: float, gamma: float = 1.0,
                   f: float = 0.0, rtol: float = 1e-12) -> tuple[float, float]:
    """Turning points of the driven potential at energy E (q1 < q2)."""
    if spec.shape == "box":
        L = spec.param_dict["L"]
        return (f, f + gamma * L)
    u_min = spec.u_min0 / gamma ** 2
    if E < u_min:
        raise UnboundedMotionError(f"E={E} below the potential minimum {u_min}")
    if E >= spec.u_asymptote / gamma ** 2:
        raise UnboundedMotionError(
            f"E={E} at or above the dissociation threshold "
            f"{spec.u_asymptote / gamma ** 2}")

    q_center = f + gamma * spec.q_min0

    def g(q):
        return float(spec.u0((q - f) / gamma)) / gamma ** 2 - E

    if E == u_min:
        return (q_center, q_center)

    # Bracket outward from the minimum, doubling the reach.
    scale = gamma * max(1.0, abs(spec.q_min0))
    step = 1e-3 * scale
    lo = q_center
    while g(lo) < 0.0:
        lo -= step
        step *= 2.0
        if step > 1e12 * scale:
            raise UnboundedMotionError(f"no inner turning point below E={E}")
    step = 1e-3 * scale
    hi = q_center
    while g(hi) < 0.0:
        hi += step
        step *= 2.0
        if step > 1e12 * scale:
            raise UnboundedMotionError(f"no outer turning point above E={E}")

    q1 = brentq(g, lo, q_center, rtol=rtol) if g(q_center) < 0 else q_center
    q2 = brentq(g, q_center, hi, rtol=rtol) if g(q_center) < 0 else q_center
    return (q1, q2)


def phase_space_volume(spec: PotentialSpec, E: float, gamma: float = 1.0,
                       f: float = 0.0, convention: str = "full") -> float:
    """Phase-space volume of the energy shell E of the driven potential.

    The full convention is the enclosed area, 2 int sqrt(2m(E-U)) dq over
    the classically allowed interval; half is the single-pass integral,
    half the area.  The square-root endpoint singularities are removed by
    the substitution q = c - r cos(theta).
    """
    if convention not in ("full", "half"):
        raise ValueError("convention must be 'full' or 'half'")
    m = spec.mass
    if spec.shape == "box":
        if E < 0.0:
            raise UnboundedMotionError("box energies are nonnegative")
        L = spec.param_dict["L"] * gamma
        area = 2.0 * L * math.sqrt(2.0 * m * E)
        return area if convention == "full" else 0.5 * area

    q1, q2 = turning_points(spec, E, gamma, f)
    if q1 == q2:
        return 0.0
    c = 0.5 * (q1 + q2)
    r = 0.5 * (q2 - q1)

    def integrand(theta):
        q = c - r * math.cos(theta)
        val = E - float(spec.u0((q - f) / gamma)) / gamma ** 2
        if val < 0.0:  # roundoff right at the turning points
            val = 0.0
        return math.sqrt(2.0 * m * val) * r * math.sin(theta)

    single, _ = quad(integrand, 0.0, math.pi, epsabs=1e-13, epsrel=1e-11,
                     limit=200)
    return 2.0 * single if convention == "full" else single


def adiabatic_invariant(dp: DrivenPotential, z: PhasePoint, t: float,
                        convention: str = "full", clamp: bool = False) -> float:
    """omega(z, lambda(t)) via the scaling shortcut Omega(E,g,f) = Omega(g^2 E,1,0)."""
    spec = dp.spec
    g = float(dp.schedule.gamma(t, clamp=clamp))
    f = float(dp.schedule.f(t, clamp=clamp))
    E = hamiltonian_value(Frame.BARE, dp, z, t, clamp=clamp)
    if spec.shape == "box":
        return phase_space_volume(spec, E, gamma=g, f=f, convention=convention)
    return phase_space_volume(spec, g * g * E, gamma=1.0, f=0.0,
                              convention=convention)


def orbit_period(spec: PotentialSpec, E: float, gamma: float = 1.0,
                 f: float = 0.0) -> float:
    """Period of the closed orbit at energy E: dOmega/dE (full convention)."""
    h = 1e-6 * max(abs(E), abs(spec.u_min0) / gamma ** 2, 1e-12)
    lo, hi = E - h, E + h
    w_lo = phase_space_volume(spec, lo, gamma, f)
    w_hi = phase_space_volume(spec, hi, gamma, f)
    return (w_hi - w_lo) / (hi - lo)


# --- Eq.-(27) dynamical invariant and canonical maps ---------------------

def invariant_I(frame: Frame, dp: DrivenPotential, z: PhasePoint, t: float,
                clamp: bool = False) -> float:
    """The dynamical invariant I expressed in the given frame's coordinates."""
    q, p = z
    m = dp.spec.mass
    g, dg, ddg, f, df, ddf = _sched_vals(dp.schedule, t, clamp)
    if frame is Frame.CD:
        return g * g * p ** 2 / (2.0 * m) + float(dp.spec.u0((q - f) / g))
    if frame is Frame.LOCAL:
        shifted = p - m * (dg / g) * (q - f) - m * df
        return g * g * shifted ** 2 / (2.0 * m) + float(dp.spec.u0((q - f) / g))
    if frame is Frame.TILDE:
        return p ** 2 / (2.0 * m) + float(dp.spec.u0(q))
    raise ValueError("invariant I is defined for cd, local and tilde frames")


def to_local(z: PhasePoint, schedule: DriveSchedule, t: float, mass: float,
             clamp: bool = False) -> PhasePoint:
    """(q,p) -> (qbar,pbar): qbar = q, pbar = p + m df + m (dgamma/gamma)(q-f)."""
    q, p = z
    g, dg, _, f, df, _ = _sched_vals(schedule, t, clamp)
    return PhasePoint(q, (p + mass * df) + mass * (dg / g) * (q - f))


def from_local(zbar: PhasePoint, schedule: DriveSchedule, t: float,
               mass: float, clamp: bool = False) -> PhasePoint:
    q, pbar = zbar
    g, dg, _, f, df, _ = _sched_vals(schedule, t, clamp)
    return PhasePoint(q, pbar - mass * df - mass * (dg / g) * (q - f))


def to_tilde(z: PhasePoint, schedule: DriveSchedule, t: float,
             clamp: bool = False) -> PhasePoint:
    """(q,p) -> (qt,pt): qt = (q-f)/gamma, pt = gamma p."""
    q, p = z
    g, _, _, f, _, _ = _sched_vals(schedule, t, clamp)
    return PhasePoint((q - f) / g, g * p)


def from_tilde(zt: PhasePoint, schedule: DriveSchedule, t: float,
               clamp: bool = False) -> PhasePoint:
    qt, pt = zt
    g, _, _, f, _, _ = _sched_vals(schedule, t, clamp)
    return PhasePoint(g * qt + f, pt / g)


def local_to_tilde(zbar: PhasePoint, schedule: DriveSchedule, t: float,
                   mass: float, clamp: bool = False) -> PhasePoint:
    """(qbar,pbar) -> (qt,pt): qt=(qbar-f)/gamma, pt=gamma(pbar-m df)-m dgamma (qbar-f)."""
    qbar, pbar = zbar
    g, dg, _, f, df, _ = _sched_vals(schedule, t, clamp)
    return PhasePoint((qbar - f) / g,
                      g * (pbar - mass * df) - mass * dg * (qbar - f))


# --- trajectory integration ----------------------------------------------

def _rk4_solve(rhs, y0, t_eval):
    """Fixed-step RK4 landing exactly on every requested sample time."""
    ys = [np.asarray(y0, dtype=float)]
    y = ys[0]
    for a, b in zip(t_eval[:-1], t_eval[1:]):
        h = b - a
        k1 = np.asarray(rhs(a, y))
        k2 = np.asarray(rhs(a + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(a + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(b, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys.append(y)
    return np.asarray(ys)


def _solve(rhs, span, y0, cfg, t_eval):
    if cfg.method == "rk45":
        sol = solve_ivp(rhs, span, y0, method="RK45", rtol=cfg.rtol,
                        atol=cfg.atol, t_eval=t_eval)
        if not sol.success:
            raise IntegrationFailure(sol.message, partial=sol)
        return sol.y.T
    # rk4: subdivide each sampling interval down to the configured step
    fine = [t_eval[0]]
    for a, b in zip(t_eval[:-1], t_eval[1:]):
        k = max(1, int(math.ceil((b - a) / cfg.step)))
        fine.extend(np.linspace(a, b, k + 1)[1:])
    fine = np.asarray(fine)
    ys = _rk4_solve(rhs, y0, fine)
    keep = np.searchsorted(fine, t_eval)
    return ys[keep]


def integrate(frame: Frame, dp: DrivenPotential, z0: PhasePoint, t0: float,
              t1: float, cfg: IntegratorConfig | None = None,
              clamp: bool = False) -> Trajectory:
    """Integrate Hamilton's equations in the requested frame.

    The tilde frame is integrated in the reparametrized time tau, where
    its dynamics is autonomous; the physical time is carried along as an
    extra state variable with dt/dtau = gamma(t)^2, so every sample knows
    its (t, tau) pair.
    """
    cfg = cfg or IntegratorConfig()
    if t1 <= t0:
        raise ValueError("need t1 > t0")
    sched = dp.schedule

    if frame is Frame.TILDE:
        tau0 = sched.tau(t0, clamp=clamp)
        tau1 = sched.tau(t1, clamp=clamp)
        tau_eval = np.linspace(tau0, tau1, cfg.n_samples)
        m = dp.spec.mass
        spec = dp.spec

        def rhs(_tau, y):
            qt, pt, tt = y
            g = float(sched.gamma(tt, clamp=True))
            return (pt / m, -float(spec.du0(qt)), g * g)

        ys = _solve(rhs, (tau0, tau1), [z0.q, z0.p, t0], cfg, tau_eval)
        qs, ps, t_eval = ys[:, 0], ys[:, 1], ys[:, 2].copy()
        t_eval[0], t_eval[-1] = t0, t1
        traj = _fill_columns(frame, dp, t_eval, qs, ps, cfg, clamp)
        traj.tau = tau_eval
        return traj

    t_eval = np.linspace(t0, t1, cfg.n_samples)
    rhs = _rhs(frame, dp, clamp)
    ys = _solve(rhs, (t0, t1), list(z0), cfg, t_eval)
    return _fill_columns(frame, dp, t_eval, ys[:, 0], ys[:, 1], cfg, clamp)


def _fill_columns(frame, dp, t_eval, qs, ps, cfg, clamp) -> Trajectory:
    n = len(t_eval)
    energy = np.empty(n)
    omega = np.full(n, np.nan)
    inv = np.empty(n)
    inv_frame = frame if frame is not Frame.BARE else Frame.CD
    for i in range(n):
        z = PhasePoint(float(qs[i]), float(ps[i]))
        energy[i] = hamiltonian_value(frame, dp, z, float(t_eval[i]), clamp)
        inv[i] = invariant_I(inv_frame, dp, z, float(t_eval[i]), clamp)
        if cfg.compute_omega:
            omega[i] = _omega_of_sample(frame, dp, z, float(t_eval[i]), clamp)
    return Trajectory(frame, np.asarray(t_eval, dtype=float),
                      np.asarray(qs, dtype=float), np.asarray(ps, dtype=float),
                      energy, omega, inv)


def _omega_of_sample(frame, dp, z, t, clamp) -> float:
    if frame is Frame.TILDE:
        # the tilde coordinates live in the static base potential
        E = z.p ** 2 / (2.0 * dp.spec.mass) + float(dp.spec.u0(z.q))
        return phase_space_volume(dp.spec, E, 1.0, 0.0)
    return adiabatic_invariant(dp, z, t, clamp=clamp)


def reconstruct_from_tilde(tilde_traj: Trajectory, dp: DrivenPotential,
                           clamp: bool = False) -> tuple[Trajectory, Trajectory]:
    """Map a tilde-frame trajectory back to the cd and local frames.

    q(t) = gamma qt(tau) + f, p(t) = pt(tau)/gamma; the local momentum
    additionally picks up m dgamma qt + m df.
    """
    if tilde_traj.tau is None:
        raise ValueError("tilde trajectory lacks its tau map")
    sched = dp.schedule
    m = dp.spec.mass
    n = len(tilde_traj.t)
    q_cd = np.empty(n)
    p_cd = np.empty(n)
    p_loc = np.empty(n)
    for i, t in enumerate(tilde_traj.t):
        g, dg, _, f, df, _ = _sched_vals(sched, float(t), clamp)
        qt, pt = tilde_traj.q[i], tilde_traj.p[i]
        q_cd[i] = g * qt + f
        p_cd[i] = pt / g
        p_loc[i] = pt / g + m * dg * qt + m * df
    cfg = IntegratorConfig()
    cd = _fill_columns(Frame.CD, dp, tilde_traj.t, q_cd, p_cd, cfg, clamp)
    loc = _fill_columns(Frame.LOCAL, dp, tilde_traj.t, q_cd, p_loc, cfg, clamp)
    return cd, loc


# --- time-dependent box ---------------------------------------------------

@dataclass(frozen=True)
class BoxDrive:
    """Piecewise-linear wall law L(t): constant, then rate u on [t0, t1]."""

    L0: float
    rate: float
    t0: float
    t1: float

    def __post_init__(self):
        if self.L0 <= 0:
            raise ValueError("L0 must be positive")
        if self.t1 < self.t0:
            raise ValueError("need t1 >= t0")
        if self.L(self.t1) <= 0:
            raise ValueError("wall law collapses the box")

    @property
    def L1(self) -> float:
        return self.L0 + self.rate * (self.t1 - self.t0)

    def L(self, t: float) -> float:
        if t <= self.t0:
            return self.L0
        if t >= self.t1:
            return self.L1
        return self.L0 + self.rate * (t - self.t0)

    def Ldot(self, t: float) -> float:
        # drive active on [t0, t1): sample labels at the kick instants then
        # agree with the post-kick state
        return self.rate if self.t0 <= t < self.t1 else 0.0


def box_simulate(drive: BoxDrive, z0: PhasePoint, t_end: float,
                 mass: float = 1.0, frame: Frame = Frame.CD,
                 n_samples: int = 600, t_start: float | None = None) -> Trajectory:
    """Event-driven particle in a box with one uniformly moving wall.

    The physical motion is free flight between hard walls at q = 0 and
    q = L(t); at the moving wall the velocity reflects elastically in the
    wall rest frame (v -> 2 Ldot - v).  Counterdiabatic driving adds exact
    velocity jumps when the drive switches on and off,

        dv = +(u/L0) q  at t0,      dv = -(u/L1) q  at t1,

    realizing the impulse potential -(m/2)(Ldd/L) q^2.  The cd and local
    frames share this physical track and differ only in the reported
    momentum: local uses the kinetic momentum m v, cd uses
    p = m v - m (u/L) q while the drive is on, so L(t) p stays constant
    between collisions.  The bare frame skips the jumps (control case).
    """
    if frame not in (Frame.CD, Frame.LOCAL, Frame.BARE):
        raise ValueError("box frames: cd, local, bare")
    t = drive.t0 - 0.25 * (drive.t1 - drive.t0) - 0.1 if t_start is None else t_start
    if t_end <= t:
        raise ValueError("t_end must exceed the start time")
    q, p0 = z0
    if not (0.0 < q < drive.L(t)):
        raise ValueError(f"initial position {q} outside the box [0, {drive.L(t)}]")
    v = p0 / mass
    kicked = frame in (Frame.CD, Frame.LOCAL)

    # Event log: (time, position, velocity) after each event.
    times, qs, vs = [t], [q], [v]

    def advance(t, q, v, t_stop):
        """Flight with wall reflections up to t_stop (u constant inside)."""
        u = drive.Ldot(0.5 * (t + t_stop))
        while True:
            dt_left = -q / v if v < 0.0 else math.inf
            dt_right = (drive.L(t) - q) / (v - u) if v > u else math.inf
            dt_event = min(dt_left, dt_right)
            if dt_event >= t_stop - t:
                q += v * (t_stop - t)
                times.append(t_stop), qs.append(q), vs.append(v)
                return t_stop, q, v
            t += dt_event
            if dt_right < dt_left:
                q = drive.L(t)  # exact wall contact
                v = 2.0 * u - v
            else:
                q = 0.0
                v = -v
            times.append(t), qs.append(q), vs.append(v)

    stops = sorted(b for b in (drive.t0, drive.t1) if t < b < t_end)
    for stop in stops + [t_end]:
        t, q, v = advance(t, q, v, stop)
        if kicked and t < t_end:
            if t == drive.t0:
                v += (drive.rate / drive.L0) * q
            elif t == drive.t1:
                v -= (drive.rate / drive.L1) * q
            times.append(t), qs.append(q), vs.append(v)

    # Resample on a uniform grid, keeping every event point exactly.
    ev_t, ev_q, ev_v = map(np.asarray, (times, qs, vs))
    t_grid = np.unique(np.concatenate([np.linspace(times[0], t_end, n_samples),
                                       ev_t]))
    idx = np.clip(np.searchsorted(ev_t, t_grid, side="right") - 1,
                  0, len(ev_t) - 1)
    q_grid = ev_q[idx] + ev_v[idx] * (t_grid - ev_t[idx])
    v_grid = ev_v[idx]

    n = len(t_grid)
    p_col = np.empty(n)
    energy = np.empty(n)
    omega = np.empty(n)
    inv = np.empty(n)
    for i, ti in enumerate(t_grid):
        u = drive.Ldot(ti)
        L = drive.L(ti)
        qq, vv = q_grid[i], v_grid[i]
        if frame is Frame.CD:
            p = mass * vv - mass * (u / L) * qq
            energy[i] = p ** 2 / (2.0 * mass) + (u / L) * qq * p
        else:
            p = mass * vv
            energy[i] = 0.5 * mass * vv ** 2
        p_col[i] = p
        omega[i] = 2.0 * L * abs(p)
        gamma = L / drive.L0
        if frame is Frame.LOCAL:
            shifted = p - mass * (u / L) * qq
            inv[i] = gamma ** 2 * shifted ** 2 / (2.0 * mass)
        else:
            inv[i] = gamma ** 2 * p ** 2 / (2.0 * mass)
    return Trajectory(frame, t_grid, q_grid, p_col, energy, omega, inv)
