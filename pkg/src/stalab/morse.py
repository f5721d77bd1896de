"""Closed-form oracles for the parametrically driven Morse oscillator.

Units inside this module follow the analytic reference conventions:
depth U_m = 1, inverse width beta = 1 and mass m = 1/2 except for the
parameter the chosen mode varies, so H0(q, p) = p^2 + U(q).  Three drive
modes are supported:

    scale  -- U(q; g)  = (1/g^2) [exp(-2q/g) - 2 exp(-q/g)]
    width  -- U(q; b)  = exp(-2 b q) - 2 exp(-b q)
    depth  -- U(q; um) = um [exp(-2q) - 2 exp(-q)]

For each mode the phase-space volume Omega(E) of the energy shell (the
enclosed area), the turning points, the microcanonical average of the
parametric force d_lambda H0 and the counterdiabatic generator xi are
available in closed form.  xi satisfies, along any bound H0 orbit,

    d xi / dt = d_lambda H0 - <d_lambda H0>,

which is also the integral relation between two points on a shell.  The
inverse-trigonometric terms of xi are branch-ambiguous pointwise; the
*_series evaluators enforce continuity along a trajectory by unwrapping
each angle term.

Two width-mode published forms fail their own defining relations and are
replaced by forms verified against brute-force quadrature and orbit
integration: the shell volume uses 2 pi (1 - sqrt(-E))/beta, and the
generator uses the composite arctan written below.  The depth-mode
generator is the published composite with its overall sign reversed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .errors import UnboundedMotionError
from .potentials import PotentialSpec, custom

__all__ = [
    "MorseMode",
    "MODES",
    "MASS",
    "bound_range",
    "potential",
    "dpotential",
    "dlambda_H0",
    "h0",
    "omega_closed_form",
    "omega_quadrature",
    "turning_points",
    "orbit_period",
    "mc_average_closed_form",
    "microcanonical_average",
    "xi_closed_form",
    "xi_series",
    "dxi_source",
    "integrate_orbit",
    "xi_pde_residual",
    "generator_increment_check",
    "as_potential_spec",
]

MASS = 0.5


class MorseMode(enum.Enum):
    SCALE = "scale"
    WIDTH = "width"
    DEPTH = "depth"


MODES = (MorseMode.SCALE, MorseMode.WIDTH, MorseMode.DEPTH)


def _check_param(mode: MorseMode, val: float) -> None:
    if val <= 0.0:
        raise ValueError(f"{mode.value} parameter must be positive, got {val}")


def bound_range(mode: MorseMode, val: float) -> tuple[float, float]:
    """(E_min, E_max) of bound motion; E_max = 0 is the dissociation limit."""
    _check_param(mode, val)
    if mode is MorseMode.SCALE:
        return (-1.0 / val ** 2, 0.0)
    if mode is MorseMode.WIDTH:
        return (-1.0, 0.0)
    return (-val, 0.0)


def _check_bound(mode: MorseMode, val: float, E: float,
                 closed_ok: bool = True) -> None:
    lo, hi = bound_range(mode, val)
    ok = (E >= lo and E < hi) if closed_ok else (E > lo and E < hi)
    if not ok:
        raise UnboundedMotionError(
            f"E={E} outside the bound range [{lo}, {hi}) of {mode.value} mode")


def potential(mode: MorseMode, val: float, q):
    q = np.asarray(q, dtype=float)
    if mode is MorseMode.SCALE:
        e = np.exp(-q / val)
        return (e * e - 2.0 * e) / val ** 2
    if mode is MorseMode.WIDTH:
        e = np.exp(-val * q)
        return e * e - 2.0 * e
    e = np.exp(-q)
    return val * (e * e - 2.0 * e)


def dpotential(mode: MorseMode, val: float, q):
    q = np.asarray(q, dtype=float)
    if mode is MorseMode.SCALE:
        e = np.exp(-q / val)
        return (-2.0 * e * e + 2.0 * e) / val ** 3
    if mode is MorseMode.WIDTH:
        e = np.exp(-val * q)
        return val * (-2.0 * e * e + 2.0 * e)
    e = np.exp(-q)
    return val * (-2.0 * e * e + 2.0 * e)


def dlambda_H0(mode: MorseMode, val: float, q):
    """Derivative of H0 with respect to the driven parameter."""
    q = np.asarray(q, dtype=float)
    if mode is MorseMode.SCALE:
        e = np.exp(-q / val)
        return (-2.0 / val ** 3) * (e * e - 2.0 * e) \
            + (2.0 * q / val ** 4) * (e * e - e)
    if mode is MorseMode.WIDTH:
        e = np.exp(-val * q)
        return -2.0 * q * e * e + 2.0 * q * e
    e = np.exp(-q)
    return e * e - 2.0 * e


def h0(mode: MorseMode, val: float, q, p):
    return np.asarray(p, dtype=float) ** 2 + potential(mode, val, q)


def omega_closed_form(mode: MorseMode, val: float, E: float) -> float:
    """Shell volume (enclosed area) of the bound orbit at energy E."""
    _check_bound(mode, val, E)
    if mode is MorseMode.SCALE:
        return 2.0 * math.pi * (1.0 - math.sqrt(-E * val * val))
    if mode is MorseMode.WIDTH:
        return 2.0 * math.pi * (1.0 - math.sqrt(-E)) / val
    return 2.0 * math.pi * (math.sqrt(val) - math.sqrt(-E))


def turning_points(mode: MorseMode, val: float, E: float) -> tuple[float, float]:
    """Zeros of the momentum at energy E (q1 < q2)."""
    _check_bound(mode, val, E)
    if mode is MorseMode.SCALE:
        a = math.sqrt(1.0 + E * val * val)
        return (-val * math.log(1.0 + a), -val * math.log(1.0 - a))
    if mode is MorseMode.WIDTH:
        a = math.sqrt(1.0 + E)
        return (-math.log(1.0 + a) / val, -math.log(1.0 - a) / val)
    a = math.sqrt(1.0 + E / val)
    return (-math.log(1.0 + a), -math.log(1.0 - a))


def omega_quadrature(mode: MorseMode, val: float, E: float) -> float:
    """Brute-force shell area 2 int sqrt(E - U) dq (independent oracle)."""
    q1, q2 = turning_points(mode, val, E)
    from scipy.integrate import quad

    c, r = 0.5 * (q1 + q2), 0.5 * (q2 - q1)

    def f(theta):
        q = c - r * math.cos(theta)
        v = E - float(potential(mode, val, q))
        return math.sqrt(max(v, 0.0)) * r * math.sin(theta)

    out, _ = quad(f, 0.0, math.pi, epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0 * out


def orbit_period(mode: MorseMode, val: float, E: float) -> float:
    """Closed-form period dOmega/dE of the bound orbit."""
    _check_bound(mode, val, E, closed_ok=False)
    k = math.sqrt(-E)
    if mode is MorseMode.SCALE:
        return math.pi * val / k
    if mode is MorseMode.WIDTH:
        return math.pi / (val * k)
    return math.pi / k


def mc_average_closed_form(mode: MorseMode, val: float, E: float) -> float:
    """<d_lambda H0> on the shell, from -d_lambda Omega / d_E Omega."""
    _check_bound(mode, val, E)
    k = math.sqrt(-E)
    if mode is MorseMode.SCALE:
        return -2.0 * E / val
    if mode is MorseMode.WIDTH:
        return (2.0 / val) * (k + E)
    return -k / math.sqrt(val)


def dxi_source(mode: MorseMode, val: float, q, p):
    """Source term d_lambda H0 - <d_lambda H0> as a phase-space function.

    The shell average is expressed through H0(q, p), so the source is a
    closed form valid for every bound phase point.
    """
    E = h0(mode, val, q, p)
    if np.any(E >= 0.0):
        raise UnboundedMotionError("source term defined for bound states only")
    k = np.sqrt(-E)
    if mode is MorseMode.SCALE:
        avg = -2.0 * E / val
    elif mode is MorseMode.WIDTH:
        avg = (2.0 / val) * (k + E)
    else:
        avg = -k / math.sqrt(val)
    return dlambda_H0(mode, val, q) - avg


def _xi_terms(mode: MorseMode, val: float, q, p):
    """(smooth part, [(coefficient, angle series), ...]) of xi."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if mode is MorseMode.SCALE:
        # valid for every phase point, bound or not
        return q * p / val, []
    E = h0(mode, val, q, p)
    if np.any(E >= 0.0):
        raise UnboundedMotionError(
            f"{mode.value}-mode xi holds for bound states only")
    if mode is MorseMode.WIDTH:
        x = np.exp(-val * q)
        a = np.sqrt(1.0 + E)
        k = np.sqrt(-E)
        smooth = -q * p / val - p / val ** 2
        with np.errstate(divide="ignore"):
            ang1 = np.arctan((1.0 - x) / p)
            ang2 = np.arctan((x + E + a * p) / (k * (a + p)))
        return smooth, [(1.0 / val ** 2, ang1), (2.0 / val ** 2, ang2)]
    # depth: published composite with the overall sign reversed
    x = np.exp(q)
    su = math.sqrt(val)
    num = p * x * (x * E + val + (x - 1.0) * np.sqrt(-val * E))
    den = (x * x * np.sqrt(-E ** 3) + x * (x - 1.0) * su * E
           + (1.0 - 2.0 * x) * val * np.sqrt(-E) + (x - 1.0) * su ** 3)
    smooth = p / (2.0 * val)
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.arctan(num / den)
    return smooth, [(1.0 / (2.0 * su), ang)]


def xi_closed_form(mode: MorseMode, val: float, q, p) -> float:
    """Counterdiabatic generator xi(q, p) on its principal branch.

    scale:  xi = q p / gamma
    width:  xi = -qp/b - p/b^2 + arctan((1-x)/p)/b^2
                 + 2 arctan((x + H0 + a p)/(k (a + p)))/b^2,
            with x = exp(-b q), a = sqrt(1+H0), k = sqrt(-H0)
    depth:  xi = p/(2 um) + arctan(...)/(2 sqrt(um))  (composite argument
            of the published depth form, overall sign reversed)

    The arctan terms jump between branches as an orbit crosses their
    argument poles; use xi_series for values continuous along a
    trajectory.
    """
    smooth, angles = _xi_terms(mode, val, q, p)
    total = np.asarray(smooth, dtype=float)
    for coef, ang in angles:
        total = total + coef * ang
    return total[()]


def xi_series(mode: MorseMode, val: float, qs, ps) -> np.ndarray:
    """xi along a trajectory with branch continuity enforced per term.

    Each arctan angle lives on (-pi/2, pi/2) and jumps by pi when its
    argument crosses a pole (turning points, shell bottom crossings);
    unwrapping the raw angle with period pi restores the smooth function.
    """
    qs = np.asarray(qs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    smooth, angles = _xi_terms(mode, val, qs, ps)
    out = np.asarray(smooth, dtype=float).copy()
    for coef, ang in angles:
        out += coef * np.unwrap(ang, period=math.pi)
    return out


def integrate_orbit(mode: MorseMode, val: float, E: float, t_final: float,
                    n_samples: int = 2000, phase: float = 0.0,
                    z0: tuple[float, float] | None = None):
    """Integrate a bound H0 orbit; returns (t, q, p) arrays.

    Starts at the inner turning point of the shell E, advanced by `phase`
    periods, unless an explicit phase point z0 = (q, p) is given (its own
    energy then defines the shell).
    """
    if z0 is not None:
        E = float(h0(mode, val, z0[0], z0[1]))
    _check_bound(mode, val, E, closed_ok=False)
    m = MASS

    def rhs(_t, y):
        return (y[1] / m, -float(dpotential(mode, val, y[0])))

    if z0 is not None:
        y0 = [float(z0[0]), float(z0[1])]
    else:
        q1, _ = turning_points(mode, val, E)
        y0 = [q1, 0.0]
        if phase:
            T = orbit_period(mode, val, E)
            warm = solve_ivp(rhs, (0.0, phase * T), y0, rtol=1e-12, atol=1e-14)
            y0 = list(warm.y[:, -1])
    ts = np.linspace(0.0, t_final, n_samples)
    sol = solve_ivp(rhs, (0.0, t_final), y0, t_eval=ts, rtol=1e-12, atol=1e-14)
    return sol.t, sol.y[0], sol.y[1]


def microcanonical_average(observable, mode: MorseMode, val: float,
                           E: float, n_samples: int = 4000) -> float:
    """Time average of observable(q, p) over one closed orbit at energy E.

    In one dimension the period average equals the microcanonical
    (delta-shell) average.
    """
    T = orbit_period(mode, val, E)
    ts, qs, ps = integrate_orbit(mode, val, E, T, n_samples)
    vals = np.asarray(observable(qs, ps), dtype=float)
    if vals.ndim == 0:
        vals = np.full_like(ts, float(vals))
    return float(simpson(vals, x=ts) / T)


def xi_pde_residual(mode: MorseMode, val: float, E: float | None = None,
                    n_samples: int = 4000, phase: float = 0.0,
                    z0: tuple[float, float] | None = None) -> np.ndarray:
    """Residual of d xi/dt = source along one orbit (finite differences).

    Returns the pointwise residual with the first and last few samples
    dropped (one-sided difference stencils are less accurate there).
    """
    if E is None:
        if z0 is None:
            raise ValueError("give either E or z0")
        E = float(h0(mode, val, z0[0], z0[1]))
    T = orbit_period(mode, val, E)
    ts, qs, ps = integrate_orbit(mode, val, E, 1.5 * T, n_samples, phase, z0)
    src = dxi_source(mode, val, qs, ps)
    if mode is MorseMode.SCALE:
        # analytic partials: d xi/dt = {xi, H0} = p^2/(m gamma) - q U'/gamma
        dxi = (ps ** 2 / (MASS * val)
               - qs * np.asarray(dpotential(mode, val, qs)) / val)
        return dxi - src
    xi = xi_series(mode, val, qs, ps)
    dxi = np.gradient(xi, ts, edge_order=2)
    return (dxi - src)[8:-8]


def generator_increment_check(mode: MorseMode, val: float, E: float,
                              frac_a: float, frac_b: float,
                              n_samples: int = 6000) -> float:
    """|xi(z_b) - xi(z_a) - int source dt| for two points on one shell.

    z_a and z_b sit at the given orbit-phase fractions; the connecting
    trajectory supplies branch-continuous xi values and the time integral
    of the source term.
    """
    if not 0.0 <= frac_a < frac_b:
        raise ValueError("need 0 <= frac_a < frac_b")
    T = orbit_period(mode, val, E)
    t_total = frac_b * T
    ts, qs, ps = integrate_orbit(mode, val, E, t_total, n_samples)
    xi = xi_series(mode, val, qs, ps)
    src = dxi_source(mode, val, qs, ps)
    i_a = int(round(frac_a / frac_b * (n_samples - 1)))
    lhs = xi[-1] - xi[i_a]
    rhs = simpson(src[i_a:], x=ts[i_a:])
    return float(abs(lhs - rhs))


def as_potential_spec(mode: MorseMode, val: float) -> PotentialSpec:
    """Bridge to the generic machinery: a PotentialSpec with mass 1/2."""
    _check_param(mode, val)
    spec = custom(lambda q: potential(mode, val, q),
                  lambda q: dpotential(mode, val, q),
                  mass=MASS, name=f"morse-{mode.value}")
    return spec
