"""Driving protocols gamma(t), f(t) and derived control quantities.

A schedule bundles the scaling factor gamma(t) and the trap displacement
f(t) of a scale-invariant process, together with their first and second
time derivatives and the reparametrized time

    tau(t) = integral_0^t gamma(s)^-2 ds,

under which the rescaled dynamics is autonomous.  The polynomial kinds
interpolate between (gamma, f) = (1, 0) at t=0 and (gamma_F, f_F) at
t=tau_F with vanishing end rates; the quintic kind additionally has
vanishing end curvatures, so the local counterdiabatic potential switches
on and off smoothly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ScheduleRangeError, UndefinedAmplitudeError

__all__ = [
    "DriveSchedule",
    "ScheduleSample",
    "make_cubic_schedule",
    "make_quintic_schedule",
    "make_constant_schedule",
    "make_custom_schedule",
    "eval_schedule",
    "tau_of_t",
    "transport_amplitude_chi",
    "cd_harmonic_frequency",
    "consistency_conditions",
    "ConsistencyConditions",
]


def _adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                      tol: float, max_depth: int = 48) -> float:
    """Adaptive Simpson quadrature with absolute tolerance `tol`."""
    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        x1l = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + x1l)
        xr = 0.5 * (x1l + x2)
        fl, fr = f(xl), f(xr)
        h = x2 - x0
        left = h / 12.0 * (f0 + 4.0 * fl + f1)
        right = h / 12.0 * (f1 + 4.0 * fr + f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return (recurse(x0, x1l, f0, fl, f1, left, eps / 2.0, depth - 1)
                + recurse(x1l, x2, f1, fr, f2, right, eps / 2.0, depth - 1))

    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


# Smoothstep polynomials in the scaled time s = t / tau_F.  P(0)=0, P(1)=1,
# with P'(0)=P'(1)=0; the quintic adds P''(0)=P''(1)=0.
def _p3(s):
    return s * s * (3.0 - 2.0 * s)


def _dp3(s):
    return 6.0 * s * (1.0 - s)


def _ddp3(s):
    return 6.0 - 12.0 * s


def _p5(s):
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s * s)


def _dp5(s):
    return 30.0 * s * s * (1.0 - s) ** 2


def _ddp5(s):
    return 60.0 * s * (1.0 - 3.0 * s + 2.0 * s * s)


_POLY = {"cubic": (_p3, _dp3, _ddp3), "quintic": (_p5, _dp5, _ddp5)}


@dataclass(frozen=True)
class ScheduleSample:
    """Schedule state at one instant: values, derivatives and tau."""

    t: float
    gamma: float
    dgamma: float
    ddgamma: float
    f: float
    df: float
    ddf: float
    tau: float


@dataclass(frozen=True)
class DriveSchedule:
    """Control functions of one driving protocol.

    kind is one of "cubic", "quintic", "constant", "custom".  For the
    polynomial kinds gamma and f are the closed-form interpolants; the
    custom kind carries natural cubic splines fitted to uniform samples.
    """

    kind: str
    gamma_final: float
    f_final: float
    duration: float
    _gamma_spline: CubicSpline | None = field(default=None, repr=False, compare=False)
    _f_spline: CubicSpline | None = field(default=None, repr=False, compare=False)

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12 * self.duration) or np.any(t > self.duration * (1 + 1e-12)):
            raise ScheduleRangeError(
                f"t={t} outside schedule window [0, {self.duration}]")

    def _clip(self, t):
        return np.clip(np.asarray(t, dtype=float), 0.0, self.duration)

    def _value(self, t, clamp, spline, final, poly_scale):
        # Outside the window a clamped schedule holds its end values.
        if not clamp:
            self._check_range(t)
        tt = self._clip(t)
        if self.kind == "constant":
            return np.broadcast_to(np.float64(final), np.shape(tt)).copy()[()]
        if self.kind == "custom":
            return spline(tt)
        p, _, _ = _POLY[self.kind]
        base, scale = poly_scale
        return base + scale * p(tt / self.duration)

    def _rate(self, t, clamp, order, spline, poly_scale):
        # Outside the window a clamped schedule is frozen: rates are zero.
        if not clamp:
            self._check_range(t)
        t_arr = np.asarray(t, dtype=float)
        tt = self._clip(t_arr)
        if self.kind == "constant":
            out = np.zeros_like(tt)
        elif self.kind == "custom":
            out = np.asarray(spline(tt, order), dtype=float)
        else:
            _, dp, ddp = _POLY[self.kind]
            scale = poly_scale[1]
            if order == 1:
                out = scale * dp(tt / self.duration) / self.duration
            else:
                out = scale * ddp(tt / self.duration) / self.duration ** 2
            out = np.asarray(out, dtype=float)
        inside = (t_arr >= 0.0) & (t_arr <= self.duration)
        out = np.where(inside, out, 0.0)
        return out[()]

    def _gamma_scale(self):
        return (1.0, self.gamma_final - 1.0)

    def _f_scale(self):
        return (0.0, self.f_final)

    def gamma(self, t, clamp: bool = False):
        return self._value(t, clamp, self._gamma_spline, self.gamma_final,
                           self._gamma_scale())

    def dgamma(self, t, clamp: bool = False):
        return self._rate(t, clamp, 1, self._gamma_spline, self._gamma_scale())

    def ddgamma(self, t, clamp: bool = False):
        return self._rate(t, clamp, 2, self._gamma_spline, self._gamma_scale())

    def f(self, t, clamp: bool = False):
        return self._value(t, clamp, self._f_spline, self.f_final,
                           self._f_scale())

    def df(self, t, clamp: bool = False):
        return self._rate(t, clamp, 1, self._f_spline, self._f_scale())

    def ddf(self, t, clamp: bool = False):
        return self._rate(t, clamp, 2, self._f_spline, self._f_scale())

    def tau(self, t, clamp: bool = False) -> float:
        """Reparametrized time tau(t); a clamped query continues the
        integral with the frozen end values of gamma."""
        if clamp:
            t = float(t)
            head = min(max(t, 0.0), self.duration)
            extra = 0.0
            if t < 0.0:
                extra = t  # gamma = 1 before the protocol starts
            elif t > self.duration:
                extra = (t - self.duration) / float(self.gamma(self.duration)) ** 2
        else:
            self._check_range(t)
            head, extra = float(t), 0.0
        if self.kind == "constant":
            return head / self.gamma_final ** 2 + extra
        tol = 1e-10 * self.duration
        return extra + _adaptive_simpson(
            lambda s: 1.0 / self.gamma(s, clamp=True) ** 2, 0.0, head, tol)

    def sample(self, t, clamp: bool = False) -> ScheduleSample:
        if not clamp:
            self._check_range(t)
        t = float(t)
        return ScheduleSample(
            t=t,
            gamma=float(self.gamma(t, clamp=clamp)),
            dgamma=float(self.dgamma(t, clamp=clamp)),
            ddgamma=float(self.ddgamma(t, clamp=clamp)),
            f=float(self.f(t, clamp=clamp)),
            df=float(self.df(t, clamp=clamp)),
            ddf=float(self.ddf(t, clamp=clamp)),
            tau=self.tau(t, clamp=clamp),
        )


def _check_targets(gamma_F: float, tau_F: float) -> None:
    if tau_F <= 0.0:
        raise ValueError(f"duration must be positive, got {tau_F}")
    if gamma_F <= 0.0:
        raise ValueError(f"final scaling factor must be positive, got {gamma_F}")


def make_cubic_schedule(gamma_F: float, f_F: float, tau_F: float) -> DriveSchedule:
    """Cubic (smoothstep) protocol: end values fixed, end rates zero.

    gamma(t) = 1 + (gamma_F - 1)(3s^2 - 2s^3) with s = t/tau_F, and the
    same polynomial scaled by f_F for the displacement.
    """
    _check_targets(gamma_F, tau_F)
    return DriveSchedule("cubic", float(gamma_F), float(f_F), float(tau_F))


def make_quintic_schedule(gamma_F: float, f_F: float, tau_F: float) -> DriveSchedule:
    """Quintic protocol: additionally zero end curvature.

    gamma(t) = 1 + (gamma_F - 1)(10s^3 - 15s^4 + 6s^5); with vanishing
    second derivatives at both ends the auxiliary local potential is
    switched on and off without impulses.
    """
    _check_targets(gamma_F, tau_F)
    return DriveSchedule("quintic", float(gamma_F), float(f_F), float(tau_F))


def make_constant_schedule(gamma: float = 1.0, f: float = 0.0,
                           tau_F: float = 1.0) -> DriveSchedule:
    """Static protocol: gamma and f held fixed (identity by default)."""
    _check_targets(gamma, tau_F)
    return DriveSchedule("constant", float(gamma), float(f), float(tau_F))


def make_custom_schedule(times: np.ndarray, gammas: np.ndarray,
                         fs: np.ndarray) -> DriveSchedule:
    """Schedule from uniform samples; natural cubic splines supply derivatives."""
    times = np.asarray(times, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if times.ndim != 1 or times.size < 4:
        raise ValueError("need at least 4 samples")
    if times[0] != 0.0:
        raise ValueError("samples must start at t=0")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("samples must be uniformly spaced")
    if np.any(gammas <= 0.0):
        raise ValueError("gamma samples must be positive")
    g_spline = CubicSpline(times, gammas, bc_type="natural")
    f_spline = CubicSpline(times, fs, bc_type="natural")
    return DriveSchedule("custom", float(gammas[-1]), float(fs[-1]),
                         float(times[-1]), g_spline, f_spline)


def eval_schedule(schedule: DriveSchedule, t: float) -> ScheduleSample:
    """Evaluate values, derivatives and tau at one instant in [0, tau_F]."""
    return schedule.sample(t)


def tau_of_t(schedule: DriveSchedule, t: float) -> float:
    """tau(t) = integral of gamma^-2, adaptive Simpson at 1e-10*tau_F."""
    return schedule.tau(t)


def transport_amplitude_chi(schedule: DriveSchedule, t) -> float:
    """Amplitude chi(t) = -ddf(t)/f_F of the transport counterdiabatic force.

    The counterdiabatic linear-potential coefficient is F(t) = -ddf(t),
    written as f_F * chi(t).  For the quintic protocol
    chi = -60 s (2s^2 - 3s + 1) / tau_F^2, negative during the first half
    (acceleration toward the target) and positive during the second
    (braking).
    """
    if schedule.f_final == 0.0:
        raise UndefinedAmplitudeError("chi is undefined for f_F = 0")
    if schedule.kind not in ("quintic", "custom"):
        raise ValueError(f"chi requires quintic or custom schedule, got {schedule.kind}")
    return -schedule.ddf(t) / schedule.f_final


def cd_harmonic_frequency(times: np.ndarray, omega: np.ndarray,
                          domega: np.ndarray | None = None,
                          ddomega: np.ndarray | None = None) -> np.ndarray:
    """Counterdiabatic replacement of a harmonic trap frequency.

    Returns the series omega^2 - (3/4)(domega/omega)^2 + (1/2)(ddomega/omega).
    Along the adiabatic branch omega = omega_0/gamma^2 this equals
    omega^2 - ddgamma/gamma.  Derivatives are taken from the supplied
    arrays when given, otherwise from a cubic-spline fit of the samples.
    The result may be negative (transiently inverted trap) for fast
    protocols; that is physical and not an error.
    """
    times = np.asarray(times, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0.0):
        raise ValueError("omega samples must be positive")
    if domega is None or ddomega is None:
        spline = CubicSpline(times, omega)
        domega = spline(times, 1) if domega is None else np.asarray(domega, float)
        ddomega = spline(times, 2) if ddomega is None else np.asarray(ddomega, float)
    else:
        domega = np.asarray(domega, dtype=float)
        ddomega = np.asarray(ddomega, dtype=float)
    return omega ** 2 - 0.75 * (domega / omega) ** 2 + 0.5 * ddomega / omega


@dataclass(frozen=True)
class ConsistencyConditions:
    """Scale-invariant consistency series: trap, force, coupling."""

    omega_sq: Callable[[float], float]
    force: Callable[[float], float]
    epsilon: Callable[[float], float]


def consistency_conditions(schedule: DriveSchedule, alpha: float,
                           omega0: float) -> ConsistencyConditions:
    """Consistency conditions for scale-invariant driving.

    omega^2(t) = omega0^2/gamma^4 - ddgamma/gamma, F(t) = -ddf(t) and
    epsilon(t) = gamma^(alpha-2), where alpha is the homogeneity degree of
    the pair interaction.  For alpha = 2 no coupling modulation is needed.
    """
    def omega_sq(t):
        g = schedule.gamma(t)
        return omega0 ** 2 / g ** 4 - schedule.ddgamma(t) / g

    def force(t):
        return -schedule.ddf(t)

    def epsilon(t):
        return schedule.gamma(t) ** (alpha - 2.0)

    return ConsistencyConditions(omega_sq, force, epsilon)


def chi_extrema(tau_F: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Locations and values of the two chi extrema of the quintic protocol.

    Stationary points of chi solve 6s^2 - 6s + 1 = 0, i.e.
    t = tau_F (3 -+ sqrt(3))/6; the magnitude there is (10 sqrt(3)/3)/tau_F^2.
    """
    s_minus = (3.0 - math.sqrt(3.0)) / 6.0
    s_plus = (3.0 + math.sqrt(3.0)) / 6.0
    mag = 10.0 * math.sqrt(3.0) / 3.0 / tau_F ** 2
    return (s_minus * tau_F, -mag), (s_plus * tau_F, +mag)
