"""Base potentials, their scale-invariant driven forms, and the catalog.

A potential U0(q) driven through a schedule (gamma(t), f(t)) becomes

    U(q, t) = U0((q - f)/gamma) / gamma^2,

which preserves the shape of the trap while rescaling and translating it.
The local counterdiabatic correction adds two position-only terms,

    Ubar(q, t) = U(q, t) - (m/2)(ddgamma/gamma)(q - f)^2 - m ddf q,

an inverted harmonic term proportional to the scaling acceleration and a
linear tilt proportional to the transport acceleration.  Internal units
use hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotInCatalogError
from .schedules import DriveSchedule

__all__ = [
    "PotentialSpec",
    "DrivenPotential",
    "harmonic",
    "power_law",
    "quartic",
    "morse",
    "poeschl_teller",
    "gaussian_well",
    "optical_lattice",
    "finite_well",
    "box",
    "series",
    "custom",
    "eval_U0",
    "eval_driven_U",
    "eval_local_cd_U",
    "series_coefficient_schedule",
    "catalog_modulation",
    "catalog_entry",
    "catalog_names",
    "cd_modulation_from_param",
    "MAX_SERIES_ORDER",
]

MAX_SERIES_ORDER = 32


@dataclass(frozen=True)
class PotentialSpec:
    """A base potential shape with parameters and particle mass."""

    shape: str
    params: tuple  # ordered (name, value) pairs
    mass: float = 1.0
    _u0: Callable = field(default=None, repr=False, compare=False)
    _du0: Callable = field(default=None, repr=False, compare=False)

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def u0(self, q):
        """Base potential value."""
        return self._u0(np.asarray(q, dtype=float))[()]

    def du0(self, q):
        """Spatial derivative of the base potential."""
        return self._du0(np.asarray(q, dtype=float))[()]

    @property
    def domain(self) -> tuple[float, float]:
        if self.shape == "box":
            return (0.0, self.param_dict["L"])
        return (-math.inf, math.inf)

    @property
    def q_min0(self) -> float:
        """Location of the base potential minimum."""
        p = self.param_dict
        if self.shape in ("harmonic", "quartic", "poeschl_teller",
                          "gaussian_well", "optical_lattice", "finite_well"):
            return 0.0
        if self.shape == "power_law":
            return 0.0
        if self.shape == "morse":
            return 0.0
        if self.shape == "box":
            return 0.5 * p["L"]
        res = minimize_scalar(lambda q: float(self._u0(np.asarray(q))),
                              bracket=(-1.0, 0.0, 1.0))
        return float(res.x)

    @property
    def u_min0(self) -> float:
        return float(self.u0(self.q_min0))

    @property
    def u_asymptote(self) -> float:
        """Upper bound of bounded motion for the base potential."""
        if self.shape in ("morse", "poeschl_teller", "gaussian_well",
                          "finite_well"):
            return 0.0
        if self.shape == "optical_lattice":
            return self.param_dict["A"]
        return math.inf


def _make(shape, params, mass, u0, du0):
    return PotentialSpec(shape, tuple(params), float(mass), u0, du0)


def harmonic(omega0: float, mass: float = 1.0) -> PotentialSpec:
    """U0 = (m/2) omega0^2 q^2."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    k = 0.5 * mass * omega0 ** 2
    return _make("harmonic", [("omega0", omega0)], mass,
                 lambda q: k * q ** 2, lambda q: 2.0 * k * q)


def power_law(A: float, b: int, mass: float = 1.0) -> PotentialSpec:
    """U0 = A |q|^b with even integer exponent b >= 2 and A > 0."""
    if A <= 0:
        raise ValueError("A must be positive")
    if b < 2 or b % 2 != 0:
        raise ValueError("b must be an even integer >= 2")
    return _make("power_law", [("A", A), ("b", b)], mass,
                 lambda q: A * np.abs(q) ** b,
                 lambda q: A * b * np.sign(q) * np.abs(q) ** (b - 1))


def quartic(alpha2: float, alpha4: float, mass: float = 1.0) -> PotentialSpec:
    """U0 = alpha2 q^2 + alpha4 q^4."""
    if alpha4 < 0 or (alpha4 == 0 and alpha2 <= 0):
        raise ValueError("potential must be bounded below and confining")
    return _make("quartic", [("alpha2", alpha2), ("alpha4", alpha4)], mass,
                 lambda q: alpha2 * q ** 2 + alpha4 * q ** 4,
                 lambda q: 2.0 * alpha2 * q + 4.0 * alpha4 * q ** 3)


def morse(depth: float = 1.0, width: float = 1.0, mass: float = 1.0) -> PotentialSpec:
    """U0 = depth [exp(-2 width q) - 2 exp(-width q)], minimum -depth at q=0."""
    if depth <= 0 or width <= 0:
        raise ValueError("depth and width must be positive")
    def u0(q):
        e = np.exp(-width * q)
        return depth * (e * e - 2.0 * e)

    def du0(q):
        e = np.exp(-width * q)
        return depth * width * (-2.0 * e * e + 2.0 * e)

    return _make("morse", [("depth", depth), ("width", width)], mass, u0, du0)


def poeschl_teller(lam: float, alpha: float, mass: float = 1.0) -> PotentialSpec:
    """Modified Poeschl-Teller well U0 = -(alpha^2 lam(lam-1)/2m) sech^2(alpha q)."""
    if lam <= 1 or alpha <= 0:
        raise ValueError("need lam > 1 and alpha > 0")
    c = alpha ** 2 * lam * (lam - 1.0) / (2.0 * mass)

    def u0(q):
        return -c / np.cosh(alpha * q) ** 2

    def du0(q):
        return 2.0 * c * alpha * np.tanh(alpha * q) / np.cosh(alpha * q) ** 2

    return _make("poeschl_teller", [("lam", lam), ("alpha", alpha)], mass, u0, du0)


def gaussian_well(A: float, alpha: float, mass: float = 1.0) -> PotentialSpec:
    """U0 = -A exp(-alpha^2 q^2)."""
    if A <= 0 or alpha <= 0:
        raise ValueError("A and alpha must be positive")
    return _make("gaussian_well", [("A", A), ("alpha", alpha)], mass,
                 lambda q: -A * np.exp(-(alpha * q) ** 2),
                 lambda q: 2.0 * A * alpha ** 2 * q * np.exp(-(alpha * q) ** 2))


def optical_lattice(A: float, alpha: float, mass: float = 1.0) -> PotentialSpec:
    """U0 = A sin^2(alpha q)."""
    if A <= 0 or alpha <= 0:
        raise ValueError("A and alpha must be positive")
    return _make("optical_lattice", [("A", A), ("alpha", alpha)], mass,
                 lambda q: A * np.sin(alpha * q) ** 2,
                 lambda q: A * alpha * np.sin(2.0 * alpha * q))


def finite_well(A: float, alpha: float, mass: float = 1.0) -> PotentialSpec:
    """Finite square well U0 = -A for |q| < alpha, zero outside."""
    if A <= 0 or alpha <= 0:
        raise ValueError("A and alpha must be positive")
    return _make("finite_well", [("A", A), ("alpha", alpha)], mass,
                 lambda q: np.where(np.abs(q) < alpha, -A, 0.0),
                 lambda q: np.zeros_like(q))


def box(L: float, mass: float = 1.0) -> PotentialSpec:
    """Hard-wall box on [0, L]: zero inside, +inf outside."""
    if L <= 0:
        raise ValueError("L must be positive")

    def u0(q):
        return np.where((q >= 0.0) & (q <= L), 0.0, np.inf)

    def du0(q):
        return np.zeros_like(q)

    return _make("box", [("L", L)], mass, u0, du0)


def series(coefficients, mass: float = 1.0) -> PotentialSpec:
    """Power-series trap U0 = sum_p alpha_p q^p, capped at order 32."""
    coeffs = tuple(float(c) for c in coefficients)
    if len(coeffs) - 1 > MAX_SERIES_ORDER:
        raise ValueError(f"series order capped at {MAX_SERIES_ORDER}")
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    return _make("series", [("coefficients", coeffs)], mass,
                 lambda q: poly(q), lambda q: dpoly(q))


def custom(u0: Callable, du0: Callable | None = None, mass: float = 1.0,
           name: str = "custom") -> PotentialSpec:
    """Wrap an arbitrary callable; derivative by central differences if absent."""
    if du0 is None:
        def du0(q, _u0=u0):
            h = 1e-6 * (1.0 + np.abs(q))
            return (_u0(q + h) - _u0(q - h)) / (2.0 * h)
    return _make(name, [], mass, lambda q: np.asarray(u0(q), dtype=float),
                 lambda q: np.asarray(du0(q), dtype=float))


@dataclass(frozen=True)
class DrivenPotential:
    """A base potential driven through a schedule."""

    spec: PotentialSpec
    schedule: DriveSchedule

    def u(self, q, t, clamp: bool = False):
        """Driven potential U0((q - f)/gamma)/gamma^2."""
        g = float(self.schedule.gamma(t, clamp=clamp))
        f = float(self.schedule.f(t, clamp=clamp))
        return self.spec.u0((np.asarray(q, dtype=float) - f) / g) / g ** 2

    def du(self, q, t, clamp: bool = False):
        """d/dq of the driven potential."""
        g = float(self.schedule.gamma(t, clamp=clamp))
        f = float(self.schedule.f(t, clamp=clamp))
        return self.spec.du0((np.asarray(q, dtype=float) - f) / g) / g ** 3

    def u_local_cd(self, q, t, clamp: bool = False):
        """Driven potential plus the two auxiliary local CD terms."""
        q = np.asarray(q, dtype=float)
        g = float(self.schedule.gamma(t, clamp=clamp))
        f = float(self.schedule.f(t, clamp=clamp))
        ddg = float(self.schedule.ddgamma(t, clamp=clamp))
        ddf = float(self.schedule.ddf(t, clamp=clamp))
        m = self.spec.mass
        return (self.spec.u0((q - f) / g) / g ** 2
                - 0.5 * m * (ddg / g) * (q - f) ** 2
                - m * ddf * q)


def eval_U0(spec: PotentialSpec, q):
    return spec.u0(q)


def eval_driven_U(dp: DrivenPotential, q, t):
    return dp.u(q, t)


def eval_local_cd_U(dp: DrivenPotential, q, t):
    return dp.u_local_cd(q, t)


def series_coefficient_schedule(alpha0, schedule: DriveSchedule, times,
                                mass: float = 1.0) -> dict[str, np.ndarray]:
    """Time-dependence of power-series trap coefficients.

    Scale invariance fixes alpha_p(t) = alpha_p(0)/gamma^(p+2).  Absorbing
    the auxiliary CD terms modifies the low orders: alpha~_2 subtracts
    m ddgamma/(2 gamma) while alpha~_0 and alpha~_1 subtract m ddf.
    Returns arrays of shape (len(times), P+1).
    """
    alpha0 = np.asarray(alpha0, dtype=float)
    if alpha0.size - 1 > MAX_SERIES_ORDER:
        raise ValueError(f"series order capped at {MAX_SERIES_ORDER}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    P = alpha0.size - 1
    powers = np.arange(P + 1)
    gam = np.asarray([float(schedule.gamma(t)) for t in times])
    ddg = np.asarray([float(schedule.ddgamma(t)) for t in times])
    ddf = np.asarray([float(schedule.ddf(t)) for t in times])
    alpha_t = alpha0[None, :] / gam[:, None] ** (powers[None, :] + 2)
    alpha_tilde = alpha_t.copy()
    if P >= 2:
        alpha_tilde[:, 2] -= 0.5 * mass * ddg / gam
    if P >= 1:
        alpha_tilde[:, 1] -= mass * ddf
    alpha_tilde[:, 0] -= mass * ddf
    return {"times": times, "alpha": alpha_t, "alpha_tilde": alpha_tilde}


# --- catalog -----------------------------------------------------------
#
# Each row lists, for a named trap family, the exponent e_P such that the
# parameter follows P(t) = P(0) gamma(t)^e_P, together with the potential
# as a function of its parameters.  Every row's parameter modulation
# reproduces the same counterdiabatic coefficient -ddgamma/gamma.

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    scaled: tuple            # parameter names that follow gamma
    structural: tuple        # parameter names that stay fixed
    cd_formula: str
    _exponents: Callable = field(repr=False, compare=False)
    _u: Callable = field(repr=False, compare=False)

    def exponents(self, params: dict) -> dict[str, float]:
        return self._exponents(params)

    def u(self, q, params: dict, mass: float):
        return self._u(np.asarray(q, dtype=float), params, mass)


def _entry(name, scaled, structural, cd_formula, exponents_fn, u_fn):
    return CatalogEntry(name, tuple(scaled), tuple(structural), cd_formula,
                        exponents_fn, u_fn)


_CATALOG: dict[str, CatalogEntry] = {}


def _register(entry: CatalogEntry):
    _CATALOG[entry.name] = entry


_register(_entry(
    "power-law", ("A",), ("b",),
    "ddA/((2+b) A) - (3+b)/(2+b)^2 (dA/A)^2",
    lambda p: {"A": -(2.0 + p["b"])},
    lambda q, p, m: p["A"] * np.abs(q) ** p["b"],
))

_register(_entry(
    "modified-poschl-teller", ("alpha",), ("lam",),
    "ddalpha/alpha - 2 (dalpha/alpha)^2",
    lambda p: {"alpha": -1.0},
    lambda q, p, m: -(p["alpha"] ** 2 * p["lam"] * (p["lam"] - 1.0)
                      / (2.0 * m)) / np.cosh(p["alpha"] * q) ** 2,
))

_register(_entry(
    "optical-lattice", ("A", "alpha"), (),
    "ddA/(2A) - (3/4)(dA/A)^2 = ddalpha/alpha - 2 (dalpha/alpha)^2",
    lambda p: {"A": -2.0, "alpha": -1.0},
    lambda q, p, m: p["A"] * np.sin(p["alpha"] * q) ** 2,
))

_register(_entry(
    "gaussian-well", ("A", "alpha"), (),
    "ddA/(2A) - (3/4)(dA/A)^2 = ddalpha/alpha - 2 (dalpha/alpha)^2",
    lambda p: {"A": -2.0, "alpha": -1.0},
    lambda q, p, m: -p["A"] * np.exp(-(p["alpha"] * q) ** 2),
))

_register(_entry(
    "morse", ("A", "B", "alpha"), (),
    "ddX/X - 2 (dX/X)^2  (X = A, B, alpha)",
    lambda p: {"A": -1.0, "B": -1.0, "alpha": -1.0},
    lambda q, p, m: (p["A"] ** 2 + p["B"] ** 2 * np.exp(-2.0 * p["alpha"] * q)
                     - 2.0 * p["B"] * (p["A"] + 0.5 * p["alpha"])
                     * np.exp(-p["alpha"] * q)),
))

_register(_entry(
    "finite-square-well", ("A", "alpha"), (),
    "ddA/(2A) - (3/4)(dA/A)^2 = -ddalpha/alpha",
    lambda p: {"A": -2.0, "alpha": +1.0},
    lambda q, p, m: np.where(np.abs(q) < p["alpha"], -p["A"], 0.0),
))


def catalog_names() -> list[str]:
    return sorted(_CATALOG)


def catalog_entry(name: str) -> CatalogEntry:
    try:
        return _CATALOG[name]
    except KeyError:
        raise NotInCatalogError(
            f"{name!r} not in catalog; known rows: {catalog_names()}") from None


def catalog_modulation(name: str, schedule: DriveSchedule, times,
                       params0: dict) -> dict:
    """Parameter time-series of a catalog row under a schedule.

    Returns {param: array} following P(t) = P(0) gamma^e plus the shared
    counterdiabatic modulation series -ddgamma/gamma.
    """
    entry = catalog_entry(name)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    gam = np.asarray([float(schedule.gamma(t)) for t in times])
    ddg = np.asarray([float(schedule.ddgamma(t)) for t in times])
    exps = entry.exponents(params0)
    out = {"times": times, "cd_modulation": -ddg / gam}
    for pname in entry.scaled:
        out[pname] = params0[pname] * gam ** exps[pname]
    for pname in entry.structural:
        out[pname] = np.full_like(times, params0[pname])
    return out


def cd_modulation_from_param(P0: float, exponent: float,
                             schedule: DriveSchedule, t) -> float:
    """-ddgamma/gamma reconstructed from one scaled parameter P = P0 gamma^e.

    Uses -ddgamma/gamma = -(1/e)(ddP/P) + (1/e - 1/e^2)(dP/P)^2 with the
    chain-rule derivatives of P(t); this is the identity behind the
    catalog's counterdiabatic-modulation column.
    """
    if exponent == 0.0:
        raise ValueError("parameter does not scale with gamma")
    g = float(schedule.gamma(t))
    dg = float(schedule.dgamma(t))
    ddg = float(schedule.ddgamma(t))
    e = exponent
    P = P0 * g ** e
    dP = P0 * e * g ** (e - 1.0) * dg
    ddP = P0 * e * ((e - 1.0) * g ** (e - 2.0) * dg ** 2 + g ** (e - 1.0) * ddg)
    return -(1.0 / e) * (ddP / P) + (1.0 / e - 1.0 / e ** 2) * (dP / P) ** 2
