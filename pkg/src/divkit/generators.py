"""Generating functions for the density-power divergence families.

Three kinds of scalar generators parameterize every score in this package:

* ``GeneratorEta`` -- a function ``eta`` on [0, inf) with ``eta(1) = -1`` and
  ``eta(z) >= -z**(1+gamma)``.  Presets: ``dpd`` (power-divergence tangent
  line), ``ps`` (pseudo-spherical lower bound), ``bhd`` (kappa-bridge), and
  the ``jhhb`` family derived in :func:`jhhb_eta`.
* ``GeneratorPhi`` -- a function ``phi`` on [0, inf) whose lift
  ``psi(t) = phi(exp(t))`` must be strictly increasing and convex.
* ``GeneratorXi``  -- a nonnegative function ``xi`` whose lift
  ``psi(t) = log(xi(exp(t)))`` must be strictly increasing and convex.

Validity is established numerically, never symbolically: the conditions are
sampled on a fixed certificate grid and the result is returned as a
certificate object recording either success or a concrete counterexample.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError

# Certificate grid: log-spaced over 12 decades, plus the endpoints that the
# side conditions pin down (z=0 for the lower bound, z=1 for normalization).
GRID_POINTS = 10_000
GRID_Z_MIN = 1e-6
GRID_Z_MAX = 1e6

ETA_NORMALIZATION_TOL = 1e-12
ETA_BOUND_REL_TOL = 1e-12
PSI_CONVEXITY_TOL = -1e-9


@lru_cache(maxsize=1)
def certificate_grid() -> np.ndarray:
    """z values on which eta certificates are sampled (includes 0 and 1)."""
    z = np.geomspace(GRID_Z_MIN, GRID_Z_MAX, GRID_POINTS)
    z = np.union1d(z, [0.0, 1.0])
    z.flags.writeable = False
    return z


@lru_cache(maxsize=1)
def log_certificate_grid() -> np.ndarray:
    """The same grid in log-argument space, where psi conditions are sampled."""
    t = np.linspace(np.log(GRID_Z_MIN), np.log(GRID_Z_MAX), GRID_POINTS)
    t.flags.writeable = False
    return t


def signed_power(w, exponent):
    """sign(w) * |w|**exponent, the odd extension of the power map.

    Used everywhere a fractional power of a possibly negative quantity
    appears; sign(0) = 0.
    """
    w = np.asarray(w, dtype=float)
    out = np.sign(w) * np.abs(w) ** exponent
    return out if out.ndim else float(out)


def _call_vectorized(fn: Callable, z: np.ndarray) -> np.ndarray:
    """Evaluate fn on an array, falling back to a scalar loop."""
    try:
        out = np.asarray(fn(z), dtype=float)
        if out.shape == z.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(zi)) for zi in z])


def _read_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (z, value) CSV; a non-numeric first row is a header."""
    rows = []
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if not row or not row[0].strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise
                continue  # header line
    if len(rows) < 2:
        raise DomainError(f"generator table {path!r} needs at least two rows")
    z = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    if np.any(np.diff(z) <= 0):
        raise DomainError(f"generator table {path!r} must have strictly increasing z")
    return z, v


def tabulated(path) -> Callable:
    """Monotone piecewise-linear interpolant of a (z, value) CSV table.

    Outside the tabulated range the boundary segments are extended linearly,
    which preserves monotonicity of the table.
    """
    z_tab, v_tab = _read_table(path)
    slope_lo = (v_tab[1] - v_tab[0]) / (z_tab[1] - z_tab[0])
    slope_hi = (v_tab[-1] - v_tab[-2]) / (z_tab[-1] - z_tab[-2])

    def fn(z):
        z = np.asarray(z, dtype=float)
        out = np.interp(z, z_tab, v_tab)
        out = np.where(z < z_tab[0], v_tab[0] + slope_lo * (z - z_tab[0]), out)
        out = np.where(z > z_tab[-1], v_tab[-1] + slope_hi * (z - z_tab[-1]), out)
        return out if out.ndim else float(out)

    return fn


# ---------------------------------------------------------------------------
# eta generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorEta:
    """A scalar generator eta bound to a power parameter gamma.

    ``kind`` is one of ``dpd``, ``ps``, ``bhd``, ``jhhb``, ``custom``; the
    parameter fields that do not apply to a kind stay None.
    """

    kind: str
    gamma: float
    kappa: float | None = None
    zeta: float | None = None
    fn: Callable | None = None

    def __call__(self, z):
        g = self.gamma
        if self.kind == "dpd":
            return g - (1.0 + g) * np.asarray(z, dtype=float)
        if self.kind == "ps":
            return -np.asarray(z, dtype=float) ** (1.0 + g)
        if self.kind == "bhd":
            k = self.kappa
            return -signed_power(k * np.asarray(z, dtype=float) - k + 1.0, (1.0 + g) / k)
        if self.kind == "jhhb":
            zt = self.zeta
            if zt == 0.0:
                return -np.asarray(z, dtype=float) ** (1.0 + g)
            return -signed_power((1.0 + g) * np.asarray(z, dtype=float) ** zt - g, 1.0 / zt)
        return self.fn(z)

    def label(self) -> str:
        if self.kind == "bhd":
            return f"bhd:{self.kappa:g}"
        if self.kind == "jhhb":
            return f"jhhb:{self.zeta:g}"
        return self.kind


def dpd_eta(gamma: float) -> GeneratorEta:
    """eta(z) = gamma - (1+gamma) z, the tangent line of the lower bound at z=1."""
    _require_positive(gamma, "gamma")
    return GeneratorEta("dpd", gamma)


def ps_eta(gamma: float) -> GeneratorEta:
    """eta(z) = -z**(1+gamma), the pointwise lower bound itself."""
    _require_positive(gamma, "gamma")
    return GeneratorEta("ps", gamma)


def bhd_eta(kappa: float, gamma: float) -> GeneratorEta:
    """Bridge generator; kappa=1+gamma gives dpd, kappa=1 gives ps."""
    _require_positive(gamma, "gamma")
    if kappa < 1.0:
        raise DomainError(f"bhd requires kappa >= 1, got {kappa}")
    return GeneratorEta("bhd", gamma, kappa=kappa)


def jhhb_eta(zeta: float, gamma: float) -> GeneratorEta:
    """Generator under which the two-power divergence family becomes a Hoelder score.

    For zeta > 0::

        eta(z) = -|(1+gamma) z**zeta - gamma| ** (1/zeta) * sign((1+gamma) z**zeta - gamma)

    and for zeta = 0 it degenerates to the ps generator -z**(1+gamma).
    """
    _require_positive(gamma, "gamma")
    if zeta < 0.0:
        raise DomainError(f"jhhb requires zeta >= 0, got {zeta}")
    return GeneratorEta("jhhb", gamma, zeta=zeta)


def custom_eta(fn: Callable, gamma: float) -> GeneratorEta:
    _require_positive(gamma, "gamma")
    return GeneratorEta("custom", gamma, fn=fn)


def eta_from_table(path, gamma: float) -> GeneratorEta:
    """Custom eta from a two-column (z, value) CSV table."""
    return custom_eta(tabulated(path), gamma)


@dataclass(frozen=True)
class EtaCertificate:
    """Outcome of sampling the eta side conditions on the certificate grid."""

    valid: bool
    gamma: float
    reason: str | None = None  # "normalization" | "lower-bound"
    z_star: float | None = None
    gap: float | None = None  # eta(z*) + z* ** (1+gamma)

    def __bool__(self) -> bool:
        return self.valid


def validate_eta(eta: GeneratorEta, gamma: float | None = None) -> EtaCertificate:
    """Certify eta(1) = -1 and eta(z) >= -z**(1+gamma) on the certificate grid.

    Returns a certificate; an invalid one carries the most violating z and the
    signed gap ``eta(z) + z**(1+gamma)``.  Non-finite eta values raise
    :class:`EvaluationError` naming the offending z.
    """
    g = eta.gamma if gamma is None else gamma
    z = certificate_grid()
    values = _call_vectorized(eta, z)
    bad = ~np.isfinite(values)
    if np.any(bad):
        raise EvaluationError(f"eta evaluated non-finite at z={z[bad][0]:g}")

    at_one = float(values[np.searchsorted(z, 1.0)])
    if abs(at_one + 1.0) > ETA_NORMALIZATION_TOL:
        return EtaCertificate(False, g, "normalization", 1.0, at_one + 1.0)

    bound = z ** (1.0 + g)
    gap = values + bound
    tol = ETA_BOUND_REL_TOL * np.maximum(1.0, bound)
    scaled = gap / np.maximum(1.0, bound)
    worst = int(np.argmin(scaled))
    if gap[worst] < -tol[worst]:
        return EtaCertificate(False, g, "lower-bound", float(z[worst]), float(gap[worst]))
    return EtaCertificate(True, g)


# ---------------------------------------------------------------------------
# phi generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorPhi:
    """A scalar generator phi with lift psi(t) = phi(exp(t)).

    ``phi_prime`` is analytic for the presets and a centered finite
    difference for custom generators unless a derivative is supplied.
    log-like kinds return -inf at argument 0 (extended codomain) instead of
    raising.
    """

    kind: str
    zeta: float | None = None
    lam1: float | None = None
    lam2: float | None = None
    fn: Callable | None = None
    dfn: Callable | None = None

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "identity":
            out = z
        elif self.kind == "log":
            with np.errstate(divide="ignore"):
                out = np.log(z)
        elif self.kind == "power":
            out = (z**self.zeta - 1.0) / self.zeta
        elif self.kind == "bdpd":
            with np.errstate(divide="ignore"):
                out = np.log(self.lam1 + self.lam2 * z) / self.lam2
        else:
            out = np.asarray(self.fn(z), dtype=float)
        return out if out.ndim else float(out)

    def psi(self, t):
        return self(np.exp(np.asarray(t, dtype=float)))

    def phi_prime(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "identity":
            out = np.ones_like(z)
        elif self.kind == "log":
            out = 1.0 / z
        elif self.kind == "power":
            out = z ** (self.zeta - 1.0)
        elif self.kind == "bdpd":
            out = 1.0 / (self.lam1 + self.lam2 * z)
        elif self.dfn is not None:
            out = np.asarray(self.dfn(z), dtype=float)
        else:
            step = 1e-6 * np.maximum(1.0, np.abs(z))
            out = (np.asarray(self.fn(z + step), dtype=float)
                   - np.asarray(self.fn(z - step), dtype=float)) / (2.0 * step)
        return out if out.ndim else float(out)

    def has_constant_derivative(self) -> bool:
        """True when phi is affine, the condition for a proper gamma=0 score."""
        return self.kind == "identity" or (self.kind == "power" and self.zeta == 1.0)

    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.zeta:g}"
        if self.kind == "bdpd":
            return f"bdpd:{self.lam1:g}:{self.lam2:g}"
        return self.kind


def identity_phi() -> GeneratorPhi:
    return GeneratorPhi("identity")


def log_phi() -> GeneratorPhi:
    return GeneratorPhi("log")


def power_phi(zeta: float) -> GeneratorPhi:
    """phi(z) = (z**zeta - 1) / zeta; zeta=1 is identity shifted by a constant."""
    _require_positive(zeta, "zeta")
    return GeneratorPhi("power", zeta=zeta)


def bdpd_phi(lam1: float, lam2: float) -> GeneratorPhi:
    """phi(z) = log(lam1 + lam2 z) / lam2, bridging identity (lam1 -> 0 scale) and log."""
    if lam1 < 0.0:
        raise DomainError(f"bdpd requires lam1 >= 0, got {lam1}")
    _require_positive(lam2, "lam2")
    return GeneratorPhi("bdpd", lam1=lam1, lam2=lam2)


def custom_phi(fn: Callable, dfn: Callable | None = None) -> GeneratorPhi:
    return GeneratorPhi("custom", fn=fn, dfn=dfn)


def phi_from_table(path) -> GeneratorPhi:
    """Custom phi from a two-column (z, value) CSV table."""
    return custom_phi(tabulated(path))


def exp_minus_one_phi() -> GeneratorPhi:
    """phi(z) = exp(z) - 1: a valid generator that is not scale-compatible.

    Useful as the stock counterexample in affine-invariance checks.
    """
    return custom_phi(lambda z: np.exp(np.asarray(z, dtype=float)) - 1.0,
                      lambda z: np.exp(np.asarray(z, dtype=float)))


# ---------------------------------------------------------------------------
# xi generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorXi:
    """A nonnegative generator xi with lift psi(t) = log(xi(exp(t)))."""

    kind: str
    zeta: float | None = None
    fn: Callable | None = None

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "identity":
            out = z
        elif self.kind == "power":
            out = z**self.zeta
        else:
            out = np.asarray(self.fn(z), dtype=float)
        return out if out.ndim else float(out)

    def psi(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(self(np.exp(np.asarray(t, dtype=float))))
        return out if np.ndim(out) else float(out)

    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.zeta:g}"
        return self.kind


def identity_xi() -> GeneratorXi:
    return GeneratorXi("identity")


def power_xi(zeta: float) -> GeneratorXi:
    """xi(z) = z**zeta (note: plain power, unlike the phi power preset)."""
    _require_positive(zeta, "zeta")
    return GeneratorXi("power", zeta=zeta)


def custom_xi(fn: Callable) -> GeneratorXi:
    return GeneratorXi("custom", fn=fn)


def xi_from_table(path) -> GeneratorXi:
    return custom_xi(tabulated(path))


# ---------------------------------------------------------------------------
# psi certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiCertificate:
    """Outcome of the strict-monotonicity / convexity sampling of psi."""

    valid: bool
    failure: str | None = None  # "monotonicity" | "convexity"
    points: tuple | None = None  # grid points witnessing the violation
    value: float | None = None  # the offending difference

    def __bool__(self) -> bool:
        return self.valid


def validate_psi(psi: Callable) -> PsiCertificate:
    """Certify psi strictly increasing and convex on the log-argument grid.

    Monotonicity uses forward differences (> 0 required); convexity uses a
    centered second difference with per-point step max(1e-4, 1e-4 |t|) and
    tolerance -1e-9, which rides out round-off while catching genuine
    concavity.  -inf is tolerated as a left-boundary value only.  A
    contiguous +inf suffix is float saturation of a fast-growing generator
    and truncates the certificate window from the right; +inf ahead of a
    finite value, or NaN anywhere, raises :class:`EvaluationError`.
    """
    t = log_certificate_grid()
    with np.errstate(all="ignore"):
        v = _call_vectorized(psi, t)
    if np.any(np.isnan(v)):
        where = t[np.isnan(v)][0]
        raise EvaluationError(f"psi evaluated non-finite at t={where:g}")
    saturated = np.isposinf(v)
    if np.any(saturated):
        first_inf = int(np.argmax(saturated))
        if not np.all(saturated[first_inf:]) or first_inf < 3:
            where = t[saturated][0]
            raise EvaluationError(f"psi evaluated non-finite at t={where:g}")
        t, v = t[:first_inf], v[:first_inf]

    diffs = v[1:] - v[:-1]
    increasing = diffs > 0.0
    if not np.all(increasing):
        i = int(np.argmin(increasing))
        return PsiCertificate(False, "monotonicity", (float(t[i]), float(t[i + 1])),
                              float(diffs[i]))

    step = np.maximum(1e-4, 1e-4 * np.abs(t))
    with np.errstate(all="ignore"):
        upper = _call_vectorized(psi, t + step)
        lower = _call_vectorized(psi, t - step)
        second = upper - 2.0 * v + lower
    # an overflowing upper stencil value means upward blow-up, not concavity
    second = np.where(np.isposinf(upper), np.inf, second)
    second = np.where(np.isneginf(v) & np.isneginf(lower), np.inf, second)
    if np.any(np.isnan(second)):
        where = t[np.isnan(second)][0]
        raise EvaluationError(f"psi evaluated non-finite near t={where:g}")
    if np.any(second < PSI_CONVEXITY_TOL):
        i = int(np.argmin(second))
        return PsiCertificate(False, "convexity",
                              (float(t[i] - step[i]), float(t[i]), float(t[i] + step[i])),
                              float(second[i]))
    return PsiCertificate(True)


def validate_phi(phi: GeneratorPhi) -> PsiCertificate:
    """Certificate for a phi generator (validity of its lift psi)."""
    return validate_psi(phi.psi)


def validate_xi(xi: GeneratorXi) -> PsiCertificate:
    """Certificate for a xi generator: xi >= 0 plus validity of its lift.

    A negative xi value surfaces as a monotonicity failure of log(xi), so the
    nonnegative-range condition is checked explicitly first.
    """
    z = certificate_grid()
    with np.errstate(all="ignore"):
        values = _call_vectorized(xi, z)
    if np.any(np.isnan(values)):
        raise EvaluationError(f"xi evaluated non-finite at z={z[np.isnan(values)][0]:g}")
    negative = values < 0.0
    if np.any(negative):
        i = int(np.argmax(negative))
        return PsiCertificate(False, "monotonicity", (float(z[i]),), float(values[i]))
    return validate_psi(xi.psi)


def _require_positive(value: float, name: str) -> None:
    if not value > 0.0:
        raise DomainError(f"{name} must be > 0, got {value}")
