"""Scores and divergences assembled from bracket triples.

Every family is computed from a :class:`~divkit.densities.BracketTriple`,
never from raw densities, so discrete, grid and Gaussian representations
share a single set of formulas.  For gamma > 0 the families are

* Hoelder:            S = eta(X/Y) Y,               D = S + Z
* two-power (fdp):    S = gamma phi(Y) - (1+gamma) phi(X),
                      D = phi(Z)/gamma - (1+gamma) phi(X)/gamma + phi(Y)
* jhhb (zeta family): the power / log branches written out directly
* xi-Hoelder:         S = eta(xi(X)/xi(Y)) xi(Y),   D = S + xi(Z)

and each has the gamma = 0 branch assembled from the cross-entropy fields.
Values follow the extended codomain: log-like generators return -inf at 0
and divergences through them become +inf rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .densities import BracketTriple
from .errors import DegenerateModelError, DomainError, GeneratorValidityError
from .generators import (
    GeneratorEta,
    GeneratorPhi,
    GeneratorXi,
    signed_power,
    validate_eta,
    validate_phi,
    validate_xi,
)

FAMILIES = ("holder", "fdpd", "jhhb", "xi_holder")


def _log(x: float) -> float:
    if x < 0.0:
        raise DomainError(f"log of negative bracket value {x}")
    return -math.inf if x == 0.0 else math.log(x)


# ---------------------------------------------------------------------------
# Hoelder family
# ---------------------------------------------------------------------------


def holder_score(b: BracketTriple, eta: GeneratorEta) -> float:
    """eta(X/Y) * Y for gamma > 0; -<g log f> + <f> at gamma = 0."""
    if b.gamma > 0.0:
        if b.Y <= 0.0:
            raise DegenerateModelError("holder score undefined: <f**(1+gamma)> = 0")
        return float(eta(b.X / b.Y) * b.Y)
    ll, _, mf, g_log_g = b.require_kl_fields()
    return (ll - g_log_g) + mf


def holder_divergence(b: BracketTriple, eta: GeneratorEta) -> float:
    if b.gamma > 0.0:
        return holder_score(b, eta) + b.require_z()
    ll, mg, mf, _ = b.require_kl_fields()
    return ll - mg + mf


# ---------------------------------------------------------------------------
# two-power functional family
# ---------------------------------------------------------------------------


def fdp_score(b: BracketTriple, phi: GeneratorPhi) -> float:
    """gamma phi(Y) - (1+gamma) phi(X); the gamma = 0 branch uses phi'."""
    g = b.gamma
    if g > 0.0:
        return g * phi(b.Y) - (1.0 + g) * phi(b.X)
    ll, mg, mf, g_log_g = b.require_kl_fields()
    return -phi.phi_prime(mg) * (g_log_g - ll) + phi(mf)


def fdp_divergence(b: BracketTriple, phi: GeneratorPhi) -> float:
    g = b.gamma
    if g > 0.0:
        return phi(b.require_z()) / g - (1.0 + g) * phi(b.X) / g + phi(b.Y)
    ll, mg, mf, _ = b.require_kl_fields()
    return phi.phi_prime(mg) * ll - phi(mg) + phi(mf)


# ---------------------------------------------------------------------------
# jhhb (gamma, zeta) family, written out branch by branch
# ---------------------------------------------------------------------------


def jhhb_score(b: BracketTriple, zeta: float) -> float:
    """The score of the (gamma, zeta) family; zeta = 0 is the log branch."""
    _check_zeta(zeta)
    g = b.gamma
    if g > 0.0:
        if zeta > 0.0:
            return (g * b.Y**zeta - (1.0 + g) * b.X**zeta + 1.0) / zeta
        return g * _log(b.Y) - (1.0 + g) * _log(b.X)
    ll, mg, mf, g_log_g = b.require_kl_fields()
    cross_entropy = g_log_g - ll  # <g log f>
    if zeta > 0.0:
        return -(mg ** (zeta - 1.0)) * cross_entropy + (mf**zeta - 1.0) / zeta
    return -cross_entropy / mg + _log(mf)


def jhhb_divergence(b: BracketTriple, zeta: float) -> float:
    _check_zeta(zeta)
    g = b.gamma
    if g > 0.0:
        z_int = b.require_z()
        if zeta > 0.0:
            return (z_int**zeta / g - (1.0 + g) * b.X**zeta / g + b.Y**zeta) / zeta
        return _log(z_int) / g - (1.0 + g) * _log(b.X) / g + _log(b.Y)
    ll, mg, mf, _ = b.require_kl_fields()
    if zeta > 0.0:
        return mg ** (zeta - 1.0) * ll - mg**zeta / zeta + mf**zeta / zeta
    return ll / mg - _log(mg) + _log(mf)


def _check_zeta(zeta: float) -> None:
    if zeta < 0.0:
        raise DomainError(f"zeta must be >= 0, got {zeta}")


# ---------------------------------------------------------------------------
# xi-Hoelder family
# ---------------------------------------------------------------------------


def xi_holder_score(b: BracketTriple, eta: GeneratorEta, xi: GeneratorXi) -> float:
    """eta(xi(X)/xi(Y)) * xi(Y); defined for gamma > 0 only."""
    if not b.gamma > 0.0:
        raise DomainError("xi-Hoelder scores require gamma > 0")
    xi_y = xi(b.Y)
    if xi_y <= 0.0:
        raise DegenerateModelError("xi-Hoelder score undefined: xi(<f**(1+gamma)>) = 0")
    return float(eta(xi(b.X) / xi_y) * xi_y)


def xi_holder_divergence(b: BracketTriple, eta: GeneratorEta, xi: GeneratorXi) -> float:
    return xi_holder_score(b, eta, xi) + float(xi(b.require_z()))


# ---------------------------------------------------------------------------
# equivalence transforms
# ---------------------------------------------------------------------------


def equivalent_transform(s: float, tau: str, zeta: float | None = None) -> float:
    """Strictly increasing reparameterizations of a score (both tau kinds).

    ``signed_power``: (sign(s)|s|**zeta - 1)/zeta, the odd power map;
    ``neg_exp_neg``:  -exp(-s).
    """
    if tau == "signed_power":
        if zeta is None or zeta <= 0.0:
            raise DomainError(f"signed_power transform needs zeta > 0, got {zeta}")
        return (float(signed_power(s, zeta)) - 1.0) / zeta
    if tau == "neg_exp_neg":
        return -math.exp(-s)
    raise DomainError(f"unknown transform {tau!r}")


# ---------------------------------------------------------------------------
# family specification
# ---------------------------------------------------------------------------


@lru_cache(maxsize=512)
def _eta_certificate(eta: GeneratorEta, gamma: float):
    return validate_eta(eta, gamma)


@lru_cache(maxsize=512)
def _phi_certificate(phi: GeneratorPhi):
    return validate_phi(phi)


@lru_cache(maxsize=512)
def _xi_certificate(xi: GeneratorXi):
    return validate_xi(xi)


@dataclass(frozen=True)
class DivergenceSpec:
    """A family selection with its generators; construction certifies them.

    holder(eta), fdpd(phi), jhhb(zeta) and xi_holder(eta, xi) are supported;
    xi_holder requires gamma > 0, the others admit their gamma = 0 branch.
    """

    family: str
    gamma: float
    eta: GeneratorEta | None = None
    phi: GeneratorPhi | None = None
    xi: GeneratorXi | None = None
    zeta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.gamma < 0.0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.family in ("holder", "xi_holder"):
            if self.family == "xi_holder" and self.gamma == 0.0:
                raise DomainError("xi_holder requires gamma > 0")
            if self.eta is None and self.gamma > 0.0:
                raise DomainError(f"{self.family} needs an eta generator")
            if self.eta is not None and self.gamma > 0.0:
                # the gamma = 0 branch never evaluates eta
                cert = _eta_certificate(self.eta, self.gamma)
                if not cert.valid:
                    raise GeneratorValidityError(_eta_failure_message(cert))
        if self.family == "xi_holder":
            if self.xi is None:
                raise DomainError("xi_holder needs a xi generator")
            cert = _xi_certificate(self.xi)
            if not cert.valid:
                raise GeneratorValidityError(
                    f"xi certificate failed: psi(z) = log xi(e^z) {cert.failure} "
                    f"violation at {cert.points}")
        if self.family == "fdpd":
            if self.phi is None:
                raise DomainError("fdpd needs a phi generator")
            cert = _phi_certificate(self.phi)
            if not cert.valid:
                raise GeneratorValidityError(
                    f"phi certificate failed: psi(z) = phi(e^z) {cert.failure} "
                    f"violation at {cert.points}")
        if self.family == "jhhb":
            if self.zeta is None:
                raise DomainError("jhhb needs zeta >= 0")
            _check_zeta(self.zeta)

    def describe(self) -> dict:
        out: dict = {"family": self.family, "gamma": self.gamma}
        if self.eta is not None:
            out["eta"] = self.eta.label()
        if self.phi is not None:
            out["phi"] = self.phi.label()
        if self.xi is not None:
            out["xi"] = self.xi.label()
        if self.zeta is not None:
            out["zeta"] = self.zeta
        return out


def _eta_failure_message(cert) -> str:
    if cert.reason == "normalization":
        return f"eta certificate failed: eta(1) != -1 (gap {cert.gap:.3e})"
    return (f"eta certificate failed: eta(z) < -z**(1+gamma) at z={cert.z_star:g} "
            f"(gap {cert.gap:.3e})")


def score(b: BracketTriple, spec: DivergenceSpec) -> float:
    """Evaluate the family's composite score on a bracket triple."""
    if spec.family == "holder":
        return holder_score(b, spec.eta)
    if spec.family == "fdpd":
        return fdp_score(b, spec.phi)
    if spec.family == "jhhb":
        return jhhb_score(b, spec.zeta)
    return xi_holder_score(b, spec.eta, spec.xi)


def divergence(b: BracketTriple, spec: DivergenceSpec) -> float:
    """Evaluate the family's divergence on a bracket triple."""
    if spec.family == "holder":
        return holder_divergence(b, spec.eta)
    if spec.family == "fdpd":
        return fdp_divergence(b, spec.phi)
    if spec.family == "jhhb":
        return jhhb_divergence(b, spec.zeta)
    return xi_holder_divergence(b, spec.eta, spec.xi)
