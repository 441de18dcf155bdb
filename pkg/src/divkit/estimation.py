"""Minimum-score estimation of a Gaussian location/scale model.

The empirical (plug-in) form of each scoring rule replaces <g f**gamma> with
the sample average of f(x_i)**gamma, which is exactly what makes these
families practical: the data enters only through that decomposable term.

Fitting minimizes the empirical score over (mu, log sigma) with a
derivative-free simplex (Nelder-Mead), restarted from three perturbed
initial points; everything is deterministic given the sample and config.

gamma = 0 estimation is only exposed for generators with constant
derivative (plain likelihood scoring): for any other generator the gamma = 0
plug-in score fails to be a composite scoring rule, so requesting it raises
:class:`~divkit.errors.GeneratorValidityError`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .densities import DensityObject, GaussianDensity, density_value, empirical_brackets
from .errors import DomainError, GeneratorValidityError
from .scores import DivergenceSpec, fdp_score, holder_score, jhhb_score, xi_holder_score


@dataclass(frozen=True)
class OptimizerConfig:
    """Simplex-descent settings; the defaults suit n in the hundreds to 10^5."""

    initial: tuple[float, float] | None = None  # (mu, sigma); default: median, IQR-based
    max_iterations: int = 2000
    xatol: float = 1e-7
    fatol: float = 1e-11
    restarts: int = 3
    sigma_floor: float = 1e-6


@dataclass(frozen=True)
class EstimationProblem:
    samples: np.ndarray
    spec: DivergenceSpec
    config: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.size == 0:
            raise DomainError("estimation needs a nonempty sample list")
        if not np.all(np.isfinite(samples)):
            raise DomainError("samples must be finite")
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True)
class EstimationResult:
    mu: float
    sigma: float
    score: float
    iterations: int
    converged: bool
    sigma_at_floor: bool = False
    optimizer_converged: bool = True

    def to_dict(self) -> dict:
        return {
            "mu_hat": self.mu,
            "sigma_hat": self.sigma,
            "score_at_min": self.score,
            "iterations": self.iterations,
            "converged": self.converged,
            "sigma_at_floor": self.sigma_at_floor,
        }


def empirical_score(samples, f: DensityObject, spec: DivergenceSpec) -> float:
    """Plug-in score of the model f on the samples under the chosen family.

    For gamma > 0 the empirical bracket is used directly.  For gamma = 0
    only constant-derivative generators are accepted (see module docstring);
    the score is then -mean(log f(x_i)) scaled by phi'(1), plus phi(<f>).
    """
    samples = np.asarray(samples, dtype=float)
    if spec.gamma > 0.0:
        b = empirical_brackets(samples, f, spec.gamma)
        if spec.family == "holder":
            return holder_score(b, spec.eta)
        if spec.family == "fdpd":
            return fdp_score(b, spec.phi)
        if spec.family == "jhhb":
            return jhhb_score(b, spec.zeta)
        return xi_holder_score(b, spec.eta, spec.xi)

    if spec.family == "fdpd":
        if not spec.phi.has_constant_derivative():
            raise GeneratorValidityError(
                "gamma=0 plug-in scoring is improper unless phi' is constant; "
                f"got phi={spec.phi.label()!r} (use identity)")
        phi = spec.phi
        slope = float(phi.phi_prime(1.0))
        offset = float(phi(_model_mass(f)))
    elif spec.family == "jhhb":
        if spec.zeta != 1.0:
            raise GeneratorValidityError(
                "gamma=0 plug-in scoring in the zeta family is improper unless "
                f"zeta=1; got zeta={spec.zeta}")
        slope = 1.0
        offset = _model_mass(f) - 1.0
    else:
        raise GeneratorValidityError(
            f"{spec.family} plug-in scoring requires gamma > 0")
    with np.errstate(divide="ignore"):
        mean_log = float(np.mean(np.log(np.asarray(density_value(f, samples)))))
    return -slope * mean_log + offset


def _model_mass(f: DensityObject) -> float:
    return f.total_mass()


def fit(problem: EstimationProblem) -> EstimationResult:
    """Minimize the empirical score over (mu, log sigma) by simplex descent.

    Runs from the base initial point (sample median, scaled interquartile
    range) plus ``restarts`` deterministic perturbations of it and keeps the
    best minimum.  A fit whose sigma lands on the floor is flagged
    unconverged.
    """
    samples = problem.samples
    cfg = problem.config
    floor = cfg.sigma_floor

    if cfg.initial is not None:
        mu0, sigma0 = cfg.initial
    else:
        mu0 = float(np.median(samples))
        q75, q25 = np.percentile(samples, [75.0, 25.0])
        sigma0 = float((q75 - q25) / 1.349)
    sigma0 = max(sigma0, 1e-3)

    def objective(params) -> float:
        mu, log_sigma = params
        sigma = max(float(np.exp(log_sigma)), floor)
        return empirical_score(samples, GaussianDensity(mu, sigma, 1.0), problem.spec)

    u0 = float(np.log(sigma0))
    starts = [(mu0, u0)]
    offsets = [(0.5, 0.3), (-0.5, -0.3), (0.5, -0.3), (-0.5, 0.3)]
    for dm, du in offsets[:cfg.restarts]:
        starts.append((mu0 + dm * sigma0, u0 + du))

    best = None
    iterations = 0
    any_converged = False
    for start in starts:
        res = minimize(objective, np.asarray(start), method="Nelder-Mead",
                       options={"maxiter": cfg.max_iterations, "xatol": cfg.xatol,
                                "fatol": cfg.fatol})
        iterations += int(res.nit)
        any_converged = any_converged or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res

    mu_hat = float(best.x[0])
    sigma_hat = max(float(np.exp(best.x[1])), floor)
    at_floor = sigma_hat <= floor * (1.0 + 1e-9)
    return EstimationResult(mu_hat, sigma_hat, float(best.fun), iterations,
                            converged=any_converged and not at_floor,
                            sigma_at_floor=at_floor,
                            optimizer_converged=any_converged)


# ---------------------------------------------------------------------------
# contamination experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    family: str
    gamma: float
    zeta: float | None
    mu_hat: float
    sigma_hat: float
    bias: float
    converged: bool

    def as_csv_row(self) -> list:
        zeta = "" if self.zeta is None else repr(float(self.zeta))
        return [repr(float(self.epsilon)), self.family, repr(float(self.gamma)), zeta,
                repr(float(self.mu_hat)), repr(float(self.sigma_hat)),
                repr(float(self.bias)), str(self.converged).lower()]


SWEEP_HEADER = ["epsilon", "family", "gamma", "zeta", "mu_hat", "sigma_hat",
                "bias", "converged"]


def contaminated_sample(n: int, epsilon: float, outlier_location: float,
                        seed_key) -> np.ndarray:
    """(1-eps) standard normal draws plus a point mass of outliers at one location."""
    if not 0.0 <= epsilon <= 0.45:
        raise DomainError(f"epsilon must lie in [0, 0.45], got {epsilon}")
    rng = np.random.default_rng(seed_key)
    n_out = int(round(epsilon * n))
    clean = rng.standard_normal(n - n_out)
    return np.concatenate([clean, np.full(n_out, float(outlier_location))])


def contamination_sweep(epsilons, outlier_location: float,
                        specs: list[DivergenceSpec], n: int, seed: int,
                        config: OptimizerConfig | None = None,
                        max_workers: int = 1) -> list[SweepRow]:
    """Fit every spec against every contamination level; bias is mu_hat - 0.

    Rows are ordered (epsilon outer, spec inner) and fully determined by the
    seed; row fits are independent and may run on a small thread pool.
    """
    config = config or OptimizerConfig()
    jobs = []
    for epsilon in epsilons:
        samples = contaminated_sample(n, float(epsilon), outlier_location,
                                      [seed, int(round(1e9 * float(epsilon)))])
        for spec in specs:
            jobs.append((float(epsilon), spec, samples))

    def run(job) -> SweepRow:
        epsilon, spec, samples = job
        result = fit(EstimationProblem(samples, spec, config))
        return SweepRow(epsilon, spec.family, spec.gamma, spec.zeta,
                        result.mu, result.sigma, result.mu - 0.0, result.converged)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]
