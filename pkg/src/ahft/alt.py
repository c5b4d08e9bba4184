"""Weibull log-linear accelerated-life model of fatigue.

The life characteristic (Weibull scale) is log-linear in the transformed
factors::

    eta(x) = exp(a0 + sum_j aj * g_j(x_j))

with g_j one of identity, natural log (inverse-power-law form) or
reciprocal (Arrhenius form).  Each observation's response t_i (here: the
fatigue value accumulated over the observation window) is an exact
Weibull(eta_i, beta) lifetime, giving the log-likelihood

    l = sum_i [ ln(beta) - beta*ln(eta_i) + (beta-1)*ln(t_i)
                - (t_i / eta_i)**beta ].

Fitting works on theta = (alpha, phi) with phi = ln(beta), so the shape
stays positive without constraints.  Writing u_i = ln(t_i) - z_i.alpha
(z_i the design row with leading 1) each term becomes

    l_i = phi + beta*u_i - ln(t_i) - exp(beta*u_i)

whose gradient and Hessian are closed-form:

    dl/da_k  = beta * sum_i z_ik * (exp(beta*u_i) - 1)
    dl/dphi  = sum_i [ 1 + beta*u_i * (1 - exp(beta*u_i)) ]
    H[aa]    = -beta^2 * Z' diag(exp(beta*u)) Z
    H[aphi]  = beta * Z' (exp(beta*u)*(1 + beta*u) - 1)
    H[pp]    = sum_i [ beta*u_i*(1 - exp(beta*u_i))
                       - (beta*u_i)**2 * exp(beta*u_i) ]

Newton steps with step-halving maximize l; the parameter covariance is
the inverse observed information (negative Hessian) at the optimum, in
the (alpha, ln beta) parameterization.  Quantile prediction inverts the
Weibull CDF at the requested percentile, t_p = eta * (-ln(1-p))**(1/beta),
with a delta-method standard error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .dataset import Dataset, normalize_name
from .errors import (
    DegenerateFactor,
    InputError,
    MissingFactor,
    NoConvergence,
    NonPositiveResponse,
    NonPositiveSE,
    NonPositiveValue,
    SingularInformation,
    TooFewRows,
    TransformDomainError,
)

# Default prediction percentile: the distribution median.
DEFAULT_PERCENTILE = 0.5
DEFAULT_CONFIDENCE = 0.99

_NORMAL = NormalDist()

TRANSFORMS = ("identity", "log", "reciprocal")
_TRANSFORM_ALIASES = {
    "identity": "identity", "id": "identity", "none": "identity",
    "log": "log", "ln": "log", "natural-log": "log", "natural_log": "log",
    "reciprocal": "reciprocal", "inverse": "reciprocal",
}


@dataclass(frozen=True)
class FactorSpec:
    """One model factor: a PSF column name plus its covariate transform."""

    name: str
    transform: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "name", normalize_name(self.name))
        key = _TRANSFORM_ALIASES.get(str(self.transform).strip().lower())
        if key is None:
            raise InputError(
                f"unknown transform {self.transform!r} for factor {self.name!r}; "
                f"choose one of {TRANSFORMS}"
            )
        object.__setattr__(self, "transform", key)

    def apply(self, values):
        """Apply the transform, checking its domain."""
        values = np.asarray(values, dtype=float)
        if self.transform == "identity":
            return values
        if np.any(values <= 0.0):
            raise TransformDomainError(
                f"factor {self.name!r}: {self.transform} transform requires "
                f"strictly positive values"
            )
        if self.transform == "log":
            return np.log(values)
        return 1.0 / values


def parse_factor(text: str) -> FactorSpec:
    """Parse ``name`` or ``name:transform`` (CLI syntax) into a FactorSpec."""
    name, sep, transform = text.partition(":")
    if not name.strip():
        raise InputError(f"empty factor name in {text!r}")
    return FactorSpec(name, transform if sep else "identity")


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 200
    gradient_tol: float = 1e-8
    confidence: float = DEFAULT_CONFIDENCE

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")
        if not (self.gradient_tol > 0):
            raise InputError("gradient_tol must be positive")
        if not (0.0 < self.confidence < 1.0):
            raise InputError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class FitMeta:
    log_likelihood: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class GllWeibullModel:
    """A fitted (or hand-built) Weibull log-linear model.

    ``alpha[0]`` is the intercept; ``alpha[j]`` matches ``factors[j-1]``.
    ``covariance`` is over (alpha..., ln shape), so its last row/column
    refers to the log of the shape.  Immutable; safe to share.
    """

    factors: tuple[FactorSpec, ...]
    alpha: np.ndarray
    shape: float
    covariance: np.ndarray
    fit_meta: FitMeta | None = None

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "covariance", cov)
        k = len(self.factors) + 1
        if alpha.shape != (k,):
            raise InputError(f"alpha must have length {k}, got {alpha.shape}")
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise NonPositiveValue(f"shape must be positive, got {self.shape!r}")
        if cov.shape != (k + 1, k + 1):
            raise InputError(f"covariance must be {(k + 1, k + 1)}, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > 1e-8:
            raise InputError("covariance must be symmetric within 1e-8")

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return ("intercept",) + tuple(f.name for f in self.factors) + ("shape",)

    @property
    def standard_errors(self) -> np.ndarray:
        """SEs of (alpha..., ln shape) from the covariance diagonal."""
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))


# ---------------------------------------------------------------------------
# Design matrix and likelihood internals
# ---------------------------------------------------------------------------

def _design(dataset: Dataset, factors: tuple[FactorSpec, ...]) -> np.ndarray:
    cols = [np.ones(dataset.n_rows)]
    for f in factors:
        cols.append(f.apply(dataset.column(f.name)))
    return np.column_stack(cols)


def _response(dataset: Dataset, response: str) -> np.ndarray:
    t = dataset.column(response)
    if np.any(t <= 0.0) or not np.all(np.isfinite(t)):
        raise NonPositiveResponse(
            f"response {response!r} must be strictly positive and finite"
        )
    return t


def _loglik(theta: np.ndarray, z: np.ndarray, logt: np.ndarray) -> float:
    phi = theta[-1]
    if phi > 700.0:  # exp would overflow; such a trial is never an optimum
        return -math.inf
    beta = math.exp(phi)
    u = logt - z @ theta[:-1]
    bu = beta * u
    with np.errstate(over="ignore"):
        e = np.exp(bu)
        total = float(np.sum(phi + bu - logt - e))
    return total if math.isfinite(total) else -math.inf


def _gradient(theta: np.ndarray, z: np.ndarray, logt: np.ndarray) -> np.ndarray:
    phi = theta[-1]
    beta = math.exp(phi)
    u = logt - z @ theta[:-1]
    bu = beta * u
    e = np.exp(bu)
    g_alpha = beta * (z.T @ (e - 1.0))
    g_phi = float(np.sum(1.0 + bu * (1.0 - e)))
    return np.concatenate([g_alpha, [g_phi]])


def _hessian(theta: np.ndarray, z: np.ndarray, logt: np.ndarray) -> np.ndarray:
    phi = theta[-1]
    beta = math.exp(phi)
    u = logt - z @ theta[:-1]
    bu = beta * u
    e = np.exp(bu)
    k = z.shape[1]
    h = np.empty((k + 1, k + 1))
    h[:k, :k] = -(beta * beta) * ((z * e[:, None]).T @ z)
    cross = beta * (z.T @ (e * (1.0 + bu) - 1.0))
    h[:k, k] = cross
    h[k, :k] = cross
    h[k, k] = float(np.sum(bu * (1.0 - e) - bu * bu * e))
    return h


# ---------------------------------------------------------------------------
# Public likelihood and fitting
# ---------------------------------------------------------------------------

def log_likelihood(model: GllWeibullModel, dataset: Dataset, response: str = "fatigue") -> float:
    """Exact-observation Weibull log-likelihood of ``dataset`` under ``model``."""
    t = _response(dataset, response)
    z = _design(dataset, model.factors)
    theta = np.concatenate([model.alpha, [math.log(model.shape)]])
    return _loglik(theta, z, np.log(t))


def fit_mle(
    dataset: Dataset,
    factors,
    response: str = "fatigue",
    config: FitConfig | None = None,
) -> GllWeibullModel:
    """Maximum-likelihood fit of the Weibull log-linear model.

    ``factors`` may be FactorSpec instances or plain names (identity
    transform).  Deterministic: identical inputs give bit-identical
    models.  Raises :class:`NoConvergence` with diagnostics when the
    gradient has not met the tolerance within the iteration budget,
    :class:`DegenerateFactor` when a transformed factor column is
    constant, and :class:`SingularInformation` when the observed
    information cannot be inverted.
    """
    config = config or FitConfig()
    specs = tuple(f if isinstance(f, FactorSpec) else FactorSpec(str(f)) for f in factors)
    n_params = len(specs) + 2
    if dataset.n_rows < n_params + 1:
        raise TooFewRows(
            f"need at least {n_params + 1} rows to fit {n_params} parameters, "
            f"have {dataset.n_rows}"
        )
    t = _response(dataset, response)
    z = _design(dataset, specs)
    for j, spec in enumerate(specs, start=1):
        if np.ptp(z[:, j]) == 0.0:
            raise DegenerateFactor(
                f"factor {spec.name!r} is constant after its {spec.transform} transform"
            )
    logt = np.log(t)

    theta = np.zeros(n_params)
    theta[0] = math.log(float(np.mean(t)))
    ll = _loglik(theta, z, logt)
    iterations = 0
    converged = False
    grad_norm = math.inf
    for iterations in range(1, config.max_iterations + 1):
        g = _gradient(theta, z, logt)
        grad_norm = float(np.max(np.abs(g)))
        if grad_norm < config.gradient_tol:
            converged = True
            break
        h = _hessian(theta, z, logt)
        step = None
        try:
            candidate = np.linalg.solve(h, -g)
            if np.all(np.isfinite(candidate)) and float(candidate @ g) > 0.0:
                step = candidate
        except np.linalg.LinAlgError:
            step = None
        if step is None:
            # Hessian unusable here; fall back to a scaled ascent step.
            step = g / max(1.0, grad_norm)
        scale = 1.0
        improved = False
        # Ties are accepted: near the optimum the Newton step improves the
        # objective by less than one ulp, and rejecting it would strand the
        # gradient just above tolerance.
        tie_tol = 1e-12 * max(1.0, abs(ll))
        for _ in range(60):
            trial = theta + scale * step
            ll_trial = _loglik(trial, z, logt)
            if math.isfinite(ll_trial) and ll_trial >= ll - tie_tol:
                theta, ll = trial, ll_trial
                improved = True
                break
            scale *= 0.5
        if not improved:
            break  # no ascent direction left; final gradient check decides
    else:
        iterations = config.max_iterations

    g = _gradient(theta, z, logt)
    grad_norm = float(np.max(np.abs(g)))
    converged = grad_norm < config.gradient_tol
    if not converged:
        raise NoConvergence(
            f"fit did not converge in {iterations} iterations "
            f"(gradient max-norm {grad_norm:.3e})",
            diagnostics={
                "iterations": iterations,
                "gradient_max_norm": grad_norm,
                "theta": theta.tolist(),
                "log_likelihood": ll,
            },
        )

    information = -_hessian(theta, z, logt)
    try:
        covariance = np.linalg.inv(information)
    except np.linalg.LinAlgError:
        raise SingularInformation(
            "observed information matrix is singular at the optimum"
        ) from None
    if not np.all(np.isfinite(covariance)):
        raise SingularInformation("observed information produced non-finite covariance")
    covariance = (covariance + covariance.T) / 2.0

    return GllWeibullModel(
        factors=specs,
        alpha=theta[:-1].copy(),
        shape=math.exp(theta[-1]),
        covariance=covariance,
        fit_meta=FitMeta(log_likelihood=ll, iterations=iterations, converged=True),
    )


# ---------------------------------------------------------------------------
# Wald statistics and confidence intervals
# ---------------------------------------------------------------------------

def _z_quantile(level: float) -> float:
    if not (0.0 < level < 1.0):
        raise InputError(f"confidence level must lie in (0, 1), got {level!r}")
    return _NORMAL.inv_cdf((1.0 + level) / 2.0)


def wald_stats(coef: float, se: float) -> tuple[float, float]:
    """Wald z = coef/se and its two-sided normal p-value."""
    if not (se > 0):
        raise NonPositiveSE(f"standard error must be positive, got {se!r}")
    z = coef / se
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return z, p


def coef_ci(coef: float, se: float, level: float) -> tuple[float, float]:
    """Plain normal interval coef +/- z*se, for sign-unrestricted coefficients."""
    if not (se > 0):
        raise NonPositiveSE(f"standard error must be positive, got {se!r}")
    half = _z_quantile(level) * se
    return coef - half, coef + half


def positive_param_ci(value: float, se: float, level: float) -> tuple[float, float]:
    """Log-normal interval for a positive quantity (shape, percentile).

    A normal interval on ln(value) with delta-method standard error
    se/value, mapped back: value * exp(+/- z*se/value).  Both bounds stay
    positive.  A zero standard error collapses to the point value.
    """
    if not (value > 0 and math.isfinite(value)):
        raise NonPositiveValue(f"value must be positive, got {value!r}")
    if se < 0 or not math.isfinite(se):
        raise NonPositiveSE(f"standard error must be nonnegative, got {se!r}")
    z = _z_quantile(level)
    if se == 0.0:
        return value, value
    factor = math.exp(z * se / value)
    return value / factor, value * factor


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    """A percentile prediction with its delta-method uncertainty."""

    percentile_p: float
    value: float
    std_error: float
    ci_lower: float
    ci_upper: float
    confidence_level: float

    def __post_init__(self):
        if not (self.ci_lower <= self.value <= self.ci_upper):
            raise InputError("prediction bounds must bracket the value")


def _factor_row(model: GllWeibullModel, x: dict) -> np.ndarray:
    """Design row (with leading 1) for a single factor-value map."""
    values = {normalize_name(k): float(v) for k, v in x.items()}
    row = [1.0]
    for spec in model.factors:
        if spec.name not in values:
            raise MissingFactor(f"no value supplied for factor {spec.name!r}")
        row.append(float(spec.apply(np.array([values[spec.name]]))[0]))
    return np.array(row)


def life_characteristic(model: GllWeibullModel, x: dict) -> float:
    """eta(x) = exp(a0 + sum_j aj * g_j(x_j))."""
    return float(np.exp(_factor_row(model, x) @ model.alpha))


def weibull_quantile(eta: float, shape: float, p: float) -> float:
    """Closed-form Weibull quantile t_p = eta * (-ln(1-p))**(1/shape)."""
    if not (0.0 < p < 1.0):
        raise InputError(f"percentile must lie in (0, 1), got {p!r}")
    return eta * (-math.log1p(-p)) ** (1.0 / shape)


def weibull_cdf(t: float, eta: float, shape: float) -> float:
    """Weibull CDF F(t) = 1 - exp(-(t/eta)**shape) for t >= 0."""
    if t <= 0.0:
        return 0.0
    return -math.expm1(-((t / eta) ** shape))


def predict_percentile(model: GllWeibullModel, x: dict, p: float = DEFAULT_PERCENTILE) -> float:
    """Fatigue level not exceeded with probability ``p`` at factor point ``x``."""
    return weibull_quantile(life_characteristic(model, x), model.shape, p)


def predict_with_interval(
    model: GllWeibullModel,
    x: dict,
    p: float = DEFAULT_PERCENTILE,
    level: float = DEFAULT_CONFIDENCE,
) -> Prediction:
    """Percentile prediction with a delta-method SE and log-normal CI.

    With w = -ln(1-p), ln(t_p) = z.alpha + ln(w)/beta, so the gradient of
    t_p with respect to (alpha, ln beta) is t_p * (z, -ln(w)/beta); the
    variance is that gradient contracted with the model covariance.
    """
    if not (0.0 < p < 1.0):
        raise InputError(f"percentile must lie in (0, 1), got {p!r}")
    row = _factor_row(model, x)
    value = weibull_quantile(float(np.exp(row @ model.alpha)), model.shape, p)
    w = -math.log1p(-p)
    grad = value * np.concatenate([row, [-math.log(w) / model.shape]])
    if not np.all(np.isfinite(model.covariance)):
        raise SingularInformation("model covariance contains non-finite entries")
    variance = float(grad @ model.covariance @ grad)
    se = math.sqrt(max(variance, 0.0))
    lower, upper = positive_param_ci(value, se, level)
    return Prediction(
        percentile_p=p,
        value=value,
        std_error=se,
        ci_lower=lower,
        ci_upper=upper,
        confidence_level=level,
    )


def sweep_curve(
    model: GllWeibullModel,
    varying: str,
    grid,
    fixed: dict,
    p: float = DEFAULT_PERCENTILE,
) -> list[tuple[float, float]]:
    """Predicted fatigue along a grid of one factor, others held fixed."""
    grid = [float(g) for g in grid]
    if not grid:
        raise InputError("grid must be nonempty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise InputError("grid must be sorted ascending")
    varying = normalize_name(varying)
    points = []
    for g in grid:
        x = dict(fixed)
        x[varying] = g
        points.append((g, predict_percentile(model, x, p)))
    return points


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

FORMAT_NAME = "ahft-model"
FORMAT_VERSION = 1


def model_to_json(model: GllWeibullModel) -> str:
    """Serialize a model to a human-readable JSON document.

    Floats are emitted in shortest-exact form (full precision), so a
    load round-trips every field bit-for-bit.
    """
    doc = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "factors": [{"name": f.name, "transform": f.transform} for f in model.factors],
        "alpha": [float(a) for a in model.alpha],
        "shape": float(model.shape),
        "covariance": [[float(c) for c in row] for row in model.covariance],
        "fit_meta": None
        if model.fit_meta is None
        else {
            "log_likelihood": float(model.fit_meta.log_likelihood),
            "iterations": int(model.fit_meta.iterations),
            "converged": bool(model.fit_meta.converged),
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def model_from_json(text: str) -> GllWeibullModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise InputError(f"not a {FORMAT_NAME} document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise InputError(
            f"unsupported format_version {doc.get('format_version')!r} "
            f"(expected {FORMAT_VERSION})"
        )
    try:
        factors = tuple(FactorSpec(f["name"], f["transform"]) for f in doc["factors"])
        meta = doc["fit_meta"]
        fit_meta = None
        if meta is not None:
            fit_meta = FitMeta(
                log_likelihood=float(meta["log_likelihood"]),
                iterations=int(meta["iterations"]),
                converged=bool(meta["converged"]),
            )
        return GllWeibullModel(
            factors=factors,
            alpha=np.array(doc["alpha"], dtype=float),
            shape=float(doc["shape"]),
            covariance=np.array(doc["covariance"], dtype=float),
            fit_meta=fit_meta,
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"model document is missing or mistypes a field: {exc}") from None


def save_model(model: GllWeibullModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> GllWeibullModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
