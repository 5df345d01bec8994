"""
Bounded nonlinear least squares for Stokes-shift models.

Every model is fitted in unconstrained coordinates z (log/logit for scales,
logit for s, squares for nonnegative amplitudes) with Levenberg-Marquardt
and an analytic Jacobian, from a fixed multistart grid. The best start wins;
ties go to the lower start index.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit, logit

from stokes_sd.models.fit import (
    FitOptions,
    FitResult,
    FitWindow,
    ModelComparison,
    ModelKind,
    ModelScore,
)
from stokes_sd.models.params import SubOhmicParams
from stokes_sd.models.series import SampledResponse
from stokes_sd.sdcore import eval_subohmic_stokes, eval_subohmic_stokes_jacobian
from stokes_sd.validation import DomainError, NonConvergenceError, RankDeficiencyError, UsageError

logger = logging.getLogger(__name__)

VALUE_RANGE = (-0.2, 1.2)
FLAT_DATA_PTP = 1e-12
TAU_COLLAPSE_RATIO = 1.05
OMEGA_C_FACTORS = np.geomspace(0.3, 30.0, 5)
S_STARTS = np.linspace(0.1, 0.9, 5)
B0_STARTS = (0.1, 1.0)
TAU_FACTORS = np.geomspace(0.3, 30.0, 4)
COMPARISON_ORDER: Tuple[ModelKind, ...] = ("subohmic", "subohmic-baseline", "gauss-biexp", "ohmic")


def _params(p: np.ndarray) -> SubOhmicParams:
    # optimizer iterates are in range by construction; skip model validation
    return SubOhmicParams.model_construct(delta_s=1.0, omega_ph=float(p[0]), omega_c=float(p[0]), s=float(p[1]))


class _BoundedScale:
    """omega_c = exp(lo + (hi - lo) sigmoid(u)) with bounds (lo, hi) in log space."""

    def __init__(self, bounds: Tuple[float, float]):
        low, high = bounds
        if not 0 < low < high:
            raise DomainError(f"omega_c bounds must satisfy 0 < low < high, got {bounds}")
        self.lo = math.log(low)
        self.hi = math.log(high)

    def value(self, u: float) -> Tuple[float, float, float]:
        """(omega_c, d omega_c/du, position in [0, 1])."""
        sig = float(expit(u))
        omega_c = math.exp(self.lo + (self.hi - self.lo) * sig)
        return omega_c, omega_c * (self.hi - self.lo) * sig * (1.0 - sig), sig

    def inverse(self, omega_c: float) -> float:
        position = (math.log(omega_c) - self.lo) / (self.hi - self.lo)
        return float(logit(min(max(position, 1e-6), 1.0 - 1e-6)))

    def clip(self, omega_c: float) -> float:
        return min(max(omega_c, math.exp(self.lo) * 1.01), math.exp(self.hi) / 1.01)


class _Model:
    kind: ModelKind
    names: Tuple[str, ...]
    min_points = 8

    def __init__(self, options: FitOptions):
        self.options = options

    # z -> free parameters and the Jacobian d free/dz
    def free(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def predict(self, p: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, p: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def starts(self, t_half: float) -> List[np.ndarray]:
        raise NotImplementedError

    def boundary(self, z: np.ndarray, p: np.ndarray) -> List[str]:
        return []

    def ohmic_reference(self, p: np.ndarray) -> Optional[Tuple[Callable, np.ndarray]]:
        """The same model with exp(-w_c t) in place of S, as (predict(q, t), q0); None if there is none."""
        return None

    def full(self, p: np.ndarray) -> np.ndarray:
        return p

    def expansion(self) -> np.ndarray:
        return np.eye(len(self.names))


class _SubOhmic(_Model):
    kind = "subohmic"
    names = ("omega_c", "s")

    def __init__(self, options: FitOptions):
        super().__init__(options)
        self.scale = _BoundedScale(options.omega_c_bounds)

    def free(self, z):
        omega_c, d_omega_c, _ = self.scale.value(z[0])
        s = float(expit(z[1]))
        return np.array([omega_c, s]), np.diag([d_omega_c, s * (1.0 - s)])

    def predict(self, p, t):
        return eval_subohmic_stokes(_params(p), t)

    def jacobian(self, p, t):
        d_omega_c, d_s = eval_subohmic_stokes_jacobian(_params(p), t)
        return np.column_stack([d_omega_c, d_s])

    def _z(self, omega_c: float, s: float) -> List[float]:
        return [self.scale.inverse(self.scale.clip(omega_c)), float(logit(s))]

    def starts(self, t_half):
        if not self.options.multistart:
            return [np.array(self._z(1.0 / t_half, 0.5))]
        return [np.array(self._z(f / t_half, s)) for f in OMEGA_C_FACTORS for s in S_STARTS]

    def boundary(self, z, p):
        active = []
        tol = self.options.boundary_tol
        position = self.scale.value(z[0])[2]
        if position < tol or position > 1.0 - tol:
            active.append("omega_c")
        if p[1] < tol or 1.0 - p[1] < max(tol, self.options.ohmic_margin):
            active.append("s")
        return active

    def ohmic_reference(self, p):
        return (lambda q, t: np.exp(-np.exp(q[0]) * t)), np.array([math.log(p[0])])


class _SubOhmicBaseline(_SubOhmic):
    kind = "subohmic-baseline"
    names = ("omega_c", "s", "b0")

    def free(self, z):
        head, d_head = super().free(z[:2])
        d = np.zeros((3, 3))
        d[:2, :2] = d_head
        d[2, 2] = 2.0 * z[2]
        return np.array([head[0], head[1], z[2] * z[2]]), d

    def predict(self, p, t):
        return (super().predict(p[:2], t) + p[2]) / (1.0 + p[2])

    def jacobian(self, p, t):
        b0 = p[2]
        s = super().predict(p[:2], t)
        head = super().jacobian(p[:2], t) / (1.0 + b0)
        return np.column_stack([head, (1.0 - s) / (1.0 + b0) ** 2])

    def starts(self, t_half):
        heads = super().starts(t_half)
        b0_starts = B0_STARTS if self.options.multistart else B0_STARTS[:1]
        return [np.append(head, math.sqrt(b0)) for head in heads for b0 in b0_starts]

    def boundary(self, z, p):
        active = super().boundary(z, p)
        if p[2] < self.options.boundary_tol:
            active.append("b0")
        return active

    def ohmic_reference(self, p):
        def predict(q, t):
            b0 = q[1] * q[1]
            return (np.exp(-np.exp(q[0]) * t) + b0) / (1.0 + b0)
        return predict, np.array([math.log(p[0]), math.sqrt(p[2])])


class _GaussBiexp(_Model):
    """a_g exp(-w_d t^2/2) + a_1 exp(-t/tau_1) + a_2 exp(-t/tau_2)."""
    kind = "gauss-biexp"
    names = ("a_g", "omega_d", "a_1", "tau_1", "a_2", "tau_2")
    min_points = 12

    def free(self, z):
        v_g, x_d, v_1, y_1, v_2, y_2 = z
        p = np.array([v_g ** 2, math.exp(x_d), v_1 ** 2, math.exp(y_1), v_2 ** 2, math.exp(y_2)])
        return p, np.diag([2 * v_g, p[1], 2 * v_1, p[3], 2 * v_2, p[5]])

    @staticmethod
    def _terms(p, t):
        a_g, omega_d, a_1, tau_1, a_2, tau_2 = p
        return np.exp(-0.5 * omega_d * t * t), np.exp(-t / tau_1), np.exp(-t / tau_2)

    def predict(self, p, t):
        gauss, e_1, e_2 = self._terms(p, t)
        return p[0] * gauss + p[2] * e_1 + p[4] * e_2

    def jacobian(self, p, t):
        a_g, omega_d, a_1, tau_1, a_2, tau_2 = p
        gauss, e_1, e_2 = self._terms(p, t)
        return np.column_stack([
            gauss,
            -0.5 * a_g * t * t * gauss,
            e_1,
            a_1 * t / tau_1 ** 2 * e_1,
            e_2,
            a_2 * t / tau_2 ** 2 * e_2,
        ])

    def _start_grid(self, t_half):
        omega_d0 = 2.0 * math.log(2.0) / t_half ** 2
        taus = t_half * TAU_FACTORS
        pairs = [(taus[i], taus[j]) for i in range(len(taus)) for j in range(i + 1, len(taus))]
        omegas = (omega_d0, 0.2 * omega_d0)
        if not self.options.multistart:
            return [(omega_d0, pairs[0][0], pairs[-1][1])]
        return [(w, tau_1, tau_2) for tau_1, tau_2 in pairs for w in omegas]

    def starts(self, t_half):
        third = math.sqrt(1.0 / 3.0)
        return [np.array([third, math.log(w), third, math.log(tau_1), third, math.log(tau_2)])
                for w, tau_1, tau_2 in self._start_grid(t_half)]

    def boundary(self, z, p):
        full = self.full(p)
        return [name for name, value in zip(("a_g", "a_1", "a_2"), full[[0, 2, 4]])
                if value < self.options.boundary_tol]


class _GaussBiexpConstrained(_GaussBiexp):
    """
    a_g + a_1 + a_2 = 1 with a_2 eliminated.

    Free parameters are (a_g, w_d, a_1, tau_1, tau_2); the angles
    a_g = cos^2 phi_1, a_1 = sin^2 phi_1 cos^2 phi_2 keep a_2 >= 0.
    """
    free_names = ("a_g", "omega_d", "a_1", "tau_1", "tau_2")

    def free(self, z):
        phi_1, x_d, phi_2, y_1, y_2 = z
        c1, s1 = math.cos(phi_1), math.sin(phi_1)
        c2, s2 = math.cos(phi_2), math.sin(phi_2)
        p = np.array([c1 * c1, math.exp(x_d), s1 * s1 * c2 * c2, math.exp(y_1), math.exp(y_2)])
        d = np.zeros((5, 5))
        d[0, 0] = -2.0 * s1 * c1
        d[1, 1] = p[1]
        d[2, 0] = 2.0 * s1 * c1 * c2 * c2
        d[2, 2] = -2.0 * s1 * s1 * s2 * c2
        d[3, 3] = p[3]
        d[4, 4] = p[4]
        return p, d

    def full(self, p):
        a_g, omega_d, a_1, tau_1, tau_2 = p
        return np.array([a_g, omega_d, a_1, tau_1, 1.0 - a_g - a_1, tau_2])

    def predict(self, p, t):
        return super().predict(self.full(p), t)

    def jacobian(self, p, t):
        full_jac = super().jacobian(self.full(p), t)
        return full_jac @ self.expansion()

    def expansion(self):
        e = np.zeros((6, 5))
        e[0, 0] = 1.0
        e[1, 1] = 1.0
        e[2, 2] = 1.0
        e[3, 3] = 1.0
        e[4, 0] = -1.0
        e[4, 2] = -1.0
        e[5, 4] = 1.0
        return e

    def starts(self, t_half):
        phi_1 = math.acos(math.sqrt(1.0 / 3.0))
        phi_2 = 0.25 * math.pi
        return [np.array([phi_1, math.log(w), phi_2, math.log(tau_1), math.log(tau_2)])
                for w, tau_1, tau_2 in self._start_grid(t_half)]


class _Ohmic(_SubOhmic):
    kind = "ohmic"
    names = ("omega_c",)

    def free(self, z):
        omega_c, d_omega_c, _ = self.scale.value(z[0])
        return np.array([omega_c]), np.array([[d_omega_c]])

    def predict(self, p, t):
        return np.exp(-p[0] * t)

    def jacobian(self, p, t):
        return (-t * np.exp(-p[0] * t))[:, None]

    def starts(self, t_half):
        factors = OMEGA_C_FACTORS if self.options.multistart else (1.0,)
        return [np.array([self.scale.inverse(self.scale.clip(f / t_half))]) for f in factors]

    def boundary(self, z, p):
        position = self.scale.value(z[0])[2]
        tol = self.options.boundary_tol
        return ["omega_c"] if position < tol or position > 1.0 - tol else []


def _check_data(data: SampledResponse, model: _Model) -> None:
    if data.n < model.min_points:
        raise DomainError(
            f"a {model.kind} fit needs >= {model.min_points} points, got {data.n}",
            n_points=data.n,
        )
    low, high = VALUE_RANGE
    if np.min(data.values) < low or np.max(data.values) > high:
        raise DomainError(
            f"S values must lie in [{low}, {high}] (normalize the data first)",
            min=float(np.min(data.values)),
            max=float(np.max(data.values)),
        )
    if np.ptp(data.values) < FLAT_DATA_PTP:
        raise RankDeficiencyError("the data is flat; no decay parameter is identifiable")


def _half_time(data: SampledResponse) -> float:
    middle = 0.5 * (data.values[0] + data.values[-1])
    crossed = np.flatnonzero(data.values <= middle)
    t_half = float(data.times[crossed[0]]) if crossed.size else 0.5 * data.t_max
    if t_half <= 0:
        t_half = float(data.times[1])
    return t_half


def _canonicalize_taus(full: np.ndarray, covariance: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if full[3] <= full[5]:
        return full, covariance
    order = [0, 1, 4, 5, 2, 3]
    return full[order], covariance[np.ix_(order, order)]


def _ohmic_fits_as_well(reference, t, y, weights, chi2: float, k: int) -> bool:
    """True when swapping S for exp(-w_c t) does not raise the AICc."""
    predict, q0 = reference
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        try:
            result = least_squares(lambda q: (predict(q, t) - y) * weights, q0, method="lm")
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            return False
    if not np.isfinite(result.cost):
        return False
    scale = float(np.max(np.abs(y)))
    pinned = float(np.sum(result.fun ** 2))
    return aicc(pinned, t.size, q0.size, scale) <= aicc(chi2, t.size, k, scale)


def _fit(model: _Model, data: SampledResponse, options: FitOptions) -> FitResult:
    _check_data(data, model)
    t = data.times
    y = data.values
    weighted = options.use_sigma and data.sigma is not None
    weights = 1.0 / data.sigma if weighted else np.ones_like(y)

    def residuals(z):
        p, _ = model.free(z)
        return (model.predict(p, t) - y) * weights

    def jacobian(z):
        p, d_free = model.free(z)
        return (model.jacobian(p, t) * weights[:, None]) @ d_free

    starts = model.starts(_half_time(data))
    best = None
    best_index = -1
    best_any = math.inf
    succeeded = 0
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for index, z0 in enumerate(starts):
            try:
                result = least_squares(
                    residuals, z0, jac=jacobian, method="lm",
                    ftol=options.ftol, xtol=options.xtol, gtol=options.gtol,
                    max_nfev=options.max_iterations,
                )
            except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
                logger.debug("Start %d of the %s fit failed: %s", index, model.kind, e)
                continue
            if not np.isfinite(result.cost):
                continue
            best_any = min(best_any, math.sqrt(2.0 * result.cost / data.n))
            if not result.success:
                continue
            succeeded += 1
            if best is None or result.cost < best.cost:
                best = result
                best_index = index

    if best is None:
        raise NonConvergenceError(
            f"none of the {len(starts)} starts of the {model.kind} fit converged",
            best_residual=None if math.isinf(best_any) else best_any,
            starts=len(starts),
        )

    z = best.x
    p, _ = model.free(z)
    n = data.n
    k = p.size
    chi2 = float(np.sum(best.fun ** 2))
    jac_free = model.jacobian(p, t) * weights[:, None]
    covariance_free = np.linalg.pinv(jac_free.T @ jac_free)
    if not weighted and n > k:
        covariance_free *= chi2 / (n - k)
    expansion = model.expansion()
    full = model.full(p)
    covariance = expansion @ covariance_free @ expansion.T

    ill_conditioned = False
    if isinstance(model, _GaussBiexp):
        full, covariance = _canonicalize_taus(full, covariance)
        if full[5] / full[3] < TAU_COLLAPSE_RATIO:
            ill_conditioned = True
            logger.warning("tau_1 and tau_2 collapse (ratio %.4f); the biexponential is ill-conditioned",
                           full[5] / full[3])

    boundary = model.boundary(z, p)
    reference = model.ohmic_reference(p)
    if reference is not None and "s" not in boundary and _ohmic_fits_as_well(reference, t, y, weights, chi2, k):
        logger.info("A single exponential fits as well as the %s model by AICc", model.kind)
        boundary.append("s")
    interior = not boundary
    converged = bool(best.success and interior and best.optimality <= options.gradient_tol)
    if boundary:
        logger.warning("%s fit ends on a boundary: %s", model.kind, ", ".join(boundary))

    uncertainties = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    return FitResult(
        model=model.kind,
        params={name: float(v) for name, v in zip(model.names, full)},
        param_names=list(model.names),
        uncertainties={name: float(u) for name, u in zip(model.names, uncertainties)},
        covariance=covariance.tolist(),
        residual=math.sqrt(chi2 / n),
        chi2=chi2,
        iterations=int(best.nfev),
        converged=converged,
        optimality=float(best.optimality),
        boundary_active=boundary,
        ill_conditioned=ill_conditioned,
        start_index=best_index,
        starts_tried=len(starts),
        starts_succeeded=succeeded,
        window=FitWindow(t_min=float(t[0]), t_max=float(t[-1]), n_points=n, weighted=weighted),
        message=str(best.message),
    )


def fit_subohmic(data: SampledResponse, options: Optional[FitOptions] = None) -> FitResult:
    """
    Fit (omega_c, s) of the sub-Ohmic Stokes function.

    s is reported boundary-active at the Ohmic edge when 1 - s falls below
    ``ohmic_margin`` or when a single exponential fits the same window at
    least as well by AICc; such fits are not converged.
    """
    options = options or FitOptions()
    return _fit(_SubOhmic(options), data, options)


def fit_subohmic_baseline(data: SampledResponse, options: Optional[FitOptions] = None) -> FitResult:
    """Fit (omega_c, s, b0) of [S(t) + b0]/(1 + b0) with b0 >= 0."""
    options = options or FitOptions()
    return _fit(_SubOhmicBaseline(options), data, options)


def fit_gauss_biexp(data: SampledResponse, options: Optional[FitOptions] = None) -> FitResult:
    """Fit the Gaussian plus two exponentials; tau_1 < tau_2 in the result."""
    options = options or FitOptions()
    model = _GaussBiexpConstrained(options) if options.constrain_amplitudes else _GaussBiexp(options)
    return _fit(model, data, options)


def fit_ohmic(data: SampledResponse, options: Optional[FitOptions] = None) -> FitResult:
    """Fit a single exponential exp(-omega_c t)."""
    options = options or FitOptions()
    return _fit(_Ohmic(options), data, options)


FITTERS = {
    "subohmic": fit_subohmic,
    "subohmic-baseline": fit_subohmic_baseline,
    "gauss-biexp": fit_gauss_biexp,
    "ohmic": fit_ohmic,
}


def fit_model(kind: str, data: SampledResponse, options: Optional[FitOptions] = None) -> FitResult:
    if kind not in FITTERS:
        raise UsageError(f"unknown model {kind!r}; use one of {', '.join(FITTERS)}")
    return FITTERS[kind](data, options)


def aicc(chi2: float, n: int, k: int, scale: float) -> float:
    """Small-sample corrected Akaike criterion; chi2 is floored at n (eps * scale)^2."""
    floor = n * (np.finfo(float).eps * max(scale, 1.0)) ** 2
    rss = max(chi2, floor)
    correction = 2.0 * k * (k + 1) / (n - k - 1) if n - k - 1 > 0 else math.inf
    return n * math.log(rss / n) + 2.0 * k + correction


def compare_models(
    data: SampledResponse,
    options: Optional[FitOptions] = None,
    models: Sequence[ModelKind] = ("subohmic", "gauss-biexp", "ohmic"),
) -> ModelComparison:
    """
    Fit each model and rank by AICc; ties keep the fixed model order
    (sub-Ohmic, baseline, Gauss+biexponential, Ohmic).
    """
    order = [m for m in COMPARISON_ORDER if m in models]
    unknown = set(models) - set(COMPARISON_ORDER)
    if unknown:
        raise UsageError(f"unknown models: {', '.join(sorted(unknown))}")
    scale = float(np.max(np.abs(data.values)))
    fits: Dict[str, FitResult] = {}
    scores: List[ModelScore] = []
    for kind in order:
        fit = FITTERS[kind](data, options)
        fits[kind] = fit
        k = len(fit.params) - (1 if kind == "gauss-biexp" and options and options.constrain_amplitudes else 0)
        scores.append(ModelScore(
            model=kind,
            n_params=k,
            residual=fit.residual,
            aicc=aicc(fit.chi2, data.n, k, scale),
            boundary_active=fit.boundary_active,
            converged=fit.converged,
        ))
    ranked = sorted(scores, key=lambda sc: (sc.aicc, order.index(sc.model)))
    by_residual = min(scores, key=lambda sc: (sc.residual, order.index(sc.model)))
    return ModelComparison(
        ranking=[sc.model for sc in ranked],
        scores=scores,
        best_by_residual=by_residual.model,
        fits=fits,
    )
