"""Bridges between one-predictor and multi-predictor coefficients.

Covers the slope algebra connecting simple and multiple regression, the
residualized-predictor equivalence (regressing Y on a predictor stripped
of its linear relationships with the others reproduces that predictor's
multivariate coefficient), the correlation-adjusted effect sum that
collapses back to the simple slope for predictor-linear models, and the
detection of paradoxical coefficient signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .dataset import Dataset
from .errors import CollinearityError, DegenerateColumnError, UnknownPredictorError
from .ols import FittedModel, fit
from .terms import ModelSpec, Term

DESTABILIZATION_THRESHOLD = 0.7


def _slr_slope(y: np.ndarray, x: np.ndarray, what: str) -> float:
    sxx = float(((x - x.mean()) ** 2).sum())
    if sxx == 0.0:
        raise DegenerateColumnError(f"zero variance in {what}")
    sxy = float(((x - x.mean()) * (y - y.mean())).sum())
    return sxy / sxx


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    ac = a - a.mean()
    bc = b - b.mean()
    denom = math.sqrt(float((ac**2).sum()) * float((bc**2).sum()))
    if denom == 0.0:
        raise DegenerateColumnError("zero variance in correlation input")
    return float((ac * bc).sum()) / denom


def two_predictor_bridge(
    a1: float, a2: float, c12: float, c21: float, r: float
) -> tuple[float, float]:
    """Two-predictor MLR coefficients from SLR slopes and cross-slopes.

        b1 = (a1 - a2*c21) / (1 - r^2),   b2 = (a2 - a1*c12) / (1 - r^2)

    where a_i are the simple slopes of Y on x_i, c12/c21 the slopes of
    x1 on x2 and x2 on x1, and r their correlation.
    """
    denom = 1.0 - r * r
    if denom <= 0.0:
        raise CollinearityError(f"predictors are perfectly correlated (r={r})")
    return (a1 - a2 * c21) / denom, (a2 - a1 * c12) / denom


@dataclass(frozen=True)
class BridgeReport:
    """How one predictor's simple slope relates to its multivariate one.

    ``a``/``b`` are the target's SLR and MLR slopes; ``slr``/``mlr`` hold
    the same per predictor.  ``c[(i, j)]`` is the slope of x_i regressed
    on x_j.  ``ac_sum`` is the correlation-adjusted effect
    b_target + sum_j b_j * c[(j, target)], which equals ``a`` for
    predictor-linear models.  ``reconstruction_discrepancy`` (two
    predictors only) is the largest absolute gap between the direct MLR
    coefficients and their reconstruction from (a, c, r).
    """

    target: str
    a: float
    b: float
    slr: dict[str, float]
    mlr: dict[str, float]
    c: dict[tuple[str, str], float]
    r: dict[str, float]
    ac_sum: float
    sign_flip: bool
    expectation_violation: bool | None = None
    reconstruction_discrepancy: float | None = None


class AbbottCarrollResult(NamedTuple):
    ac_sum: float
    a_target: float
    discrepancy: float


def _linear_spec(response: str, predictors: Sequence[str]) -> ModelSpec:
    return ModelSpec(
        response=response, terms=tuple(Term.linear(name) for name in predictors)
    )


def bridge(
    d: Dataset,
    response: str,
    predictors: Sequence[str],
    target: str,
    expected_sign: int | None = None,
) -> BridgeReport:
    """Full SLR/MLR coefficient comparison for one target predictor.

    Fits the simple regression of the response on each predictor, the
    predictor-linear multiple regression on all of them, and the
    pairwise inter-predictor regressions involving the target.  For
    exactly two predictors the MLR coefficients are additionally
    reconstructed from the slope algebra and the residual discrepancy is
    recorded.
    """
    predictors = list(predictors)
    if target not in predictors:
        raise UnknownPredictorError(f"target {target!r} not among predictors {predictors}")
    y = d.column(response)

    slr = {name: _slr_slope(y, d.column(name), name) for name in predictors}
    mlr_fit = fit(d, _linear_spec(response, predictors))
    mlr = {
        name: mlr_fit.coefficient(Term.linear(name)) for name in predictors
    }

    xt = d.column(target)
    c: dict[tuple[str, str], float] = {}
    r: dict[str, float] = {}
    for name in predictors:
        if name == target:
            continue
        xj = d.column(name)
        c[(name, target)] = _slr_slope(xj, xt, f"{name} on {target}")
        c[(target, name)] = _slr_slope(xt, xj, f"{target} on {name}")
        r[name] = _pearson(xt, xj)

    ac_sum = mlr[target] + sum(
        mlr[name] * c[(name, target)] for name in predictors if name != target
    )

    a, b = slr[target], mlr[target]
    sign_flip = a * b < 0.0
    violation = None if expected_sign is None else (b * expected_sign < 0.0)

    discrepancy = None
    if len(predictors) == 2:
        other = next(name for name in predictors if name != target)
        b_t, b_o = two_predictor_bridge(
            slr[target],
            slr[other],
            c[(target, other)],
            c[(other, target)],
            r[other],
        )
        discrepancy = max(abs(b_t - mlr[target]), abs(b_o - mlr[other]))

    return BridgeReport(
        target=target,
        a=a,
        b=b,
        slr=slr,
        mlr=mlr,
        c=c,
        r=r,
        ac_sum=ac_sum,
        sign_flip=sign_flip,
        expectation_violation=violation,
        reconstruction_discrepancy=discrepancy,
    )


@dataclass(frozen=True)
class Residualization:
    """A predictor with its linear dependence on the others removed.

    ``column`` is x* = x_target - sum_j slopes[j] * x_j with the slopes
    taken from the multivariate regression of the target on the others
    (required for the slope(Y ~ x*) = MLR-coefficient equivalence to
    hold with two or more co-predictors).
    """

    target: str
    column: np.ndarray
    slopes: dict[str, float]


def residualize(d: Dataset, target: str, others: Sequence[str]) -> Residualization:
    """Strip a predictor of its linear relationships with the others."""
    others = list(others)
    if not others:
        raise UnknownPredictorError("need at least one co-predictor to remove")
    if target in others:
        raise UnknownPredictorError(f"target {target!r} cannot be among the others")
    aux = fit(d, _linear_spec(target, others))
    slopes = {name: aux.coefficient(Term.linear(name)) for name in others}
    column = d.column(target).astype(float).copy()
    for name in others:
        column -= slopes[name] * d.column(name)
    column.flags.writeable = False
    return Residualization(target=target, column=column, slopes=slopes)


def abbott_carroll(
    d: Dataset,
    response: str,
    predictors: Sequence[str],
    target: str,
    spec: ModelSpec | None = None,
) -> AbbottCarrollResult:
    """Correlation-adjusted unit effect of the target and its collapse.

    ac_sum = b_target + sum_{j != target} b_j * c_{j,target}, where b are
    the linear-term coefficients of the multivariate fit and c_{j,target}
    the pairwise slope of x_j on the target.  For predictor-linear
    models this equals the target's simple slope exactly; passing a
    ``spec`` with higher-order terms shows the identity breaking (only
    linear-term coefficients enter the sum).
    """
    predictors = list(predictors)
    if target not in predictors:
        raise UnknownPredictorError(f"target {target!r} not among predictors {predictors}")
    if spec is None:
        spec = _linear_spec(response, predictors)
    model = fit(d, spec)
    for name in predictors:
        if Term.linear(name) not in spec.terms:
            raise UnknownPredictorError(
                f"spec lacks a linear term for predictor {name!r}"
            )
    xt = d.column(target)
    ac_sum = model.coefficient(Term.linear(target))
    for name in predictors:
        if name == target:
            continue
        ac_sum += model.coefficient(Term.linear(name)) * _slr_slope(
            d.column(name), xt, f"{name} on {target}"
        )
    a_target = _slr_slope(d.column(response), xt, target)
    return AbbottCarrollResult(
        ac_sum=ac_sum, a_target=a_target, discrepancy=abs(ac_sum - a_target)
    )


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str


def detect_paradox(
    report: BridgeReport,
    expected_sign: int | None = None,
    correlation_threshold: float = DESTABILIZATION_THRESHOLD,
) -> list[Finding]:
    """Flag paradox-prone patterns in a bridge report.

    Findings: an SLR/MLR sign flip for the target; a multivariate sign
    contradicting a declared expectation; and co-predictor correlations
    strong enough (default |r| > 0.7) that the model may destabilize.
    """
    findings: list[Finding] = []
    if report.sign_flip:
        findings.append(
            Finding(
                kind="sign-flip",
                message=(
                    f"{report.target}: simple slope {report.a:.6g} and multivariate"
                    f" coefficient {report.b:.6g} have opposite signs"
                ),
            )
        )
    if expected_sign is None:
        violated = report.expectation_violation
    else:
        violated = report.b * expected_sign < 0.0
    if violated:
        findings.append(
            Finding(
                kind="expectation-violation",
                message=(
                    f"{report.target}: multivariate coefficient {report.b:.6g}"
                    " contradicts the declared expected sign"
                ),
            )
        )
    for name in sorted(report.r):
        r = report.r[name]
        if abs(r) > correlation_threshold:
            findings.append(
                Finding(
                    kind="high-correlation",
                    message=(
                        f"{report.target} and {name} correlate at r={r:.3f}"
                        f" (|r| > {correlation_threshold:g}); coefficients may destabilize"
                    ),
                )
            )
    return findings
