"""Least-squares fitting with full coefficient inference.

The solver is QR with column pivoting (rank-revealing) rather than the
normal equations; a pivot below 1e-10 times the largest pivot declares
rank deficiency and names the offending column.  Standard errors come
from sigma^2 * (X'X)^{-1} with sigma^2 = RSS/dof; p-values are two-sided
Student t.  R^2 uses the centered total sum of squares when an intercept
is present and the uncentered one otherwise.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.linalg

from .dataset import Dataset
from .errors import (
    AssignmentError,
    CollinearityError,
    NestingError,
    SaturatedModelError,
)
from .stats import student_t_two_sided_p
from .terms import ModelSpec, expand

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class FittedModel:
    """Coefficients plus inference for one least-squares fit.

    ``coef`` is ordered as the design matrix: intercept first when
    present, then the spec's terms.  Models built from published
    coefficients (no data) carry NaN inference fields and ``n = 0``.
    """

    spec: ModelSpec
    coef: np.ndarray
    se: np.ndarray
    t: np.ndarray
    p: np.ndarray
    r2: float
    r2_adj: float
    rss: float
    n: int
    dof: int
    cov: np.ndarray
    data_fingerprint: str | None = None

    @property
    def labels(self) -> list[str]:
        out = ["(intercept)"] if self.spec.intercept else []
        out.extend(term.label for term in self.spec.terms)
        return out

    def term_index(self, term) -> int:
        """Position of a term's coefficient in ``coef``."""
        offset = 1 if self.spec.intercept else 0
        for i, candidate in enumerate(self.spec.terms):
            if candidate == term:
                return offset + i
        raise KeyError(f"term {term.label!r} not in model")

    def coefficient(self, term) -> float:
        return float(self.coef[self.term_index(term)])

    @property
    def intercept_value(self) -> float:
        return float(self.coef[0]) if self.spec.intercept else 0.0

    @classmethod
    def from_coefficients(cls, spec: ModelSpec, coef) -> "FittedModel":
        """Wrap externally supplied (e.g. published) coefficients.

        Inference quantities are unavailable and set to NaN.
        """
        coef = np.asarray(coef, dtype=float)
        p = spec.n_parameters
        if coef.shape != (p,):
            raise AssignmentError(
                f"expected {p} coefficients for this model, got {coef.size}"
            )
        nan_vec = np.full(p, np.nan)
        return cls(
            spec=spec,
            coef=coef,
            se=nan_vec,
            t=nan_vec.copy(),
            p=nan_vec.copy(),
            r2=math.nan,
            r2_adj=math.nan,
            rss=math.nan,
            n=0,
            dof=0,
            cov=np.full((p, p), np.nan),
            data_fingerprint=None,
        )


def _fingerprint(d: Dataset, response: str) -> str:
    digest = hashlib.sha1()
    digest.update(response.encode())
    digest.update(str(d.n).encode())
    digest.update(d.column(response).tobytes())
    return digest.hexdigest()


def fit(d: Dataset, spec: ModelSpec, allow_saturated: bool = False) -> FittedModel:
    """Fit a model by least squares.

    Parameters
    ----------
    d : Dataset
    spec : ModelSpec
        Response and term list; the response column must exist in ``d``.
    allow_saturated : bool
        Permit dof = 0 (exact fit).  Inference (se/t/p, adjusted R^2) is
        suppressed to NaN in that case.

    Raises
    ------
    CollinearityError
        Rank-deficient design, naming a dependent column.
    SaturatedModelError
        dof < 1 without ``allow_saturated`` (or dof < 0 always).
    """
    y = d.column(spec.response)
    X, labels = expand(d, spec)
    n, p = X.shape
    dof = n - p
    if dof < 1 and not (allow_saturated and dof == 0):
        raise SaturatedModelError(
            f"model has {p} parameters for {n} observations (dof={dof});"
            " pass allow_saturated=True to permit an exact fit"
        )

    q, r, perm = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0.0:
        raise CollinearityError("design matrix is zero", column=labels[perm[0]])
    bad = np.nonzero(diag < RANK_TOLERANCE * diag[0])[0]
    if bad.size:
        raise CollinearityError(
            "design matrix is rank deficient", column=labels[perm[bad[0]]]
        )

    z = scipy.linalg.solve_triangular(r, q.T @ y)
    coef = np.empty(p)
    coef[perm] = z

    resid = y - X @ coef
    rss = float(resid @ resid)

    # (X'X)^{-1} from R: permute (R'R)^{-1} back to original column order.
    r_inv = scipy.linalg.solve_triangular(r, np.eye(p))
    unscaled = r_inv @ r_inv.T
    cov_unscaled = np.empty((p, p))
    cov_unscaled[np.ix_(perm, perm)] = unscaled

    if spec.intercept:
        tss = float(((y - y.mean()) ** 2).sum())
    else:
        tss = float((y**2).sum())
    if tss > 0.0:
        r2 = 1.0 - rss / tss
        if spec.intercept:
            r2 = min(1.0, max(0.0, r2))
    else:
        # constant response: an exact fit explains it fully
        r2 = 1.0 if rss <= 1e-12 else 0.0

    if dof > 0:
        sigma2 = rss / dof
        cov = sigma2 * cov_unscaled
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(se > 0.0, coef / se, np.inf * np.sign(coef))
        pvals = np.array([student_t_two_sided_p(float(tv), dof) for tv in t])
        r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p)
    else:
        cov = np.full((p, p), np.nan)
        se = np.full(p, np.nan)
        t = np.full(p, np.nan)
        pvals = np.full(p, np.nan)
        r2_adj = math.nan

    for arr in (coef, se, t, pvals, cov):
        arr.flags.writeable = False
    return FittedModel(
        spec=spec,
        coef=coef,
        se=se,
        t=t,
        p=pvals,
        r2=float(r2),
        r2_adj=float(r2_adj),
        rss=rss,
        n=n,
        dof=dof,
        cov=cov,
        data_fingerprint=_fingerprint(d, spec.response),
    )


def predict(m: FittedModel, point: Mapping[str, float]) -> float:
    """Model prediction at one predictor assignment."""
    missing = [name for name in m.spec.predictors if name not in point]
    if missing:
        raise AssignmentError(f"assignment missing predictors: {missing}")
    value = m.intercept_value
    offset = 1 if m.spec.intercept else 0
    for i, term in enumerate(m.spec.terms):
        value += float(m.coef[offset + i]) * term.value_at(point)
    return value


@dataclass(frozen=True)
class NestedComparison:
    """Fit change from a smaller model m1 to a larger model m2."""

    delta_r2: float
    delta_rss: float
    delta_dof: int
    r2_small: float
    r2_large: float


def compare(m1: FittedModel, m2: FittedModel) -> NestedComparison:
    """Nested-model report: requires m1's spec to nest inside m2's.

    Both models must be fits of the same response on the same data.
    """
    if m1.spec.response != m2.spec.response:
        raise NestingError(
            f"different responses: {m1.spec.response!r} vs {m2.spec.response!r}"
        )
    if m1.n != m2.n:
        raise NestingError(f"different sample sizes: {m1.n} vs {m2.n}")
    if (
        m1.data_fingerprint is not None
        and m2.data_fingerprint is not None
        and m1.data_fingerprint != m2.data_fingerprint
    ):
        raise NestingError("models were fitted on different data")
    if m1.spec.intercept and not m2.spec.intercept:
        raise NestingError("smaller model has an intercept the larger lacks")
    small = set(m1.spec.terms)
    large = set(m2.spec.terms)
    if not small <= large:
        extra = sorted(t.label for t in small - large)
        raise NestingError(f"models are not nested; extra terms in m1: {extra}")
    return NestedComparison(
        delta_r2=m2.r2 - m1.r2,
        delta_rss=m1.rss - m2.rss,
        delta_dof=m1.dof - m2.dof,
        r2_small=m1.r2,
        r2_large=m2.r2,
    )
