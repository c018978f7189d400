"""Optimal shrinkage: the matrix minimizing scalar risk, and the two
estimators built on it.

The scalar risk of ``G`` applied to a base estimate with mean
``w = gamma_tilde + tau A`` and covariance ``sigma2 tau`` is quadratic in G,
so its stationary point is available in closed form:

    G_opt = (w gamma' + gamma w') / 2 @ (sigma2 tau + w w')^-1

Applied to the least squares base this yields the sample-information optimal
estimator (SIOE); applied to the mixed regression base it yields the
stochastic restricted optimal estimator (SROE). The anchor vector standing in
for the unknown coefficients is a caller decision; the classical choice is the
Newhouse-Oman eigenvector of the standardized design.
"""

from __future__ import annotations

import warnings

import numpy as np

from .canon import CanonicalModel, RestrictedCanonicalModel, _descending_eigh
from .estimators import CoefficientEstimate, EstimatorSpec, mre, ols
from .risk import RiskContext, restricted_context, spectral_context

# The optimal-estimator context is the same record the risk engine uses.
OptimalContext = RiskContext


def smse_gradient(G: np.ndarray, ctx: OptimalContext) -> np.ndarray:
    """Gradient of the scalar risk with respect to the shrinkage matrix.

    Equals ``2 G (sigma2 tau + w w') - w gamma' - gamma w'`` with
    ``w = gamma_tilde + tau A``; it vanishes exactly at the optimal matrix.
    """
    w = ctx.shifted_mean
    g = ctx.gamma_tilde
    return 2.0 * G @ (ctx.sigma2 * ctx.tau + np.outer(w, w)) - np.outer(w, g) - np.outer(g, w)


def optimal_shrinkage(ctx: OptimalContext) -> np.ndarray:
    """The shrinkage matrix minimizing scalar risk for the given context.

    The coefficient matrix ``sigma2 tau + w w'`` is positive definite (tau is
    PD and the outer product is PSD), so the stationary point is computed with
    a symmetric linear solve rather than an explicit inverse.
    """
    w = ctx.shifted_mean
    g = ctx.gamma_tilde
    numerator = (np.outer(w, g) + np.outer(g, w)) / 2.0
    S = ctx.sigma2 * ctx.tau + np.outer(w, w)
    # G_opt = numerator @ S^-1 with S symmetric: solve S X = numerator'.
    return np.linalg.solve(S, numerator.T).T


def sioe(cm: CanonicalModel, anchor: np.ndarray) -> CoefficientEstimate:
    """Sample information optimal estimator.

    ``anchor`` is the plug-in coefficient vector in original (beta1)
    coordinates; it is transported to the eigenbasis and used both in the
    optimal matrix and nowhere else, so passing the true coefficients yields
    the exact risk minimizer.
    """
    anchor = np.asarray(anchor, dtype=float)
    if anchor.shape != (cm.l,):
        raise ValueError(f"anchor must have length {cm.l}")
    ctx = RiskContext(
        gamma_tilde=cm.T.T @ anchor,
        tau=np.diag(1.0 / cm.eigenvalues),
        A=cm.Z.T @ cm.delta,
        sigma2=cm.sigma2,
        mode="spectral",
    )
    gamma_hat = optimal_shrinkage(ctx) @ ols(cm)
    return CoefficientEstimate(gamma_hat, cm.T @ gamma_hat, EstimatorSpec("SIOE"))


def sroe(
    rcm: RestrictedCanonicalModel,
    anchor: np.ndarray,
    convention: str = "paper",
) -> CoefficientEstimate:
    """Stochastic restricted optimal estimator.

    Same construction as :func:`sioe` but anchored in the simultaneous
    canonical coordinates and applied to the mixed regression base.
    """
    anchor = np.asarray(anchor, dtype=float)
    if anchor.shape != (rcm.l,):
        raise ValueError(f"anchor must have length {rcm.l}")
    res = rcm.restriction
    ctx = RiskContext(
        gamma_tilde=np.linalg.solve(rcm.B, anchor),
        tau=np.diag(1.0 / (1.0 + rcm.sigma2 * rcm.eigenvalues)),
        A=rcm.Z_star.T @ rcm.delta + rcm.R_star.T @ np.linalg.solve(res.W, res.g),
        sigma2=rcm.sigma2,
        mode="restricted",
    )
    gamma_hat = optimal_shrinkage(ctx) @ mre(rcm, convention=convention)
    return CoefficientEstimate(gamma_hat, rcm.B @ gamma_hat, EstimatorSpec("SROE"))


def sioe_context(cm: CanonicalModel, anchor: np.ndarray, misspecified: bool = True) -> RiskContext:
    """Risk context with the anchor substituted for the unknown coefficients."""
    base = spectral_context(cm, misspecified=misspecified)
    return RiskContext(
        gamma_tilde=cm.T.T @ np.asarray(anchor, dtype=float),
        tau=base.tau,
        A=base.A,
        sigma2=base.sigma2,
        mode="spectral",
    )


def sroe_context(
    rcm: RestrictedCanonicalModel, anchor: np.ndarray, misspecified: bool = True
) -> RiskContext:
    """Restricted-family analogue of :func:`sioe_context`."""
    base = restricted_context(rcm, misspecified=misspecified)
    return RiskContext(
        gamma_tilde=np.linalg.solve(rcm.B, np.asarray(anchor, dtype=float)),
        tau=base.tau,
        A=base.A,
        sigma2=base.sigma2,
        mode="restricted",
    )


def newhouse_oman_anchor(X: np.ndarray) -> np.ndarray:
    """Unit-norm eigenvector of X'X for the largest eigenvalue.

    Intended for a standardized (correlation-form) design; the sign follows
    the package-wide largest-entry-positive convention. A repeated largest
    eigenvalue makes the direction non-unique; the deterministic first
    eigenvector is returned and a warning is emitted.
    """
    X = np.asarray(X, dtype=float)
    vals, vecs = _descending_eigh(X.T @ X)
    if vals.shape[0] > 1 and vals[0] - vals[1] <= 1e-10 * max(1.0, vals[0]):
        warnings.warn(
            "largest eigenvalue is repeated; anchor direction is not unique",
            stacklevel=2,
        )
    v = vecs[:, 0]
    return v / np.linalg.norm(v)
