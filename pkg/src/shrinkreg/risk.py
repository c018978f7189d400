"""Exact bias / dispersion / MSEM / SMSE computation.

Both estimator families share one parameterization: an estimator ``G`` applied
to a base whose mean is ``gamma_tilde + tau A`` and whose covariance is
``sigma2 * tau``. For the spectral family ``tau = Lam^-1`` and ``A = Z'delta``;
for the restricted family ``tau = (I + sigma2 Lam*)^-1`` and
``A = Z*'delta + R*'W^-1 g``. The generic path below is the production route;
the per-estimator closed forms are kept verbatim as cross-validation oracles
and are never simplified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .canon import CanonicalModel, RestrictedCanonicalModel
from .estimators import EstimatorSpec
from .exceptions import ConfigError


@dataclass(frozen=True)
class RiskContext:
    """Everything the risk formulas need: (gamma_tilde, tau, A, sigma2)."""

    gamma_tilde: np.ndarray
    tau: np.ndarray
    A: np.ndarray
    sigma2: float
    mode: str = "spectral"  # or "restricted"

    def __post_init__(self):
        object.__setattr__(self, "gamma_tilde", np.asarray(self.gamma_tilde, dtype=float))
        object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        if np.max(np.abs(self.tau - self.tau.T)) > 1e-12:
            raise ValueError("tau must be symmetric")
        if np.linalg.eigvalsh(self.tau)[0] <= 0:
            raise ValueError("tau must be positive definite")
        if self.mode not in ("spectral", "restricted"):
            raise ValueError(f"unknown risk mode {self.mode!r}")

    @property
    def l(self) -> int:
        return self.gamma_tilde.shape[0]

    @property
    def shifted_mean(self) -> np.ndarray:
        """Mean of the base estimate: gamma_tilde + tau A."""
        return self.gamma_tilde + self.tau @ self.A


@dataclass(frozen=True)
class RiskReport:
    """Bias vector, dispersion matrix, MSEM, and its trace for one estimator."""

    bias: np.ndarray
    dispersion: np.ndarray
    msem: np.ndarray
    smse: float


def spectral_context(cm: CanonicalModel, misspecified: bool = True) -> RiskContext:
    """Risk context for the sample-information family.

    With ``misspecified=False`` the omitted-variable shift is dropped (A = 0),
    which is the correctly specified case.
    """
    A = cm.Z.T @ cm.delta if misspecified else np.zeros(cm.l)
    return RiskContext(
        gamma_tilde=cm.gamma,
        tau=np.diag(1.0 / cm.eigenvalues),
        A=A,
        sigma2=cm.sigma2,
        mode="spectral",
    )


def restricted_context(
    rcm: RestrictedCanonicalModel, misspecified: bool = True
) -> RiskContext:
    """Risk context for the stochastic restricted family.

    In the misspecified case the shift combines the omitted-variable part
    ``Z*'delta`` with the restriction offset ``R*'W^-1 g``; correctly
    specified means both vanish.
    """
    if misspecified:
        res = rcm.restriction
        A = rcm.Z_star.T @ rcm.delta + rcm.R_star.T @ np.linalg.solve(res.W, res.g)
    else:
        A = np.zeros(rcm.l)
    return RiskContext(
        gamma_tilde=rcm.gamma_star,
        tau=np.diag(1.0 / (1.0 + rcm.sigma2 * rcm.eigenvalues)),
        A=A,
        sigma2=rcm.sigma2,
        mode="restricted",
    )


def bias(G: np.ndarray, ctx: RiskContext) -> np.ndarray:
    """Bias vector G (gamma_tilde + tau A) - gamma_tilde."""
    return G @ ctx.shifted_mean - ctx.gamma_tilde


def dispersion(G: np.ndarray, ctx: RiskContext) -> np.ndarray:
    """Dispersion matrix sigma2 * G tau G'."""
    return ctx.sigma2 * (G @ ctx.tau @ G.T)


def msem(G: np.ndarray, ctx: RiskContext) -> np.ndarray:
    """Mean square error matrix: dispersion plus outer product of the bias."""
    b = bias(G, ctx)
    return dispersion(G, ctx) + np.outer(b, b)


def smse(G: np.ndarray, ctx: RiskContext) -> float:
    """Scalar mean square error, the trace of the MSEM."""
    b = bias(G, ctx)
    return float(ctx.sigma2 * np.trace(G @ ctx.tau @ G.T) + b @ b)


def risk_report(G: np.ndarray, ctx: RiskContext) -> RiskReport:
    """Bias, dispersion, MSEM, and SMSE through the generic path."""
    b = bias(G, ctx)
    D = dispersion(G, ctx)
    M = D + np.outer(b, b)
    return RiskReport(bias=b, dispersion=D, msem=M, smse=float(np.trace(M)))


def _closed_form_spectral(spec, ctx, proj):
    """Literal per-estimator expressions for the sample-information family."""
    lam_mat = np.linalg.inv(ctx.tau)
    tau = ctx.tau
    g = ctx.gamma_tilde
    A = ctx.A
    s2 = ctx.sigma2
    l = ctx.l
    eye = np.eye(l)
    kind = spec.kind
    if kind == "OLSE":
        b = tau @ A
        D = s2 * tau
        return b, D, D + np.outer(b, b)
    if kind == "RE":
        inv_k = np.linalg.inv(lam_mat + spec.k * eye)
        b = inv_k @ (A - spec.k * g)
        D = s2 * inv_k @ inv_k @ lam_mat
        core = s2 * lam_mat + np.outer(A - spec.k * g, A - spec.k * g)
        return b, D, inv_k @ core @ inv_k
    if kind == "AURE":
        inv_k = np.linalg.inv(lam_mat + spec.k * eye)
        inv_k2 = inv_k @ inv_k
        lam_2k = lam_mat + 2.0 * spec.k * eye
        v = lam_2k @ A - spec.k**2 * g
        b = inv_k2 @ v
        D = s2 * inv_k2 @ inv_k2 @ lam_2k @ lam_2k @ lam_mat
        core = s2 * lam_2k @ lam_2k @ lam_mat + np.outer(v, v)
        return b, D, inv_k2 @ core @ inv_k2
    if kind == "LE":
        inv_1 = np.linalg.inv(lam_mat + eye)
        lam_d = lam_mat + spec.d * eye
        v = (eye + spec.d * tau) @ A - (1.0 - spec.d) * g
        b = inv_1 @ v
        D = s2 * inv_1 @ inv_1 @ lam_d @ lam_d @ tau
        core = s2 * lam_d @ lam_d @ tau + np.outer(v, v)
        return b, D, inv_1 @ core @ inv_1
    if kind == "AULE":
        inv_1 = np.linalg.inv(lam_mat + eye)
        inv_12 = inv_1 @ inv_1
        lam_d = lam_mat + spec.d * eye
        lam_2d = lam_mat + (2.0 - spec.d) * eye
        v = lam_2d @ (eye + spec.d * tau) @ A - (1.0 - spec.d) ** 2 * g
        b = inv_12 @ v
        D = s2 * inv_12 @ inv_12 @ lam_d @ lam_d @ lam_2d @ lam_2d @ tau
        core = s2 * lam_d @ lam_d @ lam_2d @ lam_2d @ tau + np.outer(v, v)
        return b, D, inv_12 @ core @ inv_12
    if kind == "PCRE":
        b = (proj - eye) @ g + proj @ tau @ A
        D = s2 * proj @ tau @ proj
        return b, D, D + np.outer(b, b)
    if kind == "RK":
        inv_k = np.linalg.inv(lam_mat + spec.k * eye)
        b = (proj @ inv_k @ lam_mat - eye) @ g + proj @ inv_k @ A
        D = s2 * proj @ inv_k @ inv_k @ lam_mat @ proj
        return b, D, D + np.outer(b, b)
    if kind == "RD":
        inv_1 = np.linalg.inv(lam_mat + eye)
        lam_d = lam_mat + spec.d * eye
        b = (proj @ inv_1 @ lam_d - eye) @ g + proj @ inv_1 @ (eye + spec.d * tau) @ A
        D = s2 * proj @ inv_1 @ inv_1 @ lam_d @ lam_d @ tau @ proj
        return b, D, D + np.outer(b, b)
    raise ConfigError(f"no closed form for kind {kind!r}")


def _closed_form_restricted(spec, ctx, proj):
    """Literal per-estimator expressions for the stochastic restricted family."""
    tau = ctx.tau
    g = ctx.gamma_tilde
    A = ctx.A
    s2 = ctx.sigma2
    eye = np.eye(ctx.l)
    kind = spec.kind
    tau_A = tau @ A
    if kind == "MRE":
        D = s2 * tau
        return tau_A, D, D + np.outer(tau_A, tau_A)
    if kind == "SRRE":
        c = 1.0 / (1.0 + spec.k)
        v = tau_A - spec.k * g
        b = c * v
        D = c**2 * s2 * tau
        return b, D, c**2 * (s2 * tau + np.outer(v, v))
    if kind == "SRAURE":
        c = 1.0 / (1.0 + spec.k) ** 2
        v = (1.0 + 2.0 * spec.k) * tau_A - spec.k**2 * g
        b = c * v
        D = c**2 * (1.0 + 2.0 * spec.k) ** 2 * s2 * tau
        return b, D, c**2 * ((1.0 + 2.0 * spec.k) ** 2 * s2 * tau + np.outer(v, v))
    if kind == "SRLE":
        v = (1.0 + spec.d) * tau_A - (1.0 - spec.d) * g
        b = v / 2.0
        D = (1.0 + spec.d) ** 2 * s2 * tau / 4.0
        return b, D, ((1.0 + spec.d) ** 2 * s2 * tau + np.outer(v, v)) / 4.0
    if kind == "SRAULE":
        v = (1.0 + spec.d) * (3.0 - spec.d) * tau_A - (1.0 - spec.d) ** 2 * g
        b = v / 4.0
        D = (1.0 + spec.d) ** 2 * (3.0 - spec.d) ** 2 * s2 * tau / 16.0
        core = (1.0 + spec.d) ** 2 * (3.0 - spec.d) ** 2 * s2 * tau + np.outer(v, v)
        return b, D, core / 16.0
    if kind == "SRPCRE":
        b = (proj - eye) @ g + proj @ tau_A
        D = s2 * proj @ tau @ proj
        return b, D, D + np.outer(b, b)
    if kind == "SRRK":
        c = 1.0 / (1.0 + spec.k)
        v = (proj - (1.0 + spec.k) * eye) @ g + proj @ tau_A
        b = c * v
        D = c**2 * s2 * proj @ tau @ proj
        return b, D, c**2 * (s2 * proj @ tau @ proj + np.outer(v, v))
    if kind == "SRRD":
        c = (1.0 + spec.d) / 2.0
        v = (proj - (2.0 / (1.0 + spec.d)) * eye) @ g + proj @ tau_A
        b = c * v
        D = c**2 * s2 * proj @ tau @ proj
        return b, D, c**2 * (s2 * proj @ tau @ proj + np.outer(v, v))
    raise ConfigError(f"no closed form for kind {kind!r}")


def closed_form_risk(
    spec: EstimatorSpec, ctx: RiskContext, T_h: np.ndarray | None = None
) -> RiskReport:
    """Per-estimator closed-form risk, used to cross-validate the generic path.

    ``T_h`` (the leading eigenvector block) must be supplied for the
    component-selection kinds since the context alone cannot reconstruct it.
    The expressions are transcribed term by term from the published tables;
    the only departure is reading the trailing projector factor in the
    dispersion rows as ``T_h T_h'`` (the dimensionally consistent form).

    Raises
    ------
    ConfigError
        For SIOE/SROE, which have no closed form; use the generic path.
    """
    kind = spec.kind
    if kind in ("SIOE", "SROE"):
        raise ConfigError("no closed form; use the generic path")
    proj = None
    if kind in ("PCRE", "RK", "RD", "SRPCRE", "SRRK", "SRRD"):
        if T_h is None:
            raise ConfigError(f"{kind} closed form needs the eigenvector block T_h")
        T_h = np.asarray(T_h, dtype=float)
        proj = T_h @ T_h.T
    if kind == "OLSE" or kind in ("RE", "AURE", "LE", "AULE", "PCRE", "RK", "RD"):
        b, D, M = _closed_form_spectral(spec, ctx, proj)
    else:
        b, D, M = _closed_form_restricted(spec, ctx, proj)
    return RiskReport(bias=b, dispersion=D, msem=M, smse=float(np.trace(M)))
