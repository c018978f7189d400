"""The named shrinkage estimators, expressed through generalized forms.

Every sample-information estimator is a matrix ``G`` applied to the ordinary
least squares solution in spectral canonical coordinates; every stochastic
restricted estimator is a matrix ``G*`` applied to the mixed regression
estimator in simultaneous canonical coordinates. The two optimal estimators
(SIOE, SROE) have dedicated paths in :mod:`shrinkreg.optimal`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canon import CanonicalModel, RestrictedCanonicalModel
from .exceptions import ConfigError

SPECTRAL_KINDS = ("RE", "AURE", "LE", "AULE", "PCRE", "RK", "RD")
RESTRICTED_KINDS = ("SRRE", "SRAURE", "SRLE", "SRAULE", "SRPCRE", "SRRK", "SRRD")
BASE_KINDS = ("OLSE", "MRE")
OPTIMAL_KINDS = ("SIOE", "SROE")
ALL_KINDS = BASE_KINDS + SPECTRAL_KINDS + RESTRICTED_KINDS + OPTIMAL_KINDS

_NEEDS_K = frozenset({"RE", "AURE", "RK", "SRRE", "SRAURE", "SRRK"})
_NEEDS_D = frozenset({"LE", "AULE", "RD", "SRLE", "SRAULE", "SRRD"})
_NEEDS_H = frozenset({"PCRE", "RK", "RD", "SRPCRE", "SRRK", "SRRD"})

# Aliases accepted on input (CLI, config files).
_ALIASES = {
    "OLS": "OLSE",
    "RIDGE": "RE",
    "LIU": "LE",
    "R-K": "RK",
    "R-D": "RD",
    "SRR-K": "SRRK",
    "SRR-D": "SRRD",
    "SRRK": "SRRK",
    "SRRD": "SRRD",
}


def canonical_kind(name: str) -> str:
    """Normalize an estimator name to its canonical uppercase kind."""
    kind = str(name).strip().upper().replace("_", "")
    kind = _ALIASES.get(kind, kind)
    if kind not in ALL_KINDS:
        raise ConfigError(f"unknown estimator kind {name!r}")
    return kind


@dataclass(frozen=True)
class EstimatorSpec:
    """An estimator kind plus whatever shrinkage parameters it requires.

    ``k`` is the ridge parameter (> 0), ``d`` the Liu parameter (in (0, 1];
    d = 1 degenerates to the base estimator), and ``h`` the retained
    principal component count for the component-selection kinds.
    """

    kind: str
    k: float | None = None
    d: float | None = None
    h: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.kind in _NEEDS_K:
            if self.k is None:
                raise ConfigError(f"{self.kind} requires the ridge parameter k")
            if not self.k > 0:
                raise ConfigError("ridge parameter k must be positive")
        if self.kind in _NEEDS_D:
            if self.d is None:
                raise ConfigError(f"{self.kind} requires the Liu parameter d")
            if not 0 < self.d <= 1:
                raise ConfigError("Liu parameter d must lie in (0, 1]")
        if self.kind in _NEEDS_H:
            if self.h is None:
                raise ConfigError(f"{self.kind} requires the component count h")
            if int(self.h) != self.h or self.h < 1:
                raise ConfigError("component count h must be a positive integer")
            object.__setattr__(self, "h", int(self.h))

    @property
    def family(self) -> str:
        """'spectral' for sample-information kinds, 'restricted' otherwise."""
        if self.kind in ("OLSE", "SIOE") or self.kind in SPECTRAL_KINDS:
            return "spectral"
        return "restricted"


@dataclass(frozen=True)
class CoefficientEstimate:
    """A canonical-space estimate paired with its original-space counterpart."""

    gamma_hat: np.ndarray
    beta_hat: np.ndarray
    spec: EstimatorSpec


def ols(cm: CanonicalModel) -> np.ndarray:
    """Ordinary least squares in spectral canonical coordinates: Lam^-1 Z'y."""
    return (cm.Z.T @ cm.y) / cm.eigenvalues


def mre(rcm: RestrictedCanonicalModel, convention: str = "paper") -> np.ndarray:
    """Mixed regression estimator in simultaneous canonical coordinates.

    Parameters
    ----------
    rcm : RestrictedCanonicalModel
    convention : {'paper', 'definitional'}
        'paper' evaluates the canonical closed form
        ``(I + sigma2 Lam*)^-1 (Z*'y + R*'W^-1 r)`` directly; 'definitional'
        solves the stacked generalized least squares problem on the
        untransformed data and maps the solution through B. The two agree to
        machine precision and the flag exists for auditability.
    """
    res = rcm.restriction
    if convention == "paper":
        rhs = rcm.Z_star.T @ rcm.y + rcm.R_star.T @ np.linalg.solve(res.W, res.r)
        return rhs / (1.0 + rcm.sigma2 * rcm.eigenvalues)
    if convention == "definitional":
        B_inv = np.linalg.inv(rcm.B)
        X1 = rcm.Z_star @ B_inv
        R = rcm.R_star @ B_inv
        W_inv_R = np.linalg.solve(res.W, R)
        lhs = X1.T @ X1 + R.T @ W_inv_R
        rhs = X1.T @ rcm.y + R.T @ np.linalg.solve(res.W, res.r)
        return np.linalg.solve(rcm.B, np.linalg.solve(lhs, rhs))
    raise ConfigError(f"unknown MRE convention {convention!r}")


def shrinkage_matrix(spec: EstimatorSpec, cm: CanonicalModel) -> np.ndarray:
    """The l x l shrinkage matrix G (spectral family) or G* (restricted family).

    The restricted-family forms are scalar multiples of the identity or of the
    leading-eigenvector projector ``T_h T_h'``, so only the spectral canonical
    model is needed to build them. OLSE/MRE/SIOE/SROE have dedicated paths and
    are rejected here.
    """
    kind = spec.kind
    if kind in BASE_KINDS or kind in OPTIMAL_KINDS:
        raise ConfigError(f"{kind} has a dedicated path; no shrinkage matrix form")
    lam = cm.eigenvalues
    l = cm.l
    if kind == "RE":
        return np.diag(lam / (lam + spec.k))
    if kind == "AURE":
        return np.diag(1.0 - spec.k**2 / (lam + spec.k) ** 2)
    if kind == "LE":
        return np.diag((lam + spec.d) / (lam + 1.0))
    if kind == "AULE":
        return np.diag(1.0 - (1.0 - spec.d) ** 2 / (lam + 1.0) ** 2)
    if kind in _NEEDS_H and spec.h > l:
        raise ConfigError(f"h={spec.h} exceeds the number of retained components {l}")
    proj = cm.T_h(spec.h) @ cm.T_h(spec.h).T if kind in _NEEDS_H else None
    if kind == "PCRE":
        return proj
    if kind == "RK":
        return proj @ np.diag(lam / (lam + spec.k))
    if kind == "RD":
        return proj @ np.diag((lam + spec.d) / (lam + 1.0))
    if kind == "SRRE":
        return np.eye(l) / (1.0 + spec.k)
    if kind == "SRAURE":
        return np.eye(l) * (1.0 + 2.0 * spec.k) / (1.0 + spec.k) ** 2
    if kind == "SRLE":
        return np.eye(l) * (1.0 + spec.d) / 2.0
    if kind == "SRAULE":
        return np.eye(l) * (1.0 + spec.d) * (3.0 - spec.d) / 4.0
    if kind == "SRPCRE":
        return proj
    if kind == "SRRK":
        return proj / (1.0 + spec.k)
    if kind == "SRRD":
        return proj * (1.0 + spec.d) / 2.0
    raise ConfigError(f"unknown estimator kind {kind!r}")  # pragma: no cover


def estimate(
    spec: EstimatorSpec,
    cm: CanonicalModel,
    rcm: RestrictedCanonicalModel | None = None,
    anchor: np.ndarray | None = None,
    convention: str = "paper",
) -> CoefficientEstimate:
    """Evaluate any named estimator on a canonical model.

    Restricted-family kinds require ``rcm``; the optimal kinds additionally
    require an ``anchor`` coefficient vector (in original beta1 coordinates)
    and dispatch to :mod:`shrinkreg.optimal`.
    """
    kind = spec.kind
    if kind in OPTIMAL_KINDS:
        from . import optimal  # deferred to avoid a cycle

        if anchor is None:
            raise ConfigError(f"{kind} requires an anchor coefficient vector")
        if kind == "SIOE":
            return optimal.sioe(cm, anchor)
        if rcm is None:
            raise ConfigError("SROE requires a restricted canonical model")
        return optimal.sroe(rcm, anchor, convention=convention)
    if kind == "OLSE":
        gamma_hat = ols(cm)
        return CoefficientEstimate(gamma_hat, cm.T @ gamma_hat, spec)
    if kind in SPECTRAL_KINDS:
        gamma_hat = shrinkage_matrix(spec, cm) @ ols(cm)
        return CoefficientEstimate(gamma_hat, cm.T @ gamma_hat, spec)
    if rcm is None:
        raise ConfigError(f"{kind} requires a restricted canonical model")
    base = mre(rcm, convention=convention)
    if kind == "MRE":
        return CoefficientEstimate(base, rcm.B @ base, spec)
    gamma_hat = shrinkage_matrix(spec, cm) @ base
    return CoefficientEstimate(gamma_hat, rcm.B @ gamma_hat, spec)
