"""Standardization, collinearity diagnostics, and canonical transforms.

Everything downstream (estimators, risk, dominance, simulation) works in one
of two canonical coordinate systems of the retained design block:

* the *spectral* form, which diagonalizes ``X1'X1`` with an orthogonal matrix,
  and
* the *simultaneous* form, which jointly reduces ``X1'X1`` to the identity and
  the restriction cross-product ``R' Psi^-1 R`` to a diagonal matrix.

This module owns both transforms, the correlation-form standardization used
before anchor selection, and the VIF collinearity diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DataError, NumericalError

# Eigenvalue ratio below which a symmetric matrix is treated as rank-deficient.
RANK_TOL = 1e-12


def _as_float_array(a, name: str, ndim: int) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    if out.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {out.shape}")
    return out


def _fix_eigenvector_signs(V: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so the largest-magnitude entry is positive.

    Makes decompositions reproducible across BLAS implementations; ties on
    the magnitude are broken by the first occurrence.
    """
    V = V.copy()
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _descending_eigh(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Ties keep the order produced by the underlying solver (first occurrence),
    and eigenvector signs follow the largest-entry-positive convention.
    """
    vals, vecs = np.linalg.eigh((S + S.T) / 2.0)
    order = np.argsort(-vals, kind="stable")
    return vals[order], _fix_eigenvector_signs(vecs[:, order])


@dataclass(frozen=True)
class PartitionedModel:
    """A regression design split into a retained block and an excluded block.

    Parameters
    ----------
    y : ndarray, shape (n,)
        Response vector.
    X1 : ndarray, shape (n, l)
        Retained regressors; must have full column rank.
    X2 : ndarray, shape (n, p)
        Excluded regressors (p may be 0 for a correctly specified model).
    beta1, beta2 : ndarray
        Coefficients attached to the retained and excluded blocks. In
        simulation these are ground truth; in data analysis they are the
        plug-in values used by the risk formulas.
    sigma2 : float
        Error variance (> 0).
    """

    y: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "y", _as_float_array(self.y, "y", 1))
        object.__setattr__(self, "X1", _as_float_array(self.X1, "X1", 2))
        object.__setattr__(self, "X2", _as_float_array(self.X2, "X2", 2))
        object.__setattr__(self, "beta1", _as_float_array(self.beta1, "beta1", 1))
        object.__setattr__(self, "beta2", _as_float_array(self.beta2, "beta2", 1))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        n, l = self.X1.shape
        if not n > l >= 1:
            raise ValueError(f"need n > l >= 1, got n={n}, l={l}")
        if self.X2.shape[0] not in (n, 0) or (self.X2.size and self.X2.shape[0] != n):
            raise ValueError("X2 must have the same number of rows as X1")
        if self.beta1.shape[0] != l:
            raise ValueError("beta1 length must match X1 column count")
        if self.beta2.shape[0] != self.X2.shape[1]:
            raise ValueError("beta2 length must match X2 column count")
        if self.y.shape[0] != n:
            raise ValueError("y length must match design rows")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        vals = np.linalg.eigvalsh(self.X1.T @ self.X1)
        if vals[0] < RANK_TOL * vals[-1] or vals[-1] <= 0:
            raise NumericalError("X1 is rank-deficient; X1'X1 must be positive definite")

    @property
    def n(self) -> int:
        return self.X1.shape[0]

    @property
    def l(self) -> int:
        return self.X1.shape[1]

    @property
    def p(self) -> int:
        return self.X2.shape[1]

    @property
    def m(self) -> int:
        return self.l + self.p

    @property
    def delta(self) -> np.ndarray:
        """Misspecification shift in the mean of y: X2 @ beta2 (zero if p = 0)."""
        if self.p == 0:
            return np.zeros(self.n)
        return self.X2 @ self.beta2


@dataclass(frozen=True)
class CanonicalModel:
    """Spectral canonical form of the retained model.

    ``T' X1'X1 T = diag(eigenvalues)`` with T orthogonal, ``Z = X1 T``,
    ``gamma = T' beta1``, and ``delta = X2 beta2``.
    """

    T: np.ndarray
    eigenvalues: np.ndarray
    Z: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    sigma2: float
    y: np.ndarray

    def __post_init__(self):
        l = self.T.shape[0]
        if np.max(np.abs(self.T.T @ self.T - np.eye(l))) >= 1e-10:
            raise NumericalError("T is not orthogonal to tolerance 1e-10")
        if np.any(self.eigenvalues <= 0):
            raise NumericalError("all canonical eigenvalues must be positive")
        gram = self.Z.T @ self.Z
        scale = max(1.0, float(self.eigenvalues[0]))
        if np.max(np.abs(gram - np.diag(self.eigenvalues))) >= 1e-8 * scale:
            raise NumericalError("Z'Z does not match the eigenvalue diagonal")

    @property
    def l(self) -> int:
        return self.T.shape[0]

    def T_h(self, h: int) -> np.ndarray:
        """First h eigenvector columns (leading principal components)."""
        if not 1 <= h <= self.l:
            raise ConfigError(f"h must be in [1, {self.l}], got {h}")
        return self.T[:, :h]


@dataclass(frozen=True)
class RestrictionSpec:
    """Stochastic linear restriction r = R beta1 + g + v, Var(v) = sigma2 * W."""

    r: np.ndarray
    R: np.ndarray
    W: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _as_float_array(self.r, "r", 1))
        object.__setattr__(self, "R", _as_float_array(self.R, "R", 2))
        object.__setattr__(self, "W", _as_float_array(self.W, "W", 2))
        object.__setattr__(self, "g", _as_float_array(self.g, "g", 1))
        q = self.R.shape[0]
        if q < 1:
            raise ValueError("restriction matrix must have at least one row")
        if self.r.shape[0] != q or self.g.shape[0] != q:
            raise ValueError("r and g must have one entry per restriction row")
        if self.W.shape != (q, q):
            raise ValueError("W must be q x q")
        if np.max(np.abs(self.W - self.W.T)) > 1e-10:
            raise ConfigError("restriction dispersion W must be symmetric")
        if np.linalg.eigvalsh(self.W)[0] <= 0:
            raise ConfigError("restriction dispersion W must be positive definite")
        if np.linalg.matrix_rank(self.R) != q:
            raise ConfigError("restriction matrix R must have full row rank")

    @property
    def q(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class RestrictedCanonicalModel:
    """Simultaneous-decomposition form of the retained model plus restriction.

    ``B' X1'X1 B = I`` and ``B' R' Psi^-1 R B = diag(eigenvalues)`` with
    ``Psi = sigma2 * W``; exactly q of the eigenvalues are positive, the
    remaining l - q are zero. ``Z_star = X1 B``, ``R_star = R B``, and
    ``gamma_star = B^-1 beta1``.
    """

    B: np.ndarray
    eigenvalues: np.ndarray
    Z_star: np.ndarray
    R_star: np.ndarray
    gamma_star: np.ndarray
    restriction: RestrictionSpec
    delta: np.ndarray
    sigma2: float
    y: np.ndarray

    def __post_init__(self):
        l = self.B.shape[0]
        gram = self.Z_star.T @ self.Z_star
        if np.max(np.abs(gram - np.eye(l))) >= 1e-8:
            raise NumericalError("B'X1'X1B deviates from the identity beyond 1e-8")
        psi = self.sigma2 * self.restriction.W
        cross = self.R_star.T @ np.linalg.solve(psi, self.R_star)
        off = cross - np.diag(np.diag(cross))
        diag_norm = max(1.0, float(np.linalg.norm(np.diag(cross))))
        if np.max(np.abs(off)) >= 1e-8 * diag_norm:
            raise NumericalError("B'R'Psi^-1RB is not diagonal to tolerance")
        q = self.restriction.q
        if int(np.count_nonzero(self.eigenvalues > 0)) != q:
            raise NumericalError(
                f"expected exactly {q} positive restriction eigenvalues"
            )

    @property
    def l(self) -> int:
        return self.B.shape[0]


@dataclass(frozen=True)
class Standardized:
    """Correlation-form standardization of a design plus centered response.

    Each design column of ``X`` is centered and scaled so its sum of squared
    deviations is one; ``y`` is centered but not scaled. The stored factors
    allow mapping coefficients back to the raw scale.
    """

    X: np.ndarray
    y: np.ndarray
    x_center: np.ndarray
    x_scale: np.ndarray
    y_center: float

    def coefficients_in_raw_scale(self, beta_std: np.ndarray) -> tuple[np.ndarray, float]:
        """Map standardized-scale coefficients back to raw units.

        Returns the raw slope vector and the implied intercept.
        """
        beta_raw = np.asarray(beta_std, dtype=float) / self.x_scale
        intercept = self.y_center - float(self.x_center @ beta_raw)
        return beta_raw, intercept


def standardize(X: np.ndarray, y: np.ndarray) -> Standardized:
    """Center and unit-length-scale the regressors; center the response.

    After the transform ``X'X`` equals the sample correlation matrix of the
    raw columns. The operation is idempotent on the design block.

    Raises
    ------
    DataError
        If any column has zero sample variance.
    """
    X = _as_float_array(X, "X", 2)
    y = _as_float_array(y, "y", 1)
    n = X.shape[0]
    if n < 2:
        raise DataError("standardization needs at least two rows")
    if y.shape[0] != n:
        raise DataError("X and y row counts differ")
    center = X.mean(axis=0)
    centered = X - center
    scale = np.sqrt(np.sum(centered**2, axis=0))
    if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
        bad = int(np.argmin(scale))
        raise DataError(f"zero-variance regressor (column {bad})")
    return Standardized(
        X=centered / scale,
        y=y - y.mean(),
        x_center=center,
        x_scale=scale,
        y_center=float(y.mean()),
    )


def vif(X: np.ndarray) -> np.ndarray:
    """Variance inflation factors, one per design column.

    ``VIF_j = 1 / (1 - R2_j)`` where ``R2_j`` comes from regressing column j
    (with intercept) on the remaining columns. Invariant under rescaling of
    any column.

    Raises
    ------
    NumericalError
        On exact linear dependence among the columns.
    """
    X = _as_float_array(X, "X", 2)
    n, p = X.shape
    if p < 2:
        raise ValueError("vif needs at least two columns")
    out = np.empty(p)
    for j in range(p):
        xj = X[:, j]
        others = np.column_stack([np.ones(n), np.delete(X, j, axis=1)])
        coef, *_ = np.linalg.lstsq(others, xj, rcond=None)
        resid = xj - others @ coef
        tss = float(np.sum((xj - xj.mean()) ** 2))
        if tss <= 0:
            raise DataError(f"zero-variance regressor (column {j})")
        one_minus_r2 = float(resid @ resid) / tss
        if one_minus_r2 < RANK_TOL:
            raise NumericalError("infinite VIF (exact collinearity)")
        out[j] = 1.0 / one_minus_r2
    return out


def spectral_canonical(model: PartitionedModel) -> CanonicalModel:
    """Spectral canonical form of the retained design block.

    Diagonalizes ``X1'X1 = T diag(eigenvalues) T'`` with eigenvalues sorted
    descending, then transports design, coefficients, and misspecification
    shift into the eigenbasis.
    """
    S = model.X1.T @ model.X1
    vals, T = _descending_eigh(S)
    if vals[-1] < RANK_TOL * vals[0] or vals[-1] <= 0:
        raise NumericalError("X1'X1 is numerically rank-deficient")
    return CanonicalModel(
        T=T,
        eigenvalues=vals,
        Z=model.X1 @ T,
        gamma=T.T @ model.beta1,
        delta=model.delta,
        sigma2=model.sigma2,
        y=model.y,
    )


def simultaneous_canonical(
    model: PartitionedModel, restriction: RestrictionSpec
) -> RestrictedCanonicalModel:
    """Joint reduction of ``X1'X1`` and ``R' Psi^-1 R`` (Psi = sigma2 W).

    Computes the Cholesky factor ``X1'X1 = L L'``, whitens the restriction
    cross-product with ``C = L^-1``, eigendecomposes ``C R'Psi^-1R C' =
    U diag(eigenvalues) U'`` (descending), and returns ``B = C' U``. By
    construction ``B'X1'X1B = I`` and ``B'R'Psi^-1RB`` is diagonal with
    exactly q positive entries.
    """
    if restriction.R.shape[1] != model.l:
        raise ConfigError(
            f"restriction matrix has {restriction.R.shape[1]} columns, "
            f"model retains {model.l} regressors"
        )
    S = model.X1.T @ model.X1
    L = np.linalg.cholesky(S)
    C = np.linalg.inv(L)
    psi = model.sigma2 * restriction.W
    K = restriction.R.T @ np.linalg.solve(psi, restriction.R)
    vals, U = _descending_eigh(C @ K @ C.T)
    # Trailing l - q eigenvalues are zero up to roundoff; clamp them exactly.
    cut = RANK_TOL * max(1.0, float(vals[0]))
    vals = np.where(vals > cut, vals, 0.0)
    B = C.T @ U
    return RestrictedCanonicalModel(
        B=B,
        eigenvalues=vals,
        Z_star=model.X1 @ B,
        R_star=restriction.R @ B,
        gamma_star=np.linalg.solve(B, model.beta1),
        restriction=restriction,
        delta=model.delta,
        sigma2=model.sigma2,
        y=model.y,
    )
