"""Symmetric tridiagonal matrices and their extreme eigenpairs.

Eigenvalues are located by bisection on the Sturm count (the number of
negative pivots of the LDL^T factorization of ``T - x I``), bracketed by
Gershgorin bounds.  Perron vectors of matrices with positive off-diagonal come from a
two-sided (twisted) elimination that keeps every component relatively
accurate; other eigenvectors come from inverse iteration with a fixed
all-ones start.  Identical inputs always give identical outputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from .families import FamilyError, FamilySpec, evaluate_all, recurrence_arrays

EPS = np.finfo(float).eps
INVERSE_ITERATIONS = 4
MAX_BISECTIONS = 400
RESIDUAL_REL_TOL = 1e-10


class EigenSolverError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SymTridiag:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or len(d) < 1 or len(e) != len(d) - 1:
            raise ValueError("need diag of length m >= 1 and offdiag of length m-1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("non-finite matrix entries")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return len(self.diag)

    def inf_norm(self) -> float:
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def gershgorin(self) -> tuple:
        r = np.zeros(self.size)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float((self.diag - r).min()), float((self.diag + r).max())

    def leading(self, k: int) -> "SymTridiag":
        """Leading principal (k+1)x(k+1) block."""
        return SymTridiag(self.diag[: k + 1], self.offdiag[:k])

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def default_tol(self) -> float:
        """Bisection width: a few ulps of the spectral radius."""
        return 4 * EPS * max(1.0, self.inf_norm())

    def residual_tol(self) -> float:
        return RESIDUAL_REL_TOL * max(1.0, self.inf_norm())


@dataclass(frozen=True)
class SpectralResult:
    lambda_max: float
    eigenvector: np.ndarray
    residual: float
    iterations: int


def sturm_count(T: SymTridiag, x) -> np.ndarray:
    """Number of eigenvalues of ``T`` strictly below each pivot in ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e2 = T.offdiag ** 2
    tiny = EPS * max(1.0, T.inf_norm())
    count = np.zeros(x.shape, dtype=int)
    d = T.diag[0] - x
    for i in range(T.size):
        if i:
            d = (T.diag[i] - x) - e2[i - 1] / d
        d = np.where(np.abs(d) < tiny, -tiny, d)
        count += d < 0
    return count


def _bisect_index(T: SymTridiag, j: np.ndarray, tol: float) -> np.ndarray:
    """Eigenvalues with (0-based, ascending) indices ``j`` by bisection."""
    lo_g, hi_g = T.gershgorin()
    lo = np.full(len(j), lo_g - tol)
    hi = np.full(len(j), hi_g + tol)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        # done once every bracket is narrow or cannot shrink further in floats
        if np.all((hi - lo <= tol) | (mid == lo) | (mid == hi)):
            break
        above = sturm_count(T, mid) > j
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    else:
        raise EigenSolverError("bisection did not reach the requested tolerance")
    return 0.5 * (lo + hi)


def eigenvalues(T: SymTridiag, tol: Optional[float] = None) -> np.ndarray:
    """All eigenvalues in ascending order, by Sturm bisection."""
    tol = T.default_tol() if tol is None else tol
    return _bisect_index(T, np.arange(T.size), tol)


def _inverse_iteration(T: SymTridiag, lam: float, tol: float) -> tuple:
    m = T.size
    if m == 1:
        return np.ones(1), abs(T.diag[0] - lam), 0
    ab = np.zeros((3, m))
    ab[0, 1:] = T.offdiag
    ab[1] = T.diag - lam
    ab[2, :-1] = T.offdiag
    v = np.ones(m) / math.sqrt(m)
    res = math.inf
    it = 0
    for it in range(1, INVERSE_ITERATIONS + 1):
        try:
            y = solve_banded((1, 1), ab, v)
        except (LinAlgError, ValueError):
            ab[1] = T.diag - (lam + tol * 1e-3)
            y = solve_banded((1, 1), ab, v)
        if not np.all(np.isfinite(y)):
            break
        v = y / np.linalg.norm(y)
        res = float(np.abs(T.matvec(v) - lam * v).max())
        if res <= tol:
            break
    return v, res, it


def _perron_vector(T: SymTridiag, lam: float) -> Optional[np.ndarray]:
    """Top eigenvector of an irreducible T with positive off-diagonal.

    Eliminates (lam - T) v = 0 from both ends: top-down pivots u_i and
    bottom-up pivots l_i are positive away from the far end, and the two
    halves are joined at the row where the twisted pivot is smallest.
    Every ratio v_i / v_{i+1} is then a positive quantity, so even tiny
    components keep their relative accuracy.  Returns None when a pivot
    turns nonpositive (lam not above every proper leading/trailing block).
    """
    m = T.size
    if m == 1:
        return np.ones(1)
    d, e = lam - T.diag, T.offdiag
    e2 = e * e
    u = np.empty(m)
    l = np.empty(m)
    u[0] = d[0]
    for i in range(1, m):
        u[i] = d[i] - e2[i - 1] / u[i - 1]
    l[m - 1] = d[m - 1]
    for i in range(m - 2, -1, -1):
        l[i] = d[i] - e2[i] / l[i + 1]
    twist = d.copy()
    twist[1:] -= e2 / u[:-1]
    twist[:-1] -= e2 / l[1:]
    # admissible joints: all pivots used on either side must be positive
    ok_top = np.concatenate(([True], np.cumprod(u[:-1] > 0).astype(bool)))
    ok_bot = np.concatenate((np.cumprod((l[1:] > 0)[::-1])[::-1].astype(bool), [True]))
    cand = np.nonzero(ok_top & ok_bot)[0]
    if cand.size == 0:
        return None
    j = int(cand[np.argmin(np.abs(twist[cand]))])
    logv = np.zeros(m)
    for i in range(j - 1, -1, -1):
        logv[i] = logv[i + 1] + math.log(e[i] / u[i])
    for i in range(j + 1, m):
        logv[i] = logv[i - 1] + math.log(e[i - 1] / l[i])
    v = np.exp(logv - logv.max())
    return v / np.linalg.norm(v)


def lambda_max(T: SymTridiag, tol: Optional[float] = None) -> SpectralResult:
    """Largest eigenvalue and its unit eigenvector (sign fixed to positive sum)."""
    tol = T.default_tol() if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = float(_bisect_index(T, np.array([T.size - 1]), tol)[0])
    rtol = max(tol, T.residual_tol())
    v, res, it = None, math.inf, 0
    if np.all(T.offdiag > 0):
        v = _perron_vector(T, lam)
        if v is not None:
            res = float(np.abs(T.matvec(v) - lam * v).max())
    if not res <= rtol:
        v, res, it = _inverse_iteration(T, lam, rtol)
    if not res <= rtol:
        # stalled inverse iteration: take the vector from a full decomposition
        _, vecs = eigh_tridiagonal(T.diag, T.offdiag, select="i",
                                   select_range=(T.size - 1, T.size - 1))
        v = vecs[:, 0]
        res = float(np.abs(T.matvec(v) - lam * v).max())
        if not res <= rtol:
            raise EigenSolverError(f"eigenvector residual {res:.3g} exceeds tolerance {rtol:.3g}")
    if v.sum() < 0:
        v = -v
    return SpectralResult(lam, v, res, it)


def leading_lambda_max(T: SymTridiag, tol: Optional[float] = None) -> np.ndarray:
    """Largest eigenvalue of every leading principal block of ``T``.

    The pivots of the leading (k+1)x(k+1) block are the first k+1 pivots of
    ``T`` itself, so a single sweep per bisection step serves all k.
    """
    tol = T.default_tol() if tol is None else tol
    m = T.size
    e2 = T.offdiag ** 2
    tiny = EPS * max(1.0, T.inf_norm())
    lo_g, hi_g = T.gershgorin()
    lo = np.full(m, lo_g - tol)
    hi = np.full(m, hi_g + tol)
    target = np.arange(1, m + 1)
    for _ in range(MAX_BISECTIONS):
        x = 0.5 * (lo + hi)
        if np.all((hi - lo <= tol) | (x == lo) | (x == hi)):
            break
        count = np.zeros(m, dtype=int)
        d = T.diag[0] - x
        d[np.abs(d) < tiny] = -tiny
        count += d < 0
        for i in range(1, m):
            # only blocks k >= i see pivot i
            di = (T.diag[i] - x[i:]) - e2[i - 1] / d[1:]
            di[np.abs(di) < tiny] = -tiny
            count[i:] += di < 0
            d = di
        above = count >= target
        hi = np.where(above, x, hi)
        lo = np.where(above, lo, x)
    else:
        raise EigenSolverError("bisection did not reach the requested tolerance")
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# family operators
# ---------------------------------------------------------------------------

def _check_k(family: FamilySpec, k: int) -> None:
    if int(k) != k or k < 0:
        raise FamilyError(f"k must be a nonnegative integer, got {k}")
    top = family.max_degree
    if top is not None and k > top:
        raise FamilyError(f"k={k} exceeds the range 0..{top} of {family.label()}")


def build_S(family: FamilySpec, k: int) -> SymTridiag:
    """Matrix of multiplication by P1 compressed to degree <= k."""
    _check_k(family, k)
    co = recurrence_arrays(family, k)
    off = co["a"][:k]
    if np.any(off <= 0):
        raise FamilyError(f"S_{k} of {family.label()} is reducible (nonpositive off-diagonal)")
    return SymTridiag(co["b"], off)


def build_X(family: FamilySpec, k: int) -> SymTridiag:
    """Jacobi matrix: multiplication by x compressed to degree <= k."""
    _check_k(family, k)
    co = recurrence_arrays(family, k)
    return SymTridiag(co["beta"], co["alpha"][:k])


def build_T(family: FamilySpec, k: int, rho: float) -> SymTridiag:
    """S_k with its last diagonal entry lowered by ``rho``."""
    S = build_S(family, k)
    diag = S.diag.copy()
    diag[-1] -= rho
    return SymTridiag(diag, S.offdiag)


@dataclass(frozen=True)
class LemmaBounds:
    lower: float
    upper: float
    applicable: bool
    reason: str = ""


def lemma_lim_bounds(family: FamilySpec, k: int) -> LemmaBounds:
    """Closed-form sandwich for lambda_max(S_k), valid for monotone a_i, b_i.

    lower = max_s (2(s-1) a_{k-s+1} + s b_{k-s+1}) / s over s = 1..k+1 and
    upper = a_{k-1} + max(a_{k-1} + b_{k-1}, b_k).
    """
    _check_k(family, k)
    co = recurrence_arrays(family, k)
    a, b = co["a"], co["b"]
    if k == 0:
        return LemmaBounds(b[0], b[0], True)
    if np.any(np.diff(a[:k]) < 0) or np.any(np.diff(b) < 0):
        return LemmaBounds(math.nan, math.nan, False,
                           f"a_i or b_i not monotone increasing on 0..{k}")
    lower = max((2 * (s - 1) * a[k - s + 1] + s * b[k - s + 1]) / s for s in range(1, k + 2)
                if k - s + 1 >= 0)
    upper = a[k - 1] + max(a[k - 1] + b[k - 1], b[k])
    return LemmaBounds(float(lower), float(upper), True)


def largest_zero(family: FamilySpec, k_plus_1: int, tol: Optional[float] = None) -> float:
    """Largest zero of p_{k+1}, as lambda_max of the Jacobi matrix X_k."""
    if int(k_plus_1) != k_plus_1 or k_plus_1 < 1:
        raise FamilyError("degree of the polynomial must be >= 1")
    X = build_X(family, k_plus_1 - 1)
    tol = X.default_tol() if tol is None else tol
    return float(_bisect_index(X, np.array([X.size - 1]), tol)[0])


def all_zeros(family: FamilySpec, k_plus_1: int, tol: Optional[float] = None) -> np.ndarray:
    if int(k_plus_1) != k_plus_1 or k_plus_1 < 1:
        raise FamilyError("degree of the polynomial must be >= 1")
    return eigenvalues(build_X(family, k_plus_1 - 1), tol)


def gauss_quadrature(family: FamilySpec, m: int) -> tuple:
    """m-point Gauss rule for the family measure.

    Nodes are the eigenvalues of the Jacobi matrix (Golub-Welsch).
    """
    if family.is_discrete:
        raise FamilyError("Gauss quadrature is provided for continuous families only")
    if int(m) != m or m < 1:
        raise ValueError("number of nodes must be a positive integer")
    X = build_X(family, m - 1)
    if m == 1:
        return X.diag.copy(), np.ones(1)
    try:
        nodes = eigh_tridiagonal(X.diag, X.offdiag, eigvals_only=True)
    except LinAlgError as exc:
        raise EigenSolverError(f"tridiagonal eigensolver failed for m={m}") from exc
    # Christoffel numbers 1 / sum_k p_k(x)^2 keep tiny weights relatively
    # accurate, unlike squared first eigenvector components
    # an overflowing sum means a weight that is zero to double precision
    with np.errstate(over="ignore"):
        weights = 1.0 / np.sum(evaluate_all(family, m - 1, nodes) ** 2, axis=0)
    return nodes, weights / weights.sum()
