"""Normalized orthogonal polynomial families of the four metric spaces.

Each family is described by a :class:`FamilySpec`.  Two independent sets of
recurrence coefficients are kept for every family:

* the *x-recurrence* ``x p_k = alpha_k p_{k+1} + beta_k p_k + gamma_k p_{k-1}``,
  derived from the classical recurrences (Krawtchouk, Hahn, Gegenbauer,
  Jacobi) together with the norm of each polynomial;
* the *P1-recurrence* ``P1 p_k = a_k p_{k+1} + b_k p_k + c_k p_{k-1}``, where
  ``a_k`` and ``b_k`` come from closed forms specific to each space.

Since ``P1`` is affine in ``x`` the two must agree; the test-suite checks it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

HAMMING = "hamming"
JOHNSON = "johnson"
SPHERE = "sphere"
PROJECTIVE = "projective"
KINDS = (HAMMING, JOHNSON, SPHERE, PROJECTIVE)

PROJECTIVE_SIGMA = {"real": 0.5, "complex": 1.0, "quaternion": 2.0}

HAHN_NORM_TOL = 1e-6
# number of Hahn degrees checked against the closed-form normalization
HAHN_CHECK_DEGREES = 40


class FamilyError(ValueError):
    """Invalid family parameters or an out-of-range degree/argument."""


class NormalizationError(ArithmeticError):
    """Raised when a closed-form normalization disagrees with numeric norms."""


@dataclass(frozen=True)
class FamilySpec:
    """A metric space together with its orthogonal polynomial family.

    ``alpha``/``beta`` overrides are only meaningful for ``projective`` and
    turn the family into a plain Jacobi family with those parameters.
    """

    kind: str
    n: int
    w: Optional[int] = None
    sigma: Optional[float] = None
    jacobi_alpha: Optional[float] = None
    jacobi_beta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise FamilyError(f"n must be a positive integer, got {self.n}")
        if self.kind == JOHNSON:
            if self.w is None or int(self.w) != self.w or self.w < 1:
                raise FamilyError("johnson family needs a positive integer weight w")
            if 2 * self.w > self.n:
                raise FamilyError(
                    f"weight w={self.w} exceeds n/2; use the complement weight "
                    f"w'={self.n - self.w} (complementation preserves distances)"
                )
        if self.kind in (SPHERE, PROJECTIVE) and self.n < 3:
            raise FamilyError(f"{self.kind} family needs n >= 3, got {self.n}")
        if self.kind == PROJECTIVE:
            custom = self.jacobi_alpha is not None or self.jacobi_beta is not None
            if custom:
                if self.jacobi_alpha is None or self.jacobi_beta is None:
                    raise FamilyError("give both jacobi_alpha and jacobi_beta")
                a, b = self.jacobi_alpha, self.jacobi_beta
                if a <= -1 or b <= -1 or a + b <= -1:
                    raise FamilyError(f"jacobi parameters out of range: ({a}, {b})")
            elif self.sigma not in PROJECTIVE_SIGMA.values():
                raise FamilyError("projective family needs sigma in {1/2, 1, 2}")

    # -- constructors -----------------------------------------------------
    @classmethod
    def hamming(cls, n: int) -> "FamilySpec":
        return cls(HAMMING, n)

    @classmethod
    def johnson(cls, n: int, w: int) -> "FamilySpec":
        return cls(JOHNSON, n, w=w)

    @classmethod
    def sphere(cls, n: int) -> "FamilySpec":
        return cls(SPHERE, n)

    @classmethod
    def projective(cls, n: int, field_: str = "real") -> "FamilySpec":
        try:
            sigma = PROJECTIVE_SIGMA[field_]
        except KeyError:
            raise FamilyError(f"unknown projective field {field_!r}") from None
        return cls(PROJECTIVE, n, sigma=sigma)

    @classmethod
    def jacobi(cls, alpha: float, beta: float, n: int = 3) -> "FamilySpec":
        """Jacobi family with arbitrary parameters, treated as projective."""
        return cls(PROJECTIVE, n, jacobi_alpha=float(alpha), jacobi_beta=float(beta))

    # -- derived parameters -----------------------------------------------
    @property
    def alpha(self) -> float:
        if self.kind != PROJECTIVE:
            raise FamilyError("alpha is defined for projective families only")
        if self.jacobi_alpha is not None:
            return self.jacobi_alpha
        return self.sigma * (self.n - 1) - 1

    @property
    def beta(self) -> float:
        if self.kind != PROJECTIVE:
            raise FamilyError("beta is defined for projective families only")
        if self.jacobi_beta is not None:
            return self.jacobi_beta
        return self.sigma - 1

    @property
    def is_discrete(self) -> bool:
        return self.kind in (HAMMING, JOHNSON)

    @property
    def max_degree(self) -> Optional[int]:
        """Largest degree with a nonzero polynomial, or None if unbounded."""
        if self.kind == HAMMING:
            return self.n
        if self.kind == JOHNSON:
            return self.w
        return None

    @property
    def support(self) -> tuple:
        """Endpoints of the segment carrying the measure."""
        if self.kind == HAMMING:
            return (0.0, float(self.n))
        if self.kind == JOHNSON:
            return (0.0, float(self.w))
        return (-1.0, 1.0)

    @property
    def tau0(self) -> float:
        """Image of distance zero."""
        return 0.0 if self.is_discrete else 1.0

    @property
    def p1_affine(self) -> tuple:
        """(slope, intercept) of P1 as an affine function of x."""
        if self.kind == HAMMING:
            return (-2.0, float(self.n))
        if self.kind == JOHNSON:
            return (-self.n / (self.w * (self.n - self.w)), 1.0)
        if self.kind == SPHERE:
            return (1.0, 0.0)
        a, b = self.alpha, self.beta
        return (0.5 * (a + b + 2), 0.5 * (a - b))

    def label(self) -> str:
        if self.kind == JOHNSON:
            return f"johnson(n={self.n}, w={self.w})"
        if self.kind == PROJECTIVE:
            return f"projective(n={self.n}, alpha={self.alpha:g}, beta={self.beta:g})"
        return f"{self.kind}(n={self.n})"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.kind == JOHNSON:
            out["w"] = self.w
        if self.kind == PROJECTIVE:
            if self.jacobi_alpha is not None:
                out["jacobi_alpha"] = self.jacobi_alpha
                out["jacobi_beta"] = self.jacobi_beta
            else:
                out["sigma"] = self.sigma
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FamilySpec":
        return cls(d["kind"], d["n"], w=d.get("w"), sigma=d.get("sigma"),
                   jacobi_alpha=d.get("jacobi_alpha"), jacobi_beta=d.get("jacobi_beta"))


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Coefficients of both three-term recurrences at one degree k."""

    k: int
    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class MeasureSpec:
    """Normalized orthogonality measure.

    Discrete measures carry ``points``/``weights``; continuous ones carry the
    interval, the normalizing constant and an unnormalized ``kernel`` so that
    the density is ``normalizer * kernel(x)``.
    """

    interval: tuple
    points: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    normalizer: Optional[float] = None
    kernel: Optional[Callable] = field(default=None, compare=False)

    @property
    def is_discrete(self) -> bool:
        return self.points is not None

    def density(self, x):
        if self.is_discrete:
            raise FamilyError("discrete measure has no density")
        return self.normalizer * self.kernel(np.asarray(x, dtype=float))


def _check_degree(family: FamilySpec, k: int) -> None:
    if int(k) != k or k < 0:
        raise FamilyError(f"degree must be a nonnegative integer, got {k}")
    top = family.max_degree
    if top is not None and k > top:
        raise FamilyError(f"degree {k} exceeds the range 0..{top} of {family.label()}")


def log_binom(a: float, b: float) -> float:
    """log C(a, b) for real arguments via log-gamma."""
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


# ---------------------------------------------------------------------------
# P1-recurrence closed forms
# ---------------------------------------------------------------------------

def _p1_a(family: FamilySpec, k: int) -> float:
    n = family.n
    if family.kind == HAMMING:
        if k >= n:
            return 0.0
        return math.sqrt((k + 1) * (n - k))
    if family.kind == JOHNSON:
        w = family.w
        if k >= w:
            return 0.0
        pre = n * (w - k) * (n - w - k) / (w * (n - w) * (n - 2 * k))
        return pre * math.sqrt((k + 1) * (n - k + 1) / ((n - 2 * k + 1) * (n - 2 * k - 1)))
    if family.kind == SPHERE:
        return math.sqrt((n + k - 2) * (k + 1) / ((n + 2 * k) * (n + 2 * k - 2)))
    al, be = family.alpha, family.beta
    s = al + be
    num = (k + al + 1) * (k + be + 1) * (k + 1) * (k + s + 1)
    return (s + 2) / (2 * k + s + 2) * math.sqrt(num / ((2 * k + s + 3) * (2 * k + s + 1)))


def _p1_b(family: FamilySpec, k: int) -> float:
    n = family.n
    if family.kind in (HAMMING, SPHERE):
        return 0.0
    if family.kind == JOHNSON:
        w = family.w
        if n == 2 * w or k == 0:
            return 0.0
        return (n - 2 * w) ** 2 * k * (n - k + 1) / (w * (n - w) * (n - 2 * k) * (n - 2 * k + 2))
    if k == 0:
        return 0.0
    al, be = family.alpha, family.beta
    s = al + be
    return 2 * (al - be) * k * (k + s + 1) / ((2 * k + s) * (2 * k + s + 2))


# ---------------------------------------------------------------------------
# x-recurrence from the classical families
# ---------------------------------------------------------------------------

def _hahn_log_h2(n: int, k: int) -> float:
    """log of the squared Hahn norm (n-2k+1)/(n-k+1) C(n,k)."""
    return math.log((n - 2 * k + 1) / (n - k + 1)) + log_binom(n, k)


@lru_cache(maxsize=256)
def _johnson_x_table(n: int, w: int) -> tuple:
    """x-recurrence coefficients of the normalized Hahn polynomials, k = 0..w.

    Built from the classical unnormalized recurrence and the closed-form norms.
    At k = w the classical recurrence degenerates; beta_w is then obtained from
    the trace identity sum(beta) = sum of support points, since X_w has the
    support {0..w} as spectrum.
    """
    alpha = np.zeros(w + 1)
    beta = np.zeros(w + 1)
    gamma = np.zeros(w + 1)
    for k in range(w):
        den = (k + 1) * (w - k) * (n - w - k) * (n - 2 * k + 2) * (n - 2 * k + 3)
        A = (n - 2 * k - 1) * (n - 2 * k + 3) * ((n + 2) * w * (n - w) - n * k * (n - k + 1)) / den
        B = (n - 2 * k - 1) * (n - 2 * k + 3) * (n - 2 * k) * (n - 2 * k + 2) / den
        C = (n - 2 * k - 1) * (n - 2 * k) * (w - k + 1) * (n - w - k + 1) * (n - k + 2) / den
        # H_{k+1} = (A - B x) H_k - C H_{k-1};  H_k = h_k * Htilde_k
        ratio_up = math.exp(0.5 * (_hahn_log_h2(n, k + 1) - _hahn_log_h2(n, k)))
        alpha[k] = -ratio_up / B
        beta[k] = A / B
        if k > 0:
            ratio_down = math.exp(0.5 * (_hahn_log_h2(n, k - 1) - _hahn_log_h2(n, k)))
            gamma[k] = -C * ratio_down / B
    if w > 0:
        gamma[w] = alpha[w - 1]
    beta[w] = w * (w + 1) / 2 - beta[:w].sum()
    return alpha, beta, gamma


def _jacobi_log_norm2(al: float, be: float, k: int) -> float:
    """log of ||P_k^{al,be}||^2 under the normalized Jacobi measure."""
    s = al + be
    return (math.lgamma(s + 2) + math.lgamma(k + al + 1) + math.lgamma(k + be + 1)
            - math.log(2 * k + s + 1) - math.lgamma(al + 1) - math.lgamma(be + 1)
            - math.lgamma(k + 1) - math.lgamma(k + s + 1))


def _x_coeffs(family: FamilySpec, k: int) -> tuple:
    n = family.n
    if family.kind == HAMMING:
        alpha = -0.5 * math.sqrt((n - k) * (k + 1)) if k < n else 0.0
        return alpha, n / 2, -0.5 * math.sqrt((n - k + 1) * k)
    if family.kind == JOHNSON:
        _check_hahn_norms(n, family.w)
        alpha, beta, gamma = _johnson_x_table(n, family.w)
        return float(alpha[k]), float(beta[k]), float(gamma[k])
    if family.kind == SPHERE:
        a = math.sqrt((n + k - 2) * (k + 1) / ((n + 2 * k) * (n + 2 * k - 2)))
        c = math.sqrt((n + k - 3) * k / ((n + 2 * k - 2) * (n + 2 * k - 4))) if k > 0 else 0.0
        return a, 0.0, c
    al, be = family.alpha, family.beta
    s = al + be
    alpha_j = 2 * (k + 1) * (k + s + 1) / ((2 * k + s + 1) * (2 * k + s + 2))
    if k == 0:
        # (be^2 - al^2)/(s (s+2)) with the s = 0 singularity removed
        beta_j = (be - al) / (s + 2)
        gamma_j = 0.0
    else:
        beta_j = (be * be - al * al) / ((2 * k + s) * (2 * k + s + 2))
        gamma_j = 2 * (k + al) * (k + be) / ((2 * k + s) * (2 * k + s + 1))
    lk = _jacobi_log_norm2(al, be, k)
    alpha = alpha_j * math.exp(0.5 * (_jacobi_log_norm2(al, be, k + 1) - lk))
    gamma = gamma_j * math.exp(0.5 * (_jacobi_log_norm2(al, be, k - 1) - lk)) if k > 0 else 0.0
    return alpha, beta_j, gamma


def recurrence(family: FamilySpec, k: int) -> RecurrenceCoeffs:
    """Both three-term recurrences of ``family`` at degree ``k``."""
    _check_degree(family, k)
    alpha, beta, gamma = _x_coeffs(family, k)
    slope, _ = family.p1_affine
    return RecurrenceCoeffs(k=k, a=_p1_a(family, k), b=_p1_b(family, k), c=slope * gamma,
                            alpha=alpha, beta=beta, gamma=gamma)


def recurrence_arrays(family: FamilySpec, kmax: int) -> dict:
    """Arrays of all coefficients for k = 0..kmax (inclusive)."""
    _check_degree(family, kmax)
    rows = [recurrence(family, k) for k in range(kmax + 1)]
    return {name: np.array([getattr(r, name) for r in rows])
            for name in ("a", "b", "c", "alpha", "beta", "gamma")}


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _krawtchouk_rows(n: int, kmax: int) -> list:
    """Integer Krawtchouk values K_k(x), x = 0..n, for k <= kmax."""
    xs = range(n + 1)
    prev, cur = [0] * (n + 1), [1] * (n + 1)
    rows = [cur]
    for k in range(kmax):
        # (k+1) K_{k+1} = (n-2x) K_k - (n-k+1) K_{k-1}, exact in integers
        cur, prev = [((n - 2 * x) * c - (n - k + 1) * q) // (k + 1)
                     for x, c, q in zip(xs, cur, prev)], cur
        rows.append(cur)
    return rows


def _hahn_rows(n: int, w: int, kmax: int) -> list:
    """Rational Hahn values H_k(x), x = 0..w, with H_k(0) = 1, for k <= kmax."""
    xs = range(w + 1)
    prev, cur = [Fraction(0)] * (w + 1), [Fraction(1)] * (w + 1)
    rows = [cur]
    for k in range(kmax):
        den = (k + 1) * (w - k) * (n - w - k) * (n - 2 * k + 2) * (n - 2 * k + 3)
        A = Fraction((n - 2 * k - 1) * (n - 2 * k + 3) * ((n + 2) * w * (n - w) - n * k * (n - k + 1)), den)
        B = Fraction((n - 2 * k - 1) * (n - 2 * k + 3) * (n - 2 * k) * (n - 2 * k + 2), den)
        C = Fraction((n - 2 * k - 1) * (n - 2 * k) * (w - k + 1) * (n - w - k + 1) * (n - k + 2), den)
        cur, prev = [(A - B * x) * c - C * q for x, c, q in zip(xs, cur, prev)], cur
        rows.append(cur)
    return rows


@lru_cache(maxsize=64)
def _support_table(family: FamilySpec, kmax: int) -> np.ndarray:
    """p_k(x) for k <= kmax at every support point of a discrete family.

    The forward recurrence loses all accuracy near the top degree on a
    finite support (it follows a decaying solution), so the values are
    computed exactly in rational arithmetic and rounded once.
    """
    if family.kind == HAMMING:
        rows = _krawtchouk_rows(family.n, kmax)
        lognorm = [0.5 * log_binom(family.n, k) for k in range(kmax + 1)]
    else:
        rows = _hahn_rows(family.n, family.w, kmax)
        lognorm = [0.5 * _hahn_log_h2(family.n, k) for k in range(kmax + 1)]
    out = np.array([[float(v) for v in row] for row in rows])
    out /= np.exp(np.array(lognorm))[:, None]
    out.setflags(write=False)
    return out


def _support_index(family: FamilySpec, x: np.ndarray) -> Optional[np.ndarray]:
    if not family.is_discrete or x.size == 0:
        return None
    idx = np.rint(x)
    if np.any(idx != x) or idx.min() < 0 or idx.max() > family.support[1]:
        return None
    return idx.astype(int)


def evaluate_all(family: FamilySpec, kmax: int, x, p0=None) -> np.ndarray:
    """Values p_0..p_kmax at ``x``.

    Returns an array of shape ``(kmax + 1,) + shape(x)``.  Passing ``p0``
    (e.g. the square root of the measure weights) scales every row, which
    keeps products with tiny weights representable.  Support points of a
    discrete family are served from an exact table; everything else uses the
    forward x-recurrence.
    """
    _check_degree(family, kmax)
    x = np.asarray(x, dtype=float)
    idx = _support_index(family, x)
    if idx is not None:
        out = _support_table(family, kmax)[:, idx]
        return out * p0 if p0 is not None else out.copy()
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0 if p0 is None else p0
    prev = np.zeros_like(x)
    for k in range(kmax):
        alpha, beta, gamma = _x_coeffs(family, k)
        out[k + 1] = ((x - beta) * out[k] - gamma * prev) / alpha
        prev = out[k]
    return out


def evaluate(family: FamilySpec, k: int, x, normalized: bool = True):
    """Normalized polynomial p_k at ``x``.

    With ``normalized=False`` a projective family returns the classical
    Jacobi polynomial P_k^{alpha,beta}, the scale in which P1 is expressed.
    """
    vals = evaluate_all(family, k, x)[k]
    if not normalized:
        if family.kind != PROJECTIVE:
            raise FamilyError("unnormalized values are exposed for projective families only")
        vals = vals * jacobi_norm(family, k)
    return vals if vals.ndim else float(vals)


def evaluate_via_p1(family: FamilySpec, k: int, x):
    """p_k(x) from the P1-recurrence; an independent route to :func:`evaluate`."""
    _check_degree(family, k)
    y = p1_value(family, np.asarray(x, dtype=float))
    cur, prev = np.ones_like(y), np.zeros_like(y)
    for j in range(k):
        a = _p1_a(family, j)
        c = _p1_a(family, j - 1) if j > 0 else 0.0
        cur, prev = ((y - _p1_b(family, j)) * cur - c * prev) / a, cur
    return cur if cur.ndim else float(cur)


def jacobi_norm(family: FamilySpec, k: int) -> float:
    """||P_k^{alpha,beta}|| under the normalized Jacobi measure."""
    return math.exp(0.5 * _jacobi_log_norm2(family.alpha, family.beta, k))


def log_value_at_tau0(family: FamilySpec, kmax: int) -> np.ndarray:
    """log p_k(tau0) for k = 0..kmax via ratios of the x-recurrence.

    All p_k are positive at tau0 (an endpoint beyond every zero), so the
    ratios r_k = p_k/p_{k-1} obey a first-order recurrence free of overflow.
    The forward ratio recurrence amplifies relative errors by
    |gamma_k / r_k| / |tau0 - beta_k - gamma_k / r_k| per step; where that
    exceeds one (upper half of a discrete family) the ratios are taken from
    the backward recurrence instead, started exactly at the top degree N
    where alpha_N = 0.
    """
    _check_degree(family, kmax)
    t0 = family.tau0
    top = family.max_degree
    last = kmax if top is None else top
    co = [_x_coeffs(family, k) for k in range(last + 1)]
    fwd = np.zeros(last + 1)
    gain = np.zeros(last + 1)
    for k in range(last):
        alpha, beta, gamma = co[k]
        tail = 0.0 if k == 0 else gamma / fwd[k]
        fwd[k + 1] = ((t0 - beta) - tail) / alpha
        gain[k + 1] = abs(tail) / abs(t0 - beta - tail)
    ratios = fwd
    if top is not None and np.any(gain[1:kmax + 1] > 1):
        bwd = np.zeros(top + 1)
        _, beta, gamma = co[top]
        bwd[top] = gamma / (t0 - beta)
        for k in range(top - 1, 0, -1):
            alpha, beta, gamma = co[k]
            bwd[k] = gamma / ((t0 - beta) - alpha * bwd[k + 1])
        # once the forward step amplifies, later forward ratios are unreliable
        switch = int(np.argmax(gain > 1))
        ratios = np.concatenate((fwd[:switch], bwd[switch:]))
    ratios = ratios[1:kmax + 1]
    if not np.all(ratios > 0):
        raise ArithmeticError(f"non-positive ratio p_k/p_(k-1) at tau0 for {family.label()}")
    return np.concatenate(([0.0], np.cumsum(np.log(ratios))))


def special_log_value(family: FamilySpec, k: int) -> float:
    """log p_k(tau0) from the closed-form special values."""
    _check_degree(family, k)
    n = family.n
    if family.kind == HAMMING:
        return 0.5 * log_binom(n, k)
    if family.kind == JOHNSON:
        return 0.5 * _hahn_log_h2(n, k)
    if family.kind == SPHERE:
        return 0.5 * (math.log((n + 2 * k - 2) / (n - 2)) + log_binom(n + k - 3, k))
    al, be = family.alpha, family.beta
    s = al + be
    return 0.5 * (math.log((2 * k + s + 1) / (s + 1)) + log_binom(k + al, al)
                  + log_binom(k + s, k) - log_binom(k + be, be))


# ---------------------------------------------------------------------------
# measure, distance substitution and P1
# ---------------------------------------------------------------------------

def sphere_omega(n: int) -> float:
    """Integral of (1-x^2)^((n-3)/2) over [-1,1], times (n-2)."""
    return math.pi * math.exp(math.lgamma(n - 2) - 2 * math.lgamma((n - 2) / 2)) / 2.0 ** (n - 4)


def measure(family: FamilySpec) -> MeasureSpec:
    n = family.n
    if family.kind == HAMMING:
        pts = np.arange(n + 1, dtype=float)
        logs = np.array([log_binom(n, i) for i in range(n + 1)]) - n * math.log(2)
        return MeasureSpec(family.support, points=pts, weights=np.exp(logs))
    if family.kind == JOHNSON:
        w = family.w
        pts = np.arange(w + 1, dtype=float)
        logs = np.array([log_binom(w, i) + log_binom(n - w, i) for i in range(w + 1)])
        return MeasureSpec(family.support, points=pts, weights=np.exp(logs - log_binom(n, w)))
    if family.kind == SPHERE:
        expo = (n - 3) / 2
        return MeasureSpec(family.support, normalizer=(n - 2) / sphere_omega(n),
                           kernel=lambda x: (1 - x * x) ** expo)
    al, be = family.alpha, family.beta
    s = al + be
    const = math.exp(math.lgamma(s + 2) - math.lgamma(al + 1) - math.lgamma(be + 1)
                     - (s + 1) * math.log(2))
    return MeasureSpec(family.support, normalizer=const,
                       kernel=lambda x: (1 - x) ** al * (1 + x) ** be)


def tau(family: FamilySpec, d: float) -> float:
    """Substituted variable x = tau(d) for a distance d of the space.

    Johnson distances are Hamming distances between weight-w words and are
    therefore even; they map to d/2.
    """
    if family.kind == HAMMING:
        if int(d) != d or not 0 <= d <= family.n:
            raise FamilyError(f"hamming distance must be an integer in 0..{family.n}")
        return float(d)
    if family.kind == JOHNSON:
        if int(d) != d or d % 2 or not 0 <= d <= 2 * family.w:
            raise FamilyError(f"johnson distance must be an even integer in 0..{2 * family.w}")
        return d / 2
    if family.kind == SPHERE:
        if not 0 <= d <= 2:
            raise FamilyError("sphere distance must lie in [0, 2]")
        return 1 - d * d / 2
    if not 0 <= d <= math.sqrt(2):
        raise FamilyError("projective distance must lie in [0, sqrt(2)]")
    return 2 * (1 - d * d / 2) ** 2 - 1


def p1_value(family: FamilySpec, x):
    slope, icpt = family.p1_affine
    return slope * x + icpt


# ---------------------------------------------------------------------------
# inner products and linearization
# ---------------------------------------------------------------------------

def quadrature_for_degree(family: FamilySpec, degree: int) -> tuple:
    """Nodes and weights integrating polynomials of ``degree`` exactly."""
    from .tridiag import gauss_quadrature

    m = math.ceil((degree + 1) / 2) + 2
    return gauss_quadrature(family, m)


def _nodes_weights(family: FamilySpec, degree: int) -> tuple:
    if family.is_discrete:
        mu = measure(family)
        return mu.points, mu.weights
    return quadrature_for_degree(family, degree)


def gram_matrix(family: FamilySpec, kmax: int) -> np.ndarray:
    """Matrix of <p_i, p_j> for i, j <= kmax."""
    x, wts = _nodes_weights(family, 2 * kmax)
    vals = evaluate_all(family, kmax, x, p0=np.sqrt(wts))
    return vals @ vals.T


def linearize(family: FamilySpec, i: int, j: int, max_k: Optional[int] = None) -> np.ndarray:
    """Coefficients q^k of p_i p_j = sum_k q^k p_k for k = 0..max_k."""
    if max_k is None:
        max_k = i + j
    top = family.max_degree
    if top is not None:
        max_k = min(max_k, top)
    kk = max(i, j, max_k)
    x, wts = _nodes_weights(family, i + j + kk)
    # a cube root of the weight in each of the three factors avoids overflow
    vals = evaluate_all(family, kk, x, p0=np.cbrt(wts))
    return (vals[: max_k + 1] * (vals[i] * vals[j])).sum(axis=1)


def _expand_by_quadrature(family: FamilySpec, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    deg = len(g) - 1 + len(h) - 1
    top = family.max_degree
    kk = deg if top is None else min(deg, top)
    x, wts = _nodes_weights(family, 2 * deg)
    vals = evaluate_all(family, max(kk, len(g) - 1, len(h) - 1), x, p0=np.cbrt(wts))
    prod = (g @ vals[: len(g)]) * (h @ vals[: len(h)])
    return vals[: kk + 1] @ prod


def _expand_by_recurrence(family: FamilySpec, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Product coefficients from the x-recurrence acting on coefficient vectors.

    v_i holds the coefficients of h p_i.  The top coefficients of each v_i
    arise from shifts alone, so they keep relative accuracy even when they
    are many orders of magnitude below the bulk.
    """
    deg = len(g) - 1 + len(h) - 1
    coeffs = [_x_coeffs(family, j) for j in range(deg + 1)]
    alpha, beta, gamma = (np.array(c) for c in zip(*coeffs))

    def times_x(v):
        out = beta * v
        out[1:] += alpha[:-1] * v[:-1]
        out[:-1] += gamma[1:] * v[1:]
        return out

    prev = np.zeros(deg + 1)
    cur = np.zeros(deg + 1)
    cur[: len(h)] = h
    out = g[0] * cur
    for i in range(len(g) - 1):
        prev, cur = cur, (times_x(cur) - beta[i] * cur - gamma[i] * prev) / alpha[i]
        out += g[i + 1] * cur
    return out


def expand_product(family: FamilySpec, g: Sequence[float], h: Sequence[float]) -> np.ndarray:
    """Coefficients of (sum g_i p_i)(sum h_j p_j) in the basis {p_k}.

    Discrete families project the pointwise product over the full support.
    Continuous families combine two routes: a Gauss rule resolves each
    coefficient to a fixed fraction of the largest one, which is accurate up
    to the peak of the coefficient sequence, while the recurrence on
    coefficient vectors keeps relative accuracy in the decaying tail above
    the peak.  The constant term is taken directly as <g, h>.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    quad = _expand_by_quadrature(family, g, h)
    if family.is_discrete:
        out = quad
    else:
        peak = int(np.argmax(np.abs(quad)))
        out = _expand_by_recurrence(family, g, h)
        out[: peak + 1] = quad[: peak + 1]
    # the constant term is the inner product <g, h>, exact in this basis
    m = min(len(g), len(h))
    out[0] = float(g[:m] @ h[:m])
    return out


@lru_cache(maxsize=256)
def _check_hahn_norms(n: int, w: int) -> None:
    """Abort if the closed-form Hahn normalization does not yield unit norms.

    Only the lower half of the degree range is checked: near the top degree
    the forward recurrence on the w+1 support points amplifies rounding in
    the coefficients by orders of magnitude, which says nothing about the
    normalization itself.
    """
    kmax = min((w + 1) // 2, HAHN_CHECK_DEGREES)
    alpha, beta, gamma = _johnson_x_table(n, w)
    logs = np.array([log_binom(w, i) + log_binom(n - w, i) for i in range(w + 1)]) - log_binom(n, w)
    x = np.arange(w + 1, dtype=float)
    cur, prev = np.sqrt(np.exp(logs)), np.zeros(w + 1)
    for k in range(kmax + 1):
        norm2 = float(cur @ cur)
        if abs(norm2 - 1) > HAHN_NORM_TOL:
            raise NormalizationError(
                f"Hahn polynomial of degree {k} for n={n}, w={w} has squared norm "
                f"{norm2!r}; the closed-form normalization is inconsistent"
            )
        if k < w:
            cur, prev = ((x - beta[k]) * cur - gamma[k] * prev) / alpha[k], cur
