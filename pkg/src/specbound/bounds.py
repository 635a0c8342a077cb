"""Spectral upper bounds on code size.

For a degree k the bound reads

    M <= 4 rho_k p_k(tau0)^2 / (P1(tau0) - lambda_max(S_k)),
    rho_k = a_k p_{k+1}(tau0) / p_k(tau0),

and applies whenever lambda_max(S_{k-1}) >= P1(x) on the set of inner
distances of the code.  The engine scans every admissible k and keeps the
smallest bound.  Everything is carried in log2 to survive lengths in the
thousands.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .families import (HAMMING, JOHNSON, PROJECTIVE, SPHERE, FamilyError, FamilySpec,
                       log_binom, log_value_at_tau0, p1_value, recurrence)
from .tridiag import build_S, leading_lambda_max

LN2 = math.log(2)
FEASIBILITY_SLACK = 1e-12
OVERFLOW_LOG2 = 800.0
RHO_REL_TOL = 1e-10
# the bound scales like 1/gap, so a gap of GAP_FACTOR * tol keeps the
# eigenvalue's share of the relative error below 1/GAP_FACTOR
GAP_FACTOR = 1e8


@dataclass(frozen=True)
class BoundQuery:
    """A code-size question.

    ``distance`` is the minimum Hamming distance d for hamming, *half* the
    (even) minimum distance for johnson, and the largest allowed inner
    product t (absolute value for projective) for the continuous spaces.
    """

    family: FamilySpec
    distance: float

    def __post_init__(self):
        f, d = self.family, self.distance
        if f.kind == HAMMING and (int(d) != d or not 1 <= d <= f.n):
            raise FamilyError(f"hamming distance must be an integer in 1..{f.n}")
        if f.kind == JOHNSON and (int(d) != d or not 1 <= d <= f.w):
            raise FamilyError(f"johnson half-distance must be an integer in 1..{f.w}")
        if f.kind == SPHERE and not -1 < d < 1:
            raise FamilyError("sphere inner-product ceiling t must lie in (-1, 1)")
        if f.kind == PROJECTIVE and not 0 <= d < 1:
            raise FamilyError("projective inner-product ceiling t must lie in [0, 1)")

    @property
    def x_extreme(self) -> float:
        """Point of the forbidden set where P1 is largest."""
        if self.family.kind == PROJECTIVE:
            return 2 * self.distance ** 2 - 1
        return float(self.distance)

    @property
    def forbidden_interval(self) -> tuple:
        """(lo, hi) of the segment assumed to contain all inner distances."""
        if self.family.is_discrete:
            return (float(self.distance), self.family.support[1])
        return (-1.0, self.x_extreme)

    @property
    def threshold(self) -> float:
        return float(p1_value(self.family, self.x_extreme))

    def to_dict(self) -> dict:
        return {"family": self.family.to_dict(), "distance": self.distance}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundQuery":
        return cls(FamilySpec.from_dict(d["family"]), d["distance"])


@dataclass
class BoundResult:
    query: BoundQuery
    k_star: int
    lambda_k: float
    bound_log2: float
    bound_value: Optional[float]
    k_window: tuple
    closed_form_rel_diff: float
    per_k_table: Optional[list] = None

    @property
    def overflow(self) -> bool:
        return self.bound_value is None

    def to_dict(self) -> dict:
        out = {
            "status": "bound",
            "query": self.query.to_dict(),
            "k_star": self.k_star,
            "lambda_k": self.lambda_k,
            "bound_log2": self.bound_log2,
            "bound_value": self.bound_value,
            "overflow": self.overflow,
            "k_window": list(self.k_window),
            "closed_form_rel_diff": self.closed_form_rel_diff,
        }
        if self.per_k_table is not None:
            out["per_k_table"] = self.per_k_table
        return out


@dataclass
class NoBound:
    """No admissible degree k up to ``k_cap``."""

    query: BoundQuery
    k_cap: int
    reason: str

    def to_dict(self) -> dict:
        return {"status": "no-bound", "query": self.query.to_dict(),
                "k_cap": self.k_cap, "reason": self.reason}


@dataclass
class Spectrum:
    """lambda_max(S_k) for k = 0..K of one family, with the solver tolerance."""

    family: FamilySpec
    lambdas: np.ndarray
    tol: float


def default_k_cap(family: FamilySpec) -> int:
    top = family.max_degree
    return 2 * family.n if top is None else min(top, 2 * family.n)


def _effective_cap(family: FamilySpec, k_cap: Optional[int]) -> int:
    cap = default_k_cap(family) if k_cap is None else int(k_cap)
    if cap < 1:
        raise FamilyError("k_cap must be at least 1")
    top = family.max_degree
    if top is not None:
        # rho_k needs a nonzero a_k, i.e. k below the top degree
        cap = min(cap, top - 1)
    return cap


def spectrum(family: FamilySpec, kmax: int, tol: Optional[float] = None) -> Spectrum:
    S = build_S(family, kmax)
    tol = S.default_tol() if tol is None else tol
    return Spectrum(family, leading_lambda_max(S, tol), tol)


def _window(query: BoundQuery, spec: Spectrum, cap: int) -> Optional[tuple]:
    lam = spec.lambdas
    ceiling = float(p1_value(query.family, query.family.tau0))
    kmin = next((k for k in range(1, cap + 1)
                 if lam[k - 1] >= query.threshold - FEASIBILITY_SLACK), None)
    if kmin is None:
        return None
    kmax = kmin - 1
    # the denominator must stay well clear of the eigenvalue uncertainty
    while kmax + 1 <= cap and ceiling - lam[kmax + 1] > GAP_FACTOR * spec.tol:
        kmax += 1
    if kmax < kmin:
        return None
    return kmin, kmax


def k_window(query: BoundQuery, k_cap: Optional[int] = None,
             tol: Optional[float] = None) -> Union[tuple, NoBound]:
    """(k_min, k_max) of admissible degrees, or a :class:`NoBound`."""
    cap = _effective_cap(query.family, k_cap)
    if cap < 1:
        return NoBound(query, cap, "family too small for any admissible degree")
    win = _window(query, spectrum(query.family, cap, tol), cap)
    if win is None:
        return NoBound(query, cap, f"no k <= {cap} satisfies the feasibility condition")
    return win


def rho_closed_form(family: FamilySpec, k: int) -> float:
    n = family.n
    if family.kind == HAMMING:
        return float(n - k)
    if family.kind == JOHNSON:
        w = family.w
        return n * (w - k) * (n - w - k) * (n - k + 1) / (w * (n - w) * (n - 2 * k) * (n - 2 * k + 1))
    if family.kind == SPHERE:
        return (n + k - 2) / (n + 2 * k - 2)
    al, be = family.alpha, family.beta
    s = al + be
    return (s + 2) * (k + al + 1) * (k + s + 1) / ((2 * k + s + 1) * (2 * k + s + 2))


def rho(family: FamilySpec, k: int) -> float:
    """Optimal perturbation a_k p_{k+1}(tau0)/p_k(tau0), in closed form.

    The value is cross-checked against the recurrence-generated ratio.
    """
    top = family.max_degree
    if int(k) != k or k < 0 or (top is not None and k >= top):
        raise FamilyError(f"rho_k needs 0 <= k < {top}, got {k}")
    logs = log_value_at_tau0(family, k + 1)
    generic = recurrence(family, k).a * math.exp(logs[k + 1] - logs[k])
    closed = rho_closed_form(family, k)
    if abs(generic - closed) > RHO_REL_TOL * abs(closed):
        raise ArithmeticError(f"rho_{k} mismatch for {family.label()}: {generic!r} vs {closed!r}")
    return closed


def closed_form_log2(family: FamilySpec, k: int, lam: float) -> float:
    """log2 of the per-space closed-form bound at degree k with eigenvalue lam."""
    n = family.n
    if family.kind == HAMMING:
        val = math.log(4 * (n - k)) + log_binom(n, k) - math.log(n - lam)
    elif family.kind == JOHNSON:
        w = family.w
        val = (math.log(4 * n * (w - k) * (n - w - k)) + log_binom(n, k)
               - math.log((1 - lam) * w * (n - w) * (n - 2 * k)))
    elif family.kind == SPHERE:
        val = math.log(4 / (1 - lam)) + log_binom(n + k - 2, k)
    else:
        al, be = family.alpha, family.beta
        s = al + be
        # P1(1) = alpha + 1 is the denominator's leading term
        val = (math.log(4 * (s + 2) * (k + al + 1)) - math.log((2 * k + s + 2) * (al + 1 - lam))
               + log_binom(k + al, al) + log_binom(k + s + 1, k) - log_binom(k + be, be))
    return val / LN2


def generic_log2(family: FamilySpec, k: int, lam: float, logs: Optional[np.ndarray] = None) -> float:
    """log2 of 4 rho_k p_k(tau0)^2 / (P1(tau0) - lam) from the recurrence alone."""
    if logs is None:
        logs = log_value_at_tau0(family, k + 1)
    log_rho = math.log(recurrence(family, k).a) + logs[k + 1] - logs[k]
    gap = float(p1_value(family, family.tau0)) - lam
    return (math.log(4) + log_rho + 2 * logs[k] - math.log(gap)) / LN2


def _materialize(log2val: float) -> Optional[float]:
    return 2.0 ** log2val if log2val < OVERFLOW_LOG2 else None


def spectral_bound(query: BoundQuery, k_cap: Optional[int] = None, tol: Optional[float] = None,
                   per_k: bool = False) -> Union[BoundResult, NoBound]:
    """Smallest spectral bound over all admissible degrees k <= k_cap."""
    family = query.family
    cap = _effective_cap(family, k_cap)
    if cap < 1:
        return NoBound(query, cap, "family too small for any admissible degree")
    spec = spectrum(family, cap, tol)
    win = _window(query, spec, cap)
    if win is None:
        return NoBound(query, cap, f"no k <= {cap} satisfies the feasibility condition")
    kmin, kmax = win
    logs = log_value_at_tau0(family, kmax + 1)
    rows = []
    worst = 0.0
    for k in range(kmin, kmax + 1):
        lam = float(spec.lambdas[k])
        g = generic_log2(family, k, lam, logs)
        c = closed_form_log2(family, k, lam)
        worst = max(worst, abs(math.expm1((g - c) * LN2)))
        rows.append((k, lam, g))
    k_star, lam_star, best = min(rows, key=lambda r: r[2])
    table = None
    if per_k:
        table = [{"k": k, "lambda_max": lam, "bound_log2": b} for k, lam, b in rows]
    return BoundResult(query=query, k_star=k_star, lambda_k=lam_star, bound_log2=best,
                       bound_value=_materialize(best), k_window=(kmin, kmax),
                       closed_form_rel_diff=worst, per_k_table=table)


@dataclass
class SweepRow:
    query: BoundQuery
    result: Optional[Union[BoundResult, NoBound]] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        if self.error is not None:
            return {"status": "error", "query": self.query.to_dict(), "error": self.error}
        return self.result.to_dict()


def bound_sweep(queries: Sequence[BoundQuery], k_cap: Optional[int] = None,
                tol: Optional[float] = None, per_k: bool = False,
                workers: int = 1) -> List[SweepRow]:
    """Element-wise :func:`spectral_bound`; rows come back in input order."""

    def one(q):
        try:
            return SweepRow(q, spectral_bound(q, k_cap, tol, per_k))
        except (FamilyError, ArithmeticError) as exc:
            return SweepRow(q, error=str(exc))

    if workers > 1 and len(queries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, queries))
    return [one(q) for q in queries]
