"""Explicit LP certificates behind each spectral bound.

For degree k and perturbation rho, let theta be the top eigenvalue of
T_k = S_k - rho e_k e_k^T with positive eigenvector f = sum f_i p_i.  The
polynomial

    F = (rho p_k + a_k p_{k+1}) f

has nonnegative coefficients in the basis {p_i}, satisfies F <= 0 wherever
P1 <= theta, and gives M <= F(tau0)/F_0 with F_0 = rho f_k.  A certificate
stores F in the orthonormal basis together with the eigen-data it came from;
:func:`verify_certificate` re-checks the LP conditions from that data alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .bounds import BoundQuery, NoBound, k_window, rho as optimal_rho
from .families import (FamilyError, evaluate_all, expand_product, log_value_at_tau0, p1_value,
                       recurrence)
from .tridiag import build_S, build_T, lambda_max

COEFF_TOL = 1e-9
SIGN_TOL = 1e-9
F0_REL_TOL = 1e-10
SANDWICH_SLACK = 1e-9
DEFAULT_GRID = 512
# coefficient route vs direct product route for F(tau0)/F0
IMPLIED_REL_TOL = 1e-6
# F is stored in linear floating point; p_{2k+1}(tau0) must stay well inside range
LOG_VALUE_LIMIT = 600.0


class OutsideWindowError(FamilyError):
    pass


class CertificateError(ArithmeticError):
    """An in-window certificate came out structurally invalid."""


@dataclass(frozen=True)
class Certificate:
    query: BoundQuery
    k: int
    rho: float
    theta_k: float
    f: np.ndarray
    F_coeffs: np.ndarray
    F0: float
    F_at_tau0: float
    implied_bound: float
    checks: Optional[dict] = field(default=None, compare=False)

    @property
    def family(self):
        return self.query.family

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c["passed"] for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "family": self.family.to_dict(),
            "distance": self.query.distance,
            "k": self.k,
            "rho": self.rho,
            "theta_k": self.theta_k,
            "f": [float(v) for v in self.f],
            "F_coeffs": [float(v) for v in self.F_coeffs],
            "F0": self.F0,
            "F_at_tau0": self.F_at_tau0,
            "implied_bound": self.implied_bound,
            "checks": self.checks,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        query = BoundQuery.from_dict({"family": d["family"], "distance": d["distance"]})
        return cls(query=query, k=d["k"], rho=d["rho"], theta_k=d["theta_k"],
                   f=np.array(d["f"], dtype=float), F_coeffs=np.array(d["F_coeffs"], dtype=float),
                   F0=d["F0"], F_at_tau0=d["F_at_tau0"], implied_bound=d["implied_bound"],
                   checks=d.get("checks"))


def build_certificate(query: BoundQuery, k: int, rho: Optional[float] = None,
                      strict: bool = True) -> Certificate:
    """Materialize F for degree ``k``.

    ``rho`` defaults to the optimal rho_k.  With ``strict`` a degree outside
    the admissible window raises :class:`OutsideWindowError` and a negative
    coefficient beyond COEFF_TOL raises :class:`CertificateError`; otherwise
    the certificate is built anyway and verification reports what breaks.
    """
    family = query.family
    if strict:
        win = k_window(query, k_cap=max(k, 1))
        if isinstance(win, NoBound) or not win[0] <= k <= win[1]:
            raise OutsideWindowError(f"k={k} lies outside the admissible window for this query")
    if k < 1:
        raise FamilyError("certificates need k >= 1")
    deg = 2 * k + 1 if family.max_degree is None else min(2 * k + 1, family.max_degree)
    if log_value_at_tau0(family, deg).max() > LOG_VALUE_LIMIT:
        raise FamilyError(f"certificate values at k={k} exceed double precision range")
    r = optimal_rho(family, k) if rho is None else float(rho)
    top = lambda_max(build_T(family, k, r))
    f = top.eigenvector
    a_k = recurrence(family, k).a
    g = np.zeros(k + 2)
    g[k], g[k + 1] = r, a_k
    F = expand_product(family, g, f)
    vals = evaluate_all(family, k + 1, family.tau0)
    f_t0 = float(f @ vals[: k + 1])
    F_t0 = (r * vals[k] + a_k * vals[k + 1]) * f_t0
    worst = int(np.argmin(F))
    if strict and F[worst] < -COEFF_TOL * np.abs(F).max():
        # never clipped: a negative coefficient beyond rounding means the
        # construction itself went wrong for this input
        raise CertificateError(f"coefficient F_{worst} = {F[worst]!r} is negative beyond tolerance "
                               f"(max |F_j| = {np.abs(F).max()!r}) for {family.label()}, k={k}")
    F0 = float(F[0])
    return Certificate(query=query, k=k, rho=r, theta_k=top.lambda_max, f=f, F_coeffs=F,
                       F0=F0, F_at_tau0=float(F_t0), implied_bound=float(F_t0 / F0))


def _check(passed: bool, margin: float, **detail) -> dict:
    return {"passed": bool(passed), "margin": float(margin), **detail}


def forbidden_grid(query: BoundQuery, grid_points: int = DEFAULT_GRID) -> np.ndarray:
    lo, hi = query.forbidden_interval
    if query.family.is_discrete:
        return np.arange(lo, hi + 1)
    return np.linspace(lo, hi, grid_points + 2)


def _domain_grid(query: BoundQuery, grid_points: int) -> np.ndarray:
    lo, hi = query.family.support
    if query.family.is_discrete:
        return np.arange(lo, hi + 1)
    return np.linspace(lo, hi, grid_points + 2)


def _F_values(cert: Certificate, x: np.ndarray) -> np.ndarray:
    vals = evaluate_all(cert.family, len(cert.F_coeffs) - 1, x)
    return cert.F_coeffs @ vals


def verify_certificate(cert: Certificate, grid_points: int = DEFAULT_GRID) -> Certificate:
    """Re-check the LP conditions; returns a copy with ``checks`` filled in.

    Margins are positive when a check passes with room to spare.
    """
    family, query, k = cert.family, cert.query, cert.k
    Fc = np.asarray(cert.F_coeffs, dtype=float)
    scale = float(np.abs(Fc).max())
    F_t0 = float(_F_values(cert, np.array([family.tau0]))[0])
    checks = {}

    checks["F0_positive"] = _check(Fc[0] > 0, Fc[0] / scale)
    worst = int(np.argmin(Fc))
    rel = Fc[worst] / scale
    checks["coefficients_nonnegative"] = _check(rel >= -COEFF_TOL, rel + COEFF_TOL, worst_index=worst)

    xs = forbidden_grid(query, grid_points)
    Fx = _F_values(cert, xs)
    i = int(np.argmax(Fx))
    allow = SIGN_TOL * abs(F_t0)
    checks["nonpositive_on_forbidden_set"] = _check(Fx[i] <= allow, (allow - Fx[i]) / abs(F_t0),
                                                    worst_x=float(xs[i]))

    xd = _domain_grid(query, grid_points)
    signed = _F_values(cert, xd) * np.sign(p1_value(family, xd) - cert.theta_k)
    j = int(np.argmin(signed))
    checks["sign_structure"] = _check(signed[j] >= -allow, (signed[j] + allow) / abs(F_t0),
                                      worst_x=float(xd[j]))

    implied = F_t0 / Fc[0]
    checks["implied_bound_at_least_one"] = _check(implied >= 1, implied - 1, implied_bound=implied)
    checks["implied_bound_consistent"] = _check(
        abs(implied - cert.implied_bound) <= IMPLIED_REL_TOL * abs(implied),
        IMPLIED_REL_TOL - abs(implied / cert.implied_bound - 1))

    f = np.asarray(cert.f, dtype=float)
    checks["eigenvector_positive"] = _check(f.min() > 0, f.min() / f.max())
    gap = abs(Fc[0] - cert.rho * f[k])
    checks["F0_identity"] = _check(gap <= F0_REL_TOL * abs(Fc[0]), F0_REL_TOL - gap / abs(Fc[0]))

    lam_k = lambda_max(build_S(family, k)).lambda_max
    lam_km1 = lambda_max(build_S(family, k - 1)).lambda_max
    lo_m = cert.theta_k - lam_km1 + SANDWICH_SLACK
    hi_m = lam_k - cert.theta_k + SANDWICH_SLACK
    checks["eigenvalue_sandwich"] = _check(lo_m >= 0 and hi_m >= 0, min(lo_m, hi_m),
                                           lower=lam_km1, upper=lam_k)
    feas = lam_km1 - query.threshold
    checks["feasibility_condition"] = _check(feas >= -1e-12, feas, threshold=query.threshold)
    return replace(cert, checks=checks)


def theorem_value(cert: Certificate) -> float:
    """4 rho p_k(tau0)^2 / (P1(tau0) - theta_k): the closed expression at theta_k."""
    family, k = cert.family, cert.k
    pk = evaluate_all(family, k, family.tau0)[k]
    return float(4 * cert.rho * pk * pk / (p1_value(family, family.tau0) - cert.theta_k))
