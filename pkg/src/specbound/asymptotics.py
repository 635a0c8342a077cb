"""Asymptotic rate bounds and limits of lambda_max(S_k).

Rates are in bits per coordinate (log base 2) for all four curves, and
0 log 0 is taken to be 0 throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class RatePoint:
    """One point of a rate curve; ``auxiliary`` is the internal tau, rho or s."""

    argument: Union[float, tuple]
    rate: float
    auxiliary: float
    boundary: bool = False

    def to_dict(self) -> dict:
        arg = list(self.argument) if isinstance(self.argument, tuple) else self.argument
        return {"argument": arg, "auxiliary": self.auxiliary, "rate": self.rate,
                "boundary": self.boundary}


def _xlog2x(x: float) -> float:
    return 0.0 if x == 0 else x * math.log2(x)


def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ValueError(f"entropy argument must lie in [0, 1], got {x}")
    return -_xlog2x(x) - _xlog2x(1 - x)


def _kl_rate(r: float) -> float:
    """(1+r) log2(1+r) - r log2 r."""
    return _xlog2x(1 + r) - _xlog2x(r)


def hamming_rate(delta: float) -> RatePoint:
    """MRRW-I: h(1/2 - sqrt(delta (1 - delta)))."""
    if not 0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    t = max(0.0, 0.5 - math.sqrt(delta * (1 - delta)))
    return RatePoint(delta, binary_entropy(t), t)


def johnson_delta(omega: float, tau: float) -> float:
    """Relative half-distance reached at relative degree tau for weight omega."""
    return (omega - tau) * (1 - omega - tau) / (1 + 2 * math.sqrt(tau * (1 - tau)))


def johnson_rate(omega: float, delta: float) -> RatePoint:
    """MRRW-II: h(tau) where tau solves johnson_delta(omega, tau) = delta."""
    if not 0 < omega <= 0.5:
        raise ValueError(f"omega must lie in (0, 1/2], got {omega}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if delta >= omega * (1 - omega):
        return RatePoint((omega, delta), 0.0, 0.0, boundary=True)
    grid = np.linspace(0.0, omega, 65)
    vals = [johnson_delta(omega, t) for t in grid]
    if np.any(np.diff(vals) >= 0):
        raise ArithmeticError(f"delta(omega={omega}, tau) is not decreasing on [0, omega]")
    lo, hi = 0.0, omega
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if johnson_delta(omega, mid) > delta:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECT_TOL:
            break
    t = 0.5 * (lo + hi)
    return RatePoint((omega, delta), binary_entropy(t), t)


def sphere_rate(t: float) -> RatePoint:
    """Kabatiansky-Levenshtein rate for spherical codes with cosines <= t."""
    if not 0 <= t < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    c = math.sqrt(1 - t * t)
    rho = (1 - c) / (2 * c)
    return RatePoint(t, _kl_rate(rho), rho)


def projective_real_rate(t: float) -> RatePoint:
    """Rate bound for real projective codes with |cosines| <= t."""
    if not 0 <= t < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    s = 0.5 * (1 / math.sqrt(1 - t * t) - 1)
    return RatePoint(t, _kl_rate(s), s)


# ---------------------------------------------------------------------------
# limits of the top eigenvalue
# ---------------------------------------------------------------------------

def hamming_lambda_limit(tau: float) -> float:
    """lim lambda_max(S_k)/n as k/n -> tau."""
    if not 0 < tau <= 0.5:
        raise ValueError(f"tau must lie in (0, 1/2], got {tau}")
    return 2 * math.sqrt(tau * (1 - tau))


def johnson_lambda_limit(omega: float, tau: float) -> float:
    """lim lambda_max(S_k) as w/n -> omega, k/n -> tau."""
    if not 0 < omega <= 0.5 or not 0 < tau <= 0.5:
        raise ValueError("omega and tau must lie in (0, 1/2]")
    r = math.sqrt(tau * (1 - tau))
    w2 = omega * (1 - omega)
    return (2 * w2 + r) * r / (w2 * (1 + 2 * r))


def sphere_lambda_limit(rho: float) -> float:
    """lim lambda_max(S_k) as k/n -> rho (no rescaling: S_k has norm <= 1)."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    return 2 * math.sqrt(rho * (1 + rho)) / (1 + 2 * rho)


def projective_lambda_limit(a: float, b: float) -> float:
    """lim lambda_max(S_k)/k as alpha = a k, beta = b k, k -> infinity."""
    if not (a > 0 and b >= 0):
        raise ValueError("need a > 0 and b >= 0")
    return 2 * ((a + b) * math.sqrt((a + 1) * (b + 1) * (a + b + 1)) + (a - b) * (a + b + 1)) / (a + b + 2) ** 2


def lambda_limit(kind: str, **params) -> float:
    """Dispatch to the limit formula of ``kind`` (hamming/johnson/sphere/projective)."""
    table = {
        "hamming": hamming_lambda_limit,
        "johnson": johnson_lambda_limit,
        "sphere": sphere_lambda_limit,
        "projective": projective_lambda_limit,
    }
    try:
        fn = table[kind]
    except KeyError:
        raise ValueError(f"unknown family kind {kind!r}") from None
    return fn(**params)


CURVES = {
    "mrrw1": hamming_rate,
    "mrrw2": johnson_rate,
    "kl-sphere": sphere_rate,
    "kl-projective-real": projective_real_rate,
}
