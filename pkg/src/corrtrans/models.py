"""The two built-in correlation-parametrized models.

BVN: bivariate normal with standardized marginals.  SquareV: the four-point
law on the vertices of [-1, 1]^2 with cell probabilities (1 +/- rho)/4.
Both come with closed-form joint moments, seeded samplers, closed-form
optimal transforms, closed-form leading error terms, dominance ranges, and
(for SquareV) an exact small-n rejection oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .pearson import (
    MomentSpec,
    Transform,
    fisher_transform,
    identity_transform,
    tau,
)
from .specfun import (
    Tolerance,
    gamma_ratio_endpoint,
    gauss_2f1_half,
    log_gamma,
    normal_cdf,
    normal_pdf,
    normal_quantile,
)

__all__ = [
    "DependenceModel",
    "BetaInterval",
    "BVN",
    "SQUAREV",
    "get_model",
    "bvn_moments",
    "squarev_moments",
    "sample_bvn",
    "sample_squarev",
    "sample_squarev_via_bvn",
    "optimal_exponent",
    "psi_closed",
    "fisher",
    "optimal_transform_closed",
    "transform_for",
    "delta_closed",
    "dominance_range",
    "fisher_dominance_threshold",
    "squarev_exact_rejection",
]

_BVN_M = (1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0)  # N(0,1) raw moments 0..6


def bvn_moments(rho: float, i: int, j: int) -> float:
    """E Y^i Z^j under the standardized bivariate normal law."""
    _check_orders(i, j)
    total = 0.0
    root = math.sqrt(1.0 - rho * rho)
    for k in range(j + 1):
        mi, mj = _BVN_M[i + k], _BVN_M[j - k]
        if mi == 0.0 or mj == 0.0:
            continue
        total += math.comb(j, k) * rho ** k * root ** (j - k) * mi * mj
    return total


def squarev_moments(rho: float, i: int, j: int) -> float:
    """E Y^i Z^j under the four-point vertex law."""
    _check_orders(i, j)
    even_i = 1.0 if i % 2 == 0 else 0.0
    even_j = 1.0 if j % 2 == 0 else 0.0
    even_ij = 1.0 if (i + j) % 2 == 0 else 0.0
    return (1.0 - rho) * even_i * even_j + rho * even_ij


def _check_orders(i: int, j: int) -> None:
    if not (0 <= i <= 6 and 0 <= j <= 6 and i + j <= 6):
        raise ValueError("moment orders must satisfy 0 <= i, j and i + j <= 6")


def sample_bvn(rho: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n pairs (Y, Z) with Z = rho Y + sqrt(1 - rho^2) Y1; shape (n, 2)."""
    y = rng.standard_normal(n)
    y1 = rng.standard_normal(n)
    z = rho * y + math.sqrt(1.0 - rho * rho) * y1
    return np.column_stack([y, z])


# cell order: (1,1), (1,-1), (-1,1), (-1,-1)
_SQUAREV_Y = np.array([1.0, 1.0, -1.0, -1.0])
_SQUAREV_Z = np.array([1.0, -1.0, 1.0, -1.0])


def _squarev_probs(rho: float) -> np.ndarray:
    p_same = (1.0 + rho) / 4.0
    p_diff = (1.0 - rho) / 4.0
    return np.array([p_same, p_diff, p_diff, p_same])


def sample_squarev(rho: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n pairs from the vertex law via inverse-cdf on one uniform per pair."""
    cum = np.cumsum(_squarev_probs(rho))
    cells = np.searchsorted(cum, rng.random(n), side="right")
    cells = np.minimum(cells, 3)
    return np.column_stack([_SQUAREV_Y[cells], _SQUAREV_Z[cells]])


def sample_squarev_via_bvn(rho: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Alternate path: signs of a BVN pair with theta = cos(pi (1 - rho) / 2)."""
    theta = math.cos(math.pi * (1.0 - rho) / 2.0)
    uv = sample_bvn(theta, n, rng)
    out = np.where(uv >= 0.0, 1.0, -1.0)
    return out


@dataclass(frozen=True)
class DependenceModel:
    """A correlation-parametrized model: moments, sampler, closed forms."""

    name: str
    moments: MomentSpec
    sampler: Callable[[float, int, np.random.Generator], np.ndarray]
    exponent: Callable[[float], float]   # p_z (BVN) or q_z (SquareV)

    def sigma(self, rho: float) -> float:
        from .pearson import sigma_rho
        return sigma_rho(self.moments, rho)


@dataclass(frozen=True)
class BetaInterval:
    """Open interval of significance levels, within (0, 0.5)."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError("BetaInterval requires lo < hi")


def _p_z(z: float) -> float:
    return 1.0 / (2.0 * z * z) - 1.0


def _q_z(z: float) -> float:
    return 1.0 / (3.0 * z * z) - 1.0 / 3.0


BVN = DependenceModel(
    name="bvn",
    moments=MomentSpec(bvn_moments),
    sampler=sample_bvn,
    exponent=_p_z,
)

SQUAREV = DependenceModel(
    name="squarev",
    moments=MomentSpec(squarev_moments),
    sampler=sample_squarev,
    exponent=_q_z,
)

_MODELS = {"bvn": BVN, "squarev": SQUAREV}


def get_model(name: str) -> DependenceModel:
    try:
        return _MODELS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected bvn or squarev")


def optimal_exponent(model: DependenceModel, z: float) -> float:
    if z == 0.0:
        raise ValueError("optimal exponent requires z != 0")
    return model.exponent(z)


def psi_closed(model: DependenceModel, z: float, rho: float) -> float:
    """Closed-form optimal transform rho * 2F1(1/2, -p; 3/2; rho^2).

    p is the model's exponent at z.  Endpoints |rho| = 1 take the finite
    gamma-ratio value (BVN exponents stay above -1 for all z != 0).
    """
    p = optimal_exponent(model, z)
    if abs(rho) > 1.0:
        raise ValueError("psi_closed requires |rho| <= 1")
    if abs(rho) == 1.0:
        return math.copysign(gamma_ratio_endpoint(p), rho)
    return rho * gauss_2f1_half(p, rho * rho)


def fisher(rho: float) -> float:
    """Fisher z-transform, extended to +/-inf at the endpoints."""
    if rho >= 1.0:
        return math.inf
    if rho <= -1.0:
        return -math.inf
    return 0.5 * math.log((1.0 + rho) / (1.0 - rho))


def optimal_transform_closed(model: DependenceModel, z: float) -> Transform:
    """Closed-form optimal Transform for the given critical value z."""
    p = optimal_exponent(model, z)

    def psi(r: float) -> float:
        return psi_closed(model, z, r)

    def dpsi(r: float) -> float:
        return (1.0 - r * r) ** p

    def d2psi(r: float) -> float:
        return p * (1.0 - r * r) ** (p - 1.0) * (-2.0 * r)

    return Transform("optimal", psi, dpsi, d2psi, z_ref=z)


def transform_for(model: DependenceModel, kind: str,
                  z_ref: float | None = None) -> Transform:
    """Build the Transform named by kind ("identity", "fisher", "optimal")."""
    if kind == "identity":
        return identity_transform()
    if kind == "fisher":
        return fisher_transform()
    if kind == "optimal":
        if z_ref is None:
            raise ValueError("optimal transform requires z_ref")
        return optimal_transform_closed(model, z_ref)
    raise ValueError(f"unknown transform kind {kind!r}")


def delta_closed(model: DependenceModel, kind: str, z: float, rho: float,
                 z_ref: float | None = None) -> float:
    """Closed-form leading error term Delta_psi(z), phi(z) factor included."""
    t = z * z
    if model.name == "bvn":
        if kind == "identity":
            shape = 0.5 * rho * (2.0 * t - 1.0)
        elif kind == "fisher":
            shape = -0.5 * rho
        elif kind == "optimal":
            if z_ref is None:
                raise ValueError("delta_closed(optimal) requires z_ref")
            shape = 0.5 * rho * (t / (z_ref * z_ref) - 1.0)
        else:
            raise ValueError(f"unsupported transform kind {kind!r}")
    elif model.name == "squarev":
        base = rho / (3.0 * math.sqrt(1.0 - rho * rho))
        if kind == "identity":
            shape = base * (t - 1.0)
        elif kind == "fisher":
            shape = -base * (2.0 * t + 1.0)
        elif kind == "optimal":
            if z_ref is None:
                raise ValueError("delta_closed(optimal) requires z_ref")
            shape = base * (t / (z_ref * z_ref) - 1.0)
        else:
            raise ValueError(f"unsupported transform kind {kind!r}")
    else:
        raise ValueError(f"no closed form for model {model.name!r}")
    return shape * normal_pdf(z)


def _delta_shape(model: DependenceModel, kind: str, t: float,
                 t_alpha: float) -> float:
    """Delta / (phi(z) * odd-rho factor) as a function of t = z^2."""
    if model.name == "bvn":
        if kind == "identity":
            return 0.5 * (2.0 * t - 1.0)
        if kind == "fisher":
            return -0.5
        return 0.5 * (t / t_alpha - 1.0)
    if kind == "identity":
        return t - 1.0
    if kind == "fisher":
        return -(2.0 * t + 1.0)
    return t / t_alpha - 1.0


def dominance_range(model: DependenceModel, alpha: float,
                    competitor: str) -> BetaInterval:
    """Maximal beta-interval on which the alpha-optimal transform beats the
    competitor ("identity" or "fisher") in |Delta(z_beta)|; rho-independent.
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    if competitor not in ("identity", "fisher"):
        raise ValueError("competitor must be identity or fisher")
    t_alpha = normal_quantile(1.0 - alpha) ** 2

    def gap(t: float) -> float:
        return (abs(_delta_shape(model, "optimal", t, t_alpha))
                - abs(_delta_shape(model, competitor, t, t_alpha)))

    # gap < 0 where the optimal transform dominates; it is piecewise linear
    # in t, so bisection between grid sign changes is exact enough.
    t_lo_cap, t_hi_cap = 1e-8, 50.0
    grid = np.linspace(t_lo_cap, t_hi_cap, 20_001)
    vals = np.array([gap(t) for t in grid])
    if gap(t_alpha) >= 0.0:
        raise RuntimeError("optimal transform must dominate at its own alpha")

    def bisect(lo: float, hi: float) -> float:
        flo = gap(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fmid = gap(mid)
            if abs(fmid) < 1e-12:
                return mid
            if (flo < 0.0) == (fmid < 0.0):
                lo, flo = mid, fmid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    idx = int(np.searchsorted(grid, t_alpha))
    # expand left from t_alpha to the nearest sign change
    lo_t = t_lo_cap
    for i in range(idx - 1, 0, -1):
        if vals[i] >= 0.0:
            lo_t = bisect(grid[i], grid[i + 1])
            break
    hi_t = t_hi_cap
    for i in range(idx, len(grid) - 1):
        if vals[i + 1] >= 0.0:
            hi_t = bisect(grid[i + 1], grid[i])
            break
    # map t = z_beta^2 back to beta = 1 - Phi(sqrt(t)); order reverses
    beta_hi = 0.5 if lo_t <= t_lo_cap else 1.0 - normal_cdf(math.sqrt(lo_t))
    beta_lo = 0.0 if hi_t >= t_hi_cap else 1.0 - normal_cdf(math.sqrt(hi_t))
    return BetaInterval(beta_lo, beta_hi)


def fisher_dominance_threshold(model: DependenceModel) -> float:
    """Largest alpha whose alpha-optimal transform beats Fisher's transform
    in |Delta(z_beta)| at every level beta in (0, 0.5); 0.0 if none does.

    Works in t = z_beta^2, where both error shapes are piecewise linear:
    dominance over all beta requires gap < 0 on a bounded window plus a
    non-positive slope difference beyond the last breakpoint (the beta
    parametrization underflows long before the tail behavior is settled).
    """
    def dominates_all(alpha: float) -> bool:
        t_alpha = normal_quantile(1.0 - alpha) ** 2
        T = 10.0 * max(t_alpha, 1.0)

        def gap(t: float) -> float:
            return (abs(_delta_shape(model, "optimal", t, t_alpha))
                    - abs(_delta_shape(model, "fisher", t, t_alpha)))

        if any(gap(t) >= 0.0 for t in np.linspace(1e-8, T, 2001)[1:]):
            return False
        return gap(T + 1.0) - gap(T) <= 0.0

    lo, hi = 1e-6, 0.5 - 1e-6
    if not dominates_all(lo):
        return 0.0
    if dominates_all(hi):
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if dominates_all(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _log_factorials(n: int) -> tuple[float, ...]:
    return tuple(log_gamma(k + 1.0) for k in range(n + 1))


def squarev_exact_rejection(rho: float, n: int, t: Transform,
                            alpha: float) -> float:
    """Exact rejection probability of the one-sided test under SquareV.

    Enumerates all multinomial cell-count vectors over the four vertices,
    computes R (value 0 on a degenerate denominator) and tau with the true
    sigma = sqrt(1 - rho^2), and sums the probabilities of tau > z_alpha.
    """
    if n > 200:
        raise ValueError("exact enumeration limited to n <= 200")
    if n < 1:
        raise ValueError("n must be >= 1")
    probs = _squarev_probs(rho)
    logs = np.log(np.maximum(probs, 1e-300))
    lf = _log_factorials(n)
    z_alpha = normal_quantile(1.0 - alpha)
    sigma = math.sqrt(1.0 - rho * rho)
    sqrt_n = math.sqrt(n)
    psi_rho = t.psi(rho)
    dpsi_rho = t.dpsi(rho)
    total = 0.0
    for n11 in range(n + 1):
        for n1m in range(n - n11 + 1):
            for nm1 in range(n - n11 - n1m + 1):
                nmm = n - n11 - n1m - nm1
                r = _squarev_r(n11, n1m, nm1, nmm, n)
                psi_r = t.psi(r)
                if math.isinf(psi_r):
                    tau_val = psi_r
                else:
                    tau_val = (psi_r - psi_rho) * sqrt_n / (dpsi_rho * sigma)
                if tau_val > z_alpha:
                    logp = (lf[n] - lf[n11] - lf[n1m] - lf[nm1] - lf[nmm]
                            + n11 * logs[0] + n1m * logs[1]
                            + nm1 * logs[2] + nmm * logs[3])
                    total += math.exp(logp)
    return min(1.0, total)


def _squarev_r(n11: int, n1m: int, nm1: int, nmm: int, n: int) -> float:
    """Pearson R of a four-vertex sample given its cell counts."""
    ybar = (n11 + n1m - nm1 - nmm) / n
    zbar = (n11 - n1m + nm1 - nmm) / n
    yzbar = (n11 - n1m - nm1 + nmm) / n
    vy = 1.0 - ybar * ybar
    vz = 1.0 - zbar * zbar
    if vy <= 0.0 or vz <= 0.0:
        return 0.0
    r = (yzbar - ybar * zbar) / math.sqrt(vy * vz)
    return min(1.0, max(-1.0, r))
