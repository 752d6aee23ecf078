"""Self-contained special functions and integration kernels.

Everything here is a pure function of its arguments and depends only on
``math``/``numpy`` primitives (exp, log, sqrt), so the rest of the library
is insulated from platform math library differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "Tolerance",
    "IntegrationError",
    "normal_pdf",
    "normal_cdf",
    "normal_quantile",
    "gauss_2f1_half",
    "gamma_ratio_endpoint",
    "log_gamma",
    "integrate_adaptive",
    "integrate_ode",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_PI = 5.6418958354775628695e-1
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Tolerance:
    """Error budget for iterative numerical routines."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


class IntegrationError(RuntimeError):
    """Adaptive integrator or ODE stepper failed to converge."""


# ---------------------------------------------------------------------------
# Error function (Cody's rational approximations, abs error < 1e-15)
# ---------------------------------------------------------------------------

_ERF_A = (
    3.16112374387056560e00,
    1.13864154151050156e02,
    3.77485237685302021e02,
    3.20937758913846947e03,
    1.85777706184603153e-1,
)
_ERF_B = (
    2.36012909523441209e01,
    2.44024637934444173e02,
    1.28261652607737228e03,
    2.84423683343917062e03,
)
_ERFC_C = (
    5.64188496988670089e-1,
    8.88314979438837594e00,
    6.61191906371416295e01,
    2.98635138197400131e02,
    8.81952221241769090e02,
    1.71204761263407058e03,
    2.05107837782607147e03,
    1.23033935479799725e03,
    2.15311535474403846e-8,
)
_ERFC_D = (
    1.57449261107098347e01,
    1.17693950891312499e02,
    5.37181101862009858e02,
    1.62138957456669019e03,
    3.29079923573345963e03,
    4.36261909014324716e03,
    3.43936767414372164e03,
    1.23033935480374942e03,
)
_ERFC_P = (
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
)
_ERFC_Q = (
    2.56852019228982242e00,
    1.87295284992346047e00,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
)


def _erf_small(x: float) -> float:
    # |x| <= 0.46875
    y = abs(x)
    z = y * y
    num = _ERF_A[4] * z
    den = z
    for i in range(3):
        num = (num + _ERF_A[i]) * z
        den = (den + _ERF_B[i]) * z
    return x * (num + _ERF_A[3]) / (den + _ERF_B[3])


def _erfc_mid(y: float) -> float:
    # 0.46875 < y <= 4
    num = _ERFC_C[8] * y
    den = y
    for i in range(7):
        num = (num + _ERFC_C[i]) * y
        den = (den + _ERFC_D[i]) * y
    result = (num + _ERFC_C[7]) / (den + _ERFC_D[7])
    ysq = math.floor(y * 16.0) / 16.0
    del2 = (y - ysq) * (y + ysq)
    return math.exp(-ysq * ysq) * math.exp(-del2) * result


def _erfc_large(y: float) -> float:
    # y > 4
    z = 1.0 / (y * y)
    num = _ERFC_P[5] * z
    den = z
    for i in range(4):
        num = (num + _ERFC_P[i]) * z
        den = (den + _ERFC_Q[i]) * z
    result = z * (num + _ERFC_P[4]) / (den + _ERFC_Q[4])
    result = (_INV_SQRT_PI - result) / y
    ysq = math.floor(y * 16.0) / 16.0
    del2 = (y - ysq) * (y + ysq)
    return math.exp(-ysq * ysq) * math.exp(-del2) * result


def _erfc(x: float) -> float:
    y = abs(x)
    if y <= 0.46875:
        return 1.0 - _erf_small(x)
    if y <= 4.0:
        val = _erfc_mid(y)
    elif y < 26.5:
        val = _erfc_large(y)
    else:
        val = 0.0
    return val if x > 0.0 else 2.0 - val


def normal_pdf(z: float) -> float:
    """Standard normal density phi(z)."""
    if not math.isfinite(z):
        raise ValueError("normal_pdf requires finite z")
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def normal_cdf(z: float) -> float:
    """Standard normal cdf Phi(z); absolute error below 1e-12 on |z| <= 8."""
    if math.isnan(z):
        raise ValueError("normal_cdf: z is NaN")
    if z == math.inf:
        return 1.0
    if z == -math.inf:
        return 0.0
    return 0.5 * _erfc(-z / _SQRT2)


# Acklam's rational approximation, polished by Newton steps below.
_QNT_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_QNT_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_QNT_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_QNT_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


def _quantile_guess(p: float) -> float:
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        a, b, c, d, e, f = _QNT_C
        return (((((a * q + b) * q + c) * q + d) * q + e) * q + f) / (
            (((_QNT_D[0] * q + _QNT_D[1]) * q + _QNT_D[2]) * q + _QNT_D[3]) * q + 1.0
        )
    if p > 1.0 - p_low:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        a, b, c, d, e, f = _QNT_C
        return -(((((a * q + b) * q + c) * q + d) * q + e) * q + f) / (
            (((_QNT_D[0] * q + _QNT_D[1]) * q + _QNT_D[2]) * q + _QNT_D[3]) * q + 1.0
        )
    q = p - 0.5
    r = q * q
    a, b, c, d, e, f = _QNT_A
    num = ((((a * r + b) * r + c) * r + d) * r + e) * r + f
    den = ((((_QNT_B[0] * r + _QNT_B[1]) * r + _QNT_B[2]) * r + _QNT_B[3]) * r
           + _QNT_B[4]) * r + 1.0
    return q * num / den


def normal_quantile(p: float) -> float:
    """Inverse of ``normal_cdf``; consistent with it to better than 1e-12."""
    if not 0.0 < p < 1.0:
        raise ValueError("normal_quantile requires 0 < p < 1")
    z = _quantile_guess(p)
    # Two Newton steps against the in-repo cdf keep cdf/quantile consistent.
    for _ in range(2):
        err = normal_cdf(z) - p
        d = normal_pdf(z)
        if d > 0.0:
            z -= err / d
    return z


# ---------------------------------------------------------------------------
# Log-gamma (Lanczos, g = 7, 9 coefficients) and the endpoint ratio
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0 (Lanczos approximation)."""
    if x <= 0.0:
        raise ValueError("log_gamma requires x > 0")
    if x < 0.5:
        # reflection keeps the Lanczos argument in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, 9):
        acc += _LANCZOS_C[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def gamma_ratio_endpoint(p: float) -> float:
    """sqrt(pi) Gamma(p+1) / (2 Gamma(p+3/2)) = integral of (1-r^2)^p over [0,1]."""
    if p <= -1.0:
        raise ValueError("gamma_ratio_endpoint requires p > -1")
    return 0.5 * math.exp(
        0.5 * math.log(math.pi) + log_gamma(p + 1.0) - log_gamma(p + 1.5)
    )


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature (7-15 pair, interval bisection)
# ---------------------------------------------------------------------------

_K15_NODES = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
_K15_W = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_G7_W = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """Kronrod-15 estimate over [a, b] and its error estimate vs Gauss-7."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    k = _K15_W[7] * fc
    g = _G7_W[3] * fc
    for i in range(7):
        x = h * _K15_NODES[i]
        fsum = f(c - x) + f(c + x)
        k += _K15_W[i] * fsum
        if i % 2 == 1:  # odd Kronrod indices are the Gauss-7 nodes
            g += _G7_W[i // 2] * fsum
    k *= h
    g *= h
    return k, abs(k - g)


def integrate_adaptive(
    f: Callable[[float], float], a: float, b: float, tol: Tolerance = Tolerance()
) -> float:
    """Integrate f over [a, b] to within tol.abs_tol + tol.rel_tol * |I|."""
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    val, err = _gk15(f, a, b)
    segments = [(a, b, val, err)]
    for _ in range(tol.max_iter):
        total = math.fsum(s[2] for s in segments)
        total_err = math.fsum(s[3] for s in segments)
        if total_err <= tol.abs_tol + tol.rel_tol * abs(total):
            return sign * total
        worst = max(range(len(segments)), key=lambda i: segments[i][3])
        lo, hi, _, _ = segments.pop(worst)
        mid = 0.5 * (lo + hi)
        vl, el = _gk15(f, lo, mid)
        vr, er = _gk15(f, mid, hi)
        segments.append((lo, mid, vl, el))
        segments.append((mid, hi, vr, er))
    raise IntegrationError(
        f"quadrature did not converge within {tol.max_iter} subdivisions"
    )


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1(1/2, -p; 3/2; x)
# ---------------------------------------------------------------------------

_2F1_SERIES_CUTOFF = 0.95


def gauss_2f1_half(p: float, x: float) -> float:
    """2F1(1/2, -p; 3/2; x) for 0 <= x < 1, p > -1.

    Term-recurrence series for x <= 0.95; for larger x the series converges
    too slowly and the value is recovered from the integral representation
    integral_0^sqrt(x) (1-r^2)^p dr / sqrt(x) by adaptive quadrature.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError("gauss_2f1_half requires 0 <= x < 1")
    if p <= -1.0:
        raise ValueError("gauss_2f1_half requires p > -1")
    if x == 0.0:
        return 1.0
    if x <= _2F1_SERIES_CUTOFF:
        total = term = 1.0
        for k in range(100_000):
            term *= (0.5 + k) * (-p + k) * x / ((1.5 + k) * (k + 1.0))
            total += term
            if abs(term) < 1e-15 * abs(total):
                return total
        raise IntegrationError("2F1 series did not converge in 1e5 terms")
    s = math.sqrt(x)
    integral = integrate_adaptive(
        lambda r: (1.0 - r * r) ** p, 0.0, s, Tolerance(1e-14, 1e-13, 10_000)
    )
    return integral / s


# ---------------------------------------------------------------------------
# Adaptive Runge-Kutta (Dormand-Prince 5(4)) for small ODE systems
# ---------------------------------------------------------------------------

_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
          11.0 / 84.0, 0.0)
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)


def integrate_ode(
    rhs: Callable[[float, tuple[float, ...]], tuple[float, ...]],
    t0: float,
    y0: tuple[float, ...],
    t1: float,
    tol: Tolerance = Tolerance(1e-12, 1e-12, 100_000),
) -> tuple[float, ...]:
    """Integrate y' = rhs(t, y) from t0 to t1 with Dormand-Prince 5(4)."""
    if t1 == t0:
        return tuple(y0)
    dim = len(y0)
    direction = 1.0 if t1 > t0 else -1.0
    t = t0
    y = list(y0)
    h = direction * min(1e-2, abs(t1 - t0))
    for _ in range(tol.max_iter):
        if direction * (t + h - t1) > 0.0:
            h = t1 - t
        ks: list[tuple[float, ...]] = []
        for stage in range(7):
            yi = list(y)
            for j, aij in enumerate(_DP_A[stage]):
                if aij != 0.0:
                    for d in range(dim):
                        yi[d] += h * aij * ks[j][d]
            ks.append(rhs(t + _DP_C[stage] * h, tuple(yi)))
        y5 = [y[d] + h * sum(_DP_B5[s] * ks[s][d] for s in range(7))
              for d in range(dim)]
        y4 = [y[d] + h * sum(_DP_B4[s] * ks[s][d] for s in range(7))
              for d in range(dim)]
        err = 0.0
        for d in range(dim):
            scale = tol.abs_tol + tol.rel_tol * max(abs(y[d]), abs(y5[d]))
            err = max(err, abs(y5[d] - y4[d]) / scale)
        if err <= 1.0:
            t += h
            y = y5
            if t == t1:
                return tuple(y)
        # standard PI-free step adjustment with safety factor
        factor = 0.9 * (err ** -0.2) if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
    raise IntegrationError(
        f"ODE integration did not converge within {tol.max_iter} steps"
    )
