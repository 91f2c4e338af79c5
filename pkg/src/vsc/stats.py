"""Paired two-tailed t-test with a self-contained Student-t CDF."""
import math
from dataclasses import dataclass

import numpy as np

from vsc.errors import ParameterError

ALPHA = 0.05
_CF_TOL = 1e-15
_CF_MAX_ITER = 500
_TINY = 1e-300


def _beta_cf(a, b, x):
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b) for a, b > 0, 0 <= x <= 1."""
    if not (a > 0 and b > 0):
        raise ParameterError("betainc needs a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise ParameterError("betainc needs 0 <= x <= 1")
    if x == 0.0 or x == 1.0:
        return float(x)
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_two_tailed_p(t, dof):
    """P(|T| >= |t|) for Student's t with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ParameterError("dof must be positive")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return min(1.0, betainc(dof / 2.0, 0.5, dof / (dof + t2)))


def t_cdf(t, dof):
    p = 0.5 * t_two_tailed_p(t, dof)
    return 1.0 - p if t > 0 else p


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    dof: int
    p_value: float
    alpha: float = ALPHA

    @property
    def significant(self):
        return self.p_value < self.alpha


def paired_t_test(a, b, alpha=ALPHA) -> TTestResult:
    """Paired two-tailed t-test on ``a - b``.

    Identical lists give t = 0, p = 1.  Constant nonzero differences give an
    infinite t and p = 0.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ParameterError(f"paired samples differ in length: {a.size} vs {b.size}")
    n = a.size
    if n < 2:
        raise ParameterError("paired t-test needs at least 2 pairs")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    dof = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, dof, 1.0, alpha)
        return TTestResult(math.copysign(math.inf, mean), dof, 0.0, alpha)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, dof, t_two_tailed_p(t, dof), alpha)
