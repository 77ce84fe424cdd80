"""Special functions, quadrature, differentiation and root finding."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as _sci_integrate

from . import kernels
from .errors import DomainError, NumericError

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class Interval:
    """Integration domain ``[lo, hi]``; either end may be infinite."""

    lo: float
    hi: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise DomainError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")


@dataclass(frozen=True)
class AiryZeroTable:
    """Magnitudes z_1 < z_2 < ... of the zeros -z_n of Ai."""

    zeros: tuple

    def __len__(self):
        return len(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]

    def as_array(self):
        return np.array(self.zeros)


def _check_finite(y):
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy functions need finite arguments")
    return arr


def airy_ai(y):
    """Ai(y) for a scalar or array argument."""
    arr = _check_finite(y)
    ai, _ = kernels.airy(arr)
    return float(ai.reshape(-1)[0]) if arr.ndim == 0 else ai


def airy_ai_prime(y):
    """Ai'(y) for a scalar or array argument."""
    arr = _check_finite(y)
    _, aip = kernels.airy(arr)
    return float(aip.reshape(-1)[0]) if arr.ndim == 0 else aip


def airy_ai_and_prime(y):
    arr = _check_finite(y)
    return kernels.airy(arr)


def _zero_guess(n):
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    return t ** (2.0 / 3.0) * (1.0 + 5.0 / 48.0 / t ** 2 - 5.0 / 36.0 / t ** 4)


def _refine_zero(n, max_iter=50):
    z = _zero_guess(n)
    for _ in range(max_iter):
        ai, aip = kernels.airy(np.array([-z]))
        step = ai[0] / aip[0]  # Newton on z -> Ai(-z)
        z += step
        if abs(step) <= 4e-16 * z:
            return z
    # bisection on a bracket of half the local zero spacing
    guess = _zero_guess(n)
    half = 0.5 * math.pi / math.sqrt(guess)
    lo, hi = guess - half, guess + half
    f_lo = airy_ai(-lo)
    if f_lo * airy_ai(-hi) > 0:
        raise NumericError(f"could not bracket Airy zero index {n}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = airy_ai(-mid)
        if f_mid == 0 or hi - lo < 4e-16 * mid:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise NumericError(f"Airy zero index {n} did not converge")


@lru_cache(maxsize=32)
def airy_zeros(n_max):
    """First ``n_max`` zero magnitudes of Ai, by Newton from the asymptotic guess."""
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max}")
    zeros = tuple(_refine_zero(n) for n in range(1, int(n_max) + 1))
    for i in range(1, len(zeros)):
        if not zeros[i] > zeros[i - 1]:
            raise NumericError(f"Airy zero index {i + 1} out of order")
    return AiryZeroTable(zeros)


def _quad_real(f, lo, hi, tol, limit):
    out = _sci_integrate.quad(f, lo, hi, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)
    value, err = out[0], out[1]
    if len(out) > 3 or err > tol:
        raise NumericError(f"quadrature on [{lo}, {hi}] stopped at error estimate {err:.3e}")
    return value


def integrate(f, iv, limit=500):
    """Adaptive quadrature of a real- or complex-valued scalar function over ``iv``.

    Complex integrands are split into real and imaginary parts, each
    integrated to half the tolerance.
    """
    probe_x = iv.lo if math.isfinite(iv.lo) else (iv.hi if math.isfinite(iv.hi) else 0.0)
    if math.isfinite(iv.lo) and math.isfinite(iv.hi):
        probe_x = 0.5 * (iv.lo + iv.hi)
    if np.iscomplexobj(f(probe_x)):
        re = _quad_real(lambda x: complex(f(x)).real, iv.lo, iv.hi, iv.tol / 2, limit)
        im = _quad_real(lambda x: complex(f(x)).imag, iv.lo, iv.hi, iv.tol / 2, limit)
        return complex(re, im)
    return _quad_real(lambda x: float(f(x)), iv.lo, iv.hi, iv.tol, limit)


def derivative(f, x, h0=None, levels=2):
    """Central difference at ``x`` refined by ``levels`` Richardson steps.

    ``f`` may return a scalar or an array (real or complex); steps are
    ``h0, h0/2, ...``.
    """
    if h0 is None:
        h0 = 1e-4 * max(1.0, abs(x))
    if not h0 > 0:
        raise NumericError(f"step must be positive, got {h0}")
    table = []
    h = h0
    for i in range(levels + 1):
        if x + h == x or x - h == x:
            raise NumericError(f"step {h:.3e} underflows at x={x}")
        row = [(np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2.0 * h)]
        for j in range(1, i + 1):
            prev = table[i - 1][j - 1]
            row.append(row[j - 1] + (row[j - 1] - prev) / (4.0 ** j - 1.0))
        table.append(row)
        h *= 0.5
    result = table[-1][-1]
    return result.item() if np.ndim(result) == 0 else result
