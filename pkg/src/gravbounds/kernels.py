"""Hot numeric kernels: Airy evaluation and the free-fall propagator sum.

Every kernel has a numba implementation (``*_nb``) and a vectorised numpy
implementation (``*_np``). The public wrappers pick one according to
:data:`gravbounds._accel.NUMBA_ENABLED`; both stay importable so the
benchmark and the tests can compare them.

Airy strategy
-------------
Ai and Ai' are tabulated on nodes ``TABLE_LO + j * TABLE_STEP`` covering
[-10, 12] and re-expanded in a Taylor series of the Airy ODE about the nearest
node. Outside the table the standard asymptotic expansions are used. The
table itself is grown from two accurately known anchors:

* downward from y = 0 (exact Maclaurin constants), where both Airy solutions
  oscillate and forward stepping is stable;
* downward from y = 12 (decaying asymptotic series, error ~ e^{-55}), where
  stepping toward smaller y is the stable direction for the recessive Ai.

A plain Maclaurin/asymptotic split cannot reach 1e-12 absolute accuracy in
4 < |y| < 8 in double precision, hence the re-expansion.
"""

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit, prange

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840

TABLE_LO = -10.0
TABLE_HI = 12.0
TABLE_STEP = 0.125
_N_NODES = int(round((TABLE_HI - TABLE_LO) / TABLE_STEP)) + 1
_BUILD_TERMS = 40
EVAL_TERMS = 22
_ASYM_TERMS = 40

_SQRT_PI = math.sqrt(math.pi)


def _asymptotic_coefficients(n):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = 1.0
    v[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


ASYM_U, ASYM_V = _asymptotic_coefficients(_ASYM_TERMS)


@njit
def _series_sum(coef, zeta, alternate, start, stride):
    # sum_k (+-1)^k coef[start + stride*k] / zeta^(start + stride*k), stopped at the
    # smallest term (optimal truncation) or below 1e-18.
    total = 0.0
    prev = 1e300
    sign = 1.0
    idx = start
    while idx < coef.shape[0]:
        term = coef[idx] / zeta ** idx
        if abs(term) > prev:
            break
        total += sign * term
        if abs(term) < 1e-18 * (abs(total) + 1e-300):
            break
        prev = abs(term)
        if alternate:
            sign = -sign
        idx += stride
    return total


@njit
def airy_asym_pos(y):
    """Decaying expansion for large positive y. Returns (Ai, Ai')."""
    zeta = 2.0 / 3.0 * y * math.sqrt(y)
    e = math.exp(-zeta)
    q = y ** 0.25
    su = _series_sum(ASYM_U, zeta, True, 0, 1)
    sv = _series_sum(ASYM_V, zeta, True, 0, 1)
    return e / (2.0 * _SQRT_PI * q) * su, -q * e / (2.0 * _SQRT_PI) * sv


@njit
def airy_asym_neg(y):
    """Oscillatory expansion for large negative y. Returns (Ai, Ai')."""
    x = -y
    zeta = 2.0 / 3.0 * x * math.sqrt(x)
    q = x ** 0.25
    c = math.cos(zeta - math.pi / 4.0)
    s = math.sin(zeta - math.pi / 4.0)
    pu = _series_sum(ASYM_U, zeta, True, 0, 2)
    qu = _series_sum(ASYM_U, zeta, True, 1, 2)
    pv = _series_sum(ASYM_V, zeta, True, 0, 2)
    qv = _series_sum(ASYM_V, zeta, True, 1, 2)
    ai = (c * pu + s * qu) / (_SQRT_PI * q)
    aip = q / _SQRT_PI * (s * pv - c * qv)
    return ai, aip


@njit
def taylor_step(x0, a0, a1, h, nterms):
    """Advance (Ai, Ai') from x0 to x0 + h with the ODE's Taylor recurrence."""
    cm1 = 0.0
    c0 = a0
    c1 = a1
    val = c0 + c1 * h
    der = c1
    hp = h  # h^(n-1) for the derivative of the next term
    for n in range(0, nterms - 2):
        c2 = (x0 * c0 + cm1) / ((n + 2.0) * (n + 1.0))
        der += (n + 2.0) * c2 * hp
        hp *= h
        val += c2 * hp
        cm1 = c0
        c0 = c1
        c1 = c2
    return val, der


def _build_table():
    # plain-python versions so importing never triggers a compile
    step = getattr(taylor_step, "py_func", taylor_step)
    asym = getattr(airy_asym_pos, "py_func", airy_asym_pos)
    ai = np.empty(_N_NODES)
    aip = np.empty(_N_NODES)
    j0 = int(round(-TABLE_LO / TABLE_STEP))
    ai[j0], aip[j0] = AI0, AIP0
    for j in range(j0, 0, -1):
        ai[j - 1], aip[j - 1] = step(TABLE_LO + j * TABLE_STEP, ai[j], aip[j],
                                     -TABLE_STEP, _BUILD_TERMS)
    last = _N_NODES - 1
    ai[last], aip[last] = asym(TABLE_HI)
    for j in range(last, j0 + 1, -1):
        ai[j - 1], aip[j - 1] = step(TABLE_LO + j * TABLE_STEP, ai[j], aip[j],
                                     -TABLE_STEP, _BUILD_TERMS)
    # seam between the two sweeps, kept for diagnostics
    seam = step(TABLE_LO + (j0 + 1) * TABLE_STEP, ai[j0 + 1], aip[j0 + 1],
                -TABLE_STEP, _BUILD_TERMS)
    return ai, aip, (seam[0] - AI0, seam[1] - AIP0)


TABLE_AI, TABLE_AIP, TABLE_SEAM_ERROR = _build_table()


@njit
def airy_scalar_nb(y):
    if y > TABLE_HI:
        return airy_asym_pos(y)
    if y < TABLE_LO:
        return airy_asym_neg(y)
    j = int(math.floor((y - TABLE_LO) / TABLE_STEP + 0.5))
    x0 = TABLE_LO + j * TABLE_STEP
    return taylor_step(x0, TABLE_AI[j], TABLE_AIP[j], y - x0, EVAL_TERMS)


@njit(parallel=True)
def airy_nb(y):
    n = y.shape[0]
    ai = np.empty(n)
    aip = np.empty(n)
    for i in prange(n):
        a, b = airy_scalar_nb(y[i])
        ai[i] = a
        aip[i] = b
    return ai, aip


def _series_sum_np(coef, zeta, start, stride):
    total = np.zeros_like(zeta)
    prev = np.full_like(zeta, np.inf)
    active = np.ones(zeta.shape, dtype=bool)
    sign = 1.0
    for idx in range(start, coef.shape[0], stride):
        term = np.abs(coef[idx] / zeta ** idx)
        active &= term <= prev
        total = np.where(active, total + sign * term * np.sign(coef[idx]), total)
        prev = term
        sign = -sign
    return total


def _asym_pos_np(y):
    zeta = 2.0 / 3.0 * y * np.sqrt(y)
    e = np.exp(-zeta)
    q = y ** 0.25
    su = _series_sum_np(ASYM_U, zeta, 0, 1)
    sv = _series_sum_np(ASYM_V, zeta, 0, 1)
    return e / (2.0 * _SQRT_PI * q) * su, -q * e / (2.0 * _SQRT_PI) * sv


def _asym_neg_np(y):
    x = -y
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    q = x ** 0.25
    c = np.cos(zeta - np.pi / 4.0)
    s = np.sin(zeta - np.pi / 4.0)
    pu = _series_sum_np(ASYM_U, zeta, 0, 2)
    qu = _series_sum_np(ASYM_U, zeta, 1, 2)
    pv = _series_sum_np(ASYM_V, zeta, 0, 2)
    qv = _series_sum_np(ASYM_V, zeta, 1, 2)
    return (c * pu + s * qu) / (_SQRT_PI * q), q / _SQRT_PI * (s * pv - c * qv)


def _taylor_np(x0, a0, a1, h, nterms):
    cm1 = np.zeros_like(h)
    c0 = a0.copy()
    c1 = a1.copy()
    val = c0 + c1 * h
    der = c1.copy()
    hp = h.copy()
    for n in range(nterms - 2):
        c2 = (x0 * c0 + cm1) / ((n + 2.0) * (n + 1.0))
        der += (n + 2.0) * c2 * hp
        hp = hp * h
        val += c2 * hp
        cm1, c0, c1 = c0, c1, c2
    return val, der


def airy_np(y):
    y = np.asarray(y, dtype=float)
    ai = np.empty_like(y)
    aip = np.empty_like(y)
    hi = y > TABLE_HI
    lo = y < TABLE_LO
    mid = ~(hi | lo)
    if hi.any():
        ai[hi], aip[hi] = _asym_pos_np(y[hi])
    if lo.any():
        ai[lo], aip[lo] = _asym_neg_np(y[lo])
    if mid.any():
        ym = y[mid]
        j = np.floor((ym - TABLE_LO) / TABLE_STEP + 0.5).astype(np.int64)
        x0 = TABLE_LO + j * TABLE_STEP
        ai[mid], aip[mid] = _taylor_np(x0, TABLE_AI[j], TABLE_AIP[j], ym - x0, EVAL_TERMS)
    return ai, aip


def airy(y, backend=None):
    """Ai and Ai' of a float array; ``backend`` is ``"numba"``, ``"numpy"`` or None."""
    y = np.ascontiguousarray(y, dtype=float)
    shape = y.shape
    flat = y.reshape(-1)
    use_nb = NUMBA_ENABLED if backend is None else backend == "numba"
    ai, aip = airy_nb(flat) if use_nb else airy_np(flat)
    return ai.reshape(shape), aip.reshape(shape)


# -- propagator sum -----------------------------------------------------------

@njit(parallel=True)
def propagate_nb(x_out, x_in, weighted, m, g, t):
    n_out = x_out.shape[0]
    n_in = x_in.shape[0]
    out = np.empty(n_out, dtype=np.complex128)
    a = m / (2.0 * t)
    b = 0.5 * m * g * t
    c = m * g * g * t ** 3 / 24.0
    for i in prange(n_out):
        xi = x_out[i]
        re = 0.0
        im = 0.0
        for j in range(n_in):
            d = xi - x_in[j]
            ph = a * d * d - b * (xi + x_in[j]) - c
            cr = math.cos(ph)
            si = math.sin(ph)
            w = weighted[j]
            re += cr * w.real - si * w.imag
            im += cr * w.imag + si * w.real
        out[i] = complex(re, im)
    return out


def propagate_np(x_out, x_in, weighted, m, g, t, chunk=256):
    out = np.empty(x_out.shape[0], dtype=complex)
    a = m / (2.0 * t)
    b = 0.5 * m * g * t
    c = m * g * g * t ** 3 / 24.0
    for s in range(0, x_out.shape[0], chunk):
        xo = x_out[s:s + chunk, None]
        ph = a * (xo - x_in[None, :]) ** 2 - b * (xo + x_in[None, :]) - c
        out[s:s + chunk] = np.exp(1j * ph) @ weighted
    return out


def propagate(x_out, x_in, weighted, m, g, t, backend=None):
    """sum_j exp(i S(x_out_i, x_in_j)) * weighted_j, S the free-fall classical action.

    The kernel prefactor sqrt(m / (2 pi i t)) is left to the caller.
    """
    x_out = np.ascontiguousarray(x_out, dtype=float)
    x_in = np.ascontiguousarray(x_in, dtype=float)
    weighted = np.ascontiguousarray(weighted, dtype=complex)
    use_nb = NUMBA_ENABLED if backend is None else backend == "numba"
    if use_nb:
        return propagate_nb(x_out, x_in, weighted, float(m), float(g), float(t))
    return propagate_np(x_out, x_in, weighted, m, g, t)
