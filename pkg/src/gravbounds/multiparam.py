"""Joint estimation of (g, m): QFI matrix, Uhlmann curvature and quantumness measures.

Parameter 1 is g and parameter 2 is m throughout. R and T are computed after
a diagonal rescaling H -> S H S with S = diag(1/sqrt(H_ii)); both measures are
invariant under it, and it keeps the extreme-parameter matrices well scaled.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .freefall import PhysParams, evolved_state
from .numerics import derivative
from .qfi import REL_STEP, h_loc_closed
from .states import DEFAULT_POINTS, GaussianSpec, WaveGrid, inner_product, uniform_grid

MASS_REL_STEP = 1e-5
FORM_TOL = 1e-10
REFERENCE_PARAMS = {"gravity": 2.15e-32, "mass": 9.31, "width": 5.1e-6}
W_GRID = (1e-6, 1.0, 1e6)


@dataclass(frozen=True)
class Overlaps2:
    """a = <d1 psi|psi>, b = <d2 psi|psi>, c = <d1 psi|d2 psi>, alpha, beta the squared norms."""

    a: complex
    b: complex
    c: complex
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("derivative norms must be non-negative")
        if abs(self.c) ** 2 > self.alpha * self.beta * (1.0 + 1e-9) + 1e-300:
            raise NumericError("overlaps violate Cauchy-Schwarz")


@dataclass(frozen=True, eq=False)
class Bound2x2:
    h: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        d = np.array(self.d, dtype=float)
        if h.shape != (2, 2) or d.shape != (2, 2):
            raise DomainError("need 2x2 matrices")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(d))):
            raise NumericError("non-finite QFI or curvature entry")
        if h[0, 1] != h[1, 0] or d[0, 1] != -d[1, 0] or d[0, 0] != 0 or d[1, 1] != 0:
            raise DomainError("h must be symmetric and d antisymmetric")
        h.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class WeightSpec:
    """Diagonal weight Diag(1, w)."""

    w: float = 1.0

    def __post_init__(self):
        if not self.w >= 0:
            raise DomainError(f"weight must be non-negative, got {self.w}")

    def matrix(self):
        return np.diag([1.0, self.w])


def overlaps(psi, dpsi_g, dpsi_m):
    for v in (dpsi_g, dpsi_m):
        if not psi.same_grid(v):
            raise DomainError("states must share one grid")
    return Overlaps2(
        a=inner_product(dpsi_g, psi),
        b=inner_product(dpsi_m, psi),
        c=inner_product(dpsi_g, dpsi_m),
        alpha=inner_product(dpsi_g, dpsi_g).real,
        beta=inner_product(dpsi_m, dpsi_m).real,
    )


def _connected(o):
    # <d_mu psi|d_nu psi> - <d_mu psi|psi><psi|d_nu psi>
    return (o.alpha - abs(o.a) ** 2, o.c - o.a * np.conj(o.b), o.beta - abs(o.b) ** 2)


def qfi_matrix(o):
    """4 Re of the connected overlap matrix; each diagonal entry is a one-parameter QFI."""
    c11, c12, c22 = _connected(o)
    off = 4.0 * float(np.real(c12))
    return np.array([[4.0 * c11, off], [off, 4.0 * c22]])


def uhlmann_matrix(o):
    """4 Im of the connected overlap matrix (antisymmetric)."""
    d12 = 4.0 * float(np.imag(_connected(o)[1]))
    return np.array([[0.0, d12], [-d12, 0.0]])


def bound_from_overlaps(o):
    return Bound2x2(qfi_matrix(o), uhlmann_matrix(o))


def _det2(h):
    return h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]


def scalar_bound(h, w):
    """C^S = Tr[W H^{-1}] with W = Diag(1, w)."""
    h = np.asarray(h, dtype=float)
    det = _det2(h)
    if not det > 1e-14 * abs(h[0, 0] * h[1, 1]) or not det > 0:
        raise DomainError("QFI matrix is singular")
    return (h[1, 1] + w.w * h[0, 0]) / det


def _rescaled(h, d):
    h = np.asarray(h, dtype=float)
    d = np.asarray(d, dtype=float)
    if not (h[0, 0] > 0 and h[1, 1] > 0):
        raise DomainError("QFI matrix must be positive definite")
    s = 1.0 / np.sqrt(np.diag(h))
    hs = h * np.outer(s, s)
    ds = d * np.outer(s, s)
    q = hs[0, 1] * hs[1, 0]
    if not q < 1.0:
        raise DomainError("QFI matrix must be positive definite")
    return hs, ds, s, q


def log_r_quantumness(h, d):
    """Natural log of R = sqrt(det D / det H) (-inf when D = 0)."""
    hs, ds, _, q = _rescaled(h, d)
    if ds[0, 1] == 0:
        return -math.inf
    return math.log(abs(ds[0, 1])) - 0.5 * math.log1p(-q)


def r_quantumness(h, d):
    """R = ||i H^{-1} D||_inf, checked against sqrt(det D / det H)."""
    hs, ds, _, q = _rescaled(h, d)
    by_det = math.exp(log_r_quantumness(h, d))
    by_norm = float(np.max(np.abs(np.linalg.eigvals(1j * np.linalg.solve(hs, ds)))))
    if abs(by_norm - by_det) > FORM_TOL * max(by_det, by_norm) + 1e-300:
        raise NumericError(f"R forms disagree: {by_norm!r} vs {by_det!r}")
    return by_det


def t_quantumness_closed(h, d, w):
    """2 sqrt(w) |D_12| / (H_22 + w H_11)."""
    h = np.asarray(h, dtype=float)
    return 2.0 * math.sqrt(w.w) * abs(d[0, 1]) / (h[1, 1] + w.w * h[0, 0])


def t_quantumness(h, d, w):
    """T(W) = ||sqrt(W) H^-1 D H^-1 sqrt(W)||_1 / C^S(W), checked against the closed form."""
    hs, ds, s, _ = _rescaled(h, d)
    if w.w == 0 or ds[0, 1] == 0:
        return 0.0
    # W' = S W S in rescaled coordinates
    sw = np.sqrt(np.array([1.0, w.w]) * s * s)
    hinv = np.linalg.inv(hs)
    core = sw[:, None] * (hinv @ ds @ hinv) * sw[None, :]
    trace_norm = float(np.sum(np.linalg.svd(core, compute_uv=False)))
    cs = float(np.sum(sw * sw * np.diag(hinv)))
    by_norm = trace_norm / cs
    # closed form, rescaled to avoid overflow
    by_closed = 2.0 * math.sqrt(w.w) * abs(ds[0, 1]) * s[0] * s[1] / (
        s[0] ** 2 + w.w * s[1] ** 2)
    if abs(by_norm - by_closed) > FORM_TOL * max(by_norm, by_closed) + 1e-300:
        raise NumericError(f"T forms disagree: {by_norm!r} vs {by_closed!r}")
    return float(by_closed)


def analytic_matrices(g, m, sigma, t, p0=0.0):
    """QFI matrix and Uhlmann curvature of a Gaussian probe for (g, m), from the generators.

    The initial state depends on neither parameter; d_g and d_m of the
    evolved state are -i U G psi0 with
    G_g = -(m t x + t^2 p / 2) and G_m = t p^2 / (2 m^2) - g t^2 p / m - g t x,
    so H is four times the symmetrised covariance of (G_g, G_m) on psi0.
    """
    if not (m > 0 and sigma > 0 and t >= 0 and g >= 0):
        raise DomainError("need m > 0, sigma > 0, t >= 0, g >= 0")
    v = 1.0 / (4.0 * sigma * sigma)
    s2 = sigma * sigma
    h_gg = h_loc_closed(m, sigma, t)
    h_gm = 4.0 * (m * g * t * t * s2 + g * t ** 4 * v / (2.0 * m) - t ** 3 * p0 * v / (2.0 * m * m))
    h_mm = 4.0 * (t * t / (4.0 * m ** 4) * (4.0 * p0 * p0 * v + 2.0 * v * v)
                  + g * g * t ** 4 * v / (m * m) + g * g * t * t * s2
                  - 2.0 * g * t ** 3 * p0 * v / m ** 3)
    d_gm = g * t ** 3 - 2.0 * t * t * p0 / m
    return Bound2x2([[h_gg, h_gm], [h_gm, h_mm]], [[0.0, d_gm], [-d_gm, 0.0]])


def numeric_overlaps(g, m, sigma, t, p0=0.0, n_points=DEFAULT_POINTS):
    """Overlaps of the exactly evolved Gaussian with finite-difference derivatives."""
    spec = GaussianSpec(0.0, p0, sigma)
    p = PhysParams(m, g, t)
    x_lo, x_hi = evolved_state(spec, p).window()
    x, dx = uniform_grid(x_lo, x_hi, n_points)
    state = lambda gv, mv: evolved_state(spec, PhysParams(mv, gv, t))(x)
    psi = WaveGrid(x_lo, dx, state(g, m))
    dg = WaveGrid(x_lo, dx, derivative(lambda gv: state(gv, m), g, h0=REL_STEP * g, levels=1))
    dm = WaveGrid(x_lo, dx, derivative(lambda mv: state(g, mv), m, h0=MASS_REL_STEP * m, levels=1))
    return overlaps(psi, dg, dm)


def reference_form_matrices(g, m, sigma, t):
    """Reference (g, m) matrices, kept verbatim (overall factor and all) for comparison."""
    hl = h_loc_closed(m, sigma, t)
    off = g / m * (hl - t * t / (4.0 * sigma * sigma))
    mm = (t * t / (8.0 * m ** 4 * sigma ** 4) + g * g * t ** 4 / (m * m * sigma * sigma)
          + 4.0 * g * g * sigma * sigma)
    return Bound2x2(4.0 * np.array([[hl, off], [off, mm]]),
                    4.0 * np.array([[0.0, g * t ** 3], [-g * t ** 3, 0.0]]))


def reference_form_r(g, m, sigma, t):
    return 4.0 * math.sqrt(2.0) * g * m * m * t * sigma ** 3 / math.sqrt(
        16.0 * m * m * sigma ** 4 + t * t * (1.0 + 32.0 * g * g * m ** 4 * sigma ** 6))


def reference_form_t(g, m, sigma, t, w):
    ww = w.w
    return 16.0 * g * m ** 4 * t * math.sqrt(ww) * sigma ** 4 / (
        ww + 2.0 * m * m * t * t * sigma * sigma * (m * m + 4.0 * g * g * ww)
        + 32.0 * m ** 4 * sigma ** 6 * (m * m + g * g * ww))


def reference_form_comparison(g, m, sigma, t):
    """Entry-wise ratios reference / derived, plus R and T from both."""
    ref = reference_form_matrices(g, m, sigma, t)
    derived = analytic_matrices(g, m, sigma, t)
    ratio = lambda x, y: x / y if y != 0 else math.nan
    return {
        "H11_ratio": ratio(ref.h[0, 0], derived.h[0, 0]),
        "H12_ratio": ratio(ref.h[0, 1], derived.h[0, 1]),
        "H22_ratio": ratio(ref.h[1, 1], derived.h[1, 1]),
        "D12_ratio": ratio(ref.d[0, 1], derived.d[0, 1]),
        "R_reference": reference_form_r(g, m, sigma, t),
        "R_derived": r_quantumness(derived.h, derived.d),
        "T_reference_w1": reference_form_t(g, m, sigma, t, WeightSpec(1.0)),
        "T_derived_w1": t_quantumness(derived.h, derived.d, WeightSpec(1.0)),
    }


@dataclass(frozen=True, eq=False)
class JointReport:
    g: float
    m: float
    sigma: float
    t: float
    bound: Bound2x2
    r: float
    log10_r: float
    t_values: dict = field(default_factory=dict)
    scalar_bounds: dict = field(default_factory=dict)
    t_max: float = 0.0
    w_at_max: float = 0.0
    h_loc: float = 0.0
    h_inv_11: float = 0.0
    nuisance_penalty: float = 0.0
    sandwich_ok: bool = True


def jointly_estimate_report(g, m, sigma, t, w_grid=W_GRID, p0=0.0):
    """Assemble H, D, R, T and C^S over ``w_grid`` for a Gaussian probe."""
    b = analytic_matrices(g, m, sigma, t, p0)
    r = r_quantumness(b.h, b.d)
    log10_r = log_r_quantumness(b.h, b.d) / math.log(10.0)
    t_values, cs = {}, {}
    sandwich = True
    for w in w_grid:
        ws = WeightSpec(w)
        t_values[w] = t_quantumness(b.h, b.d, ws)
        cs[w] = scalar_bound(b.h, ws)
        sandwich &= cs[w] <= (1.0 + t_values[w]) * cs[w]
    # T peaks at w = H22 / H11 with value R sqrt(1 - q)
    w_star = b.h[1, 1] / b.h[0, 0]
    t_max = t_quantumness(b.h, b.d, WeightSpec(w_star))
    _, _, _, q = _rescaled(b.h, b.d)
    h_loc = h_loc_closed(m, sigma, t)
    h_inv_11 = b.h[1, 1] / _det2(b.h)
    # (H^-1)_11 H_loc - 1 = q / (1 - q) when H_11 = H_loc; computed without cancellation
    penalty = abs(h_loc / b.h[0, 0] / (1.0 - q) - 1.0) if h_loc != b.h[0, 0] else q / (1.0 - q)
    return JointReport(g=g, m=m, sigma=sigma, t=t, bound=b, r=r, log10_r=log10_r,
                       t_values=t_values, scalar_bounds=cs, t_max=t_max, w_at_max=w_star,
                       h_loc=h_loc, h_inv_11=h_inv_11, nuisance_penalty=penalty,
                       sandwich_ok=bool(sandwich))
