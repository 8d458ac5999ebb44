"""Projective representations and their matrix coefficients.

Two concrete models: the finite Weyl-Heisenberg family on C^N indexed by
Z_N x Z_N (translation then modulation), and the time-frequency family on
L^2(R) indexed by R^2, with Gaussian, synthetic power-decay, and sampled
windows.  Matrix coefficients V_g f(x) = <f, pi(x) g> feed the maximal
function, weight-class, and formal-degree diagnostics.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import groups
from .groups import Ball, GroupModel, PeriodicMetric
from .quadrature import (QuadratureError, _trapezoid, gauss_profile_mass_outside,
                         power_profile_mass_outside, refine_trapezoid)

FINITE_WEYL_HEISENBERG = "finite_weyl_heisenberg"
GABOR_GAUSSIAN = "gabor_gaussian"
GABOR_DECAY = "gabor_decay"
GABOR_NUMERIC = "gabor_numeric"

GAUSSIAN_WINDOW = "gaussian_unit_norm"
DECAY_WINDOW = "decay_profile"
SAMPLE_WINDOW = "sample_vector"

# peak slope of exp(-pi r^2 / 2), certifies grid sups for the Gaussian field
GAUSSIAN_AMBIGUITY_LIPSCHITZ = math.sqrt(math.pi) * math.exp(-0.5)


class NotInWeightClassError(RuntimeError):
    """Weighted maximal norm diverges for the given weight and decay profile."""


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a, b>, linear in the first slot."""
    return complex(np.sum(np.asarray(a) * np.conj(np.asarray(b))))


# -- Windows --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Window:
    """Analyzing vector: finite vector, L^2(R) Gaussian, sampled, or a decay model.

    ``decay`` holds (growth_dim, alpha, beta, c0) for the synthetic profile
    whose modulus envelope stands in for |V_g g|.
    """

    model: str
    vector: np.ndarray | None = None
    times: np.ndarray | None = None
    decay: tuple | None = None
    norm: float = 1.0


def gaussian_window() -> Window:
    return Window(model=GAUSSIAN_WINDOW, norm=1.0)


def vector_window(values: Sequence[complex]) -> Window:
    v = np.asarray(values, dtype=complex)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("window vector must be nonzero")
    return Window(model=SAMPLE_WINDOW, vector=v, norm=n)


def sampled_window(times: Sequence[float], values: Sequence[complex]) -> Window:
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=complex)
    if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
        raise ValueError("need matching 1D time and value arrays")
    dt = np.diff(t)
    if np.any(dt <= 0) or abs(dt.max() - dt.min()) > 1e-9 * dt.mean():
        raise ValueError("time grid must be uniform and increasing")
    n = math.sqrt(float(_trapezoid(np.abs(v) ** 2, t)))
    if n == 0.0:
        raise ValueError("window samples must be nonzero")
    return Window(model=SAMPLE_WINDOW, vector=v, times=t, norm=n)


def decay_window(growth_dim: float, alpha: float, beta: float, c0: float) -> Window:
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    return Window(model=DECAY_WINDOW, decay=(growth_dim, alpha, beta, c0),
                  norm=math.sqrt(c0))


def window_from_csv(path: str) -> Window:
    """Finite window from rows (index, real, imaginary)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "index":
                continue
            rows.append((int(row[0]), float(row[1]), float(row[2])))
    rows.sort()
    if [i for i, _, _ in rows] != list(range(len(rows))):
        raise ValueError("window CSV indices must be 0..N-1 without gaps")
    return vector_window([complex(re, im) for _, re, im in rows])


def sampled_window_from_csv(path: str, t0: float, dt: float) -> Window:
    w = window_from_csv(path)
    times = t0 + dt * np.arange(len(w.vector))
    return sampled_window(times, w.vector)


# -- Representation models --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RepModel:
    """Projective representation model with its base group and formal degree."""

    kind: str
    group: GroupModel
    n: int = 0
    formal_degree: float = float("nan")
    window: Window | None = None

    def default_window(self) -> Window:
        if self.window is not None:
            return self.window
        if self.kind == GABOR_GAUSSIAN:
            return gaussian_window()
        raise ValueError(f"{self.kind} has no default window")


def finite_weyl_heisenberg(n: int) -> RepModel:
    return RepModel(kind=FINITE_WEYL_HEISENBERG, group=groups.finite_cyclic_sq(n),
                    n=n, formal_degree=1.0 / n)


def gabor_gaussian() -> RepModel:
    return RepModel(kind=GABOR_GAUSSIAN, group=groups.euclidean(2), formal_degree=1.0)


def gabor_decay(growth_dim: float, alpha: float, beta: float, c0: float) -> RepModel:
    return RepModel(kind=GABOR_DECAY, group=groups.euclidean(2),
                    window=decay_window(growth_dim, alpha, beta, c0))


def gabor_numeric(window: Window) -> RepModel:
    if window.times is None:
        raise ValueError("gabor_numeric needs a sampled window on a time grid")
    return RepModel(kind=GABOR_NUMERIC, group=groups.euclidean(2), window=window)


# -- Finite Weyl-Heisenberg machinery ----------------------------------------------


def rep_matrix(rep: RepModel, x: tuple) -> np.ndarray:
    """Unitary pi(k, l) on C^N: translate by k, then modulate by l."""
    if rep.kind != FINITE_WEYL_HEISENBERG:
        raise ValueError("rep_matrix is for the finite kind")
    n = rep.n
    k, l = x[0] % n, x[1] % n
    phase = np.exp(2j * math.pi * l * np.arange(n) / n)
    mat = np.zeros((n, n), dtype=complex)
    mat[np.arange(n), (np.arange(n) - k) % n] = 1.0
    return phase[:, None] * mat


def apply_rep(rep: RepModel, x: tuple, f: np.ndarray) -> np.ndarray:
    n = rep.n
    k, l = x[0] % n, x[1] % n
    shifted = np.roll(np.asarray(f, dtype=complex), k)
    return np.exp(2j * math.pi * l * np.arange(n) / n) * shifted


def cocycle_value(rep: RepModel, x: tuple, y: tuple) -> complex:
    """sigma(x, y) with pi(x) pi(y) = sigma(x, y) pi(xy)."""
    n = rep.n
    return cmath.exp(-2j * math.pi * (x[0] % n) * (y[1] % n) / n)


def verify_cocycle_identity(rep: RepModel) -> dict:
    """Exhaustive check of the projective law; quadratic in the group order."""
    if rep.n > 16:
        raise ValueError("exhaustive cocycle check is limited to N <= 16")
    els = rep.group.elements()
    mats = np.stack([rep_matrix(rep, x) for x in els])
    index = {x: i for i, x in enumerate(els)}
    worst = 0.0
    for i, x in enumerate(els):
        prod = np.einsum("ij,njk->nik", mats[i], mats)
        for j, y in enumerate(els):
            xy = rep.group.multiply(x, y)
            expected = cocycle_value(rep, x, y) * mats[index[xy]]
            worst = max(worst, float(np.max(np.abs(prod[j] - expected))))
    return {"n": rep.n, "max_deviation": worst, "passed": worst <= 1e-12}


def coefficient_table(rep: RepModel, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """V[k, l] = <f, pi(k, l) g> for all of Z_N x Z_N, via one FFT per shift."""
    n = rep.n
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    table = np.empty((n, n), dtype=complex)
    for k in range(n):
        c = f * np.conj(np.roll(g, k))
        table[k, :] = np.fft.fft(c)
    return table


# -- Matrix coefficients ------------------------------------------------------------


def gaussian_ambiguity(x: float, w: float) -> complex:
    """<g, pi(x, w) g> for the unit-norm Gaussian window."""
    return cmath.exp(-1j * math.pi * x * w - math.pi * (x * x + w * w) / 2.0)


def _sampled_eval(window: Window, t: np.ndarray) -> np.ndarray:
    re = np.interp(t, window.times, window.vector.real, left=0.0, right=0.0)
    im = np.interp(t, window.times, window.vector.imag, left=0.0, right=0.0)
    return re + 1j * im


def _window_support(window: Window) -> tuple:
    if window.model == GAUSSIAN_WINDOW:
        return (-7.0, 7.0)  # |g| < 1.3e-67 outside
    return (float(window.times[0]), float(window.times[-1]))


def _window_eval(window: Window, t: np.ndarray) -> np.ndarray:
    if window.model == GAUSSIAN_WINDOW:
        return 2.0 ** 0.25 * np.exp(-math.pi * t * t) + 0j
    return _sampled_eval(window, t)


def matrix_coefficient(rep: RepModel, f, g, x: tuple, tol: float = 1e-8) -> complex:
    """V_g f(x) = <f, pi(x) g>.

    Finite kind is an exact inner product; the Gaussian pair has a closed
    form; sampled windows are integrated adaptively and raise QuadratureError
    if the tolerance is not reached.
    """
    if rep.kind == FINITE_WEYL_HEISENBERG:
        return inner(np.asarray(f, dtype=complex), apply_rep(rep, x, np.asarray(g, dtype=complex)))
    if rep.kind == GABOR_DECAY:
        dim, alpha, beta, c0 = rep.window.decay
        r = math.hypot(x[0], x[1])
        return complex(c0 * (1.0 + r) ** (-(dim + alpha + beta) / 2.0), 0.0)
    fw = f if isinstance(f, Window) else None
    gw = g if isinstance(g, Window) else None
    if fw is None or gw is None:
        raise ValueError("continuous kinds take Window operands")
    xs, ws = float(x[0]), float(x[1])
    if fw.model == GAUSSIAN_WINDOW and gw.model == GAUSSIAN_WINDOW:
        return gaussian_ambiguity(xs, ws)
    lo_f, hi_f = _window_support(fw)
    lo_g, hi_g = _window_support(gw)
    lo, hi = max(lo_f, lo_g + xs), min(hi_f, hi_g + xs)
    if hi <= lo:
        return 0.0

    def integrand(t, part):
        val = _window_eval(fw, t) * np.conj(_window_eval(gw, t - xs)) \
            * np.exp(-2j * math.pi * ws * t)
        return val.real if part == "re" else val.imag

    # resolve the modulation before trusting Richardson agreement
    min_d = max(4, int(math.ceil(math.log2(max(16.0, 4.0 * (1 + abs(ws)) * (hi - lo)) / 8.0))))
    re = refine_trapezoid(lambda t: integrand(t, "re"), lo, hi, tol, min_doublings=min_d)
    im = refine_trapezoid(lambda t: integrand(t, "im"), lo, hi, tol, min_doublings=min_d)
    return complex(re, im)


# -- Coefficient fields ---------------------------------------------------------------


@dataclass(eq=False)
class CoefficientField:
    """Evaluator bundle for x -> V_g f(x) with optional radial structure.

    ``radial_profile`` is set only when |F| is a nonincreasing function of the
    metric length, which makes local sups exact.  ``lipschitz`` certifies grid
    sups otherwise; ``l2_mass`` is the full-group integral of |F|^2.
    """

    domain: GroupModel
    evaluate: Callable[[tuple], complex]
    magnitude: Callable[[tuple], float]
    norms: tuple
    radial_profile: Callable[[float], float] | None = None
    lipschitz: float | None = None
    l2_mass: float | None = None
    table: np.ndarray | None = None


def coefficient_field(rep: RepModel, f=None, g=None, tol: float = 1e-8) -> CoefficientField:
    """Field for V_g f; defaults to f = g = the model's window."""
    if rep.kind == FINITE_WEYL_HEISENBERG:
        fv = np.asarray(f, dtype=complex)
        gv = np.asarray(g, dtype=complex)
        table = coefficient_table(rep, fv, gv)
        n = rep.n

        def ev(x, _t=table, _n=n):
            return complex(_t[x[0] % _n, x[1] % _n])

        return CoefficientField(
            domain=rep.group, evaluate=ev, magnitude=lambda x: abs(ev(x)),
            norms=(float(np.linalg.norm(fv)), float(np.linalg.norm(gv))),
            l2_mass=float(np.sum(np.abs(table) ** 2)), table=table)
    f = f if f is not None else rep.default_window()
    g = g if g is not None else rep.default_window()
    if rep.kind == GABOR_DECAY or (isinstance(g, Window) and g.model == DECAY_WINDOW):
        dim, alpha, beta, c0 = g.decay if isinstance(g, Window) and g.decay else rep.window.decay
        q = dim + alpha + beta

        def prof(r, _c=c0, _q=q):
            return _c * (1.0 + r) ** (-_q / 2.0)

        mass = power_profile_mass_outside(0.0, q / 2.0, 0.0) * c0 * c0 if q > 2 else None
        return CoefficientField(
            domain=rep.group, evaluate=lambda x: complex(prof(math.hypot(*x)), 0.0),
            magnitude=lambda x: prof(math.hypot(*x)), norms=(math.sqrt(c0), math.sqrt(c0)),
            radial_profile=prof, lipschitz=c0 * q / 2.0, l2_mass=mass)
    if f.model == GAUSSIAN_WINDOW and g.model == GAUSSIAN_WINDOW:
        return CoefficientField(
            domain=rep.group,
            evaluate=lambda x: gaussian_ambiguity(float(x[0]), float(x[1])),
            magnitude=lambda x: math.exp(-math.pi * (x[0] ** 2 + x[1] ** 2) / 2.0),
            norms=(1.0, 1.0),
            radial_profile=lambda r: math.exp(-math.pi * r * r / 2.0),
            lipschitz=GAUSSIAN_AMBIGUITY_LIPSCHITZ, l2_mass=1.0)

    def ev(x):
        return matrix_coefficient(rep, f, g, x, tol=tol)

    return CoefficientField(domain=rep.group, evaluate=ev, magnitude=lambda x: abs(ev(x)),
                            norms=(f.norm, g.norm))


# -- Local maximal function ------------------------------------------------------------


def local_maximal(fld: CoefficientField, q: Ball, x: tuple, certified: bool = False) -> float:
    """M_Q F(x) = sup over z in Q of |F(x z)|.

    Exact for enumerated Q and for radially nonincreasing fields; otherwise a
    grid sup with spacing radius/32, plus a Lipschitz slack when certified.
    """
    group = q.metric.group
    if q.center != group.identity():
        raise ValueError("Q must be centered at the identity")
    if q.points is not None:
        return max(fld.magnitude(group.multiply(x, z)) for z in q.points)
    if fld.radial_profile is not None:
        r = math.hypot(*x)
        return fld.radial_profile(max(0.0, r - q.radius))
    if certified and fld.lipschitz is None:
        raise ValueError("certified sup requested but the field has no modulus bound")
    h = q.radius / 32.0
    best = 0.0
    steps = np.arange(-q.radius, q.radius + h / 2, h)
    for dx in steps:
        for dy in steps:
            if dx * dx + dy * dy <= q.radius ** 2:
                best = max(best, fld.magnitude((x[0] + dx, x[1] + dy)))
    if certified:
        best += fld.lipschitz * h / math.sqrt(2.0)
    return best


# -- Weighted maximal norms --------------------------------------------------------------


def _finite_maximal_table(rep: RepModel, g: np.ndarray, q: Ball) -> np.ndarray:
    table = np.abs(coefficient_table(rep, g, g))
    n = rep.n
    out = np.zeros_like(table)
    for (dk, dl) in q.points:
        out = np.maximum(out, np.roll(table, (-dk % n, -dl % n), axis=(0, 1)))
    return out


def weighted_maximal_norm(rep: RepModel, g, q: Ball, alpha: float, tol: float = 1e-8,
                          delta: float = 1.0, envelope: tuple | None = None) -> float:
    """Integral over the group of |M_Q V_g g|^2 (1 + |x|)^alpha.

    Finite kind: exact sum with word length.  Gaussian and decay models reduce
    to radial integrals with certified tails.  Decay profiles outside the
    weight class raise NotInWeightClassError (the divergence threshold is
    alpha >= alpha_profile + beta + delta - 1 on the plane).
    """
    if alpha < 0:
        raise ValueError("weight exponent must be nonnegative")
    if q.center != q.metric.group.identity():
        raise ValueError("Q must be centered at the identity")
    if rep.kind == FINITE_WEYL_HEISENBERG:
        gv = np.asarray(g, dtype=complex)
        m = _finite_maximal_table(rep, gv, q)
        n = rep.n
        k = np.arange(n)
        wl = np.minimum(k, n - k)
        weight = (1.0 + wl[:, None] + wl[None, :]) ** alpha
        return float(np.sum(m * m * weight))
    rho = q.radius
    if rep.kind == GABOR_GAUSSIAN or (isinstance(g, Window) and g.model == GAUSSIAN_WINDOW):
        def m_sq(r):
            return np.exp(-math.pi * np.maximum(0.0, r - rho) ** 2)

        r_max = rho + 4.0
        while True:
            # (1+r)^a * 2 pi r <= (1+R)^a * 2 pi R * exp(c (r-R)) beyond R
            c = max(alpha, 0.0) / (1.0 + r_max) + 1.0 / r_max
            gap = 2.0 * math.pi * (r_max - rho) - c
            if gap > 0:
                tail = (2.0 * math.pi * (1.0 + r_max) ** max(alpha, 0.0) * r_max
                        * math.exp(-math.pi * (r_max - rho) ** 2) / gap)
                if tail < tol / 2.0:
                    break
            r_max *= 2.0
            if r_max > 1e6:
                raise QuadratureError("gaussian tail failed to certify")
        val = refine_trapezoid(
            lambda r: m_sq(r) * (1.0 + r) ** alpha * 2.0 * math.pi * r, 0.0, rho, tol / 4.0)
        val += refine_trapezoid(
            lambda r: m_sq(r) * (1.0 + r) ** alpha * 2.0 * math.pi * r, rho, r_max, tol / 4.0)
        return val + tail
    if rep.kind == GABOR_DECAY or (isinstance(g, Window) and g.model == DECAY_WINDOW):
        dim, a_p, beta, c0 = (g.decay if isinstance(g, Window) and g.decay
                              else rep.window.decay)
        q_exp = dim + a_p + beta
        if alpha >= a_p + beta + delta - 1.0 or q_exp - alpha - 2.0 <= 0.0:
            raise NotInWeightClassError(
                f"weight alpha={alpha} not integrable against decay "
                f"(alpha_profile={a_p}, beta={beta}, delta={delta}); window not in class")

        def m_sq(r):
            return c0 * c0 * (1.0 + np.maximum(0.0, r - rho)) ** (-q_exp)

        r_max = rho + 8.0
        while True:
            w = 1.0 + r_max - rho
            tail = (2.0 * math.pi * c0 * c0 * (1.0 + rho) ** (max(alpha, 0.0) + 1.0)
                    * w ** (alpha - q_exp + 2.0) / (q_exp - alpha - 2.0))
            if tail < tol / 2.0 or r_max > 1e9:
                break
            r_max *= 2.0
        if tail >= tol / 2.0:
            raise QuadratureError("decay tail failed to certify")
        val = refine_trapezoid(
            lambda r: m_sq(r) * (1.0 + r) ** alpha * 2.0 * math.pi * r, 0.0, rho, tol / 4.0)
        val += refine_trapezoid(
            lambda r: m_sq(r) * (1.0 + r) ** alpha * 2.0 * math.pi * r, rho, r_max, tol / 4.0)
        return val + tail
    if rep.kind == GABOR_NUMERIC:
        return _numeric_weighted_norm(rep, q, alpha, envelope)
    raise ValueError(f"unsupported rep kind {rep.kind}")


def _ambiguity_grid(window: Window, pad_factor: int = 4):
    """|V_g g| sampled on a shift/frequency grid via FFTs; magnitude only."""
    t = window.times
    v = window.vector
    dt = float(t[1] - t[0])
    n = len(t)
    nfft = 1
    while nfft < pad_factor * n:
        nfft *= 2
    shifts = np.arange(-(n - 1), n)
    mags = np.empty((len(shifts), nfft))
    for i, s in enumerate(shifts):
        shifted = np.zeros(n, dtype=complex)
        if s >= 0:
            shifted[s:] = v[: n - s]
        else:
            shifted[: n + s] = v[-s:]
        c = v * np.conj(shifted)
        mags[i] = np.abs(np.fft.fft(c, nfft)) * dt
    x_grid = shifts * dt
    w_grid = np.fft.fftfreq(nfft, d=dt)
    order = np.argsort(w_grid)
    return x_grid, w_grid[order], mags[:, order]


def _numeric_weighted_norm(rep: RepModel, q: Ball, alpha: float,
                           envelope: tuple | None) -> float:
    window = rep.window
    env = envelope or (window.decay and (window.norm ** 2 * window.decay[3],
                                         (window.decay[0] + window.decay[1] + window.decay[2]) / 2))
    if not env:
        raise ValueError("numeric kind needs a decay envelope (c0, exponent) for the tail")
    c0, exponent = env
    if 2.0 * exponent - alpha - 2.0 <= 0.0:
        raise NotInWeightClassError("envelope exponent too small for this weight")
    x_grid, w_grid, mags = _ambiguity_grid(window)
    dx = x_grid[1] - x_grid[0]
    dw = w_grid[1] - w_grid[0]
    rho = q.radius
    # dilate by the Q footprint, then sum cells (documented grid-sup estimate)
    ix = int(math.ceil(rho / dx))
    iw = int(math.ceil(rho / dw))
    m = np.zeros_like(mags)
    for a in range(-ix, ix + 1):
        for b in range(-iw, iw + 1):
            if (a * dx) ** 2 + (b * dw) ** 2 <= rho * rho:
                m = np.maximum(m, np.roll(np.roll(mags, a, axis=0), b, axis=1))
    rr = np.hypot(x_grid[:, None], w_grid[None, :])
    r_edge = min(abs(x_grid[0]), abs(x_grid[-1]), abs(w_grid[0]), abs(w_grid[-1])) - rho
    val = float(np.sum((m * m * (1.0 + rr) ** alpha)[rr <= r_edge]) * dx * dw)
    w_tail = 1.0 + max(r_edge - rho, 0.0)
    tail = (2.0 * math.pi * c0 * c0 * (1.0 + rho) ** (max(alpha, 0.0) + 1.0)
            * w_tail ** (alpha - 2.0 * exponent + 2.0) / (2.0 * exponent - alpha - 2.0))
    return val + tail


# -- Formal degree ---------------------------------------------------------------------


def estimate_formal_degree(rep: RepModel, g, truncation_radius: float,
                           tol: float = 1e-10) -> float:
    """||g||^4 / integral over B_R of |V_g g|^2; exact on the finite kind."""
    if truncation_radius <= 0:
        raise ValueError("truncation radius must be positive")
    if rep.kind == FINITE_WEYL_HEISENBERG:
        gv = np.asarray(g, dtype=complex)
        nrm = float(np.linalg.norm(gv))
        if nrm == 0.0:
            raise ValueError("zero window")
        table = np.abs(coefficient_table(rep, gv, gv)) ** 2
        n = rep.n
        k = np.arange(n)
        wl = np.minimum(k, n - k)
        mask = (wl[:, None] + wl[None, :]) <= truncation_radius
        denom = float(np.sum(table[mask]))
        return nrm ** 4 / denom
    if rep.kind == GABOR_GAUSSIAN or (isinstance(g, Window) and g.model == GAUSSIAN_WINDOW):
        denom = refine_trapezoid(
            lambda r: np.exp(-math.pi * r * r) * 2.0 * math.pi * r,
            0.0, truncation_radius, tol)
        return 1.0 / denom
    if rep.kind == GABOR_DECAY:
        dim, alpha, beta, c0 = rep.window.decay
        q_exp = dim + alpha + beta
        denom = refine_trapezoid(
            lambda r: c0 * c0 * (1.0 + r) ** (-q_exp) * 2.0 * math.pi * r,
            0.0, truncation_radius, tol)
        return c0 * c0 / denom
    if rep.kind == GABOR_NUMERIC:
        x_grid, w_grid, mags = _ambiguity_grid(rep.window)
        dx = x_grid[1] - x_grid[0]
        dw = w_grid[1] - w_grid[0]
        rr = np.hypot(x_grid[:, None], w_grid[None, :])
        denom = float(np.sum((mags ** 2)[rr <= truncation_radius]) * dx * dw)
        return rep.window.norm ** 4 / denom
    raise ValueError(f"unsupported rep kind {rep.kind}")


def formal_degree_converged(rep: RepModel, g, truncation_radius: float,
                            rel_change: float = 1e-6) -> tuple:
    """(estimate at R, True if doubling R moves it by less than rel_change)."""
    est = estimate_formal_degree(rep, g, truncation_radius)
    est2 = estimate_formal_degree(rep, g, 2.0 * truncation_radius)
    return est2, abs(est2 - est) <= rel_change * abs(est2)


# -- Decay envelopes ---------------------------------------------------------------------


def decay_envelope_check(rep: RepModel, g, metric: PeriodicMetric, c0: float,
                         exponent: float, sample_radius: float,
                         fld: CoefficientField | None = None,
                         n_radii: int = 400, n_angles: int = 64) -> dict:
    """Sample |V_g g| / ||g||^2 on shells against c0 (1 + |x|)^(-exponent).

    Reports the maximal ratio |V_g g(x)| (1+|x|)^exponent / (c0 ||g||^2); pass
    iff it stays <= 1.  Calling with c0 = 1 calibrates the envelope constant.
    """
    if c0 <= 0 or sample_radius <= 0:
        raise ValueError("c0 and sample_radius must be positive")
    if fld is None:
        if rep.kind == FINITE_WEYL_HEISENBERG:
            fld = coefficient_field(rep, g, g)
        else:
            fld = coefficient_field(rep, g if isinstance(g, Window) else None,
                                    g if isinstance(g, Window) else None)
    norm_sq = fld.norms[0] * fld.norms[1]
    worst = 0.0
    argmax = None
    count = 0
    if fld.domain.is_discrete:
        b = groups.ball(metric, None, sample_radius, closed=True)
        for p in b.points:
            ratio = fld.magnitude(p) * (1.0 + metric.length(p)) ** exponent / (c0 * norm_sq)
            count += 1
            if ratio > worst:
                worst, argmax = ratio, p
    elif fld.radial_profile is not None:
        radii = np.linspace(0.0, sample_radius, max(n_radii, 2) * 4)
        for r in radii:
            ratio = fld.radial_profile(float(r)) * (1.0 + r) ** exponent / (c0 * norm_sq)
            count += 1
            if ratio > worst:
                worst, argmax = float(ratio), (float(r), 0.0)
    else:
        radii = np.linspace(0.0, sample_radius, max(n_radii, 2))
        angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
        for r in radii:
            for th in angles:
                x = (r * math.cos(th), r * math.sin(th))
                ratio = fld.magnitude(x) * (1.0 + r) ** exponent / (c0 * norm_sq)
                count += 1
                if ratio > worst:
                    worst, argmax = ratio, x
    return {"max_ratio": worst, "passed": worst <= 1.0 + 1e-12, "c0": c0,
            "exponent": exponent, "sample_radius": sample_radius,
            "samples": count, "argmax": argmax}


# -- Orthogonality relations ---------------------------------------------------------------


def verify_orthogonality(rep: RepModel, trials: int = 20, tol: float = 1e-10,
                         seed: int = 0) -> dict:
    """Check sum_x <f1, pi(x) g1> conj(<f2, pi(x) g2>) = N <f1, f2> conj(<g1, g2>).

    Random quadruples on the finite kind; the full group sum is exact, so the
    deviation is pure floating-point noise.
    """
    if rep.kind != FINITE_WEYL_HEISENBERG:
        raise ValueError("orthogonality verification runs on the finite kind")
    rng = np.random.default_rng(seed)
    n = rep.n
    worst = 0.0
    for _ in range(trials):
        f1, f2, g1, g2 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)
                          for _ in range(4))
        lhs = complex(np.sum(coefficient_table(rep, f1, g1)
                             * np.conj(coefficient_table(rep, f2, g2))))
        rhs = n * inner(f1, f2) * np.conj(inner(g1, g2))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return {"n": n, "trials": trials, "tol": tol, "max_deviation": worst,
            "formal_degree": rep.formal_degree, "seed": seed, "passed": worst <= tol}


# -- Hermite tools (used by the truncated frame sections) -----------------------------------


def hermite_functions(n_max: int, t: np.ndarray) -> np.ndarray:
    """Rows 0..n_max of the L^2(R)-orthonormal Hermite family whose ground
    state is the unit Gaussian 2^(1/4) exp(-pi t^2)."""
    t = np.asarray(t, dtype=float)
    x = t * math.sqrt(2.0 * math.pi)
    out = np.zeros((n_max + 1, len(t)))
    out[0] = math.pi ** -0.25 * np.exp(-x * x / 2.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (math.sqrt(2.0 / (n + 1)) * x * out[n]
                      - math.sqrt(n / (n + 1.0)) * out[n - 1])
    return (2.0 * math.pi) ** 0.25 * out


def hermite_gabor_coefficients(n_max: int, points: np.ndarray) -> np.ndarray:
    """Matrix C[n, j] = <h_n, pi(x_j, w_j) g> for the Gaussian window, closed form.

    C[n, z] = exp(-i pi x w) exp(-pi |z|^2 / 2) pi^(n/2) (x - i w)^n / sqrt(n!).
    Computed in log-magnitude/phase form so large n stays stable.
    """
    pts = np.asarray(points, dtype=float)
    x, w = pts[:, 0], pts[:, 1]
    rsq = x * x + w * w
    r = np.sqrt(rsq)
    theta = np.arctan2(-w, x)
    ns = np.arange(n_max + 1, dtype=float)
    lgam = np.array([math.lgamma(n + 1.0) for n in ns])
    logr = np.where(r > 0, np.log(np.maximum(r, 1e-300)), 0.0)
    logmag = (ns[:, None] * (0.5 * math.log(math.pi) + logr[None, :])
              - 0.5 * lgam[:, None] - math.pi * rsq[None, :] / 2.0)
    logmag = np.where((r[None, :] == 0) & (ns[:, None] > 0), -math.inf, logmag)
    phase = -math.pi * x * w + ns[:, None] * theta[None, :]
    return np.exp(logmag) * np.exp(1j * phase)


# -- Exports ----------------------------------------------------------------------------


def export_field_csv(fld: CoefficientField, extent: float, spacing: float, path: str) -> None:
    """Gridded |F| dump with rows (x, w, magnitude), lexicographically sorted."""
    xs = np.arange(-extent, extent + spacing / 2, spacing)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "w", "magnitude"])
        for xv in xs:
            for wv in xs:
                writer.writerow([f"{xv:.12g}", f"{wv:.12g}",
                                 f"{fld.magnitude((float(xv), float(wv))):.12g}"])
