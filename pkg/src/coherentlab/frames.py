"""Frame, Riesz, and Bessel analysis of coherent systems pi(Lambda)g.

Point sets (finite subsets, planar lattices, lattices with holes), exact
finite-dimensional spectra, truncated-section estimates for the Gaussian
model, relative separation, cover-based Bessel bounds, canonical duals, and
the amalgam inequality check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import groups, reps
from .quadrature import gauss_profile_mass_outside
from .reps import RepModel, Window

EXPLICIT = "explicit"
LATTICE = "lattice"
LATTICE_WITH_HOLES = "lattice_with_holes"
FINITE_SUBSET = "finite_subset"

# half-width of the level set {|V_g g| > ||g||^2 / 2} for the Gaussian window
GAUSSIAN_HALF_LEVEL_RADIUS = math.sqrt(2.0 * math.log(2.0) / math.pi)

_TIE = 1e-12  # closed-ball membership slack on squared distances


def _closed_disk(dx: float, dy: float, radius: float) -> bool:
    return dx * dx + dy * dy <= radius * radius * (1.0 + _TIE) + _TIE


# -- Point sets -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointSet:
    """Discrete index set Lambda: explicit points, a planar lattice a Z x b Z,
    the same lattice with open holes removed, or a subset of Z_N x Z_N."""

    kind: str
    points: tuple = ()
    a: float = 0.0
    b: float = 0.0
    holes: tuple = ()  # ((cx, cy, radius), ...), removal is strict (open balls)
    modulus: int = 0

    @property
    def covolume(self) -> float:
        if self.kind in (LATTICE, LATTICE_WITH_HOLES):
            return self.a * self.b
        raise ValueError("covolume is defined for lattice kinds only")

    @property
    def is_lattice(self) -> bool:
        return self.kind in (LATTICE, LATTICE_WITH_HOLES)

    def _in_holes(self, x: float, y: float) -> bool:
        for (cx, cy, r) in self.holes:
            if (x - cx) ** 2 + (y - cy) ** 2 < r * r:
                return True
        return False

    def lattice_points_near(self, cx: float, cy: float, radius: float,
                            closed: bool = True) -> list:
        """Lattice points within `radius` of (cx, cy), holes removed."""
        if not self.is_lattice:
            raise ValueError("lattice enumeration needs a lattice kind")
        est = (2.0 * radius / self.a + 2.0) * (2.0 * radius / self.b + 2.0)
        if est > groups.ball_budget():
            raise groups.BudgetExceededError(
                f"lattice restriction would enumerate ~{est:.3g} points")
        out = []
        for k in range(math.floor((cx - radius) / self.a) - 1,
                       math.ceil((cx + radius) / self.a) + 2):
            x = k * self.a
            for l in range(math.floor((cy - radius) / self.b) - 1,
                           math.ceil((cy + radius) / self.b) + 2):
                y = l * self.b
                dsq = (x - cx) ** 2 + (y - cy) ** 2
                inside = (_closed_disk(x - cx, y - cy, radius) if closed
                          else dsq < radius * radius)
                if inside and not self._in_holes(x, y):
                    out.append((x, y))
        return out

    def restrict(self, b: groups.Ball) -> tuple:
        """Exactly the elements of Lambda inside the ball."""
        if self.is_lattice:
            cx, cy = b.center
            pts = self.lattice_points_near(float(cx), float(cy), b.radius, b.closed)
            return tuple(sorted(pts))
        if self.kind == FINITE_SUBSET:
            return tuple(sorted(p for p in self.points if b.contains(p)))
        return tuple(sorted(p for p in self.points if b.contains(p)))

    def translate(self, z: tuple) -> "PointSet":
        """Left-translated copy z Lambda (finite subsets and explicit sets)."""
        if self.kind == FINITE_SUBSET:
            n = self.modulus
            pts = tuple(sorted(((z[0] + p[0]) % n, (z[1] + p[1]) % n)
                               for p in self.points))
            return PointSet(kind=FINITE_SUBSET, points=pts, modulus=n)
        if self.kind == EXPLICIT:
            pts = tuple(sorted((z[0] + p[0], z[1] + p[1]) for p in self.points))
            return PointSet(kind=EXPLICIT, points=pts)
        raise ValueError("translate is defined for explicit and finite kinds")


def _check_duplicates(pts: Sequence[tuple]) -> None:
    if len(set(pts)) != len(pts):
        raise ValueError("point set contains duplicate elements")


def explicit_points(pts: Sequence[tuple]) -> PointSet:
    pts = tuple((float(x), float(y)) for (x, y) in pts)
    _check_duplicates(pts)
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 < 1e-18:
                raise ValueError("point set contains (numerically) duplicate elements")
    return PointSet(kind=EXPLICIT, points=tuple(sorted(pts)))


def lattice(a: float, b: float) -> PointSet:
    if a <= 0 or b <= 0:
        raise ValueError("lattice spacings must be positive")
    return PointSet(kind=LATTICE, a=float(a), b=float(b))


def lattice_with_holes(a: float, b: float, holes: Sequence[tuple]) -> PointSet:
    base = lattice(a, b)
    hl = tuple((float(cx), float(cy), float(r)) for (cx, cy, r) in holes)
    if any(r < 0 for (_, _, r) in hl):
        raise ValueError("hole radii must be nonnegative")
    return PointSet(kind=LATTICE_WITH_HOLES, a=base.a, b=base.b, holes=hl)


def finite_subset(modulus: int, pts: Sequence[tuple]) -> PointSet:
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    norm = tuple((int(k) % modulus, int(l) % modulus) for (k, l) in pts)
    _check_duplicates(norm)
    return PointSet(kind=FINITE_SUBSET, points=tuple(sorted(norm)), modulus=modulus)


def full_torus(modulus: int) -> PointSet:
    return finite_subset(modulus, [(k, l) for k in range(modulus)
                                   for l in range(modulus)])


# -- Frame bounds ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrameBounds:
    """Extremal spectral bounds of a coherent system.

    ``method`` records provenance: exact spectra are certificates, truncated
    sections are estimates.  ``spectrum`` is kept for diagnostics and is not
    part of the serialized form.
    """

    lower: float
    upper: float
    kind: str  # frame | riesz | bessel
    method: str
    spectrum: np.ndarray | None = None

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper + 1e-15):
            raise ValueError("bounds must satisfy 0 <= A <= B")

    @property
    def condition_number(self) -> float | None:
        if self.lower > 0.0:
            return self.upper / self.lower
        return None

    def to_json(self) -> dict:
        return {"A": self.lower, "B": self.upper, "kind": self.kind,
                "method": self.method, "condition_number": self.condition_number}


def _classify(a: float, b: float) -> str:
    return "frame" if a > 1e-12 * max(b, 1.0) else "bessel"


def _hermitian_eigs(mat: np.ndarray, what: str) -> np.ndarray:
    asym = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    scale = max(float(np.max(np.abs(mat))), 1.0) if mat.size else 1.0
    if asym > 1e-10 * scale:
        raise ValueError(f"{what} assembly is not Hermitian (deviation {asym:.3g})")
    return np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)


def _finite_synthesis(rep: RepModel, g, lam: PointSet) -> np.ndarray:
    if lam.kind != FINITE_SUBSET or lam.modulus != rep.n:
        raise ValueError("finite kind needs a finite_subset over the same modulus")
    if not lam.points:
        raise ValueError("empty point set")
    gv = np.asarray(g, dtype=complex)
    if gv.shape != (rep.n,):
        raise ValueError("window dimension does not match the model")
    return np.column_stack([reps.apply_rep(rep, x, gv) for x in lam.points])


def section_mode_count(section_radius: float, margin: float, cap: int = 512) -> int:
    """Highest Hermite index kept by the truncated section."""
    return min(cap, int(math.floor(math.pi * (section_radius - margin) ** 2)))


def frame_operator_spectrum(rep: RepModel, g, lam: PointSet,
                            section_radius: float = 12.0, margin: float = 3.0,
                            mode_cap: int = 512) -> FrameBounds:
    """Extreme eigenvalues of S = sum_lambda <., pi(lambda)g> pi(lambda)g.

    Exact on the finite kind.  The Gaussian model compresses S onto the
    Hermite modes resolved inside the truncation ball (radius minus margin);
    the result is an estimate labeled method=truncated_section.
    """
    if rep.kind == reps.FINITE_WEYL_HEISENBERG:
        phi = _finite_synthesis(rep, g, lam)
        eigs = _hermitian_eigs(phi @ phi.conj().T, "frame operator")
        a, b = max(float(eigs[0]), 0.0), float(eigs[-1])
        return FrameBounds(a, b, _classify(a, b), "exact_spectrum", eigs)
    if rep.kind != reps.GABOR_GAUSSIAN and not (
            isinstance(g, Window) and g.model == reps.GAUSSIAN_WINDOW):
        raise ValueError("truncated sections are available for the Gaussian model")
    if section_radius <= margin + 1.0:
        raise ValueError("section radius must exceed margin + 1")
    pts = lam.restrict(groups.ball(groups.euclidean_metric(dim=2), None,
                                   section_radius, closed=True)) \
        if lam.is_lattice else lam.points
    pts = [p for p in pts if p[0] ** 2 + p[1] ** 2 <= section_radius ** 2 * (1 + _TIE) + _TIE]
    if not pts:
        raise ValueError("empty point set after restriction")
    n_modes = section_mode_count(section_radius, margin, mode_cap)
    coeff = reps.hermite_gabor_coefficients(n_modes, np.asarray(pts, dtype=float))
    eigs = _hermitian_eigs(coeff @ coeff.conj().T, "section operator")
    a, b = max(float(eigs[0]), 0.0), float(eigs[-1])
    method = f"truncated_section(R={section_radius:g}, margin={margin:g})"
    return FrameBounds(a, b, _classify(a, b), method, eigs)


def gabor_gram_entry(mu: tuple, nu: tuple, rep: RepModel | None = None,
                     g: Window | None = None, tol: float = 1e-10) -> complex:
    """<pi(nu)g, pi(mu)g> via the covariance identity
    <pi(x',w')g, pi(x,w)g> = e^{2 pi i (w'-w) x'} V_g g(x-x', w-w')."""
    x, w = float(mu[0]), float(mu[1])
    xp, wp = float(nu[0]), float(nu[1])
    phase = np.exp(2j * math.pi * (wp - w) * xp)
    if rep is None or rep.kind == reps.GABOR_GAUSSIAN:
        return complex(phase * reps.gaussian_ambiguity(x - xp, w - wp))
    return complex(phase * reps.matrix_coefficient(rep, g, g, (x - xp, w - wp), tol=tol))


def riesz_bounds(rep: RepModel, g, lam: PointSet,
                 restriction_radius: float | None = None,
                 tol: float = 1e-10) -> FrameBounds:
    """Extreme eigenvalues of the Gram matrix G[i, j] = <pi(lam_j)g, pi(lam_i)g>."""
    if rep.kind == reps.FINITE_WEYL_HEISENBERG:
        phi = _finite_synthesis(rep, g, lam)
        eigs = _hermitian_eigs(phi.conj().T @ phi, "Gram matrix")
        a, b = max(float(eigs[0]), 0.0), float(eigs[-1])
        return FrameBounds(a, b, "riesz" if a > 1e-12 * max(b, 1.0) else "bessel",
                           "exact_spectrum", eigs)
    if lam.is_lattice:
        if restriction_radius is None:
            raise ValueError("lattice kinds need a restriction radius")
        pts = lam.restrict(groups.ball(groups.euclidean_metric(dim=2), None,
                                       restriction_radius, closed=True))
    else:
        pts = lam.points
    if not pts:
        raise ValueError("empty point set")
    m = len(pts)
    gw = g if isinstance(g, Window) else None
    gram = np.empty((m, m), dtype=complex)
    for i in range(m):
        gram[i, i] = (gw.norm ** 2 if gw is not None else 1.0)
        for j in range(i + 1, m):
            val = gabor_gram_entry(pts[i], pts[j], rep, gw, tol=tol)
            gram[i, j] = val
            gram[j, i] = np.conj(val)
    eigs = _hermitian_eigs(gram, "Gram matrix")
    a, b = max(float(eigs[0]), 0.0), float(eigs[-1])
    method = "exact_spectrum" if restriction_radius is None else \
        f"exact_spectrum(restriction_radius={restriction_radius:g})"
    return FrameBounds(a, b, "riesz" if a > 1e-12 * max(b, 1.0) else "bessel",
                       method, eigs)


# -- Relative separation ---------------------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    """Rel_Q(Lambda) = sup_x #(Lambda intersect xQ).

    grid_spacing 0 marks an exact arrangement-based value; positive spacing
    marks a sampled lower bound.
    """

    rel_sep: int
    q_radius: float
    q_kind: str
    grid_spacing: float
    witness: tuple
    n_candidates: int

    def to_json(self) -> dict:
        return {"rel_sep": self.rel_sep, "q_radius": self.q_radius,
                "q_kind": self.q_kind, "grid_spacing": self.grid_spacing,
                "witness": list(self.witness), "n_candidates": self.n_candidates}


def _disk_candidates(pts: list, rho: float) -> list:
    """Centers, pair midpoints, and circle-circle intersections: the counting
    function's maximum over the plane is attained at one of these."""
    cands = list(pts)
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            dx, dy = q[0] - p[0], q[1] - p[1]
            d = math.hypot(dx, dy)
            if d > 2.0 * rho * (1.0 + 1e-12) or d == 0.0:
                continue
            mx, my = (p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0
            cands.append((mx, my))
            hsq = rho * rho - (d / 2.0) ** 2
            if hsq > 0:
                h = math.sqrt(hsq)
                ux, uy = -dy / d, dx / d
                cands.append((mx + h * ux, my + h * uy))
                cands.append((mx - h * ux, my - h * uy))
    return cands


def _count_disk(lam: PointSet, cx: float, cy: float, rho: float) -> int:
    if lam.is_lattice:
        base = PointSet(kind=LATTICE, a=lam.a, b=lam.b)
        return len(base.lattice_points_near(cx, cy, rho, closed=True))
    return sum(1 for p in lam.points if _closed_disk(p[0] - cx, p[1] - cy, rho))


def relative_separation(lam: PointSet, q) -> SeparationReport:
    """Exact Rel_Q for lattices (hole removal never lowers the sup, so the
    full-lattice value is reported), explicit sets, and finite subsets."""
    if isinstance(q, groups.Box):
        if lam.is_lattice:
            hx, hy = q.half_widths
            nx = int(math.floor(2.0 * hx / lam.a + _TIE)) + 1
            ny = int(math.floor(2.0 * hy / lam.b + _TIE)) + 1
            return SeparationReport(nx * ny, max(hx, hy), "box", 0.0, (0.0, 0.0), 1)
        best, witness, cands = 0, (0.0, 0.0), 0
        xs = sorted({p[0] + q.half_widths[0] for p in lam.points})
        ys = sorted({p[1] + q.half_widths[1] for p in lam.points})
        for cx in xs:
            for cy in ys:
                cands += 1
                c = sum(1 for p in lam.points
                        if abs(p[0] - cx) <= q.half_widths[0] + _TIE
                        and abs(p[1] - cy) <= q.half_widths[1] + _TIE)
                if c > best:
                    best, witness = c, (cx, cy)
        return SeparationReport(best, max(q.half_widths), "box", 0.0, witness, cands)
    if not isinstance(q, groups.Ball):
        raise ValueError("Q must be a Ball or a Box")
    if lam.kind == FINITE_SUBSET:
        if q.points is None:
            raise ValueError("finite separation needs an enumerated Q")
        group = q.metric.group
        if group.modulus != lam.modulus:
            raise ValueError("Q lives on a different torus")
        pset = set(lam.points)
        best, witness = 0, group.identity()
        for x in group.elements():
            c = sum(1 for z in q.points if group.multiply(x, z) in pset)
            if c > best:
                best, witness = c, x
        return SeparationReport(best, q.radius, "word_ball", 0.0, witness,
                                lam.modulus ** 2)
    rho = q.radius
    if lam.is_lattice:
        base = PointSet(kind=LATTICE, a=lam.a, b=lam.b)
        window = base.lattice_points_near(lam.a / 2.0, lam.b / 2.0,
                                          rho + math.hypot(lam.a, lam.b))
        cands = _disk_candidates(window, rho)
        cands = [c for c in cands if -lam.a <= c[0] <= 2 * lam.a
                 and -lam.b <= c[1] <= 2 * lam.b] or window
    else:
        if not lam.points:
            return SeparationReport(0, rho, "euclidean_ball", 0.0, (0.0, 0.0), 0)
        cands = _disk_candidates(list(lam.points), rho)
    best, witness = 0, cands[0]
    for (cx, cy) in cands:
        c = _count_disk(lam, cx, cy, rho)
        if c > best:
            best, witness = c, (cx, cy)
    return SeparationReport(best, rho, "euclidean_ball", 0.0, witness, len(cands))


# -- Cover constant of the Bessel separation lemma ----------------------------------------


@dataclass(frozen=True)
class CoverReport:
    """Greedy cover of Q by translates of U = {|V_g g| > ||g||^2 / 2}."""

    n_cover: int
    constant: float  # C(g, Q) = 4 n
    level: float
    u_radius: float | None
    centers: tuple
    certified: bool
    cell_size: float

    def to_json(self) -> dict:
        return {"n_cover": self.n_cover, "constant": self.constant,
                "level": self.level, "u_radius": self.u_radius,
                "certified": self.certified, "cell_size": self.cell_size}


def _radial_level_radius(profile, norm_sq: float, hi: float = 64.0) -> float:
    """Largest u with profile(r) > norm_sq/2 on [0, u) for a nonincreasing profile."""
    level = norm_sq / 2.0
    lo, up = 0.0, hi
    if profile(0.0) <= level:
        return 0.0
    for _ in range(200):
        mid = (lo + up) / 2.0
        if profile(mid) > level:
            lo = mid
        else:
            up = mid
    return lo


def _greedy_cover_disk(rho: float, u: float) -> tuple:
    """Cover the closed disk of radius rho by open disks of radius u centered
    on a grid of spacing u/2; conservative cell certification."""
    cell = u / 8.0
    half_diag = cell * math.sqrt(2.0) / 2.0
    if u <= half_diag:
        raise ValueError("level-set radius below grid resolution; no usable U found")
    n_cells = int(math.ceil((rho + cell) / cell))
    cells = [(i * cell, j * cell)
             for i in range(-n_cells, n_cells + 1)
             for j in range(-n_cells, n_cells + 1)
             if math.hypot(i * cell, j * cell) <= rho + half_diag]
    n_grid = int(math.ceil((rho + u) / (u / 2.0)))
    cand = sorted((i * u / 2.0, j * u / 2.0)
                  for i in range(-n_grid, n_grid + 1)
                  for j in range(-n_grid, n_grid + 1)
                  if math.hypot(i * u / 2.0, j * u / 2.0) <= rho + u)
    reach = u - half_diag - 1e-9  # strict: cell square inside the open disk
    uncovered = set(range(len(cells)))
    chosen = []
    while uncovered:
        best_gain, best_c, best_cov = -1, None, None
        for c in cand:
            cov = [k for k in uncovered
                   if math.hypot(cells[k][0] - c[0], cells[k][1] - c[1]) <= reach]
            if len(cov) > best_gain:
                best_gain, best_c, best_cov = len(cov), c, cov
        if best_gain <= 0:
            raise ValueError("greedy cover stalled: U too small for the grid")
        chosen.append(best_c)
        uncovered.difference_update(best_cov)
    return chosen, cell


def lemma_cover_constant(rep: RepModel, g, q: groups.Ball) -> CoverReport:
    """Cover count n and constant C(g, Q) = 4n with U = {|V_g g| > ||g||^2/2}.

    Finite kind: exhaustive greedy over the torus.  Radial continuous models:
    certified cover of the disk Q by metric translates of the level-set disk.
    """
    if q.center != q.metric.group.identity():
        raise ValueError("Q must be centered at the identity")
    if rep.kind == reps.FINITE_WEYL_HEISENBERG:
        gv = np.asarray(g, dtype=complex)
        table = np.abs(reps.coefficient_table(rep, gv, gv))
        level = float(np.linalg.norm(gv)) ** 2 / 2.0
        n = rep.n
        u_set = {(k, l) for k in range(n) for l in range(n) if table[k, l] > level}
        if not u_set:
            raise ValueError("no level set found: |V_g g| never exceeds ||g||^2/2")
        group = rep.group
        targets = set(q.points)
        cand = sorted(group.elements())
        chosen = []
        while targets:
            best_gain, best_x, best_cov = -1, None, None
            for x in cand:
                xinv = group.inverse(x)
                cov = [t for t in targets if group.multiply(xinv, t) in u_set]
                if len(cov) > best_gain:
                    best_gain, best_x, best_cov = len(cov), x, cov
            if best_gain <= 0:
                raise ValueError("greedy cover stalled on the torus")
            chosen.append(best_x)
            targets.difference_update(best_cov)
        return CoverReport(len(chosen), 4.0 * len(chosen), level, None,
                           tuple(chosen), True, 0.0)
    fld = reps.coefficient_field(rep, g if isinstance(g, Window) else None,
                                 g if isinstance(g, Window) else None)
    if fld.radial_profile is None:
        raise ValueError("cover construction needs a radial coefficient profile")
    norm_sq = fld.norms[0] * fld.norms[1]
    u = _radial_level_radius(fld.radial_profile, norm_sq)
    if u <= 0.0:
        raise ValueError("no level set found: |V_g g| drops below ||g||^2/2 at once")
    centers, cell = _greedy_cover_disk(q.radius, u)
    return CoverReport(len(centers), 4.0 * len(centers), norm_sq / 2.0, u,
                       tuple(centers), True, cell)


def bessel_separation_bound(rep: RepModel, g, lam: PointSet, q: groups.Ball,
                            bessel_bound: float | None = None,
                            section_radius: float = 12.0,
                            margin: float = 3.0) -> dict:
    """Check Rel_Q(Lambda) <= 4 n B ||g||^{-2} and its invariance under g -> 2g."""
    if bessel_bound is None:
        bessel_bound = frame_operator_spectrum(
            rep, g, lam, section_radius=section_radius, margin=margin).upper
    sep = relative_separation(lam, q)
    cover = lemma_cover_constant(rep, g, q)
    if rep.kind == reps.FINITE_WEYL_HEISENBERG:
        norm_sq = float(np.linalg.norm(np.asarray(g, dtype=complex))) ** 2
        cover2 = lemma_cover_constant(rep, 2.0 * np.asarray(g, dtype=complex), q)
        bound2 = cover2.constant * (4.0 * bessel_bound) / (4.0 * norm_sq)
    else:
        norm_sq = g.norm ** 2 if isinstance(g, Window) else 1.0
        # |V_{2g} 2g| = 4 |V_g g| and the level 4||g||^2/2 scale together: same U
        bound2 = cover.constant * (4.0 * bessel_bound) / (4.0 * norm_sq)
    bound = cover.constant * bessel_bound / norm_sq
    return {"rel_sep": sep.rel_sep, "n_cover": cover.n_cover,
            "cover_constant": cover.constant, "bessel_bound": bessel_bound,
            "bound": bound, "passed": sep.rel_sep <= bound + 1e-9,
            "scale_invariant": abs(bound2 - bound) <= 1e-9 * max(bound, 1.0),
            "separation": sep.to_json(), "cover": cover.to_json()}


# -- Lemma checks ---------------------------------------------------------------------


def dimension_lemma_check(rep: RepModel, g, basis: Sequence) -> dict:
    """Sum over the group of ||P_V pi(x) g||^2 against N ||g||^2 dim V."""
    if rep.kind != reps.FINITE_WEYL_HEISENBERG:
        raise ValueError("exhaustive dimension check runs on the finite kind")
    gv = np.asarray(g, dtype=complex)
    vecs = [np.asarray(v, dtype=complex) for v in basis]
    dim = len(vecs)
    if dim:
        vmat = np.column_stack(vecs)
        dev = float(np.max(np.abs(vmat.conj().T @ vmat - np.eye(dim))))
        if dev > 1e-10:
            raise ValueError(f"basis is not orthonormal (deviation {dev:.3g})")
    lhs = sum(float(np.sum(np.abs(reps.coefficient_table(rep, v, gv)) ** 2))
              for v in vecs)
    rhs = rep.n * float(np.linalg.norm(gv)) ** 2 * dim
    return {"lhs": lhs, "rhs": rhs, "dim": dim, "n": rep.n,
            "deviation": abs(lhs - rhs),
            "passed": abs(lhs - rhs) <= 1e-8 * max(1.0, rhs)}


@dataclass(frozen=True, eq=False)
class DualReport:
    """Canonical dual family S^{-1} pi(lambda) g with its verification data."""

    dual_vectors: tuple
    bounds: FrameBounds
    dual_bounds: FrameBounds
    reconstruction_error: float
    trials: int
    seed: int
    passed: bool


def canonical_dual(rep: RepModel, g, lam: PointSet, seed: int = 0,
                   trials: int = 10, tol: float = 1e-8) -> DualReport:
    """Solve S d_lambda = pi(lambda) g and verify perfect reconstruction."""
    phi = _finite_synthesis(rep, g, lam)
    s = phi @ phi.conj().T
    eigs = _hermitian_eigs(s, "frame operator")
    b_up = float(eigs[-1])
    a_low = float(eigs[0])
    if a_low <= 1e-12 * max(b_up, 1.0):
        raise ValueError("frame operator is singular (A = 0); no canonical dual")
    bounds = FrameBounds(a_low, b_up, "frame", "exact_spectrum", eigs)
    duals = np.linalg.solve((s + s.conj().T) / 2.0, phi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(rep.n) + 1j * rng.standard_normal(rep.n)
        rec = duals @ (phi.conj().T @ f)
        rec2 = phi @ (duals.conj().T @ f)
        err = max(np.linalg.norm(rec - f), np.linalg.norm(rec2 - f))
        worst = max(worst, float(err / np.linalg.norm(f)))
    dual_eigs = _hermitian_eigs(duals @ duals.conj().T, "dual frame operator")
    dual_bounds = FrameBounds(max(float(dual_eigs[0]), 0.0), float(dual_eigs[-1]),
                              "frame", "exact_spectrum", dual_eigs)
    bound_dev = max(abs(dual_bounds.lower - 1.0 / b_up),
                    abs(dual_bounds.upper - 1.0 / a_low))
    passed = worst <= tol and bound_dev <= tol * max(1.0, 1.0 / a_low)
    return DualReport(tuple(duals[:, j].copy() for j in range(duals.shape[1])),
                      bounds, dual_bounds, worst, trials, seed, passed)


def amalgam_check(rep: RepModel, g, lam: PointSet, q: groups.Ball,
                  k_radius: float) -> dict:
    """Numerical form of the amalgam bound
    sum_{lam in K} |F(lam)|^2 <= (Rel_Q / mu(Q)) * integral_{KQ} (M_Q F)^2."""
    sep = relative_separation(lam, q)
    if rep.kind == reps.FINITE_WEYL_HEISENBERG:
        gv = np.asarray(g, dtype=complex)
        table = np.abs(reps.coefficient_table(rep, gv, gv))
        wm = q.metric
        group = rep.group
        inside = [p for p in lam.points if wm.length(p) <= k_radius]
        lhs = float(sum(table[p] ** 2 for p in inside))
        kq = set()
        kball = groups.ball(wm, None, k_radius, closed=True)
        for y in kball.points:
            for z in q.points:
                kq.add(group.multiply(y, z))
        m = reps._finite_maximal_table(rep, gv, q)
        rhs = sep.rel_sep / len(q.points) * float(sum(m[p] ** 2 for p in kq))
        mu_q = float(len(q.points))
    else:
        fld = reps.coefficient_field(rep, g if isinstance(g, Window) else None,
                                     g if isinstance(g, Window) else None)
        if fld.radial_profile is None:
            raise ValueError("amalgam check needs a radial coefficient profile")
        pts = lam.restrict(groups.ball(groups.euclidean_metric(dim=2), None,
                                       k_radius, closed=True))
        lhs = float(sum(fld.radial_profile(math.hypot(*p)) ** 2 for p in pts))
        rho = q.radius
        norm_sq = fld.norms[0] * fld.norms[1]
        if rep.kind == reps.GABOR_GAUSSIAN and abs(norm_sq - 1.0) < 1e-12:
            total = gauss_profile_mass_outside(rho, 0.0)
            integral = total - gauss_profile_mass_outside(rho, k_radius + rho)
        else:
            from .quadrature import refine_trapezoid
            prof = fld.radial_profile
            integral = refine_trapezoid(
                lambda r: prof(np.maximum(0.0, r - rho)) ** 2 * 2.0 * math.pi * r,
                0.0, k_radius + rho, 1e-10)
        mu_q = math.pi * rho * rho
        rhs = sep.rel_sep / mu_q * integral
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "rel_sep": sep.rel_sep,
            "mu_q": mu_q, "k_radius": k_radius, "passed": lhs <= rhs * (1.0 + 1e-9)}


# -- Audit dumps --------------------------------------------------------------------


def dump_matrix_csv(mat: np.ndarray, path: str) -> None:
    mat = np.asarray(mat)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "real", "imag"])
        for i in range(mat.shape[0]):
            for j in range(mat.shape[1]):
                v = complex(mat[i, j])
                writer.writerow([i, j, f"{v.real:.12g}", f"{v.imag:.12g}"])
