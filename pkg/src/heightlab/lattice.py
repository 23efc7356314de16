"""Lattice points in the images of psi_N = N phi1 - phi2.

Two engines share the certification rule (Newton residual below `tol`,
preimage strictly inside the domain):

* `count_lattice_points` works for any pair of smooth maps on boxes.
  Candidate targets q in N0^-1 Z^m are enumerated over a bounding box of
  the sampled image; Newton starts from the sample whose image is nearest.
* `torsion_specialization_count` is the Betti instantiation on a disc of the
  lambda-line.  It walks triangles of a grid, so that every target inside an
  image triangle gets a Newton run from that triangle, which also finds
  targets with several preimages.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .betti.periods import PeriodFrame
from .betti.rank import as_curve, degeneracy_rank, lift_complex, unwrap

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
MERGE_RADIUS = 1e-6


@dataclass
class SmoothMap:
    """A C^1 map from a closed box in R^(m0 + k) to R^m.

    The first m0 coordinates are the shared w-variables.
    """

    domain_box: Sequence[tuple]
    evaluator: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    c1_bound: Optional[float] = None
    m0: int = 2

    def __post_init__(self):
        self.domain_box = tuple((float(lo), float(hi)) for lo, hi in self.domain_box)
        if any(not lo < hi for lo, hi in self.domain_box):
            raise ValueError("empty domain box")
        if self.dim < self.m0:
            raise ValueError("domain has fewer than m0 coordinates")
        if self.c1_bound is None:
            self.c1_bound = self._estimate_c1()
        if not math.isfinite(self.c1_bound):
            raise ValueError("c1_bound must be finite")

    @property
    def dim(self) -> int:
        return len(self.domain_box)

    def contains(self, p, slack: float = 1e-12) -> bool:
        return all(lo - slack * (hi - lo) <= t <= hi + slack * (hi - lo) for t, (lo, hi) in zip(p, self.domain_box))

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,) or not self.contains(p):
            raise ValueError("point outside the domain box")
        return np.atleast_1d(np.asarray(self.evaluator(p), dtype=float))

    def jac(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.jacobian is not None:
            return np.atleast_2d(np.asarray(self.jacobian(p), dtype=float))
        cols = []
        for i, (lo, hi) in enumerate(self.domain_box):
            h = 1e-6 * max(1.0, abs(p[i]))
            a, b = p.copy(), p.copy()
            a[i] = min(p[i] + h, hi)
            b[i] = max(p[i] - h, lo)
            cols.append((self(a) - self(b)) / (a[i] - b[i]))
        J = np.column_stack(cols)
        if not np.all(np.isfinite(J)):
            raise ArithmeticError("singular differencing (NaN)")
        return J

    def _estimate_c1(self) -> float:
        pts = [np.array([(lo + hi) / 2 for lo, hi in self.domain_box])]
        pts += [np.array(c) for c in itertools.islice(itertools.product(*self.domain_box), 16)]
        return max(max(np.abs(self(p)).max(), np.abs(self.jac(p)).max()) for p in pts)


def linear_map(A, box, offset=None, m0: int = 2) -> SmoothMap:
    """p -> A p + offset with its exact Jacobian."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(A.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    return SmoothMap(box, lambda p: A @ p + b, lambda p: A, float(np.abs(A).max() + np.abs(b).max()), m0)


def zero_map(m: int, box, m0: int = 2) -> SmoothMap:
    return linear_map(np.zeros((m, len(box))), box, m0=m0)


def _split(phi1: SmoothMap, phi2: SmoothMap, z):
    if phi1.m0 != phi2.m0:
        raise ValueError("phi1 and phi2 disagree on m0")
    m0 = phi1.m0
    m1, m2 = phi1.dim - m0, phi2.dim - m0
    z = np.asarray(z, dtype=float)
    if z.shape != (m0 + m1 + m2,):
        raise ValueError(f"z must have {m0 + m1 + m2} coordinates")
    w, x, y = z[:m0], z[m0 : m0 + m1], z[m0 + m1 :]
    return np.concatenate([w, x]), np.concatenate([w, y]), m0


def psi_eval(phi1: SmoothMap, phi2: SmoothMap, N: float, z) -> np.ndarray:
    """psi_N(w, x, y) = N phi1(w, x) - phi2(w, y)."""
    p1, p2, _ = _split(phi1, phi2, z)
    return N * phi1(p1) - phi2(p2)


def psi_jacobian(phi1: SmoothMap, phi2: SmoothMap, N: float, z) -> np.ndarray:
    p1, p2, m0 = _split(phi1, phi2, z)
    J1, J2 = phi1.jac(p1), phi2.jac(p2)
    return np.hstack([N * J1[:, :m0] - J2[:, :m0], N * J1[:, m0:], -J2[:, m0:]])


def delta0(phi1: SmoothMap, phi2: SmoothMap, z) -> float:
    """det(d phi1/dw, d phi1/dx, -d phi2/dy), the leading coefficient of det D psi_N in N."""
    p1, p2, m0 = _split(phi1, phi2, z)
    J1, J2 = phi1.jac(p1), phi2.jac(p2)
    M = np.hstack([J1, -J2[:, m0:]])
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"delta0 needs a square matrix, got {M.shape}")
    d = float(np.linalg.det(M))
    if not math.isfinite(d):
        raise ArithmeticError("singular differencing (NaN)")
    return d


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    samples: int

    def __float__(self) -> float:
        return self.value


def _box(box) -> np.ndarray:
    arr = np.asarray(box, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or np.any(arr[:, 0] >= arr[:, 1]):
        raise ValueError("box must be a list of (lo, hi) with lo < hi")
    return arr


def volume_growth(phi1, phi2, box, N: float, samples: int = 4096, seed: int = 0) -> VolumeEstimate:
    """Monte-Carlo estimate of the integral of |det D psi_N| over the box."""
    B = _box(box)
    rng = np.random.default_rng(seed)
    pts = B[:, 0] + rng.random((samples, len(B))) * (B[:, 1] - B[:, 0])
    vol = float(np.prod(B[:, 1] - B[:, 0]))
    dets = np.empty(samples)
    signs = set()
    for i, z in enumerate(pts):
        d0 = delta0(phi1, phi2, z)
        if d0 != 0:
            signs.add(d0 > 0)
        dets[i] = abs(np.linalg.det(psi_jacobian(phi1, phi2, N, z)))
    if len(signs) > 1:
        raise ValueError("delta0 changes sign: shrink U''")
    if not signs:
        raise ValueError("delta0 vanishes at every sample")
    value = vol * float(dets.mean())
    stderr = vol * float(dets.std(ddof=1)) / math.sqrt(samples) if samples > 1 else float("inf")
    return VolumeEstimate(value, stderr, samples)


@dataclass
class CountReport:
    N: float
    N0: int
    count: int
    volume_estimate: float
    certified_points: list = field(default_factory=list)
    collisions: int = 0
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.count != len(self.certified_points):
            raise ValueError("count must equal the number of certified points")
        if any(not r < self.tol for _, _, r in self.certified_points):
            raise ValueError("residual above certification tolerance")

    @property
    def density(self) -> float:
        """count / N^2, the empirical constant of the growth law."""
        return self.count / self.N**2 if self.N else float("nan")


def _newton(F, J, z0, q, lo, hi, tol: float, max_iter: int = 50):
    z = z0.copy()
    for _ in range(max_iter):
        r = F(z) - q
        res = float(np.abs(r).max())
        if res < tol:
            return z, res
        try:
            step = np.linalg.solve(J(z), r)
        except np.linalg.LinAlgError:
            return None
        z = np.clip(z - step, lo, hi)
    r = F(z) - q
    res = float(np.abs(r).max())
    return (z, res) if res < tol else None


def _inside_open(z, B, eps: float = 1e-12) -> bool:
    width = B[:, 1] - B[:, 0]
    return bool(np.all(z > B[:, 0] + eps * width) and np.all(z < B[:, 1] - eps * width))


def count_lattice_points(
    phi1: SmoothMap,
    phi2: SmoothMap,
    box,
    N: float,
    N0: int = 1,
    grid: Optional[int] = None,
    tol: float = DEFAULT_TOL,
    merge_radius: float = MERGE_RADIUS,
    volume_samples: int = 512,
) -> CountReport:
    """Certified points of psi_N(U') on the lattice N0^-1 Z^m, U' the open box."""
    if N < 1 or N0 < 1:
        raise ValueError("N and N0 must be at least 1")
    B = _box(box)
    d = len(B)
    F = lambda z: psi_eval(phi1, phi2, N, z)
    J = lambda z: psi_jacobian(phi1, phi2, N, z)
    k = grid or max(3, int(20000 ** (1 / d)))
    axes = [lo + (np.arange(k) + 0.5) / k * (hi - lo) for lo, hi in B]
    samples = np.array(list(itertools.product(*axes)))
    for z in samples[:: max(1, len(samples) // 16)]:
        if abs(delta0(phi1, phi2, z)) < 1e-12:
            raise ValueError("delta0 vanishes on U'")
    images = np.array([F(z) for z in samples])
    corners = np.array([F(np.array(c)) for c in itertools.product(*B)])
    cell = (B[:, 1] - B[:, 0]) / k
    # an image point is within |D psi| * half-cell of some sample
    reach = max(float(np.abs(J(z) @ np.diag(cell / 2)).sum(axis=1).max()) for z in samples[:: max(1, len(samples) // 32)])
    pts = np.vstack([images, corners])
    lo_img, hi_img = pts.min(axis=0) - reach, pts.max(axis=0) + reach
    ranges = [range(math.ceil(a * N0), math.floor(b * N0) + 1) for a, b in zip(lo_img, hi_img)]
    certified, preimages = [], []
    collisions = 0
    for idx in itertools.product(*ranges):
        q = np.array(idx, dtype=float) / N0
        dist = np.abs(images - q).max(axis=1)
        j = int(np.argmin(dist))
        if dist[j] > 2 * reach + tol:
            continue
        out = _newton(F, J, samples[j], q, B[:, 0], B[:, 1], tol)
        if out is None:
            continue
        z, res = out
        if not _inside_open(z, B):
            continue
        if any(np.abs(z - p).max() < merge_radius for p in preimages):
            collisions += 1
            log.warning("grid too coarse: two targets share a preimage near %s", z)
        preimages.append(z)
        certified.append((tuple(idx), tuple(float(t) for t in z), res))
    try:
        volume = volume_growth(phi1, phi2, B, N, samples=volume_samples).value
    except ValueError:
        volume = float("nan")
    return CountReport(N, N0, len(certified), volume, certified, collisions, tol)


# -- Betti instantiation -----------------------------------------------------


class BettiGrid:
    """Unwrapped lifts N b~(P(l)) on a square grid clipped to a disc."""

    def __init__(self, section, frame: PeriodFrame, c: complex, r: float, k: int):
        curve = as_curve(section)
        self.section = section
        self.curve, self.frame = curve, frame
        self.c, self.r, self.k = c, r, k
        self.h = 2 * r / (k - 1)
        self.lam = {}
        self.val = {}
        start = (k // 2, k // 2)
        todo = [start]
        self.lam[start] = self._lam(start)
        self.val[start] = self.lift(self.lam[start])
        while todo:
            i, j = todo.pop(0)
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in self.val or not (0 <= nb[0] < k and 0 <= nb[1] < k):
                    continue
                lam = self._lam(nb)
                if abs(lam - c) > r:
                    continue
                self.lam[nb] = lam
                self.val[nb] = unwrap(self.lift(lam), self.val[(i, j)])
                todo.append(nb)

    def _lam(self, ij) -> complex:
        return self.c + complex(-self.r + ij[0] * self.h, -self.r + ij[1] * self.h)

    def lift(self, lam: complex) -> np.ndarray:
        return lift_complex(self.curve(lam), self.frame)

    def triangles(self):
        for (i, j) in self.val:
            a, b, c, d = (i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)
            if b in self.val and c in self.val:
                yield (a, b, c)
                if d in self.val:
                    yield (b, d, c)


def _in_triangle(p, A, B, C, slack: float) -> bool:
    M = np.column_stack([B - A, C - A])
    if abs(np.linalg.det(M)) < 1e-300:
        return False
    s, t = np.linalg.solve(M, p - A)
    return s >= -slack and t >= -slack and s + t <= 1 + slack


def torsion_specialization_count(
    section,
    frame: PeriodFrame,
    N: int,
    disc: Optional[tuple] = None,
    grid=48,
    tol: float = DEFAULT_TOL,
    merge_radius: float = MERGE_RADIUS,
    slack: float = 0.25,
) -> CountReport:
    """Count lambda in the disc with N b(P(lambda)) in Z^2, i.e. [N] P(lambda) = O.

    Each image triangle of the grid is enlarged by `slack` (in barycentric
    units) and every integer target in it gets a Newton run started at the
    triangle's centroid.  Solutions closer than `merge_radius` are merged.
    `grid` is the number of samples per axis or a prebuilt BettiGrid (the
    lifts do not depend on N, so one grid serves a whole N-sweep).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    c, r = (frame.center, frame.radius * (1 - 1e-9)) if disc is None else (complex(disc[0]), float(disc[1]))
    if abs(c - frame.center) + r > frame.radius * (1 + 1e-12):
        raise ValueError("disc must lie inside the frame disc")
    curve = as_curve(section)
    if degeneracy_rank(curve, c, frame) < 2:
        raise ValueError("Betti image not open; count undefined")
    if isinstance(grid, BettiGrid):
        G = grid
        if G.frame is not frame or G.c != c or G.r != r or G.section is not section:
            raise ValueError("prebuilt grid does not match the section, frame and disc")
    else:
        G = BettiGrid(section, frame, c, r, int(grid))
    h = 1e-7 * max(1.0, abs(c))

    def newton(lam: complex, q: np.ndarray, ref: np.ndarray):
        val = unwrap(G.lift(lam), ref)
        for _ in range(40):
            res = float(np.abs(N * val - q).max())
            if res < tol:
                return lam, val, res
            vx = unwrap(G.lift(lam + h), val)
            vy = unwrap(G.lift(lam + 1j * h), val)
            Jm = N * np.column_stack([(vx - val) / h, (vy - val) / h])
            try:
                dx, dy = np.linalg.solve(Jm, q - N * val)
            except np.linalg.LinAlgError:
                return None
            step = complex(dx, dy)
            if abs(step) > r:
                step *= r / abs(step)
            lam += step
            if abs(lam - c) > r * 1.05 or abs(lam - frame.center) > frame.radius:
                return None
            val = unwrap(G.lift(lam), val)
        return None

    found: list = []
    volume = 0.0
    for tri in G.triangles():
        A, B, C = (N * G.val[v] for v in tri)
        # image triangles use the unwrapped values relative to the first vertex
        B = A + N * unwrap(G.val[tri[1]], G.val[tri[0]]) - N * G.val[tri[0]]
        C = A + N * unwrap(G.val[tri[2]], G.val[tri[0]]) - N * G.val[tri[0]]
        volume += abs(np.linalg.det(np.column_stack([B - A, C - A]))) / 2
        ctr = (A + B + C) / 3
        lo = np.minimum(np.minimum(A, B), C)
        hi = np.maximum(np.maximum(A, B), C)
        pad = slack * (hi - lo) + 1e-9
        lam0 = sum(G.lam[v] for v in tri) / 3
        for a in range(math.ceil(lo[0] - pad[0]), math.floor(hi[0] + pad[0]) + 1):
            for b in range(math.ceil(lo[1] - pad[1]), math.floor(hi[1] + pad[1]) + 1):
                q = np.array([a, b], dtype=float)
                if not _in_triangle(q, ctr + (1 + 3 * slack) * (A - ctr), ctr + (1 + 3 * slack) * (B - ctr),
                                    ctr + (1 + 3 * slack) * (C - ctr), 0.0):
                    continue
                if any(abs(lam0 - s[1]) < 2 * G.h and np.array_equal(s[0], q) for s in found):
                    continue
                out = newton(lam0, q, G.val[tri[0]])
                if out is None:
                    continue
                lam, _, res = out
                if abs(lam - c) >= r:
                    continue
                if any(abs(lam - s[1]) < merge_radius for s in found):
                    continue
                found.append((q, lam, res))
    points = [((int(q[0]), int(q[1])), (float(lam.real), float(lam.imag)), float(res)) for q, lam, res in found]
    return CountReport(N, 1, len(points), float(volume), points, 0, tol)
