"""Typically real functions through their Robertson measures.

A typically real f is an average of the kernels k(z, t) = z / (1 - 2tz + z**2)
against a probability measure on [-1, 1]; the n-th coefficient of k(z, t) is
the Chebyshev polynomial U_{n-1}(t).  Only finitely supported measures are
handled here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidMeasure, ParamOutOfRange, UnknownLemmaId
from .series import TaylorSeries

_T_TOL = 1e-12


@dataclass(frozen=True)
class RobertsonMeasure:
    """Finitely supported probability measure on [-1, 1]: ((weight, t), ...)."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(w), float(t)) for w, t in self.atoms)
        if not atoms:
            raise InvalidMeasure("measure needs at least one atom")
        w = np.array([a[0] for a in atoms])
        t = np.array([a[1] for a in atoms])
        if np.any(~np.isfinite(w)) or np.any(~np.isfinite(t)):
            raise InvalidMeasure("non-finite atom")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidMeasure(f"weights must be >= 0 and sum to 1 (sum={w.sum()!r})")
        if np.any(np.abs(t) > 1 + _T_TOL):
            raise InvalidMeasure("atom positions must lie in [-1, 1]")
        object.__setattr__(self, "atoms", atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def points(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    @classmethod
    def point_mass(cls, t: float) -> "RobertsonMeasure":
        return cls(((1.0, t),))


def chebyshev_u(k: int, t):
    """U_k(t) by the three-term recurrence; ``t`` may be an array."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _T_TOL):
        raise DomainError("Chebyshev argument outside [-1, 1]")
    prev, cur = np.ones_like(t), 2 * t
    if k == 0:
        return prev[()] if prev.ndim == 0 else prev
    for _ in range(k - 1):
        prev, cur = cur, 2 * t * cur - prev
    return cur[()] if cur.ndim == 0 else cur


def chebyshev_u_table(N: int, t) -> np.ndarray:
    """Array of shape t.shape + (N,) holding U_0(t) .. U_{N-1}(t)."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _T_TOL):
        raise DomainError("Chebyshev argument outside [-1, 1]")
    out = np.empty(t.shape + (N,))
    out[..., 0] = 1.0
    if N > 1:
        out[..., 1] = 2 * t
    for k in range(2, N):
        out[..., k] = 2 * t * out[..., k - 1] - out[..., k - 2]
    return out


def robertson_coeffs_array(weights, points, N: int) -> np.ndarray:
    """Batched a_1..a_N; ``weights`` and ``points`` have shape (..., atoms)."""
    weights = np.asarray(weights, dtype=float)
    table = chebyshev_u_table(N, points)
    return np.einsum("...j,...jn->...n", weights, table)


def typically_real_coeffs(measure: RobertsonMeasure, N: int) -> TaylorSeries:
    return TaylorSeries(robertson_coeffs_array(measure.weights, measure.points, N))


def _check_family(alpha, t1, t2):
    alpha, t1, t2 = (np.asarray(x, dtype=float) for x in (alpha, t1, t2))
    if np.any((alpha < -_T_TOL) | (alpha > 1 + _T_TOL)):
        raise ParamOutOfRange("alpha must lie in [0, 1]")
    if np.any(np.abs(t1) > 1 + _T_TOL) or np.any(np.abs(t2) > 1 + _T_TOL):
        raise ParamOutOfRange("atom positions must lie in [-1, 1]")
    return np.clip(alpha, 0, 1), np.clip(t1, -1, 1), np.clip(t2, -1, 1)


def two_atom_array(alpha, t1, t2, N: int) -> np.ndarray:
    """Coefficients of alpha k(z, t1) + (1 - alpha) k(z, t2), broadcast."""
    alpha, t1, t2 = _check_family(alpha, t1, t2)
    alpha = alpha[..., None]
    return alpha * chebyshev_u_table(N, t1) + (1 - alpha) * chebyshev_u_table(N, t2)


def two_atom_family(alpha: float, t1: float, t2: float, N: int) -> TaylorSeries:
    alpha, t1, t2 = _check_family(alpha, t1, t2)
    # the family is symmetric under (alpha, t1, t2) -> (1 - alpha, t2, t1)
    if t1 > t2:
        alpha, t1, t2 = 1 - alpha, t2, t1
    return TaylorSeries(two_atom_array(alpha, t1, t2, N))


def objective_phi_t23(alpha, t):
    """a_3**2 - a_4**2 for F(z, alpha, t, -1), in closed form."""
    alpha, t, _ = _check_family(alpha, t, -1.0)
    a3 = 4 * alpha * t**2 - 4 * alpha + 3
    a4 = 4 * alpha + 8 * alpha * t**3 - 4 * alpha * t - 4
    return a3**2 - a4**2


def objective_phi1(t):
    """T_3(1) along the single-atom curve k(z, t)."""
    _, t, _ = _check_family(0.0, t, 0.0)
    return 8 * t**2 * (2 * t**2 - 1)


def objective_psi1(alpha):
    """T_3(1) along F(z, alpha, 1, -1)."""
    alpha, _, _ = _check_family(alpha, 0.0, 0.0)
    return 8 * (8 * alpha**2 - 8 * alpha + 1)


def objective_phi_t22(t):
    """a_2**2 - a_3**2 along k(z, t)."""
    _, t, _ = _check_family(0.0, t, 0.0)
    return -16 * t**4 + 12 * t**2 - 1


def objective_t22_chord(alpha):
    """a_2**2 - a_3**2 along F(z, alpha, 1, -1)."""
    alpha, _, _ = _check_family(alpha, 0.0, 0.0)
    return (2 - 4 * alpha) ** 2 - 9


# ---------------------------------------------------------------- hulls


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = 1e-10) -> list:
    """Monotone-chain hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(map(tuple, np.round(np.asarray(points, dtype=float), 10))))
    if len(pts) <= 2:
        return [tuple(p) for p in pts]

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= tol:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return [tuple(p) for p in hull]


@dataclass
class RegionHull:
    """Convex polygon approximating the coefficient region A_{n,m}.

    The polygon is inscribed in the true region; ``chord_error`` bounds how
    far the sampled curve chords fall short of the curve and is added to
    every containment tolerance.
    """

    n: int
    m: int
    vertices: list = field(default_factory=list)
    chord_error: float = 0.0

    def contains(self, point, tol: float = 1e-9) -> bool:
        tol = tol + self.chord_error
        p = np.asarray(point, dtype=float)
        v = np.asarray(self.vertices, dtype=float)
        if len(v) == 1:
            return bool(np.linalg.norm(p - v[0]) <= tol)
        if len(v) == 2:
            d = v[1] - v[0]
            s = np.clip(np.dot(p - v[0], d) / np.dot(d, d), 0, 1)
            return bool(np.linalg.norm(p - (v[0] + s * d)) <= tol)
        nxt = np.roll(v, -1, axis=0)
        edge = nxt - v
        rel = p - v
        cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
        return bool(np.all(cross / np.linalg.norm(edge, axis=1) >= -tol))

    def contains_many(self, points, tol: float = 1e-9) -> np.ndarray:
        return np.array([self.contains(p, tol) for p in np.asarray(points)])

    def to_csv(self) -> str:
        lines = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in self.vertices]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "chord_error": self.chord_error,
                "vertices": [list(v) for v in self.vertices],
            },
            indent=2,
        )


def _family_sweep(n: int, m: int, grid: int) -> np.ndarray:
    a = np.linspace(0, 1, grid)
    t = np.linspace(-1, 1, grid)
    A, T = np.meshgrid(a, t, indexing="ij")
    N = max(n, m)
    pts = []
    for end in (-1.0, 1.0):
        c = two_atom_array(A, T, end, N)
        pts.append(np.stack([c[..., n - 1], c[..., m - 1]], axis=-1).reshape(-1, 2))
    return np.concatenate(pts)


def region_hull(n: int, m: int, samples: int = 2001, family_grid: int = 101) -> RegionHull:
    """Hull of the curve t -> (U_{n-1}(t), U_{m-1}(t)) plus endpoint-atom families."""
    if samples < 64:
        raise ValueError("region_hull needs at least 64 curve samples")
    t = np.concatenate([np.linspace(-1, 1, samples), [-1.0, 1.0]])
    curve = np.stack([chebyshev_u(n - 1, t), chebyshev_u(m - 1, t)], axis=-1)
    pts = np.concatenate([curve, _family_sweep(n, m, family_grid)])
    return RegionHull(n, m, convex_hull(pts), _chord_error(n, m, samples))


def _chord_error(n: int, m: int, samples: int) -> float:
    """h**2 / 8 * max |curve''| for a uniform sampling of [-1, 1]."""
    h = 2.0 / (samples - 1)
    t = np.linspace(-1, 1, 20_001)
    dt = t[1] - t[0]
    curve = np.stack([chebyshev_u(n - 1, t), chebyshev_u(m - 1, t)], axis=-1)
    second = (curve[2:] - 2 * curve[1:-1] + curve[:-2]) / dt**2
    return float(h**2 / 8 * np.linalg.norm(second, axis=-1).max() * 1.01)


_LEMMA_FAMILIES = {
    # boundary of A_{2,3}: single atoms k(z, t), and F(z, alpha, 1, -1)
    "A23": ((2, 3), ("single", "chord")),
    # boundary of A_{3,4}: F(z, alpha, t, -1) and F(z, alpha, t, 1)
    "A34": ((3, 4), ("left", "right")),
}


def boundary_family_points(lemma_id: str, grid: int = 101) -> list:
    """Sweep the families that carry the boundary of A_{2,3} or A_{3,4}.

    Returns ``(params, (x, y))`` pairs with ``params`` in the (alpha, t1, t2)
    convention of F(z, alpha, t1, t2).
    """
    if lemma_id not in _LEMMA_FAMILIES:
        raise UnknownLemmaId(lemma_id)
    (n, m), families = _LEMMA_FAMILIES[lemma_id]
    a = np.linspace(0, 1, grid)
    t = np.linspace(-1, 1, grid)
    out = []
    for fam in families:
        if fam == "single":
            params = [(1.0, float(ti), 0.0) for ti in t]
        elif fam == "chord":
            params = [(float(ai), 1.0, -1.0) for ai in a]
        else:
            end = -1.0 if fam == "left" else 1.0
            params = [(float(ai), float(ti), end) for ai in a for ti in t]
        p = np.array(params)
        c = two_atom_array(p[:, 0], p[:, 1], p[:, 2], m)
        for prm, row in zip(params, c):
            out.append((prm, (float(row[n - 1]), float(row[m - 1]))))
    return out
