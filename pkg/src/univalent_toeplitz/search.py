"""Derivative-free search over generator parameters.

Objectives are *batched*: they take an array of parameter vectors with
shape (m, d) and return m real values.  ``pointwise`` adapts a scalar
function.  Search always maximizes internally; minimization negates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BudgetExceeded

MAX_DIMS = 8
MAX_LATTICE = 10**8
DEFAULT_RESOLUTION = 201
TIE_TOL = 1e-9
MAX_TIES_LISTED = 32


@dataclass(frozen=True)
class Dim:
    name: str
    lower: float
    upper: float
    wrap: bool = False


@dataclass(frozen=True)
class SearchDomain:
    dims: tuple

    def __post_init__(self):
        dims = tuple(d if isinstance(d, Dim) else Dim(*d) for d in self.dims)
        if not 1 <= len(dims) <= MAX_DIMS:
            raise ValueError(f"search domains have 1..{MAX_DIMS} dimensions")
        for d in dims:
            if not d.lower < d.upper:
                raise ValueError(f"empty range for {d.name}")
        object.__setattr__(self, "dims", dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def lower(self) -> np.ndarray:
        return np.array([d.lower for d in self.dims])

    @property
    def upper(self) -> np.ndarray:
        return np.array([d.upper for d in self.dims])

    @property
    def wrap(self) -> np.ndarray:
        return np.array([d.wrap for d in self.dims])

    def normalize(self, x: np.ndarray) -> np.ndarray:
        """Fold periodic coordinates back and clamp the rest."""
        x = np.array(x, dtype=float)
        lo, hi, wrap = self.lower, self.upper, self.wrap
        span = hi - lo
        x = np.where(wrap, lo + np.mod(x - lo, span), np.clip(x, lo, hi))
        return x

    def to_list(self) -> list:
        return [asdict(d) for d in self.dims]


def pointwise(fn: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], np.ndarray]:
    """Turn a scalar objective into a batched one."""

    def batched(X):
        return np.array([fn(x) for x in np.atleast_2d(X)], dtype=float)

    return batched


def capped_resolution(ndim: int, budget: int = 200_000, cap: int = DEFAULT_RESOLUTION) -> int:
    """Largest per-dimension resolution <= cap whose lattice fits the budget."""
    r = int(math.floor(budget ** (1.0 / ndim) + 1e-9))
    return max(3, min(cap, r))


def lattice_axes(domain: SearchDomain, resolution) -> list:
    res = np.broadcast_to(np.asarray(resolution, dtype=int), (domain.ndim,))
    if np.any(res < 3):
        raise ValueError("resolution must be at least 3 per dimension")
    axes = []
    for d, r in zip(domain.dims, res):
        axes.append(np.linspace(d.lower, d.upper, int(r), endpoint=not d.wrap))
    return axes


def _ordered_best(X: np.ndarray, vals: np.ndarray, tol: float) -> tuple:
    """Best value and the tied points, lexicographically sorted."""
    best = vals.max()
    tied = X[vals >= best - tol]
    order = np.lexsort(tied.T[::-1])
    return best, tied[order]


@dataclass
class GridResult:
    params: np.ndarray
    value: float
    ties: list = field(default_factory=list)
    top: list = field(default_factory=list)
    evaluated: int = 0

    def __iter__(self):
        yield self.params
        yield self.value


def grid_search(
    objective: Callable,
    domain: SearchDomain,
    resolution=DEFAULT_RESOLUTION,
    *,
    maximize: bool = True,
    top_k: int = 16,
    chunk: int = 65_536,
) -> GridResult:
    """Evaluate ``objective`` on a full lattice and keep the best points.

    Periodic dimensions exclude the upper endpoint.  Ties within 1e-9 of
    the optimum resolve to the lexicographically smallest parameter vector.
    """
    axes = lattice_axes(domain, resolution)
    shape = tuple(len(a) for a in axes)
    total = int(np.prod(shape, dtype=np.int64))
    if total > MAX_LATTICE:
        raise BudgetExceeded(f"lattice of {total} points exceeds {MAX_LATTICE}")
    sign = 1.0 if maximize else -1.0

    keep_X = np.empty((0, domain.ndim))
    keep_v = np.empty(0)
    best_val = -np.inf
    tie_X = np.empty((0, domain.ndim))
    for start in range(0, total, chunk):
        idx = np.unravel_index(np.arange(start, min(total, start + chunk)), shape)
        X = np.stack([ax[i] for ax, i in zip(axes, idx)], axis=-1)
        v = sign * np.asarray(objective(X), dtype=float)
        v = np.where(np.isfinite(v), v, -np.inf)
        # running top-k
        allX = np.concatenate([keep_X, X])
        allv = np.concatenate([keep_v, v])
        sel = np.argsort(-allv, kind="stable")[: max(top_k, 1)]
        keep_X, keep_v = allX[sel], allv[sel]
        # running tie set
        cmax = v.max()
        if cmax > best_val + TIE_TOL:
            best_val = cmax
            tie_X = X[v >= cmax - TIE_TOL]
        elif cmax >= best_val - TIE_TOL:
            best_val = max(best_val, cmax)
            tie_X = np.concatenate([tie_X, X[v >= best_val - TIE_TOL]])
    _, tied = _ordered_best(tie_X, np.full(len(tie_X), best_val), TIE_TOL)
    params = tied[0]
    top = [(x.copy(), sign * float(val)) for x, val in zip(keep_X, keep_v)]
    return GridResult(
        params=params,
        value=sign * float(best_val),
        ties=[t.tolist() for t in tied[1 : 1 + MAX_TIES_LISTED]],
        top=top,
        evaluated=total,
    )


def refine(
    objective: Callable,
    start,
    domain: SearchDomain,
    *,
    maximize: bool = True,
    max_iter: int = 500,
    xatol: float = 1e-10,
    restarts: int = 2,
) -> tuple:
    """Nelder-Mead polish of ``start`` inside the box.

    Periodic coordinates are folded, others clamped.  Restarts re-seed the
    simplex at the incumbent.  Never returns a point worse than ``start``.
    """
    sign = 1.0 if maximize else -1.0
    x0 = domain.normalize(start)

    def f(x):
        return -sign * float(np.asarray(objective(domain.normalize(x)[None, :]))[0])

    best_x, best_f = x0, f(x0)
    bounds = [(None, None) if d.wrap else (d.lower, d.upper) for d in domain.dims]
    span = domain.upper - domain.lower
    for attempt in range(restarts + 1):
        step = 0.05 * span / (10**attempt)
        simplex = [best_x]
        for i in range(domain.ndim):
            v = best_x.copy()
            if not domain.dims[i].wrap and v[i] + step[i] > domain.dims[i].upper:
                v[i] -= step[i]
            else:
                v[i] += step[i]
            simplex.append(v)
        res = minimize(
            f,
            best_x,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "initial_simplex": np.array(simplex),
                "maxiter": max_iter,
                "xatol": xatol,
                "fatol": 1e-15,
            },
        )
        if res.fun < best_f:
            best_x, best_f = domain.normalize(res.x), float(res.fun)
    return best_x, -sign * best_f


@dataclass
class ExperimentReport:
    experiment_id: str
    title: str
    objective: str
    class_id: str
    sense: str
    kind: str
    domain: list
    best_value: float
    argmax: list
    paper_target: float
    deviation: float
    samples_used: int
    runtime: float
    bound: Optional[float] = None
    violations: int = 0
    label: str = ""
    witness: Optional[dict] = None
    ties: list = field(default_factory=list)
    secondary: list = field(default_factory=list)
    notes: str = ""

    def passed(self, tol: float = 1e-6) -> bool:
        if self.violations:
            return False
        if self.kind == "sharp":
            return abs(self.deviation) < tol
        return True

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = asdict(self)
        if not include_runtime:
            d.pop("runtime")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(**d)


@dataclass
class SamplerResult:
    class_id: str
    functional: str
    samples_used: int
    max_observed: float
    min_observed: float
    violations: int
    best_params: dict
    best_is_witness: bool
    witness: Optional[dict] = None
    random_max: float = -math.inf
    near_extremal: list = field(default_factory=list)


def spawn_rngs(seed: int, n: int) -> list:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def chunk_sizes(total: int, chunk: int) -> list:
    return [min(chunk, total - s) for s in range(0, total, chunk)]


def bound_respecting_sampler(
    class_id: str,
    n_samples: int,
    seed: int = 0,
    functional: str = "t3_2",
    bound=None,
    *,
    include_witnesses: bool = True,
    chunk: int = 20_000,
    near_tol: float = 1e-6,
) -> SamplerResult:
    """Random members of ``class_id`` scored by ``functional``.

    Complex classes are scored by modulus and checked against a scalar
    ``bound``; typically real members are scored by the signed real value
    and ``bound`` may be a (lower, upper) pair.  Documented extremal
    members are appended when ``include_witnesses`` is set.
    """
    from .experiments import class_sampler, class_witnesses, score

    sample = class_sampler(class_id)
    lower, upper = _bound_pair(bound, class_id)
    best = -math.inf
    worst = math.inf
    best_params: dict = {}
    best_is_witness = False
    best_witness = None
    violations = 0
    used = 0
    for rng, size in zip(spawn_rngs(seed, max(1, -(-n_samples // chunk))), chunk_sizes(n_samples, chunk)):
        a, params = sample(rng, size)
        v = score(class_id, functional, a)
        used += size
        violations += int(np.sum((v > upper + 1e-9) | (v < lower - 1e-9)))
        i = int(np.argmax(v))
        if v[i] > best:
            best = float(v[i])
            best_params = {k: np.atleast_1d(p[i]).tolist() for k, p in params.items()}
        worst = min(worst, float(v.min()))
    random_max = best
    witness_vals = []
    if include_witnesses:
        for spec in class_witnesses(class_id):
            a = spec.build(8).coeffs[None, :]
            v = float(score(class_id, functional, a)[0])
            witness_vals.append((v, spec.to_dict()))
            if v > upper + 1e-9 or v < lower - 1e-9:
                violations += 1
            worst = min(worst, v)
            if v > best:
                best, best_is_witness, best_witness = v, True, spec.to_dict()
                best_params = {}
    near = [w for v, w in witness_vals if v >= best - near_tol]
    return SamplerResult(
        class_id=class_id,
        functional=functional,
        samples_used=used,
        max_observed=best,
        min_observed=worst,
        violations=violations,
        best_params=best_params,
        best_is_witness=best_is_witness,
        witness=best_witness,
        random_max=random_max,
        near_extremal=near,
    )


def _bound_pair(bound, class_id):
    if bound is None:
        return -math.inf, math.inf
    if isinstance(bound, Sequence):
        lo, hi = bound
        return float(lo), float(hi)
    return -math.inf, float(bound)
