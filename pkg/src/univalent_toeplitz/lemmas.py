"""Executable versions of the classical coefficient inequalities.

Each oracle returns a BoundCheck with ``slack = rhs - lhs``; a valid class
member never has negative slack beyond rounding.  ``sweep`` draws random
class members in bulk and reports the worst slack per oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classes import (
    FunctionSpec,
    caratheodory_coeffs_array,
    close_to_convex_coeffs_array,
    sample_herglotz_params,
    starlike_coeffs_array,
)
from .errors import LambdaBelowThreshold, UnknownFunctional
from .series import TaylorSeries, UnitSeries


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    slack: float = field(init=False)
    witness: Optional[FunctionSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "slack", self.rhs - self.lhs)

    def holds(self, tol: float = 1e-9) -> bool:
        return self.slack >= -tol


def _c(p) -> np.ndarray:
    return p.coeffs if isinstance(p, UnitSeries) else np.asarray(p, dtype=complex)


def _b(g) -> np.ndarray:
    return g.coeffs if isinstance(g, TaylorSeries) else np.asarray(g, dtype=complex)


def efraimidis_rhs(mu: complex) -> float:
    return 2 * max(1.0, abs(2 * mu - 1))


def caratheodory_bound(p: UnitSeries, n: int, witness=None) -> BoundCheck:
    """|c_n| <= 2."""
    return BoundCheck(float(abs(_c(p)[n])), 2.0, witness)


def efraimidis_bound(p: UnitSeries, mu: complex, n: int, k: int, witness=None) -> BoundCheck:
    """|c_n - mu c_k c_{n-k}| <= 2 max(1, |2 mu - 1|)."""
    if not 1 <= k <= n - 1:
        raise IndexError(f"need 1 <= k <= n-1, got n={n}, k={k}")
    c = _c(p)
    lhs = abs(c[n] - mu * c[k] * c[n - k])
    return BoundCheck(float(lhs), efraimidis_rhs(mu), witness)


def janteng_bound(g: TaylorSeries, witness=None) -> BoundCheck:
    """|b_2 b_4 - b_3^2| <= 1 for starlike g."""
    b = _b(g)
    return BoundCheck(float(abs(b[1] * b[3] - b[2] ** 2)), 1.0, witness)


def koepf_rhs(lam: complex) -> float:
    return max(1.0, abs(3 - 4 * lam))


def fekete_szego_starlike(g: TaylorSeries, lam: complex, witness=None) -> BoundCheck:
    """|b_3 - lam b_2^2| <= max(1, |3 - 4 lam|) for starlike g."""
    b = _b(g)
    return BoundCheck(float(abs(b[2] - lam * b[1] ** 2)), koepf_rhs(lam), witness)


def ma_threshold(n: int, m: int) -> float:
    return 2 * (n + m - 1) / (n * m)


def ma_bound(g: TaylorSeries, lam: float, n: int, m: int, witness=None) -> BoundCheck:
    """|lam b_n b_m - b_{n+m-1}| <= lam n m - (n + m - 1), for lam above the gate."""
    if n < 2 or m < 2:
        raise ValueError("n, m must be >= 2")
    if lam < ma_threshold(n, m) - 1e-12:
        raise LambdaBelowThreshold(f"lambda={lam} below {ma_threshold(n, m)}")
    b = _b(g)
    lhs = abs(lam * b[n - 1] * b[m - 1] - b[n + m - 2])
    return BoundCheck(float(lhs), lam * n * m - (n + m - 1), witness)


K_FUNCTIONAL_BOUND = 21 / 2


def k_class_functional_bound(f: TaylorSeries, witness=None) -> BoundCheck:
    """|a_2 a_4 - 2 a_3^2| <= 21/2 for close-to-convex f."""
    a = _b(f)
    return BoundCheck(float(abs(a[1] * a[3] - 2 * a[2] ** 2)), K_FUNCTIONAL_BOUND, witness)


# --------------------------------------------------------------- sweeping


@dataclass
class SweepResult:
    oracle: str
    samples: int
    min_slack: float
    worst_params: dict
    violations: int

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "samples": self.samples,
            "min_slack": self.min_slack,
            "violations": self.violations,
            "worst_params": self.worst_params,
        }


def _starlike_batch(rng, size, N=8):
    w, th = sample_herglotz_params(rng, size)
    b = starlike_coeffs_array(caratheodory_coeffs_array(w, th, N))
    return b, {"weights": w, "angles": th}


def _p_batch(rng, size, N=8):
    w, th = sample_herglotz_params(rng, size)
    return caratheodory_coeffs_array(w, th, N), {"weights": w, "angles": th}


def _k_batch(rng, size, N=8):
    gw, gth = sample_herglotz_params(rng, size)
    pw, pth = sample_herglotz_params(rng, size)
    alpha = rng.uniform(-math.pi / 2, math.pi / 2, size=size)
    alpha = np.clip(alpha, -math.pi / 2 + 1e-9, math.pi / 2 - 1e-9)
    b = starlike_coeffs_array(caratheodory_coeffs_array(gw, gth, N))
    c = caratheodory_coeffs_array(pw, pth, N)
    a = close_to_convex_coeffs_array(b, alpha, c)
    return a, {"g_weights": gw, "g_angles": gth, "alpha": alpha, "p_weights": pw, "p_angles": pth}


def _sweep_defs(rng):
    """Per oracle: (sampler, lhs(batch) -> array, rhs scalar or array)."""
    mu_ef = complex(rng.normal(), rng.normal())
    lam_k = complex(rng.normal(), rng.normal())
    return {
        "caratheodory": (_p_batch, lambda c: np.abs(c[:, 1:6]).max(axis=1), 2.0),
        "efraimidis": (
            _p_batch,
            lambda c: np.abs(c[:, 4] - mu_ef * c[:, 1] * c[:, 3]),
            efraimidis_rhs(mu_ef),
        ),
        "efraimidis_23_9": (
            _p_batch,
            lambda c: np.abs(c[:, 3] - 23 / 9 * c[:, 1] * c[:, 2]),
            efraimidis_rhs(23 / 9),
        ),
        "janteng": (_starlike_batch, lambda b: np.abs(b[:, 1] * b[:, 3] - b[:, 2] ** 2), 1.0),
        "koepf": (
            _starlike_batch,
            lambda b: np.abs(b[:, 2] - lam_k * b[:, 1] ** 2),
            koepf_rhs(lam_k),
        ),
        "koepf_16_9": (
            _starlike_batch,
            lambda b: np.abs(b[:, 2] - 16 / 9 * b[:, 1] ** 2),
            koepf_rhs(16 / 9),
        ),
        "ma_23_9": (
            _starlike_batch,
            lambda b: np.abs(23 / 9 * b[:, 1] * b[:, 2] - b[:, 3]),
            23 / 9 * 6 - 4,
        ),
        "k_functional": (
            _k_batch,
            lambda a: np.abs(a[:, 1] * a[:, 3] - 2 * a[:, 2] ** 2),
            K_FUNCTIONAL_BOUND,
        ),
    }


SWEEP_ORACLES = (
    "caratheodory",
    "efraimidis",
    "efraimidis_23_9",
    "janteng",
    "koepf",
    "koepf_16_9",
    "ma_23_9",
    "k_functional",
)


def sweep(oracle: str, samples: int = 10_000, seed: int = 0, tol: float = 1e-9) -> SweepResult:
    rng = np.random.default_rng(seed)
    defs = _sweep_defs(rng)
    if oracle not in defs:
        raise UnknownFunctional(oracle)
    sampler, lhs_fn, rhs = defs[oracle]
    if samples == 0:
        return SweepResult(oracle, 0, math.inf, {}, 0)
    batch, params = sampler(rng, samples)
    slack = rhs - lhs_fn(batch)
    i = int(np.argmin(slack))
    worst = {k: np.atleast_1d(v[i]).tolist() for k, v in params.items()}
    return SweepResult(oracle, samples, float(slack[i]), worst, int(np.sum(slack < -tol)))
