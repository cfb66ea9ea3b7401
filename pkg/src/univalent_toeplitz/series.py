"""Truncated complex power series.

Index convention, used everywhere in the package:

* ``TaylorSeries.coeffs[k]`` holds a_{k+1}; so ``coeffs[0]`` is a_1 and a
  normalized class member has ``coeffs[0] == 1``.
* ``UnitSeries.coeffs[k]`` holds c_k; so ``coeffs[0]`` is c_0 == 1.
* The ``ps_*`` functions take raw power-indexed arrays: entry ``k`` is the
  coefficient of z**k.  ``TaylorSeries.power_coeffs()`` inserts the zero
  constant term.

The ``ps_*`` functions act on the last axis and broadcast over leading
axes, so a batch of series can be processed in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZeroLeadingTerm, EvalRadiusExceeded

MAX_EVAL_RADIUS = 0.95
DETERMINANT_ORDER = 16
EVAL_ORDER = 64


def _as_series(a, N):
    arr = np.asarray(a, dtype=complex)
    if arr.shape[-1] < N + 1:
        pad = [(0, 0)] * (arr.ndim - 1) + [(0, N + 1 - arr.shape[-1])]
        arr = np.pad(arr, pad)
    return arr[..., : N + 1]


def ps_mul(a, b, N: int) -> np.ndarray:
    """Cauchy product of ``a`` and ``b`` through z**N."""
    a = _as_series(a, N)
    b = _as_series(b, N)
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (N + 1,)
    out = np.zeros(shape, dtype=complex)
    for n in range(N + 1):
        out[..., n] = np.sum(a[..., : n + 1] * b[..., n::-1], axis=-1)
    return out


def ps_div(a, b, N: int) -> np.ndarray:
    """Quotient q with q*b == a through z**N."""
    a = _as_series(a, N)
    b = _as_series(b, N)
    b0 = b[..., 0]
    if np.any(np.abs(b0) < 1e-14):
        raise DivisionByZeroLeadingTerm("divisor has vanishing constant term")
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (N + 1,)
    q = np.zeros(shape, dtype=complex)
    for n in range(N + 1):
        acc = a[..., n] - np.sum(q[..., :n] * b[..., n:0:-1], axis=-1)
        q[..., n] = acc / b0
    return q


def ps_derivative(a, N: int) -> np.ndarray:
    """Coefficients of f' through z**N (needs ``a`` through z**(N+1))."""
    a = _as_series(a, N + 1)
    return a[..., 1:] * np.arange(1, N + 2)


def ps_z_derivative(a, N: int) -> np.ndarray:
    """Coefficients of z*f' through z**N."""
    a = _as_series(a, N)
    return a * np.arange(N + 1)


def ps_eval(a, z: complex) -> complex:
    """Horner evaluation of the truncated polynomial at ``z``.

    The neglected tail is at most sum_{n>N} |a_n| |z|**n; for coefficient
    growth |a_n| <= C n this is below C (N+1) r**(N+1) / (1-r)**2 with
    r = |z|, hence the radius cap.
    """
    if abs(z) > MAX_EVAL_RADIUS:
        raise EvalRadiusExceeded(f"|z| = {abs(z):.4g} exceeds {MAX_EVAL_RADIUS}")
    a = np.asarray(a, dtype=complex)
    acc = np.zeros(a.shape[:-1], dtype=complex)
    for coeff in np.moveaxis(a[..., ::-1], -1, 0):
        acc = acc * z + coeff
    return acc[()] if acc.ndim == 0 else acc


def tail_bound(growth: float, N: int, r: float) -> float:
    """Bound on the dropped tail when |a_n| <= growth * n."""
    n = np.arange(N + 1, N + 2000)
    return float(growth * np.sum(n * r**n))


def _check_finite(coeffs: np.ndarray) -> None:
    if not np.all(np.isfinite(coeffs)):
        raise ValueError("series coefficients must be finite")


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """f(z) = a_1 z + a_2 z**2 + ... + a_N z**N."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("TaylorSeries needs at least one coefficient")
        _check_finite(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation_order(self) -> int:
        return self.coeffs.size

    def a(self, n: int) -> complex:
        if not 1 <= n <= self.truncation_order:
            raise IndexError(f"a_{n} outside 1..{self.truncation_order}")
        return complex(self.coeffs[n - 1])

    def power_coeffs(self) -> np.ndarray:
        return np.concatenate([[0.0], self.coeffs])

    def __call__(self, z: complex) -> complex:
        return complex(ps_eval(self.power_coeffs(), z))

    def conjugate(self) -> "TaylorSeries":
        return TaylorSeries(np.conj(self.coeffs))

    def truncate(self, N: int) -> "TaylorSeries":
        return TaylorSeries(self.coeffs[:N])

    def __repr__(self):
        head = ", ".join(f"{c:.4g}" for c in self.coeffs[:5])
        return f"TaylorSeries(N={self.truncation_order}, [{head}, ...])"


@dataclass(frozen=True, eq=False)
class UnitSeries:
    """p(z) = 1 + c_1 z + ... + c_N z**N."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0 or c[0] != 1:
            raise ValueError("UnitSeries must start with c_0 = 1")
        _check_finite(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation_order(self) -> int:
        return self.coeffs.size - 1

    def c(self, n: int) -> complex:
        return complex(self.coeffs[n])

    def __call__(self, z: complex) -> complex:
        return complex(ps_eval(self.coeffs, z))
