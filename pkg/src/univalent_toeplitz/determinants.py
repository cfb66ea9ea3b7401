"""Symmetric Toeplitz determinants T_q(n) of Taylor coefficients.

T_q(n) is the determinant of the q x q matrix whose (i, j) entry is
a_{n + |i - j|}.  All functions accept either a TaylorSeries or a raw
coefficient array of shape (..., N) holding a_1..a_N, so batches of
candidate functions are evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InsufficientTruncation, UnknownFunctional
from .series import TaylorSeries

COFACTOR_MAX_Q = 4


def _coeffs(f) -> np.ndarray:
    if isinstance(f, TaylorSeries):
        return f.coeffs
    return np.asarray(f, dtype=complex)


def _need(a: np.ndarray, top: int) -> None:
    if top > a.shape[-1]:
        raise InsufficientTruncation(f"a_{top} needed but series has order {a.shape[-1]}")


@dataclass(frozen=True)
class ToeplitzResult:
    n: int
    q: int
    value: complex
    abs_value: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "abs_value": self.abs_value,
        }


def _laplace(rows):
    """Cofactor expansion along the first row; entries may be arrays."""
    if len(rows) == 1:
        return rows[0][0]
    total = 0
    for j, entry in enumerate(rows[0]):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = entry * _laplace(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def toeplitz_matrix(f, n: int, q: int) -> np.ndarray:
    a = _coeffs(f)
    _need(a, n + q - 1)
    idx = n - 1 + np.abs(np.subtract.outer(np.arange(q), np.arange(q)))
    return a[..., idx]


def toeplitz_det_array(f, n: int, q: int) -> np.ndarray:
    """Batched T_q(n); cofactor expansion for q <= 4, LU above."""
    if n < 1 or q < 1:
        raise ValueError("n and q must be positive")
    a = _coeffs(f)
    _need(a, n + q - 1)
    if q <= COFACTOR_MAX_Q:
        rows = [[a[..., n - 1 + abs(i - j)] for j in range(q)] for i in range(q)]
        return np.asarray(_laplace(rows), dtype=complex)
    return np.linalg.det(toeplitz_matrix(a, n, q))


def toeplitz_det(f, n: int, q: int) -> ToeplitzResult:
    value = complex(toeplitz_det_array(_coeffs(f), n, q))
    return ToeplitzResult(n, q, value, abs(value))


def t2_closed(f, n: int):
    """a_n**2 - a_{n+1}**2."""
    a = _coeffs(f)
    _need(a, n + 1)
    return a[..., n - 1] ** 2 - a[..., n] ** 2


def t3_closed(f, n: int):
    """a_n^3 - 2 a_{n+1}^2 a_n - a_{n+2}^2 a_n + 2 a_{n+1}^2 a_{n+2}."""
    a = _coeffs(f)
    _need(a, n + 2)
    x, y, w = a[..., n - 1], a[..., n], a[..., n + 1]
    return x**3 - 2 * y**2 * x - w**2 * x + 2 * y**2 * w


def _a(a, n):
    return a[..., n - 1]


# Auxiliary functionals that appear in the bounds for T_3(2) and T_3(1).
_FUNCTIONALS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    # T_3(2) = (a_2 - a_4) * this
    "t32_cofactor": lambda a: _a(a, 2) ** 2 - 2 * _a(a, 3) ** 2 + _a(a, 2) * _a(a, 4),
    "t32_difference": lambda a: _a(a, 2) - _a(a, 4),
    "a2a4_minus_2a3sq": lambda a: _a(a, 2) * _a(a, 4) - 2 * _a(a, 3) ** 2,
    "fekete_szego_2": lambda a: _a(a, 3) - 2 * _a(a, 2) ** 2,
    "t2_2": lambda a: t2_closed(a, 2),
    "t2_3": lambda a: t2_closed(a, 3),
    "t3_1": lambda a: t3_closed(a, 1),
    "t3_2": lambda a: t3_closed(a, 2),
}

FUNCTIONAL_NAMES = tuple(_FUNCTIONALS)


def functional_library(name: str) -> Callable:
    """Evaluator for a registered functional; accepts TaylorSeries or arrays."""
    try:
        fn = _FUNCTIONALS[name]
    except KeyError:
        raise UnknownFunctional(name) from None

    def evaluate(f):
        a = _coeffs(f)
        _need(a, 4)
        out = fn(a)
        return complex(out) if np.ndim(out) == 0 else out

    evaluate.__name__ = name
    return evaluate
