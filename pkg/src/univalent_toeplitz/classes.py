"""Taylor coefficients of members of the classical univalent subclasses.

Every constructor is driven by a Caratheodory function p with Re p > 0,
encoded by finitely many Herglotz atoms:

    p(z) = sum_j w_j (1 + e^{i theta_j} z) / (1 - e^{i theta_j} z),
    c_n  = 2 sum_j w_j e^{i n theta_j}.

Starlike f solves z f' = f p, convex f solves (z f')' = f' p, bounded
turning f has f' = p, and close-to-convex f has
e^{i alpha} z f' / g = p cos(alpha) + i sin(alpha) for a starlike g.

The ``*_array`` functions are the batched kernels used by the search code;
the others wrap them for single functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AlphaOutOfRange,
    EvalRadiusExceeded,
    InvalidMeasure,
    SpecError,
    UnknownFunctionId,
)
from .series import (
    DETERMINANT_ORDER,
    MAX_EVAL_RADIUS,
    TaylorSeries,
    UnitSeries,
    ps_derivative,
    ps_div,
    ps_z_derivative,
)
from .typically_real import RobertsonMeasure, typically_real_coeffs

TWO_PI = 2 * math.pi
MEMBERSHIP_RADII = (0.3, 0.6, 0.9)
MEMBERSHIP_ANGLES = 128
MEMBERSHIP_ORDER = 256
STRICT_MARGIN = 1e-8


@dataclass(frozen=True)
class HerglotzAtoms:
    """Atomic probability measure on the unit circle: ((weight, angle), ...)."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(w), float(th) % TWO_PI) for w, th in self.atoms)
        if not atoms:
            raise InvalidMeasure("measure needs at least one atom")
        w = np.array([a[0] for a in atoms])
        if not np.all(np.isfinite([x for a in atoms for x in a])):
            raise InvalidMeasure("non-finite atom")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidMeasure(f"weights must be >= 0 and sum to 1 (sum={w.sum()!r})")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point_mass(cls, angle: float) -> "HerglotzAtoms":
        return cls(((1.0, angle),))

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def angles(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    def rotated(self, phi: float) -> "HerglotzAtoms":
        """Atoms of p(e^{i phi} z)."""
        return HerglotzAtoms(tuple((w, th + phi) for w, th in self.atoms))

    def conjugate(self) -> "HerglotzAtoms":
        return HerglotzAtoms(tuple((w, -th) for w, th in self.atoms))

    def min_real_part(self, radii=MEMBERSHIP_RADII, n_angles=MEMBERSHIP_ANGLES) -> float:
        """Smallest Re p over a polar grid; positive for every valid measure."""
        r = np.asarray(radii)[:, None]
        phi = np.linspace(0, TWO_PI, n_angles, endpoint=False)[None, :]
        z = (r * np.exp(1j * phi))[..., None]
        u = np.exp(1j * self.angles) * z
        p = np.sum(self.weights * (1 + u) / (1 - u), axis=-1)
        return float(p.real.min())


def caratheodory_coeffs_array(weights, angles, N: int) -> np.ndarray:
    """Batched c_0..c_N for atoms of shape (..., k)."""
    weights = np.asarray(weights, dtype=float)
    angles = np.asarray(angles, dtype=float)
    n = np.arange(1, N + 1)
    rot = np.exp(1j * angles[..., :, None] * n)
    c = 2 * np.einsum("...j,...jn->...n", weights.astype(complex), rot)
    ones = np.ones(c.shape[:-1] + (1,), dtype=complex)
    return np.concatenate([ones, c], axis=-1)


def starlike_coeffs_array(c: np.ndarray) -> np.ndarray:
    """a_1..a_N from c_0..c_N via (n-1) a_n = sum_{k<n} a_k c_{n-k}."""
    c = np.asarray(c, dtype=complex)
    N = c.shape[-1] - 1
    a = np.zeros(c.shape[:-1] + (N,), dtype=complex)
    a[..., 0] = 1
    for n in range(2, N + 1):
        k = np.arange(1, n)
        a[..., n - 1] = np.sum(a[..., k - 1] * c[..., n - k], axis=-1) / (n - 1)
    return a


def convex_coeffs_array(c: np.ndarray) -> np.ndarray:
    """a_1..a_N from c_0..c_N via n(n-1) a_n = sum_{k<n} k a_k c_{n-k}."""
    c = np.asarray(c, dtype=complex)
    N = c.shape[-1] - 1
    a = np.zeros(c.shape[:-1] + (N,), dtype=complex)
    a[..., 0] = 1
    for n in range(2, N + 1):
        k = np.arange(1, n)
        a[..., n - 1] = np.sum(k * a[..., k - 1] * c[..., n - k], axis=-1) / (n * (n - 1))
    return a


def bounded_turning_coeffs_array(c: np.ndarray) -> np.ndarray:
    """a_n = c_{n-1} / n."""
    c = np.asarray(c, dtype=complex)
    N = c.shape[-1] - 1
    return c[..., :N] / np.arange(1, N + 1)


def _check_alpha(alpha):
    alpha = np.asarray(alpha, dtype=float)
    if np.any(~np.isfinite(alpha)) or np.any(np.abs(alpha) >= math.pi / 2):
        raise AlphaOutOfRange("alpha must lie strictly inside (-pi/2, pi/2)")
    return alpha


def close_to_convex_coeffs_array(b, alpha, c) -> np.ndarray:
    """a_1..a_N from starlike b_1..b_N, rotation alpha and c_0..c_N.

    n a_n = b_n + sum_{k=1}^{n-1} b_k c_{n-k} e^{-i alpha} cos(alpha).
    """
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    alpha = _check_alpha(alpha)
    N = b.shape[-1]
    scale = (np.exp(-1j * alpha) * np.cos(alpha))[..., None]
    d = c[..., : N] * scale
    d[..., 0] = 1
    a = np.zeros(np.broadcast_shapes(b.shape, d.shape), dtype=complex)
    for n in range(1, N + 1):
        k = np.arange(1, n + 1)
        a[..., n - 1] = np.sum(b[..., k - 1] * d[..., n - k], axis=-1) / n
    return a


def caratheodory_coeffs(h: HerglotzAtoms, N: int) -> UnitSeries:
    return UnitSeries(caratheodory_coeffs_array(h.weights, h.angles, N))


def starlike_from_caratheodory(h: HerglotzAtoms, N: int = DETERMINANT_ORDER) -> TaylorSeries:
    return TaylorSeries(starlike_coeffs_array(caratheodory_coeffs_array(h.weights, h.angles, N)))


def convex_from_caratheodory(h: HerglotzAtoms, N: int = DETERMINANT_ORDER) -> TaylorSeries:
    return TaylorSeries(convex_coeffs_array(caratheodory_coeffs_array(h.weights, h.angles, N)))


def bounded_turning_from_caratheodory(h: HerglotzAtoms, N: int = DETERMINANT_ORDER) -> TaylorSeries:
    return TaylorSeries(
        bounded_turning_coeffs_array(caratheodory_coeffs_array(h.weights, h.angles, N))
    )


def close_to_convex_from(
    g_atoms: HerglotzAtoms, alpha: float, p_atoms: HerglotzAtoms, N: int = DETERMINANT_ORDER
) -> TaylorSeries:
    """Close-to-convex f built from a starlike g (given by its own atoms)."""
    _check_alpha(alpha)
    b = starlike_coeffs_array(caratheodory_coeffs_array(g_atoms.weights, g_atoms.angles, N))
    c = caratheodory_coeffs_array(p_atoms.weights, p_atoms.angles, N)
    return TaylorSeries(close_to_convex_coeffs_array(b, alpha, c))


# ------------------------------------------------------------ named members


_I_POWERS = np.array([1, 1j, -1, -1j])


def _named_coeffs(named_id: str, N: int, theta: Optional[float]) -> np.ndarray:
    n = np.arange(1, N + 1)
    i_pow = _I_POWERS[(n - 1) % 4]
    if named_id == "identity":
        return (n == 1).astype(complex)
    if named_id == "koebe":
        return n.astype(complex)
    if named_id == "koebe_rotation":
        if theta is None:
            raise SpecError("koebe_rotation needs theta")
        return n * np.exp(1j * (n - 1) * theta)
    if named_id == "koebe_i":
        # z / (1 - iz)^2
        return n * i_pow
    if named_id == "half_plane_i":
        # z / (1 - iz)
        return i_pow.copy()
    if named_id == "bounded_turning_i":
        # f' = (1 + iz) / (1 - iz)
        a = 2 * i_pow / n
        a[0] = 1
        return a
    if named_id == "log_map":
        # -log(1 - z)
        return (1 / n).astype(complex)
    if named_id == "odd_koebe":
        # sqrt(k(z^2)) = z / (1 - z^2)
        return (n % 2 == 1).astype(complex)
    raise UnknownFunctionId(named_id)


NAMED_FUNCTIONS = {
    "identity": "f(z) = z",
    "koebe": "z / (1 - z)^2",
    "koebe_rotation": "z / (1 - e^{i theta} z)^2 (needs theta)",
    "koebe_i": "z / (1 - iz)^2",
    "half_plane_i": "z / (1 - iz)",
    "bounded_turning_i": "primitive of (1 + iz) / (1 - iz)",
    "log_map": "-log(1 - z)",
    "odd_koebe": "z / (1 - z^2)",
}


def named_function(named_id: str, N: int = DETERMINANT_ORDER, theta: Optional[float] = None) -> TaylorSeries:
    return TaylorSeries(_named_coeffs(named_id, N, theta))


# ---------------------------------------------------------- function specs

VARIANTS = ("named", "starlike", "convex", "bounded_turning", "close_to_convex", "typically_real")
_KEY_ORDER = ("variant", "named_id", "theta", "atoms", "alpha", "p_atoms")


@dataclass(frozen=True)
class FunctionSpec:
    """Serializable description of one class member.

    ``atoms`` are Herglotz atoms (weight, angle) for the Caratheodory-driven
    variants, the starlike generator g for ``close_to_convex``, and
    Robertson atoms (weight, t) for ``typically_real``.
    """

    variant: str
    atoms: Optional[tuple] = None
    alpha: Optional[float] = None
    p_atoms: Optional[tuple] = None
    named_id: Optional[str] = None
    theta: Optional[float] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise SpecError(f"unknown variant {self.variant!r}")
        if self.variant == "named":
            if self.named_id not in NAMED_FUNCTIONS:
                raise UnknownFunctionId(str(self.named_id))
        elif self.atoms is None:
            raise SpecError(f"variant {self.variant!r} needs atoms")
        if self.variant == "close_to_convex":
            if self.alpha is None or self.p_atoms is None:
                raise SpecError("close_to_convex needs alpha and p_atoms")
            _check_alpha(self.alpha)
        for key in ("atoms", "p_atoms"):
            val = getattr(self, key)
            if val is not None:
                object.__setattr__(self, key, tuple(tuple(map(float, a)) for a in val))
        if self.variant == "typically_real":
            RobertsonMeasure(self.atoms)
        elif self.atoms is not None:
            HerglotzAtoms(self.atoms)
        if self.p_atoms is not None:
            HerglotzAtoms(self.p_atoms)

    def herglotz(self) -> HerglotzAtoms:
        return HerglotzAtoms(self.atoms)

    def build(self, N: int = DETERMINANT_ORDER) -> TaylorSeries:
        if self.variant == "named":
            return named_function(self.named_id, N, self.theta)
        if self.variant == "typically_real":
            return typically_real_coeffs(RobertsonMeasure(self.atoms), N)
        if self.variant == "close_to_convex":
            return close_to_convex_from(self.herglotz(), self.alpha, HerglotzAtoms(self.p_atoms), N)
        ctor = {
            "starlike": starlike_from_caratheodory,
            "convex": convex_from_caratheodory,
            "bounded_turning": bounded_turning_from_caratheodory,
        }[self.variant]
        return ctor(self.herglotz(), N)

    def to_dict(self) -> dict:
        out = {}
        for key in _KEY_ORDER:
            val = getattr(self, key)
            if val is None:
                continue
            out[key] = [list(a) for a in val] if key in ("atoms", "p_atoms") else val
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionSpec":
        if not isinstance(d, dict) or "variant" not in d:
            raise SpecError("function spec must be an object with a 'variant' key")
        unknown = set(d) - set(_KEY_ORDER)
        if unknown:
            raise SpecError(f"unknown keys {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError, InvalidMeasure) as exc:
            raise SpecError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "FunctionSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


# -------------------------------------------------------------- membership


@dataclass(frozen=True)
class MembershipResult:
    passed: bool
    worst_margin: float


def _grid(radii, n_angles):
    phi = np.linspace(0, TWO_PI, n_angles, endpoint=False)
    return (np.asarray(radii)[:, None] * np.exp(1j * phi)[None, :]).ravel()


def _eval_many(coeffs, zs):
    if np.any(np.abs(zs) > MAX_EVAL_RADIUS):
        raise EvalRadiusExceeded("membership grid exceeds the evaluation radius")
    acc = np.zeros_like(zs, dtype=complex)
    for c in coeffs[::-1]:
        acc = acc * zs + c
    return acc


CLASS_IDS = ("starlike", "convex", "close_to_convex", "bounded_turning", "typically_real")


def membership_check(
    f,
    class_id: str,
    *,
    generator=None,
    alpha: float = 0.0,
    N: int = MEMBERSHIP_ORDER,
    radii=MEMBERSHIP_RADII,
    n_angles: int = MEMBERSHIP_ANGLES,
) -> MembershipResult:
    """Sample the defining inequality of ``class_id`` on a polar grid.

    ``f`` is a TaylorSeries or a FunctionSpec (rebuilt at order ``N``).  For
    ``close_to_convex`` the starlike ``generator`` (TaylorSeries) and
    ``alpha`` are required unless ``f`` is a close_to_convex FunctionSpec.
    The worst margin is the minimum of the sampled real part (or of
    Im z * Im f for typically real functions).
    """
    if class_id not in CLASS_IDS:
        raise SpecError(f"unknown class {class_id!r}")
    if isinstance(f, FunctionSpec):
        if f.variant == "close_to_convex" and generator is None:
            generator = starlike_from_caratheodory(f.herglotz(), N)
            alpha = f.alpha
        f = f.build(N)
    N = f.truncation_order
    a = f.power_coeffs()
    zs = _grid(radii, n_angles)

    if class_id == "starlike":
        q = ps_div(ps_z_derivative(a, N)[1:], a[1:], N - 1)
        vals = _eval_many(q, zs).real
    elif class_id == "convex":
        fp = ps_derivative(a, N - 1)
        q = ps_div(ps_derivative(ps_z_derivative(a, N), N - 1), fp, N - 1)
        vals = _eval_many(q, zs).real
    elif class_id == "bounded_turning":
        vals = _eval_many(ps_derivative(a, N - 1), zs).real
    elif class_id == "close_to_convex":
        if generator is None:
            raise SpecError("close_to_convex membership needs the starlike generator")
        g = generator.power_coeffs()
        M = min(N, generator.truncation_order)
        q = ps_div(ps_z_derivative(a, M)[1:], g[1 : M + 1], M - 1)
        vals = (np.exp(1j * alpha) * _eval_many(q, zs)).real
    else:
        vals = zs.imag * _eval_many(a, zs).imag
        worst = float(vals.min())
        return MembershipResult(worst >= -STRICT_MARGIN, worst)

    worst = float(vals.min())
    return MembershipResult(worst > STRICT_MARGIN, worst)


# ------------------------------------------------------------------ sampling


def sample_herglotz_params(rng: np.random.Generator, size: int, max_atoms: int = 4):
    """Random weights/angles arrays of shape (size, max_atoms).

    The atom count is uniform on 1..max_atoms; unused slots get weight 0.
    Weights are a flat Dirichlet draw over the used atoms, angles uniform.
    """
    counts = rng.integers(1, max_atoms + 1, size=size)
    raw = rng.exponential(size=(size, max_atoms))
    raw[np.arange(max_atoms)[None, :] >= counts[:, None]] = 0
    weights = raw / raw.sum(axis=1, keepdims=True)
    angles = rng.uniform(0, TWO_PI, size=(size, max_atoms))
    return weights, angles


def sample_robertson_params(rng: np.random.Generator, size: int, max_atoms: int = 3):
    counts = rng.integers(1, max_atoms + 1, size=size)
    raw = rng.exponential(size=(size, max_atoms))
    raw[np.arange(max_atoms)[None, :] >= counts[:, None]] = 0
    weights = raw / raw.sum(axis=1, keepdims=True)
    points = rng.uniform(-1, 1, size=(size, max_atoms))
    return weights, points
