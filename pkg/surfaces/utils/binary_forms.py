# surfaces/utils/binary_forms.py
"""
Homogeneous trigonometric polynomials ("binary forms") in (cos θ, sin θ).

A form of degree d is stored as an array ``a`` of shape ``(d + 1, *trailing)``
with ``f(θ) = Σ_k a[k] cos^(d-k)θ sin^kθ``. The trailing shape is ``()`` for
scalar forms and ``(n,)`` for vector-valued ones (e.g. η(θ) in R^n).

Real roots in [0, π) come from the polynomial in p = tan θ,
``Σ_k a[k] p^k``, solved with companion-matrix eigenvalues; θ = 0 and
θ = π/2 roots show up as vanishing low / high coefficients and are counted
without dividing by cos θ.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

# a coefficient below this fraction of the largest one counts as zero when
# peeling θ = 0 / θ = π/2 roots off the ends
_END_EPS = 1e-12
_IMAG_EPS = 1e-6
_MAX_POLISH_SHIFT = 1e-4


# =========================
# Algebra
# =========================
def degree(form: np.ndarray) -> int:
    return np.asarray(form).shape[0] - 1


def basis(d: int, theta) -> np.ndarray:
    """Monomials cos^(d-k) sin^k for k = 0..d, shape (d + 1, *theta.shape)."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c ** (d - k) * s**k for k in range(d + 1)])


def evaluate(form, theta) -> np.ndarray:
    form = np.asarray(form, dtype=float)
    mono = basis(degree(form), theta)
    # contract the monomial axis; trailing form axes stay last
    return np.tensordot(np.moveaxis(mono, 0, -1), form, axes=([-1], [0]))


def multiply(p, q) -> np.ndarray:
    """Product of two scalar forms."""
    return np.convolve(np.asarray(p, dtype=float), np.asarray(q, dtype=float))


def dot(p, q) -> np.ndarray:
    """Scalar form p(θ)·q(θ) of two vector-valued forms."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    # contract every trailing axis; scalar forms give the outer product
    table = p.reshape(p.shape[0], -1) @ q.reshape(q.shape[0], -1).T
    out = np.zeros(p.shape[0] + q.shape[0] - 1)
    for i in range(p.shape[0]):
        out[i:i + q.shape[0]] += table[i]
    return out


def cross(p, q) -> np.ndarray:
    """Vector form p(θ) × q(θ) of two 3-vector-valued forms."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.zeros((p.shape[0] + q.shape[0] - 1, 3))
    for i in range(p.shape[0]):
        for j in range(q.shape[0]):
            out[i + j] += np.cross(p[i], q[j])
    return out


def det2(p, q) -> np.ndarray:
    """Scalar form det[p(θ), q(θ)] of two 2-vector-valued forms."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    rot = np.stack([q[..., 1], -q[..., 0]], axis=-1)
    return dot(p, rot)


def det3(p, q, r) -> np.ndarray:
    return dot(p, cross(q, r))


def derivative(form) -> np.ndarray:
    """d/dθ; the result has the same degree."""
    form = np.asarray(form, dtype=float)
    d = degree(form)
    out = np.zeros_like(form)
    for k in range(d + 1):
        if k < d:
            out[k + 1] -= (d - k) * form[k]
        if k > 0:
            out[k - 1] += k * form[k]
    return out


def scale(form) -> float:
    return float(np.max(np.abs(form))) if np.size(form) else 0.0


def is_identically_zero(form, threshold: float) -> bool:
    return scale(form) <= threshold


# =========================
# Roots
# =========================
@dataclass(frozen=True)
class RootSet:
    angles: tuple[float, ...] = ()
    multiplicities: tuple[int, ...] = ()
    residuals: tuple[float, ...] = ()
    identically_zero: bool = False
    rejected: tuple[float, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.angles)

    def odd(self) -> "RootSet":
        """Roots of odd multiplicity: sign changes, i.e. true extrema of an antiderivative."""
        keep = [i for i, m in enumerate(self.multiplicities) if m % 2 == 1]
        return RootSet(
            angles=tuple(self.angles[i] for i in keep),
            multiplicities=tuple(self.multiplicities[i] for i in keep),
            residuals=tuple(self.residuals[i] for i in keep),
            identically_zero=self.identically_zero,
            rejected=self.rejected,
        )


def companion_roots(poly) -> np.ndarray:
    """Complex roots of Σ poly[k] p^k (ascending, nonzero leading term)."""
    poly = np.asarray(poly, dtype=float)
    n = poly.shape[0] - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    lead = poly[-1]
    companion = np.zeros((n, n))
    companion[0, :] = -poly[-2::-1] / lead
    if n > 1:
        companion[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(companion)


def _newton_polish(form, dform, theta: float, iterations: int = 30) -> float:
    for _ in range(iterations):
        f = float(evaluate(form, theta))
        df = float(evaluate(dform, theta))
        if df == 0.0:
            break
        step = f / df
        theta -= step
        if abs(step) < 1e-15:
            break
    return theta


def _wrap(theta: float) -> float:
    t = math.fmod(theta, math.pi)
    if t < 0:
        t += math.pi
    if t >= math.pi:
        t -= math.pi
    return t


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def real_roots(form, zero_threshold: float, root_tol: float, merge_tol: float) -> RootSet:
    """
    Real zeros θ ∈ [0, π) of a scalar binary form.

    ``zero_threshold`` is absolute: a form whose coefficients all lie below it
    is identically zero. ``root_tol`` bounds the polished residual relative to
    the largest coefficient. Roots closer than ``merge_tol`` merge and add up
    their multiplicities.
    """
    form = np.asarray(form, dtype=float)
    s = scale(form)
    if s <= zero_threshold:
        return RootSet(identically_zero=True)

    d = degree(form)
    small = np.abs(form) <= _END_EPS * s
    low = 0
    while low <= d and small[low]:
        low += 1
    high = 0
    while high <= d - low and small[d - high]:
        high += 1

    candidates: list[tuple[float, int]] = []
    if low:
        candidates.append((0.0, low))
    if high:
        candidates.append((math.pi / 2, high))

    reduced = form[low:d + 1 - high]
    for z in companion_roots(reduced):
        if abs(z.imag) <= _IMAG_EPS * max(1.0, abs(z)):
            candidates.append((_wrap(math.atan(z.real)), 1))

    dform = derivative(form)
    polished: list[tuple[float, int, float]] = []
    rejected: list[float] = []
    for theta, mult in candidates:
        if mult == 1:
            polished_theta = _wrap(_newton_polish(form, dform, theta))
            # a polish that wanders off belongs to some other root
            if _circular_gap(polished_theta, theta) < _MAX_POLISH_SHIFT:
                theta = polished_theta
        residual = abs(float(evaluate(form, theta))) / s
        if residual > root_tol:
            logger.debug("rejected root θ=%.12g (residual %.3g)", theta, residual)
            rejected.append(theta)
            continue
        polished.append((theta, mult, residual))

    polished.sort()
    merged: list[list] = []
    for theta, mult, residual in polished:
        if merged and _circular_gap(merged[-1][0], theta) < merge_tol:
            merged[-1][1] += mult
            merged[-1][2] = max(merged[-1][2], residual)
        else:
            merged.append([theta, mult, residual])
    # θ near π and θ near 0 are the same direction
    if len(merged) > 1 and _circular_gap(merged[0][0], merged[-1][0]) < merge_tol:
        last = merged.pop()
        merged[0][1] += last[1]
        merged[0][2] = max(merged[0][2], last[2])

    return RootSet(
        angles=tuple(m[0] for m in merged),
        multiplicities=tuple(m[1] for m in merged),
        residuals=tuple(m[2] for m in merged),
        identically_zero=False,
        rejected=tuple(rejected),
    )


# =========================
# Discriminant
# =========================
def quartic_discriminant(form) -> np.ndarray:
    """
    Discriminant of the binary quartic Σ a_k x^(4-k) y^k; vectorized over
    trailing axes. Negative: two real roots; positive: zero or four.
    """
    a, b, c, d, e = (np.asarray(form[k], dtype=float) for k in range(5))
    return (
        256 * a**3 * e**3
        - 192 * a**2 * b * d * e**2
        - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e
        - 27 * a**2 * d**4
        + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e
        - 80 * a * b * c**2 * d * e
        + 18 * a * b * c * d**3
        + 16 * a * c**4 * e
        - 4 * a * c**3 * d**2
        - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3
        - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )
