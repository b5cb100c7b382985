# surfaces/jets.py
"""
Truncated third-order Taylor arithmetic in the two chart parameters (u, v).

A :class:`Jet3` stores the ten partial derivatives
``d^(i+j) f / du^i dv^j`` (i + j <= 3) at the expansion point, *not* the
Taylor coefficients: the coefficient of ``u^i v^j`` is the stored partial
divided by ``i! j!``. Keeping raw partials lets the frames module read
``X_u``, ``X_uv``, ... directly.

The coefficient array has shape ``(10, *shape)``; a trailing shape of ``()``
is a scalar jet, ``(n,)`` an ambient vector jet. Arithmetic broadcasts over
the trailing shape like numpy does.

Jets are immutable: the coefficient array is flagged read-only.
"""
from __future__ import annotations

from math import comb
from typing import Iterable, Literal, Optional, Sequence, Union

import numpy as np

from . import conf
from .exceptions import DivisionByZeroValue, DomainError

ORDER = 3

# multi-index order of the stored coefficients
INDICES: tuple[tuple[int, int], ...] = (
    (0, 0),
    (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
)
POSITION: dict[tuple[int, int], int] = {idx: k for k, idx in enumerate(INDICES)}
SIZE = len(INDICES)


def _leibniz_tensor() -> np.ndarray:
    # T[k, i, j] = C(a1, b1) C(a2, b2) when INDICES[i] + INDICES[j] == INDICES[k]
    t = np.zeros((SIZE, SIZE, SIZE))
    for k, (a1, a2) in enumerate(INDICES):
        for i, (b1, b2) in enumerate(INDICES):
            if b1 > a1 or b2 > a2:
                continue
            j = POSITION[(a1 - b1, a2 - b2)]
            t[k, i, j] = comb(a1, b1) * comb(a2, b2)
    return t


def _shift_table(axis: int) -> list[tuple[int, int]]:
    # (target, source) pairs for d/du (axis 0) or d/dv (axis 1)
    pairs = []
    for k, (i, j) in enumerate(INDICES):
        src = (i + 1, j) if axis == 0 else (i, j + 1)
        if sum(src) <= ORDER:
            pairs.append((k, POSITION[src]))
    return pairs


_LEIBNIZ = _leibniz_tensor()
_SHIFT_U = _shift_table(0)
_SHIFT_V = _shift_table(1)

Number = Union[float, int, np.ndarray]


class Jet3:
    """Truncated order-3 jet of a (possibly vector-valued) function of (u, v)."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None  # ndarray * Jet3 defers to Jet3.__rmul__

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=float)
        if arr.ndim == 0 or arr.shape[0] != SIZE:
            raise ValueError(f"a Jet3 needs {SIZE} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    # ----- constructors -----
    @classmethod
    def constant(cls, value: Number) -> "Jet3":
        value = np.asarray(value, dtype=float)
        c = np.zeros((SIZE,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, which: Literal["u", "v"], value: Number) -> "Jet3":
        if which not in ("u", "v"):
            raise ValueError("which must be 'u' or 'v'")
        value = np.asarray(value, dtype=float)
        c = np.zeros((SIZE,) + value.shape)
        c[0] = value
        c[POSITION[(1, 0) if which == "u" else (0, 1)]] = 1.0
        return cls(c)

    @classmethod
    def stack(cls, jets: Sequence["Jet3"]) -> "Jet3":
        """Stack scalar jets into a vector jet (new last axis)."""
        return cls(np.stack([j.coeffs for j in jets], axis=-1))

    # ----- access -----
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def value(self):
        return self.coeffs[0]

    def partial(self, i: int, j: int):
        return self.coeffs[POSITION[(i, j)]]

    def coeff_map(self) -> dict[tuple[int, int], object]:
        return {idx: self.coeffs[k] for k, idx in enumerate(INDICES)}

    def __getitem__(self, key) -> "Jet3":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet3(self.coeffs[(slice(None),) + key])

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("scalar jet has no length")
        return self.shape[0]

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def __repr__(self) -> str:
        return f"Jet3(value={self.value!r}, shape={self.shape})"

    # ----- arithmetic -----
    @staticmethod
    def _lift(other) -> "Jet3":
        if isinstance(other, Jet3):
            return other
        return Jet3.constant(other)

    @staticmethod
    def _expand(c: np.ndarray, ndim: int) -> np.ndarray:
        # pad the trailing shape on the left, numpy style, keeping axis 0 first
        extra = ndim - (c.ndim - 1)
        return c.reshape(c.shape[:1] + (1,) * extra + c.shape[1:])

    @classmethod
    def _broadcast(cls, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        a, b = cls._expand(a, len(shape)), cls._expand(b, len(shape))
        return np.broadcast_to(a, (SIZE,) + shape), np.broadcast_to(b, (SIZE,) + shape)

    def __add__(self, other) -> "Jet3":
        o = self._lift(other)
        a, b = self._broadcast(self.coeffs, o.coeffs)
        return Jet3(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet3":
        o = self._lift(other)
        a, b = self._broadcast(self.coeffs, o.coeffs)
        return Jet3(a - b)

    def __rsub__(self, other) -> "Jet3":
        return self._lift(other) - self

    def __neg__(self) -> "Jet3":
        return Jet3(-self.coeffs)

    def _scaled(self, factor) -> np.ndarray:
        factor = np.asarray(factor, dtype=float)
        shape = np.broadcast_shapes(self.shape, factor.shape)
        return np.broadcast_to(self._expand(self.coeffs, len(shape)), (SIZE,) + shape) * factor

    def __mul__(self, other) -> "Jet3":
        if not isinstance(other, Jet3):
            # plain number or array: scales every coefficient
            return Jet3(self._scaled(other))
        a, b = self._broadcast(self.coeffs, other.coeffs)
        return Jet3(np.einsum("kij,i...,j...->k...", _LEIBNIZ, a, b))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet3":
        if not isinstance(other, Jet3):
            other = np.asarray(other, dtype=float)
            if np.any(np.abs(other) <= conf.get("DIV_EPS")):
                raise DivisionByZeroValue("division by a zero constant")
            return Jet3(self._scaled(1.0 / other))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet3":
        return self._lift(other) * self.reciprocal()

    def __pow__(self, exponent) -> "Jet3":
        return self.power(float(exponent))

    # ----- univariate composition -----
    def compose(self, derivs: Sequence[Number]) -> "Jet3":
        """
        Jet of f(self) from f, f', f'', f''' evaluated at ``self.value``.
        The increment ``self - value`` has zero value, so its fourth power
        only carries orders > 3 and the cubic expansion is exact on the jet.
        """
        f0, f1, f2, f3 = (np.asarray(d, dtype=float) for d in derivs)
        c = np.array(self.coeffs)
        c[0] = 0.0
        d1 = Jet3(c)
        d2 = d1 * d1
        d3 = d2 * d1
        out = d1 * f1 + d2 * (f2 / 2.0) + d3 * (f3 / 6.0)
        res = np.array(out.coeffs)
        res[0] = res[0] + f0
        return Jet3(res)

    def reciprocal(self) -> "Jet3":
        x = self.value
        if np.any(np.abs(x) <= conf.get("DIV_EPS")):
            raise DivisionByZeroValue("division by a jet with zero value")
        return self.compose((1.0 / x, -1.0 / x**2, 2.0 / x**3, -6.0 / x**4))

    def sin(self) -> "Jet3":
        x = self.value
        s, c = np.sin(x), np.cos(x)
        return self.compose((s, c, -s, -c))

    def cos(self) -> "Jet3":
        x = self.value
        s, c = np.sin(x), np.cos(x)
        return self.compose((c, -s, -c, s))

    def exp(self) -> "Jet3":
        e = np.exp(self.value)
        return self.compose((e, e, e, e))

    def log(self) -> "Jet3":
        x = self.value
        if np.any(x <= 0.0):
            raise DomainError("log of a non-positive value")
        return self.compose((np.log(x), 1.0 / x, -1.0 / x**2, 2.0 / x**3))

    def sqrt(self) -> "Jet3":
        x = self.value
        if np.any(x < 0.0):
            raise DomainError("sqrt of a negative value")
        if np.any(x == 0.0):
            # sqrt is not differentiable at 0
            raise DomainError("sqrt at zero has no finite derivatives")
        r = np.sqrt(x)
        return self.compose((r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)))

    def power(self, exponent: float) -> "Jet3":
        x = self.value
        n = float(exponent)
        is_int = n.is_integer()
        if not is_int and np.any(x <= 0.0):
            raise DomainError(f"non-integer power {n:g} of a non-positive value")
        if is_int and n < 0 and np.any(x == 0.0):
            raise DivisionByZeroValue(f"negative power {n:g} of zero")
        derivs = []
        falling = 1.0
        for k in range(ORDER + 1):
            if falling == 0.0:
                derivs.append(np.zeros_like(x))
            else:
                derivs.append(falling * np.power(x, n - k))
            falling *= n - k
        return self.compose(derivs)

    # ----- differentiation -----
    def d_u(self) -> "Jet3":
        """d/du; the order-3 slots of the result are unknown and set to zero."""
        return self._shift(_SHIFT_U)

    def d_v(self) -> "Jet3":
        return self._shift(_SHIFT_V)

    def _shift(self, table) -> "Jet3":
        c = np.zeros_like(self.coeffs)
        for target, source in table:
            c[target] = self.coeffs[source]
        return Jet3(c)

    # ----- vector helpers -----
    def sum(self) -> "Jet3":
        """Sum over the last trailing axis."""
        return Jet3(self.coeffs.sum(axis=-1))

    def dot(self, other: "Jet3") -> "Jet3":
        return (self * other).sum()

    def norm(self) -> "Jet3":
        return self.dot(self).sqrt()

    def is_close(self, other: "Jet3", atol: float = 1e-12) -> bool:
        a, b = self._broadcast(self.coeffs, self._lift(other).coeffs)
        return bool(np.allclose(a, b, atol=atol, rtol=0.0))


# =========================
# Operation-style entry points
# =========================
def jet_variable(which: Literal["u", "v"], value: Number) -> Jet3:
    return Jet3.variable(which, value)


def jet_constant(value: Number) -> Jet3:
    return Jet3.constant(value)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def jet_arith(op: str, a: Jet3, b: Optional[Jet3] = None) -> Jet3:
    if op == "neg":
        return -a
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown jet operation {op!r}") from None
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    return fn(a, b)


def jet_elem(f: str, a: Jet3, exponent: Optional[float] = None) -> Jet3:
    if f == "pow_const":
        if exponent is None:
            raise ValueError("pow_const needs an exponent")
        return a.power(exponent)
    if f not in ("sin", "cos", "exp", "log", "sqrt"):
        raise ValueError(f"unknown elementary function {f!r}")
    return getattr(a, f)()


def stack(jets: Iterable[Jet3]) -> Jet3:
    return Jet3.stack(list(jets))
