# surfaces/frames.py
"""
Point geometry from the chart 3-jet: orthonormal tangent frame, oriented
normal basis, second fundamental form (b1, b2, b3 / H, B, C), point
classification, and the third-order ingredients (q, r, D_{t_i} b_j) used by
the covariant derivative of α.

The tangent frame is itself a jet-valued field:

    t1 = X_u / |X_u|
    t2 = (X_v - (X_v·t1) t1) / |X_v - (X_v·t1) t1|

and D_{t_i} f = a_i1 f_u + a_i2 f_v with t1 = a11 X_u, t2 = a21 X_u + a22 X_v.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import conf
from .exceptions import SingularPointError
from .jets import Jet3
from .surface_dsl import SurfaceChart
from .utils import binary_forms as bf

logger = logging.getLogger(__name__)

TAGS = ("generic", "semiumbilic", "inflection", "umbilic", "flat")


# =========================
# Data
# =========================
@dataclass(frozen=True, eq=False)
class PointGeometry:
    u: float
    v: float
    m: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    normal_basis: np.ndarray  # (n-2, n), rows ν_1..ν_{n-2}
    normal_seed: tuple[int, ...]  # ambient axes the normal basis was grown from
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    q: float
    r: float
    Db: dict  # keys "11","21","12","22","13","23" → D_{t_i} b_j
    pullback: np.ndarray  # [[a11, 0], [a21, a22]]: t_i = a_i1 X_u + a_i2 X_v

    @property
    def ambient_dim(self) -> int:
        return self.m.shape[0]

    @property
    def H(self) -> np.ndarray:
        return (self.b1 + self.b2) / 2.0

    @property
    def B(self) -> np.ndarray:
        return (self.b1 - self.b2) / 2.0

    @property
    def C(self) -> np.ndarray:
        return self.b3

    def tangent(self, theta: float) -> np.ndarray:
        return math.cos(theta) * self.t1 + math.sin(theta) * self.t2

    def parameter_direction(self, theta: float) -> np.ndarray:
        """(du, dv) of the tangent vector t(θ)."""
        c, s = math.cos(theta), math.sin(theta)
        return c * self.pullback[0] + s * self.pullback[1]

    def to_normal(self, w: np.ndarray) -> np.ndarray:
        """Coordinates of an ambient vector (or vector form) in the normal basis."""
        return np.asarray(w) @ self.normal_basis.T

    def project_normal(self, w: np.ndarray) -> np.ndarray:
        return self.to_normal(w) @ self.normal_basis

    def J_N(self, w: np.ndarray) -> np.ndarray:
        """Quarter turn of the oriented normal plane (R^4): ν1 → ν2, ν2 → -ν1."""
        if self.ambient_dim != 4:
            raise ValueError("J_N is only defined for surfaces in R^4")
        x1, x2 = self.to_normal(w).T
        return np.multiply.outer(x1, self.normal_basis[1]) - np.multiply.outer(x2, self.normal_basis[0])

    # ----- binary forms in (cos θ, sin θ) -----
    @cached_property
    def eta_form(self) -> np.ndarray:
        """η(θ) = H + B cos2θ + C sin2θ = (H+B)c² + 2C cs + (H-B)s²."""
        return np.stack([self.H + self.B, 2.0 * self.C, self.H - self.B])

    @cached_property
    def jv_form(self) -> np.ndarray:
        """α(Jv, v) = -B sin2θ + C cos2θ = ½ dη/dθ."""
        return np.stack([self.C, -2.0 * self.B, -self.C])

    @cached_property
    def nabla_form(self) -> np.ndarray:
        """(∇_x α)(x, x) as a normal-valued cubic form."""
        Db, q, r, B, C = self.Db, self.q, self.r, self.B, self.C
        raw = np.stack([
            Db["11"] - 2 * q * C,
            Db["21"] + 2 * Db["13"] + 4 * q * B - 2 * r * C,
            Db["12"] + 2 * Db["23"] + 4 * r * B + 2 * q * C,
            Db["22"] + 2 * r * C,
        ])
        return self.project_normal(raw)

    @cached_property
    def alpha_x_t1_form(self) -> np.ndarray:
        return np.stack([self.b1, self.b3])

    @cached_property
    def alpha_x_t2_form(self) -> np.ndarray:
        return np.stack([self.b3, self.b2])

    @cached_property
    def alpha_scale(self) -> float:
        return float(np.linalg.norm(self.H) + np.linalg.norm(self.B) + np.linalg.norm(self.C))

    @cached_property
    def nabla_scale(self) -> float:
        return float(np.max(np.linalg.norm(self.nabla_form, axis=-1)))


@dataclass(frozen=True, eq=False)
class PointClass:
    tag: str
    aligned_frame_angle: float
    B_aligned: np.ndarray
    C_aligned: np.ndarray


# =========================
# Construction
# =========================
def _perp(w: Jet3, t1: Jet3, t2: Jet3) -> Jet3:
    return w - w.dot(t1) * t1 - w.dot(t2) * t2


def _seed_normal_basis(t1: np.ndarray, t2: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """
    Grow ν_1..ν_{n-2} from ambient axes: at every step take the axis whose
    residual (after removing the tangent plane and the normals found so far)
    is largest, lowest index on ties; then orient positively.
    """
    n = t1.shape[0]
    frame = [t1, t2]
    normals: list[np.ndarray] = []
    seeds: list[int] = []
    axes = np.eye(n)
    for _ in range(n - 2):
        basis = np.array(frame + normals)
        residuals = axes - (axes @ basis.T) @ basis
        norms = np.linalg.norm(residuals, axis=1)
        norms[seeds] = -1.0
        best = float(norms.max())
        k = int(np.flatnonzero(norms >= best - 1e-12)[0])
        normals.append(residuals[k] / norms[k])
        seeds.append(k)
    nb = np.array(normals)
    if np.linalg.det(np.vstack([t1, t2, nb])) < 0:
        nb[-1] = -nb[-1]
    return nb, tuple(seeds)


def build_point_geometry(chart: SurfaceChart, u0: float, v0: float) -> PointGeometry:
    X = chart.jet(u0, v0)
    Xu, Xv = X.d_u(), X.d_v()

    E = float(Xu.value @ Xu.value)
    F = float(Xu.value @ Xv.value)
    G = float(Xv.value @ Xv.value)
    gram = E * G - F * F
    if not gram > conf.get("REG_EPS") * (E + G) ** 2:
        logger.debug("singular chart point (%g, %g): EG-F^2=%g", u0, v0, gram)
        raise SingularPointError(f"chart is singular at (u, v) = ({u0:g}, {v0:g})")

    sqrtE = Xu.dot(Xu).sqrt()
    t1 = Xu / sqrtE
    w = Xv - Xv.dot(t1) * t1
    wn = w.norm()
    t2 = w / wn

    a11 = sqrtE.reciprocal()
    a22 = wn.reciprocal()
    a21 = -(Xv.dot(t1)) * a11 * a22

    def D1(f: Jet3) -> Jet3:
        return a11 * f.d_u()

    def D2(f: Jet3) -> Jet3:
        return a21 * f.d_u() + a22 * f.d_v()

    D1t1, D2t1, D1t2, D2t2 = D1(t1), D2(t1), D1(t2), D2(t2)
    b1 = _perp(D1t1, t1, t2)
    b2 = _perp(D2t2, t1, t2)
    b3 = _perp(D1t2, t1, t2)

    Db = {}
    for j, b in (("1", b1), ("2", b2), ("3", b3)):
        Db["1" + j] = np.array(D1(b).value)
        Db["2" + j] = np.array(D2(b).value)

    t1v, t2v = np.array(t1.value), np.array(t2.value)
    normal_basis, seeds = _seed_normal_basis(t1v, t2v)

    return PointGeometry(
        u=float(u0),
        v=float(v0),
        m=np.array(X.value),
        t1=t1v,
        t2=t2v,
        normal_basis=normal_basis,
        normal_seed=seeds,
        b1=np.array(b1.value),
        b2=np.array(b2.value),
        b3=np.array(b3.value),
        q=float(t2v @ D1t1.value),
        r=float(t2v @ D2t1.value),
        Db=Db,
        pullback=np.array([[float(a11.value), 0.0], [float(a21.value), float(a22.value)]]),
    )


# =========================
# Classification
# =========================
def aligned_frame(pg: PointGeometry) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Rotation angle φ ∈ [0, π/2) of the tangent frame after which B'·C' = 0 and
    |B'| ≥ |C'|, with the rotated (B', C').
    """
    B, C = pg.B, pg.C
    phi = 0.25 * math.atan2(2.0 * float(B @ C), float(B @ B - C @ C))
    phi = phi % (math.pi / 2)
    c2, s2 = math.cos(2 * phi), math.sin(2 * phi)
    return phi, B * c2 + C * s2, -B * s2 + C * c2


def ellipse_axes(pg: PointGeometry) -> tuple[float, float]:
    _, Bp, Cp = aligned_frame(pg)
    return float(np.linalg.norm(Bp)), float(np.linalg.norm(Cp))


def _area(x: np.ndarray, y: np.ndarray) -> float:
    g = float(x @ x) * float(y @ y) - float(x @ y) ** 2
    return math.sqrt(max(g, 0.0))


def classify_point(pg: PointGeometry, tol: Optional[float] = None) -> PointClass:
    tol = conf.get("CLASSIFY_TOL") if tol is None else tol
    phi, Bp, Cp = aligned_frame(pg)
    scale = pg.alpha_scale
    if scale <= tol:
        return PointClass("flat", phi, Bp, Cp)
    eps = tol * scale
    nB, nC = float(np.linalg.norm(Bp)), float(np.linalg.norm(Cp))
    if nB <= eps:
        tag = "umbilic"
    elif nC <= eps:
        # segment; inflection when its line passes through the origin
        tag = "inflection" if _area(pg.H, Bp) <= eps * scale else "semiumbilic"
    else:
        tag = "generic"
    return PointClass(tag, phi, Bp, Cp)


# =========================
# Evaluation
# =========================
def eta(pg: PointGeometry, theta: float) -> np.ndarray:
    return pg.H + pg.B * math.cos(2 * theta) + pg.C * math.sin(2 * theta)


def alpha_pair(pg: PointGeometry, x, y) -> np.ndarray:
    x1, x2 = float(x[0]), float(x[1])
    y1, y2 = float(y[0]), float(y[1])
    return x1 * y1 * pg.b1 + x2 * y2 * pg.b2 + (x1 * y2 + x2 * y1) * pg.b3


def alpha_jv(pg: PointGeometry, theta: float) -> np.ndarray:
    return -pg.B * math.sin(2 * theta) + pg.C * math.cos(2 * theta)


def nabla_alpha(pg: PointGeometry, theta: float) -> np.ndarray:
    return bf.evaluate(pg.nabla_form, theta)
