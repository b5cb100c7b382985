# surfaces/deviation.py
"""
Third-order behaviour of the geodesic γ_v through m with unit velocity
v = t(θ):

    γ_v(t) = m + v t + ½ α(v,v) t² + (1/6)[(∇_vα)(v,v) − α♯(v)·α(v,v)] t³ + O(t⁴)

and the scalars read off it: frontal and lateral deviation, normal curvature
and its derivative, the torsion of the normal section (R^4) and the
curvature / torsion of the curve projected onto span(v, α(v,v), Jv).

Every value is a closed form in (H, B, C, ∇α); nothing here differentiates
numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import conf
from .exceptions import DimensionError, TorsionUndefined
from .frames import PointGeometry, alpha_jv, alpha_pair, eta, nabla_alpha


@dataclass(frozen=True, eq=False)
class GeodesicTaylor:
    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray

    def at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)[..., None]
        return self.c0 + self.c1 * t + self.c2 * t**2 + self.c3 * t**3


@dataclass(frozen=True)
class DeviationReport:
    frontal: float
    lateral: float
    kappa: float
    kappa_prime: float
    proj_curvature: float
    proj_torsion: Optional[float]
    tau: Optional[float] = None
    degenerate: bool = False  # kappa below KAPPA_EPS: kappa_prime forced to 0, proj_torsion undefined

    def as_dict(self) -> dict:
        return {
            "frontal": self.frontal,
            "lateral": self.lateral,
            "kappa": self.kappa,
            "kappa_prime": self.kappa_prime,
            "proj_curvature": self.proj_curvature,
            "proj_torsion": self.proj_torsion,
            "tau": self.tau,
            "degenerate": self.degenerate,
        }


def _alpha_sharp(pg: PointGeometry, theta: float, w: np.ndarray) -> np.ndarray:
    # α♯(v)·w = (α(t1, v)·w) t1 + (α(t2, v)·w) t2
    v = (math.cos(theta), math.sin(theta))
    a1 = alpha_pair(pg, (1.0, 0.0), v)
    a2 = alpha_pair(pg, (0.0, 1.0), v)
    return float(a1 @ w) * pg.t1 + float(a2 @ w) * pg.t2


def geodesic_taylor(pg: PointGeometry, theta: float) -> GeodesicTaylor:
    e = eta(pg, theta)
    return GeodesicTaylor(
        c0=pg.m.copy(),
        c1=pg.tangent(theta),
        c2=0.5 * e,
        c3=(nabla_alpha(pg, theta) - _alpha_sharp(pg, theta, e)) / 6.0,
    )


def normal_torsion(pg: PointGeometry, theta: float) -> float:
    """τ_v = J_N α(v,v)·(∇_vα)(v,v) / |α(v,v)|², R^4 only."""
    if pg.ambient_dim != 4:
        raise TorsionUndefined(f"normal torsion needs a surface in R^4, got R^{pg.ambient_dim}")
    e = eta(pg, theta)
    k2 = float(e @ e)
    if math.sqrt(k2) <= conf.get("KAPPA_EPS"):
        raise TorsionUndefined(f"normal curvature vanishes at θ={theta:.12g}")
    return float(pg.J_N(e) @ nabla_alpha(pg, theta)) / k2


def deviation_report(pg: PointGeometry, theta: float, require_tau: bool = False) -> DeviationReport:
    e = eta(pg, theta)
    a = alpha_jv(pg, theta)
    nab = nabla_alpha(pg, theta)
    kappa = float(np.linalg.norm(e))
    eta_jv = float(a @ e)
    degenerate = kappa <= conf.get("KAPPA_EPS")

    tau: Optional[float] = None
    if pg.ambient_dim == 4 and not degenerate:
        tau = normal_torsion(pg, theta)
    elif require_tau:
        # raises with the precise reason
        normal_torsion(pg, theta)

    return DeviationReport(
        frontal=-kappa * kappa / 6.0,
        lateral=-eta_jv / 6.0,
        kappa=kappa,
        kappa_prime=0.0 if degenerate else float(e @ nab) / kappa,
        proj_curvature=kappa,
        proj_torsion=None if degenerate else -eta_jv / kappa,
        tau=tau,
        degenerate=degenerate,
    )


# ---------- scalar helpers ----------
def frontal_deviation(pg: PointGeometry, theta: float) -> float:
    e = eta(pg, theta)
    return -float(e @ e) / 6.0


def lateral_deviation(pg: PointGeometry, theta: float) -> float:
    return -float(alpha_jv(pg, theta) @ eta(pg, theta)) / 6.0


def retard(pg: PointGeometry, theta: float, t: float) -> float:
    """Lag of the geodesic behind the straight line along v after time t: frontal·t³."""
    return frontal_deviation(pg, theta) * t**3


def normal_curvature_r3(pg: PointGeometry, theta: float) -> float:
    """Signed k_n(θ) = η(θ)·ν for a surface in R^3."""
    if pg.ambient_dim != 3:
        raise DimensionError("signed normal curvature is only defined in R^3")
    return float(eta(pg, theta) @ pg.normal_basis[0])
