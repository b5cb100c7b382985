# surfaces/directions.py
"""
Direction equations at a point.

Every equation is a binary form in (cos θ, sin θ) built from the point's
H, B, C and ∇α forms (see ``PointGeometry``); its real roots in [0, π) come
from ``utils.binary_forms.real_roots``. Extremal sets keep the roots of odd
multiplicity of the derivative form (sign changes); zero sets keep every
root.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import conf
from .deviation import deviation_report
from .exceptions import DimensionError, TorsionUndefined
from .frames import PointGeometry, alpha_jv, alpha_pair, classify_point, eta, nabla_alpha
from .utils import binary_forms as bf

logger = logging.getLogger(__name__)

DIRECTION_TAGS = (
    "extremal_frontal",
    "extremal_lateral",
    "principal",
    "asymptotic",
    "strong_principal",
    "asymptotic_r5",
)


# =========================
# Results
# =========================
@dataclass(frozen=True)
class DirectionSet:
    kind: str
    angles: tuple[float, ...] = ()
    tags: tuple[str, ...] = ()
    residuals: tuple[float, ...] = ()
    multiplicities: tuple[int, ...] = ()
    identically_zero: bool = False

    def __len__(self) -> int:
        return len(self.angles)

    def __iter__(self) -> Iterator[float]:
        return iter(self.angles)

    @property
    def count(self) -> Optional[int]:
        """Number of directions; None when every direction qualifies."""
        return None if self.identically_zero else len(self.angles)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "angles": list(self.angles),
            "tags": list(self.tags),
            "residuals": list(self.residuals),
            "multiplicities": list(self.multiplicities),
            "identically_zero": self.identically_zero,
        }


def _direction_set(kind: str, roots: bf.RootSet, tag: Optional[str] = None) -> DirectionSet:
    tag = tag or kind
    return DirectionSet(
        kind=kind,
        angles=roots.angles,
        tags=(tag,) * len(roots.angles),
        residuals=roots.residuals,
        multiplicities=roots.multiplicities,
        identically_zero=roots.identically_zero,
    )


def _solve(form, threshold: float, tol: Optional[float]) -> bf.RootSet:
    return bf.real_roots(
        form,
        zero_threshold=threshold,
        root_tol=conf.get("ROOT_TOL") if tol is None else tol,
        merge_tol=conf.get("MERGE_TOL"),
    )


def _threshold(pg: PointGeometry, alpha_power: int, with_nabla: bool = False) -> float:
    s = pg.alpha_scale
    magnitude = s**alpha_power
    if with_nabla:
        magnitude *= max(s * s, pg.nabla_scale)
    return conf.get("ZERO_FORM_TOL") * magnitude


def _require_dim(pg: PointGeometry, n: int, what: str) -> None:
    if pg.ambient_dim != n:
        raise DimensionError(f"{what} needs a surface in R^{n}, got R^{pg.ambient_dim}")


# =========================
# Extremal frontal / lateral
# =========================
def frontal_quartic(pg: PointGeometry) -> np.ndarray:
    """η(θ)·α(Jv, v) = ¼ d|η|²/dθ as a binary quartic."""
    return bf.dot(pg.eta_form, pg.jv_form)


def printed_frontal_quartic(pg: PointGeometry) -> np.ndarray:
    """The same quartic written out from the inner products hb, hc, bb, cc, bc."""
    H, B, C = pg.H, pg.B, pg.C
    hb, hc = float(H @ B), float(H @ C)
    bb, cc, bc = float(B @ B), float(C @ C), float(B @ C)
    return np.array([
        hc + bc,
        -2 * hb - 2 * bb + 2 * cc,
        -6 * bc,
        -2 * cc - 2 * hb + 2 * bb,
        -hc + bc,
    ])


def lateral_form(pg: PointGeometry) -> np.ndarray:
    """lateral(θ) = -(1/6) α(Jv, v)·η(θ)."""
    return -bf.dot(pg.jv_form, pg.eta_form) / 6.0


def extremal_frontal_directions(pg: PointGeometry, tol: Optional[float] = None) -> DirectionSet:
    roots = _solve(frontal_quartic(pg), _threshold(pg, 2), tol).odd()
    return _direction_set("extremal_frontal", roots)


def extremal_lateral_directions(pg: PointGeometry, tol: Optional[float] = None) -> DirectionSet:
    form = bf.derivative(lateral_form(pg))
    roots = _solve(form, _threshold(pg, 2), tol).odd()
    return _direction_set("extremal_lateral", roots)


# =========================
# R^3: principal / asymptotic
# =========================
@dataclass(frozen=True)
class SpecialDirections:
    principal: DirectionSet
    asymptotic: DirectionSet

    def merged(self) -> list[tuple[float, str]]:
        out = [(t, "principal") for t in self.principal.angles]
        out += [(t, "asymptotic") for t in self.asymptotic.angles]
        return sorted(out)


def r3_special_directions(pg: PointGeometry, tol: Optional[float] = None) -> SpecialDirections:
    _require_dim(pg, 3, "principal/asymptotic splitting")
    nu = pg.normal_basis[0]
    threshold = _threshold(pg, 1)
    principal = _solve(pg.jv_form @ nu, threshold, tol)
    asymptotic = _solve(pg.eta_form @ nu, threshold, tol)
    return SpecialDirections(
        principal=_direction_set("principal", principal),
        asymptotic=_direction_set("asymptotic", asymptotic),
    )


def lateral_extremal_curvatures_r3(k1: float, k2: float) -> tuple[float, ...]:
    """
    Normal curvatures of the extremal lateral directions of a point with
    principal curvatures k1, k2 (radical form). Not every value needs to be
    realized by a real direction.
    """
    disc = 9.0 * (k2 * k2 + k1 * k1) - 14.0 * k1 * k2
    if disc < 0:
        return ()
    root = math.sqrt(disc)
    out = []
    for sign in (1.0, -1.0):
        den = 3.0 * k1 - 5.0 * k2 + sign * root
        if den == 0.0:
            continue
        out.append((k2 * k1 - 3.0 * k2 * k2 + sign * k2 * root) / den)
    return tuple(sorted(out))


# =========================
# d_{3,u} / f_{3,u}
# =========================
def d3_contact_value(pg: PointGeometry, u: np.ndarray, theta: float, mode: str = "distance") -> float:
    """
    Cubic part of the squared-distance function from u (``mode="distance"``)
    or of the height function along u (``mode="height"``) at x = t(θ).
    """
    u = np.asarray(u, dtype=float)
    x2 = (math.cos(theta), math.sin(theta))
    x = pg.tangent(theta)
    e = eta(pg, theta)
    nab = nabla_alpha(pg, theta)
    u_top = (float(u @ pg.t1), float(u @ pg.t2))
    u_perp = u - u_top[0] * pg.t1 - u_top[1] * pg.t2
    cubic = float(alpha_pair(pg, u_top, x2) @ e)
    if mode == "distance":
        return -2.0 * float(u @ x) + float(x @ x) - float(u @ e) + cubic / 3.0 - float(u_perp @ nab) / 3.0
    if mode == "height":
        return float(u @ x) + 0.5 * float(u @ e) - cubic / 6.0 + float(u_perp @ nab) / 6.0
    raise ValueError(f"unknown contact mode {mode!r}")


# =========================
# R^4: strong principal directions and ribs
# =========================
@dataclass(frozen=True, eq=False)
class RibResult:
    theta: float
    u: Optional[np.ndarray]
    degenerate_case: str  # generic | c_zero | none
    verification: dict = field(default_factory=dict)
    rejected: bool = False
    reason: str = ""

    @property
    def tag(self) -> str:
        return "rejected" if self.rejected else "strong_principal"

    def as_dict(self) -> dict:
        return {
            "theta": self.theta,
            "u": None if self.u is None else list(self.u),
            "degenerate_case": self.degenerate_case,
            "verification": dict(sorted(self.verification.items())),
            "tag": self.tag,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class StrongPrincipalSet:
    directions: DirectionSet
    ribs: tuple[RibResult, ...] = ()

    @property
    def identically_zero(self) -> bool:
        return self.directions.identically_zero

    @property
    def accepted(self) -> tuple[RibResult, ...]:
        return tuple(r for r in self.ribs if not r.rejected)

    def __iter__(self) -> Iterator[RibResult]:
        return iter(self.ribs)

    def __len__(self) -> int:
        return len(self.ribs)


def strong_principal_quintic(pg: PointGeometry) -> np.ndarray:
    """det[α(x, Jx), (∇_xα)(x, x)] in the oriented normal plane; degree 5."""
    _require_dim(pg, 4, "strong principal directions")
    return bf.det2(pg.to_normal(pg.jv_form), pg.to_normal(pg.nabla_form))


def rib_verification(pg: PointGeometry, u: np.ndarray, theta: float) -> dict:
    b = eta(pg, theta)
    return {
        "tangential": float(math.hypot(u @ pg.t1, u @ pg.t2)),
        "hessian": abs(1.0 - float(u @ b)),
        "jx": abs(float(u @ alpha_jv(pg, theta))),
        "d3": abs(d3_contact_value(pg, u, theta)),
    }


def rib_for_direction(pg: PointGeometry, theta: float, tol: Optional[float] = None) -> RibResult:
    _require_dim(pg, 4, "rib centers")
    tol = conf.get("VERIFY_TOL") if tol is None else tol
    b = eta(pg, theta)
    c = nabla_alpha(pg, theta)
    a = alpha_jv(pg, theta)
    bb = float(b @ b)
    nb, nc = math.sqrt(bb), float(np.linalg.norm(c))

    if nb <= conf.get("CLASSIFY_TOL") * max(pg.alpha_scale, 1e-300):
        return RibResult(theta, None, "none", rejected=True, reason="condition 1 violated: α(x,x)=0")

    Jb = pg.J_N(b)
    if nc <= tol * max(pg.nabla_scale, pg.alpha_scale**2, 1e-300):
        case = "c_zero"
        Jba, ba = float(Jb @ a), float(b @ a)
        if abs(ba) <= tol * nb * max(float(np.linalg.norm(a)), 1e-300):
            r = 0.0
        elif abs(Jba) > tol * nb * float(np.linalg.norm(a)):
            r = -ba / (bb * Jba)
        else:
            return RibResult(
                theta, None, case, rejected=True,
                reason="condition 2 violated: α(x,Jx) parallel to α(x,x)",
            )
        u = b / bb + r * Jb
    else:
        case = "generic"
        Jbc = float(Jb @ c)
        if abs(Jbc) <= tol * nb * nc:
            return RibResult(
                theta, None, case, rejected=True,
                reason="condition 3 violated: (∇_xα)(x,x) parallel to α(x,x)",
            )
        u = b / bb - float(b @ c) / (bb * Jbc) * Jb

    checks = rib_verification(pg, u, theta)
    limit = tol * max(1.0, float(np.linalg.norm(u)) * (pg.alpha_scale + pg.nabla_scale))
    failed = [k for k, val in checks.items() if not val <= limit]
    if failed:
        logger.debug("rib at θ=%.12g failed %s", theta, failed)
        return RibResult(theta, u, case, checks, rejected=True, reason="verification failed: " + ", ".join(failed))
    return RibResult(theta, u, case, checks)


def rib_center_from_torsion(pg: PointGeometry, theta: float) -> np.ndarray:
    """u = b/κ² − κ′/(κ³τ)·Jb with b = α(x,x); needs τ ≠ 0."""
    rep = deviation_report(pg, theta, require_tau=True)
    if rep.tau == 0.0:
        raise TorsionUndefined(f"normal torsion vanishes at θ={theta:.12g}")
    b = eta(pg, theta)
    k = rep.kappa
    return b / k**2 - rep.kappa_prime / (k**3 * rep.tau) * pg.J_N(b)


def strong_principal_directions(pg: PointGeometry, tol: Optional[float] = None) -> StrongPrincipalSet:
    form = strong_principal_quintic(pg)
    roots = _solve(form, _threshold(pg, 1, with_nabla=True), tol)
    if roots.identically_zero:
        return StrongPrincipalSet(_direction_set("strong_principal", roots))
    ribs = tuple(rib_for_direction(pg, theta) for theta in roots.angles)
    directions = DirectionSet(
        kind="strong_principal",
        angles=roots.angles,
        tags=tuple(r.tag for r in ribs),
        residuals=roots.residuals,
        multiplicities=roots.multiplicities,
    )
    return StrongPrincipalSet(directions, ribs)


# ---------- umbilic focus ----------
@dataclass(frozen=True, eq=False)
class FocusResult:
    kind: str  # focus | affine_line | none
    u: Optional[np.ndarray] = None
    direction: Optional[np.ndarray] = None  # affine_line only
    reason: str = ""
    residuals: tuple[float, ...] = ()

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "u": None if self.u is None else list(self.u),
            "direction": None if self.direction is None else list(self.direction),
            "reason": self.reason,
            "residuals": list(self.residuals),
        }


def umbilic_focus(pg: PointGeometry, tol: Optional[float] = None) -> FocusResult:
    _require_dim(pg, 4, "umbilic focus")
    cls = classify_point(pg, tol)
    H = pg.H
    if cls.tag == "umbilic":
        # every u on the line u·H = 1 of the normal plane
        u = H / float(H @ H)
        return FocusResult("affine_line", u=u, direction=pg.J_N(H), reason="umbilic: affine line u·b=1")
    if cls.tag != "semiumbilic":
        reason = {"generic": "not semiumbilic"}.get(cls.tag, cls.tag)
        return FocusResult("none", reason=reason)

    JB = pg.J_N(cls.B_aligned)
    u = JB / float(H @ JB)
    residuals = (1.0 - float(u @ pg.b1), 1.0 - float(u @ pg.b2), -float(u @ pg.b3))
    return FocusResult("focus", u=u, residuals=residuals)


# =========================
# R^5: asymptotic directions
# =========================
def asymptotic_r5_quintic(pg: PointGeometry) -> np.ndarray:
    """det[α(x,t1), α(x,t2), (∇_xα)(x,x)] in the oriented normal space; degree 5."""
    _require_dim(pg, 5, "asymptotic directions")
    P = pg.to_normal(pg.alpha_x_t1_form)
    Q = pg.to_normal(pg.alpha_x_t2_form)
    R = pg.to_normal(pg.nabla_form)
    return bf.det3(P, Q, R)


def asymptotic_r5_matrix(pg: PointGeometry, theta: float) -> np.ndarray:
    """Columns α(x,t1), α(x,t2), (∇_xα)(x,x) in normal coordinates."""
    P = bf.evaluate(pg.to_normal(pg.alpha_x_t1_form), theta)
    Q = bf.evaluate(pg.to_normal(pg.alpha_x_t2_form), theta)
    R = bf.evaluate(pg.to_normal(pg.nabla_form), theta)
    return np.column_stack([P, Q, R])


def rank_ratio(matrix: np.ndarray) -> float:
    sv = np.linalg.svd(matrix, compute_uv=False)
    return 0.0 if sv[0] == 0.0 else float(sv[-1] / sv[0])


def asymptotic_directions_r5(pg: PointGeometry, tol: Optional[float] = None) -> DirectionSet:
    form = asymptotic_r5_quintic(pg)
    roots = _solve(form, _threshold(pg, 2, with_nabla=True), tol)
    if roots.identically_zero:
        return _direction_set("asymptotic_r5", roots)
    limit = conf.get("VERIFY_TOL")
    keep = []
    for i, theta in enumerate(roots.angles):
        ratio = rank_ratio(asymptotic_r5_matrix(pg, theta))
        if ratio < limit:
            keep.append(i)
        else:
            logger.debug("asymptotic root θ=%.12g fails rank check (%.3g)", theta, ratio)
    return DirectionSet(
        kind="asymptotic_r5",
        angles=tuple(roots.angles[i] for i in keep),
        tags=("asymptotic_r5",) * len(keep),
        residuals=tuple(roots.residuals[i] for i in keep),
        multiplicities=tuple(roots.multiplicities[i] for i in keep),
    )


# =========================
# Dispatch by field kind
# =========================
FIELD_KINDS = {
    "extremal-frontal": (None, extremal_frontal_directions),
    "extremal-lateral": (None, extremal_lateral_directions),
    "principal": (3, lambda pg, tol=None: r3_special_directions(pg, tol).principal),
    "asymptotic": (3, lambda pg, tol=None: r3_special_directions(pg, tol).asymptotic),
    "strong-principal": (4, lambda pg, tol=None: strong_principal_directions(pg, tol).directions),
    "asymptotic-r5": (5, asymptotic_directions_r5),
}


def check_field_kind(kind: str, ambient_dim: int) -> None:
    try:
        need, _ = FIELD_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown field kind {kind!r}; choose from {sorted(FIELD_KINDS)}") from None
    if need is not None and need != ambient_dim:
        raise DimensionError(f"field kind {kind!r} needs a surface in R^{need}, got R^{ambient_dim}")


def directions_for(kind: str, pg: PointGeometry, tol: Optional[float] = None) -> DirectionSet:
    check_field_kind(kind, pg.ambient_dim)
    return FIELD_KINDS[kind][1](pg, tol)


def defining_form(kind: str, pg: PointGeometry) -> np.ndarray:
    """Scalar form whose roots the field follows (before the odd-multiplicity filter)."""
    check_field_kind(kind, pg.ambient_dim)
    if kind == "extremal-frontal":
        return frontal_quartic(pg)
    if kind == "extremal-lateral":
        return bf.derivative(lateral_form(pg))
    if kind == "principal":
        return pg.jv_form @ pg.normal_basis[0]
    if kind == "asymptotic":
        return pg.eta_form @ pg.normal_basis[0]
    if kind == "strong-principal":
        return strong_principal_quintic(pg)
    return asymptotic_r5_quintic(pg)
