# surfaces/oracle.py
"""
Brute-force cross-checks for the closed-form geometry: a Christoffel-symbol
geodesic integrator, a dense θ sweep, a normal-section extractor with
discrete Frenet curvature/torsion, and a finite-difference check of the
chart jets. None of them reuse the frame formulas they are meant to check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .deviation import geodesic_taylor
from .exceptions import ContinuationFailure, GeometryError, SingularPointError
from .frames import PointGeometry, build_point_geometry, eta
from .jets import INDICES, Jet3
from .surface_dsl import SurfaceChart

logger = logging.getLogger(__name__)

MIN_GEODESIC_STEPS = 100


# =========================
# Geodesics
# =========================
@dataclass(frozen=True, eq=False)
class GeodesicSolution:
    times: np.ndarray  # (N,)
    params: np.ndarray  # (N, 2) chart parameters (u, v)
    param_velocity: np.ndarray  # (N, 2)
    points: np.ndarray  # (N, n) ambient samples
    velocity: np.ndarray  # (N, n) ambient velocity

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.velocity, axis=1)


def _first_order(chart: SurfaceChart, u: float, v: float) -> tuple[Jet3, Jet3]:
    X = chart.jet(u, v)
    return X.d_u(), X.d_v()


def christoffel(chart: SurfaceChart, u: float, v: float) -> np.ndarray:
    """Γ[k, i, j] of the induced metric, from the chart jet."""
    Xu, Xv = _first_order(chart, u, v)
    E, F, G = Xu.dot(Xu), Xu.dot(Xv), Xv.dot(Xv)
    g = np.array([[E.value, F.value], [F.value, G.value]], dtype=float)
    det = g[0, 0] * g[1, 1] - g[0, 1] ** 2
    if det <= 0.0:
        raise SingularPointError(f"degenerate metric at ({u:g}, {v:g})")
    ginv = np.array([[g[1, 1], -g[0, 1]], [-g[0, 1], g[0, 0]]]) / det
    # dg[a, b, c] = ∂_c g_ab
    dg = np.empty((2, 2, 2))
    for c, idx in enumerate(((1, 0), (0, 1))):
        dg[0, 0, c] = E.partial(*idx)
        dg[0, 1, c] = dg[1, 0, c] = F.partial(*idx)
        dg[1, 1, c] = G.partial(*idx)
    # first kind: Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    first = 0.5 * (
        np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg) - np.einsum("ijl->lij", dg)
    )
    return np.einsum("kl,lij->kij", ginv, first)


def _geodesic_rhs(chart: SurfaceChart, state: np.ndarray) -> np.ndarray:
    p, dp = state[:2], state[2:]
    gamma = christoffel(chart, p[0], p[1])
    acc = -np.einsum("kij,i,j->k", gamma, dp, dp)
    return np.concatenate([dp, acc])


def _ambient(chart: SurfaceChart, p: np.ndarray, dp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = chart.jet(p[0], p[1])
    return np.array(X.value), dp[0] * X.d_u().value + dp[1] * X.d_v().value


def integrate_geodesic(
    chart: SurfaceChart,
    u0: float,
    v0: float,
    theta: float,
    t_max: float,
    steps: int = 200,
    pg: Optional[PointGeometry] = None,
) -> GeodesicSolution:
    """Classical RK4 on the geodesic equation, unit initial speed along t(θ)."""
    if steps < MIN_GEODESIC_STEPS:
        raise GeometryError(f"geodesic integration needs at least {MIN_GEODESIC_STEPS} steps, got {steps}")
    pg = pg or build_point_geometry(chart, u0, v0)
    state = np.concatenate([[u0, v0], pg.parameter_direction(theta)])
    h = t_max / steps
    times = np.linspace(0.0, t_max, steps + 1)
    states = [state]
    for _ in range(steps):
        k1 = _geodesic_rhs(chart, state)
        k2 = _geodesic_rhs(chart, state + 0.5 * h * k1)
        k3 = _geodesic_rhs(chart, state + 0.5 * h * k2)
        k4 = _geodesic_rhs(chart, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states.append(state)
    states = np.array(states)
    amb = [_ambient(chart, s[:2], s[2:]) for s in states]
    return GeodesicSolution(
        times=times,
        params=states[:, :2],
        param_velocity=states[:, 2:],
        points=np.array([a[0] for a in amb]),
        velocity=np.array([a[1] for a in amb]),
    )


def geodesic_point(chart: SurfaceChart, pg: PointGeometry, theta: float, t: float, steps: int = MIN_GEODESIC_STEPS) -> np.ndarray:
    return integrate_geodesic(chart, pg.u, pg.v, theta, t, steps, pg=pg).points[-1]


def taylor_remainder_slope(
    chart: SurfaceChart,
    u0: float,
    v0: float,
    theta: float,
    times=None,
    steps: int = MIN_GEODESIC_STEPS,
) -> float:
    """
    Log-log slope of |γ_v(t) − cubic model(t)| over t; about 4 when the cubic
    model is right. Returns inf when the remainder vanishes to rounding.
    """
    pg = build_point_geometry(chart, u0, v0)
    model = geodesic_taylor(pg, theta)
    times = np.geomspace(1e-3, 1e-1, 5) if times is None else np.asarray(times, dtype=float)
    rem = np.array([np.linalg.norm(geodesic_point(chart, pg, theta, t, steps) - model.at(t)) for t in times])
    scale = 1.0 + float(np.linalg.norm(pg.m))
    if np.all(rem <= 1e-13 * scale):
        return math.inf
    mask = rem > 1e-15 * scale
    if mask.sum() < 2:
        return math.inf
    slope, _ = np.polyfit(np.log(times[mask]), np.log(rem[mask]), 1)
    return float(slope)


def kappa_derivative_along_geodesic(chart: SurfaceChart, u0: float, v0: float, theta: float, h: float = 1e-3) -> float:
    """Central difference of |α(γ′, γ′)| along the integrated geodesic at t = 0."""
    values = []
    for t in (-h, h):
        sol = integrate_geodesic(chart, u0, v0, theta, t)
        p, vel = sol.params[-1], sol.velocity[-1]
        pg = build_point_geometry(chart, p[0], p[1])
        vel = vel / np.linalg.norm(vel)
        phi = math.atan2(float(vel @ pg.t2), float(vel @ pg.t1))
        values.append(float(np.linalg.norm(eta(pg, phi))))
    return (values[1] - values[0]) / (2 * h)


# =========================
# Dense θ sweep
# =========================
@dataclass(frozen=True)
class DenseSearchResult:
    angles: tuple[float, ...]
    constant: bool = False

    def __len__(self) -> int:
        return len(self.angles)

    def __iter__(self):
        return iter(self.angles)


def _sample(f: Callable, thetas: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(thetas), dtype=float)
        if vals.shape == thetas.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(f(t)) for t in thetas])


def _dedupe(angles: list[float], tol: float = 1e-9) -> tuple[float, ...]:
    out: list[float] = []
    for a in sorted(x % math.pi for x in angles):
        if out and abs(a - out[-1]) < tol:
            continue
        out.append(a)
    if len(out) > 1 and math.pi - out[-1] + out[0] < tol:
        out.pop()
    return tuple(out)


def dense_theta_search(f: Callable, mode: str = "zeros", samples: int = 20000) -> DenseSearchResult:
    if samples < 1000:
        raise ValueError("dense_theta_search needs at least 1000 samples")
    h = math.pi / samples
    thetas = np.arange(-1, samples + 2) * h  # one guard sample on each side
    vals = _sample(f, thetas)
    spread = float(vals.max() - vals.min())
    if spread <= 1e-12 * max(1.0, float(np.abs(vals).max())):
        return DenseSearchResult((), constant=True)

    found: list[float] = []
    if mode == "zeros":
        for i in range(1, samples + 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0:
                found.append(float(thetas[i]))
            elif a * b < 0.0:
                found.append(optimize.brentq(f, thetas[i], thetas[i + 1], xtol=1e-14, rtol=1e-15))
    elif mode == "extrema":
        for i in range(1, samples + 1):
            left, mid, right = vals[i - 1], vals[i], vals[i + 1]
            if mid > left and mid >= right:
                sign = -1.0
            elif mid < left and mid <= right:
                sign = 1.0
            else:
                continue
            res = optimize.minimize_scalar(
                lambda t, s=sign: s * float(f(t)),
                bounds=(thetas[i - 1], thetas[i + 1]),
                method="bounded",
                options={"xatol": 1e-12},
            )
            found.append(float(res.x))
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    return DenseSearchResult(_dedupe(found))


# =========================
# Normal sections (R^4)
# =========================
@dataclass(frozen=True, eq=False)
class NormalSection:
    sigma: np.ndarray  # (2K+1,) signed projection onto v, 0 at the seed
    arc_length: np.ndarray  # (2K+1,) signed arc length, 0 at the seed
    params: np.ndarray  # (2K+1, 2)
    points: np.ndarray  # (2K+1, n)
    theta: float

    @property
    def center(self) -> int:
        return self.sigma.shape[0] // 2


def _newton_section(chart, m, v, jv, sigma, guess, tol=1e-14, max_iter=30) -> np.ndarray:
    p = np.array(guess, dtype=float)
    for _ in range(max_iter):
        X = chart.jet(p[0], p[1])
        d = np.array(X.value) - m
        res = np.array([d @ jv, d @ v - sigma])
        if np.max(np.abs(res)) < tol:
            return p
        Xu, Xv = X.d_u().value, X.d_v().value
        jac = np.array([[Xu @ jv, Xv @ jv], [Xu @ v, Xv @ v]])
        try:
            p = p - np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            break
    X = chart.values(p[0], p[1]) - m
    if max(abs(X @ jv), abs(X @ v - sigma)) < 1e-11:
        return p
    raise ContinuationFailure(f"normal-section corrector stalled at σ={sigma:g}")


def normal_section(
    chart: SurfaceChart,
    u0: float,
    v0: float,
    theta: float,
    arc_len: float,
    steps: int,
    pg: Optional[PointGeometry] = None,
) -> NormalSection:
    """
    Curve {X : (X − m)·Jt(θ) = 0} through the seed, sampled at equal steps of
    σ = (X − m)·t(θ) in both directions, by predictor–corrector continuation.
    """
    if chart.ambient_dim != 4:
        raise ValueError("normal sections are extracted for surfaces in R^4")
    pg = pg or build_point_geometry(chart, u0, v0)
    v = pg.tangent(theta)
    jv = pg.tangent(theta + math.pi / 2)
    h = arc_len / steps
    seed = np.array([u0, v0], dtype=float)

    branches = []
    for direction in (1.0, -1.0):
        params = [seed]
        guess = seed + direction * h * pg.parameter_direction(theta)
        for k in range(1, steps + 1):
            p = _newton_section(chart, pg.m, v, jv, direction * k * h, guess)
            params.append(p)
            guess = 2 * p - params[-2]
        branches.append(params)

    params = np.array(branches[1][:0:-1] + branches[0])
    sigma = np.arange(-steps, steps + 1) * h
    points = chart.values(params[:, 0], params[:, 1])
    chords = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(chords)])
    arc -= arc[steps]
    return NormalSection(sigma, arc, params, points, float(theta))


def normal_section_frenet(section: NormalSection, pg: PointGeometry) -> tuple[float, float]:
    """
    Curvature and torsion at the seed from central differences, in the
    coordinates (t(θ), ν1, ν2) of the affine 3-space holding the section.
    """
    frame = np.vstack([pg.tangent(section.theta), pg.normal_basis])
    y = (section.points - pg.m) @ frame.T
    h = float(section.sigma[1] - section.sigma[0])
    c = section.center
    if c < 2:
        raise ValueError("need at least two samples on each side of the seed")
    d1 = (y[c + 1] - y[c - 1]) / (2 * h)
    d2 = (y[c + 1] - 2 * y[c] + y[c - 1]) / h**2
    d3 = (y[c + 2] - 2 * y[c + 1] + 2 * y[c - 1] - y[c - 2]) / (2 * h**3)
    cr = np.cross(d1, d2)
    n1 = float(np.linalg.norm(d1))
    ncr = float(np.linalg.norm(cr))
    curvature = ncr / n1**3
    torsion = float(cr @ d3) / ncr**2 if ncr > 0 else 0.0
    return curvature, torsion


# =========================
# Finite-difference jet check
# =========================
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def _fd_partial(chart: SurfaceChart, u0: float, v0: float, i: int, j: int, h: float) -> np.ndarray:
    total = 0.0
    for a, wa in _STENCILS[i].items():
        for b, wb in _STENCILS[j].items():
            total = total + wa * wb * chart.values(u0 + a * h, v0 + b * h)
    return total / h ** (i + j)


def fd_partials(chart: SurfaceChart, u0: float, v0: float, step: float = 1e-3) -> dict:
    """Central differences with one Richardson step, keyed by (i, j)."""
    out = {}
    for i, j in INDICES:
        coarse = _fd_partial(chart, u0, v0, i, j, step)
        fine = _fd_partial(chart, u0, v0, i, j, step / 2)
        out[(i, j)] = (4.0 * fine - coarse) / 3.0
    return out


def fd_jet_check(chart: SurfaceChart, u0: float, v0: float, step: float = 1e-3) -> dict[int, float]:
    """Worst relative error of the chart jet against finite differences, per order."""
    jet = chart.jet(u0, v0)
    fd = fd_partials(chart, u0, v0, step)
    worst = {1: 0.0, 2: 0.0, 3: 0.0}
    for (i, j), approx in fd.items():
        order = i + j
        if order == 0:
            continue
        exact = np.asarray(jet.partial(i, j))
        err = np.abs(exact - approx) / np.maximum(1.0, np.abs(exact))
        worst[order] = max(worst[order], float(err.max()))
    return worst
