"""The homogeneous nearly Kahler structure on S3 x S3.

Points are pairs of unit quaternions.  A tangent vector at (p, q) is stored as
the imaginary-quaternion pair (alpha, beta) standing for (p*alpha, q*beta);
in that representation the metric g, the almost complex structure J and the
product-swap tensor P are closed-form one-liners.

Derivatives are another matter: the Levi-Civita connection of g and the
tensor G = (nabla J) have no closed form here, so charts built from the
quaternion exponential provide coordinates, and Christoffel symbols come from
Richardson-extrapolated central differences of the chart metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quat import ImaginaryQuaternion, Quaternion, dexp_im, exp_im, log_unit

_SQRT3 = math.sqrt(3.0)

#: Per-factor coordinate radius of a chart, inside the injectivity radius.
CHART_RADIUS = math.pi - 0.1
#: Base step for Christoffel central differences (one Richardson level on top).
CHRISTOFFEL_STEP = 1e-4
#: Base step for first derivatives of vector fields along curves.
FIELD_STEP = 1e-3
#: Two points count as the same base point within this componentwise tolerance.
BASE_TOL = 1e-9

_IM_BASIS = (
    ImaginaryQuaternion(1.0, 0.0, 0.0),
    ImaginaryQuaternion(0.0, 1.0, 0.0),
    ImaginaryQuaternion(0.0, 0.0, 1.0),
)


@dataclass(frozen=True)
class PointS3S3:
    """A point (p, q) of S3 x S3, both factors unit quaternions."""

    p: Quaternion
    q: Quaternion

    def __post_init__(self) -> None:
        for name, val in (("p", self.p), ("q", self.q)):
            if abs(val.norm() - 1.0) > BASE_TOL:
                raise ValueError(f"{name} is not a unit quaternion: |{name}| = {val.norm()}")

    @classmethod
    def identity(cls) -> "PointS3S3":
        return cls(Quaternion.one(), Quaternion.one())

    def close_to(self, other: "PointS3S3", tol: float = BASE_TOL) -> bool:
        dp = np.max(np.abs(self.p.as_array() - other.p.as_array()))
        dq = np.max(np.abs(self.q.as_array() - other.q.as_array()))
        return max(dp, dq) <= tol


@dataclass(frozen=True)
class TangentVector:
    """The tangent vector (p*alpha, q*beta) at base = (p, q)."""

    base: PointS3S3
    alpha: ImaginaryQuaternion
    beta: ImaginaryQuaternion

    def embed(self) -> np.ndarray:
        """Ambient R^8 coordinates (the two factor 4-vectors concatenated)."""
        pa = self.base.p * self.alpha.promote()
        qb = self.base.q * self.beta.promote()
        return np.concatenate([pa.as_array(), qb.as_array()])

    def components(self) -> np.ndarray:
        """(alpha, beta) flattened to R^6."""
        return np.concatenate([self.alpha.as_array(), self.beta.as_array()])

    def _require_same_base(self, other: "TangentVector") -> None:
        if not self.base.close_to(other.base):
            raise ValueError("tangent vectors live at different base points")

    def __add__(self, other: "TangentVector") -> "TangentVector":
        self._require_same_base(other)
        return TangentVector(self.base, self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        self._require_same_base(other)
        return TangentVector(self.base, self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.alpha, -self.beta)

    def scaled(self, t: float) -> "TangentVector":
        return TangentVector(self.base, self.alpha.scaled(t), self.beta.scaled(t))


def metric_g(X: TangentVector, Y: TangentVector) -> float:
    """The nearly Kahler metric, reduced to the (alpha, beta) representation.

    g(X, Y) = (4/3)(<a,a'> + <b,b'>) - (2/3)(<a,b'> + <a',b>).
    """
    X._require_same_base(Y)
    aa = X.alpha.dot(Y.alpha) + X.beta.dot(Y.beta)
    ab = X.alpha.dot(Y.beta) + Y.alpha.dot(X.beta)
    return (4.0 / 3.0) * aa - (2.0 / 3.0) * ab


def metric_g_ambient(X: TangentVector, Y: TangentVector) -> float:
    """The metric from its definition: (1/2)(<X,Y> + <JX,JY>) in ambient R^8.

    Kept separate from metric_g so the two expressions can be compared as an
    independent consistency check.
    """
    X._require_same_base(Y)
    JX, JY = apply_J(X), apply_J(Y)
    return 0.5 * (
        float(np.dot(X.embed(), Y.embed())) + float(np.dot(JX.embed(), JY.embed()))
    )


def g_norm(X: TangentVector) -> float:
    return math.sqrt(metric_g(X, X))


def apply_J(X: TangentVector) -> TangentVector:
    """J(p*a, q*b) = (p*(2b - a), q*(b - 2a)) / sqrt(3)."""
    a, b = X.alpha, X.beta
    return TangentVector(
        X.base,
        (b.scaled(2.0) - a).scaled(1.0 / _SQRT3),
        (b - a.scaled(2.0)).scaled(1.0 / _SQRT3),
    )


def apply_P(X: TangentVector) -> TangentVector:
    """P(p*a, q*b) = (p*b, q*a)."""
    return TangentVector(X.base, X.beta, X.alpha)


def random_point(rng: np.random.Generator) -> PointS3S3:
    """A uniformly distributed point (normalized Gaussian 4-vectors)."""
    arrs = rng.standard_normal((2, 4))
    return PointS3S3(
        Quaternion.from_array(arrs[0]).normalized(),
        Quaternion.from_array(arrs[1]).normalized(),
    )


def random_tangent(
    rng: np.random.Generator, base: PointS3S3, scale: float = 1.0
) -> TangentVector:
    comps = rng.uniform(-scale, scale, 6)
    return TangentVector(
        base,
        ImaginaryQuaternion.from_array(comps[:3]),
        ImaginaryQuaternion.from_array(comps[3:]),
    )


class Chart:
    """Product-exponential chart centered at a base point.

    chart coordinates x in R^6 map to (p0 * exp(x1 i + x2 j + x3 k),
    q0 * exp(x4 i + x5 j + x6 k)); each factor is restricted to radius
    CHART_RADIUS.  At x = 0 the coordinate frame is the standard basis
    (p*e_i, 0), (0, q*e_i), so a tangent vector's chart components at the
    center are just its (alpha, beta) entries.

    Frames, metric components and Christoffel symbols are memoized per
    coordinate vector.  The chart itself is immutable; the caches are pure
    memoization.
    """

    def __init__(self, base: PointS3S3) -> None:
        self.base = base
        self._points: dict[bytes, PointS3S3] = {}
        self._frames: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}
        self._grams: dict[bytes, np.ndarray] = {}
        self._gammas: dict[bytes, np.ndarray] = {}

    @staticmethod
    def _check_radius(x: np.ndarray) -> None:
        r1 = float(np.linalg.norm(x[:3]))
        r2 = float(np.linalg.norm(x[3:]))
        if r1 >= CHART_RADIUS or r2 >= CHART_RADIUS:
            raise ValueError(
                f"chart coordinates out of range: factor radii ({r1}, {r2})"
            )

    def point(self, x: np.ndarray) -> PointS3S3:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self._points.get(key)
        if hit is not None:
            return hit
        self._check_radius(x)
        p = self.base.p * exp_im(ImaginaryQuaternion.from_array(x[:3]))
        q = self.base.q * exp_im(ImaginaryQuaternion.from_array(x[3:]))
        pt = PointS3S3(p, q)
        self._points[key] = pt
        return pt

    def coords(self, pt: PointS3S3) -> np.ndarray:
        """Inverse of point(); raises where the factor logs are out of range."""
        w1 = log_unit(self.base.p.conjugate() * pt.p)
        w2 = log_unit(self.base.q.conjugate() * pt.q)
        x = np.concatenate([w1.as_array(), w2.as_array()])
        self._check_radius(x)
        return x

    def _frame_arrays(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(alphas, betas), each 6x3: row a holds the parts of the frame f_a.

        The coordinate pushforward reduces to dexp in each factor, with the
        base-point factor cancelling: alpha_a = Im(conj(exp w) * dexp_w(e_a)).
        """
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self._frames.get(key)
        if hit is not None:
            return hit
        self._check_radius(x)
        alphas = np.zeros((6, 3))
        betas = np.zeros((6, 3))
        for half, out, col in ((x[:3], alphas, 0), (x[3:], betas, 3)):
            w = ImaginaryQuaternion.from_array(half)
            ec = exp_im(w).conjugate()
            for a in range(3):
                out[col + a] = (ec * dexp_im(w, _IM_BASIS[a])).imag.as_array()
        pair = (alphas, betas)
        self._frames[key] = pair
        return pair

    def frame(self, x: np.ndarray) -> list[TangentVector]:
        alphas, betas = self._frame_arrays(x)
        pt = self.point(np.asarray(x, dtype=float))
        return [
            TangentVector(
                pt,
                ImaginaryQuaternion.from_array(alphas[a]),
                ImaginaryQuaternion.from_array(betas[a]),
            )
            for a in range(6)
        ]

    def gram(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self._grams.get(key)
        if hit is not None:
            return hit
        A, B = self._frame_arrays(x)
        G = (4.0 / 3.0) * (A @ A.T + B @ B.T) - (2.0 / 3.0) * (A @ B.T + B @ A.T)
        self._grams[key] = G
        return G

    def christoffel(self, x: np.ndarray) -> np.ndarray:
        """Gamma[d, a, b] at x, from central differences of gram().

        One Richardson level (steps h and h/2) knocks the truncation error
        down to O(h^4), comfortably below the 1e-5 targets downstream.
        """
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        hit = self._gammas.get(key)
        if hit is not None:
            return hit
        h = CHRISTOFFEL_STEP
        dg = np.empty((6, 6, 6))
        for a in range(6):
            e = np.zeros(6)
            e[a] = h
            d1 = (self.gram(x + e) - self.gram(x - e)) / (2.0 * h)
            d2 = (self.gram(x + e / 2.0) - self.gram(x - e / 2.0)) / h
            dg[a] = (4.0 * d2 - d1) / 3.0
        # L[a,b,c] = d_a g_cb + d_b g_ca - d_c g_ab
        L = dg.transpose(0, 2, 1) + dg.transpose(2, 0, 1) - dg.transpose(1, 2, 0)
        g_inv = np.linalg.inv(self.gram(x))
        gamma = 0.5 * np.einsum("dc,abc->dab", g_inv, L)
        self._gammas[key] = gamma
        return gamma

    def tangent_from_coords(self, x: np.ndarray, comps: np.ndarray) -> TangentVector:
        alphas, betas = self._frame_arrays(np.asarray(x, dtype=float))
        comps = np.asarray(comps, dtype=float)
        return TangentVector(
            self.point(np.asarray(x, dtype=float)),
            ImaginaryQuaternion.from_array(comps @ alphas),
            ImaginaryQuaternion.from_array(comps @ betas),
        )

    def tangent_to_coords(self, x: np.ndarray, X: TangentVector) -> np.ndarray:
        """Chart components of X at x, via a Gram solve against the frame."""
        x = np.asarray(x, dtype=float)
        alphas, betas = self._frame_arrays(x)
        a, b = X.alpha.as_array(), X.beta.as_array()
        rhs = (4.0 / 3.0) * (alphas @ a + betas @ b) - (2.0 / 3.0) * (
            alphas @ b + betas @ a
        )
        return np.linalg.solve(self.gram(x), rhs)


def _vector_derivative(
    fn: Callable[[float], np.ndarray], t0: float, h: float
) -> np.ndarray:
    """Richardson-extrapolated central difference of a vector-valued map."""
    d1 = (np.asarray(fn(t0 + h)) - np.asarray(fn(t0 - h))) / (2.0 * h)
    d2 = (np.asarray(fn(t0 + h / 2.0)) - np.asarray(fn(t0 - h / 2.0))) / h
    return (4.0 * d2 - d1) / 3.0


def covariant_derivative_along(
    chart: Chart,
    curve: Callable[[float], np.ndarray],
    field: Callable[[float], np.ndarray],
    t0: float = 0.0,
    step: float = FIELD_STEP,
) -> TangentVector:
    """Connection derivative of a field given along a curve, at t0.

    curve: t -> chart coordinates; field: t -> chart components of the field
    at curve(t).  Returns w' + Gamma(c(t0))(c', w) as a tangent vector.
    """
    x0 = np.asarray(curve(t0), dtype=float)
    w0 = np.asarray(field(t0), dtype=float)
    cdot = _vector_derivative(curve, t0, step)
    wdot = _vector_derivative(field, t0, step)
    gamma = chart.christoffel(x0)
    comps = wdot + np.einsum("dab,a,b->d", gamma, cdot, w0)
    return chart.tangent_from_coords(x0, comps)


def covariant_derivative(
    chart: Chart,
    V: Callable[[np.ndarray], np.ndarray],
    W: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    step: float = FIELD_STEP,
) -> TangentVector:
    """nabla_V W at x for vector fields given in chart components."""
    x = np.asarray(x, dtype=float)
    v0 = np.asarray(V(x), dtype=float)
    return covariant_derivative_along(
        chart,
        lambda t: x + t * v0,
        lambda t: W(x + t * v0),
        0.0,
        step,
    )


def G_tensor(X: TangentVector, Y: TangentVector, chart: Chart | None = None) -> TangentVector:
    """G(X, Y) = (nabla J)(X, Y), computed in a chart centered at the base.

    Y is extended with constant chart components; the result is
    extension-independent up to discretization error.  Passing a chart
    already centered at X.base reuses its cached Christoffel symbols.
    """
    X._require_same_base(Y)
    if chart is None or not chart.base.close_to(X.base):
        chart = Chart(X.base)
    zero = np.zeros(6)
    xdir = X.components()
    y = Y.components()

    def j_field(t: float) -> np.ndarray:
        c = t * xdir
        ybar = chart.tangent_from_coords(c, y)
        return chart.tangent_to_coords(c, apply_J(ybar))

    term1 = covariant_derivative_along(chart, lambda t: t * xdir, j_field, 0.0)
    gamma0 = chart.christoffel(zero)
    nabla_y = np.einsum("dab,a,b->d", gamma0, xdir, y)
    term2 = apply_J(chart.tangent_from_coords(zero, nabla_y))
    return term1 - term2


def integrate_geodesic(
    chart: Chart,
    x0: np.ndarray,
    v0: np.ndarray,
    t_max: float = 1.0,
    rtol: float = 1e-10,
    n_eval: int = 21,
) -> np.ndarray:
    """Integrate x'' = -Gamma(x)(x', x') from (x0, v0); rows are coords at
    n_eval evenly spaced times in [0, t_max]."""
    from scipy.integrate import solve_ivp

    def rhs(_t: float, s: np.ndarray) -> np.ndarray:
        x, v = s[:6], s[6:]
        acc = -np.einsum("dab,a,b->d", chart.christoffel(x), v, v)
        return np.concatenate([v, acc])

    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        np.concatenate([np.asarray(x0, float), np.asarray(v0, float)]),
        rtol=rtol,
        atol=1e-12,
        dense_output=False,
        t_eval=np.linspace(0.0, t_max, n_eval),
    )
    if not sol.success:
        raise RuntimeError(f"geodesic integration failed: {sol.message}")
    return sol.y[:6].T
