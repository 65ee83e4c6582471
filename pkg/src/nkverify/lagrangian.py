"""Analyzer for three-dimensional immersions into S3 x S3.

Given a parametrized immersion, tests the Lagrangian condition, computes the
induced frame geometry (second fundamental form, mean curvature, the split of
the product structure P into A + JB, angle functions), fixes the frame
orientation against the G tensor, and evaluates the Codazzi-equation residual.
Ships the built-in example immersions: the two sphere factors, the diagonal,
and a twisted non-Lagrangian control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .nkgeom import (
    Chart,
    G_tensor,
    PointS3S3,
    TangentVector,
    apply_J,
    apply_P,
    g_norm,
    metric_g,
)
from .quat import ImaginaryQuaternion, Quaternion, exp_im
from .report import CheckRecord

_SQRT3 = math.sqrt(3.0)

#: Central-difference step for numeric pushforwards.
PUSHFORWARD_STEP = 1e-5
#: Step for directional derivatives of the cubic-form components.
CUBIC_DERIVATIVE_STEP = 1e-3
#: Richardson step for frame-field derivatives along curves.
FRAME_FIELD_STEP = 1e-3
#: Immersion rank guard: smallest eigenvalue of the pushforward Gram matrix.
RANK_FLOOR = 1e-6
#: Two eigenpairs of (A, B) closer than this are treated as coinciding.
DEGENERACY_GAP = 1e-6
#: Residual bound enforcing the Lagrangian precondition of downstream ops.
LAGRANGIAN_PRECONDITION_TOL = 1e-6

EPSILON = np.zeros((3, 3, 3))
for _even in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPSILON[_even] = 1.0
for _odd in ((0, 2, 1), (2, 1, 0), (1, 0, 2)):
    EPSILON[_odd] = -1.0


@dataclass(frozen=True)
class Box:
    """Axis-aligned parameter domain in R^3."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def grid(self, n: int) -> list[np.ndarray]:
        axes = [np.linspace(l, h, n) for l, h in zip(self.lo, self.hi)]
        return [
            np.array([a, b, c])
            for a in axes[0]
            for b in axes[1]
            for c in axes[2]
        ]

    def contains(self, u: Sequence[float]) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= self.lo) and np.all(u <= self.hi))


@dataclass
class Immersion:
    """A parametrized map from a box in R^3 into S3 x S3.

    The pushforward is computed by central differences of the map unless an
    analytic jacobian (u -> three tangent vectors) is supplied.
    """

    label: str
    domain: Box
    map_fn: Callable[[np.ndarray], PointS3S3]
    jacobian: Callable[[np.ndarray], list[TangentVector]] | None = None

    def point(self, u: Sequence[float]) -> PointS3S3:
        return self.map_fn(np.asarray(u, dtype=float))

    def pushforward(self, u: Sequence[float]) -> list[TangentVector]:
        u = np.asarray(u, dtype=float)
        vecs = self.jacobian(u) if self.jacobian else _pushforward_numeric(self, u)
        gram = np.array([[metric_g(x, y) for y in vecs] for x in vecs])
        if float(np.min(np.linalg.eigvalsh(gram))) <= RANK_FLOOR:
            raise ValueError(f"{self.label}: pushforward rank-deficient at u={u.tolist()}")
        return vecs


def _pushforward_numeric(imm: Immersion, u: np.ndarray) -> list[TangentVector]:
    h = PUSHFORWARD_STEP
    base = imm.point(u)
    out = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        plus, minus = imm.point(u + e), imm.point(u - e)
        dp = Quaternion.from_array((plus.p.as_array() - minus.p.as_array()) / (2 * h))
        dq = Quaternion.from_array((plus.q.as_array() - minus.q.as_array()) / (2 * h))
        out.append(
            TangentVector(
                base,
                (base.p.conjugate() * dp).imag,
                (base.q.conjugate() * dq).imag,
            )
        )
    return out


def _gram_schmidt(vecs: list[TangentVector]) -> tuple[list[TangentVector], np.ndarray]:
    """g-orthonormalize; rows of the returned matrix express the output frame
    in terms of the input vectors."""
    out: list[TangentVector] = []
    rows = np.zeros((3, 3))
    for a, v in enumerate(vecs):
        w = v
        comb = np.zeros(3)
        comb[a] = 1.0
        for b, e in enumerate(out):
            c = metric_g(v, e)
            w = w - e.scaled(c)
            comb = comb - c * rows[b]
        n = g_norm(w)
        if n <= 1e-8:
            raise ValueError("frame degenerated during orthonormalization")
        out.append(w.scaled(1.0 / n))
        rows[a] = comb / n
    return out, rows


def _frame_at(imm: Immersion, u: np.ndarray) -> tuple[list[TangentVector], np.ndarray]:
    return _gram_schmidt(imm.pushforward(u))


@dataclass(frozen=True)
class LagrangianCheck:
    ok: bool
    residual: float

    def __bool__(self) -> bool:
        return self.ok


def is_lagrangian(imm: Immersion, u: Sequence[float], tol: float = 1e-9) -> LagrangianCheck:
    """Does J map the tangent space at imm(u) into the normal space?

    The residual is the largest |g(J E_a, E_b)| over an orthonormal tangent
    frame, so the test is scale-free in the parametrization.
    """
    E, _ = _frame_at(imm, np.asarray(u, dtype=float))
    r = max(abs(metric_g(apply_J(x), y)) for x in E for y in E)
    return LagrangianCheck(r < tol, r)


def _require_lagrangian(imm: Immersion, u: np.ndarray) -> None:
    chk = is_lagrangian(imm, u, LAGRANGIAN_PRECONDITION_TOL)
    if not chk.ok:
        raise ValueError(
            f"{imm.label}: not Lagrangian at u={u.tolist()} "
            f"(residual {chk.residual:.3e})"
        )


def _richardson(f_plus, f_minus, f_hplus, f_hminus, h: float) -> np.ndarray:
    d1 = (f_plus - f_minus) / (2.0 * h)
    d2 = (f_hplus - f_hminus) / h
    return (4.0 * d2 - d1) / 3.0


@dataclass
class _PointData:
    """Per-point frame package: orthonormal frame, its ambient derivatives,
    and the induced component tables."""

    chart: Chart
    E: list[TangentVector]
    JE: list[TangentVector]
    directions: np.ndarray  # rows: parameter directions pushing to E_a
    nabla: list[list[TangentVector]]
    c: np.ndarray  # cubic components g(h(E_a, E_b), JE_k)
    omega: np.ndarray  # connection components g(nabla_a E_b, E_k)
    H: TangentVector


def _frame_derivatives(
    imm: Immersion,
    u: np.ndarray,
    chart: Chart,
    frame_fn: Callable[[np.ndarray], list[TangentVector]],
    directions: np.ndarray,
    E0: list[TangentVector],
) -> list[list[TangentVector]]:
    """Ambient connection derivatives nabla_{E_a} E_b of a frame field given
    by frame_fn, along the parameter directions matching E_a."""
    h = FRAME_FIELD_STEP
    x0 = chart.coords(imm.point(u))
    gamma = chart.christoffel(x0)
    comps0 = np.array([chart.tangent_to_coords(x0, e) for e in E0])
    nabla: list[list[TangentVector]] = []
    for a in range(3):
        d = directions[a]
        xs = {}
        ws = {}
        for t in (h, -h, h / 2, -h / 2):
            x_t = chart.coords(imm.point(u + t * d))
            F = frame_fn(u + t * d)
            xs[t] = x_t
            ws[t] = np.array([chart.tangent_to_coords(x_t, f) for f in F])
        cdot = _richardson(xs[h], xs[-h], xs[h / 2], xs[-h / 2], h)
        wdot = _richardson(ws[h], ws[-h], ws[h / 2], ws[-h / 2], h)
        row = []
        for b in range(3):
            comps = wdot[b] + np.einsum("dab,a,b->d", gamma, cdot, comps0[b])
            row.append(chart.tangent_from_coords(x0, comps))
        nabla.append(row)
    return nabla


def _point_data(imm: Immersion, u: np.ndarray) -> _PointData:
    chart = Chart(imm.point(u))
    E, S = _frame_at(imm, u)
    nabla = _frame_derivatives(
        imm, u, chart, lambda w: _frame_at(imm, w)[0], S, E
    )
    JE = [apply_J(e) for e in E]
    c = np.zeros((3, 3, 3))
    omega = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            for k in range(3):
                c[a, b, k] = metric_g(nabla[a][b], JE[k])
                omega[a, b, k] = metric_g(nabla[a][b], E[k])
    H = TangentVector(E[0].base, ImaginaryQuaternion.zero(), ImaginaryQuaternion.zero())
    for a in range(3):
        normal = nabla[a][a]
        for k in range(3):
            normal = normal - E[k].scaled(omega[a, a, k])
        H = H + normal.scaled(1.0 / 3.0)
    return _PointData(chart, E, JE, S, nabla, c, omega, H)


def second_fundamental_form(
    imm: Immersion, u: Sequence[float]
) -> tuple[np.ndarray, TangentVector]:
    """Cubic components c_abk = g(h(E_a, E_b), JE_k) in an orthonormal frame,
    and the mean curvature vector H."""
    u = np.asarray(u, dtype=float)
    _require_lagrangian(imm, u)
    data = _point_data(imm, u)
    return data.c, data.H


def ab_operators(imm: Immersion, u: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of the tangential split P E_a = sum_b (A_ab E_b + B_ab J E_b).

    The sign of B is fixed by that expansion: B_ab = g(P E_a, J E_b), since
    {E_b, JE_b} is a g-orthonormal basis of the pulled-back tangent bundle.
    """
    u = np.asarray(u, dtype=float)
    _require_lagrangian(imm, u)
    E, _ = _frame_at(imm, u)
    JE = [apply_J(e) for e in E]
    A = np.array([[metric_g(apply_P(x), y) for y in E] for x in E])
    B = np.array([[metric_g(apply_P(x), jy) for jy in JE] for x in E])
    return A, B


def p_split_residual(imm: Immersion, u: Sequence[float]) -> float:
    """Reconstruction error max_a |P E_a - sum_b (A_ab E_b + B_ab J E_b)|."""
    u = np.asarray(u, dtype=float)
    E, _ = _frame_at(imm, u)
    JE = [apply_J(e) for e in E]
    A, B = ab_operators(imm, u)
    worst = 0.0
    for a in range(3):
        recon = E[0].scaled(0.0)
        for b in range(3):
            recon = recon + E[b].scaled(A[a, b]) + JE[b].scaled(B[a, b])
        worst = max(worst, g_norm(apply_P(E[a]) - recon))
    return worst


@dataclass
class AngleData:
    thetas: tuple[float, float, float]
    coeffs: np.ndarray  # rows: eigenvector components in the input frame
    degenerate: bool
    cos2: np.ndarray
    sin2: np.ndarray


def angle_functions(A: np.ndarray, B: np.ndarray) -> AngleData:
    """Simultaneous eigenstructure of the commuting pair (A, B).

    Eigenvectors satisfy A e_i = cos(2 theta_i) e_i, B e_i = sin(2 theta_i) e_i
    with theta_i in [0, pi), ordered by ascending cos(2 theta) with ties broken
    by the B eigenvalue; eigenvector signs are canonicalized.  The degeneracy
    flag is set when two (cos, sin) eigenpairs coincide within the gap
    threshold, which predicts a totally geodesic submanifold.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if (
        np.max(np.abs(A - A.T)) > 1e-6
        or np.max(np.abs(B - B.T)) > 1e-6
        or np.max(np.abs(A @ B - B @ A)) > 1e-6
    ):
        raise ValueError("angle functions need symmetric commuting A, B")
    w, U = np.linalg.eigh(A)
    i = 0
    while i < 3:  # diagonalize B inside each A-eigenvalue cluster
        j = i + 1
        while j < 3 and w[j] - w[i] < 1e-8:
            j += 1
        if j - i > 1:
            block = U[:, i:j]
            _, Ub = np.linalg.eigh(block.T @ B @ block)
            U[:, i:j] = block @ Ub
        i = j
    cos2 = np.diag(U.T @ A @ U).copy()
    sin2 = np.diag(U.T @ B @ U).copy()
    if np.max(np.abs(U.T @ B @ U - np.diag(sin2))) > 1e-6:
        raise ValueError("A and B could not be jointly diagonalized")
    order = np.lexsort((np.round(sin2, 12), np.round(cos2, 12)))
    cos2, sin2, U = cos2[order], sin2[order], U[:, order]
    for col in range(3):  # canonical signs: largest-magnitude entry positive
        lead = int(np.argmax(np.abs(U[:, col])))
        if U[lead, col] < 0:
            U[:, col] = -U[:, col]
    thetas = tuple(math.atan2(s, c) / 2 % math.pi for c, s in zip(cos2, sin2))
    degenerate = any(
        abs(cos2[i] - cos2[j]) < DEGENERACY_GAP and abs(sin2[i] - sin2[j]) < DEGENERACY_GAP
        for i in range(3)
        for j in range(i + 1, 3)
    )
    return AngleData(thetas, U.T, degenerate, cos2, sin2)


def angle_sum_defect(thetas: Sequence[float]) -> float:
    """Distance of theta_1 + theta_2 + theta_3 to the nearest multiple of pi."""
    s = float(sum(thetas))
    return abs(s - math.pi * round(s / math.pi))


def relation_h_omega_residual(
    h: np.ndarray, omega: np.ndarray, thetas: Sequence[float]
) -> float:
    """Residual of the frame relation linking h, omega and the angles:
    h_ij^k cos(th_j - th_k) = (eps_ijk/(2 sqrt 3) - omega_ij^k) sin(th_j - th_k)
    for j != k."""
    worst = 0.0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if j == k:
                    continue
                d = thetas[j] - thetas[k]
                lhs = h[i, j, k] * math.cos(d)
                rhs = (EPSILON[i, j, k] / (2 * _SQRT3) - omega[i, j, k]) * math.sin(d)
                worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass
class AdaptedFrameData:
    """Everything the analyzer knows at one parameter point."""

    u: np.ndarray
    frame: list[TangentVector]
    thetas: tuple[float, float, float]
    A: np.ndarray
    B: np.ndarray
    h: np.ndarray
    omega: np.ndarray
    H: TangentVector
    degenerate: bool
    orientation_residual: float
    eq_residual: float | None  # frame relation, non-degenerate points only
    dtheta_residual: float | None  # E_i(theta_j) = -h_jj^i, same restriction


def _match_to_reference(coeffs: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Permute and flip eigenvector rows to follow the reference frame."""
    out = np.zeros_like(reference)
    used: set[int] = set()
    for i in range(3):
        overlaps = [
            (abs(float(np.dot(coeffs[j], reference[i]))), j)
            for j in range(3)
            if j not in used
        ]
        _, best = max(overlaps)
        used.add(best)
        row = coeffs[best]
        if float(np.dot(row, reference[i])) < 0:
            row = -row
        out[i] = row
    return out


def frame_components(imm: Immersion, u: Sequence[float]) -> AdaptedFrameData:
    """Adapted-frame analysis at one point.

    Diagonalizes (A, B) on the orthonormalized pushforward frame, flips one
    frame vector if needed so the G tensor takes its canonical frame form
    G(E_i, E_j) = -(1/sqrt 3) sum_k eps_ij^k J E_k, and reports the cubic and
    connection components in the fixed frame.  The relation between h, omega
    and the angle derivatives is checked only at non-degenerate points; the
    built-in examples are all degenerate (hence totally geodesic), so there
    the flag is reported instead.
    """
    u = np.asarray(u, dtype=float)
    _require_lagrangian(imm, u)
    E, S = _frame_at(imm, u)
    JE = [apply_J(e) for e in E]
    A0 = np.array([[metric_g(apply_P(x), y) for y in E] for x in E])
    B0 = np.array([[metric_g(apply_P(x), jy) for jy in JE] for x in E])
    ang = angle_functions(A0, B0)
    R = ang.coeffs.copy()

    chart = Chart(imm.point(u))
    frame = [_combine(E, R[i]) for i in range(3)]
    probe = metric_g(G_tensor(frame[0], frame[1], chart), apply_J(frame[2]))
    if probe > 0:  # canonical form requires g(G(E1,E2), JE3) = -1/sqrt(3)
        R[2] = -R[2]
        frame[2] = frame[2].scaled(-1.0)
    jframe = [apply_J(e) for e in frame]
    orientation_residual = 0.0
    for i in range(3):
        for j in range(3):
            target = frame[0].scaled(0.0)
            for k in range(3):
                target = target - jframe[k].scaled(EPSILON[i, j, k] / _SQRT3)
            orientation_residual = max(
                orientation_residual, g_norm(G_tensor(frame[i], frame[j], chart) - target)
            )

    directions = R @ S

    def frozen_frame(w: np.ndarray) -> list[TangentVector]:
        Ew, _ = _frame_at(imm, w)
        return [_combine(Ew, R[i]) for i in range(3)]

    nabla = _frame_derivatives(imm, u, chart, frozen_frame, directions, frame)
    h = np.zeros((3, 3, 3))
    omega = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            for k in range(3):
                h[a, b, k] = metric_g(nabla[a][b], jframe[k])
                omega[a, b, k] = metric_g(nabla[a][b], frame[k])
    H = frame[0].scaled(0.0)
    for a in range(3):
        normal = nabla[a][a]
        for k in range(3):
            normal = normal - frame[k].scaled(omega[a, a, k])
        H = H + normal.scaled(1.0 / 3.0)
    A = np.array([[metric_g(apply_P(x), y) for y in frame] for x in frame])
    B = np.array([[metric_g(apply_P(x), jy) for jy in jframe] for x in frame])

    eq_residual = None
    dtheta_residual = None
    if not ang.degenerate:
        eq_residual, dtheta_residual = _eigenfield_checks(
            imm, u, chart, E, S, R, frame, jframe, ang, directions
        )

    return AdaptedFrameData(
        u=u,
        frame=frame,
        thetas=ang.thetas,
        A=A,
        B=B,
        h=h,
        omega=omega,
        H=H,
        degenerate=ang.degenerate,
        orientation_residual=orientation_residual,
        eq_residual=eq_residual,
        dtheta_residual=dtheta_residual,
    )


def _combine(E: list[TangentVector], coeffs: np.ndarray) -> TangentVector:
    out = E[0].scaled(float(coeffs[0]))
    for b in (1, 2):
        out = out + E[b].scaled(float(coeffs[b]))
    return out


def _eigenangles_at(
    imm: Immersion, w: np.ndarray, reference: np.ndarray
) -> tuple[np.ndarray, list[TangentVector], np.ndarray]:
    """Eigen coefficients, frame and angle values at w, continuity-matched to
    the reference coefficient rows."""
    Ew, _ = _frame_at(imm, w)
    JEw = [apply_J(e) for e in Ew]
    Aw = np.array([[metric_g(apply_P(x), y) for y in Ew] for x in Ew])
    Bw = np.array([[metric_g(apply_P(x), jy) for jy in JEw] for x in Ew])
    ang = angle_functions(Aw, Bw)
    matched = _match_to_reference(ang.coeffs, reference)
    cos2 = np.array([float(row @ Aw @ row) for row in matched])
    sin2 = np.array([float(row @ Bw @ row) for row in matched])
    thetas = np.array([math.atan2(s, c) / 2 % math.pi for c, s in zip(cos2, sin2)])
    framew = [_combine(Ew, matched[i]) for i in range(3)]
    return matched, framew, thetas


def _eigenfield_checks(
    imm: Immersion,
    u: np.ndarray,
    chart: Chart,
    E: list[TangentVector],
    S: np.ndarray,
    R: np.ndarray,
    frame: list[TangentVector],
    jframe: list[TangentVector],
    ang: AngleData,
    directions: np.ndarray,
) -> tuple[float, float]:
    """Frame relation and angle-derivative checks with the true eigenframe
    field (only meaningful when the eigenstructure is simple)."""
    nabla = _frame_derivatives(
        imm, u, chart, lambda w: _eigenangles_at(imm, w, R)[1], directions, frame
    )
    h = np.zeros((3, 3, 3))
    omega = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            for k in range(3):
                h[a, b, k] = metric_g(nabla[a][b], jframe[k])
                omega[a, b, k] = metric_g(nabla[a][b], frame[k])
    eq_residual = relation_h_omega_residual(h, omega, ang.thetas)

    step = CUBIC_DERIVATIVE_STEP
    dtheta_residual = 0.0
    center = np.array(ang.thetas)
    for i in range(3):
        d = directions[i]
        th_plus = _unwrap(_eigenangles_at(imm, u + step * d, R)[2], center)
        th_minus = _unwrap(_eigenangles_at(imm, u - step * d, R)[2], center)
        for j in range(3):
            deriv = (th_plus[j] - th_minus[j]) / (2 * step)
            dtheta_residual = max(dtheta_residual, abs(deriv + h[j, j, i]))
    return eq_residual, dtheta_residual


def _unwrap(thetas: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Shift each angle by a multiple of pi to land nearest its center value."""
    return thetas - math.pi * np.round((thetas - center) / math.pi)


def codazzi_residual(imm: Immersion, u: Sequence[float]) -> float:
    """Largest frame-triple violation of the Codazzi equation.

    Evaluates (del h)(X,Y,Z) - (del h)(Y,X,Z) minus
    (1/3)(g(AY,Z) JBX - g(AX,Z) JBY - g(BY,Z) JAX + g(BX,Z) JAY)
    over the orthonormalized frame, where (del h)(X,Y,Z) is the covariant
    derivative of the second fundamental form and its normal-connection term
    is expanded through the identity nabla-perp_X JY = J nabla_X Y + G(X,Y).
    """
    u = np.asarray(u, dtype=float)
    _require_lagrangian(imm, u)
    data = _point_data(imm, u)
    E, JE, c, omega = data.E, data.JE, data.c, data.omega
    A = np.array([[metric_g(apply_P(x), y) for y in E] for x in E])
    B = np.array([[metric_g(apply_P(x), jy) for jy in JE] for x in E])
    G = [[G_tensor(E[x], E[k], data.chart) for k in range(3)] for x in range(3)]

    step = CUBIC_DERIVATIVE_STEP
    dc = np.zeros((3, 3, 3, 3))
    for x in range(3):
        d = data.directions[x]
        c_plus = _point_data(imm, u + step * d).c
        c_minus = _point_data(imm, u - step * d).c
        dc[x] = (c_plus - c_minus) / (2 * step)

    def h_vec(a: int, b: int) -> TangentVector:
        out = JE[0].scaled(c[a, b, 0])
        for k in (1, 2):
            out = out + JE[k].scaled(c[a, b, k])
        return out

    def del_h(x: int, y: int, z: int) -> TangentVector:
        out = E[0].scaled(0.0)
        for k in range(3):
            out = out + JE[k].scaled(dc[x, y, z, k])
            term = G[x][k]
            for m in range(3):
                term = term + JE[m].scaled(omega[x, k, m])
            out = out + term.scaled(c[y, z, k])
        for m in range(3):
            out = out - h_vec(m, z).scaled(omega[x, y, m])
            out = out - h_vec(y, m).scaled(omega[x, z, m])
        return out

    def j_op(mat: np.ndarray, x: int) -> TangentVector:
        out = JE[0].scaled(mat[x, 0])
        for m in (1, 2):
            out = out + JE[m].scaled(mat[x, m])
        return out

    worst = 0.0
    for x in range(3):
        for y in range(x + 1, 3):
            lhs = [del_h(x, y, z) - del_h(y, x, z) for z in range(3)]
            for z in range(3):
                rhs = (
                    j_op(B, x).scaled(A[y, z])
                    - j_op(B, y).scaled(A[x, z])
                    - j_op(A, x).scaled(B[y, z])
                    + j_op(A, y).scaled(B[x, z])
                ).scaled(1.0 / 3.0)
                worst = max(worst, g_norm(lhs[z] - rhs))
    return worst


# ---------------------------------------------------------------------------
# built-in examples


def _exp_point(a: np.ndarray) -> Quaternion:
    return exp_im(ImaginaryQuaternion.from_array(a))


def rotation_matrix(axis: Sequence[float], angle: float) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


#: Fixed generic rotation used by the non-Lagrangian control example.
TWIST_ROTATION = rotation_matrix((1.0, 2.0, 3.0), 0.9)

_ONE = Quaternion.one()
_DEFAULT_BOX = Box((-0.6, -0.6, -0.6), (0.6, 0.6, 0.6))


def builtin_examples() -> list[Immersion]:
    """The canonical candidates: both factors, the diagonal, and a twisted
    graph that fails the Lagrangian test (kept as a negative control)."""
    R = TWIST_ROTATION
    return [
        Immersion("factor_left", _DEFAULT_BOX, lambda u: PointS3S3(_exp_point(u), _ONE)),
        Immersion("factor_right", _DEFAULT_BOX, lambda u: PointS3S3(_ONE, _exp_point(u))),
        Immersion(
            "diagonal", _DEFAULT_BOX, lambda u: PointS3S3(_exp_point(u), _exp_point(u))
        ),
        Immersion(
            "twisted-control",
            _DEFAULT_BOX,
            lambda u: PointS3S3(_exp_point(u), _exp_point(R @ u)),
        ),
    ]


def example_by_label(label: str) -> Immersion:
    wanted = label.replace("-", "_")
    for imm in builtin_examples():
        if imm.label.replace("-", "_") == wanted:
            return imm
    raise KeyError(f"no built-in example named {label!r}")


# ---------------------------------------------------------------------------
# grid suite


def lagrangian_suite(
    imm: Immersion,
    grid: int = 5,
    lag_tol: float = 1e-9,
    h_tol: float = 1e-5,
    ab_tol: float = 1e-8,
    angle_tol: float = 1e-5,
    orientation_tol: float = 1e-4,
    codazzi_tol: float = 1e-4,
) -> list[CheckRecord]:
    """All per-immersion checks over a grid x grid x grid parameter sweep.

    If the Lagrangian test fails anywhere, the downstream checks are reported
    as skipped rather than evaluated on meaningless data.
    """
    points = imm.domain.grid(grid)
    tag = imm.label
    lag_worst = 0.0
    for u in points:
        lag_worst = max(lag_worst, is_lagrangian(imm, u, lag_tol).residual)
    records = [
        CheckRecord(
            check_id=f"lagrangian[{tag}]",
            passed=lag_worst < lag_tol,
            samples=len(points),
            tolerance=lag_tol,
            max_residual=lag_worst,
        )
    ]
    downstream = (
        ("minimality", h_tol),
        ("cubic-symmetry", h_tol),
        ("ab-structure", ab_tol),
        ("angle-sum", angle_tol),
        ("orientation", orientation_tol),
        ("codazzi-residual", codazzi_tol),
    )
    if not records[0].passed:
        for name, tol in downstream:
            records.append(
                CheckRecord(
                    check_id=f"{name}[{tag}]",
                    passed=True,
                    status="skip",
                    tolerance=tol,
                    details={"reason": "immersion failed the Lagrangian test"},
                )
            )
        return records

    worsts = {name: 0.0 for name, _ in downstream}
    degenerate_points = 0
    for u in points:
        c, H = second_fundamental_form(imm, u)
        worsts["minimality"] = max(worsts["minimality"], g_norm(H))
        sym = max(
            float(np.max(np.abs(c - c.transpose(1, 0, 2)))),
            float(np.max(np.abs(c - c.transpose(0, 2, 1)))),
        )
        worsts["cubic-symmetry"] = max(worsts["cubic-symmetry"], sym)
        A, B = ab_operators(imm, u)
        structure = max(
            float(np.max(np.abs(A - A.T))),
            float(np.max(np.abs(B - B.T))),
            float(np.max(np.abs(A @ B - B @ A))),
            float(np.max(np.abs(A @ A + B @ B - np.eye(3)))),
            p_split_residual(imm, u),
        )
        worsts["ab-structure"] = max(worsts["ab-structure"], structure)
        fc = frame_components(imm, u)
        if fc.degenerate:
            degenerate_points += 1
        worsts["angle-sum"] = max(worsts["angle-sum"], angle_sum_defect(fc.thetas))
        worsts["orientation"] = max(worsts["orientation"], fc.orientation_residual)
        worsts["codazzi-residual"] = max(
            worsts["codazzi-residual"], codazzi_residual(imm, u)
        )
    for name, tol in downstream:
        details = {}
        if name == "angle-sum":
            details = {"degenerate_points": degenerate_points, "grid_points": len(points)}
        records.append(
            CheckRecord(
                check_id=f"{name}[{tag}]",
                passed=worsts[name] < tol,
                samples=len(points),
                tolerance=tol,
                max_residual=worsts[name],
                details=details,
            )
        )
    return records
