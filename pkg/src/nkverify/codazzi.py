"""Exact frame-level verification of the Codazzi analysis.

Works with a three-dimensional orthonormal frame abstractly: a state consists
of the components v = (v1, v2, v3) of the cubic-form vector field and exact
circle points for the angle functions theta_i (with theta1+theta2+theta3 = 0
imposed).  The second fundamental form components h_ij^k are cubic polynomials
in v, the connection components omega_ij^k are rational in v and the angle
cotangents, and each antisymmetrized Codazzi component becomes a scalar that
is affine in the nine unknown frame derivatives D_im = E_i(v_m).

All identities that are polynomial over Q(sqrt(3)) are checked exactly; the
one case whose constraint couples v and theta transcendentally is checked in
high-precision floating point with explicit tolerances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

from mpmath import mp

from .exact import (
    CirclePoint,
    QSqrt3,
    angle_add,
    angle_sub,
    poly_identity_check,
    rat_circle_point,
)
from .report import CheckRecord

AXES = (1, 2, 3)

_EPS_TABLE = {
    (1, 2, 3): 1,
    (2, 3, 1): 1,
    (3, 1, 2): 1,
    (1, 3, 2): -1,
    (3, 2, 1): -1,
    (2, 1, 3): -1,
}


def epsilon(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on {1,2,3}."""
    return _EPS_TABLE.get((i, j, k), 0)


def delta(i: int, j: int) -> int:
    return 1 if i == j else 0


DVar = tuple[int, int]  # (i, m) stands for the derivative E_i(v_m)


class AffineExpr:
    """A scalar of the form const + sum coeffs[(i,m)] * D_im.

    Pure arithmetic container; zero tests are the owning state's business, so
    coefficient dictionaries may carry explicit zeros.
    """

    __slots__ = ("const", "coeffs")

    def __init__(self, const, coeffs: Mapping[DVar, object] | None = None) -> None:
        self.const = const
        self.coeffs: dict[DVar, object] = dict(coeffs) if coeffs else {}

    def coeff(self, var: DVar, zero):
        return self.coeffs.get(var, zero)

    def __add__(self, other: "AffineExpr") -> "AffineExpr":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out[v] + c if v in out else c
        return AffineExpr(self.const + other.const, out)

    def __sub__(self, other: "AffineExpr") -> "AffineExpr":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out[v] - c if v in out else -c
        return AffineExpr(self.const - other.const, out)

    def scale(self, s) -> "AffineExpr":
        return AffineExpr(self.const * s, {v: c * s for v, c in self.coeffs.items()})

    def subst(self, var: DVar, expr: "AffineExpr") -> "AffineExpr":
        """Replace D_var by the affine expression expr."""
        if var not in self.coeffs:
            return self
        c = self.coeffs[var]
        rest = {v: k for v, k in self.coeffs.items() if v != var}
        return AffineExpr(self.const, rest) + expr.scale(c)

    def evaluate(self, assignment: Mapping[DVar, object], zero):
        val = self.const
        for v, c in self.coeffs.items():
            val = val + c * assignment.get(v, zero)
        return val

    def free_vars(self, is_zero: Callable[[object], bool]) -> list[DVar]:
        return sorted(v for v, c in self.coeffs.items() if not is_zero(c))

    def __repr__(self) -> str:
        terms = "".join(
            f" + ({c})*D{v}" for v, c in sorted(self.coeffs.items())
        )
        return f"AffineExpr({self.const}{terms})"


# ---------------------------------------------------------------------------
# states


class _StateCaches:
    """Lazy per-state tables shared by the exact and floating variants."""

    _h: dict | None
    _dh: dict | None
    _omega: dict | None

    def h_table(self) -> dict:
        if self._h is None:
            self._h = hijk_from_v([self.v[m] for m in AXES])
        return self._h

    def dh_table(self) -> dict:
        if self._dh is None:
            self._dh = hijk_gradient([self.v[m] for m in AXES])
        return self._dh

    def omega_table(self) -> dict:
        if self._omega is None:
            self._omega = omega_from_state(self)
        return self._omega


class FrameState(_StateCaches):
    """Exact frame state over Q(sqrt(3)).

    v entries are rationals; angles are exact circle points with
    theta3 = -theta1 - theta2 built in.  Construction rejects states where
    some sin(theta_a - theta_b) vanishes, since the connection components
    divide by those factors.
    """

    exact = True

    def __init__(self, v: Sequence[Fraction], theta1: CirclePoint, theta2: CirclePoint) -> None:
        self.v = {m: Fraction(v[m - 1]) for m in AXES}
        theta3 = angle_add(theta1, theta2).conjugate()
        self.angles = {1: theta1, 2: theta2, 3: theta3}
        self._diffs: dict[tuple[int, int], CirclePoint] = {}
        for a, b in product(AXES, AXES):
            self._diffs[(a, b)] = angle_sub(self.angles[a], self.angles[b])
        if any(self._diffs[(a, b)].s == 0 for a in AXES for b in AXES if a < b):
            raise ValueError("state rejected: some sin(theta_a - theta_b) vanishes")
        self._h = self._dh = self._omega = None

    # ring interface -------------------------------------------------------
    zero = Fraction(0)
    one = Fraction(1)
    third = Fraction(1, 3)
    sigma = QSqrt3(0, Fraction(1, 6))  # 1/(2*sqrt(3))
    inv_sqrt3 = QSqrt3(0, Fraction(1, 3))

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    # angle data -----------------------------------------------------------
    def sin(self, a: int, b: int) -> Fraction:
        return self._diffs[(a, b)].s

    def cos(self, a: int, b: int) -> Fraction:
        return self._diffs[(a, b)].c

    def cot(self, a: int, b: int) -> Fraction:
        d = self._diffs[(a, b)]
        return d.c / d.s

    def sin2(self, a: int, b: int) -> Fraction:
        d = self._diffs[(a, b)]
        return 2 * d.s * d.c

    @property
    def ec_value(self) -> Fraction:
        return 4 * self.v[1] ** 2 - 3 * (self.v[2] ** 2 + self.v[3] ** 2)

    def describe(self) -> dict:
        return {
            "v": [self.v[m] for m in AXES],
            "theta1": self.angles[1],
            "theta2": self.angles[2],
        }


class FloatFrameState(_StateCaches):
    """High-precision floating state (mpmath) mirroring FrameState.

    Used only where a constraint ties v and theta transcendentally, so exact
    circle points cannot parametrize the variety.
    """

    exact = False

    def __init__(
        self,
        v: Sequence[float],
        theta1,
        theta2,
        sin_margin: float = 1e-3,
        zero_tol: float = 1e-30,
    ) -> None:
        self.v = {m: mp.mpf(v[m - 1]) for m in AXES}
        t1, t2 = mp.mpf(theta1), mp.mpf(theta2)
        t3 = -t1 - t2
        self.thetas = {1: t1, 2: t2, 3: t3}
        self.zero_tol = zero_tol
        self._s = {}
        self._c = {}
        for a, b in product(AXES, AXES):
            d = self.thetas[a] - self.thetas[b]
            self._s[(a, b)] = mp.sin(d)
            self._c[(a, b)] = mp.cos(d)
        if any(abs(self._s[(a, b)]) < sin_margin for a in AXES for b in AXES if a < b):
            raise ValueError("state rejected: sin(theta_a - theta_b) below margin")
        self.zero = mp.mpf(0)
        self.one = mp.mpf(1)
        self.third = mp.mpf(1) / 3
        self.sigma = 1 / (2 * mp.sqrt(3))
        self.inv_sqrt3 = 1 / mp.sqrt(3)
        self._h = self._dh = self._omega = None

    def is_zero(self, x) -> bool:
        return abs(x) < self.zero_tol

    def sin(self, a: int, b: int):
        return self._s[(a, b)]

    def cos(self, a: int, b: int):
        return self._c[(a, b)]

    def cot(self, a: int, b: int):
        return self._c[(a, b)] / self._s[(a, b)]

    def sin2(self, a: int, b: int):
        return 2 * self._s[(a, b)] * self._c[(a, b)]

    @property
    def ec_value(self):
        return 4 * self.v[1] ** 2 - 3 * (self.v[2] ** 2 + self.v[3] ** 2)


def random_frame_state(
    rng: random.Random,
    require_ec: bool = True,
    nonzero: Iterable[int] = (),
    zero: Iterable[int] = (),
    max_attempts: int = 500,
) -> FrameState:
    """Draw a valid exact state with small random rationals.

    Components listed in `zero` are pinned to 0; those in `nonzero` are
    redrawn until nonzero.  States violating the validity constraints (or the
    4v1^2 - 3(v2^2+v3^2) != 0 condition, when required) are rejected and
    resampled.
    """
    zero = set(zero)
    nonzero = set(nonzero)
    for _ in range(max_attempts):
        v = []
        for m in AXES:
            if m in zero:
                v.append(Fraction(0))
                continue
            val = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            while m in nonzero and val == 0:
                val = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
            v.append(val)
        t1 = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        t2 = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        try:
            st = FrameState(v, rat_circle_point(t1), rat_circle_point(t2))
        except ValueError:
            continue
        if require_ec and st.ec_value == 0:
            continue
        return st
    raise RuntimeError("could not sample a valid frame state")


# ---------------------------------------------------------------------------
# component tables


def hijk_from_v(v: Sequence) -> dict[tuple[int, int, int], object]:
    """Second fundamental form components from the vector field components.

    h_ij^k = |v|^2 (v_i d_jk + v_j d_ki + v_k d_ij) - 5 v_i v_j v_k.
    Fully symmetric and trace-free in every slot.
    """
    vv = {m: v[m - 1] for m in AXES}
    v2 = vv[1] * vv[1] + vv[2] * vv[2] + vv[3] * vv[3]
    out = {}
    for i, j, k in product(AXES, AXES, AXES):
        out[(i, j, k)] = (
            v2 * (vv[i] * delta(j, k) + vv[j] * delta(k, i) + vv[k] * delta(i, j))
            - 5 * vv[i] * vv[j] * vv[k]
        )
    return out


def hijk_from_cubic_contraction(v: Sequence) -> dict[tuple[int, int, int], object]:
    """Independent construction of the same components.

    Contracts h(X,Y) = g(V,V)(g(Y,V)JX + g(X,V)JY + g(X,Y)JV) - 5g(X,V)g(Y,V)JV
    against an abstract orthonormal frame, using only g(E_i, V) = v_i,
    g(E_i, E_j) = d_ij and g(JE_a, JE_b) = d_ab.
    """
    vv = {m: v[m - 1] for m in AXES}
    gvv = sum(vv[m] * vv[m] for m in AXES)
    out = {}
    for i, j in product(AXES, AXES):
        # h(E_i, E_j) expanded in the JE_k basis
        for k in AXES:
            val = gvv * (
                vv[j] * delta(i, k) + vv[i] * delta(j, k) + delta(i, j) * vv[k]
            ) - 5 * vv[i] * vv[j] * vv[k]
            out[(i, j, k)] = val
    return out


def hijk_gradient(v: Sequence) -> dict[tuple[int, int, int, int], object]:
    """Partial derivatives: entry (j,k,l,m) is d h_jk^l / d v_m."""
    vv = {m: v[m - 1] for m in AXES}
    v2 = vv[1] * vv[1] + vv[2] * vv[2] + vv[3] * vv[3]
    out = {}
    for j, k, l, m in product(AXES, AXES, AXES, AXES):
        out[(j, k, l, m)] = (
            2 * vv[m] * (vv[j] * delta(k, l) + vv[k] * delta(l, j) + vv[l] * delta(j, k))
            + v2
            * (
                delta(j, m) * delta(k, l)
                + delta(k, m) * delta(l, j)
                + delta(l, m) * delta(j, k)
            )
            - 5
            * (
                delta(j, m) * vv[k] * vv[l]
                + vv[j] * delta(k, m) * vv[l]
                + vv[j] * vv[k] * delta(l, m)
            )
        )
    return out


def omega_from_state(st) -> dict[tuple[int, int, int], object]:
    """Connection components omega_ij^k of the induced metric.

    The nine displayed formulas determine everything through the skew
    symmetry omega_ij^k = -omega_ik^j (and omega_ij^j = 0).
    """
    v1, v2, v3 = st.v[1], st.v[2], st.v[3]
    q1, q2, q3 = v1 * v1, v2 * v2, v3 * v3
    five_v = 5 * v1 * v2 * v3
    displays = {
        (1, 1, 2): -v2 * (-4 * q1 + q2 + q3) * st.cot(1, 2),
        (1, 1, 3): -v3 * (-4 * q1 + q2 + q3) * st.cot(1, 3),
        (2, 2, 1): -v1 * (q1 - 4 * q2 + q3) * st.cot(2, 1),
        (2, 2, 3): -v3 * (q1 - 4 * q2 + q3) * st.cot(2, 3),
        (3, 3, 1): -v1 * (q1 + q2 - 4 * q3) * st.cot(3, 1),
        (3, 3, 2): -v2 * (q1 + q2 - 4 * q3) * st.cot(3, 2),
        (1, 2, 3): st.sigma + five_v * st.cot(2, 3),
        (2, 3, 1): st.sigma + five_v * st.cot(3, 1),
        (3, 1, 2): st.sigma + five_v * st.cot(1, 2),
    }
    out = {}
    for i, j, k in product(AXES, AXES, AXES):
        if j == k:
            out[(i, j, k)] = st.zero
        elif (i, j, k) in displays:
            out[(i, j, k)] = displays[(i, j, k)]
        else:
            out[(i, j, k)] = -displays[(i, k, j)]
    return out


# ---------------------------------------------------------------------------
# Codazzi components


def codazzi_scalar(
    st, i: int, j: int, k: int, l: int, vanishing: frozenset[int] = frozenset()
) -> AffineExpr:
    """JE_l-component of the antisymmetrized Codazzi equation on (E_i,E_j,E_k).

    Returns the scalar that must vanish, affine in the unknowns D_am.  The
    `vanishing` set lists components v_m assumed identically zero, whose
    derivatives D_am are then dropped as well.
    """
    h = st.h_table()
    dh = st.dh_table()
    om = st.omega_table()
    coeffs: dict[DVar, object] = {}
    for m in AXES:
        if m in vanishing:
            continue
        for a, c in ((i, dh[(j, k, l, m)]), (j, -dh[(i, k, l, m)])):
            coeffs[(a, m)] = coeffs.get((a, m), st.zero) + c
    const = st.zero
    for m in AXES:
        const = const + h[(j, k, m)] * (om[(i, m, l)] - st.inv_sqrt3 * epsilon(i, m, l))
        const = const - h[(i, k, m)] * (om[(j, m, l)] - st.inv_sqrt3 * epsilon(j, m, l))
        const = const - (om[(i, j, m)] - om[(j, i, m)]) * h[(m, k, l)]
        const = const - om[(i, k, m)] * h[(j, m, l)]
        const = const + om[(j, k, m)] * h[(i, m, l)]
    const = const - st.third * st.sin2(i, j) * (
        delta(j, k) * delta(i, l) + delta(i, k) * delta(j, l)
    )
    return AffineExpr(const, coeffs)


CANONICAL_PAIRS = ((1, 2), (1, 3), (2, 3))


def codazzi_components(
    st, vanishing: frozenset[int] = frozenset()
) -> dict[tuple[int, int, int, int], AffineExpr]:
    """All 27 independent antisymmetrized components, keyed (i,j,k,l), i<j."""
    out = {}
    for (i, j), k, l in product(CANONICAL_PAIRS, AXES, AXES):
        out[(i, j, k, l)] = codazzi_scalar(st, i, j, k, l, vanishing)
    return out


# ---------------------------------------------------------------------------
# linear solving


@dataclass
class SolveResult:
    """Outcome of exact elimination on a set of Codazzi rows.

    solutions: designated unknowns, as affine expressions in any never-pivoted
    variables (constants when the system determines them fully).
    extras: other variables the elimination had to resolve along the way.
    leftovers: fully substituted rows that no pivot consumed; these are the
    compatibility constraints of the system.
    """

    solutions: dict[DVar, AffineExpr]
    extras: dict[DVar, AffineExpr]
    leftovers: list[AffineExpr]
    rank: int
    n_rows: int
    free: list[DVar]


def solve_triple_system(
    st,
    triples: Sequence[tuple[int, int, int]],
    unknowns: Sequence[DVar],
    vanishing: frozenset[int] = frozenset(),
    free_vars: Sequence[DVar] = (),
) -> SolveResult:
    """Exact Gaussian elimination on the rows of the given Codazzi triples.

    Rows are the JE_l-components (l = 1,2,3) of each triple, in order.
    Variables not listed in `unknowns` but present in the rows are eliminated
    first, so the designated solutions never silently depend on them unless
    the system leaves them free.  Variables in `free_vars` are never pivoted;
    they survive as symbols in the returned expressions, which makes solution
    families comparable across different subsystems sharing a free unknown.
    """
    if st.is_zero(st.ec_value):
        raise ValueError("solve requires 4 v1^2 - 3 (v2^2 + v3^2) != 0")
    rows = []
    for (i, j, k) in triples:
        for l in AXES:
            rows.append(codazzi_scalar(st, i, j, k, l, vanishing))
    present: list[DVar] = sorted(
        {v for r in rows for v in r.free_vars(st.is_zero)}
    )
    designated = [u for u in unknowns]
    extra_vars = [v for v in present if v not in designated and v not in free_vars]

    defs: dict[DVar, AffineExpr] = {}
    order: list[DVar] = []
    active = list(rows)
    for var in extra_vars + designated:
        pivot_idx = None
        if st.exact:
            for idx, row in enumerate(active):
                if not st.is_zero(row.coeff(var, st.zero)):
                    pivot_idx = idx
                    break
        else:
            best = None
            for idx, row in enumerate(active):
                mag = abs(row.coeff(var, st.zero))
                if mag > st.zero_tol and (best is None or mag > best):
                    best, pivot_idx = mag, idx
        if pivot_idx is None:
            continue
        row = active.pop(pivot_idx)
        a = row.coeff(var, st.zero)
        rest = AffineExpr(row.const, {w: c for w, c in row.coeffs.items() if w != var})
        expr = rest.scale(-(st.one / a))
        defs[var] = expr
        order.append(var)
        active = [r.subst(var, expr) for r in active]

    final: dict[DVar, AffineExpr] = {}
    for var in reversed(order):
        e = defs[var]
        for w, we in final.items():
            e = e.subst(w, we)
        final[var] = e

    solved_set = set(order)
    return SolveResult(
        solutions={u: final[u] for u in designated if u in final},
        extras={v: final[v] for v in extra_vars if v in final},
        leftovers=active,
        rank=len(order),
        n_rows=len(rows),
        free=[u for u in designated if u not in solved_set],
    )


# ---------------------------------------------------------------------------
# the quartic bracket polynomials


def _quartic_brackets(v: Sequence) -> tuple:
    """The four bracketed quartics, in display order."""
    q1 = v[0] * v[0]
    q2 = v[1] * v[1]
    q3 = v[2] * v[2]
    b1 = 4 * q1 * q1 + q3 * q3 + 4 * q1 * q2 + 12 * q1 * q3 + q2 * q3
    b2 = 4 * q1 * q1 + 4 * q2 * q2 + 3 * q3 * q3 + 8 * q1 * q2 + 7 * q2 * q3
    b3 = 4 * q1 * q1 + 3 * q2 * q2 + 4 * q3 * q3 + 8 * q1 * q3 + 7 * q2 * q3
    b4 = 4 * q1 * q1 + q2 * q2 + 12 * q1 * q2 + 4 * q1 * q3 + q2 * q3
    return b1, b2, b3, b4


def compat_form_1(st):
    """F1: the first bracketed compatibility form (without the v1 v2 prefactor)."""
    b1, b2, _, _ = _quartic_brackets([st.v[m] for m in AXES])
    return b1 * st.sin2(1, 2) - b2 * st.sin2(1, 3)


def compat_form_2(st):
    """F2: the second bracketed compatibility form (without the v1 v3 prefactor)."""
    _, _, b3, b4 = _quartic_brackets([st.v[m] for m in AXES])
    return b3 * st.sin2(1, 2) - b4 * st.sin2(1, 3)


def system2_coefficients(v: Sequence) -> list[list]:
    """Coefficient matrix of the angle-sine system in the last case.

    Rows pair with (sin 2(theta1-theta2), sin 2(theta1-theta3)); the second
    column carries the displayed minus signs.
    """
    b1, b2, b3, b4 = _quartic_brackets(v)
    return [[b1, -b2], [b3, -b4]]


def det_product_form(v: Sequence):
    """The factored determinant: 4(v2^2+v3^2)|v|^2(2v1^2+v2^2+v3^2)(4v1^2-3(v2^2+v3^2))."""
    q1 = v[0] * v[0]
    q2 = v[1] * v[1]
    q3 = v[2] * v[2]
    return 4 * (q2 + q3) * (q1 + q2 + q3) * (2 * q1 + q2 + q3) * (4 * q1 - 3 * (q2 + q3))


# ---------------------------------------------------------------------------
# derivative unknowns as a first-class object


class DerivativeUnknowns:
    """The 3x3 matrix of indeterminates D_im standing for E_i(v_m).

    Entries are affine expressions; the default instance carries pure
    indeterminates, and `pinned` produces one with some entries fixed to
    scalar values (used to evaluate Codazzi components at a solved state).
    """

    def __init__(self, entries: Mapping[DVar, AffineExpr] | None = None) -> None:
        self.entries: dict[DVar, AffineExpr] = dict(entries) if entries else {}

    @classmethod
    def indeterminate(cls) -> "DerivativeUnknowns":
        return cls()

    @classmethod
    def pinned(cls, values: Mapping[DVar, object]) -> "DerivativeUnknowns":
        out = {}
        for var, val in values.items():
            out[var] = val if isinstance(val, AffineExpr) else AffineExpr(val)
        return cls(out)

    def apply(self, expr: AffineExpr) -> AffineExpr:
        for var, sub in self.entries.items():
            expr = expr.subst(var, sub)
        return expr


def _rational(x) -> Fraction:
    """Coerce a rational-valued scalar that may be carried as QSqrt3."""
    if isinstance(x, QSqrt3):
        if x.b != 0:
            raise ValueError(f"not rational: {x}")
        return x.a
    return Fraction(x)


# ---------------------------------------------------------------------------
# verification checks


def frame_relation_check(trials: int = 120, seed: int = 0) -> CheckRecord:
    """h_ij^k cos(th_j - th_k) = (eps_ijk/(2 sqrt 3) - omega_ij^k) sin(th_j - th_k).

    Exact identity linking the cubic-form components and the connection
    components, for all i and all j != k, at random valid states.
    """
    rng = random.Random(seed)
    failures = []
    for n in range(trials):
        st = random_frame_state(rng, require_ec=False)
        h = st.h_table()
        om = st.omega_table()
        for i, j, k in product(AXES, AXES, AXES):
            if j == k:
                continue
            lhs = h[(i, j, k)] * st.cos(j, k)
            rhs = (st.sigma * epsilon(i, j, k) - om[(i, j, k)]) * st.sin(j, k)
            if lhs - rhs != 0:
                failures.append({"state": st.describe(), "index": (i, j, k)})
    return CheckRecord(
        check_id="frame-relation",
        passed=not failures,
        samples=trials,
        details={"identities_per_state": 18},
        failures=failures[:5],
    )


SET1_TRIPLES = tuple((1, 2, k) for k in AXES)
SET2_TRIPLES = tuple((1, 3, k) for k in AXES)
SET1_UNKNOWNS = ((2, 1), (1, 2), (2, 2), (1, 3), (2, 3))
SET2_UNKNOWNS = ((3, 1), (1, 2), (3, 2), (1, 3), (3, 3))
SHARED_FREE = ((1, 1),)


def system1_check(seed: int = 0, trials: int = 100) -> CheckRecord:
    """Compare the two overlapping derivative solves and their compatibility.

    Both nine-row systems (triples (1,2,k) and (1,3,k)) are solved for the
    five derivatives each determines, keeping the shared unknown D_11 as a
    free symbol.  The differences of the shared solutions D_12 and D_13 are
    then honest scalars; each vanishes exactly when the corresponding product
    v1 v2 F1 (resp. v1 v3 F2) does, and the clearing factor
    product / (difference * |v|^6 * (4v1^2 - 3(v2^2+v3^2))) is a single
    rational constant, discovered at the first sample and reconfirmed at all
    others.
    """
    rng = random.Random(seed)
    failures = []
    snapshot: dict[str, Fraction] = {}
    kinds = {"generic": 0, "v1=0": 0, "v2=0": 0, "v3=0": 0}
    d11_dependent = 0
    for n in range(trials):
        r = n % 5
        if r == 2:
            kind, kw = "v1=0", dict(zero=(1,), nonzero=(2, 3))
        elif r == 3:
            kind, kw = "v2=0", dict(zero=(2,), nonzero=(1, 3))
        elif r == 4:
            kind, kw = "v3=0", dict(zero=(3,), nonzero=(1, 2))
        else:
            kind, kw = "generic", dict(nonzero=(1, 2, 3))
        kinds[kind] += 1
        st = random_frame_state(rng, require_ec=True, **kw)
        res1 = solve_triple_system(st, SET1_TRIPLES, SET1_UNKNOWNS, free_vars=SHARED_FREE)
        res2 = solve_triple_system(st, SET2_TRIPLES, SET2_UNKNOWNS, free_vars=SHARED_FREE)

        def fail(reason, extra=None):
            failures.append({"state": st.describe(), "reason": reason, "extra": extra})

        if res1.free or res2.free:
            fail("singular subsystem", {"free1": res1.free, "free2": res2.free})
            continue
        stray = [
            x for res in (res1, res2) for x in res.leftovers
            if x.const != 0 or any(c != 0 for c in x.coeffs.values())
        ]
        if stray:
            fail("nonzero leftover constraint", repr(stray[0]))
            continue
        if any(
            e.coeffs.get(SHARED_FREE[0], Fraction(0)) != 0
            for res in (res1, res2) for e in res.solutions.values()
        ):
            d11_dependent += 1

        w = st.v[1] ** 2 + st.v[2] ** 2 + st.v[3] ** 2
        norm = w ** 3 * st.ec_value
        pairs = (
            ("K2", (1, 2), st.v[1] * st.v[2] * compat_form_1(st)),
            ("K3", (1, 3), st.v[1] * st.v[3] * compat_form_2(st)),
        )
        for label, var, prod in pairs:
            diff = res1.solutions[var] - res2.solutions[var]
            if any(c != 0 for c in diff.coeffs.values()):
                fail("difference not gauge-free", {"var": var})
                continue
            gap = diff.const
            if (gap == 0) != (prod == 0):
                fail("vanishing mismatch", {"var": var, "gap_zero": gap == 0})
                continue
            if prod == 0:
                continue
            try:
                ratio = _rational(prod / (gap * norm))
            except ValueError:
                fail("irrational clearing ratio", {"var": var})
                continue
            if label not in snapshot:
                snapshot[label] = ratio
            elif snapshot[label] != ratio:
                fail("clearing factor drift", {"var": var, "seen": str(ratio)})
    details = {
        "kinds": kinds,
        "clearing_factors": {
            k: f"({v}) * |v|^6 * (4 v1^2 - 3 (v2^2 + v3^2))" for k, v in snapshot.items()
        },
        "solutions_depending_on_D11": d11_dependent,
        "designated_rank": 5,
    }
    return CheckRecord(
        check_id="derivative-comparison",
        passed=not failures,
        samples=trials,
        details=details,
        failures=failures[:5],
    )


def _fit_polynomial(nodes: Sequence[Fraction], values: Sequence) -> list:
    """Exact coefficients (ascending degree) through the given points."""
    n = len(nodes)
    rows = [[Fraction(x) ** p for p in range(n)] for x in nodes]
    vals = list(values)
    # forward elimination
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        vals[col], vals[piv] = vals[piv], vals[col]
        for r in range(col + 1, n):
            f = rows[r][col] / rows[col][col]
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
            vals[r] = vals[r] - vals[col] * f
    coeffs = [None] * n
    for r in range(n - 1, -1, -1):
        acc = vals[r]
        for c in range(r + 1, n):
            acc = acc - coeffs[c] * rows[r][c]
        coeffs[r] = acc * (Fraction(1) / rows[r][r])
    return coeffs


def _sign_of(x) -> int:
    if isinstance(x, QSqrt3):
        return x.sign()
    return (x > 0) - (x < 0)


def case1_check(seed: int = 0, trials: int = 60) -> CheckRecord:
    """The case v2 = v3 = 0: the leftover constraint forces v1 = 0.

    Eliminating the derivative unknowns from the (E1,E2,E1) components leaves
    one constraint; as a polynomial in v1 it is an odd cubic with a nonzero
    leading coefficient and no sign change, so its only real root is v1 = 0.
    """
    rng = random.Random(seed)
    failures = []
    vanishing = frozenset({2, 3})
    nodes = [Fraction(k) for k in (1, 2, 3, 4)]
    for n in range(trials):
        st0 = random_frame_state(rng, require_ec=False, zero=(2, 3))

        def leftover_at(v1: Fraction):
            st = FrameState([v1, Fraction(0), Fraction(0)], st0.angles[1], st0.angles[2])
            res = solve_triple_system(st, [(1, 2, 1)], [(2, 1), (1, 1)], vanishing)
            if len(res.leftovers) != 1 or any(
                c != 0 for c in res.leftovers[0].coeffs.values()
            ):
                raise AssertionError("unexpected elimination shape")
            d21 = res.solutions[(2, 1)]
            if d21.const != 0 or any(c != 0 for c in d21.coeffs.values()):
                raise AssertionError("D_21 not forced to zero")
            return res.leftovers[0].const

        def fail(reason, extra=None):
            failures.append({"angles": {k: st0.angles[k] for k in (1, 2)},
                             "reason": reason, "extra": extra})

        try:
            vals = [leftover_at(x) for x in nodes]
            c = _fit_polynomial(nodes, vals)
            probe_node = Fraction(5)
            predicted = sum((co * probe_node ** p for p, co in enumerate(c)),
                            start=Fraction(0))
            actual = leftover_at(probe_node)
        except AssertionError as e:
            fail(str(e))
            continue
        if predicted - actual != 0:
            fail("degree exceeds 3")
            continue
        c0, c1, c2, c3 = c
        if c0 != 0 or c2 != 0:
            fail("constraint polynomial not odd", {"c0": c0, "c2": c2})
            continue
        if c1 == 0 and c3 == 0:
            fail("constraint polynomial identically zero")
            continue
        # odd cubic c3 v^3 + c1 v: nonzero real roots need c1/c3 < 0
        if c3 != 0 and c1 != 0 and _sign_of(c1) * _sign_of(c3) < 0:
            fail("constraint admits nonzero roots", {"c1": c1, "c3": c3})
            continue
        expected_cubic = QSqrt3(0, Fraction(-1, 3))
        if c3 - expected_cubic != 0 or c1 != 0:
            fail("unexpected coefficients", {"c1": c1, "c3": c3})
    return CheckRecord(
        check_id="axis-case",
        passed=not failures,
        samples=trials,
        details={"constraint": "(-1/sqrt(3)) v1^3 = 0", "nodes": [str(x) for x in nodes]},
        failures=failures[:5],
    )


def _case2_displays(st) -> tuple[AffineExpr, AffineExpr]:
    """The displayed pair of conditions on x = E_1(v_3) for the case v1 = 0."""
    v2, v3 = st.v[2], st.v[3]
    q2, q3 = v2 * v2, v3 * v3
    x = (1, 3)
    first = AffineExpr(
        v3 * (3 * q2 ** 2 - q2 * q3 + q3 ** 2),
        {x: QSqrt3(0, 15) * q2 * v2 * v3},
    )
    second = AffineExpr(
        v2 * (3 * q2 ** 2 - 3 * q2 * q3 + 4 * q3 ** 2),
        {x: QSqrt3(0, 3) * (4 * q2 ** 2 - 7 * q2 * q3 - q3 ** 2)},
    )
    return first, second


def case2_resultant(v2, v3):
    """Eliminant of the displayed pair: nonzero whenever v2 v3 != 0."""
    q2, q3 = v2 * v2, v3 * v3
    return QSqrt3(0, -3) * v3 * (
        q3 ** 4 + 6 * q2 * q3 ** 3 + 12 * q2 ** 2 * q3 ** 2 + 10 * q2 ** 3 * q3 + 3 * q2 ** 4
    )


def case2_check(seed: int = 0, trials: int = 60) -> CheckRecord:
    """The case v1 = 0: the two substituted conditions are incompatible.

    Solves the (E1,E2,E1) components for E2(v3), E1(v2), E2(v2) in terms of
    the free unknown x = E1(v3), substitutes into the (E1,E2,E2) components,
    and verifies each resulting row is the corresponding displayed condition
    times the clearing factor 2/(sqrt(3)(3 v2^2 + v3^2)) (second row: -1/2 of
    that).  Eliminating x from the displayed pair leaves a polynomial that
    cannot vanish while v2 v3 != 0, so the case forces v2 = v3 = 0.
    """
    rng = random.Random(seed)
    failures = []
    vanishing = frozenset({1})
    unknowns = [(2, 3), (1, 2), (2, 2), (1, 3)]
    x = (1, 3)
    sqrt3 = QSqrt3(0, 1)
    for n in range(trials):
        st = random_frame_state(rng, require_ec=True, zero=(1,), nonzero=(2, 3))

        def fail(reason, extra=None):
            failures.append({"state": st.describe(), "reason": reason, "extra": extra})

        res = solve_triple_system(st, [(1, 2, 1)], unknowns, vanishing)
        if res.free != [x] or res.leftovers:
            fail("unexpected solve shape", {"free": res.free, "leftovers": len(res.leftovers)})
            continue
        rows = []
        for l in AXES:
            e = codazzi_scalar(st, 1, 2, 2, l, vanishing)
            for var, expr in res.solutions.items():
                e = e.subst(var, expr)
            rows.append(e)
        if rows[0].const != 0 or any(c != 0 for c in rows[0].coeffs.values()):
            fail("first substituted row does not vanish")
            continue
        first, second = _case2_displays(st)
        q2, q3 = st.v[2] ** 2, st.v[3] ** 2
        clear = sqrt3 * (3 * q2 + q3)
        checks = (
            (rows[1].scale(clear) - first.scale(2), "first display"),
            (rows[2].scale(clear) - second.scale(-1), "second display"),
        )
        bad = False
        for diffed, label in checks:
            if diffed.const != 0 or any(c != 0 for c in diffed.coeffs.values()):
                fail("clearing factor mismatch", label)
                bad = True
        if bad:
            continue
        resultant = first.const * second.coeff(x, st.zero) - second.const * first.coeff(x, st.zero)
        if resultant - case2_resultant(st.v[2], st.v[3]) != 0:
            fail("eliminant closed form mismatch")
            continue
        if resultant == 0:
            fail("displayed pair unexpectedly compatible")
    return CheckRecord(
        check_id="null-axis-case",
        passed=not failures,
        samples=trials,
        details={"clearing_factor": "2 / (sqrt(3) (3 v2^2 + v3^2))",
                 "second_row_scale": "-1/2"},
        failures=failures[:5],
    )


def case3_closed_forms(v1, v3):
    """The two derivative values pinned in the constrained-angle case."""
    q1, q3 = v1 * v1, v3 * v3
    denom = 3 * mp.sqrt(3) * (8 * q1 ** 2 + 6 * q1 * q3 + 3 * q3 ** 2)
    d23 = v1 * (6 * q1 ** 2 + 5 * q1 * q3 + 4 * q3 ** 2) / denom
    d21 = -v3 * (10 * q1 ** 2 + 8 * q1 * q3 + 3 * q3 ** 2) / denom
    return d23, d21


def constrained_theta2(v1, v3, theta1):
    """Solve the angle constraint of the v2 = 0 case in closed form.

    With theta3 = -theta1 - theta2, the constraint
    (v1^2+v3^2) sin 2(theta1-theta2) = v1^2 sin 2(theta1-theta3)
    is linear in (sin 2theta2, cos 2theta2), so theta2 comes from atan2.
    """
    q1, q3 = v1 * v1, v3 * v3
    num = (q1 + q3) * mp.sin(2 * theta1) - q1 * mp.sin(4 * theta1)
    den = (q1 + q3) * mp.cos(2 * theta1) + q1 * mp.cos(4 * theta1)
    return mp.atan2(num, den) / 2


def case3_check(trials: int = 60, tol: float = 1e-8, seed: int = 0) -> CheckRecord:
    """The case v2 = 0 with the angle constraint: forced back to v = 0.

    Numeric check on the constraint variety (it couples v and theta
    transcendentally, so exact circle points cannot parametrize it).  At each
    sample the six components for the triples (E1,E2,E1), (E1,E2,E2) pin four
    derivatives; the two displayed closed forms are matched to tol, and the
    (E1,E2,E3) components then leave a residual proportional to
    v3 (v1^2 + v3^2), nonzero away from v3 = 0.  A companion branch with
    v3 = 0 (where the constraint cannot bind, so angles are free) checks the
    immediate constant obstruction -v1^3/sqrt(3) instead.
    """
    rng = random.Random(seed)
    failures = []
    skipped = 0
    max_residual = 0.0
    min_forcing_ratio = None
    vanishing = frozenset({2})
    unknowns = [(1, 1), (1, 3), (2, 1), (2, 3)]
    with mp.workdps(50):
        margin = mp.mpf("1e-3")
        for n in range(trials):
            v1 = mp.mpf(rng.randint(30, 150)) / 100
            v3 = mp.mpf(rng.randint(30, 150)) / 100
            th1 = mp.mpf(rng.randint(5, 70)) / 100
            if abs(4 * v1 ** 2 - 3 * v3 ** 2) < mp.mpf("0.05"):
                skipped += 1
                continue
            th2 = constrained_theta2(v1, v3, th1)
            try:
                st = FloatFrameState([v1, 0, v3], th1, th2, sin_margin=margin)
            except ValueError:
                skipped += 1
                continue

            def fail(reason, extra=None):
                failures.append({"v": [float(v1), 0.0, float(v3)],
                                 "theta1": float(th1), "reason": reason,
                                 "extra": extra})

            q1, q3 = v1 * v1, v3 * v3
            constraint = (q1 + q3) * st.sin2(1, 2) - q1 * st.sin2(1, 3)
            if abs(constraint) > mp.mpf("1e-40"):
                fail("constraint residual too large", float(constraint))
                continue
            res = solve_triple_system(st, [(1, 2, 1), (1, 2, 2)], unknowns, vanishing)
            if res.free:
                fail("derivatives not pinned", res.free)
                continue
            d23, d21 = case3_closed_forms(v1, v3)
            got23 = res.solutions[(2, 3)].const
            got21 = res.solutions[(2, 1)].const
            err = max(abs(got23 - d23), abs(got21 - d21))
            max_residual = max(max_residual, float(err))
            if err > tol:
                fail("closed form mismatch", {"err": float(err)})
                continue
            pinned = DerivativeUnknowns.pinned(
                {var: expr.const for var, expr in res.solutions.items()}
            )
            resid = mp.mpf(0)
            for l in AXES:
                e = pinned.apply(codazzi_scalar(st, 1, 2, 3, l, vanishing))
                if e.coeffs and any(abs(c) > st.zero_tol for c in e.coeffs.values()):
                    fail("unresolved unknowns in final components")
                    break
                resid = max(resid, abs(e.const))
            else:
                forcing = abs(v3) * (q1 + q3)
                ratio = float(resid / forcing)
                min_forcing_ratio = ratio if min_forcing_ratio is None else min(min_forcing_ratio, ratio)
                if resid < mp.mpf("0.02") * forcing:
                    fail("final components fail to force v3 (v1^2+v3^2) = 0",
                         {"residual": float(resid), "forcing_scale": float(forcing)})
        # companion branch: v3 = 0 exactly.  The angle constraint cannot bind
        # there for a valid frame (it would force sin(theta2 - theta3) = 0),
        # so the angles are free and the obstruction is immediate.
        companion_ok = 0
        companion_total = 12
        for n in range(companion_total):
            v1 = mp.mpf(rng.randint(30, 150)) / 100
            st = None
            for _ in range(20):
                th1 = mp.mpf(rng.randint(-140, 140)) / 100
                th2 = mp.mpf(rng.randint(-140, 140)) / 100
                try:
                    st = FloatFrameState([v1, 0, 0], th1, th2, sin_margin=margin)
                    break
                except ValueError:
                    continue
            if st is None:
                skipped += 1
                continue
            res = solve_triple_system(st, [(1, 2, 1)], [(2, 1), (1, 1)], frozenset({2, 3}))
            if len(res.leftovers) != 1 or any(
                abs(c) > st.zero_tol for c in res.leftovers[0].coeffs.values()
            ):
                failures.append({"reason": "companion elimination shape"})
                continue
            leftover = res.leftovers[0].const
            expected = -v1 ** 3 / mp.sqrt(3)
            if abs(leftover - expected) > tol or abs(leftover) < mp.mpf("0.01"):
                failures.append({"reason": "companion obstruction mismatch",
                                 "leftover": float(leftover), "v1": float(v1)})
                continue
            companion_ok += 1
    return CheckRecord(
        check_id="constrained-angle-case",
        passed=not failures,
        samples=trials,
        skipped=skipped,
        tolerance=tol,
        max_residual=max_residual,
        details={"min_forcing_ratio": min_forcing_ratio,
                 "companion_v3_zero_samples": companion_ok},
        failures=failures[:5],
    )


def det_factorization_check(seed: int = 0, trials: int = 120) -> CheckRecord:
    """Determinant of the angle-sine system factors into the displayed product.

    Verified as an exact polynomial identity in (v1, v2, v3) via random
    evaluation, using the bracket convention det = b1 b4 - b2 b3 (the matrix
    [[b1, -b2], [b3, -b4]] has determinant of the opposite sign).  Given
    4v1^2 - 3(v2^2+v3^2) != 0, the product vanishes only at v2 = v3 = 0.
    """

    def bracket_det(v):
        b1, b2, b3, b4 = _quartic_brackets(v)
        return b1 * b4 - b2 * b3

    identity_ok = poly_identity_check(
        bracket_det, det_product_form, n_vars=3, trials=trials, seed=seed
    )
    rng = random.Random(seed + 1)
    failures = []
    if not identity_ok:
        failures.append({"reason": "polynomial identity failed"})
    for n in range(trials):
        st = random_frame_state(rng, require_ec=True)
        if st.v[2] == 0 and st.v[3] == 0:
            continue
        if bracket_det([st.v[m] for m in AXES]) == 0:
            failures.append({"state": st.describe(),
                             "reason": "determinant vanished off v2=v3=0"})
    # the angle conclusion when the determinant is nonzero: both doubled
    # angle differences are multiples of pi/2, and among k1, k2, k3 = k2 - k1
    # at least one is even, so two angle functions agree modulo pi
    parity_ok = all(
        (k1 % 2 == 0) or (k2 % 2 == 0) or ((k2 - k1) % 2 == 0)
        for k1, k2 in product(range(2), range(2))
    )
    if not parity_ok:
        failures.append({"reason": "angle parity argument failed"})
    return CheckRecord(
        check_id="determinant-factorization",
        passed=not failures,
        samples=trials,
        details={"sign_convention": "det = b1 b4 - b2 b3 = -(matrix determinant)",
                 "nonvanishing_given_constraint": True,
                 "angle_parity": parity_ok},
        failures=failures[:5],
    )
