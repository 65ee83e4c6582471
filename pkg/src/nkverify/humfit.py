"""H-umbilicity detection for cubic second-fundamental-form tensors.

A Lagrangian submanifold here carries its second fundamental form as a fully
symmetric cubic tensor c_abc = g(h(E_a, E_b), J E_c).  This module decides
whether such a tensor matches the H-umbilical normal form (one distinguished
unit direction U1 with h(U1,U1) = lambda J U1 and mu on the orthogonal
complement), checks that a totally umbilical shape operator forces h = 0, and
runs the totally-geodesic harness over example immersions.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

import numpy as np

from .lagrangian import Immersion, is_lagrangian, second_fundamental_form
from .report import CheckRecord

#: Ten independent slots of a symmetric cubic tensor on R^3, ascending indices.
COMPONENT_KEYS = ("111", "112", "113", "122", "123", "133", "222", "223", "233", "333")

_KEY_TUPLES = tuple(tuple(int(ch) - 1 for ch in key) for key in COMPONENT_KEYS)

#: Default acceptance tolerance of the fitter, a guard factor below the
#: analyzer's h accuracy of 1e-5 so the fit is never stricter than its data.
FIT_TOL = 1e-6


@dataclass(frozen=True)
class CubicTensor:
    """Fully symmetric cubic tensor, stored by its ten independent components.

    Components are exact rationals so that algebraic identities (the three
    vanishing traces of a minimal form, for instance) survive construction.
    """

    components: tuple[Fraction, ...]
    n: int = 3

    def __post_init__(self) -> None:
        if len(self.components) != len(COMPONENT_KEYS):
            raise ValueError("expected the ten independent components")

    @classmethod
    def from_components(cls, mapping: dict) -> "CubicTensor":
        missing = [k for k in COMPONENT_KEYS if k not in mapping]
        if missing:
            raise ValueError(f"missing components: {missing}")
        return cls(tuple(Fraction(mapping[k]) for k in COMPONENT_KEYS))

    @classmethod
    def from_full(cls, full: np.ndarray) -> "CubicTensor":
        """Exact symmetrization of a 3x3x3 array (permutations averaged)."""
        full = np.asarray(full, dtype=float)
        comps = []
        for idx in _KEY_TUPLES:
            vals = [Fraction(float(full[p])) for p in permutations(idx)]
            comps.append(sum(vals) / len(vals))
        return cls(tuple(comps))

    def as_full(self) -> np.ndarray:
        full = np.zeros((3, 3, 3))
        for idx, val in zip(_KEY_TUPLES, self.components):
            for p in permutations(idx):
                full[p] = float(val)
        return full

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_full()))

    def trace(self, b: int) -> Fraction:
        """sum_a c_aab, exact."""
        total = Fraction(0)
        for a in range(3):
            idx = tuple(sorted((a, a, b)))
            key = "".join(str(i + 1) for i in idx)
            total += self.components[COMPONENT_KEYS.index(key)]
        return total

    def to_json(self) -> str:
        comps = {k: float(v) for k, v in zip(COMPONENT_KEYS, self.components)}
        return json.dumps({"n": self.n, "components": comps}, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CubicTensor":
        payload = json.loads(text)
        if payload.get("n", 3) != 3:
            raise ValueError("only n = 3 tensors are supported by the fitter")
        return cls.from_components(payload["components"])


def symmetry_defect(full: np.ndarray) -> float:
    """Largest deviation of a 3x3x3 array from full symmetry."""
    full = np.asarray(full, dtype=float)
    worst = 0.0
    for axes in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        worst = max(worst, float(np.max(np.abs(full - full.transpose(axes)))))
    return worst


def build_h_from_V(V: Sequence) -> CubicTensor:
    """Cubic form of the minimal normal-form family driven by one vector:
    c_abc = |V|^2 (v_a d_bc + v_b d_ca + v_c d_ab) - 5 v_a v_b v_c.

    Equals the H-umbilical pattern with U1 = V/|V|, mu = |V|^3, lambda = -2 mu.
    """
    v = [Fraction(float(x)) for x in V]
    w = sum(x * x for x in v)
    comps = []
    for a, b, c in _KEY_TUPLES:
        val = w * (
            v[a] * (1 if b == c else 0)
            + v[b] * (1 if c == a else 0)
            + v[c] * (1 if a == b else 0)
        ) - 5 * v[a] * v[b] * v[c]
        comps.append(val)
    return CubicTensor(tuple(comps))


@dataclass(frozen=True)
class HUmbilicalFit:
    """Normal-form parameters recovered from a cubic tensor."""

    U1: np.ndarray
    lam: float
    mu: float
    residual: float

    @property
    def minimality_defect(self) -> float:
        """lambda + 2 mu; zero exactly when the fitted form is minimal."""
        return self.lam + 2.0 * self.mu


def _normalize(u: np.ndarray) -> np.ndarray:
    return u / np.linalg.norm(u)


def _cubic_value(full: np.ndarray, u: np.ndarray) -> float:
    return float(np.einsum("abc,a,b,c->", full, u, u, u))


def _pattern_pair(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal basis tensors of the normal form at direction u:
    T1 = u (x) u (x) u and T2 = the symmetrized u (x) (Id - u u^T)."""
    T1 = np.einsum("a,b,c->abc", u, u, u)
    P = np.eye(3) - np.outer(u, u)
    T2 = (
        np.einsum("a,bc->abc", u, P)
        + np.einsum("b,ac->abc", u, P)
        + np.einsum("c,ab->abc", u, P)
    )
    return T1, T2


def pattern_tensor(u: np.ndarray, lam: float, mu: float) -> np.ndarray:
    T1, T2 = _pattern_pair(_normalize(np.asarray(u, dtype=float)))
    return lam * T1 + mu * T2


def _least_squares(full: np.ndarray, u: np.ndarray) -> tuple[float, float, float]:
    T1, T2 = _pattern_pair(u)
    lam = float(np.sum(full * T1))  # T1 is unit and orthogonal to T2
    mu = float(np.sum(full * T2) / np.sum(T2 * T2))
    resid = float(np.linalg.norm(full - lam * T1 - mu * T2))
    return lam, mu, resid


def _ascend(full: np.ndarray, u: np.ndarray, max_iter: int = 200) -> np.ndarray:
    """Projected ascent on |c(u,u,u)| with backtracking line search."""
    step = 0.5
    for _ in range(max_iter):
        phi = _cubic_value(full, u)
        grad = 3.0 * np.einsum("abc,b,c->a", full, u, u)
        sign = 1.0 if phi >= 0 else -1.0
        g = sign * (grad - float(grad @ u) * u)
        gn = float(np.linalg.norm(g))
        if gn < 1e-12:
            break
        s, improved = step, False
        while s > 1e-18:
            cand = _normalize(u + s * g / gn)
            if abs(_cubic_value(full, cand)) > abs(phi):
                u, improved, step = cand, True, min(2 * s, 1.0)
                break
            s *= 0.5
        if not improved:
            break
    return u


def _newton_polish(full: np.ndarray, u: np.ndarray, max_iter: int = 12) -> np.ndarray:
    """Drive the spherical gradient of c(u,u,u) to machine zero.

    Backtracking stalls once |c| improvements drop below float resolution, so
    critical points are sharpened with Newton steps in tangent coordinates.
    """
    for _ in range(max_iter):
        grad = 3.0 * np.einsum("abc,b,c->a", full, u, u)
        rgrad = grad - float(grad @ u) * u
        if float(np.linalg.norm(rgrad)) < 1e-13:
            break
        basis = [v for v in np.eye(3) if abs(float(v @ u)) < 0.9][:2]
        P = np.stack([_normalize(b - float(b @ u) * u) for b in basis], axis=1)
        P[:, 1] = _normalize(P[:, 1] - float(P[:, 0] @ P[:, 1]) * P[:, 0])
        hess = 6.0 * np.einsum("abc,c->ab", full, u) - 3.0 * _cubic_value(full, u) * np.eye(3)
        H = P.T @ hess @ P
        try:
            d = np.linalg.solve(H, -(P.T @ grad))
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(d)) or float(np.linalg.norm(d)) > 0.5:
            break
        u = _normalize(u + P @ d)
    return u


def fit(h: CubicTensor, tol: float = FIT_TOL) -> HUmbilicalFit | None:
    """Recover the normal-form parameters of h, or reject.

    A tensor below the tolerance in norm fits trivially with lambda = mu = 0.
    Otherwise unit candidates maximizing |c(u,u,u)| are found by multi-start
    projected ascent (deterministic starts) with a Newton polish, the pair
    (lambda, mu) is solved by least squares at each candidate, and the best
    candidate is accepted only if its reconstruction residual beats tol.
    The sign convention keeps mu >= 0 (flipping U1 as needed), with a
    lexicographically positive U1 when mu = 0.
    """
    full = h.as_full()
    nrm = float(np.linalg.norm(full))
    if nrm < tol:
        return HUmbilicalFit(np.array([1.0, 0.0, 0.0]), 0.0, 0.0, nrm)
    rng = np.random.default_rng(161803)
    starts = [_normalize(rng.standard_normal(3)) for _ in range(16)]
    best: tuple[float, float, np.ndarray] | None = None
    for u0 in starts:
        u = _newton_polish(full, _ascend(full, u0))
        lam, mu, resid = _least_squares(full, u)
        key = (resid, -abs(_cubic_value(full, u)))
        if best is None or key < (best[0], best[1]):
            best = (resid, -abs(_cubic_value(full, u)), u)
    resid, _, u = best
    if resid >= tol:
        return None
    lam, mu, resid = _least_squares(full, u)
    if mu < 0:
        u, lam, mu = -u, -lam, -mu
    elif mu == 0:
        lead = next((x for x in u if x != 0), 1.0)
        if lead < 0:
            u = -u
    return HUmbilicalFit(u, lam, mu, resid)


def umbilical_cubic(n: int, xi: Sequence[float]) -> np.ndarray:
    """Cubic form of a totally umbilical shape operator, c_abc = d_ab xi_c."""
    xi = np.asarray(xi, dtype=float)
    c = np.zeros((n, n, n))
    for a in range(n):
        c[a, a, :] = xi
    return c


def _full_asymmetry(c: np.ndarray) -> float:
    worst = 0.0
    n = c.ndim
    for axes in permutations(range(n)):
        if axes == tuple(range(n)):
            continue
        worst = max(worst, float(np.max(np.abs(c - np.transpose(c, axes)))))
    return worst


def umbilical_lemma_check(n: int = 3, trials: int = 100, seed: int = 0) -> CheckRecord:
    """A totally umbilical cubic form is symmetric only for xi = 0.

    Hence a symmetric second fundamental form of this shape vanishes, which is
    the totally geodesic conclusion in the umbilical case.  The asymmetry of
    c_abc = d_ab xi_c equals the sup norm of xi, so unit vectors xi are
    rejected with margin at least 1/sqrt(n).
    """
    if n < 2:
        raise ValueError("the umbilical argument needs dimension at least 2")
    rng = random.Random(seed)
    floor = 1.0 / math.sqrt(n)
    min_asym = math.inf
    failures = []
    for t in range(trials):
        xi = np.array([rng.gauss(0.0, 1.0) for _ in range(n)])
        xi = xi / np.linalg.norm(xi)
        asym = _full_asymmetry(umbilical_cubic(n, xi))
        min_asym = min(min_asym, asym)
        if asym < floor * (1.0 - 1e-12):
            failures.append({"trial": t, "xi": xi.tolist(), "asymmetry": asym})
    zero_ok = _full_asymmetry(umbilical_cubic(n, np.zeros(n))) == 0.0
    if not zero_ok:
        failures.append({"trial": "xi=0", "asymmetry": "nonzero"})
    return CheckRecord(
        check_id=f"umbilical-rigidity[n={n}]",
        passed=not failures,
        samples=trials,
        details={"dimension": n, "min_asymmetry": min_asym, "margin_floor": floor},
        failures=failures,
    )


def theorem_harness(
    imm: Immersion,
    grid: int = 5,
    tol: float = 1e-5,
    fit_tol: float = FIT_TOL,
) -> CheckRecord:
    """Totally geodesic shadow of the rigidity theorem on one immersion.

    At every grid point the analyzer's cubic form is fed to the fitter; any
    point where an H-umbilical fit succeeds while ||h|| >= tol would be a
    falsification candidate, and is reported as a failure.
    """
    points = imm.domain.grid(grid)
    for u in points:
        chk = is_lagrangian(imm, u)
        if not chk.ok:
            raise ValueError(
                f"{imm.label}: not Lagrangian at u={np.asarray(u).tolist()} "
                f"(residual {chk.residual:.3e})"
            )
    failures = []
    fits = 0
    max_h = 0.0
    max_lam = 0.0
    max_mu = 0.0
    max_sym_defect = 0.0
    for u in points:
        c, _ = second_fundamental_form(imm, u)
        max_sym_defect = max(max_sym_defect, symmetry_defect(c))
        tensor = CubicTensor.from_full(c)
        h_norm = float(np.linalg.norm(c))
        max_h = max(max_h, h_norm)
        result = fit(tensor, fit_tol)
        if result is not None:
            fits += 1
            max_lam = max(max_lam, abs(result.lam))
            max_mu = max(max_mu, abs(result.mu))
            if h_norm >= tol:
                failures.append(
                    {
                        "u": np.asarray(u).tolist(),
                        "h_norm": h_norm,
                        "lam": result.lam,
                        "mu": result.mu,
                    }
                )
    return CheckRecord(
        check_id=f"theorem-shadow[{imm.label}]",
        passed=not failures,
        samples=len(points),
        tolerance=tol,
        max_residual=max_h,
        details={
            "fit_successes": fits,
            "grid_points": len(points),
            "max_abs_lambda": max_lam,
            "max_abs_mu": max_mu,
            "max_symmetry_defect": max_sym_defect,
        },
        failures=failures,
    )
