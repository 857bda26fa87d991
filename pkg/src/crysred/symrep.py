"""Symmetric-power modules of GL2(F_p) and M2(F_p) over F_p.

The model for the degree-r module is the space of homogeneous two-variable
polynomials F = sum_j c_j X^(r-j) Y^j, stored as the coefficient vector
(c_0, ..., c_r); a matrix (a b; c d) acts by substitution
F -> F(aX + cY, bX + dY), a left action: act(g, act(h, F)) = act(g h, F).

Provided here: brute-force span closures under the full matrix monoid or
the invertible group, the submodules generated by the top two monomials,
the theta-divisibility filtration, the terminal quotient of the degree-r
module by (second-monomial submodule + twice-theta-divisible part), and a
Jordan-Hoelder decomposition for small modules by socle peeling.
"""

from __future__ import annotations

import itertools
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import linalg
from .errors import DimensionBoundError
from .linalg import FpSpace

JH_DIMENSION_BOUND = 2000

GEN_NAMES = ("u", "w", "d1", "d2")


class JHLabel(NamedTuple):
    """Irreducible label: the s-th symmetric power twisted by det^t."""

    s: int
    t: int

    def render(self) -> str:
        return f"V{self.s}" if self.t == 0 else f"V{self.s}*D^{self.t}"


def jh_label(s: int, t: int, p: int) -> JHLabel:
    if not 0 <= s <= p - 1:
        raise ValueError(f"s out of range: {s}")
    return JHLabel(s, t % (p - 1))


def primitive_root(p: int) -> int:
    for g in range(2, p):
        seen, x = set(), 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ValueError(f"no primitive root mod {p}")


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class HomogPoly:
    """Homogeneous polynomial of degree r over F_p, coefficient c_j on X^(r-j) Y^j."""

    p: int
    r: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.r + 1:
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def from_vec(cls, p: int, vec) -> "HomogPoly":
        v = np.asarray(vec, dtype=np.int64) % p
        return cls(p, len(v) - 1, tuple(int(x) for x in v))

    @classmethod
    def monomial(cls, p: int, r: int, j: int, c: int = 1) -> "HomogPoly":
        v = [0] * (r + 1)
        v[j] = c % p
        return cls(p, r, tuple(v))

    @classmethod
    def from_terms(cls, p: int, r: int, terms: dict[int, int]) -> "HomogPoly":
        v = [0] * (r + 1)
        for j, c in terms.items():
            v[j] = (v[j] + c) % p
        return cls(p, r, tuple(v))

    def vec(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.int64)

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        if (self.p, self.r) != (other.p, other.r):
            raise ValueError("degree or characteristic mismatch")
        return HomogPoly.from_vec(self.p, self.vec() + other.vec())

    def scale(self, c: int) -> "HomogPoly":
        return HomogPoly.from_vec(self.p, self.vec() * (c % self.p))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support_class(self) -> int | None:
        """The common class of Y-degrees mod p-1 (in 1..p-1), or None."""
        cls = None
        for j, c in enumerate(self.coeffs):
            if c:
                a = j % (self.p - 1) or self.p - 1
                if cls is None:
                    cls = a
                elif cls != a:
                    return None
        return cls


def _as_vec(F, p: int) -> np.ndarray:
    if isinstance(F, HomogPoly):
        return F.vec()
    return np.asarray(F, dtype=np.int64) % p


def poly_mul_vec(u: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Product of homogeneous polynomials as coefficient vectors."""
    return np.convolve(u, v) % p


def theta_vec(p: int) -> np.ndarray:
    """X^p Y - X Y^p as a degree-(p+1) coefficient vector."""
    v = np.zeros(p + 2, dtype=np.int64)
    v[1] = 1
    v[p] = p - 1
    return v


# ---------------------------------------------------------------------------
# the matrix action


class SymPower:
    """Action machinery for the degree-r module, with cached generator matrices."""

    def __init__(self, p: int, r: int):
        self.p = p
        self.r = r
        self._mats: dict[tuple[int, int, int, int], np.ndarray] = {}
        self._comb: np.ndarray | None = None

    def comb(self) -> np.ndarray:
        """Pascal triangle mod p up to degree r (comb[n, k] = binom(n, k))."""
        if self._comb is None:
            n = self.r + 1
            C = np.zeros((n + 1, n + 1), dtype=np.int64)
            C[:, 0] = 1
            for i in range(1, n + 1):
                C[i, 1 : i + 1] = (C[i - 1, : i] + C[i - 1, 1 : i + 1]) % self.p
            self._comb = C
        return self._comb

    def monomial(self, j: int) -> np.ndarray:
        v = np.zeros(self.r + 1, dtype=np.int64)
        v[j] = 1
        return v

    def action_matrix(self, g) -> np.ndarray:
        key = tuple(int(x) % self.p for x in g)
        M = self._mats.get(key)
        if M is None:
            M = self._build_matrix(key)
            self._mats[key] = M
        return M

    def _build_matrix(self, g: tuple[int, int, int, int]) -> np.ndarray:
        p, r = self.p, self.r
        a, b, c, d = g
        n = r + 1
        M = np.zeros((n, n), dtype=np.int64)
        if b == 0 and c == 0:
            # diagonal: X^(r-j) Y^j -> a^(r-j) d^j
            for j in range(n):
                M[j, j] = pow(a, r - j, p) * pow(d, j, p) % p
        elif a == 1 and d == 1 and c == 0:
            # upper unipotent-type (1 b; 0 1): F(X, bX + Y)
            C = self.comb()
            for j in range(n):
                for i in range(j + 1):
                    M[i, j] = C[j, i] * pow(b, j - i, p) % p
        elif (a, b, c, d) == (0, 1, 1, 0):
            for j in range(n):
                M[r - j, j] = 1
        elif (a, b, c, d) == (1, 0, 0, 0):
            M[0, 0] = 1
        else:
            # generic: column j is (aX+cY)^(r-j) (bX+dY)^j
            first = [np.array([1], dtype=np.int64)]
            second = [np.array([1], dtype=np.int64)]
            for _ in range(r):
                first.append(np.convolve(first[-1], np.array([a, c], dtype=np.int64)) % p)
                second.append(np.convolve(second[-1], np.array([b, d], dtype=np.int64)) % p)
            for j in range(n):
                M[:, j] = np.convolve(first[r - j], second[j]) % p
        return M

    def act_vec(self, g, v: np.ndarray) -> np.ndarray:
        return self.action_matrix(g) @ (v % self.p) % self.p

    def gamma_generators(self) -> list[tuple[int, int, int, int]]:
        g = primitive_root(self.p)
        return [(1, 1, 0, 1), (0, 1, 1, 0), (g, 0, 0, 1), (1, 0, 0, g)]

    def monoid_generators(self) -> list[tuple[int, int, int, int]]:
        gens = [(1, 1, 0, 1), (0, 1, 1, 0), (1, 0, 0, 0)]
        gens += [(u, 0, 0, 1) for u in range(2, self.p)]
        return gens


_SYMPOWERS: OrderedDict = OrderedDict()
_SYMPOWER_CACHE_SIZE = 8


def sym_power(p: int, r: int) -> SymPower:
    """Bounded cache of action machinery; sweeps touch each degree once."""
    key = (p, r)
    if key in _SYMPOWERS:
        _SYMPOWERS.move_to_end(key)
        return _SYMPOWERS[key]
    inst = SymPower(p, r)
    _SYMPOWERS[key] = inst
    while len(_SYMPOWERS) > _SYMPOWER_CACHE_SIZE:
        _SYMPOWERS.popitem(last=False)
    return inst


def act(g, F: HomogPoly) -> HomogPoly:
    """Substitution action of a 2x2 matrix (a, b, c, d) on a polynomial."""
    return HomogPoly.from_vec(F.p, sym_power(F.p, F.r).act_vec(g, F.vec()))


def mat_mul(g, h, p: int) -> tuple[int, int, int, int]:
    a, b, c, d = g
    e, f, gg, hh = h
    return (
        (a * e + b * gg) % p,
        (a * f + b * hh) % p,
        (c * e + d * gg) % p,
        (c * f + d * hh) % p,
    )


# ---------------------------------------------------------------------------
# span closures and the distinguished submodules


@dataclass
class ClosedSubspace:
    """An echelonized subspace together with its verified stability flags."""

    p: int
    r: int
    space: FpSpace
    group: str  # "M" or "Gamma"
    m_stable: bool = False
    gamma_stable: bool = False

    @property
    def dim(self) -> int:
        return self.space.dim


def span_closure(generators, group: str = "M", p: int | None = None, r: int | None = None) -> ClosedSubspace:
    """Smallest subspace containing the generators and stable under the full
    matrix monoid (group="M") or the invertible group (group="Gamma").

    Closure is computed by repeatedly applying a finite generating set until
    the rank stabilizes.
    """
    vecs = []
    for F in generators:
        if isinstance(F, HomogPoly):
            p = p if p is not None else F.p
            r = r if r is not None else F.r
            if (F.p, F.r) != (p, r):
                raise ValueError("mixed degrees in generator list")
            vecs.append(F.vec())
        else:
            vecs.append(np.asarray(F, dtype=np.int64))
    if not vecs:
        raise ValueError("empty generator list")
    if p is None or r is None:
        raise ValueError("p and r required for raw vectors")
    symp = sym_power(p, r)
    gens = symp.monoid_generators() if group == "M" else symp.gamma_generators()
    mats = [symp.action_matrix(g) for g in gens]
    space = FpSpace(r + 1, p)
    work = [v for v in vecs if space.add(v)]
    while work:
        v = work.pop()
        for M in mats:
            w = M @ v % p
            if space.add(w):
                work.append(w)
    closed = ClosedSubspace(p, r, space, group)
    closed.gamma_stable = True
    closed.m_stable = group == "M"
    return closed


def verify_stability(sub: ClosedSubspace, samples: int = 20, seed: int = 0) -> bool:
    """Re-check stability on random elements of the full matrix monoid."""
    rng = np.random.default_rng(seed)
    symp = sym_power(sub.p, sub.r)
    mats = rng.integers(0, sub.p, size=(samples, 4))
    for g in mats:
        M = symp.action_matrix(tuple(int(x) for x in g))
        for row in sub.space.rows:
            if M @ row % sub.p not in sub.space:
                return False
    return True


def standard_spanning_set(p: int, r: int, which: str) -> list[np.ndarray]:
    """The classical spanning sets of the top- and second-monomial submodules."""
    symp = sym_power(p, r)
    C = symp.comb()
    out = [symp.monomial(0)]
    if which == "top":
        for k in range(p):
            # (kX + Y)^r
            v = np.array([C[r, i] * pow(k, r - i, p) for i in range(r + 1)], dtype=np.int64) % p
            out.append(v)
        return out
    out.append(symp.monomial(r))
    for k in range(p):
        # X (kX + Y)^(r-1)
        v = np.zeros(r + 1, dtype=np.int64)
        for i in range(r):
            v[i] = C[r - 1, i] * pow(k, r - 1 - i, p) % p
        out.append(v)
    for l in range(p):
        # (X + lY)^(r-1) Y
        v = np.zeros(r + 1, dtype=np.int64)
        for m in range(r):
            v[m + 1] = C[r - 1, m] * pow(l, m, p) % p
        out.append(v)
    return out


def build_X(p: int, r: int, which: str = "second") -> ClosedSubspace:
    """Monoid-stable span closure of X^r ("top") or X^(r-1)Y ("second")."""
    if r < 1:
        raise ValueError("need r >= 1")
    symp = sym_power(p, r)
    j = 0 if which == "top" else 1
    return span_closure([symp.monomial(j)], group="M", p=p, r=r)


# ---------------------------------------------------------------------------
# the theta filtration


def theta_multiple_space(p: int, r: int, k: int) -> FpSpace:
    """Subspace of degree-r polynomials divisible by theta^k."""
    s = r - k * (p + 1)
    if s < 0:
        return FpSpace(r + 1, p)
    tk = theta_vec(p)
    for _ in range(k - 1):
        tk = poly_mul_vec(tk, theta_vec(p), p)
    # theta^k * X^(s-m) Y^m has leading index m + k and support above it,
    # so the rows are already in echelon position
    rows = []
    base = np.zeros(s + 1, dtype=np.int64)
    for m in range(s + 1):
        base[:] = 0
        base[m] = 1
        rows.append(poly_mul_vec(tk, base, p))
    return FpSpace.from_echelon(rows, [m + k for m in range(s + 1)], r + 1, p)


def filtration_spaces(p: int, r: int) -> tuple[FpSpace, FpSpace]:
    """Bases of the theta- and theta^2-divisible subspaces of degree r."""
    return theta_multiple_space(p, r, 1), theta_multiple_space(p, r, 2)


def divide_theta(vec: np.ndarray, p: int) -> np.ndarray | None:
    """Exact quotient by theta, or None when theta does not divide."""
    r = len(vec) - 1
    s = r - p - 1
    if s < 0:
        return None if vec.any() else np.zeros(0, dtype=np.int64)
    rem = vec.copy() % p
    if rem[0]:
        return None
    quo = np.zeros(s + 1, dtype=np.int64)
    for m in range(s + 1):
        c = rem[m + 1]
        quo[m] = c
        rem[m + 1] = 0
        rem[m + p] = (rem[m + p] + c) % p
    if rem.any():
        return None
    return quo


def theta_divides_criterion(F, k: int, p: int | None = None) -> bool | None:
    """Coefficient test for single-congruence-class polynomials; None when
    the support does not sit in one class so the test does not apply."""
    if isinstance(F, HomogPoly):
        p = F.p
    v = _as_vec(F, p)
    r = len(v) - 1
    poly = HomogPoly.from_vec(p, v)
    if poly.is_zero():
        return True
    if poly.support_class() is None:
        return None
    total = int(v.sum() % p)
    ok1 = v[0] == 0 and v[r] == 0 and total == 0
    if k == 1:
        return ok1
    jsum = int((v * np.arange(r + 1)).sum() % p)
    return ok1 and v[1] == 0 and v[r - 1] == 0 and jsum == 0


def theta_divides(F, k: int = 1, p: int | None = None) -> bool:
    """True when theta^k divides F.  Uses exact division; for polynomials
    supported in a single congruence class the coefficient test is run as
    well and the two answers are required to agree."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    if isinstance(F, HomogPoly):
        p = F.p
    v = _as_vec(F, p)
    cur = v
    result = True
    for _ in range(k):
        nxt = divide_theta(cur, p)
        if nxt is None:
            result = False
            break
        cur = nxt
    crit = theta_divides_criterion(v, k, p)
    if crit is not None and crit != result:
        raise ArithmeticError("theta-divisibility paths disagree")
    return result


# ---------------------------------------------------------------------------
# abstract modules with the standard generator action


class GammaModule:
    """A finite-dimensional module given by matrices for the generators
    u = (1 1; 0 1), w = (0 1; 1 0), d1 = diag(g, 1), d2 = diag(1, g)."""

    def __init__(self, p: int, mats: dict[str, np.ndarray]):
        self.p = p
        self.mats = {k: np.asarray(m, dtype=np.int64) % p for k, m in mats.items()}
        self.dim = self.mats["u"].shape[0] if self.mats["u"].size else 0

    def act(self, name: str, v: np.ndarray) -> np.ndarray:
        return self.mats[name] @ (v % self.p) % self.p

    def spin(self, vecs) -> FpSpace:
        """Smallest invariant subspace containing the given vectors."""
        space = FpSpace(self.dim, self.p)
        work = [np.asarray(v, dtype=np.int64) % self.p for v in vecs]
        work = [v for v in work if space.add(v)]
        while work:
            v = work.pop()
            for name in GEN_NAMES:
                w = self.act(name, v)
                if space.add(w):
                    work.append(w)
        return space

    def restrict(self, sub: FpSpace) -> "GammaModule":
        B = sub.matrix()
        mats = {}
        for name in GEN_NAMES:
            cols = []
            for row in B:
                img = self.act(name, row)
                coeffs = sub.express(img)
                if coeffs is None:
                    raise ValueError("subspace is not invariant")
                cols.append(coeffs)
            mats[name] = np.array(cols, dtype=np.int64).T if len(B) else np.zeros((0, 0), dtype=np.int64)
        return GammaModule(self.p, mats)

    def quotient(self, sub: FpSpace) -> tuple["GammaModule", Callable[[np.ndarray], np.ndarray]]:
        """Quotient module and the projection map onto its coordinates."""
        nonpiv = sub.nonpivot_columns()

        def project(v: np.ndarray) -> np.ndarray:
            return sub.reduce(v)[nonpiv]

        mats = {}
        for name in GEN_NAMES:
            M = np.zeros((len(nonpiv), len(nonpiv)), dtype=np.int64)
            for j, col in enumerate(nonpiv):
                e = np.zeros(self.dim, dtype=np.int64)
                e[col] = 1
                M[:, j] = project(self.act(name, e))
            mats[name] = M
        return GammaModule(self.p, mats), project

    def unipotent_fixed(self) -> FpSpace:
        U = self.mats["u"] - np.eye(self.dim, dtype=np.int64)
        return FpSpace.from_rows(linalg.nullspace(U, self.p), self.dim, self.p)


class SubquotientModule(GammaModule):
    """W / U for subspaces U <= W of the degree-r module, with projection
    from ambient coefficient vectors and monomial lifts."""

    def __init__(self, symp: SymPower, W: FpSpace | None, U: FpSpace | None):
        self.symp = symp
        p, r = symp.p, symp.r
        if U is None:
            U = FpSpace(r + 1, p)
        self.U = U
        if W is None:
            # ambient quotient: coordinates are the non-pivot monomials of U
            self._mode = "quotient"
            self._cols = U.nonpivot_columns()
            dim = len(self._cols)
            mats = {}
            for name, g in zip(GEN_NAMES, _standard_gens(p)):
                A = symp.action_matrix(g)
                M = np.zeros((dim, dim), dtype=np.int64)
                for j, col in enumerate(self._cols):
                    M[:, j] = U.reduce(A[:, col])[self._cols]
                mats[name] = M
        else:
            self._mode = "subquotient"
            comp_rows = []
            acc = U.copy()
            for row in W.matrix():
                if acc.add(row):
                    comp_rows.append(row)
            # comp_rows are W-vectors independent modulo U
            self._comp = FpSpace.from_rows([U.reduce(x) for x in comp_rows], r + 1, p)
            dim = self._comp.dim
            mats = {}
            for name, g in zip(GEN_NAMES, _standard_gens(p)):
                A = symp.action_matrix(g)
                M = np.zeros((dim, dim), dtype=np.int64)
                for j, row in enumerate(self._comp.matrix()):
                    M[:, j] = self._project_vec(A @ row % p)
                mats[name] = M
        super().__init__(p, mats)

    def _project_vec(self, v: np.ndarray) -> np.ndarray:
        w = self.U.reduce(v)
        if self._mode == "quotient":
            return w[self._cols]
        coeffs = self._comp.express(w)
        if coeffs is None:
            raise ValueError("vector not in the subquotient")
        return coeffs

    def project(self, F) -> np.ndarray:
        """Class of an ambient polynomial in module coordinates."""
        return self._project_vec(_as_vec(F, self.p))

    def lift(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % self.p
        if self._mode == "quotient":
            out = np.zeros(self.symp.r + 1, dtype=np.int64)
            out[self._cols] = coords
            return out
        return coords @ self._comp.matrix() % self.p


def _standard_gens(p: int) -> list[tuple[int, int, int, int]]:
    g = primitive_root(p)
    return [(1, 1, 0, 1), (0, 1, 1, 0), (g, 0, 0, 1), (1, 0, 0, g)]


def weight_module(p: int, s: int, t: int) -> GammaModule:
    """Model of the irreducible with label (s, t) on degree-s polynomials,
    the determinant twist entering as a scalar."""
    symp = sym_power(p, s)
    g = primitive_root(p)
    dets = {"u": 1, "w": -1, "d1": g, "d2": g}
    mats = {}
    for name, gen in zip(GEN_NAMES, _standard_gens(p)):
        mats[name] = symp.action_matrix(gen) * pow(dets[name] % p, t, p) % p
    return GammaModule(p, mats)


# ---------------------------------------------------------------------------
# Jordan-Hoelder decomposition by socle peeling


def _lines(vectors: list[np.ndarray], p: int, cap: int = 20000):
    """Representatives of the lines in the span of independent vectors
    (leading coefficient normalized to 1)."""
    k = len(vectors)
    if k == 1:
        yield vectors[0] % p
        return
    if (p**k - 1) // (p - 1) > cap:
        raise ArithmeticError("weight space too large to enumerate lines")
    for i in range(k):
        for tail in itertools.product(range(p), repeat=k - 1 - i):
            v = vectors[i] % p
            for j, c in enumerate(tail):
                v = (v + c * vectors[i + 1 + j]) % p
            yield v


def _weight_candidates(alpha: int, beta: int, p: int) -> list[JHLabel]:
    s0 = (alpha - beta) % (p - 1)
    t = beta % (p - 1)
    cands = []
    for s in (s0, s0 + (p - 1)):
        if 0 <= s <= p - 1:
            cands.append(JHLabel(s, t))
    return cands


def socle_simples(mod: GammaModule) -> list[tuple[JHLabel, FpSpace]]:
    """All simple submodules generated by highest-weight lines, deduplicated."""
    p = mod.p
    fixed = mod.unipotent_fixed()
    if fixed.dim == 0:
        if mod.dim:
            raise ArithmeticError("nonzero module without unipotent-fixed vectors")
        return []
    g = primitive_root(p)
    B = fixed.matrix()
    # restrictions of the torus generators to the fixed space
    D = {}
    for name in ("d1", "d2"):
        cols = []
        for row in B:
            coeffs = fixed.express(mod.act(name, row))
            if coeffs is None:
                raise ArithmeticError("torus does not preserve the fixed space")
            cols.append(coeffs)
        D[name] = np.array(cols, dtype=np.int64).T
    found: list[tuple[JHLabel, FpSpace]] = []
    seen: set[bytes] = set()
    k = fixed.dim
    eye = np.eye(k, dtype=np.int64)
    for alpha in range(p - 1):
        e1 = pow(g, alpha, p)
        M1 = (D["d1"] - e1 * eye) % p
        for beta in range(p - 1):
            e2 = pow(g, beta, p)
            M2 = (D["d2"] - e2 * eye) % p
            ker = linalg.nullspace(np.vstack([M1, M2]), p)
            if not ker:
                continue
            cands = _weight_candidates(alpha, beta, p)
            ambient = [(c @ B) % p for c in ker]
            for line in _lines(ambient, p):
                span = mod.spin([line])
                inner_fixed = mod.restrict(span).unipotent_fixed()
                if inner_fixed.dim != 1:
                    continue
                match = [c for c in cands if c.s + 1 == span.dim]
                if not match:
                    raise ArithmeticError(
                        f"simple submodule of dim {span.dim} matches no label "
                        f"of weight ({alpha}, {beta})"
                    )
                key = span.matrix().tobytes()
                if key not in seen:
                    seen.add(key)
                    found.append((match[0], span))
    found.sort(key=lambda lab_sp: (lab_sp[1].dim, lab_sp[0], lab_sp[1].matrix().tobytes()))
    return found


def socle_labels(mod: GammaModule) -> Counter:
    return Counter(label for label, _ in socle_simples(mod))


def jh_decompose(mod: GammaModule, bound: int = JH_DIMENSION_BOUND) -> Counter:
    """Multiset of irreducible labels of a module, found by repeatedly
    splitting off a simple submodule and passing to the quotient."""
    if mod.dim > bound:
        raise DimensionBoundError(f"module dimension {mod.dim} exceeds bound {bound}")
    labels: Counter = Counter()
    current = mod
    total = 0
    while current.dim > 0:
        simples = socle_simples(current)
        if not simples:
            raise ArithmeticError("no simple submodule found")
        label, span = simples[0]
        labels[label] += 1
        total += label.s + 1
        current, _ = current.quotient(span)
    if total != mod.dim:
        raise ArithmeticError("factor dimensions do not add up")
    return labels


def gamma_iso(
    src: GammaModule, src_gen: np.ndarray, dst: GammaModule, dst_gen: np.ndarray
) -> np.ndarray:
    """Matrix of the equivariant isomorphism pinned by src_gen -> dst_gen.

    The generator pair is spun simultaneously; the resulting linear map is
    verified to intertwine every generator, and to be bijective."""
    if src.dim != dst.dim:
        raise ValueError("dimension mismatch")
    p = src.p
    space = FpSpace(src.dim, p)
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    work = [(np.asarray(src_gen) % p, np.asarray(dst_gen) % p)]
    while work:
        x, y = work.pop()
        if space.add(x):
            pairs.append((x, y))
            for name in GEN_NAMES:
                work.append((src.act(name, x), dst.act(name, y)))
    if space.dim != src.dim:
        raise ValueError("generator does not generate the source module")
    X = np.array([x for x, _ in pairs], dtype=np.int64).T
    Y = np.array([y for _, y in pairs], dtype=np.int64).T
    Xinv = _inv_matrix(X, p)
    T = Y @ Xinv % p
    for name in GEN_NAMES:
        if not np.array_equal(T @ src.mats[name] % p, dst.mats[name] @ T % p):
            raise ValueError("constructed map is not equivariant")
    if linalg.rank(T, p) != src.dim:
        raise ValueError("constructed map is not invertible")
    return T


def _inv_matrix(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    aug = np.hstack([A % p, np.eye(n, dtype=np.int64)])
    R, pivots = linalg.rref(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix not invertible")
    return R[:, n:]


# ---------------------------------------------------------------------------
# the terminal quotient


@dataclass
class QuotientData:
    """The quotient of the degree-r module by (second-monomial submodule +
    twice-theta-divisible part), with its decomposition data."""

    p: int
    r: int
    module: SubquotientModule
    x_second: ClosedSubspace
    v_star: FpSpace
    v_star2: FpSpace
    denominator: FpSpace
    dimension: int
    factors: Counter = field(default_factory=Counter)
    socle: Counter = field(default_factory=Counter)

    def star_image(self) -> FpSpace:
        """Image of the theta-divisible subspace inside the quotient."""
        img = FpSpace(self.module.dim, self.p)
        for row in self.v_star.matrix():
            img.add(self.module.project(row))
        return img


def quotient_Q(p: int, r: int, decompose: bool = True) -> QuotientData:
    from .errors import DomainError

    if r < 2 * p + 1:
        raise DomainError(f"need r >= 2p+1; got r={r}, p={p}")
    symp = sym_power(p, r)
    x2 = build_X(p, r, "second")
    vstar, vstar2 = filtration_spaces(p, r)
    denom = x2.space.union(vstar2)
    module = SubquotientModule(symp, None, denom)
    data = QuotientData(p, r, module, x2, vstar, vstar2, denom, module.dim)
    if decompose:
        data.factors = jh_decompose(module)
        data.socle = socle_labels(module)
    return data


def frobenius_twist_check(p: int, u: int, n: int) -> bool:
    """Raising variables to the p^n power identifies the top-monomial module
    in degree u with the one in degree p^n u; checks ranks and a basis map."""
    if u % p == 0 or n < 1:
        raise ValueError("need p coprime to u and n >= 1")
    r = p**n * u
    Xu = build_X(p, u, "top")
    Xr = build_X(p, r, "top")
    if Xu.dim != Xr.dim:
        return False
    stretched = FpSpace(r + 1, p)
    for row in Xu.space.matrix():
        img = np.zeros(r + 1, dtype=np.int64)
        img[np.arange(u + 1) * p**n] = row
        if img not in Xr.space:
            return False
        stretched.add(img)
    return stretched.dim == Xu.dim
