"""The Hecke operator on compactly induced symmetric powers.

Functions live on the standard tree cosets

    branch 0:  (p^m  mu; 0  1),   mu with Teichmuller digits (d_0, ..., d_{m-1})
    branch 1:  (1  0; p*mu  p^(m+1))

and are finite sums of elementary terms [coset, polynomial]; polynomial
coefficients are ``ApCoeff`` values (rationals times powers of the symbolic
eigenvalue, with Teichmuller truncation tracked).  ``apply_T`` implements the
raising/lowering decomposition on branch-0 support; ``direct_T`` evaluates
the defining double-coset formula with generic coset normalization and is
kept as an independent test oracle.  A mod-p Hecke operator on irreducible
weight models supports the factorization certificates of the witness audits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as _iter_product
from typing import NamedTuple

import numpy as np

from .arith import (
    DEFAULT_PRECISION,
    ApCoeff,
    ResidueExpr,
    _val_capped,
    padic_val,
    teichmuller,
)
from .errors import IndeterminateCancellation, PrecisionError


class Coset(NamedTuple):
    """A tree coset: branch 0 or 1, level, and Teichmuller digit tuple."""

    branch: int
    level: int
    digits: tuple[int, ...]

    def render(self) -> str:
        if self.branch == 1 and self.level == 0 and not self.digits:
            return "alpha"
        if self.level == 0 and self.branch == 0:
            return "Id"
        val = "+".join(
            (f"[{d}]" if i == 0 else f"[{d}]p^{i}" if i > 1 else f"[{d}]p")
            for i, d in enumerate(self.digits)
            if d or len(self.digits) == 1
        ) or "0"
        return f"g{self.branch}({self.level},{val})"


IDENTITY = Coset(0, 0, ())
ALPHA = Coset(1, 0, ())


def g0(level: int, digits: tuple[int, ...]) -> Coset:
    if len(digits) != level:
        raise ValueError("digit tuple does not match level")
    return Coset(0, level, tuple(int(d) for d in digits))


class TeichTable:
    """Cached Teichmuller representatives at a fixed precision."""

    def __init__(self, p: int, precision: int = DEFAULT_PRECISION):
        self.p = p
        self.precision = precision
        self.modulus = p**precision
        self.rep = [teichmuller(c, p, precision) for c in range(p)]

    def power(self, c: int, k: int) -> int:
        """[c]^k, using multiplicativity (so the result is again a table entry)."""
        c %= self.p
        if k == 0:
            return 1
        if c == 0:
            return 0
        return self.rep[pow(c, k % (self.p - 1) or (self.p - 1), self.p)]

    def digits_value(self, digits) -> int:
        return sum(self.rep[d] * self.p**i for i, d in enumerate(digits)) % self.modulus


_TABLES: dict[tuple[int, int], TeichTable] = {}


def teich_table(p: int, precision: int = DEFAULT_PRECISION) -> TeichTable:
    key = (p, precision)
    if key not in _TABLES:
        _TABLES[key] = TeichTable(p, precision)
    return _TABLES[key]


# ---------------------------------------------------------------------------
# induced functions


class IndFunction:
    """Finitely supported function on the tree cosets with polynomial values."""

    def __init__(self, p: int, r: int, precision: int = DEFAULT_PRECISION):
        self.p = p
        self.r = r
        self.precision = precision
        self.data: dict[Coset, dict[int, ApCoeff]] = {}

    def copy(self) -> "IndFunction":
        out = IndFunction(self.p, self.r, self.precision)
        out.data = {c: dict(poly) for c, poly in self.data.items()}
        return out

    def accumulate(self, coset: Coset, j: int, coeff: ApCoeff) -> None:
        if coeff.is_exact_zero():
            return
        poly = self.data.setdefault(coset, {})
        cur = poly.get(j)
        poly[j] = coeff if cur is None else cur + coeff

    def add_term(self, coset: Coset, terms: dict[int, ApCoeff]) -> None:
        for j, c in terms.items():
            self.accumulate(coset, j, c)

    def prune(self) -> "IndFunction":
        for coset in list(self.data):
            poly = {j: c for j, c in self.data[coset].items() if not c.is_exact_zero()}
            if poly:
                self.data[coset] = poly
            else:
                del self.data[coset]
        return self

    def __add__(self, other: "IndFunction") -> "IndFunction":
        out = self.copy()
        for coset, poly in other.data.items():
            for j, c in poly.items():
                out.accumulate(coset, j, c)
        return out.prune()

    def __sub__(self, other: "IndFunction") -> "IndFunction":
        return self + other.scale(-1)

    def scale(self, q) -> "IndFunction":
        out = IndFunction(self.p, self.r, self.precision)
        for coset, poly in self.data.items():
            out.data[coset] = {j: c.scale(q, self.p) for j, c in poly.items()}
        return out.prune()

    def shift_ap(self, k: int) -> "IndFunction":
        out = IndFunction(self.p, self.r, self.precision)
        for coset, poly in self.data.items():
            out.data[coset] = {j: c.shift(k) for j, c in poly.items()}
        return out

    def support(self) -> list[Coset]:
        return sorted(self.data)


def elementary(p: int, r: int, coset: Coset, terms: dict[int, ApCoeff],
               precision: int = DEFAULT_PRECISION) -> IndFunction:
    f = IndFunction(p, r, precision)
    f.add_term(coset, terms)
    return f.prune()


# ---------------------------------------------------------------------------
# the raising/lowering parts on branch-0 support


def _require_branch0(f: IndFunction) -> None:
    for coset in f.data:
        if coset.branch != 0:
            raise NotImplementedError(
                "the operator is only implemented on branch-0 support"
            )


def apply_Tplus(f: IndFunction) -> IndFunction:
    """Level-raising part: spreads each coset over its p children."""
    _require_branch0(f)
    p, r = f.p, f.r
    table = teich_table(p, f.precision)
    out = IndFunction(p, r, f.precision)
    for coset, poly in f.data.items():
        n, digits = coset.level, coset.digits
        for lam in range(p):
            child = Coset(0, n + 1, digits + (lam,))
            for i, c in poly.items():
                if lam == 0:
                    # only the i = j term survives
                    out.accumulate(child, i, c.scale(Fraction(p) ** i, p))
                    continue
                for j in range(i + 1):
                    sign = -1 if (i - j) % 2 else 1
                    factor = Fraction(math.comb(i, j) * sign) * Fraction(p) ** j
                    term = c.scale(factor, p)
                    if i != j:
                        term = term.scale_trunc(table.power(lam, i - j), f.precision, p)
                    out.accumulate(child, j, term)
    return out.prune()


def apply_Tminus(f: IndFunction) -> IndFunction:
    """Level-lowering part: drops the leading digit (to the other branch at
    level zero)."""
    _require_branch0(f)
    p, r = f.p, f.r
    table = teich_table(p, f.precision)
    out = IndFunction(p, r, f.precision)
    for coset, poly in f.data.items():
        n, digits = coset.level, coset.digits
        if n == 0:
            for j, c in poly.items():
                out.accumulate(ALPHA, j, c.scale(Fraction(p) ** (r - j), p))
            continue
        parent = Coset(0, n - 1, digits[:-1])
        top = digits[-1]
        for i, c in poly.items():
            base = c.scale(Fraction(p) ** (r - i), p)
            if top == 0:
                out.accumulate(parent, i, base)
                continue
            for j in range(i + 1):
                term = base.scale(math.comb(i, j), p)
                if i != j:
                    term = term.scale_trunc(table.power(top, i - j), f.precision, p)
                out.accumulate(parent, j, term)
    return out.prune()


def apply_T(f: IndFunction) -> IndFunction:
    """The Hecke operator as the sum of its raising and lowering parts."""
    return apply_Tplus(f) + apply_Tminus(f)


def t_minus_ap(f: IndFunction) -> IndFunction:
    return apply_T(f) - f.shift_ap(1)


# ---------------------------------------------------------------------------
# direct evaluation of the defining formula (independent oracle)


def coset_matrix(coset: Coset, p: int, precision: int = DEFAULT_PRECISION):
    table = teich_table(p, precision)
    mu = table.digits_value(coset.digits)
    if coset.branch == 0:
        return (p**coset.level, mu, 0, 1)
    return (1, 0, p * mu, p ** (coset.level + 1))


def _mat_mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _binomial_powers(x: int, y: int, n: int) -> list[list[int]]:
    """Coefficient lists of (xX + yY)^k for k = 0..n."""
    table = [[1]]
    for _ in range(n):
        prev = table[-1]
        table.append(
            [
                (prev[m] if m < len(prev) else 0) * x + (prev[m - 1] * y if m > 0 else 0)
                for m in range(len(prev) + 1)
            ]
        )
    return table


def _substitute_poly(poly: dict[int, ApCoeff], mat, r: int, p: int, prec: int):
    """Exact substitution F(aX + cY, bX + dY) on ApCoeff polynomials; the
    resulting integer weights are treated as carrying the given precision."""
    a, b, c, d = mat
    first = _binomial_powers(a, c, max((r - i for i in poly), default=0))
    second = _binomial_powers(b, d, max(poly, default=0))
    # raw accumulation: (j, degree) -> [rational sum, error bound]
    acc: dict[int, dict[int, list]] = {}
    for i, coeff in poly.items():
        # integer weight profile of (aX+cY)^(r-i) (bX+dY)^i
        f1, f2 = first[r - i], second[i]
        weights = [0] * (len(f1) + len(f2) - 1)
        for m1, w1 in enumerate(f1):
            if w1 == 0:
                continue
            for m2, w2 in enumerate(f2):
                if w2:
                    weights[m1 + m2] += w1 * w2
        for dd, (cc, ee) in coeff.terms.items():
            eps = min(ee, _val_capped(cc, p) + prec)
            for j, w in enumerate(weights):
                if w == 0:
                    continue
                cell = acc.setdefault(j, {}).setdefault(dd, [Fraction(0), math.inf])
                cell[0] += cc * w
                cell[1] = min(cell[1], eps)
    out: dict[int, ApCoeff] = {}
    for j, cells in acc.items():
        terms = {dd: (val, eps) for dd, (val, eps) in cells.items() if val != 0 or eps is not math.inf}
        if terms:
            out[j] = ApCoeff(terms)
    return out


def _teich_digits_of(x: int, m: int, p: int, precision: int) -> tuple[int, ...]:
    """First m Teichmuller digits of an integer known mod p^precision."""
    table = teich_table(p, precision)
    digits = []
    mod = p**precision
    for i in range(m):
        d = x % p
        digits.append(d)
        x = (x - table.rep[d]) % mod
        if x % p**(i + 1):
            raise PrecisionError("digit extraction left a non-divisible remainder")
        x //= p
        mod //= p
    return tuple(digits)


def normalize_pair(mat, poly: dict[int, ApCoeff], p: int, r: int,
                   precision: int = DEFAULT_PRECISION) -> tuple[Coset, dict[int, ApCoeff]]:
    """Rewrite [mat, poly] as [canonical coset, k . poly] with k integral of
    unit determinant.  Central powers of p act trivially."""
    A, B, C, D = mat
    s = min(padic_val(x, p) for x in (A, B, C, D) if x != 0)
    if s:
        q = p**s
        A, B, C, D = A // q, B // q, C // q, D // q
    det = A * D - B * C
    m = padic_val(det, p)
    if m is math.inf or m >= precision - 2:
        raise PrecisionError("determinant valuation too close to carried precision")
    pm = p**m
    table = teich_table(p, precision)
    matches = []
    # branch-0 candidates at level m
    for digs in _iter_product(range(p), repeat=m):
        lam = table.digits_value(digs)
        if (A - lam * C) % pm == 0 and (B - lam * D) % pm == 0:
            k = ((A - lam * C) // pm, (B - lam * D) // pm, C, D)
            matches.append((Coset(0, m, digs), k))
            break
    if not matches and m >= 1:
        for digs in _iter_product(range(p), repeat=m - 1):
            lam = table.digits_value(digs)
            if (C - p * lam * A) % pm == 0 and (D - p * lam * B) % pm == 0:
                k = (A, B, (C - p * lam * A) // pm, (D - p * lam * B) // pm)
                matches.append((Coset(1, m - 1, digs), k))
                break
    if not matches:
        raise ArithmeticError("no canonical coset matched")
    coset, k = matches[0]
    if padic_val(k[0] * k[3] - k[1] * k[2], p) != 0:
        raise ArithmeticError("normalizing factor is not invertible")
    return coset, _substitute_poly(poly, k, r, p, precision - m)


def direct_T(f: IndFunction) -> IndFunction:
    """The defining double-coset formula, evaluated pair by pair with generic
    normalization; works on either branch.  Test oracle for apply_T."""
    p, r = f.p, f.r
    table = teich_table(p, f.precision)
    out = IndFunction(p, r, f.precision)
    for coset, poly in f.data.items():
        g = coset_matrix(coset, p, f.precision)
        for lam in range(p):
            t = table.rep[lam]
            h = (p, t, 0, 1)
            transformed = _substitute_poly(poly, (1, -t, 0, p), r, p, f.precision)
            c2, poly2 = normalize_pair(_mat_mul(g, h), transformed, p, r, f.precision)
            out.add_term(c2, poly2)
        transformed = _substitute_poly(poly, (p, 0, 0, 1), r, p, f.precision)
        c2, poly2 = normalize_pair(_mat_mul(g, (1, 0, 0, p)), transformed, p, r, f.precision)
        out.add_term(c2, poly2)
    return out.prune()


def translate(k_mat, f: IndFunction) -> IndFunction:
    """Left translation of f by an integral matrix of unit determinant."""
    out = IndFunction(f.p, f.r, f.precision)
    for coset, poly in f.data.items():
        g = coset_matrix(coset, f.p, f.precision)
        c2, poly2 = normalize_pair(_mat_mul(k_mat, g), poly, f.p, f.r, f.precision)
        out.add_term(c2, poly2)
    return out.prune()


def functions_agree(f: IndFunction, g: IndFunction, sigma: Fraction, min_val=3) -> bool:
    """True when every coefficient of f - g has valuation at least min_val
    (equality up to the carried Teichmuller precision)."""
    diff = f - g
    for poly in diff.data.values():
        for c in poly.values():
            if c.val_lb(sigma, diff.p) < min_val:
                return False
    return True


# ---------------------------------------------------------------------------
# integrality audits and reduction


class ValuationReport(NamedTuple):
    """Per-term audit of an induced function."""

    integral: bool
    min_valuation: Fraction
    entries: list  # (coset, monomial index, bound, degrees at the bound)
    failures: list  # entries with bound < 0


def audit_valuations(f: IndFunction, sigma: Fraction) -> ValuationReport:
    """Certify a lower valuation bound for every coefficient.

    A negative bound achieved by a single symbol degree is an exact failure;
    a tie between several degrees is reported as indeterminate."""
    entries = []
    failures = []
    min_val = math.inf
    for coset in sorted(f.data):
        for j in sorted(f.data[coset]):
            c = f.data[coset][j]
            bound, degs = c.min_terms(sigma, f.p)
            entries.append((coset, j, bound, tuple(degs)))
            if bound < 0:
                failures.append((coset, j, bound, tuple(degs)))
            if bound < min_val:
                min_val = bound
    if failures:
        multi = [e for e in failures if len(e[3]) > 1]
        if multi:
            raise IndeterminateCancellation(
                f"minimal valuation tied between symbol degrees at {multi[0][:2]}"
            )
        return ValuationReport(False, min_val, entries, failures)
    # re-certify through the precision-aware path
    for coset, poly in f.data.items():
        for j, c in poly.items():
            if not c.certify_val_ge(0, sigma, f.p):
                return ValuationReport(False, min_val, entries, [(coset, j, c.val_lb(sigma, f.p), ())])
    return ValuationReport(True, min_val, entries, [])


class ResidueFunction:
    """Mod-p image of an integral induced function: per coset, a polynomial
    in the residue symbol with vector coefficients."""

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        self.data: dict[Coset, dict[int, np.ndarray]] = {}

    def accumulate(self, coset: Coset, e: int, vec: np.ndarray) -> None:
        vec = np.asarray(vec, dtype=np.int64) % self.p
        if not vec.any():
            return
        comp = self.data.setdefault(coset, {})
        if e in comp:
            comp[e] = (comp[e] + vec) % self.p
        else:
            comp[e] = vec.copy()

    def prune(self) -> "ResidueFunction":
        for coset in list(self.data):
            comp = {e: v for e, v in self.data[coset].items() if v.any()}
            if comp:
                self.data[coset] = comp
            else:
                del self.data[coset]
        return self

    def map_vectors(self, fn, n_out: int) -> "ResidueFunction":
        out = ResidueFunction(self.p, n_out)
        for coset, comp in self.data.items():
            for e, v in comp.items():
                out.accumulate(coset, e, fn(v))
        return out.prune()

    def scale_expr(self, expr: ResidueExpr) -> "ResidueFunction":
        out = ResidueFunction(self.p, self.n)
        for coset, comp in self.data.items():
            for e, v in comp.items():
                for e2, c in expr.coeffs.items():
                    out.accumulate(coset, e + e2, c * v)
        return out.prune()

    def __add__(self, other: "ResidueFunction") -> "ResidueFunction":
        out = ResidueFunction(self.p, self.n)
        for part in (self, other):
            for coset, comp in part.data.items():
                for e, v in comp.items():
                    out.accumulate(coset, e, v)
        return out.prune()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueFunction) or self.p != other.p:
            return False
        a, b = self.prune().data, other.prune().data
        if set(a) != set(b):
            return False
        for coset in a:
            if set(a[coset]) != set(b[coset]):
                return False
            for e in a[coset]:
                if not np.array_equal(a[coset][e], b[coset][e]):
                    return False
        return True

    def support(self) -> list[Coset]:
        return sorted(self.data)


def reduce_mod_p(f: IndFunction, sigma: Fraction) -> ResidueFunction:
    """Residue of a certified-integral function."""
    out = ResidueFunction(f.p, f.r + 1)
    for coset, poly in f.data.items():
        for j, c in poly.items():
            expr = c.residue(sigma, f.p)
            for e, val in expr.coeffs.items():
                vec = np.zeros(f.r + 1, dtype=np.int64)
                vec[j] = val
                out.accumulate(coset, e, vec)
    return out.prune()


# ---------------------------------------------------------------------------
# the mod-p operator on weight models


def modp_T(fn: ResidueFunction, s: int) -> ResidueFunction:
    """Hecke operator on functions valued in the degree-s weight model (the
    determinant twist contributes trivially on the double coset)."""
    p = fn.p
    out = ResidueFunction(p, s + 1)
    for coset, comp in fn.data.items():
        if coset.branch != 0:
            raise NotImplementedError("branch-1 support unsupported")
        n, digits = coset.level, coset.digits
        for e, vec in comp.items():
            for lam in range(p):
                child = Coset(0, n + 1, digits + (lam,))
                total = 0
                for i in range(s + 1):
                    if vec[i]:
                        total += vec[i] * pow(-lam % p, i, p)
                if total % p:
                    w = np.zeros(s + 1, dtype=np.int64)
                    w[0] = total % p
                    out.accumulate(child, e, w)
            cs = int(vec[s])
            if cs:
                if n == 0:
                    w = np.zeros(s + 1, dtype=np.int64)
                    w[s] = cs
                    out.accumulate(ALPHA, e, w)
                else:
                    parent = Coset(0, n - 1, digits[:-1])
                    top = digits[-1]
                    w = np.array(
                        [cs * math.comb(s, i) * pow(top, s - i, p) for i in range(s + 1)],
                        dtype=np.int64,
                    )
                    out.accumulate(parent, e, w)
    return out.prune()
