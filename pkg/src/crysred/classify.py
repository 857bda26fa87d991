"""Closed-form predictions for the brute-force module computations, the
semisimple mod-p correspondence table, and the classifier for the
semisimplified reduction at fractional slope in (1, 2).

The prediction functions are pure case analysis on congruence data; the
test-suite checks them against the brute-force engine over full parameter
sweeps.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .arith import digit_sum, padic_val, require_odd_prime
from .errors import DomainError
from .symrep import JHLabel, jh_label


# ---------------------------------------------------------------------------
# congruence-class bookkeeping


@dataclass(frozen=True)
class CaseDescriptor:
    """All congruence data controlling the module structure at (p, r)."""

    p: int
    r: int
    k: int
    a: int  # class of r mod p-1 in 1..p-1
    b: int  # class of r mod p-1 in 2..p
    n: int  # p-adic valuation of r
    u: int  # r / p^n
    sigma_digits: int  # digit sum of u - 1
    delta: int  # 0 iff r = u
    p_div_r: bool
    p_div_r_minus_1: bool
    p_div_r_minus_b: bool
    p2_div_r_minus_b: bool


def case_descriptor(p: int, r: int) -> CaseDescriptor:
    require_odd_prime(p)
    if r < 1:
        raise DomainError("need r >= 1")
    a = r % (p - 1) or p - 1
    b = a if a != 1 else p
    n = padic_val(r, p)
    u = r // p**n
    return CaseDescriptor(
        p=p,
        r=r,
        k=r + 2,
        a=a,
        b=b,
        n=n,
        u=u,
        sigma_digits=digit_sum(u - 1, p),
        delta=0 if r == u else 1,
        p_div_r=r % p == 0,
        p_div_r_minus_1=(r - 1) % p == 0,
        p_div_r_minus_b=(r - b) % p == 0,
        p2_div_r_minus_b=(r - b) % (p * p) == 0,
    )


# ---------------------------------------------------------------------------
# structure predictions


@dataclass(frozen=True)
class StructurePrediction:
    """Predicted dimension and layer structure of a module.

    ``layers`` lists the irreducible constituents from submodule to quotient;
    ``socle_contains``/``socle_excludes`` hold the split/non-split content
    that is actually asserted for the case at hand.
    """

    dimension: int
    layers: tuple[tuple[JHLabel, ...], ...]
    socle_contains: frozenset = frozenset()
    socle_excludes: frozenset = frozenset()
    note: str = ""

    @property
    def factors(self) -> Counter:
        out: Counter = Counter()
        for layer in self.layers:
            out.update(layer)
        return out


def predict_dim_X(desc: CaseDescriptor) -> int:
    """Dimension of the submodule generated by the second-highest monomial,
    from the digit sum of u - 1 (r = p^n u)."""
    p = desc.p
    if desc.r < 2 * p + 1:
        raise DomainError("dimension formula needs r >= 2p+1")
    s = desc.sigma_digits
    if s <= p - 1:
        return 2 * s + 2 + desc.delta * (p + 1 - s)
    return 2 * p + 2


def _second_top_factors(p: int) -> tuple[JHLabel, ...]:
    # constituents of the degree-(2p-1) module
    return (jh_label(p - 2, 1, p), jh_label(1, 0, p), jh_label(p - 2, 1, p))


def predict_X_structure(desc: CaseDescriptor) -> StructurePrediction:
    """Layer structure of the second-monomial submodule per congruence case."""
    p, r, a = desc.p, desc.r, desc.a
    if a == 1:
        if r <= p:
            raise DomainError("need r > p for the second-monomial structure")
        if digit_sum(r - 1, p) == p - 1:
            return StructurePrediction(
                dimension=2 * p,
                layers=(_second_top_factors(p),),
                socle_contains=frozenset({jh_label(p - 2, 1, p)}),
                socle_excludes=frozenset({jh_label(1, 0, p)}),
                note="isomorphic to the full degree-(2p-1) module",
            )
        bottom = (jh_label(1, p - 1, p),)
        if desc.u == 1:
            return StructurePrediction(
                dimension=p + 3,
                layers=(bottom, (jh_label(1, 0, p), jh_label(p - 2, 1, p))),
                socle_contains=frozenset(bottom),
                note="pure p-power: top is the quotient of the degree-(2p-1) module "
                "by its singular part",
            )
        return StructurePrediction(
            dimension=2 * p + 2,
            layers=(bottom, _second_top_factors(p)),
            socle_contains=frozenset(bottom),
        )
    if r <= 2 * p:
        raise DomainError("need r > 2p for the higher congruence classes")
    top = (jh_label(a - 2, 1, p), jh_label(a, 0, p))
    if desc.sigma_digits == a - 1:
        if not desc.p_div_r:
            return StructurePrediction(
                dimension=2 * a,
                layers=(top,),
                socle_contains=frozenset(top),
                note="direct sum of two irreducibles",
            )
        return StructurePrediction(
            dimension=a + p + 2,
            layers=((jh_label(p - a + 1, a - 1, p),), top),
        )
    return StructurePrediction(
        dimension=2 * p + 2,
        layers=((jh_label(p - a - 1, a, p), jh_label(p - a + 1, a - 1, p)), top),
    )


def predict_Q_structure(desc: CaseDescriptor) -> StructurePrediction:
    """Layer structure of the terminal quotient per congruence case."""
    p, r, b = desc.p, desc.r, desc.b
    if r <= 2 * p:
        raise DomainError("terminal quotient predictions need r > 2p")
    if b == p:
        if not desc.p_div_r:
            return StructurePrediction(dimension=2, layers=((jh_label(1, 0, p),),))
        return StructurePrediction(
            dimension=p + 1,
            layers=((jh_label(p - 2, 1, p),), (jh_label(1, 0, p),)),
            socle_contains=frozenset({jh_label(p - 2, 1, p)}),
            socle_excludes=frozenset({jh_label(1, 0, p)}),
            note="non-split extension",
        )
    if b == 2:
        J2 = jh_label(p - 3, 2, p)
        if not (desc.p_div_r or desc.p_div_r_minus_1):
            return StructurePrediction(dimension=p - 2, layers=((J2,),))
        if desc.p_div_r_minus_1:
            both = (jh_label(p - 1, 1, p), J2)
            return StructurePrediction(
                dimension=2 * p - 2,
                layers=(both,),
                socle_contains=frozenset(both),
                note="direct sum",
            )
        return StructurePrediction(
            dimension=p - 1,
            layers=((jh_label(0, 1, p),), (J2,)),
            socle_contains=frozenset({jh_label(0, 1, p)}),
        )
    # 3 <= b <= p-1
    J1 = jh_label(p - b + 1, b - 1, p)
    J2 = jh_label(p - b - 1, b, p)
    if not desc.p_div_r_minus_b:
        return StructurePrediction(
            dimension=2 * p - 2 * b + 2,
            layers=((J1, J2),),
            socle_contains=frozenset({J1, J2}),
            note="direct sum",
        )
    J0 = jh_label(b - 2, 1, p)
    return StructurePrediction(
        dimension=2 * p + 1 - b,
        layers=((J0,), (J1,), (J2,)),
        socle_contains=frozenset({J0}),
        socle_excludes=frozenset({J1}),
        note="bottom two layers form a non-split extension",
    )


# ---------------------------------------------------------------------------
# Galois-side descriptions and the semisimple correspondence


@dataclass(frozen=True)
class GaloisRep:
    """Semisimplified two-dimensional mod-p representation of the local
    Galois group, up to the usual presentation ambiguities."""

    p: int
    kind: str  # "induced" | "reducible" | "undetermined"
    induced_exp: int | None = None  # exponent of the level-2 fundamental character
    unramified_twist: str = "1"
    characters: tuple[tuple[str, int], ...] = ()  # (unramified scalar, omega exponent)
    alternatives: tuple["GaloisRep", ...] = ()
    notes: tuple[str, ...] = ()

    def render(self) -> str:
        if self.kind == "induced":
            body = f"ind(w2^{self.induced_exp})"
            if self.unramified_twist != "1":
                body = f"{body}*unr({self.unramified_twist})"
            return body
        if self.kind == "reducible":
            bits = []
            for scalar, e in self.characters:
                chunk = f"unr({scalar})"
                if e % (self.p - 1):
                    wexp = e % (self.p - 1)
                    chunk += "*w" if wexp == 1 else f"*w^{wexp}"
                bits.append(chunk)
            return " + ".join(bits)
        return "undetermined{" + "; ".join(alt.render() for alt in self.alternatives) + "}"

    def same_as(self, other: "GaloisRep") -> bool:
        """Equality up to the standard identifications (conjugate exponent
        for induced representations, order of the two characters)."""
        if self.p != other.p or self.kind != other.kind:
            return False
        m = self.p**2 - 1
        if self.kind == "induced":
            orb = {self.induced_exp % m, self.induced_exp * self.p % m}
            return (
                other.induced_exp % m in orb and self.unramified_twist == other.unramified_twist
            )
        if self.kind == "reducible":
            mine = sorted((s, e % (self.p - 1)) for s, e in self.characters)
            theirs = sorted((s, e % (other.p - 1)) for s, e in other.characters)
            return mine == theirs
        if len(self.alternatives) != len(other.alternatives):
            return False
        return all(x.same_as(y) for x, y in zip(self.alternatives, other.alternatives))


def induced(p: int, exp: int, twist: str = "1", notes: tuple[str, ...] = ()) -> GaloisRep:
    exp %= p * p - 1
    if exp % (p + 1) == 0:
        raise ValueError("exponent divisible by p+1 does not give an irreducible induction")
    return GaloisRep(p, "induced", induced_exp=exp, unramified_twist=twist, notes=notes)


def reducible(p: int, chars, notes: tuple[str, ...] = ()) -> GaloisRep:
    return GaloisRep(p, "reducible", characters=tuple(chars), notes=notes)


@dataclass(frozen=True)
class LLCEntry:
    """One matched pair of the semisimple correspondence: the Galois side and
    the Hecke-parameter side (list of (s, scalar, eta-exponent) labels)."""

    p: int
    galois: GaloisRep
    gl2: tuple[tuple[int, str, int], ...]

    def render(self) -> str:
        gl2 = " + ".join(f"pi({s},{lam},w^{e})" for s, lam, e in self.gl2)
        return f"{self.galois.render()}  <->  {gl2}"


def _inv_scalar(lam: str) -> str:
    table = {"i": "-i", "-i": "i", "1": "1", "-1": "-1", "x": "1/x", "1/x": "x"}
    if lam in table:
        return table[lam]
    return f"1/({lam})"


def llc_image(p: int, s: int, lam: str | int, eta_exp: int = 0) -> LLCEntry:
    """The semisimple correspondence at parameters (s, lambda, eta = w^eta_exp).

    ``lam`` is 0 for the supersingular case or a symbolic unit name
    ("x", "i", "-i", ...).  Both sides of the matched pair are returned.
    """
    require_odd_prime(p)
    if not 0 <= s <= p - 1:
        raise DomainError(f"s out of range: {s}")
    eta_exp %= p - 1
    if lam == 0 or lam == "0":
        galois = induced(p, s + 1 + (p + 1) * eta_exp)
        return LLCEntry(p, galois, ((s, "0", eta_exp),))
    lam = str(lam)
    s2 = (p - 3 - s) % (p - 1)
    galois = reducible(p, ((lam, s + 1 + eta_exp), (_inv_scalar(lam), eta_exp)))
    gl2 = ((s, lam, eta_exp), (s2, _inv_scalar(lam), (eta_exp + s + 1) % (p - 1)))
    return LLCEntry(p, galois, gl2)


def hecke_quotient_image(p: int, label: JHLabel, refinement: str = "supersingular") -> GaloisRep:
    """Galois side attached to a quotient of the induction from one weight.

    ``refinement`` records how the Hecke action on the surviving weight was
    pinned down: "supersingular" (factors through the cokernel of T) or
    "t2plus1" (factors through the cokernel of T^2 + 1, giving the pair of
    characters with scalars +-i)."""
    s, t = label
    if refinement == "t2plus1":
        if s != p - 2:
            raise ValueError("the T^2+1 refinement only arises at s = p-2")
        # pi(p-2, +-i, w^t) pairs up to unr(i) w^t + unr(-i) w^t
        return reducible(p, (("i", t), ("-i", t)))
    return induced(p, s + 1 + (p + 1) * t)


def surviving_factor(desc: CaseDescriptor) -> tuple[JHLabel, str]:
    """The constituent of the terminal quotient that survives elimination,
    with the refinement used when it has dimension p-1."""
    p, b = desc.p, desc.b
    if b == p:
        if desc.p2_div_r_minus_b:
            return jh_label(p - 2, 1, p), "t2plus1"
        return jh_label(1, 0, p), "supersingular"
    if b == 2:
        if desc.p_div_r_minus_1:
            return jh_label(p - 1, 1, p), "supersingular"
        if desc.p_div_r:
            return jh_label(0, 1, p), "supersingular"
        return jh_label(p - 3, 2, p), "supersingular"
    if desc.p_div_r_minus_b:
        return jh_label(p - b - 1, b, p), "supersingular"
    return jh_label(p - b + 1, b - 1, p), "supersingular"


# ---------------------------------------------------------------------------
# the classifier


def _star_alternatives(desc: CaseDescriptor) -> tuple[GaloisRep, ...]:
    p, b = desc.p, desc.b
    if p >= 5:
        if desc.p_div_r_minus_b:
            return (
                induced(p, b + 1),
                induced(p, b + p),
                reducible(p, (("x", 2), ("1/x", 2))),
                reducible(p, (("x", 3), ("1/x", 1))),
            )
        return (
            induced(p, b + p),
            reducible(p, (("x", 2), ("1/x", 2))),
        )
    # p = 3: the b = 3 class coincides with b = p
    if desc.p2_div_r_minus_b:
        return (
            reducible(p, (("i", 1), ("-i", 1))),
            induced(p, 2),
        )
    return (
        induced(p, b + p),
        reducible(p, (("x", 0), ("1/x", 0))),
    )


def classify_reduction(
    p: int, k: int, slope: Fraction, hyp_star: str = "unknown"
) -> GaloisRep:
    """Shape of the semisimplified reduction for weight k and the given
    fractional slope in (1, 2).

    ``hyp_star`` reports whether the genericity condition on the eigenvalue
    (needed exactly when the class of r = k-2 is 3 and the slope is 3/2)
    holds; "fails"/"unknown" produce an explicit list of alternatives there.
    """
    require_odd_prime(p)
    slope = Fraction(slope)
    if not Fraction(1) < slope < Fraction(2):
        raise DomainError(f"slope {slope} outside the open interval (1, 2)")
    if hyp_star not in ("holds", "fails", "unknown"):
        raise DomainError(f"bad hyp_star value: {hyp_star}")
    if k < 2 * p + 2:
        raise DomainError(
            f"k = {k} < 2p+2 = {2*p+2}: weights this small are covered by known results"
        )
    r = k - 2
    desc = case_descriptor(p, r)
    b = desc.b
    star_relevant = b == 3 and slope == Fraction(3, 2)
    notes = []
    if hyp_star != "unknown" and not star_relevant:
        notes.append("hyp_star ignored: only relevant when b = 3 and slope = 3/2")
    if star_relevant and hyp_star != "holds":
        return GaloisRep(
            p,
            "undetermined",
            alternatives=_star_alternatives(desc),
            notes=(
                "b = 3 with slope exactly 3/2 requires the genericity hypothesis "
                f"(hyp_star = {hyp_star})",
            ),
        )
    if b == 2:
        rep = induced(p, b + 1 if not (desc.p_div_r or desc.p_div_r_minus_1) else b + p)
    elif b < p:
        rep = induced(p, b + p if not desc.p_div_r_minus_b else b + 1)
    else:
        if not desc.p2_div_r_minus_b:
            rep = induced(p, b + p)
        else:
            rep = reducible(p, (("i", 1), ("-i", 1)))
    if notes:
        rep = GaloisRep(
            p,
            rep.kind,
            induced_exp=rep.induced_exp,
            unramified_twist=rep.unramified_twist,
            characters=rep.characters,
            notes=tuple(notes),
        )
    return rep
