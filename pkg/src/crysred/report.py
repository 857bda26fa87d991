"""Prediction-versus-computation records shared by the CLI and the test
harness, with JSON/CSV codecs that round-trip."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import asdict, dataclass, field

from .classify import (
    case_descriptor,
    predict_dim_X,
    predict_Q_structure,
    predict_X_structure,
)
from .symrep import (
    JHLabel,
    SubquotientModule,
    build_X,
    filtration_spaces,
    jh_decompose,
    quotient_Q,
    socle_labels,
    sym_power,
)

CSV_COLUMNS = [
    "p", "r", "k", "a", "b", "n", "u", "sigma_digits", "delta",
    "dim_predicted", "dim_computed", "q_factors_predicted", "q_factors_computed", "pass",
]


def factors_to_str(factors: Counter) -> str:
    """Canonical string form 's.t^mult' joined by '+', sorted."""
    bits = []
    for (s, t), m in sorted(factors.items()):
        bits.append(f"{s}.{t}" + (f"^{m}" if m > 1 else ""))
    return "+".join(bits) if bits else "-"


def factors_from_str(text: str) -> Counter:
    out: Counter = Counter()
    if text == "-":
        return out
    for bit in text.split("+"):
        if "^" in bit:
            head, mult = bit.split("^")
        else:
            head, mult = bit, "1"
        s, t = head.split(".")
        out[JHLabel(int(s), int(t))] += int(mult)
    return out


@dataclass
class ReportRecord:
    """One prediction-vs-brute-force comparison at (p, r)."""

    p: int
    r: int
    k: int
    a: int
    b: int
    n: int
    u: int
    sigma_digits: int
    delta: int
    dim_predicted: int = -1
    dim_computed: int = -1
    x_factors_predicted: str = "-"
    x_factors_computed: str = "-"
    q_factors_predicted: str = "-"
    q_factors_computed: str = "-"
    # dimensions of the intersections with the theta filtration:
    # (X_(r-1) n V*, X_(r-1) n V**, X_r n V*, X_r n V**)
    filtration_dims: tuple[int, int, int, int] | None = None
    passed: bool = True
    discrepancies: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRecord":
        d = dict(d)
        if d.get("filtration_dims") is not None:
            d["filtration_dims"] = tuple(d["filtration_dims"])
        return cls(**d)

    def csv_row(self) -> list[str]:
        return [
            str(getattr(self, c)) if c != "pass" else str(self.passed)
            for c in CSV_COLUMNS
        ]


def _check_socle(tag: str, socle: Counter, pred, discrepancies: list[str]) -> None:
    for lab in pred.socle_contains:
        if socle[lab] == 0:
            discrepancies.append(f"{tag}: expected socle constituent {lab} missing")
    for lab in pred.socle_excludes:
        if socle[lab] > 0:
            discrepancies.append(f"{tag}: socle contains excluded constituent {lab}")


def structure_report(p: int, r: int, checks=("dim", "x", "q")) -> ReportRecord:
    """Compare the closed-form predictions with the brute-force engine."""
    t0 = time.time()
    desc = case_descriptor(p, r)
    rec = ReportRecord(
        p=p, r=r, k=desc.k, a=desc.a, b=desc.b, n=desc.n, u=desc.u,
        sigma_digits=desc.sigma_digits, delta=desc.delta,
    )
    X = build_X(p, r, "second")
    if "dim" in checks:
        rec.dim_predicted = predict_dim_X(desc)
        rec.dim_computed = X.dim
        if rec.dim_predicted != rec.dim_computed:
            rec.discrepancies.append(
                f"dim: predicted {rec.dim_predicted}, computed {rec.dim_computed}"
            )
    if "x" in checks:
        pred = predict_X_structure(desc)
        mod = SubquotientModule(sym_power(p, r), X.space, None)
        got = jh_decompose(mod)
        rec.x_factors_predicted = factors_to_str(pred.factors)
        rec.x_factors_computed = factors_to_str(got)
        if pred.factors != got:
            rec.discrepancies.append(
                f"x-factors: predicted {rec.x_factors_predicted}, got {rec.x_factors_computed}"
            )
        if pred.dimension != X.dim:
            rec.discrepancies.append("x-structure dimension mismatch")
        _check_socle("x", socle_labels(mod), pred, rec.discrepancies)
        xtop = build_X(p, r, "top")
        vstar, vstar2 = filtration_spaces(p, r)
        rec.filtration_dims = (
            X.space.intersect(vstar).dim,
            X.space.intersect(vstar2).dim,
            xtop.space.intersect(vstar).dim,
            xtop.space.intersect(vstar2).dim,
        )
    if "q" in checks:
        pred = predict_Q_structure(desc)
        q = quotient_Q(p, r)
        rec.q_factors_predicted = factors_to_str(pred.factors)
        rec.q_factors_computed = factors_to_str(q.factors)
        if pred.factors != q.factors:
            rec.discrepancies.append(
                f"q-factors: predicted {rec.q_factors_predicted}, got {rec.q_factors_computed}"
            )
        if pred.dimension != q.dimension:
            rec.discrepancies.append("q dimension mismatch")
        _check_socle("q", q.socle, pred, rec.discrepancies)
    rec.passed = not rec.discrepancies
    rec.seconds = round(time.time() - t0, 4)
    return rec
