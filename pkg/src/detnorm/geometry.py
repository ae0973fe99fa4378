"""Batyrev-Manin type invariants from boundary-divisor data.

Works over a simplicial effective cone spanned by boundary divisors: each
divisor carries its adjunction coefficient kappa (anticanonical coefficient
minus one), its coefficient in the chosen big divisor class, and the order
of the residue of the Brauer classes along it.  All arithmetic is exact
rational; ties in the defining maximum are kept, so the face can have any
size.  The blown-up compactification of PGL_n with the hyperplane-pullback
polarization is built in.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .brauer import BrauerClass

__all__ = [
    "BoundaryDatum",
    "ManinInvariants",
    "manin_invariants",
    "pgl_boundary",
    "predicted_asymptotic",
    "load_boundary_data",
]


@dataclass(frozen=True)
class BoundaryDatum:
    """Per-divisor data: label, kappa >= 0, big-divisor coefficient > 0,
    and the order of the residue group along the divisor."""

    label: str
    kappa: Fraction
    coeff: Fraction
    residue_order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.coeff <= 0:
            raise ValueError("divisor coefficient must be positive (big class, interior of the cone)")
        if self.residue_order < 1:
            raise ValueError("residue order must be at least 1")


@dataclass(frozen=True)
class ManinInvariants:
    """Growth exponent a, its argmax face, log-power data b, m, delta.

    The predicted counting law is N(B) ~ c * B^a * (log B)^(m-1), with
    m = b - delta; delta accumulates (1 - 1/r) over the face.
    """

    a: Fraction
    face: tuple[str, ...]
    b: int
    m: Fraction
    delta: Fraction

    def __post_init__(self):
        if self.b != len(self.face) or self.b < 1:
            raise ValueError("b must equal the face size")
        if self.m + self.delta != self.b:
            raise ValueError("m + delta must equal b")

    @property
    def log_exponent(self) -> Fraction:
        return self.m - 1


def manin_invariants(data: Sequence[BoundaryDatum]) -> ManinInvariants:
    """Exact invariants of a big divisor class from boundary data.

    a = max (1 + kappa)/coeff over the divisors; the face is the full
    argmax set; b its size; m the sum of 1/residue_order over the face.
    """
    if not data:
        raise ValueError("boundary data must be nonempty")
    ratios = [(Fraction(1) + d.kappa) / d.coeff for d in data]
    a = max(ratios)
    face = [d for d, r in zip(data, ratios) if r == a]
    labels = tuple(d.label for d in face)
    b = len(face)
    m = sum((Fraction(1, d.residue_order) for d in face), Fraction(0))
    delta = sum((1 - Fraction(1, d.residue_order) for d in face), Fraction(0))
    return ManinInvariants(a=a, face=labels, b=b, m=m, delta=delta)


def pgl_boundary(n: int, b: BrauerClass, hyperplane_pullback: bool = True) -> list[BoundaryDatum]:
    """Boundary data of the blown-up compactification of PGL_n, polarized
    by the pullback of the hyperplane class.

    The boundary consists of the strict transform of the determinant
    hypersurface plus exceptional divisors over the smaller minor-rank
    loci.  The pullback polarization puts only the determinant divisor on
    the face (the exceptional coefficients in the adjoint divisor are
    strictly positive), and the residue of (det, chi) along it has full
    order.  Exceptional kappa values use discrepancy 1; any positive value
    gives the same invariants since those divisors are off the face, and
    their residue orders are likewise irrelevant (recorded as 1).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if b.n != n:
        raise ValueError(f"brauer class lives on n={b.n}, not n={n}")
    if n % b.order != 0:
        raise ValueError("class order must divide n")
    if not hyperplane_pullback:
        raise NotImplementedError(
            "only the hyperplane-pullback polarization is built in; "
            "supply explicit BoundaryDatum records for other classes"
        )
    data = [
        # det divisor: degree n in the coordinates, so L = (1/n) * (its class);
        # anticanonical degree n^2 gives 1 + kappa = n
        BoundaryDatum(f"Y{n}", kappa=Fraction(n - 1), coeff=Fraction(1, n),
                      residue_order=b.order)
    ]
    for r in range(2, n):
        # exceptional divisor over the rank-r locus: det vanishes to order
        # n - r there, and the adjoint coefficient stays positive
        data.append(
            BoundaryDatum(
                f"E{r}",
                kappa=Fraction(n * (n - r) - 2),
                coeff=Fraction(n - r, n),
                residue_order=1,
            )
        )
    return data


def predicted_asymptotic(inv: ManinInvariants, B: float) -> tuple[tuple[Fraction, Fraction], float]:
    """The exponent pair (a, m-1) and the un-normalized model value
    B^a * (log B)^(m-1).  The leading constant is out of scope (estimated
    empirically by the experiment layer, never computed)."""
    if B <= math.e:
        raise ValueError("model evaluation needs B > e")
    pair = (inv.a, inv.m - 1)
    value = float(B) ** float(inv.a) * math.log(B) ** float(inv.m - 1)
    return pair, value


def load_boundary_data(source) -> list[BoundaryDatum]:
    """Read a JSON list of {label, kappa, coeff, residue_order}.

    kappa and coeff accept integers or "p/q" strings (exact rationals).
    """
    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            items = json.load(fh)
    else:
        items = source
    out = []
    for it in items:
        out.append(
            BoundaryDatum(
                label=str(it["label"]),
                kappa=Fraction(str(it["kappa"])),
                coeff=Fraction(str(it["coeff"])),
                residue_order=int(it.get("residue_order", 1)),
            )
        )
    return out
