"""Cyclic-algebra classes on PGL_n and their zero-locus predicates.

A class pairs the determinant map with a Dirichlet character chi of order
d | n.  A rational matrix point lies in the zero locus iff its determinant
is a global norm from the cyclic field cut out by chi; locally the class
evaluates through the Artin symbol of the determinant.  Values are kept in
exact logarithmic form (Z/d), never as floating roots of unity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arithmetic import (
    CyclicCharacter,
    Place,
    Rational,
    artin_symbol,
    is_global_norm,
    load_character,
    relevant_places,
)

__all__ = [
    "BrauerClass",
    "BoundaryPointError",
    "zero_locus_indicator",
    "local_character_value",
    "local_kernel_indicator",
    "det_is_norm",
    "det_local_value",
    "expand_class_group",
    "load_brauer_class",
]


class BoundaryPointError(ValueError):
    """Raised when a matrix with zero determinant is evaluated: the point
    lies on the boundary hypersurface, outside the open cell."""


@dataclass(frozen=True)
class BrauerClass:
    """The pair (det, chi) on n x n matrix points; its order equals chi's."""

    n: int
    chi: CyclicCharacter

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("matrix size must be at least 2")
        if self.n % self.chi.order != 0:
            raise ValueError(
                f"character order {self.chi.order} must divide n={self.n}: "
                "otherwise 'det is a norm' is not well-posed on projective points"
            )

    @property
    def order(self) -> int:
        return self.chi.order

    def fingerprint(self) -> str:
        return f"(det_{self.n},{self.chi.fingerprint()})"


def _require_nonzero_det(det) -> None:
    if det == 0:
        raise BoundaryPointError("point on boundary hypersurface (det = 0)")


def det_is_norm(det: Rational, b: BrauerClass) -> bool:
    """Zero-locus membership straight from a determinant value.

    Well-defined on projective points: a representative change scales det
    by an n-th power, which is a norm since the character order divides n.
    """
    _require_nonzero_det(det)
    return is_global_norm(det, b.chi)


def det_local_value(det: Rational, b: BrauerClass, v: Place) -> int:
    """Log of the local evaluation chi_v(det) in Z/d."""
    _require_nonzero_det(det)
    return b.chi.log_value(artin_symbol(det, b.chi.conductor, v))


def zero_locus_indicator(point, b: BrauerClass) -> bool:
    """True iff the point's determinant is a norm from the field of b.chi."""
    return det_is_norm(point.det(), b)


def local_character_value(point, b: BrauerClass, v: Place) -> int:
    """Local evaluation of b at the point, as a log in Z/d.

    Summing over all relevant places gives 0 mod d (global reciprocity),
    which is what forces the zero locus to be cut out by finitely many
    local conditions.
    """
    return det_local_value(point.det(), b, v)


def reciprocity_places(det: Rational, b: BrauerClass) -> list[Place]:
    """Places where the local value of b can be nonzero on this det."""
    return relevant_places(det, Fraction(b.chi.conductor))


def expand_class_group(classes: Sequence[BrauerClass]) -> list[BrauerClass]:
    """The finite group generated by the given classes (same n), as a list.

    Only generators are ever stored; expansion is on demand.
    """
    if not classes:
        raise ValueError("need at least one class")
    n = classes[0].n
    if any(c.n != n for c in classes):
        raise ValueError("classes live on different groups")
    seen: dict[str, BrauerClass] = {}
    frontier = [BrauerClass(n, classes[0].chi ** 0)]  # identity
    seen[frontier[0].fingerprint()] = frontier[0]
    while frontier:
        cur = frontier.pop()
        for gen in classes:
            nxt = BrauerClass(n, cur.chi * gen.chi)
            key = nxt.fingerprint()
            if key not in seen:
                seen[key] = nxt
                frontier.append(nxt)
    return sorted(seen.values(), key=lambda c: (c.chi.conductor, c.chi.order, c.fingerprint()))


def local_kernel_indicator(point, classes: Iterable[BrauerClass], v: Place) -> Fraction:
    """Average of the local values of the group generated by `classes`.

    Character orthogonality makes this the exact {0,1} indicator of lying
    in every local kernel at v.  The average is evaluated exactly: the
    local values of a group of classes at a fixed point form a cyclic
    group of roots of unity, and a full set of t-th roots sums to zero for
    t > 1.  Returns a Fraction (always 0 or 1).
    """
    det = point.det()
    _require_nonzero_det(det)
    group = expand_class_group(list(classes))
    big = math.lcm(*(c.order for c in group))
    logs = [det_local_value(det, c, v) * (big // c.order) % big for c in group]
    g = big
    for t in logs:
        g = math.gcd(g, t)
    image_order = big // g
    # sanity: values of a homomorphism hit each image element equally often
    counts: dict[int, int] = {}
    for t in logs:
        counts[t] = counts.get(t, 0) + 1
    expected = {(k * g) % big for k in range(image_order)}
    if set(counts) != expected or len(set(counts.values())) != 1:
        raise AssertionError("local values do not form a subgroup; invalid class data")
    # sum over the group: |kernel| * (sum of all image_order-th roots of 1)
    return Fraction(1) if image_order == 1 else Fraction(0)


def load_brauer_class(source) -> BrauerClass:
    """Read a class file {n, character_file | character} (JSON)."""
    import os

    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        base = os.path.dirname(os.fspath(source))
    else:
        data = source
        base = "."
    if "character" in data:
        chi = load_character(data["character"])
    else:
        path = data["character_file"]
        if not os.path.isabs(path):
            path = os.path.join(base, path)
        chi = load_character(path)
    return BrauerClass(int(data["n"]), chi)
