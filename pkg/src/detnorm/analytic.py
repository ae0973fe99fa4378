"""Numerical analytic-number-theory oracles.

Truncated partial Euler products restricted to primes split for a finite
character group, two-point log-log estimation of the branch order of their
singularity at s=1, the quadratic-residue-class product for the density of
sums of two squares, and an exact bit-sieve counter for that density.

Accuracy caveat, documented rather than hidden: a product truncated at P
resolves the singularity only on offsets eps with eps*log(P) of moderate
size, and there the local log-log slope carries an irreducible bias of
roughly gamma*eps + P^(-eps) (times 1/|group|).  At P = 1e7 the slope for
the zeta product tops out near 0.85, not 1.  Estimates are exponent
*detectors*, not constant-accurate evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .arithmetic import CyclicCharacter, primes_up_to, trivial_character

__all__ = [
    "CharacterGroup",
    "SingularityEstimate",
    "partial_euler_product",
    "singularity_order_estimate",
    "landau_constant",
    "two_squares_count",
]

EPS_FLOOR = 1e-4  # machine-safe evaluation floor for 1+eps
MIN_PRIME_BOUND = 10**5

#: default for the reliability heuristic eps >= scale / log(P); calibrated
#: so the detector's useful zone (eps*log P around 2..4) is reachable
DEFAULT_FLOOR_SCALE = 2.0


@dataclass(frozen=True)
class CharacterGroup:
    """A finite set of characters closed under product and inverse."""

    characters: tuple[CyclicCharacter, ...]

    def __post_init__(self):
        chars = self.characters
        if not chars:
            raise ValueError("character group must be nonempty")
        prints = {c.fingerprint() for c in chars}
        if len(prints) != len(chars):
            raise ValueError("duplicate characters in group")
        if trivial_character().fingerprint() not in prints:
            raise ValueError("group must contain the trivial character")
        for c in chars:
            if c.inverse().fingerprint() not in prints:
                raise ValueError("group is not closed under inversion")
            for d in chars:
                if (c * d).fingerprint() not in prints:
                    raise ValueError("group is not closed under multiplication")

    @classmethod
    def generated_by(cls, *gens: CyclicCharacter) -> "CharacterGroup":
        seen = {trivial_character().fingerprint(): trivial_character()}
        frontier = list(seen.values())
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = cur * g
                key = nxt.fingerprint()
                if key not in seen:
                    seen[key] = nxt
                    frontier.append(nxt)
        return cls(tuple(sorted(seen.values(), key=lambda c: (c.conductor, c.order, c.fingerprint()))))

    def __len__(self):
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def contains(self, chi: CyclicCharacter) -> bool:
        return chi.fingerprint() in {c.fingerprint() for c in self.characters}


def _split_primes_mask(p: np.ndarray, group: CharacterGroup, chi: CyclicCharacter) -> np.ndarray:
    """Primes unramified for chi and every group member, split for the group.

    Group tables are -1 on non-units, so `== 0` enforces both p coprime to
    the conductor and a trivial value; for chi only coprimality is needed.
    """
    mask = np.ones(len(p), dtype=bool)
    for rho in group:
        if rho.conductor > 1:
            mask &= rho.value_table()[p % rho.conductor] == 0
    if chi.conductor > 1:
        mask &= chi.value_table()[p % chi.conductor] != -1
    return mask


def partial_euler_product(
    chi: CyclicCharacter, group: CharacterGroup, s: float, prime_bound: int
) -> float | complex:
    """prod over split primes p <= P of (1 - chi(p) p^-s)^-1.

    Accumulated in log form.  Real characters give a float; otherwise the
    complex value is returned (its modulus is what the order estimator
    uses).  Truncation only converges for s > 1.
    """
    if s <= 1:
        raise ValueError("the truncated product is only meaningful for s > 1")
    if prime_bound < 2:
        raise ValueError("prime bound must be at least 2")
    p_int = primes_up_to(int(prime_bound))
    p_int = p_int[_split_primes_mask(p_int, group, chi)]
    if chi.conductor == 1:
        vals = np.zeros(len(p_int), dtype=np.int64)
    else:
        vals = chi.value_table()[p_int % chi.conductor]
    p = p_int.astype(np.float64)
    x = p**-s
    d = chi.order
    if chi.is_real():
        signs = np.where(vals == 0, 1.0, -1.0)
        log_sum = float(-np.log1p(-signs * x).sum())
        return math.exp(log_sum)
    z = np.exp(2j * np.pi * vals / d)
    log_sum = complex(-np.log(1 - z * x).sum())
    return complex(np.exp(log_sum))


@dataclass(frozen=True)
class SingularityEstimate:
    """Two-point local power-law exponent of L(1+eps) near eps=0.

    order ~ 1/|group| flags a branch singularity (the group's split-prime
    density), order ~ 0 its absence.
    """

    order: float
    eps1: float
    eps2: float
    prime_bound: int

    def __post_init__(self):
        if not self.eps1 > self.eps2 >= EPS_FLOOR:
            raise ValueError("need eps1 > eps2 >= the evaluation floor")
        if self.prime_bound < MIN_PRIME_BOUND:
            raise ValueError(f"prime bound below {MIN_PRIME_BOUND}")


def singularity_order_estimate(
    chi: CyclicCharacter,
    group: CharacterGroup,
    eps1: float = 0.20,
    eps2: float = 0.15,
    prime_bound: int = 10**7,
    floor_scale: float = DEFAULT_FLOOR_SCALE,
) -> SingularityEstimate:
    """Estimate the power-law order of the truncated product at s=1.

    q = [log L(1+eps1) - log L(1+eps2)] / [log eps2 - log eps1].

    Both offsets must clear scale/log(P): below that the truncated product
    is effectively constant in s and sees no singularity at all.  See the
    module docstring for the bias this estimator carries even above the
    floor.
    """
    if eps2 < EPS_FLOOR:
        raise ValueError(f"eps2 below the evaluation floor {EPS_FLOOR}")
    if eps1 <= eps2:
        raise ValueError("need eps1 > eps2")
    if prime_bound < MIN_PRIME_BOUND:
        raise ValueError(f"prime bound must be at least {MIN_PRIME_BOUND}")
    floor = floor_scale / math.log(prime_bound)
    if eps2 < floor:
        raise ValueError(
            f"eps2={eps2} is below the truncation-reliability floor {floor:.4g} "
            f"(= {floor_scale}/log({prime_bound}))"
        )
    l1 = abs(partial_euler_product(chi, group, 1 + eps1, prime_bound))
    l2 = abs(partial_euler_product(chi, group, 1 + eps2, prime_bound))
    q = (math.log(l1) - math.log(l2)) / (math.log(eps2) - math.log(eps1))
    return SingularityEstimate(order=q, eps1=eps1, eps2=eps2, prime_bound=prime_bound)


def landau_constant(prime_bound: int = 10**7) -> float:
    """(1/sqrt 2) * prod over p = 3 mod 4, p <= P of (1 - p^-2)^(-1/2).

    Truncation tail: the dropped factors change log K by less than
    sum_{m > P} m^-2 < 1/P, far below 1e-5 for P >= 1e6.  Small P is
    allowed for direct formula checks; accuracy needs P >= 1e3.
    """
    if prime_bound < 3:
        raise ValueError("prime bound must be at least 3")
    p = primes_up_to(int(prime_bound))
    p3 = p[p % 4 == 3].astype(np.float64)
    return math.exp(-0.5 * math.log(2.0) - 0.5 * float(np.log1p(-(p3**-2.0)).sum()))


def two_squares_count(limit: int) -> int:
    """Exact #{1 <= m <= limit : m = a^2 + b^2} by a chunked mark sieve."""
    if not 1 <= limit <= 10**9:
        raise ValueError("limit must be in [1, 1e9] (memory-bounded sieve)")
    total = 0
    chunk = 1 << 24
    for lo in range(1, limit + 1, chunk):
        hi = min(lo + chunk, limit + 1)  # values in [lo, hi)
        mark = np.zeros(hi - lo, dtype=bool)
        amax = math.isqrt(hi - 1)
        for a in range(0, amax + 1):
            rem_lo = lo - a * a
            b0 = 0 if rem_lo <= 0 else math.isqrt(rem_lo - 1) + 1
            b1 = math.isqrt(hi - 1 - a * a)
            if b1 >= b0:
                b = np.arange(b0, b1 + 1, dtype=np.int64)
                mark[a * a + b * b - lo] = True
        total += int(mark.sum())
    return total
