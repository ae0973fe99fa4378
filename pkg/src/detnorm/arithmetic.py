"""Exact integer and local-field arithmetic over Q.

Factorization, the two-squares criterion, Hilbert symbols, the local Artin
map for cyclotomic extensions, and local/global norm predicates for cyclic
extensions presented by their Dirichlet characters.  Everything here is
exact (integers and `fractions.Fraction`); no floating point enters any
predicate.

All public functions are pure once the module-level tables (smallest-prime
-factor sieve, character value tables) are built, so they are safe for
concurrent use after first touch.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "INFINITE_PLACE",
    "Factorization",
    "CyclicCharacter",
    "factorize",
    "is_prime",
    "is_sum_of_two_squares",
    "hilbert_symbol",
    "artin_symbol",
    "relevant_places",
    "is_local_norm",
    "is_global_norm",
    "primes_up_to",
    "smallest_prime_factor_table",
    "load_character",
    "trivial_character",
]

Rational = int | Fraction


class _InfinitePlace:
    """Singleton marker for the archimedean place of Q."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE_PLACE"


INFINITE_PLACE = _InfinitePlace()

# A place is either INFINITE_PLACE or a prime number.
Place = int | _InfinitePlace

# ---------------------------------------------------------------------------
# primes and factorization

#: factorize() uses the sieve below this bound, Miller-Rabin + Pollard above.
SPF_TABLE_BOUND = 2 * 10**6

_spf_cache: dict[int, np.ndarray] = {}
_prime_cache: dict[int, np.ndarray] = {}


def smallest_prime_factor_table(limit: int = SPF_TABLE_BOUND) -> np.ndarray:
    """Table t with t[m] = smallest prime factor of m, for 2 <= m <= limit."""
    tab = _spf_cache.get(limit)
    if tab is None:
        tab = np.arange(limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(limit) + 1):
            if tab[p] == p:  # p prime
                sl = tab[p * p :: p]
                np.minimum(sl, p, out=sl)
        _spf_cache[limit] = tab
    return tab


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending (cached per limit)."""
    pr = _prime_cache.get(limit)
    if pr is None:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        pr = np.nonzero(sieve)[0]
        if len(_prime_cache) > 4:  # keep the cache small; sieves are cheap
            _prime_cache.clear()
        _prime_cache[limit] = pr
    return pr


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # deterministic < 3.3e24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle finding).

    Deterministic: the (c, x0) schedule is fixed, so factorize() output is
    reproducible.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"pollard rho failed on {n}")  # pragma: no cover


@dataclass(frozen=True)
class Factorization:
    """Exact signed prime factorization: sign * prod(p**e)."""

    sign: int
    factors: dict[int, int] = field(default_factory=dict)

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors.items():
            v *= p**e
        return v

    def __iter__(self):
        return iter(sorted(self.factors.items()))


def factorize(n: int) -> Factorization:
    """Exact prime factorization of a nonzero integer with |n| < 2**63."""
    if n == 0:
        raise ValueError("factorize: argument must be nonzero")
    if abs(n) >= 2**63:
        raise ValueError(f"factorize: |{n}| exceeds the 63-bit bound")
    sign = 1 if n > 0 else -1
    m = abs(n)
    factors: dict[int, int] = {}
    if m <= SPF_TABLE_BOUND:
        tab = smallest_prime_factor_table()
        while m > 1:
            p = int(tab[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
        return Factorization(sign, factors)
    # strip small primes, then recurse with Miller-Rabin + Pollard rho
    for p in (2, 3, 5, 7, 11, 13):
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= SPF_TABLE_BOUND:
            tab = smallest_prime_factor_table()
            while m > 1:
                p = int(tab[m])
                factors[p] = factors.get(p, 0) + 1
                m //= p
        elif is_prime(m):
            factors[m] = factors.get(m, 0) + 1
        else:
            d = _pollard_rho(m)
            stack.append(d)
            stack.append(m // d)
    return Factorization(sign, dict(sorted(factors.items())))


def is_sum_of_two_squares(n: int) -> bool:
    """Whether n = a^2 + b^2 for integers a, b (0 allowed).

    Fermat: true iff n > 0 and every prime p = 3 (mod 4) divides n to an
    even power.
    """
    if n == 0:
        raise ValueError("is_sum_of_two_squares: argument must be nonzero")
    if n < 0:
        return False
    for p, e in factorize(n):
        if p % 4 == 3 and e % 2 == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# valuations of rationals

def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an int or Fraction, got {type(x).__name__}")


def _val_unit(x: Fraction, p: int) -> tuple[int, int, int]:
    """(v_p(x), unit numerator, unit denominator) with the unit prime to p."""
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num, den


def _unit_mod(num: int, den: int, modulus: int) -> int:
    return num * pow(den, -1, modulus) % modulus


def _legendre(num: int, den: int, p: int) -> int:
    """Legendre symbol of the p-unit num/den at an odd prime p (+1 or -1)."""
    a = _unit_mod(num, den, p)
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """The Hilbert symbol (a, b)_v in {+1, -1} for nonzero rationals a, b.

    +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over the completion
    at v.  Standard closed formulas: sign rule at the infinite place,
    valuation/Legendre formula at odd p, the unit-class table mod 8 at p=2.
    """
    af, bf = _as_fraction(a), _as_fraction(b)
    if af == 0 or bf == 0:
        raise ValueError("hilbert_symbol: arguments must be nonzero")
    if v is INFINITE_PLACE:
        return -1 if (af < 0 and bf < 0) else 1
    p = v
    if not is_prime(p):
        raise ValueError(f"hilbert_symbol: {p} is not a prime")
    alpha, un, ud = _val_unit(af, p)
    beta, wn, wd = _val_unit(bf, p)
    if p != 2:
        sign = 1
        if (alpha & 1) and (beta & 1) and p % 4 == 3:
            sign = -sign
        if (beta & 1) and _legendre(un, ud, p) == -1:
            sign = -sign
        if (alpha & 1) and _legendre(wn, wd, p) == -1:
            sign = -sign
        return sign
    u8 = _unit_mod(un, ud, 8)
    w8 = _unit_mod(wn, wd, 8)
    eps_u, eps_w = (u8 - 1) // 2 % 2, (w8 - 1) // 2 % 2
    omega_u, omega_w = (u8 * u8 - 1) // 8 % 2, (w8 * w8 - 1) // 8 % 2
    e = eps_u * eps_w + alpha * omega_w + beta * omega_u
    return -1 if e % 2 else 1


def relevant_places(*xs: Rational) -> list[Place]:
    """INFINITE_PLACE, 2, and every odd prime dividing some num/den given."""
    ps = {2}
    for x in xs:
        xf = _as_fraction(x)
        for n in (abs(xf.numerator), xf.denominator):
            if n > 1:
                for q, _ in factorize(n):
                    ps.add(q)
    return [INFINITE_PLACE, *sorted(ps)]


# ---------------------------------------------------------------------------
# Dirichlet characters of cyclic extensions

def _unit_group_size(f: int) -> int:
    phi = 1
    for p, e in (factorize(f) if f > 1 else ()):
        phi *= (p - 1) * p ** (e - 1)
    return phi


@dataclass(frozen=True)
class CyclicCharacter:
    """A primitive Dirichlet character of conductor f and exact order d.

    Values are stored in logarithmic form: ``values[u] = k`` means
    chi(u) = exp(2*pi*i*k/d).  The table covers exactly the units mod f.
    The class-field dictionary: chi cuts out a cyclic extension K/Q of
    degree d inside the cyclotomic field of conductor f, and an element of
    Q* is a local norm from K at a place v iff chi kills its Artin symbol.
    """

    conductor: int
    order: int
    values: Mapping[int, int]

    def __post_init__(self):
        f, d = self.conductor, self.order
        if f < 1 or d < 1:
            raise ValueError("conductor and order must be positive")
        units = [0] if f == 1 else [u for u in range(f) if math.gcd(u, f) == 1]
        if sorted(self.values) != units:
            raise ValueError("character table must cover exactly the units mod f")
        vals = self.values
        for u in units:
            if not 0 <= vals[u] < d:
                raise ValueError("character values must lie in Z/d")
        # find a small generating set greedily, then verify the table is the
        # unique homomorphism extending its generator values (complete check
        # in O(phi * #generators) instead of O(phi^2) pairs)
        if f > 1:
            span = {1}
            gens = []
            for u in units:
                if u not in span:
                    gens.append(u)
                    while True:
                        new = {(s * u) % f for s in span} - span
                        if not new:
                            break
                        span |= new
            rebuilt = {1: 0}
            frontier = [1]
            while frontier:
                a = frontier.pop()
                for g in gens:
                    w = (a * g) % f
                    t = (rebuilt[a] + vals[g]) % d
                    if w in rebuilt:
                        if rebuilt[w] != t:
                            raise ValueError("character table is not multiplicative")
                    else:
                        rebuilt[w] = t
                        frontier.append(w)
            if rebuilt != dict(vals):
                raise ValueError("character table is not multiplicative")
        g = d
        for u in units:
            g = math.gcd(g, vals[u])
        if g != 1:
            raise ValueError(f"character has order {d // g}, not the declared {d}")
        if f > 1:
            for q in {p for p, _ in factorize(f)}:
                if self._factors_through(f // q):
                    raise ValueError(f"conductor is not {f}: character factors mod {f // q}")

    def _factors_through(self, m: int) -> bool:
        # chi factors through (Z/m)* iff it kills every unit = 1 (mod m)
        f = self.conductor
        for u in range(1, f, m if m > 0 else f):
            if math.gcd(u, f) == 1 and self.values[u] % self.order != 0:
                return False
        return True

    @classmethod
    def from_generators(
        cls, conductor: int, order: int, generator_values: Iterable[tuple[int, int]]
    ) -> "CyclicCharacter":
        """Expand a character from values on a generating set of (Z/f)*.

        The closure walk both builds the full table and validates the input:
        reaching a residue twice with different logs, or failing to reach
        some unit, rejects the data.
        """
        f, d = conductor, order
        gens = [(g % f, v % d) for g, v in generator_values]
        for g, _ in gens:
            if f > 1 and math.gcd(g, f) != 1:
                raise ValueError(f"generator {g} is not a unit mod {f}")
        table: dict[int, int] = {1 % f: 0}
        frontier = [1 % f]
        while frontier:
            u = frontier.pop()
            for g, v in gens:
                w = (u * g) % f
                t = (table[u] + v) % d
                if w in table:
                    if table[w] != t:
                        raise ValueError("generator values are inconsistent (no homomorphism)")
                else:
                    table[w] = t
                    frontier.append(w)
        if len(table) != max(_unit_group_size(f), 1):
            raise ValueError("the given elements do not generate the units mod f")
        return cls(f, d, table)

    def log_value(self, u: int) -> int:
        """log of chi(u) in Z/d; u must be prime to the conductor."""
        f = self.conductor
        r = u % f
        if r not in self.values:
            raise ValueError(f"{u} is not a unit mod {f}")
        return self.values[r]

    def value_table(self) -> np.ndarray:
        """Array t of length f with t[u] = log value, -1 on non-units."""
        t = np.full(max(self.conductor, 1), -1, dtype=np.int64)
        for u, v in self.values.items():
            t[u] = v
        return t

    def is_real(self) -> bool:
        return self.order <= 2

    def __mul__(self, other: "CyclicCharacter") -> "CyclicCharacter":
        f = math.lcm(self.conductor, other.conductor)
        d = math.lcm(self.order, other.order)
        table = {}
        for u in range(f):
            if math.gcd(u, f) == 1 or f == 1:
                table[u % f] = (
                    self.values[u % self.conductor] * (d // self.order)
                    + other.values[u % other.conductor] * (d // other.order)
                ) % d
        return _primitivize(f, d, table)

    def __pow__(self, k: int) -> "CyclicCharacter":
        d = self.order
        table = {u: (v * k) % d for u, v in self.values.items()}
        return _primitivize(self.conductor, d, table)

    def inverse(self) -> "CyclicCharacter":
        return self ** (self.order - 1) if self.order > 1 else self

    def fingerprint(self) -> str:
        items = ",".join(f"{u}:{v}" for u, v in sorted(self.values.items()))
        return f"chi[f={self.conductor},d={self.order},{items}]"


def _primitivize(f: int, d: int, table: dict[int, int]) -> CyclicCharacter:
    """Reduce a (possibly imprimitive, inexact-order) value table."""
    # exact order
    g = d
    for v in table.values():
        g = math.gcd(g, v)
    if g > 1:
        d //= g
        table = {u: v // g for u, v in table.items()}
    # true conductor: repeatedly drop primes q | f while the character is
    # trivial on units congruent to 1 mod f/q
    changed = True
    while changed and f > 1:
        changed = False
        for q in {p for p, _ in factorize(f)}:
            m = f // q
            trivial = True
            for u in range(1, f, max(m, 1)):
                if math.gcd(u, f) == 1 and table[u % f] != 0:
                    trivial = False
                    break
            if trivial:
                if m == 1:
                    f, table = 1, {0: 0}
                    changed = True
                    break
                new: dict[int, int] = {}
                for r in range(m):
                    if math.gcd(r, m) == 1:
                        u = r  # lift to a unit mod f in the same class mod m
                        while math.gcd(u, f) != 1:
                            u += m
                        new[r] = table[u % f]
                f, table = m, new
                changed = True
                break
    if f == 1:
        table = {0: 0}
        d = 1
    return CyclicCharacter(f, d, table)


def trivial_character() -> CyclicCharacter:
    return CyclicCharacter(1, 1, {0: 0})


def load_character(source) -> CyclicCharacter:
    """Read a character record {conductor, order, generator_values} (JSON).

    `source` is a path or an already-parsed mapping.  The table is expanded
    and fully validated; inconsistent data is rejected at load time.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "read"):
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            with open(source, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    else:
        data = source
    gv = [(int(g), int(v)) for g, v in data["generator_values"]]
    return CyclicCharacter.from_generators(int(data["conductor"]), int(data["order"]), gv)


# ---------------------------------------------------------------------------
# the local Artin map for Q(zeta_f)/Q and norm predicates

def artin_symbol(x: Rational, conductor: int, v: Place) -> int:
    """Class in (Z/f)* of the local Artin symbol of x at v.

    Finite v = p: write f = p^k * m with p coprime to m and x = p^e * u with
    u a p-adic unit; the symbol is (u^-1 mod p^k, p^e mod m) under CRT.
    Infinite v: complex conjugation, i.e. the class of -1, iff x < 0.
    """
    xf = _as_fraction(x)
    if xf == 0:
        raise ValueError("artin_symbol: argument must be nonzero")
    f = conductor
    if f < 1:
        raise ValueError("artin_symbol: conductor must be positive")
    if v is INFINITE_PLACE:
        return (-1) % f if xf < 0 else 1 % f
    p = v
    if not is_prime(p):
        raise ValueError(f"artin_symbol: {p} is not a prime")
    k = 0
    m = f
    while m % p == 0:
        m //= p
        k += 1
    e, un, ud = _val_unit(xf, p)
    pk = p**k
    if pk > 1:
        ram = pow(_unit_mod(un, ud, pk), -1, pk)  # ramified component: u^-1
    else:
        ram = 0
    unram = pow(p, e, m) if m > 1 else 0  # Frobenius^e
    if pk == 1:
        return unram % f if f > 1 else 0
    if m == 1:
        return ram % f
    # CRT combine (ram mod p^k, unram mod m)
    inv = pow(pk, -1, m)
    return (ram + pk * ((unram - ram) * inv % m)) % f


def is_local_norm(x: Rational, chi: CyclicCharacter, v: Place) -> bool:
    """Whether x is a norm from the cyclic extension cut out by chi, at v.

    Equivalent formulations: chi kills the Artin symbol of x at v; at the
    infinite place, x > 0 or chi is even.
    """
    xf = _as_fraction(x)
    if xf == 0:
        raise ValueError("is_local_norm: argument must be nonzero")
    if chi.conductor == 1:
        return True
    return chi.log_value(artin_symbol(xf, chi.conductor, v)) == 0


def is_global_norm(x: Rational, chi: CyclicCharacter) -> bool:
    """Whether x is a norm from the cyclic extension cut out by chi.

    By the Hasse norm theorem (valid precisely because the extension is
    cyclic) this holds iff x is a local norm everywhere; only the infinite
    place and primes dividing conductor*num(x)*den(x) can fail, since at
    any other p both x and the extension are unramified units.
    """
    xf = _as_fraction(x)
    if xf == 0:
        raise ValueError("is_global_norm: argument must be nonzero")
    if chi.conductor == 1:
        return True
    if not is_local_norm(xf, chi, INFINITE_PLACE):
        return False
    ps = {p for p, _ in factorize(chi.conductor)}
    for n in (abs(xf.numerator), xf.denominator):
        if n > 1:
            ps.update(p for p, _ in factorize(n))
    return all(is_local_norm(xf, chi, p) for p in sorted(ps))


def random_rational(rng: random.Random, height: int = 10**4) -> Fraction:
    """A random nonzero rational with |num|, den <= height (test helper)."""
    num = 0
    while num == 0:
        num = rng.randint(-height, height)
    return Fraction(num, rng.randint(1, height))
