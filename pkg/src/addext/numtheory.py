"""Exact modular arithmetic: primes in arithmetic progressions, subgroup
generators, Chinese remaindering, discrete logarithms, quadratic characters.

All functions are pure and deterministic; "smallest" is the canonical choice
wherever a prime or generator has to be picked, so every derived constant is
reproducible from its inputs alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CapacityError, InputError, NotInSubgroupError, SearchBudgetError

MODULUS_CAP = 1 << 63

# Deterministic Miller-Rabin witness set, valid for all n < 3.317e24 > 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (valid below 2^64)."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n == w:
            return True
        if n % w == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Residue:
    """An integer reduced mod a fixed modulus >= 2."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise InputError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise InputError(f"value {self.value} not reduced mod {self.modulus}")

    def __mul__(self, other: "Residue") -> "Residue":
        if self.modulus != other.modulus:
            raise InputError("modulus mismatch")
        return Residue(self.value * other.value % self.modulus, self.modulus)


@dataclass(frozen=True)
class CrtSystem:
    """Pairwise-coprime moduli q_1..q_n with combined modulus q = prod q_i."""

    moduli: tuple[int, ...]
    combined_modulus: int

    @classmethod
    def make(cls, moduli: Sequence[int]) -> "CrtSystem":
        mods = tuple(int(m) for m in moduli)
        if not mods or any(m < 2 for m in mods):
            raise InputError("moduli must be integers >= 2")
        combined = 1
        for m in mods:
            if math.gcd(combined, m) != 1:
                raise InputError(f"moduli not pairwise coprime: {mods}")
            combined *= m
            if combined >= MODULUS_CAP:
                raise CapacityError(f"combined modulus {combined} >= 2^63")
        return cls(mods, combined)


def smallest_prime_congruent_one(p: int, budget: int = 10**9) -> int:
    """Smallest prime q with q = 1 (mod p), found by direct search."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    q = 1 + p
    while q <= budget:
        if is_prime(q):
            return q
        q += p
    raise SearchBudgetError(f"no prime = 1 mod {p} below {budget}")


def linnik_primes(p: int, n: int, budget: int = 10**9) -> list[int]:
    """Ascending list of the n smallest distinct primes = 1 (mod p)."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if n < 1:
        raise InputError("n must be >= 1")
    out: list[int] = []
    q = 1 + p
    while q <= budget and len(out) < n:
        if is_prime(q):
            out.append(q)
        q += p
    if len(out) < n:
        raise SearchBudgetError(f"found {len(out)} < {n} primes = 1 mod {p} below {budget}")
    return out


def order_p_element(q: int, p: int) -> Residue:
    """Smallest g in {2..q-1} with g^p = 1 (mod q); has exact order p (p prime).

    Existence: Z_q* is cyclic of order q-1 and p | q-1.
    """
    if (q - 1) % p != 0:
        raise InputError(f"{p} does not divide {q}-1")
    for g in range(2, q):
        if pow(g, p, q) == 1:
            return Residue(g, q)
    raise InputError(f"no element of order {p} mod {q}")  # unreachable for prime q


def crt_combine(residues: Sequence[Residue], system: CrtSystem) -> Residue:
    """Unique y mod q with y = y_i (mod q_i), via sum y_i (q/q_i) [(q/q_i)^-1]_{q_i}."""
    if tuple(r.modulus for r in residues) != system.moduli:
        raise InputError("residue moduli do not match the CRT system")
    q = system.combined_modulus
    y = 0
    for r, qi in zip(residues, system.moduli):
        m = q // qi
        y += r.value * m * pow(m, -1, qi)
    return Residue(y % q, q)


def crt_split(y: Residue, system: CrtSystem) -> list[Residue]:
    """Inverse of crt_combine: the residue of y modulo each q_i."""
    if y.modulus != system.combined_modulus:
        raise InputError("value modulus does not match the CRT system")
    return [Residue(y.value % qi, qi) for qi in system.moduli]


def mod_pow(base: Residue, exponent: int) -> Residue:
    """base^exponent mod base.modulus (square-and-multiply)."""
    if exponent < 0:
        raise InputError("exponent must be nonnegative")
    return Residue(pow(base.value, exponent, base.modulus), base.modulus)


def discrete_log(g: Residue, y: Residue, order: int) -> int:
    """Exponent e in {0..order-1} with g^e = y, by baby-step/giant-step.

    O(sqrt(order)) time and space. Raises NotInSubgroupError when y is not a
    power of g.
    """
    if g.modulus != y.modulus:
        raise InputError("modulus mismatch")
    q = g.modulus
    m = math.isqrt(order - 1) + 1
    baby: dict[int, int] = {}
    cur = 1
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * g.value % q
    # giant step: y * (g^-m)^i
    giant = pow(g.value, -m, q)
    cur = y.value
    for i in range(m + 1):
        j = baby.get(cur)
        if j is not None and i * m + j < order:
            return i * m + j
        cur = cur * giant % q
    raise NotInSubgroupError(f"{y.value} is not a power of {g.value} mod {q}")


def quadratic_character(a: int | Residue, q: int | None = None) -> int:
    """Legendre symbol of a mod an odd prime q: 0 on 0, else +-1 (Euler criterion)."""
    if isinstance(a, Residue):
        if q is not None and q != a.modulus:
            raise InputError("modulus mismatch")
        q = a.modulus
        a = a.value
    if q is None:
        raise InputError("modulus required")
    if q == 2 or not is_prime(q):
        raise InputError(f"{q} is not an odd prime")
    a %= q
    if a == 0:
        return 0
    e = pow(a, (q - 1) // 2, q)
    return 1 if e == 1 else -1


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk scale)."""
    if n <= 0:
        raise InputError("n must be positive")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def smallest_primitive_root(p: int) -> int:
    """Smallest generator of Z_p* (p an odd prime)."""
    if p == 2:
        return 1
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    prime_divs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in prime_divs):
            return g
    raise InputError(f"no primitive root mod {p}")  # unreachable


def primes_upto(n: int) -> list[int]:
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(sieve[i * i:: i]))
    return [i for i, b in enumerate(sieve) if b]


def index_table(p: int, g: int | None = None) -> list[int]:
    """ind[x] = discrete log of x base g for x in Z_p* (one O(p) subgroup walk);
    ind[0] = -1 as a sentinel."""
    if g is None:
        g = smallest_primitive_root(p)
    tab = [-1] * p
    cur = 1
    for e in range(p - 1):
        tab[cur] = e
        cur = cur * g % p
    if cur != 1:
        raise InputError(f"{g} does not generate Z_{p}*")
    return tab
