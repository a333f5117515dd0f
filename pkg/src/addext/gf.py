"""Finite-field arithmetic for F_{p^k}: irreducible polynomial search, element
arithmetic, Frobenius, traces, and norm-form evaluation for extension towers.

Polynomials over F_p are coefficient tuples, lowest degree first, with no
trailing zeros (the zero polynomial is ()). Field elements are encoded as
integers in [0, p^k): value = sum c_i p^i over the polynomial basis
1, theta, ..., theta^(k-1), theta the residue of x mod the field's modulus.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import BudgetError, InputError

_COERCE_DICT_CAP = 1 << 16


# ---------------------------------------------------------------------------
# polynomial helpers over F_p
# ---------------------------------------------------------------------------

def _norm(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _norm(tuple(out))


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> tuple[int, ...]:
    """a mod m for monic m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1] % p
        if lead:
            off = len(a) - 1 - dm
            for i in range(dm):
                a[off + i] = (a[off + i] - lead * m[i]) % p
        a.pop()
    return _norm(tuple(x % p for x in a))


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    """Monic gcd over F_p."""
    a, b = _norm(tuple(x % p for x in a)), _norm(tuple(x % p for x in b))
    while b:
        inv = pow(b[-1], -1, p)
        monic_b = tuple(x * inv % p for x in b)
        a, b = b, poly_mod(a, monic_b, p)
    if not a:
        return ()
    inv = pow(a[-1], -1, p)
    return tuple(x * inv % p for x in a)


def _poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> tuple[int, ...]:
    result: tuple[int, ...] = (1,)
    base = poly_mod(a, m, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), m, p)
        base = poly_mod(poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Irreducibility certificate: x^(p^k) = x mod f, and gcd(x^(p^(k/t)) - x, f) = 1
    for every prime t | k."""
    f = _norm(tuple(x % p for x in poly))
    k = len(f) - 1
    if k < 1 or f[-1] != 1:
        return False
    if k == 1:
        return True
    x = (0, 1)
    frob = {0: x}  # x^(p^j) mod f
    h = x
    for j in range(1, k + 1):
        h = _poly_powmod(h, p, f, p)
        frob[j] = h
    if frob[k] != poly_mod(x, f, p):
        return False
    k_prime_divs = {t for t in range(2, k + 1) if k % t == 0 and all(t % s for s in range(2, t))}
    for t in k_prime_divs:
        # g = x^(p^(k/t)) - x mod f must be coprime to f
        g_coeffs = list(frob[k // t]) + [0, 0]
        g_coeffs[1] = (g_coeffs[1] - 1) % p
        g = _norm(tuple(g_coeffs))
        if poly_gcd(g, f, p) != (1,):
            return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Candidates are ordered by their non-leading coefficient vector read as a
    base-p integer (constant term least significant).
    """
    if k < 1:
        raise InputError("degree must be >= 1")
    if k == 1:
        return (0, 1)
    for tail in range(p**k):
        coeffs = []
        t = tail
        for _ in range(k):
            coeffs.append(t % p)
            t //= p
        cand = tuple(coeffs) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise InputError(f"no irreducible of degree {k} over F_{p}")  # unreachable


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _gf2_mod_mask(spec: "FieldSpec") -> int:
    return sum(c << i for i, c in enumerate(spec.modulus))


@dataclass(frozen=True)
class FieldSpec:
    """F_{p^k} presented as F_p[x]/(modulus), modulus monic irreducible of degree k."""

    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise InputError("modulus must be monic of degree k")
        if not is_irreducible(self.modulus, self.p):
            raise InputError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @classmethod
    def make(cls, p: int, k: int) -> "FieldSpec":
        return cls(p, k, find_irreducible(p, k))

    @property
    def order(self) -> int:
        return self.p**self.k

    # -- encoding ----------------------------------------------------------
    def encode(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(tuple(coeffs)):
            v = v * self.p + c % self.p
        return v

    def decode(self, v: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(v % self.p)
            v //= self.p
        return tuple(out)

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    # -- arithmetic on int encodings ---------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.encode([x + y for x, y in zip(self.decode(a), self.decode(b))])

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return self.encode([-x for x in self.decode(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.p == 2:
            return self._mul2(a, b)
        prod = poly_mul(self.decode(a), self.decode(b), self.p)
        return self.encode(poly_mod(prod, self.modulus, self.p))

    def _mul2(self, a: int, b: int) -> int:
        # carryless multiply then reduce; encodings are GF(2) bitmasks
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            a <<= 1
            b >>= 1
        mod_mask = _gf2_mod_mask(self)
        top = acc.bit_length() - 1
        while top >= self.k:
            acc ^= mod_mask << (top - self.k)
            top = acc.bit_length() - 1
        return acc

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return self.pow(a, self.order - 2)

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def scalar(self, c: int) -> int:
        """Image of the integer c under Z -> F_p -> F_{p^k} (a constant)."""
        return c % self.p

    def el(self, v: int | Sequence[int]) -> "FieldElement":
        if isinstance(v, int):
            return FieldElement(self, self.decode(v))
        return FieldElement(self, tuple(x % self.p for x in v) + (0,) * (self.k - len(v)))


@dataclass(frozen=True)
class FieldElement:
    """Element of a FieldSpec field, held as k coefficients over F_p."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.k:
            raise InputError("coefficient vector has wrong length")
        if any(not 0 <= c < self.spec.p for c in self.coeffs):
            raise InputError("coefficients not reduced mod p")

    @property
    def value(self) -> int:
        return self.spec.encode(self.coeffs)

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(self.spec, self.spec.decode(v))

    def _check(self, other: "FieldElement") -> None:
        if self.spec != other.spec:
            raise InputError("field mismatch")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.spec.add(self.value, other.value))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.spec.sub(self.value, other.value))

    def __neg__(self) -> "FieldElement":
        return self._wrap(self.spec.neg(self.value))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.spec.mul(self.value, other.value))

    def __pow__(self, e: int) -> "FieldElement":
        return self._wrap(self.spec.pow(self.value, e))

    def inv(self) -> "FieldElement":
        return self._wrap(self.spec.inv(self.value))

    def frobenius(self) -> "FieldElement":
        return self._wrap(self.spec.frobenius(self.value))

    def __bool__(self) -> bool:
        return any(self.coeffs)


def trace_to_f2(x: FieldElement) -> int:
    """Absolute trace of F_{2^k}: Tr(x) = x + x^2 + ... + x^(2^(k-1)) in {0, 1}."""
    spec = x.spec
    if spec.p != 2:
        raise InputError("trace_to_f2 requires characteristic 2")
    acc = 0
    cur = x.value
    for _ in range(spec.k):
        acc ^= cur
        cur = spec.mul(cur, cur)
    if acc not in (0, 1):
        raise AssertionError("trace left the prime field")
    return acc


def fq_quadratic_character(spec: FieldSpec, a: int) -> int:
    """Quadratic character of F_q for odd q: 0 on 0, else a^((q-1)/2) as +-1."""
    if spec.p == 2:
        raise InputError("quadratic character requires odd characteristic")
    if a == 0:
        return 0
    e = spec.pow(a, (spec.order - 1) // 2)
    if e == 1:
        return 1
    if e == spec.p - 1:  # the constant -1
        return -1
    raise AssertionError("square root of unity outside {1, -1}")


# ---------------------------------------------------------------------------
# extension towers and norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionField:
    """E = F_{q^b} over K = F_q (q = p^k), realized flat as F_{p^(k*b)}.

    The K-basis of E is 1, theta, ..., theta^(b-1) with theta the polynomial
    generator of E; K embeds via a canonical root beta of K's modulus in E.
    """

    base: FieldSpec
    degree: int
    ext: FieldSpec
    beta: int
    norm_exponent: int
    _base_image: dict[int, int] = field(repr=False, compare=False)

    def embed(self, c: int) -> int:
        """Image in E of the base-field element c (Horner at beta)."""
        acc = 0
        for coef in reversed(self.base.decode(c)):
            acc = self.ext.mul(acc, self.beta)
            acc = self.ext.add(acc, coef)
        return acc

    def coerce_to_base(self, u: int) -> int:
        c = self._base_image.get(u)
        assert c is not None, "norm value escaped the base field"
        return c

    def lift(self, coords: Sequence[int]) -> int:
        """sum embed(c_i) * theta^(i-1) in E, for c_i in the base field."""
        theta = self.ext.encode((0, 1)) if self.ext.k > 1 else 1
        acc = 0
        power = 1
        for c in coords:
            if c:
                acc = self.ext.add(acc, self.ext.mul(self.embed(c), power))
            power = self.ext.mul(power, theta)
        return acc


def _subfield_elements(ext: FieldSpec, base_degree: int) -> list[int]:
    """All elements of the subfield F_{p^base_degree} inside ext, via the trace
    map onto the subfield and Gaussian elimination over F_p."""
    p, n = ext.p, ext.k
    b = n // base_degree
    q = p**base_degree
    # trace of each basis monomial: T(v) = sum_{j<b} v^(q^j)
    images = []
    for i in range(n):
        v = ext.encode(tuple(0 for _ in range(i)) + (1,)) if i else 1
        acc = 0
        cur = v
        for _ in range(b):
            acc = ext.add(acc, cur)
            cur = ext.pow(cur, q)
        images.append(list(ext.decode(acc)))
    # row reduce images over F_p to a basis of the subfield
    rows = [r[:] for r in images]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for row in rows:
        for bas, piv in zip(basis, pivots):
            f = row[piv]
            if f:
                row = [(x - f * y) % p for x, y in zip(row, bas)]
        nz = next((i for i, x in enumerate(row) if x), None)
        if nz is not None:
            inv = pow(row[nz], -1, p)
            basis.append([x * inv % p for x in row])
            pivots.append(nz)
    if len(basis) != base_degree:
        raise AssertionError("trace image has wrong dimension")
    out = []
    for sel in range(q):
        acc = [0] * n
        s = sel
        for bas in basis:
            c = s % p
            s //= p
            if c:
                acc = [(x + c * y) % p for x, y in zip(acc, bas)]
        out.append(ext.encode(acc))
    return out


@functools.lru_cache(maxsize=None)
def get_extension(base: FieldSpec, degree: int) -> ExtensionField:
    """Canonical degree-b extension of the given base field, with embedding."""
    if degree < 1:
        raise InputError("extension degree must be >= 1")
    q = base.order
    if q > _COERCE_DICT_CAP:
        raise BudgetError(f"base field of order {q} too large for coercion tables")
    e = (q**degree - 1) // (q - 1) if q > 1 else 1
    if degree == 1:
        image = {c: c for c in range(q)}
        beta = base.encode((0, 1)) if base.k > 1 else 0
        return ExtensionField(base, 1, base, beta, e, image)
    ext = FieldSpec.make(base.p, base.k * degree)
    if base.k == 1:
        beta = 0  # root of x; base elements embed as constants
    else:
        candidates = _subfield_elements(ext, base.k)
        roots = []
        for u in candidates:
            # evaluate base.modulus at u in E (coefficients are constants)
            acc = 0
            for coef in reversed(base.modulus):
                acc = ext.mul(acc, u)
                acc = ext.add(acc, coef)
            if acc == 0:
                roots.append(u)
        if len(roots) != base.k:
            raise AssertionError("modulus does not split in the subfield")
        beta = min(roots)
    out = ExtensionField(base, degree, ext, beta, e, {})
    image = {out.embed(c): c for c in range(q)}
    assert len(image) == q, "embedding is not injective"
    object.__setattr__(out, "_base_image", image)
    return out


def norm_poly_eval(ext: ExtensionField, coords: Sequence[int]) -> int:
    """Norm form of F_{q^b}/F_q at base-field coordinates c_1..c_b: the value
    (sum c_i alpha_i)^((q^b-1)/(q-1)) coerced back to F_q.

    Zero iff all coordinates are zero; homogeneous of degree b.
    """
    coords = list(coords)
    if len(coords) > ext.degree:
        raise InputError("too many coordinates for the extension degree")
    coords += [0] * (ext.degree - len(coords))
    if not any(coords):
        return 0
    if not any(coords[1:]):
        # element of the embedded base field: all conjugates coincide
        return ext.base.pow(coords[0], ext.degree)
    u = ext.ext.pow(ext.lift(coords), ext.norm_exponent)
    return ext.coerce_to_base(u)


def norm_by_conjugates(ext: ExtensionField, coords: Sequence[int]) -> int:
    """Independent route: product over j of sum_i c_i alpha_i^(q^j)."""
    coords = list(coords) + [0] * (ext.degree - len(coords))
    q = ext.base.order
    s = ext.lift(coords)
    acc = 1
    cur = s
    for _ in range(ext.degree):
        acc = ext.ext.mul(acc, cur)
        cur = ext.ext.pow(cur, q)
    if acc == 0:
        return 0
    return ext.coerce_to_base(acc)
