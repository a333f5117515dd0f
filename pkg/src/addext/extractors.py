"""Deterministic extractor constructions.

Five families, each compiled to an immutable config holding every derived
constant, so that identical inputs rebuild bit-identical configs:

* ``zp``   -- Z_p -> {0,1}^m via x -> g^x in the order-p subgroup of Z_q*,
  q the smallest prime = 1 (mod p), reduced mod 2^m.
* ``zpn``  -- Z_p^n -> Z_M via per-coordinate subgroup encodings glued by the
  Chinese remainder map into Z_q, q = prod q_i, reduced mod M = 2^m.
* ``line`` -- F_q^n -> {0,1}: sum of norm forms on ascending odd-size
  coordinate blocks, output through the absolute trace (even q) or the
  quadratic character (odd q).
* ``ap``   -- F_p^n -> {0,1}^m: same block scheme with sizes >= 2 (so the
  restriction to any line has degree > 1), output reduced mod 2^m.
* ``pgc``  -- Z_p -> {0,1}^m via the index map relative to the smallest
  primitive root (turns multiplicative characters into additive ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import gf, numtheory as nt
from .errors import InputError
from .numtheory import CrtSystem, Residue

# ---------------------------------------------------------------------------
# Z_p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZpExtractorConfig:
    p: int
    q: int
    g: int
    m: int

    @property
    def M(self) -> int:
        return 1 << self.m

    def to_json(self) -> dict:
        return {"variant": "zp", "p": self.p, "q": self.q, "g": self.g, "m": self.m}


def build_zp_extractor(p: int, m: int, budget: int = 10**9) -> ZpExtractorConfig:
    q = nt.smallest_prime_congruent_one(p, budget)
    if (1 << m) >= q:
        raise InputError(f"2^{m} >= q = {q}: too many output bits")
    g = nt.order_p_element(q, p).value
    return ZpExtractorConfig(p, q, g, m)


def zp_encode(x: int, cfg: ZpExtractorConfig) -> int:
    """The injective encoding x -> g^x of Z_p into the order-p subgroup of Z_q*."""
    return pow(cfg.g, x % cfg.p, cfg.q)


def zp_extract(x: int, cfg: ZpExtractorConfig) -> int:
    return zp_encode(x, cfg) % cfg.M


# ---------------------------------------------------------------------------
# Z_p^n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZpnExtractorConfig:
    p: int
    n: int
    qs: tuple[int, ...]
    gs: tuple[int, ...]
    q: int
    m: int

    @property
    def M(self) -> int:
        return 1 << self.m

    @property
    def crt(self) -> CrtSystem:
        return CrtSystem(self.qs, self.q)

    def to_json(self) -> dict:
        return {"variant": "zpn", "p": self.p, "n": self.n, "qs": list(self.qs),
                "gs": list(self.gs), "q": self.q, "m": self.m}


def build_zpn_extractor(p: int, n: int, m: int, budget: int = 10**9) -> ZpnExtractorConfig:
    qs = tuple(nt.linnik_primes(p, n, budget))
    crt = CrtSystem.make(qs)  # enforces the 2^63 cap
    gs = tuple(nt.order_p_element(qi, p).value for qi in qs)
    if math.gcd(1 << m, crt.combined_modulus) != 1:
        raise InputError("output modulus must be coprime to q")
    return ZpnExtractorConfig(p, n, qs, gs, crt.combined_modulus, m)


def zpn_encode(x: Sequence[int], cfg: ZpnExtractorConfig) -> int:
    """CRT(g_1^{x_1}, ..., g_n^{x_n}) in Z_q; injective, image inside Z_q*."""
    if len(x) != cfg.n:
        raise InputError(f"expected a vector of length {cfg.n}")
    residues = [Residue(pow(g, xi % cfg.p, qi), qi)
                for g, qi, xi in zip(cfg.gs, cfg.qs, x)]
    return nt.crt_combine(residues, cfg.crt).value


def zpn_extract(x: Sequence[int], cfg: ZpnExtractorConfig) -> int:
    return zpn_encode(x, cfg) % cfg.M


# ---------------------------------------------------------------------------
# block polynomials over F_q^n (lines, APs, GAPs)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    start: int
    size: int


def ascending_blocks(n: int, allowed_sizes) -> tuple[tuple[Block, ...], int]:
    """Tile at least n coordinates with blocks of strictly ascending sizes drawn
    from the given iterator; the tail of the last block is zero padding."""
    blocks = []
    total = 0
    for size in allowed_sizes:
        blocks.append(Block(total, size))
        total += size
        if total >= n:
            break
    return tuple(blocks), total


def _odd_sizes():
    s = 1
    while True:
        yield s
        s += 2


def _ap_sizes(p: int):
    s = 2
    while True:
        if s % p != 0:
            yield s
        s += 1


@dataclass(frozen=True)
class LineExtractorConfig:
    field: gf.FieldSpec       # F_q, the coordinate field
    n: int
    padded_n: int
    blocks: tuple[Block, ...]
    variant: str              # "additive_trace" (even q) | "quadratic_char" (odd q)

    @property
    def degree(self) -> int:
        return max(b.size for b in self.blocks)

    def to_json(self) -> dict:
        return {"variant": "line", "p": self.field.p, "k": self.field.k,
                "modulus": list(self.field.modulus), "q": self.field.order,
                "n": self.n, "padded_n": self.padded_n,
                "blocks": [[b.start, b.size] for b in self.blocks],
                "output": self.variant}


def prime_power_field(q: int) -> gf.FieldSpec:
    if q < 2:
        raise InputError("q must be a prime power >= 2")
    p = min(f for f in nt.factorize(q))
    k = 0
    t = q
    while t % p == 0:
        t //= p
        k += 1
    if t != 1:
        raise InputError(f"{q} is not a prime power")
    return gf.FieldSpec.make(p, k)


def build_line_extractor(q: int | gf.FieldSpec, n: int) -> LineExtractorConfig:
    field = q if isinstance(q, gf.FieldSpec) else prime_power_field(q)
    if n < 1:
        raise InputError("n must be >= 1")
    blocks, padded_n = ascending_blocks(n, _odd_sizes())
    variant = "additive_trace" if field.p == 2 else "quadratic_char"
    assert blocks[-1].size <= 4 * math.isqrt(n) + 4
    return LineExtractorConfig(field, n, padded_n, blocks, variant)


def _block_norm(field: gf.FieldSpec, block: Block, x: Sequence[int], n: int) -> int:
    """Norm form of the block's coordinate slice (coordinates >= n are padding)."""
    coords = [x[i] if i < n else 0 for i in range(block.start, block.start + block.size)]
    if not any(coords):
        return 0
    if not any(coords[1:]):
        # subfield element: every conjugate coincides, norm collapses to a power
        return field.pow(coords[0], block.size)
    ext = gf.get_extension(field, block.size)
    return gf.norm_poly_eval(ext, coords)


def line_poly_eval(x: Sequence[int], cfg: LineExtractorConfig) -> int:
    """f(x) = sum over blocks of the block norm form, an F_q value.

    Along any line a + t d with d != 0, f restricts to a polynomial in t of
    degree equal to the largest block size on which d is nonzero, with leading
    coefficient the norm of that block slice of d.
    """
    if len(x) != cfg.n:
        raise InputError(f"expected a point of F_q^{cfg.n}")
    acc = 0
    for block in cfg.blocks:
        acc = cfg.field.add(acc, _block_norm(cfg.field, block, x, cfg.n))
    return acc


def line_extract(x: Sequence[int], cfg: LineExtractorConfig) -> int:
    v = line_poly_eval(x, cfg)
    if cfg.variant == "additive_trace":
        return gf.trace_to_f2(cfg.field.el(v))
    return 1 if gf.fq_quadratic_character(cfg.field, v) == -1 else 0


@dataclass(frozen=True)
class ApExtractorConfig:
    """Block-polynomial extractor for APs and GAPs in F_p^n.

    Blocks have size >= 2 and size not divisible by p, so the restriction to
    any line with nonzero direction has degree in (1, p). ``poly_eval`` is an
    optional override: a user-supplied polynomial F_p^n -> F_p meeting the same
    restricted-degree contract (hook for subspace dimensions >= 2; none ships).
    """

    field: gf.FieldSpec       # F_p, prime
    n: int
    padded_n: int
    blocks: tuple[Block, ...]
    m: int
    poly_eval: Callable[[Sequence[int]], int] | None = None

    @property
    def M(self) -> int:
        return 1 << self.m

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def degree(self) -> int:
        return max(b.size for b in self.blocks)

    def to_json(self) -> dict:
        return {"variant": "ap", "p": self.field.p, "n": self.n,
                "padded_n": self.padded_n,
                "blocks": [[b.start, b.size] for b in self.blocks], "m": self.m,
                "custom_poly": self.poly_eval is not None}


def build_ap_extractor(p: int, n: int, m: int) -> ApExtractorConfig:
    if p == 2 or not nt.is_prime(p):
        raise InputError("the AP extractor requires an odd prime p")
    if (1 << m) >= p:
        raise InputError(f"2^{m} >= p = {p}: too many output bits")
    field = gf.FieldSpec.make(p, 1)
    blocks, padded_n = ascending_blocks(n, _ap_sizes(p))
    if blocks[-1].size >= p:
        raise InputError("block degree reached p; n too large for this p")
    return ApExtractorConfig(field, n, padded_n, blocks, m)


def ap_config_with_blocks(p: int, n: int, m: int,
                          sizes: Sequence[int]) -> ApExtractorConfig:
    """Explicit-blocks constructor (sizes must be ascending, each in (1, p))."""
    field = gf.FieldSpec.make(p, 1)
    if any(s < 2 or s % p == 0 for s in sizes):
        raise InputError("block sizes must be >= 2 and not multiples of p")
    if list(sizes) != sorted(set(sizes)):
        raise InputError("block sizes must be strictly ascending")
    blocks = []
    total = 0
    for s in sizes:
        blocks.append(Block(total, s))
        total += s
    if total < n:
        raise InputError("blocks do not cover the n coordinates")
    return ApExtractorConfig(field, n, total, tuple(blocks), m)


def ap_poly_eval(x: Sequence[int], cfg: ApExtractorConfig) -> int:
    if cfg.poly_eval is not None:
        return cfg.poly_eval(x) % cfg.p
    if len(x) != cfg.n:
        raise InputError(f"expected a point of F_p^{cfg.n}")
    acc = 0
    for block in cfg.blocks:
        acc = (acc + _block_norm(cfg.field, block, x, cfg.n)) % cfg.p
    return acc


def ap_extract(x: Sequence[int], cfg: ApExtractorConfig) -> int:
    return ap_poly_eval(x, cfg) % cfg.M


# ---------------------------------------------------------------------------
# index-map extractor (conditional construction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PgcExtractorConfig:
    p: int
    g: int
    m: int

    @property
    def M(self) -> int:
        return 1 << self.m

    def to_json(self) -> dict:
        return {"variant": "pgc", "p": self.p, "g": self.g, "m": self.m}


def build_pgc_extractor(p: int, m: int) -> PgcExtractorConfig:
    if p == 2 or not nt.is_prime(p):
        raise InputError("p must be an odd prime")
    if (1 << m) >= p - 1:
        raise InputError(f"2^{m} >= p - 1: too many output bits")
    return PgcExtractorConfig(p, nt.smallest_primitive_root(p), m)


def pgc_extract(x: int, cfg: PgcExtractorConfig) -> int:
    """0 on 0, else the index (discrete log base g) of x reduced mod 2^m."""
    x %= cfg.p
    if x == 0:
        return 0
    ind = nt.discrete_log(Residue(cfg.g, cfg.p), Residue(x, cfg.p), cfg.p - 1)
    return ind % cfg.M


# ---------------------------------------------------------------------------
# config (de)serialization
# ---------------------------------------------------------------------------

ExtractorConfig = (ZpExtractorConfig | ZpnExtractorConfig | LineExtractorConfig
                   | ApExtractorConfig | PgcExtractorConfig)


def config_from_json(obj: dict) -> ExtractorConfig:
    try:
        return _config_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed extractor config: {exc}") from exc


def _config_from_json(obj: dict) -> ExtractorConfig:
    v = obj.get("variant")
    if v == "zp":
        cfg = ZpExtractorConfig(int(obj["p"]), int(obj["q"]), int(obj["g"]), int(obj["m"]))
        if cfg.q % cfg.p != 1 or pow(cfg.g, cfg.p, cfg.q) != 1 or cfg.g == 1:
            raise InputError("inconsistent zp config")
        return cfg
    if v == "zpn":
        cfg = ZpnExtractorConfig(int(obj["p"]), int(obj["n"]), tuple(obj["qs"]),
                                 tuple(obj["gs"]), int(obj["q"]), int(obj["m"]))
        if math.prod(cfg.qs) != cfg.q or any(qi % cfg.p != 1 for qi in cfg.qs):
            raise InputError("inconsistent zpn config")
        return cfg
    if v == "line":
        field = gf.FieldSpec(int(obj["p"]), int(obj["k"]), tuple(obj["modulus"]))
        blocks = tuple(Block(s, z) for s, z in obj["blocks"])
        return LineExtractorConfig(field, int(obj["n"]), int(obj["padded_n"]),
                                   blocks, obj["output"])
    if v == "ap":
        if obj.get("custom_poly"):
            raise InputError("configs with custom polynomials are not serializable")
        field = gf.FieldSpec.make(int(obj["p"]), 1)
        blocks = tuple(Block(s, z) for s, z in obj["blocks"])
        return ApExtractorConfig(field, int(obj["n"]), int(obj["padded_n"]),
                                 blocks, int(obj["m"]))
    if v == "pgc":
        return PgcExtractorConfig(int(obj["p"]), int(obj["g"]), int(obj["m"]))
    raise InputError(f"unknown extractor variant {v!r}")


def extract_fn(cfg: ExtractorConfig) -> Callable:
    """The point-evaluation function of a config."""
    if isinstance(cfg, ZpExtractorConfig):
        return lambda x: zp_extract(x, cfg)
    if isinstance(cfg, ZpnExtractorConfig):
        return lambda x: zpn_extract(x, cfg)
    if isinstance(cfg, LineExtractorConfig):
        return lambda x: line_extract(x, cfg)
    if isinstance(cfg, ApExtractorConfig):
        return lambda x: ap_extract(x, cfg)
    if isinstance(cfg, PgcExtractorConfig):
        return lambda x: pgc_extract(x, cfg)
    raise InputError(f"unknown config {cfg!r}")


def output_size(cfg: ExtractorConfig) -> int:
    """Number of possible outputs M (2 for the 1-bit line extractor)."""
    return 2 if isinstance(cfg, LineExtractorConfig) else cfg.M
