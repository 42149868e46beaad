"""Arithmetic in the binary fields GF(2^m) for m up to 24.

Elements are plain integers in [0, 2^m) interpreted as polynomials over
GF(2); multiplication is carry-less followed by reduction modulo a fixed
irreducible polynomial.  Two multiply paths are provided: a scalar one on
Python ints and a vectorized one on uint64 arrays, because the sample
space constructions evaluate the same small polynomial at every seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

# One irreducible polynomial per degree, written with the leading x^m bit
# included.  These are the classic low-weight (tri/pentanomial) choices
# from the standard LFSR tables; a test exercises the field axioms.
IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
    17: 0b100000000000001001,
    18: 0b1000000000010000001,
    19: 0b10000000000000100111,
    20: 0b100000000000000001001,
    21: 0b1000000000000000000101,
    22: 0b10000000000000000000011,
    23: 0b100000000000000000100001,
    24: 0b1000000000000000010000111,
}

MAX_DEGREE = max(IRREDUCIBLE)


def _check_degree(m: int) -> None:
    if m not in IRREDUCIBLE:
        raise ConfigurationError(
            f"field degree m={m} unsupported (1 <= m <= {MAX_DEGREE})")


def gf_mul(a: int, b: int, m: int) -> int:
    """Product of two field elements of GF(2^m)."""
    _check_degree(m)
    poly = IRREDUCIBLE[m]
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return acc


def gf_pow(a: int, e: int, m: int) -> int:
    """a raised to a nonnegative integer power."""
    result = 1
    base = a
    while e:
        if e & 1:
            result = gf_mul(result, base, m)
        base = gf_mul(base, base, m)
        e >>= 1
    return result


def gf_mul_vec(a: np.ndarray, b: int, m: int) -> np.ndarray:
    """Elementwise product of a uint64 array with one fixed field element.

    Runs the schoolbook shift-and-xor over the bits of ``b`` with a
    reduction step per shift, so intermediate values stay below 2^(m+1)
    and uint64 never overflows for m <= 24.
    """
    _check_degree(m)
    poly = np.uint64(IRREDUCIBLE[m])
    top = np.uint64(1 << m)
    acc = np.zeros_like(a)
    cur = a.astype(np.uint64).copy()
    for bit in range(m):
        if (b >> bit) & 1:
            acc ^= cur
        cur <<= np.uint64(1)
        overflow = (cur & top).astype(bool)
        cur[overflow] ^= poly
    return acc


def gf_elements(count: int, m: int, *, nonzero: bool = False) -> list[int]:
    """The first ``count`` distinct field elements, optionally skipping 0."""
    _check_degree(m)
    start = 1 if nonzero else 0
    if start + count > (1 << m):
        raise ConfigurationError(
            f"GF(2^{m}) has only {(1 << m) - start} usable elements, "
            f"need {count}")
    return list(range(start, start + count))


_POPCOUNT_16 = np.array([bin(i).count("1") for i in range(1 << 16)],
                        dtype=np.uint8)


def popcount_u64(v: np.ndarray) -> np.ndarray:
    """Per-element population count of a uint64 array."""
    v = v.astype(np.uint64, copy=False)
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(v).astype(np.uint8)
    out = _POPCOUNT_16[(v & np.uint64(0xFFFF)).astype(np.uint32)].astype(np.uint32)
    for shift in (16, 32, 48):
        out += _POPCOUNT_16[((v >> np.uint64(shift)) & np.uint64(0xFFFF)).astype(np.uint32)]
    return out.astype(np.uint8)
