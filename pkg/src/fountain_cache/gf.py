"""Arithmetic over binary-extension fields GF(2^m), 1 <= m <= 8.

Elements are plain ints in ``0..q-1`` holding the polynomial-basis bit
pattern. Multiplication for m >= 2 goes through exp/log tables built from a
fixed primitive polynomial, so results are bit-identical across runs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Bitmask including the leading x^m term.
PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}

SUPPORTED_ORDERS = tuple(1 << m for m in PRIMITIVE_POLYS)


class FieldError(ValueError):
    pass


class Field:
    """The field GF(2^m).

    Instances are immutable after construction and may be shared freely.
    Use :func:`field_new` (cached) or :func:`field_for_order` rather than the
    constructor when the same field is needed repeatedly.
    """

    __slots__ = ("m", "q", "reduction_poly", "exp", "log", "mul_table", "inv_table")

    def __init__(self, m: int):
        if not isinstance(m, (int, np.integer)) or not 1 <= m <= 8:
            raise FieldError(f"extension degree must be in 1..8, got {m!r}")
        m = int(m)
        q = 1 << m
        poly = PRIMITIVE_POLYS[m]
        self.m = m
        self.q = q
        self.reduction_poly = poly

        if m == 1:
            self.exp = None
            self.log = None
            mul = np.array([[0, 0], [0, 1]], dtype=np.uint8)
            inv = np.array([0, 1], dtype=np.uint8)
        else:
            exp = np.zeros(2 * (q - 1), dtype=np.int64)
            log = np.full(q, -1, dtype=np.int64)
            a = 1
            for i in range(q - 1):
                if log[a] != -1:
                    raise FieldError(f"polynomial {poly:#b} is not primitive")
                exp[i] = a
                log[a] = i
                a <<= 1
                if a & q:
                    a ^= poly
            if a != 1:
                raise FieldError(f"polynomial {poly:#b} is not primitive")
            exp[q - 1:] = exp[: q - 1]
            self.exp = exp
            self.log = log

            nz = np.arange(1, q)
            mul = np.zeros((q, q), dtype=np.uint8)
            mul[1:, 1:] = exp[log[nz][:, None] + log[nz][None, :]]
            inv = np.zeros(q, dtype=np.uint8)
            inv[1:] = exp[(q - 1 - log[nz]) % (q - 1)]

        # left writeable: numba's dispatcher takes a slow path for read-only arrays
        self.mul_table = mul
        self.inv_table = inv

    def __repr__(self):
        return f"Field(q={self.q}, poly={self.reduction_poly:#b})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.m == self.m

    def __hash__(self):
        return hash(("GF2m", self.m))

    def _check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        return self._check(a) ^ self._check(b)

    sub = add

    def mul(self, a: int, b: int) -> int:
        a, b = self._check(a), self._check(b)
        if self.m == 1:
            return a & b
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if self._check(a) == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        result = 1
        base = self._check(a)
        if e < 0:
            base, e = self.inv(base), -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def sample_uniform(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.q))

    def random(self, rng: np.random.Generator, size) -> np.ndarray:
        """Array of i.i.d. uniform elements with dtype uint8."""
        return rng.integers(0, self.q, size=size, dtype=np.uint8)

    def dot(self, a: np.ndarray, b: np.ndarray) -> int:
        """Inner product of two element vectors."""
        prods = self.mul_table[np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8)]
        return int(np.bitwise_xor.reduce(prods, axis=-1)) if prods.size else 0


@lru_cache(maxsize=None)
def field_new(m: int) -> Field:
    return Field(m)


def field_for_order(q: int) -> Field:
    """Field of order ``q``; ``q`` must be one of :data:`SUPPORTED_ORDERS`."""
    if q not in SUPPORTED_ORDERS:
        raise FieldError(f"unsupported field order {q}; expected one of {SUPPORTED_ORDERS}")
    return field_new(int(q).bit_length() - 1)


def add(a: int, b: int) -> int:
    """Addition in any GF(2^m) is XOR of the bit patterns."""
    return a ^ b


def sample_uniform(field: Field, rng: np.random.Generator) -> int:
    return field.sample_uniform(rng)
