"""Linear random fountain code (LRFC) over GF(2^m).

Each output symbol is a random linear combination of the ``k`` input
symbols with coefficients drawn uniformly from the field.  The receiver
keeps an incremental row-echelon store so the rank is known after every
symbol, and back-substitutes once the rank reaches ``k``.

The analytic half of the module gives the failure probability after
``k + delta`` received symbols, its geometric bounds and the mean overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .gf import Field

DEFAULT_TAIL_TOL = 1e-12


class DecodingError(RuntimeError):
    """Raised when solving is attempted on a rank-deficient system."""


@dataclass(frozen=True)
class SourceBlock:
    """``k`` input symbols; ``packed`` holds the same data bit-sliced."""

    field: Field
    symbols: np.ndarray
    packed: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.uint8)
        if symbols.ndim != 1 or symbols.size < 1:
            raise ValueError("a source block needs k >= 1 symbols")
        if symbols.max() >= self.field.q:
            raise ValueError(f"symbol outside GF({self.field.q})")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(
            self, "packed", _kernels.pack_vector(symbols, _kernels.words_for(symbols.size), self.field.m)
        )

    @property
    def k(self) -> int:
        return self.symbols.size

    @classmethod
    def random(cls, field: Field, k: int, rng: np.random.Generator) -> SourceBlock:
        return cls(field, field.random(rng, k))

    def __eq__(self, other):
        return (
            isinstance(other, SourceBlock)
            and other.field == self.field
            and np.array_equal(other.symbols, self.symbols)
        )

    __hash__ = None


@dataclass(frozen=True)
class CodedSymbol:
    coeffs: np.ndarray
    value: int


def encode(block: SourceBlock, rng: np.random.Generator) -> CodedSymbol:
    """Draw one output symbol: fresh uniform coefficients and their inner product."""
    coeffs = block.field.random(rng, block.k)
    return CodedSymbol(coeffs, block.field.dot(coeffs, block.symbols))


def encode_many(block: SourceBlock, rng: np.random.Generator, count: int):
    """Draw ``count`` output symbols at once.

    Returns ``(coeffs, values)`` with shapes ``(count, k)`` and ``(count,)``;
    row ``i`` of ``coeffs`` is the coefficient column of symbol ``i``.
    """
    coeffs = block.field.random(rng, (count, block.k))
    values = _kernels.encode_values(coeffs, block.symbols, block.field.mul_table)
    return coeffs, values


def encode_packed(block: SourceBlock, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` output symbols in the decoder's bit-sliced layout.

    Uniform field elements are exactly uniform bits in every bit plane, so
    the coefficient planes come straight from the bit generator; values are
    then computed in packed form.  Returns a ``(count, m, W)`` uint64 array
    accepted by :meth:`DecoderState.add_packed_until_full`.
    """
    f, k = block.field, block.k
    W = _kernels.words_for(k)
    raw = rng.bit_generator.random_raw(count * f.m * W).reshape(count, f.m, W)
    _kernels.encode_packed(raw, block.packed, k, f.reduction_poly)
    return raw


def unpack_symbols(packed: np.ndarray, k: int) -> list[CodedSymbol]:
    out = []
    for v in packed:
        elems = _kernels.unpack_vector(v, k + 1)
        out.append(CodedSymbol(elems[:k], int(elems[k])))
    return out


class DecoderState:
    """Incremental Gaussian-elimination receiver for one source block."""

    def __init__(self, field: Field, k: int):
        if k < 1:
            raise ValueError("k must be positive")
        self.field = field
        self.k = k
        self._store = np.empty(_kernels.store_shape(k, field.m), dtype=np.uint64)
        self.pivot = np.zeros(k, dtype=np.bool_)
        self.rank = 0
        self.m_collected = 0

    @property
    def echelon(self) -> np.ndarray:
        """Row-echelon coefficients with the received values as last column.

        Row ``p`` is the normalized pivot row for column ``p`` (all zero if
        column ``p`` has no pivot yet).
        """
        return _kernels.unpack_rows(self._store, self.pivot)

    @property
    def overhead(self) -> int:
        return self.m_collected - self.k

    @property
    def full_rank(self) -> bool:
        return self.rank == self.k

    def add(self, sym: CodedSymbol) -> int:
        """Absorb one symbol; returns 1 if it was linearly independent, else 0."""
        coeffs = np.asarray(sym.coeffs, dtype=np.uint8)
        if coeffs.shape != (self.k,):
            raise ValueError(f"expected {self.k} coefficients, got shape {coeffs.shape}")
        f = self.field
        gained = _kernels.absorb(
            self._store, self.pivot, coeffs, np.uint8(sym.value), f.inv_table, f.reduction_poly
        )
        self.rank += gained
        self.m_collected += 1
        return gained

    def add_until_full(self, coeffs: np.ndarray, values: np.ndarray) -> int:
        """Absorb rows of ``coeffs`` in order, stopping at full rank.

        Returns the number of symbols consumed.
        """
        if coeffs.ndim != 2 or coeffs.shape[1] != self.k:
            raise ValueError(f"expected an (n, {self.k}) coefficient array")
        f = self.field
        self.rank, used = _kernels.absorb_until_full(
            self._store, self.pivot, self.rank, coeffs, values, f.inv_table, f.reduction_poly
        )
        self.m_collected += used
        return used

    def add_packed_until_full(self, packed: np.ndarray) -> int:
        """Like :meth:`add_until_full` for symbols from :func:`encode_packed`."""
        f = self.field
        self.rank, used = _kernels.absorb_stream_until_full(
            self._store, self.pivot, self.rank, packed, f.inv_table, f.reduction_poly
        )
        self.m_collected += used
        return used

    def solve(self) -> SourceBlock:
        if self.rank < self.k:
            raise DecodingError(
                f"decoding failure: rank {self.rank} < k={self.k} after {self.m_collected} symbols"
            )
        return SourceBlock(self.field, _kernels.back_substitute(self.echelon, self.field.mul_table))


def decoder_add(state: DecoderState, sym: CodedSymbol) -> int:
    return state.add(sym)


def decoder_solve(state: DecoderState) -> SourceBlock:
    return state.solve()


# -- analytics ---------------------------------------------------------------


@lru_cache(maxsize=65536)
def p_fail(k: int, delta: int, q: int) -> float:
    """Probability that ``k + delta`` random columns do not span GF(q)^k.

    With ``x_j = q^-(delta+j)`` the failure probability ``1 - prod(1 - x_j)``
    telescopes into ``sum_j x_j prod_{i<j} (1 - x_i)``, a sum of positive
    terms, so tiny probabilities keep full relative precision.  Negative
    ``delta`` gives exactly 1.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if delta < 0:
        return 1.0
    x = float(q) ** -(delta + np.arange(1, k + 1, dtype=np.float64))
    survive = np.concatenate(([1.0], np.cumprod(1.0 - x[:-1])))
    return math.fsum(x * survive)


def p_fail_exact(k: int, delta: int, q: int) -> Fraction:
    """:func:`p_fail` in exact rational arithmetic."""
    if k < 1:
        raise ValueError("k must be positive")
    if delta < 0:
        return Fraction(1)
    prod = Fraction(1)
    for j in range(1, k + 1):
        prod *= 1 - Fraction(1, q ** (delta + j))
    return 1 - prod


def p_fail_lower(delta: int, q: int) -> float:
    return float(q) ** (-delta - 1)


def p_fail_upper(delta: int, q: int) -> float:
    return float(q) ** -delta / (q - 1)


def overhead_pmf(k: int, delta: int, q: int) -> float:
    """Probability that decoding succeeds with exactly ``k + delta`` symbols."""
    if delta < 0:
        return 0.0
    return p_fail(k, delta - 1, q) - p_fail(k, delta, q)


def truncation_depth(q: int, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest ``D >= 0`` with ``p_fail_upper(D, q) < tail_tol``."""
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    d = max(0, math.ceil(-math.log(tail_tol * (q - 1)) / math.log(q)))
    while d > 0 and p_fail_upper(d - 1, q) < tail_tol:
        d -= 1
    while p_fail_upper(d, q) >= tail_tol:
        d += 1
    return d


def tail_bound(q: int, depth: int) -> float:
    """Upper bound on ``sum(p_fail(k, d, q) for d > depth)``."""
    return float(q) ** -depth / (q - 1) ** 2


@lru_cache(maxsize=4096)
def _p_fail_prefix(k: int, q: int, depth: int) -> np.ndarray:
    """``out[m] = sum(p_fail(k, d, q) for d in range(min(m, depth + 1)))``."""
    terms = np.array([p_fail(k, d, q) for d in range(depth + 1)])
    out = np.concatenate(([0.0], np.cumsum(terms)))
    out.setflags(write=False)
    return out


def p_fail_partial_sum(k: int, q: int, upto: int, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """``sum(p_fail(k, d, q) for d in range(upto))`` with the certified truncation."""
    prefix = _p_fail_prefix(k, q, truncation_depth(q, tail_tol))
    return float(prefix[min(max(upto, 0), prefix.size - 1)])


def avg_overhead(k: int, q: int, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Mean number of symbols beyond ``k`` needed to decode."""
    prefix = _p_fail_prefix(k, q, truncation_depth(q, tail_tol))
    return float(prefix[-1])


def avg_overhead_bound(q: int) -> float:
    if q < 2:
        raise ValueError("q must be at least 2")
    return q / (q - 1) ** 2
