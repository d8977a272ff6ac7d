"""Stochastic, thermometer-unary, and binary word formats.

These are the noise-free reference representations: every simulated
conversion is scored against :func:`stob_oracle`, which composes the two
digital phases (count -> thermometer -> priority-encoded binary) exactly.

Bit index 0 is the leftmost bit and maps to bitline BL_0.  All string
renderings state the direction explicitly because printed conventions in
the literature are mixed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedUnaryError, RangeError


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _check_bits(bits) -> tuple[int, ...]:
    bits = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    return bits


@dataclass(frozen=True)
class StochasticWord:
    """Rate-coded operand of length N; encodes popcount(bits) / N."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", _check_bits(self.bits))
        if not _is_pow2(len(self.bits)):
            raise ValueError(
                f"length must be a power of two >= 2, got {len(self.bits)}"
            )

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> float:
        return popcount(self) / self.n

    @classmethod
    def from_string(cls, s: str) -> "StochasticWord":
        return cls(tuple(int(c) for c in s.strip()))

    @classmethod
    def from_int(cls, v: int, n: int) -> "StochasticWord":
        """Operand whose bit i equals bit i of v (index0=left = LSB of v)."""
        return cls(tuple((v >> i) & 1 for i in range(n)))

    def render(self) -> str:
        return "".join(str(b) for b in self.bits) + " (index0=left)"


@dataclass(frozen=True)
class UnaryWord:
    """Transition-coded (thermometer) word: all 1s form a prefix at index 0."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = _check_bits(self.bits)
        object.__setattr__(self, "bits", bits)
        if not bits:
            raise ValueError("empty unary word")
        c = sum(bits)
        if bits != (1,) * c + (0,) * (len(bits) - c):
            raise MalformedUnaryError(
                f"not a thermometer pattern: {''.join(map(str, bits))}"
            )

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def count(self) -> int:
        return sum(self.bits)

    def render(self) -> str:
        return "".join(str(b) for b in self.bits) + " (index0=left)"


@dataclass(frozen=True)
class BinaryWord:
    """Priority-encoder output: `width` = log2(N) bits."""

    value: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not 0 <= self.value <= 2**self.width - 1:
            raise RangeError(
                f"value {self.value} does not fit in {self.width} bits"
            )


def popcount(w: StochasticWord) -> int:
    """Number of 1s in the operand; the oracle value for every conversion."""
    return sum(w.bits)


def to_unary(count: int, n: int) -> UnaryWord:
    """Thermometer word with `count` ones in the prefix positions."""
    if not 0 <= count <= n:
        raise RangeError(f"count {count} outside [0, {n}]")
    return UnaryWord((1,) * count + (0,) * (n - count))


def encoder_width(n: int) -> int:
    if not _is_pow2(n):
        raise ValueError(f"N must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def unary_to_binary(u: UnaryWord) -> BinaryWord:
    """Priority-encode a thermometer word to log2(N) bits.

    The all-ones word saturates to 2**width - 1: an N:log2(N) encoder has
    no code for count N.
    """
    width = encoder_width(u.n)
    return BinaryWord(min(u.count, 2**width - 1), width)


def stob_oracle(w: StochasticWord) -> BinaryWord:
    """Noise-free ground truth: count the 1s, then priority-encode."""
    return unary_to_binary(to_unary(popcount(w), w.n))


def saturates(w: StochasticWord) -> bool:
    """True for the all-ones operand, whose count exceeds the encoder range."""
    return popcount(w) == w.n
