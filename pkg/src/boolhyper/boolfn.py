"""Truth-table Boolean functions.

A table of arity ``a`` stores one output bit for each of the ``2**a`` input
combinations. The first listed input is the most significant bit of the row
index, so ``outputs[0]`` is the output when every input is 0 and
``outputs[-1]`` the output when every input is 1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from boolhyper.errors import DomainError

MAX_ARITY = 16


def _check_arity(arity: int) -> None:
    if not 0 <= arity <= MAX_ARITY:
        raise DomainError(f"arity must be in [0, {MAX_ARITY}], got {arity}")


class TruthTable:
    """Immutable Boolean function of fixed arity."""

    __slots__ = ("arity", "outputs")

    def __init__(self, arity: int, outputs: Sequence[int] | np.ndarray):
        _check_arity(arity)
        bits = np.array(outputs, dtype=np.uint8).ravel()
        if bits.size != 1 << arity:
            raise DomainError(f"arity {arity} needs {1 << arity} outputs, got {bits.size}")
        if np.any(bits > 1):
            raise DomainError("outputs must be 0/1")
        bits.setflags(write=False)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "outputs", bits)

    @classmethod
    def _trusted(cls, arity: int, bits: np.ndarray) -> "TruthTable":
        # Caller guarantees a 0/1 uint8 array of length 2**arity.
        table = object.__new__(cls)
        bits.setflags(write=False)
        object.__setattr__(table, "arity", arity)
        object.__setattr__(table, "outputs", bits)
        return table

    def __setattr__(self, name, value):
        raise AttributeError("TruthTable is immutable")

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.arity == other.arity and bool(np.array_equal(self.outputs, other.outputs))

    def __hash__(self):
        return hash((self.arity, self.outputs.tobytes()))

    def __repr__(self):
        return f"TruthTable(arity={self.arity}, hex={self.to_hex()!r})"

    def __call__(self, *inputs: int) -> int:
        return evaluate(self, inputs)

    def to_hex(self) -> str:
        """Lowercase hex of the integer whose bit ``i`` is ``outputs[i]``."""
        return format(self.to_int(), "x")

    def to_int(self) -> int:
        packed = np.packbits(self.outputs, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    @classmethod
    def from_int(cls, arity: int, value: int) -> "TruthTable":
        _check_arity(arity)
        size = 1 << arity
        if value < 0 or value >> size:
            raise DomainError(f"value does not fit in {size} output bits")
        raw = np.frombuffer(value.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return cls(arity, np.unpackbits(raw, bitorder="little")[:size])

    @classmethod
    def from_hex(cls, arity: int, text: str) -> "TruthTable":
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise DomainError(f"bad truth-table hex {text!r}") from exc
        return cls.from_int(arity, value)


def table_count(arity: int) -> int:
    """Number of distinct Boolean functions of ``arity`` inputs, ``2**(2**arity)``."""
    _check_arity(arity)
    return 1 << (1 << arity)


def sample_table(arity: int, rng: np.random.Generator) -> TruthTable:
    """Draw a table uniformly from all ``table_count(arity)`` functions.

    One fair bit is drawn per output entry.
    """
    _check_arity(arity)
    return TruthTable._trusted(arity, rng.integers(0, 2, size=1 << arity, dtype=np.uint8))


def sample_tables(arity: int, count: int, rng: np.random.Generator) -> list[TruthTable]:
    """``count`` independent uniform tables, drawn as one block of fair bits."""
    _check_arity(arity)
    block = rng.integers(0, 2, size=(count, 1 << arity), dtype=np.uint8)
    return [TruthTable._trusted(arity, row) for row in block]


_IDENTITY = TruthTable(1, [0, 1])


def identity_table() -> TruthTable:
    return _IDENTITY


def evaluate(table: TruthTable, inputs: Sequence[int]) -> int:
    if len(inputs) != table.arity:
        raise DomainError(f"expected {table.arity} inputs, got {len(inputs)}")
    index = 0
    for bit in inputs:
        index = (index << 1) | (1 if bit else 0)
    return int(table.outputs[index])
