"""Label transformation used for symmetry breaking.

The binary representation ``b0 b1 ... b(n-1)`` of a label becomes
``b0 b0 b1 b1 ... b(n-1) b(n-1) 0 1``. Two distinct labels never produce
transformed labels that are prefixes of one another.
"""

from __future__ import annotations

from dataclasses import dataclass


class DuplicateLabelError(ValueError):
    """Both agents carry the same label, which the model forbids."""


@dataclass(frozen=True)
class TransformedLabel:
    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def bit(self, i: int) -> int:
        return bit_at(self, i)


def transform(label: int) -> TransformedLabel:
    if label < 0:
        raise ValueError("labels are non-negative integers")
    bits: list[int] = []
    for ch in format(label, "b"):
        b = int(ch)
        bits += (b, b)
    return TransformedLabel(tuple(bits) + (0, 1))


def bit_at(t: TransformedLabel, i: int) -> int:
    """The ``i``-th bit (1-based); positions past the end read as 0."""
    if i < 1:
        raise ValueError("bit positions start at 1")
    return t.bits[i - 1] if i <= len(t.bits) else 0


def first_diff_index(a: TransformedLabel, b: TransformedLabel) -> int:
    if a == b:
        raise DuplicateLabelError("transformed labels are identical")
    for j in range(1, max(len(a), len(b)) + 1):
        if bit_at(a, j) != bit_at(b, j):
            return j
    # Unreachable for outputs of transform(): neither is a prefix of the other.
    raise DuplicateLabelError(f"{a} and {b} differ only by zero padding")


def labels_first_diff(label_a: int, label_b: int) -> int:
    return first_diff_index(transform(label_a), transform(label_b))
