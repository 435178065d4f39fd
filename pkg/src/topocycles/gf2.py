"""Small GF(2) linear algebra helpers over int bitsets.

A vector is a Python int whose bit ``i`` is the coordinate of element ``i``
of some fixed ordering of a finite ground set.
"""

from __future__ import annotations

from typing import Iterable, Iterator, List, Sequence


def popcount(x: int) -> int:
    return bin(x).count("1")


def reduce_basis(vectors: Iterable[int]) -> List[int]:
    """Return a basis of the span of ``vectors`` in reduced echelon form.

    Each basis row has a distinct leading (highest) bit, and no other row
    has that bit set.
    """
    basis: List[int] = []
    for v in vectors:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            top = v.bit_length() - 1
            basis = [b ^ v if (b >> top) & 1 else b for b in basis]
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def rank(vectors: Iterable[int]) -> int:
    return len(reduce_basis(vectors))


def in_span(v: int, basis: Sequence[int]) -> bool:
    """Membership test against a basis produced by :func:`reduce_basis`."""
    for b in basis:
        if v ^ b < v:
            v ^= b
    return v == 0


def span(basis: Sequence[int]) -> Iterator[int]:
    """Enumerate all ``2**len(basis)`` elements of the span (Gray-code order)."""
    x = 0
    yield x
    for i in range(1, 1 << len(basis)):
        # bit that flips between Gray codes i-1 and i
        j = (i & -i).bit_length() - 1
        x ^= basis[j]
        yield x


def orthogonal_complement(rows: Iterable[int], n: int) -> List[int]:
    """Basis of ``{x in GF(2)^n : popcount(x & r) even for every r}``."""
    basis = reduce_basis(rows)
    pivots = {b.bit_length() - 1: b for b in basis}
    free = [i for i in range(n) if i not in pivots]
    out = []
    for f in free:
        x = 1 << f
        # each pivot coordinate is forced by its row's parity
        for p, b in pivots.items():
            if (b >> f) & 1:
                x |= 1 << p
        out.append(x)
    return out


def mask_of(items: Iterable, index: dict) -> int:
    m = 0
    for it in items:
        m |= 1 << index[it]
    return m


def items_of(mask: int, order: Sequence) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(order[i])
        mask >>= 1
        i += 1
    return frozenset(out)
