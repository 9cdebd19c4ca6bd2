"""Ordered decompositions of a winding number into admissible pieces.

A degree can split across widely separated groups of walls only if the
pieces are themselves admissible positive degrees and neighbouring
non-integer pieces pair up to an integer; these decompositions drive the
splitting diagnostics.  All arithmetic is exact on the (k, offset) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .profiles import FieldParam, Offset, WindingNumber

__all__ = ["Partition", "admissible_positive", "enumerate_partitions"]


def admissible_positive(d: WindingNumber, p: FieldParam) -> bool:
    """Membership of the positive degree set used for partitions.

    For h < 1: k + offset*alpha/pi with k >= 1, plus the lone alpha/pi;
    for h = 1 the offsets collapse and the set is the positive integers.
    """
    d = d.normalized(p)
    if p.h == 1.0:
        return d.k >= 1
    if d.k == 0:
        return d.offset is Offset.PLUS
    return d.k >= 1


@dataclass(frozen=True)
class Partition:
    """Ordered parts summing to the target degree in exact arithmetic."""

    parts: tuple[WindingNumber, ...]
    target: WindingNumber

    def labels(self) -> list[str]:
        return [q.label() for q in self.parts]


def _adjacency_ok(parts: tuple[WindingNumber, ...], p: FieldParam) -> bool:
    non_int = [q for q in parts if not q.is_integer(p)]
    # consecutive non-integer parts (any integers in between) must sum to an
    # integer, i.e. carry opposite offsets
    for a, b in zip(non_int, non_int[1:]):
        if a.offset.value + b.offset.value != 0:
            return False
    return True


def _sum_matches(parts: tuple[WindingNumber, ...], d: WindingNumber) -> bool:
    return (
        sum(q.k for q in parts) == d.k
        and sum(q.offset.value for q in parts) == d.offset.value
    )


def enumerate_partitions(
    d: WindingNumber, p: FieldParam, max_parts: int
) -> list[Partition]:
    """All nontrivial ordered partitions of d with at most ``max_parts`` parts.

    Deterministic order: by part count, then lexicographically by the
    (k, offset) tuples.
    """
    d = d.normalized(p)
    if not admissible_positive(d, p):
        raise ValueError(f"degree {d.label()} is not an admissible positive degree")
    if max_parts < 2:
        raise ValueError("max_parts must be >= 2")

    if p.h == 1.0:
        candidates = [WindingNumber(k) for k in range(1, d.k)]
    else:
        candidates = []
        for k in range(0, d.k + 1):
            for off in (Offset.MINUS, Offset.ZERO, Offset.PLUS):
                q = WindingNumber(k, off)
                if admissible_positive(q, p):
                    candidates.append(q)
    candidates.sort(key=lambda q: (q.k, q.offset.value))

    out: list[Partition] = []

    def extend(prefix: list[WindingNumber], k_sum: int, s_sum: int):
        if len(prefix) >= 2 and k_sum == d.k and s_sum == d.offset.value:
            parts = tuple(prefix)
            if _adjacency_ok(parts, p):
                out.append(Partition(parts, d))
        if len(prefix) == max_parts:
            return
        for q in candidates:
            if k_sum + q.k > d.k:  # integer parts of the pieces sum exactly
                continue
            prefix.append(q)
            extend(prefix, k_sum + q.k, s_sum + q.offset.value)
            prefix.pop()

    extend([], 0, 0)
    out.sort(key=lambda pt: (len(pt.parts), [(q.k, q.offset.value) for q in pt.parts]))
    return out
