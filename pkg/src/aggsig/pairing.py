"""Simulated bilinear group.

Every element of G0, G1 and GT is stored as its exponent with respect to a
fixed generator, so ``g^a * g^b = g^(a+b)`` and ``e(g0^a, g1^b) = gT^(a*b)``.
All algebraic identities of real BLS hold exactly, which is what makes the
attacks reproducible. Nothing here is hiding: discrete logs are the
representation. Never use this for real signatures.

Hash to G0 is pinned as SHA-256 over ``tag || len(msg) || msg || counter``
(lengths and counter as 8-byte big endian), reduced mod q, with the counter
incremented from 0 until the result is nonzero. H and H' differ only in the
domain tag.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Callable, Mapping

from sympy import isprime

from .errors import UsageError

TAG_H = b"aggsig/H/v1"
TAG_H_PRIME = b"aggsig/Hprime/v1"

Q_UNIT = 101
Q_LARGE = (1 << 61) - 1

# hasher(tag, msg, counter) -> int (not yet reduced)
Hasher = Callable[[bytes, bytes, int], int]


def sha256_hasher(tag: bytes, msg: bytes, counter: int) -> int:
    h = hashlib.sha256()
    h.update(tag)
    h.update(len(msg).to_bytes(8, "big"))
    h.update(msg)
    h.update(counter.to_bytes(8, "big"))
    return int.from_bytes(h.digest(), "big")


class StubHasher:
    """Test hasher with a fixed table of exponents for chosen messages.

    Messages missing from the table fall through to SHA-256, so a stub context
    still behaves like a real one elsewhere. Tables can be keyed separately for
    H and H'.
    """

    def __init__(self, table: Mapping[bytes, int] | None = None,
                 prime_table: Mapping[bytes, int] | None = None):
        self.table = {_to_bytes(k): v for k, v in (table or {}).items()}
        self.prime_table = {_to_bytes(k): v for k, v in (prime_table or {}).items()}

    def __call__(self, tag: bytes, msg: bytes, counter: int) -> int:
        table = self.prime_table if tag == TAG_H_PRIME else self.table
        if counter == 0 and msg in table:
            return table[msg]
        return sha256_hasher(tag, msg, counter)


class Group(enum.Enum):
    G0 = "G0"
    G1 = "G1"
    GT = "GT"


def _to_bytes(m) -> bytes:
    if isinstance(m, bytes):
        return m
    if isinstance(m, str):
        return m.encode()
    raise UsageError(f"messages must be bytes or str, got {type(m).__name__}")


@dataclass(frozen=True)
class PairingContext:
    q: int
    hasher: Hasher = field(default=sha256_hasher, compare=False)

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 3 or not isprime(self.q):
            raise UsageError(f"group order must be a prime >= 3, got {self.q!r}")
        if self.q >= 1 << 63:
            raise UsageError("group order must be below 2**63")

    def element(self, group: Group, exponent: int) -> "GroupElement":
        return GroupElement(group, exponent % self.q, self)

    @property
    def g0(self) -> "GroupElement":
        return self.element(Group.G0, 1)

    @property
    def g1(self) -> "GroupElement":
        return self.element(Group.G1, 1)

    @property
    def gT(self) -> "GroupElement":
        return self.element(Group.GT, 1)

    def identity(self, group: Group) -> "GroupElement":
        return self.element(group, 0)

    def _hash(self, tag: bytes, msg) -> "GroupElement":
        data = _to_bytes(msg)
        counter = 0
        while True:
            e = self.hasher(tag, data, counter) % self.q
            if e:
                return self.element(Group.G0, e)
            counter += 1

    def hash_to_g0(self, msg) -> "GroupElement":
        return self._hash(TAG_H, msg)

    def hash_prime_to_g0(self, msg) -> "GroupElement":
        return self._hash(TAG_H_PRIME, msg)


@dataclass(frozen=True)
class GroupElement:
    group: Group
    exponent: int
    ctx: PairingContext = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.exponent < self.ctx.q:
            raise UsageError("exponent out of range")

    def _same(self, other: "GroupElement") -> None:
        if not isinstance(other, GroupElement):
            raise UsageError(f"expected a GroupElement, got {type(other).__name__}")
        if other.ctx.q != self.ctx.q:
            raise UsageError("elements come from different pairing contexts")
        if other.group is not self.group:
            raise UsageError(f"group mismatch: {self.group.value} vs {other.group.value}")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def __truediv__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, inv(other))

    def __pow__(self, s: int) -> "GroupElement":
        return exp(self, s)

    @property
    def is_identity(self) -> bool:
        return self.exponent == 0

    def to_bytes(self) -> bytes:
        width = (self.ctx.q.bit_length() + 7) // 8
        return self.group.value.encode() + self.exponent.to_bytes(width, "big")

    def __str__(self) -> str:
        base = {"G0": "g0", "G1": "g1", "GT": "gT"}[self.group.value]
        return f"{base}^{self.exponent}"


def pair(a: GroupElement, b: GroupElement) -> GroupElement:
    if not isinstance(a, GroupElement) or not isinstance(b, GroupElement):
        raise UsageError("pair expects GroupElements")
    if a.group is not Group.G0 or b.group is not Group.G1:
        raise UsageError(f"pair expects (G0, G1), got ({a.group.value}, {b.group.value})")
    if a.ctx.q != b.ctx.q:
        raise UsageError("elements come from different pairing contexts")
    return a.ctx.element(Group.GT, a.exponent * b.exponent)


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    a._same(b)
    return a.ctx.element(a.group, a.exponent + b.exponent)


def inv(a: GroupElement) -> GroupElement:
    return a.ctx.element(a.group, -a.exponent)


def exp(a: GroupElement, s: int) -> GroupElement:
    if not isinstance(s, int):
        raise UsageError("exponent must be an integer scalar")
    return a.ctx.element(a.group, a.exponent * s)


def product(elems, group: Group, ctx: PairingContext) -> GroupElement:
    acc = ctx.identity(group)
    for e in elems:
        acc = mul(acc, e)
    return acc
