"""Immutable symbolic terms.

Each term carries a precomputed structural key (constructor tag followed by
the children's keys). The key gives cheap hashing, structural equality and a
total order, which the explorer relies on to canonicalise multisets and to
make branch order deterministic.
"""
from __future__ import annotations

from typing import Iterable


class Term:
    __slots__ = ("_key", "_hash")
    TAG = "?"

    def _init(self, *parts) -> None:
        self._key = (self.TAG,) + parts
        self._hash = hash(self._key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, Term) and self._hash == other._hash and self._key == other._key

    def __lt__(self, other: "Term") -> bool:
        return self._key < other._key

    def __le__(self, other: "Term") -> bool:
        return self._key <= other._key

    @property
    def key(self) -> tuple:
        return self._key

    def children(self) -> tuple["Term", ...]:
        return ()

    def __repr__(self) -> str:
        return render(self)

    __str__ = __repr__


class Name(Term):
    """A named constant: public values, identities, secret-key atoms."""

    __slots__ = ("label",)
    TAG = "Name"

    def __init__(self, label: str):
        self.label = label
        self._init(label)


class Nonce(Term):
    __slots__ = ("id", "fresh")
    TAG = "Nonce"

    def __init__(self, id: str, fresh: bool = True):
        self.id = id
        self.fresh = fresh
        self._init(id, fresh)


class Tup(Term):
    __slots__ = ("items",)
    TAG = "Tup"

    def __init__(self, *items: Term):
        self.items = tuple(items)
        self._init(tuple(t._key for t in self.items))

    def children(self):
        return self.items


class Hash(Term):
    __slots__ = ("arg",)
    TAG = "Hash"

    def __init__(self, arg: Term):
        self.arg = arg
        self._init(arg._key)

    def children(self):
        return (self.arg,)


class Sign(Term):
    __slots__ = ("msg", "sk")
    TAG = "Sign"

    def __init__(self, msg: Term, sk: Term):
        self.msg = msg
        self.sk = sk
        self._init(msg._key, sk._key)

    def children(self):
        return (self.msg, self.sk)


class Pk(Term):
    __slots__ = ("sk",)
    TAG = "Pk"

    def __init__(self, sk: Term):
        self.sk = sk
        self._init(sk._key)

    def children(self):
        return (self.sk,)


class Enc(Term):
    __slots__ = ("msg", "pk")
    TAG = "Enc"

    def __init__(self, msg: Term, pk: Term):
        self.msg = msg
        self.pk = pk
        self._init(msg._key, pk._key)

    def children(self):
        return (self.msg, self.pk)


class IndexedAgg(Term):
    """Aggregate in the validation models: a multiset of (signature, index).

    Entries are stored sorted by signature so equal multisets compare equal.
    """

    __slots__ = ("entries",)
    TAG = "IndexedAgg"

    def __init__(self, entries: Iterable[tuple[Term, int]]):
        entries = tuple(sorted(entries, key=lambda e: (e[0]._key, e[1])))
        idx = [i for _, i in entries]
        if len(set(idx)) != len(idx):
            raise ValueError("IndexedAgg indices must be pairwise distinct")
        self.entries = entries
        self._init(tuple((s._key, i) for s, i in entries))

    @classmethod
    def of(cls, sigs: Iterable[Term]) -> "IndexedAgg":
        """Assign indices 1..n by canonical position of the signatures."""
        return cls((s, i + 1) for i, s in enumerate(sorted(sigs)))

    def children(self):
        return tuple(s for s, _ in self.entries)


class RoguePk(Term):
    __slots__ = ("target",)
    TAG = "RoguePk"

    def __init__(self, target: Term):
        self.target = target
        self._init(target._key)

    def children(self):
        return (self.target,)


class RogueSk(Term):
    __slots__ = ("target",)
    TAG = "RogueSk"

    def __init__(self, target: Term):
        self.target = target
        self._init(target._key)

    def children(self):
        return (self.target,)


class _ListAgg(Term):
    __slots__ = ("msgs", "pks")

    def __init__(self, msgs: Iterable[Term], pks: Iterable[Term]):
        self.msgs = tuple(msgs)
        self.pks = tuple(pks)
        if len(self.msgs) != len(self.pks) or not self.msgs:
            raise ValueError(f"{self.TAG} needs equal-length, nonempty message and key lists")
        self._init(tuple(m._key for m in self.msgs), tuple(p._key for p in self.pks))

    def pairs(self) -> tuple[tuple[Term, Term], ...]:
        return tuple(zip(self.msgs, self.pks))

    def children(self):
        return self.msgs + self.pks


class ValidAgg(_ListAgg):
    __slots__ = ()
    TAG = "ValidAgg"


class RogueAgg(_ListAgg):
    __slots__ = ()
    TAG = "RogueAgg"


class ZeroAgg(Term):
    __slots__ = ("valid", "zero_pks")
    TAG = "ZeroAgg"

    def __init__(self, valid: ValidAgg, zero_pks: Iterable[Term]):
        self.valid = valid
        self.zero_pks = tuple(zero_pks)
        if not self.zero_pks:
            raise ValueError("ZeroAgg needs at least one colliding key")
        self._init(valid._key, tuple(p._key for p in self.zero_pks))

    def children(self):
        return (self.valid,) + self.zero_pks


AGG_TYPES = (IndexedAgg, ValidAgg, RogueAgg, ZeroAgg)
PRIVATE_TYPES = AGG_TYPES + (RogueSk,)


def is_atom(t: Term) -> bool:
    return isinstance(t, (Name, Nonce))


def subterms(t: Term):
    yield t
    for c in t.children():
        yield from subterms(c)


def render(t: Term) -> str:
    """Canonical text rendering, stable across runs."""
    if isinstance(t, Name):
        return t.label
    if isinstance(t, Nonce):
        return f"~{t.id}" if t.fresh else f"${t.id}"
    if isinstance(t, Tup):
        return "<" + ", ".join(render(x) for x in t.items) + ">"
    if isinstance(t, Hash):
        return f"h({render(t.arg)})"
    if isinstance(t, Sign):
        return f"sign({render(t.msg)}, {render(t.sk)})"
    if isinstance(t, Pk):
        return f"pk({render(t.sk)})"
    if isinstance(t, Enc):
        return f"enc({render(t.msg)}, {render(t.pk)})"
    if isinstance(t, IndexedAgg):
        return "agg(" + " + ".join(f"<{render(s)}, {i}>" for s, i in t.entries) + ")"
    if isinstance(t, RoguePk):
        return f"roguePk({render(t.target)})"
    if isinstance(t, RogueSk):
        return f"rogueSk({render(t.target)})"
    if isinstance(t, (ValidAgg, RogueAgg)):
        name = "validAgg" if isinstance(t, ValidAgg) else "rogueAgg"
        ms = ", ".join(render(m) for m in t.msgs)
        ps = ", ".join(render(p) for p in t.pks)
        return f"{name}(<{ms}>, <{ps}>)"
    if isinstance(t, ZeroAgg):
        return f"zeroAgg({render(t.valid)}, <{', '.join(render(p) for p in t.zero_pks)}>)"
    raise TypeError(f"not a term: {t!r}")
