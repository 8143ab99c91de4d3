"""Dolev-Yao knowledge: analysis by projection and decryption, bounded synthesis."""
from __future__ import annotations

from typing import Iterable

from .terms import (PRIVATE_TYPES, Enc, Hash, Name, Nonce, Pk, RoguePk, Sign, Term, Tup)


class Knowledge:
    """Immutable, analysis-closed set of adversary knowledge.

    Terms learned are decomposed eagerly (tuples split, ciphertexts opened once
    the matching secret key is derivable) so that synthesis only needs to
    compose.
    """

    __slots__ = ("terms", "ids", "_sealed", "_cache", "_hash")

    def __init__(self, terms: Iterable[Term] = (), depth: int = 4, _closed: bool = False):
        base = frozenset(terms)
        if not _closed:
            base, _ = _close(frozenset(), (), base, depth)
        self._set(base, tuple(t for t in base if isinstance(t, Enc) and t.msg not in base),
                  frozenset(map(_intern, base)))

    def _set(self, terms, sealed, ids):
        self.terms = terms
        self._sealed = sealed
        # interned ids: cheap hashing, equality and subset tests for the explorer
        self.ids = ids
        self._cache: dict = {}
        self._hash = hash(ids)

    def __contains__(self, t: Term) -> bool:
        return t in self.terms

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Knowledge) and self.ids == other.ids

    def add(self, new: Iterable[Term], depth: int = 4) -> "Knowledge":
        new = [t for t in new if t not in self.terms]
        if not new:
            return self
        terms, sealed = _close(self.terms, self._sealed, new, depth)
        k = Knowledge.__new__(Knowledge)
        k._set(terms, sealed, self.ids | frozenset(_intern(t) for t in terms - self.terms))
        return k

    def can_derive(self, target: Term, depth: int = 4) -> bool:
        key = (target, depth)
        hit = self._cache.get(key)
        if hit is None:
            hit = _derive(self.terms, target, depth)
            self._cache[key] = hit
        return hit

    def atoms(self) -> list[Term]:
        return sorted(t for t in self.terms if isinstance(t, (Name, Nonce)))


def _derive(known: frozenset, t: Term, depth: int) -> bool:
    if t in known:
        return True
    if depth <= 0:
        return False
    if isinstance(t, (Name, Nonce, RoguePk) + PRIVATE_TYPES):
        return False
    if isinstance(t, Tup):
        return all(_derive(known, x, depth - 1) for x in t.items)
    if isinstance(t, Hash):
        return _derive(known, t.arg, depth - 1)
    if isinstance(t, Pk):
        return _derive(known, t.sk, depth - 1)
    if isinstance(t, Sign):
        return _derive(known, t.sk, depth - 1) and _derive(known, t.msg, depth - 1)
    if isinstance(t, Enc):
        return _derive(known, t.pk, depth - 1) and _derive(known, t.msg, depth - 1)
    return False


_IDS: dict = {}


def _intern(t: Term) -> int:
    i = _IDS.get(t)
    if i is None:
        i = _IDS[t] = len(_IDS)
    return i


def _close(old: frozenset, sealed: tuple, new: Iterable[Term], depth: int) -> tuple[frozenset, tuple]:
    """Analysis closure of ``old`` (already closed) plus ``new``; also returns unopened ciphertexts."""
    known = set(old)
    work = [t for t in new if t not in known]
    known.update(work)
    sealed = list(sealed)
    while True:
        while work:
            t = work.pop()
            if isinstance(t, Tup):
                for x in t.items:
                    if x not in known:
                        known.add(x)
                        work.append(x)
            elif isinstance(t, Enc):
                sealed.append(t)
        frozen = frozenset(known)
        opened, still = [], []
        for e in sealed:
            if e.msg in known:
                continue
            if isinstance(e.pk, Pk) and _derive(frozen, e.pk.sk, depth):
                opened.append(e.msg)
            else:
                still.append(e)
        sealed = still
        if not opened:
            return frozen, tuple(sealed)
        for m in opened:
            if m not in known:
                known.add(m)
                work.append(m)


def deduce(knowledge, target: Term, depth: int = 4) -> bool:
    """True iff ``target`` is constructible from ``knowledge`` within ``depth``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    k = knowledge if isinstance(knowledge, Knowledge) else Knowledge(knowledge, depth)
    return k.can_derive(target, depth)
