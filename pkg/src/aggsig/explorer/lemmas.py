"""Trace properties, evaluated incrementally so the explorer can stop at the first violation."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..errors import UsageError
from .events import WILDCARD, Event


class LemmaKind(enum.Enum):
    MessageAuthenticity = "message-authenticity"
    WeakAgreement = "weak-agreement"
    NoSplittingZero = "no-splitting-zero"
    NoRogueKey = "no-rogue-key"
    Aliveness = "aliveness"
    NonInjectiveAgreement = "non-injective-agreement"


@dataclass(frozen=True)
class Lemma:
    kind: LemmaKind
    claimant_role: str | None = None   # only Commit events by actors of this role kind
    tag: str | None = None             # only Running/Commit events carrying this tag
    name: str = ""

    @property
    def label(self) -> str:
        return self.name or self.kind.value


@dataclass(frozen=True)
class LemmaContext:
    honest_identities: frozenset
    honest_pks: frozenset
    role_of: dict = field(default_factory=dict, hash=False, compare=False)


class Checker:
    """Incremental lemma evaluation over a growing trace."""

    def __init__(self, lemma: Lemma, ctx: LemmaContext, facts: Iterable[tuple] = (), active: Iterable[str] = ()):
        self.lemma = lemma
        self.ctx = ctx
        self.facts = set(facts)
        self.active = set(active)

    def feed(self, ev: Event) -> bool:
        """Add one event; return True iff it violates the lemma given everything before it."""
        bad = violates(self.lemma, self.ctx, ev, self.facts, self.active)
        self.facts.add(ev.fact)
        self.active.add(ev.actor)
        return bad


def _commit_in_scope(lemma: Lemma, ctx: LemmaContext, ev: Event) -> bool:
    if ev.kind != "Commit":
        return False
    claimant, partner, _, tag = ev.args
    if lemma.tag is not None and tag != lemma.tag:
        return False
    if lemma.claimant_role is not None and ctx.role_of.get(claimant) != lemma.claimant_role:
        return False
    return partner in ctx.honest_identities


def violates(lemma: Lemma, ctx: LemmaContext, ev: Event, facts, active) -> bool:
    k = lemma.kind
    if k in (LemmaKind.MessageAuthenticity, LemmaKind.NoRogueKey):
        if ev.kind != "VfyAgg" or ev.args[2] is not True:
            return False
        for m, pk, *_ in ev.args[1]:
            if pk in ctx.honest_pks and ("Sign", (m, pk)) not in facts:
                return True
        return False
    if k is LemmaKind.NoSplittingZero:
        if ev.kind != "VfyAgg" or ev.args[2] is not True:
            return False
        agg, pairs, _ = ev.args
        mine = Counter(p[0] for p in pairs)
        for kind, args in facts:
            if kind == "VfyAgg" and args[2] is True and args[0] == agg:
                if Counter(p[0] for p in args[1]) != mine:
                    return True
        return False
    if not _commit_in_scope(lemma, ctx, ev):
        return False
    claimant, partner, payload, tag = ev.args
    if k is LemmaKind.Aliveness:
        return partner not in active
    if k is LemmaKind.WeakAgreement:
        for kind, args in facts:
            if kind == "Running" and args[0] == partner and args[1] == claimant:
                return False
        return True
    if k is LemmaKind.NonInjectiveAgreement:
        for kind, args in facts:
            if (kind == "Running" and args[0] == partner and args[1] in (claimant, WILDCARD)
                    and args[2] == payload and args[3] == tag):
                return False
        return True
    raise UsageError(f"unsupported lemma {k}")


def check_lemma(trace, lemma: Lemma, ctx: LemmaContext) -> bool:
    """Pure predicate: is the lemma violated anywhere in this finite trace?"""
    checker = Checker(lemma, ctx)
    for te in trace:
        ev = te.event if hasattr(te, "event") else te
        if checker.feed(ev):
            return True
    return False


_ALIASES = {
    "ma": LemmaKind.MessageAuthenticity,
    "message-authenticity": LemmaKind.MessageAuthenticity,
    "messageauthenticity": LemmaKind.MessageAuthenticity,
    "wa": LemmaKind.WeakAgreement,
    "weak-agreement": LemmaKind.WeakAgreement,
    "weakagreement": LemmaKind.WeakAgreement,
    "nsz": LemmaKind.NoSplittingZero,
    "no-splitting-zero": LemmaKind.NoSplittingZero,
    "nosplittingzero": LemmaKind.NoSplittingZero,
    "nrk": LemmaKind.NoRogueKey,
    "no-rogue-key": LemmaKind.NoRogueKey,
    "noroguekey": LemmaKind.NoRogueKey,
    "aliveness": LemmaKind.Aliveness,
    "nia": LemmaKind.NonInjectiveAgreement,
    "non-injective-agreement": LemmaKind.NonInjectiveAgreement,
    "noninjectiveagreement": LemmaKind.NonInjectiveAgreement,
}


def parse_lemma_kind(text: str) -> LemmaKind:
    kind = _ALIASES.get(text.strip().lower().replace("_", "-"))
    if kind is None:
        raise UsageError(f"unknown lemma {text!r}")
    return kind
