"""Trace events. Payload-carrying arguments are terms; claimant/partner are identity strings."""
from __future__ import annotations

from dataclasses import dataclass

from ..symbolic.terms import Term, render

KINDS = ("Sign", "VfyAgg", "Running", "Commit", "RegisterHonest", "RegisterDishonest",
         "RegisterRogue", "OracleChoice", "Send", "Recv")

# Kinds that matter to lemmas and to state identity. Send/Recv only annotate traces.
FACT_KINDS = frozenset(KINDS) - {"Send", "Recv", "OracleChoice"}

WILDCARD = "*"
NO_PARTNER = "-"


@dataclass(frozen=True)
class Event:
    actor: str
    kind: str
    args: tuple

    @property
    def fact(self) -> tuple:
        return (self.kind, self.args)


def sign_evt(actor: str, m: Term, pk: Term) -> Event:
    return Event(actor, "Sign", (m, pk))


def vfy_evt(actor: str, agg: Term, pairs: tuple, result: bool) -> Event:
    return Event(actor, "VfyAgg", (agg, pairs, result))


def running(actor: str, partner: str, payload: Term | None = None, tag: str = "") -> Event:
    return Event(actor, "Running", (actor, partner, payload, tag))


def commit(actor: str, partner: str, payload: Term | None = None, tag: str = "") -> Event:
    return Event(actor, "Commit", (actor, partner, payload, tag))


def render_arg(a) -> object:
    if isinstance(a, Term):
        return render(a)
    if isinstance(a, tuple):
        return [render_arg(x) for x in a]
    return a


@dataclass(frozen=True)
class TraceEvent:
    position: int
    event: Event

    @property
    def actor(self) -> str:
        return self.event.actor

    @property
    def label(self) -> str:
        return self.event.kind

    def to_dict(self) -> dict:
        return {
            "schema": "trace-v1",
            "position": self.position,
            "actor": self.event.actor,
            "label": self.event.kind,
            "terms": [render_arg(a) for a in self.event.args],
        }

    def render(self) -> str:
        args = ", ".join(_fmt(a) for a in self.event.args)
        return f"{self.position:3d}  {self.event.actor:<8} {self.event.kind}({args})"


def _fmt(a) -> str:
    if isinstance(a, Term):
        return render(a)
    if isinstance(a, tuple):
        return "[" + ", ".join(_fmt(x) for x in a) + "]"
    if a is None:
        return "_"
    return str(a)
